import pytest

from phasespeed import Bound, ConfigError, parse_config
from phasespeed.config import load_config


def test_defaults_reproduce_classical_quench():
    cfg = parse_config("")
    assert cfg.scenario == "quench-classical"
    assert cfg.state_kind == "classical-gaussian"
    assert cfg.bounds == (Bound.CSL, Bound.CSL_TIMEAVG)
    assert (cfg.grid_n, cfg.halfwidth_sigmas, cfg.t_max, cfg.steps) == (512, 8.0, 5.0, 500)
    spec = cfg.gaussian_spec()
    assert spec.sigma_q == pytest.approx(2**-0.5) and spec.sigma_p == pytest.approx(2**-0.5)
    assert cfg.post_quench_omega() == 0.0


def test_full_config():
    text = """
    # comment line
    scenario = custom-omega

    [units]
    hbar = 2
    mass = 3      ; trailing comment
    omega0 = 0.5

    [grid]
    n = 256
    halfwidth_sigmas = 9

    [state]
    kind = gaussian 1.0 0.5
    center_q = 0.3

    [hamiltonian]
    omega_final = 2

    [time]
    t_max = 4
    steps = 400

    [bounds]
    evaluate = qsl, csl-timeavg

    [output]
    dir = results
    """
    cfg = parse_config(text)
    assert cfg.units.hbar == 2.0 and cfg.units.omega0 == 0.5
    assert (cfg.sigma_q, cfg.sigma_p, cfg.center_q) == (1.0, 0.5, 0.3)
    assert cfg.post_quench_omega() == pytest.approx(1.0)
    assert cfg.bounds == (Bound.QSL, Bound.CSL_TIMEAVG)
    assert (cfg.grid_n, cfg.steps, cfg.t_max, cfg.out_dir) == (256, 400, 4.0, "results")


def test_eigenstate_level():
    cfg = parse_config("scenario = quench-quantum\n[state]\nkind = ho-eigenstate 3\n")
    assert cfg.state_kind == "ho-eigenstate" and cfg.level == 3
    assert cfg.bounds == (Bound.QSL, Bound.SSL)


@pytest.mark.parametrize("text, lineno, fragment", [
    ("scenario = quench-classical\n[grid]\nnn = 3\n", 3, "unknown key"),
    ("[grid]\nn = 8\n", 2, "at least 16"),
    ("[time]\nsteps = 50\n", 2, "at least 100"),
    ("[time]\nt_max = 0\n", 2, "positive"),
    ("[time]\nt_max = abc\n", 2, "expected float"),
    ("[time]\nt_max = nan\n", 2, "finite"),
    ("[nosuch]\n", 1, "unknown section"),
    ("[grid\n", 1, "malformed"),
    ("scenario\n", 1, "key = value"),
    ("scenario = warp\n", 1, "scenario must be"),
    ("[units]\nhbar = -1\n", 2, "positive"),
    ("[grid]\nn = 64\nn = 128\n", 3, "duplicate key"),
    ("[grid]\n[grid]\n", 2, "duplicate section"),
    ("[state]\nkind = ho-eigenstate 13\n", 2, "level"),
    ("[state]\nkind = gaussian 1.0\n", 2, "sigma_q and sigma_p"),
    ("[state]\nkind = squeezed\n", 2, "state kind"),
    ("[state]\nkind = ho-eigenstate\ncenter_q = 1\n", 3, "does not apply"),
    ("[bounds]\nevaluate = qsl\n", 2, "needs a quantum state"),
    ("scenario = quench-quantum\n[state]\nkind = ho-eigenstate 1\n[bounds]\nevaluate = csl\n",
     5, "non-negative Wigner"),
    ("[bounds]\nevaluate = csl, csl\n", 2, "without repeats"),
    ("[bounds]\nevaluate = fast\n", 2, "drawn from"),
    ("[hamiltonian]\nomega_final = 2\n", 2, "only to scenario custom-omega"),
    ("scenario = custom-omega\n[hamiltonian]\nomega_final = -1\n", 3, "non-negative"),
])
def test_errors_carry_line_numbers(text, lineno, fragment):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.lineno == lineno
    assert f"line {lineno}:" in str(err.value)
    assert fragment in str(err.value)


def test_custom_omega_requires_final_frequency():
    with pytest.raises(ConfigError, match="omega_final"):
        parse_config("scenario = custom-omega\n")


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("scenario = stationary\n", encoding="utf-8")
    assert load_config(path).scenario == "stationary"
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.cfg")
