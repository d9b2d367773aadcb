"""Oracle-versus-grid cross-validation suite behind ``phasespeed verify-all``.

Every check prints one PASS/FAIL line.  Grid-based checks depend on the grid
size, so running with a coarse grid (e.g. ``--grid-n 64``) makes the
convergence checks fail with the measured error in the message.
"""

from dataclasses import dataclass, replace
import math
import sys
import time
import warnings

import numpy as np

from .bounds import Bound, purity, v_csl, v_qsl
from .brackets import MoyalOrder, moyal, poisson
from .config import ScenarioConfig
from .dynamics import (SymplecticMap, Transporter, pullback_map, quench_grid,
                       solve_ermakov, state_grid)
from .grid import d_dq, integrate
from .metrics import closed_form_fidelity, fidelity
from .oracles import (energy_velocity, free_quench_peak_margin, free_quench_scaling,
                      gaussian_energy_variance, quench_bhattacharyya)
from .scenarios import run_scenario
from .states import (UnitsSpec, classical_from_wigner, classical_gaussian, eigenstate_extent,
                     gaussian_wigner, ho_wigner, quadratic_hamiltonian)

GOLDEN_PEAK_MARGIN = 0.38490017945975
SAMPLE_TIMES = np.linspace(0.0, 5.0, 20)
SEED = 20240601


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<30s} {self.detail}"


def _verdict(name, error, tol, what="error"):
    ok = bool(error <= tol)
    return CheckResult(name, ok, f"{what} {error:.3e} ({'<=' if ok else '>'} {tol:g})")


CHECKS = []


def _check(name):
    def register(func):
        func.check_name = name
        CHECKS.append(func)
        return func
    return register


class _Suite:
    """Lazily shared scenario runs so each expensive pass happens once."""

    def __init__(self, n):
        self.n = n
        self.units = UnitsSpec()
        self._runs = {}

    def run(self, key, cfg):
        if key not in self._runs:
            self._runs[key] = run_scenario(cfg)
        return self._runs[key]

    def classical(self):
        return self.run("classical", ScenarioConfig(grid_n=self.n))

    def quantum(self):
        return self.run("quantum", ScenarioConfig(
            scenario="quench-quantum", state_kind="ho-eigenstate", grid_n=self.n,
            bounds=(Bound.QSL, Bound.SSL)))

    def eigen_fidelities(self, level):
        """Grid fidelity of eigenstate `level` at the 20 sample times."""
        if level not in self._runs:
            self._runs[level] = self._eigen_fidelities(level)
        return self._runs[level]

    def _eigen_fidelities(self, level):
        traj = solve_ermakov(lambda t: 0.0, 1.0, 5.0, 1900)
        idx = np.rint(SAMPLE_TIMES / traj.dt).astype(int)
        spec = self.units.matched_gaussian()
        grid = quench_grid(self.units, traj, spec.sigma_q, spec.sigma_p, n=self.n,
                           extent=eigenstate_extent(level))
        w0 = ho_wigner(level, self.units, grid)
        tr = Transporter(w0)
        values = np.array([fidelity(w0, tr(pullback_map(traj, i, 1.0)), self.units)
                           for i in idx])
        exact = closed_form_fidelity(level, traj.b[idx], traj.bdot[idx], 1.0)
        return values, exact, traj, idx, grid, tr


@_check("grid.quadrature")
def check_quadrature(s):
    spec = s.units.matched_gaussian()
    g = state_grid(s.units, spec.sigma_q, spec.sigma_p, n=s.n)
    err = abs(integrate(classical_gaussian(spec, g)) - 1.0)
    return _verdict("grid.quadrature", err, 1e-10)


@_check("grid.derivative")
def check_derivative(s):
    g = state_grid(s.units, 1.0, 1.0, n=s.n)
    f = g.sample(lambda q, p: np.exp(-(q**2) - p**2))
    Q, P = g.mesh
    exact = -2.0 * Q * np.exp(-(Q**2) - P**2)
    err = float(np.max(np.abs(d_dq(f).values - exact)))
    return _verdict("grid.derivative", err, 1e-5)


@_check("states.normalization-purity")
def check_normalization(s):
    worst = 0.0
    for level in range(4):
        spec = s.units.matched_gaussian()
        g = state_grid(s.units, spec.sigma_q, spec.sigma_p, n=s.n,
                       extent=eigenstate_extent(level))
        w = ho_wigner(level, s.units, g)
        worst = max(worst, abs(integrate(w) - 1.0), abs(purity(w, s.units) - 1.0))
    return _verdict("states.normalization-purity", worst, 1e-8)


@_check("states.correspondence")
def check_correspondence(s):
    spec = s.units.matched_gaussian()
    g = state_grid(s.units, spec.sigma_q, spec.sigma_p, n=s.n)
    rho = classical_from_wigner(gaussian_wigner(spec, g), s.units)
    err = float(np.max(np.abs(rho.values - classical_gaussian(spec, g).values)))
    return _verdict("states.correspondence", err, 1e-12)


@_check("brackets.moyal-quadratic")
def check_moyal_quadratic(s):
    g = state_grid(s.units, 1.0, 1.0, n=s.n, extent=eigenstate_extent(3))
    h = quadratic_hamiltonian(s.units, 0.0, g)
    w = ho_wigner(3, s.units, g)
    diff = moyal(h, w, MoyalOrder.HBAR_SQUARED, s.units).values - poisson(h, w).values
    return _verdict("brackets.moyal-quadratic", float(np.max(np.abs(diff))), 1e-9)


@_check("brackets.stationary")
def check_stationary(s):
    worst = 0.0
    for level in range(4):
        spec = s.units.matched_gaussian()
        g = state_grid(s.units, spec.sigma_q, spec.sigma_p, n=s.n,
                       extent=eigenstate_extent(level))
        h = quadratic_hamiltonian(s.units, s.units.omega0, g)
        worst = max(worst, v_qsl(h, ho_wigner(level, s.units, g), units=s.units))
    return _verdict("brackets.stationary", worst, 1e-5, "velocity")


@_check("dynamics.ermakov")
def check_ermakov(s):
    traj = solve_ermakov(lambda t: 0.0, 1.0, 5.0, 500)
    b, _ = free_quench_scaling(traj.times, 1.0)
    return _verdict("dynamics.ermakov", float(np.max(np.abs(traj.b - b))), 1e-8)


@_check("dynamics.symplectic")
def check_symplectic(s):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(1000):
        a, b, c = rng.uniform(-3.0, 3.0, 3)
        a = a if abs(a) > 0.1 else 0.1
        m = SymplecticMap(a, b, c, (1.0 + b * c) / a)
        worst = max(worst, abs(m.determinant - 1.0), abs(m.then(m.inverse()).determinant - 1.0))
    return _verdict("dynamics.symplectic", worst, 1e-10, "|det - 1|")


@_check("dynamics.purity-mass-drift")
def check_transport_invariants(s):
    _, _, traj, idx, grid, tr = s.eigen_fidelities(0)
    w0 = tr.f0
    p0 = purity(w0, s.units)
    drift, mass = 0.0, 0.0
    for i in idx:
        w = tr(pullback_map(traj, i, 1.0))
        drift = max(drift, abs(purity(w, s.units) - p0))
        mass = max(mass, abs(integrate(w) - integrate(w0)))
    return _verdict("dynamics.purity-mass-drift", max(drift, mass), 1e-6, "drift")


@_check("metrics.closed-form-F0..F3")
def check_closed_form(s):
    worst, spot = 0.0, 0.0
    for level in range(4):
        values, exact, *_ = s.eigen_fidelities(level)
        worst = max(worst, float(np.max(np.abs(values - exact))))
        spot = max(spot, abs(values[0] - 1.0))
    series = s.quantum().reports[0].series
    k = int(np.argmin(np.abs(series.times - 1.0)))
    spot = max(spot, abs(series.value[k] - 2.0 / math.sqrt(5.0)))
    return _verdict("metrics.closed-form-F0..F3", max(worst, spot), 1e-5)


@_check("metrics.F1-equals-F0-cubed")
def check_identity(s):
    rng = np.random.default_rng(SEED)
    b = rng.uniform(0.05, 20.0, 100)
    bdot = rng.uniform(-20.0, 20.0, 100)
    f0 = closed_form_fidelity(0, b, bdot, 1.0)
    f1 = closed_form_fidelity(1, b, bdot, 1.0)
    return _verdict("metrics.F1-equals-F0-cubed", float(np.max(np.abs(f1 - f0**3))), 1e-12)


@_check("metrics.fidelity-vs-bhattacharyya")
def check_quantum_classical(s):
    f = s.quantum().reports[0].series.value
    bc = s.classical().reports[0].series.value
    return _verdict("metrics.fidelity-vs-bhattacharyya", float(np.max(np.abs(f - bc))), 1e-6)


@_check("oracles.bhattacharyya")
def check_bhattacharyya_oracle(s):
    rep = s.classical().reports[0]
    traj = solve_ermakov(lambda t: 0.0, 1.0, 5.0, 500)
    spec = s.units.matched_gaussian()
    exact = np.array([quench_bhattacharyya(b, bd, s.units, spec).value
                      for b, bd in zip(traj.b, traj.bdot)])
    err = float(np.max(np.abs(rep.series.value - exact)))
    return _verdict("oracles.bhattacharyya", err, 1e-6)


@_check("bounds.three-equal")
def check_three_bounds(s):
    v = [s.quantum().summary.bounds[0].velocity, s.quantum().summary.bounds[1].velocity,
         s.classical().summary.bounds[0].velocity]
    err = max(abs(x - 0.5) / 0.5 for x in v)
    return _verdict("bounds.three-equal", err, 1e-4, "rel error")


@_check("bounds.energy-spread")
def check_energy_spread(s):
    de = gaussian_energy_variance(s.units, 0.0).value
    vq = s.quantum().summary.bounds[0].velocity
    target = energy_velocity(de, s.units.hbar)
    return _verdict("bounds.energy-spread", abs(vq - target) / target, 1e-4, "rel error")


@_check("bounds.quench-peak-margin")
def check_quench_peak_margin(s):
    rep = s.classical().reports[0]
    golden, _ = free_quench_peak_margin()
    if abs(golden.value - GOLDEN_PEAK_MARGIN) > 1e-9:
        return CheckResult("bounds.quench-peak-margin", False, "oracle scan disagrees with frozen peak")
    ok = rep.passed and 0.3 <= rep.max_margin <= 0.5
    err = abs(rep.max_margin - GOLDEN_PEAK_MARGIN) / GOLDEN_PEAK_MARGIN
    detail = f"peak margin {rep.max_margin:.8f} at t = {rep.times[rep.argmax]:.3f}"
    if not ok:
        return CheckResult("bounds.quench-peak-margin", False, detail + " (outside [0.3, 0.5] or > 1)")
    res = _verdict("bounds.quench-peak-margin", err, 1e-4, "rel error vs golden")
    return replace(res, detail=f"{detail}, {res.detail}")


@_check("bounds.time-bound")
def check_time_bound(s):
    reps = list(s.quantum().reports) + list(s.classical().reports)
    bad = [r.bound.value for r in reps if not r.tau_ok]
    return CheckResult("bounds.time-bound", not bad,
                       "all sampled times satisfied" if not bad else "violated for " + ", ".join(bad))


@_check("convergence.grid-doubling")
def check_refinement(s):
    spec = s.units.matched_gaussian()
    vals = []
    for n in (s.n, 2 * s.n):
        g = state_grid(s.units, spec.sigma_q, spec.sigma_p, n=n)
        vals.append(v_csl(quadratic_hamiltonian(s.units, 0.0, g), classical_gaussian(spec, g)))
    return _verdict("convergence.grid-doubling", abs(vals[1] - vals[0]) / vals[1], 1e-4,
                    "rel change")


@_check("units.covariance")
def check_unit_covariance(s):
    base = ScenarioConfig(scenario="quench-quantum", state_kind="ho-eigenstate", grid_n=s.n,
                          steps=100, bounds=tuple(Bound))
    scaled = replace(base, units=UnitsSpec(hbar=2.0, mass=3.0, omega0=0.5))
    a, b = run_scenario(base), run_scenario(scaled)
    worst = 0.0
    for ra, rb in zip(a.reports, b.reports):
        worst = max(worst, float(np.max(np.abs(ra.margin - rb.margin))),
                    float(np.max(np.abs(ra.series.value - rb.series.value))))
    return _verdict("units.covariance", worst, 1e-6, "max change")




def run_checks(grid_n=512, stream=None):
    """Run every check, printing one line each to `stream` as it completes."""
    suite = _Suite(grid_n)
    results = []
    start = time.perf_counter()
    for check in CHECKS:
        name = check.check_name
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = check(suite)
        except Exception as exc:  # a crashing check is a failing check
            res = CheckResult(name, False, f"{type(exc).__name__}: {exc}")
        results.append(res)
        if stream is not None:
            print(res.line(), file=stream, flush=True)
    if stream is not None:
        print(f"elapsed {time.perf_counter() - start:.1f} s", file=stream)
    return results


if __name__ == "__main__":
    sys.exit(0 if all(r.passed for r in run_checks(stream=sys.stdout)) else 1)
