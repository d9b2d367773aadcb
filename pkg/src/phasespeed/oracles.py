"""Grid-free reference values used to certify the numerical pipeline."""

from dataclasses import dataclass
import math

import numpy as np

from ._validation import check_nonnegative, check_positive

PROVENANCES = ("closed-form", "gaussian-moment", "substitution")


@dataclass(frozen=True)
class OracleResult:
    name: str
    value: float
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if not math.isfinite(self.value):
            raise ValueError(f"oracle {self.name} produced a non-finite value")

    def __float__(self):
        return float(self.value)


def free_quench_scaling(t, omega0):
    """Analytic Ermakov solution after switching the trap off: (b, bdot)."""
    t = np.asarray(t, dtype=np.float64)
    b = np.sqrt(1.0 + (omega0 * t) ** 2)
    return b, omega0**2 * t / b


def gaussian_energy_variance(units, post_quench_omega):
    """Energy spread of the omega0 ground state under the trap at `post_quench_omega`.

    For a Gaussian state with covariance ``S`` and a Weyl-quadratic
    Hamiltonian ``x^T A x / 2``,
    ``Var H = Tr[(A S)^2] / 2 + (hbar^2 / 8) Tr[(A J)^2]``, the second term
    being the commutator correction to the classical moment formula.
    """
    check_nonnegative(post_quench_omega, "post_quench_omega")
    m, hbar, w0 = units.mass, units.hbar, units.omega0
    cov = np.diag([hbar / (2 * m * w0), m * hbar * w0 / 2])
    a = np.diag([m * post_quench_omega**2, 1.0 / m])
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    aS, aJ = a @ cov, a @ j
    var = 0.5 * np.trace(aS @ aS) + hbar**2 / 8.0 * np.trace(aJ @ aJ)
    return OracleResult("energy spread", math.sqrt(max(float(var), 0.0)), "gaussian-moment")


def energy_velocity(delta_e, hbar):
    """Phase-space velocity implied by an energy spread: sqrt(2) dE / hbar."""
    return math.sqrt(2.0) * float(delta_e) / hbar


def quench_bhattacharyya(b, bdot, units, spec):
    """Bhattacharyya coefficient of a Gaussian density with its scaled image.

    ``2 [(1 + b^2)^2 / b^2 + (m sigma_q bdot / sigma_p)^2]^(-1/2)``.
    """
    check_positive(b, "b")
    x = units.mass * spec.sigma_q * bdot / spec.sigma_p
    value = 2.0 / math.sqrt((1.0 + b * b) ** 2 / (b * b) + x * x)
    return OracleResult("quench Bhattacharyya", value, "closed-form")


def quench_vcsl(units, spec, bddot0):
    """Classical speed bound m sigma_q |b''(0)| / (2 sigma_p) for the scaled Gaussian."""
    value = units.mass * spec.sigma_q * abs(bddot0) / (2.0 * spec.sigma_p)
    return OracleResult("quench classical velocity", value, "closed-form")


def gaussian_vcsl_free(units, spec):
    """``||{p^2/2m, sqrt(rho0)}||_2`` for a centred Gaussian, by Gaussian moments.

    Equals ``sigma_p / (2 m sigma_q)``; coincides with :func:`quench_vcsl` only
    when the widths match the trap (``sigma_p = m omega0 sigma_q``).
    """
    return OracleResult("free classical velocity",
                        spec.sigma_p / (2.0 * units.mass * spec.sigma_q),
                        "gaussian-moment")


def free_quench_peak_margin(t_max=5.0, samples=200_001):
    """Largest ``|dB/dt| / v_csl`` over a dense scan of the matched free quench.

    With the trap switched off, ``B(t) = 2 / sqrt(4 + (w0 t)^2)`` and
    ``v_csl = w0 / 2``; in units of ``w0`` the margin is
    ``4 s / (4 + s^2)^(3/2)`` with ``s = w0 t``, independent of units.
    """
    s = np.linspace(0.0, t_max, samples)
    margin = 4.0 * s / (4.0 + s * s) ** 1.5
    k = int(np.argmax(margin))
    return OracleResult("free quench peak margin", float(margin[k]), "closed-form"), float(s[k])
