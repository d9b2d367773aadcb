"""Speed limits for quantum and classical dynamics, evaluated in phase space.

States live on a uniform (q, p) grid as Wigner functions or classical
densities.  Quadratic Hamiltonians are evolved exactly by symplectic
pullback; overlaps with the initial state are compared against speed-limit
velocities built from brackets of the Hamiltonian with the initial state.
"""

from .bounds import (Bound, BoundReport, csl_generator_norms, purity, tau_bound, v_csl,
                     v_csl_timeavg, v_qsl, v_ssl, verify_rate_dominance)
from .brackets import Liouvillian, MoyalOrder, moyal, poisson
from .config import ScenarioConfig, load_config, parse_config
from .dynamics import (QuenchTrajectory, SymplecticMap, Transporter, evolve_quench,
                       evolve_series, pullback_map, quench_grid, solve_ermakov, state_grid,
                       transport)
from .estimator import SpeedLimitEstimator
from .exceptions import (BoundaryWarning, ConfigError, DominanceViolation, FocusingSingularity,
                         GridMismatchError, MassLossWarning, NegativeDensityError,
                         OverlapResidualError, PurityError)
from .grid import PhaseField, PhaseGrid, d3, d_dp, d_dq, integrate
from .metrics import (Measure, OverlapSeries, bhattacharyya, bures_angle, closed_form_fidelity,
                      fidelity, hellinger, overlap, overlap_series)
from .scenarios import RunSummary, run_scenario, write_outputs
from .states import (GaussianSpec, UnitsSpec, classical_from_wigner, classical_gaussian,
                     gaussian_wigner, ho_wigner, quadratic_hamiltonian)

__version__ = "0.1.0"
