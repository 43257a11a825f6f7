"""Default numerical tolerances and steps.

Every routine that consumes one of these accepts it as a keyword argument,
so callers can override per call; the dataclass exists to keep the defaults
in one place.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Defaults:
    fd_step: float = 1e-4            # central-difference step (scaled by domain extent)
    tol_unit_speed: float = 1e-6
    tol_sym: float = 1e-6
    tol_frenet: float = 1e-5
    tol_num: float = 1e-8            # closed-form evaluation paths
    tol_num_fd: float = 1e-5         # finite-difference evaluation paths
    tol_orth: float = 1e-6
    tol_conf: float = 1e-6
    tol_cpd: float = 1e-5
    tol_eik: float = 1e-5
    tol_inv: float = 1e-10
    tol_level: float = 1e-6
    eps_regular: float = 1e-10
    eps_det: float = 1e-12
    eps_umbilic: float = 1e-6
    eps_transversal: float = 1e-8    # relative to |X|
    eps_costheta: float = 1e-3
    eps_sintheta: float = 1e-3
    eps_b: float = 1e-8
    eps_focal: float = 1e-8
    quad_tol: float = 1e-10


DEFAULTS = Defaults()
