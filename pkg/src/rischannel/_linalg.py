"""Dense LU helpers with a LAPACK reciprocal-condition estimate."""

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lapack, lu_factor, lu_solve

from .errors import ConditioningError

RCOND_MIN = 1e-13
RCOND_WARN = 1e-10


def lu_rcond(a):
    """Factorize ``a`` with partial pivoting and estimate its 1-norm rcond.

    Returns ``((lu, piv), rcond)``. A zero pivot yields ``rcond = 0``.
    """
    a = np.asarray(a)
    if a.shape[0] == 0:
        return (a.copy(), np.zeros(0, dtype=np.int32)), 1.0
    anorm = np.linalg.norm(a, 1)
    with warnings.catch_warnings():
        # singularity is reported through rcond instead
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(a, check_finite=True)
    if not np.all(np.diag(lu)):
        return (lu, piv), 0.0
    gecon, = lapack.get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0:
        return (lu, piv), 0.0
    return (lu, piv), float(rcond)


def factorize(a, what="matrix", rcond_min=RCOND_MIN):
    """LU factorization that raises :class:`ConditioningError` below ``rcond_min``."""
    fac, rcond = lu_rcond(a)
    if rcond <= rcond_min:
        raise ConditioningError(
            f"{what} is singular or near-singular (rcond estimate {rcond:.3e})",
            rcond=rcond,
        )
    return fac, rcond


def solve_factored(fac, b):
    if fac[0].shape[0] == 0:
        return np.zeros_like(b)
    return lu_solve(fac, b, check_finite=False)


def rel_frobenius(reference, other):
    """||reference - other||_F / ||reference||_F, or 0 when both vanish."""
    reference = np.asarray(reference)
    diff = np.linalg.norm(reference - np.asarray(other))
    ref = np.linalg.norm(reference)
    if ref == 0.0:
        return 0.0 if diff == 0.0 else float("inf")
    return float(diff / ref)
