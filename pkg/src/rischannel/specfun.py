"""Order-zero cylindrical Bessel and Hankel functions of a real argument.

Rational approximations on [0, 5] and the Hankel asymptotic expansion with
rational phase/amplitude corrections beyond 5 (Cephes, S. L. Moshier).
Absolute error is a few ulp over the range used by the Green's function.

The scalar functions are the public API. ``_hankel0_array`` evaluates the
same formulas over numpy arrays for interaction-matrix assembly.
"""

import math

import numpy as np

from .errors import DomainError

__all__ = ["bessel_j0", "bessel_y0", "hankel0_first_kind"]

_SQ2OPI = 7.9788456080286535587989e-1  # sqrt(2/pi)
_TWOOPI = 6.36619772367581343075535e-1  # 2/pi
_PIO4 = 7.85398163397448309616e-1

# squares of the first two zeros of J0
_DR1 = 5.78318596294678452118e0
_DR2 = 3.04712623436620863991e1

_RP = (
    -4.79443220978201773821e9,
    1.95617491946556577543e12,
    -2.49248344360967716204e14,
    9.70862251047306323952e15,
)
_RQ = (  # leading 1.0 implied
    4.99563147152651017219e2,
    1.73785401676374683123e5,
    4.84409658339962045305e7,
    1.11855537045356834862e10,
    2.11277520115489217587e12,
    3.10518229857422583814e14,
    3.18121955943204943306e16,
    1.71086294081043136091e18,
)
_YP = (
    1.55924367855235737965e4,
    -1.46639295903971606143e7,
    5.43526477051876500413e9,
    -9.82136065717911466409e11,
    8.75906394395366999549e13,
    -3.46628303384729719441e15,
    4.42733268572569800351e16,
    -1.84950800436986690637e16,
)
_YQ = (  # leading 1.0 implied
    1.04128353664259848412e3,
    6.26107330137134956842e5,
    2.68919633393814121987e8,
    8.64002487103935000337e10,
    2.02979612750105546709e13,
    3.17157752842975028269e15,
    2.50596256172653059228e17,
)
_PP = (
    7.96936729297347051624e-4,
    8.28352392107440799803e-2,
    1.23953371646414299388e0,
    5.44725003058768775090e0,
    8.74716500199817011941e0,
    5.30324038235394892183e0,
    9.99999999999999997821e-1,
)
_PQ = (
    9.24408810558863637013e-4,
    8.56288474354474431428e-2,
    1.25352743901058953537e0,
    5.47097740330417105182e0,
    8.76190883237069594232e0,
    5.30605288235394617618e0,
    1.00000000000000000218e0,
)
_QP = (
    -1.13663838898469149931e-2,
    -1.28252718670509318512e0,
    -1.95539544257735972385e1,
    -9.32060152123768231369e1,
    -1.77681167980488050595e2,
    -1.47077505154951170175e2,
    -5.14105326766599330220e1,
    -6.05014350600728481186e0,
)
_QQ = (  # leading 1.0 implied
    6.43178256118178023184e1,
    8.56430025976980587198e2,
    3.88240183605401609683e3,
    7.24046774195652478189e3,
    5.93072701187316984827e3,
    2.06209331660327847417e3,
    2.42005740240291393179e2,
)


def _polevl(x, coef):
    ans = coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _p1evl(x, coef):
    ans = x + coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _check(x, strict):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x}")
    if x < 0.0 or (strict and x == 0.0):
        bound = "> 0" if strict else ">= 0"
        raise DomainError(f"argument must be {bound}, got {x}")
    return x


def _asymptotic(x):
    """Amplitude/phase terms of the large-argument expansion."""
    w = 5.0 / x
    z = 25.0 / (x * x)
    p = _polevl(z, _PP) / _polevl(z, _PQ)
    q = _polevl(z, _QP) / _p1evl(z, _QQ)
    return p, w * q, x - _PIO4


def _j0(x):
    if x <= 5.0:
        z = x * x
        if x < 1.0e-5:
            return 1.0 - z / 4.0
        return (z - _DR1) * (z - _DR2) * _polevl(z, _RP) / _p1evl(z, _RQ)
    p, wq, xn = _asymptotic(x)
    return (p * math.cos(xn) - wq * math.sin(xn)) * _SQ2OPI / math.sqrt(x)


def _y0(x):
    if x <= 5.0:
        z = x * x
        w = _polevl(z, _YP) / _p1evl(z, _YQ)
        return w + _TWOOPI * math.log(x) * _j0(x)
    p, wq, xn = _asymptotic(x)
    return (p * math.sin(xn) + wq * math.cos(xn)) * _SQ2OPI / math.sqrt(x)


def bessel_j0(x):
    """Bessel function of the first kind of order zero, for ``x >= 0``."""
    return _j0(_check(x, strict=False))


def bessel_y0(x):
    """Bessel function of the second kind of order zero, for ``x > 0``.

    Diverges logarithmically as ``x -> 0+``; zero and negative arguments raise
    :class:`DomainError`.
    """
    return _y0(_check(x, strict=True))


def hankel0_first_kind(x):
    """H0^(1)(x) = J0(x) + 1j*Y0(x) for real ``x > 0``."""
    x = _check(x, strict=True)
    return complex(_j0(x), _y0(x))


def _hankel0_array(x):
    """Vectorized H0^(1) over a float array with all entries > 0."""
    x = np.asarray(x, dtype=np.float64)
    if x.size and not (np.all(np.isfinite(x)) and x.min() > 0.0):
        raise DomainError("Hankel argument array must be finite and > 0")
    j = np.empty_like(x)
    y = np.empty_like(x)

    small = x <= 5.0
    xs = x[small]
    z = xs * xs
    js = (z - _DR1) * (z - _DR2) * _polevl(z, _RP) / _p1evl(z, _RQ)
    js = np.where(xs < 1.0e-5, 1.0 - z / 4.0, js)
    j[small] = js
    y[small] = _polevl(z, _YP) / _p1evl(z, _YQ) + _TWOOPI * np.log(xs) * js

    big = ~small
    xb = x[big]
    p, wq, xn = _asymptotic(xb)
    c, s = np.cos(xn), np.sin(xn)
    amp = _SQ2OPI / np.sqrt(xb)
    j[big] = (p * c - wq * s) * amp
    y[big] = (p * s + wq * c) * amp
    return j + 1j * y
