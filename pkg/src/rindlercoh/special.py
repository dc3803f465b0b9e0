"""Complex log-gamma and modified Bessel functions of imaginary order.

The output wave packet needs ``Im[I_{-i nu}(z_ref) I_{i nu}(z)]`` for orders
``nu = Omega0 / accel`` of a few hundred or more.  ``I_{i nu}`` itself carries
a factor ``1/Gamma(1 + i nu)`` whose modulus is ``sqrt(sinh(pi nu)/(pi nu))``,
which overflows double precision near ``nu ~ 225``.  Everything here therefore
works with the scaled series

    S(z; nu) = Gamma(1 + i nu) (z/2)^(-i nu) I_{i nu}(z)
             = sum_k (z/2)^(2k) / (k! (1 + i nu)(2 + i nu)...(k + i nu))

which is O(1) for the arguments we need.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

__all__ = [
    "BesselConvergenceError",
    "bessel_i_imag_order",
    "bessel_product_im",
    "log_gamma_complex",
    "scaled_bessel",
    "scaled_bessel_terms",
]

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

SERIES_RTOL = 1e-16
SERIES_MAX_TERMS = 500


class BesselConvergenceError(ArithmeticError):
    """Raised when the scaled Bessel series does not converge in time."""


def _lanczos_log_gamma(z: complex) -> complex:
    # valid for Re z >= 0.5
    z = z - 1.0
    acc = _LANCZOS_COEFFS[0]
    for k in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def _sin_cos_pi(x: float) -> tuple[float, float]:
    # exact reduction so that integers give exact zeros
    n = round(x)
    r = x - n
    sign = -1.0 if n % 2 else 1.0
    return sign * math.sin(math.pi * r), sign * math.cos(math.pi * r)


def _log_sin_pi(z: complex) -> complex:
    """Principal ``log(sin(pi z))`` without overflow for large ``|Im z|``."""
    y = z.imag
    if abs(y) < 1.0:
        s, c = _sin_cos_pi(z.real)
        # for y == +-0 the signed zero in c * sinh(pi y) selects the side of the cut
        return cmath.log(complex(s * math.cosh(math.pi * y), c * math.sinh(math.pi * y)))
    w = math.pi * (z if y > 0 else z.conjugate())
    # sin w = (i/2) e^{-iw} (1 - e^{2iw}), |e^{2iw}| < 1 for Im w > 0
    val = -1j * w + cmath.log(1.0 - cmath.exp(2j * w)) - math.log(2.0) + 0.5j * math.pi
    im = math.remainder(val.imag, 2.0 * math.pi)
    if im <= -math.pi:
        im += 2.0 * math.pi
    val = complex(val.real, im)
    return val if y > 0 else val.conjugate()


def log_gamma_complex(z: complex) -> complex:
    """Principal branch of log Gamma(z) (analytic continuation, cut on z <= 0).

    Raises ValueError at the poles z = 0, -1, -2, ...
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite argument {z!r}")
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise ValueError(f"log_gamma_complex: pole of Gamma at {z.real:g}")
    if z.real >= 0.5:
        return _lanczos_log_gamma(z)
    # reflection; the 2 pi i shift keeps the result on the continuous branch
    shift = math.copysign(2.0 * math.pi, z.imag) * math.floor(0.5 * z.real + 0.25)
    return complex(_LOG_PI, shift) - _log_sin_pi(z) - _lanczos_log_gamma(1.0 - z)


def scaled_bessel_terms(nu: float, z) -> tuple[np.ndarray, np.ndarray]:
    """Scaled series ``S(z; nu)`` together with the number of terms used.

    ``z`` may be a scalar or an array of positive reals.  The series stops for
    an element once two consecutive terms fall below ``1e-16`` of the running
    sum.
    """
    nu = float(nu)
    if not math.isfinite(nu) or nu < 0.0:
        raise ValueError(f"order must be finite and >= 0, got {nu!r}")
    z = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z < 0.0):
        raise ValueError("scaled_bessel requires finite z >= 0")
    q = 0.25 * z * z
    term = np.ones(z.shape, dtype=complex)
    total = np.ones(z.shape, dtype=complex)
    small = np.zeros(z.shape, dtype=np.int8)
    nterms = np.ones(z.shape, dtype=np.int64)
    active = q > 0.0
    k = 0
    while np.any(active):
        k += 1
        if k >= SERIES_MAX_TERMS or not np.all(np.isfinite(total)):
            bad = np.flatnonzero(active.ravel())
            worst = float(z.ravel()[bad].max())
            raise BesselConvergenceError(
                f"scaled Bessel series not converged after {k} terms "
                f"(nu={nu:g}, {bad.size} arguments pending, largest z={worst:g})"
            )
        with np.errstate(over="ignore", invalid="ignore"):
            term = np.where(active, term * q / (k * (k + 1j * nu)), 0.0)
        total = total + term
        nterms = nterms + active
        tiny = np.abs(term) < SERIES_RTOL * np.abs(total)
        small = np.where(active & tiny, small + 1, 0).astype(np.int8)
        active = active & (small < 2)
    return total, nterms


def scaled_bessel(nu: float, z):
    """``S(z; nu) = Gamma(1 + i nu) (z/2)^(-i nu) I_{i nu}(z)``; tends to 1 as z -> 0."""
    values, _ = scaled_bessel_terms(nu, z)
    return values[()] if values.ndim == 0 else values


def bessel_product_im(nu: float, z_ref: float, z):
    """Rescaled output modulation ``Im[I_{-i nu}(z_ref) I_{i nu}(z)] * pi nu / sinh(pi nu)``.

    Evaluated as ``Im[exp(i nu ln(z/z_ref)) conj(S(z_ref)) S(z)]``; the dropped
    factor ``sinh(pi nu)/(pi nu)`` is positive and ends up in the mode's
    normalisation constant.
    """
    if z_ref <= 0.0:
        raise ValueError("z_ref must be positive")
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0.0):
        raise ValueError("z must be positive")
    s_ref = complex(scaled_bessel(nu, z_ref))
    s = scaled_bessel_terms(nu, z)[0]
    theta = nu * np.log(z / z_ref)
    # explicit real arithmetic keeps Im[conj(a) a] exactly zero at z == z_ref
    re = s_ref.real * s.real + s_ref.imag * s.imag
    im = s_ref.real * s.imag - s_ref.imag * s.real
    out = np.sin(theta) * re + np.cos(theta) * im
    return float(out) if out.ndim == 0 else out


def bessel_i_imag_order(nu: float, z: float) -> complex:
    """Unscaled ``I_{i nu}(z)`` for real ``z > 0``; only representable for moderate nu."""
    s = complex(scaled_bessel(nu, z))
    log_pref = 1j * nu * math.log(z / 2.0) - log_gamma_complex(complex(1.0, nu))
    return s * cmath.exp(log_pref)
