"""Gaussian channel sigma -> M sigma M^T + N from the overlap coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import CovarianceMatrix4, symplectic_form
from .overlaps import OverlapCoefficients

__all__ = [
    "ChannelError",
    "GaussianChannel",
    "apply",
    "build_full_m",
    "build_simplified",
    "is_completely_positive",
    "output_tmsv_closed_form",
]


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianChannel:
    m_matrix: np.ndarray
    n_matrix: np.ndarray
    mode: str = "simplified"  # or "full_m_diagnostic"

    def __post_init__(self):
        if self.mode not in ("simplified", "full_m_diagnostic"):
            raise ChannelError(f"unknown channel mode {self.mode!r}")
        if not np.array_equal(self.n_matrix, self.n_matrix.T):
            raise ChannelError("noise matrix must be symmetric")


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ChannelError(f"alpha = {alpha!r} outside (0, 1]")
    return alpha


def build_simplified(alpha_I: float, alpha_II: float) -> GaussianChannel:
    """Channel with the beta terms dropped: M = a1 1 (+) a2 1, N = (1 - a1^2) 1 (+) (1 - a2^2) 1."""
    a1, a2 = _check_alpha(alpha_I), _check_alpha(alpha_II)
    m = np.diag([a1, a1, a2, a2])
    n = np.diag([1.0 - a1 * a1, 1.0 - a1 * a1, 1.0 - a2 * a2, 1.0 - a2 * a2])
    return GaussianChannel(m, n, "simplified")


def _block(alpha: complex, beta: complex) -> np.ndarray:
    d, s = alpha - beta, alpha + beta
    return np.array([[d.real, -s.imag], [d.imag, s.real]])


def build_full_m(coeffs_I: OverlapCoefficients, coeffs_II: OverlapCoefficients) -> np.ndarray:
    """Beta-inclusive transfer matrix; diagnostic only, there is no matching noise matrix."""
    m = np.zeros((4, 4))
    m[:2, :2] = _block(complex(coeffs_I.alpha), complex(coeffs_I.beta))
    m[2:, 2:] = _block(complex(coeffs_II.alpha), complex(coeffs_II.beta))
    return m


def is_completely_positive(channel: GaussianChannel, tol: float = 1e-9) -> bool:
    """N + i(Omega - M Omega M^T) >= 0."""
    omega = symplectic_form()
    m = channel.m_matrix
    herm = channel.n_matrix + 1j * (omega - m @ omega @ m.T)
    return bool(np.linalg.eigvalsh(herm).min() >= -tol)


def apply(channel: GaussianChannel, state: CovarianceMatrix4) -> CovarianceMatrix4:
    if channel.mode != "simplified":
        raise ChannelError("only simplified channels can act on states")
    m = channel.m_matrix
    out = m @ state.matrix @ m.T + channel.n_matrix
    out = 0.5 * (out + out.T)
    return CovarianceMatrix4(out, m @ state.first_moments)


def output_tmsv_closed_form(alpha_I: float, alpha_II: float, r: float) -> CovarianceMatrix4:
    """Two-mode squeezed vacuum after the simplified channel, written out entrywise."""
    a1, a2 = float(alpha_I), float(alpha_II)
    c, s = math.cosh(2.0 * r), math.sinh(2.0 * r)
    x = a1 * a1 * c - a1 * a1 + 1.0
    y = a1 * a2 * s
    z = a2 * a2 * c - a2 * a2 + 1.0
    return CovarianceMatrix4(
        np.array(
            [
                [x, 0.0, y, 0.0],
                [0.0, x, 0.0, -y],
                [y, 0.0, z, 0.0],
                [0.0, -y, 0.0, z],
            ]
        )
    )
