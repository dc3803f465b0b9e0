"""Two-mode Gaussian states: covariance matrices, entropy, and coherence.

Quadrature order is (q1, p1, q2, p2) and the vacuum covariance matrix is the
identity.  Logarithms are base 2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CONVENTIONS",
    "CovarianceMatrix4",
    "SymplecticSpectrum",
    "UnphysicalStateError",
    "coherence",
    "entropy_term",
    "mean_occupations",
    "occupation_term",
    "symplectic_eigenvalues",
    "symplectic_eigenvalues_numeric",
    "symplectic_form",
    "two_mode_squeezed_vacuum",
    "von_neumann_entropy",
]

CONVENTIONS = ("physical", "paper")
PHYSICAL_TOL = 1e-9


class UnphysicalStateError(ValueError):
    pass


def symplectic_form(modes: int = 2) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class CovarianceMatrix4:
    matrix: np.ndarray
    first_moments: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        d = np.array(self.first_moments, dtype=float)
        if m.shape != (4, 4) or d.shape != (4,):
            raise ValueError("expected a 4x4 covariance matrix and 4 first moments")
        if not np.all(np.isfinite(m)) or not np.all(np.isfinite(d)):
            raise ValueError("covariance matrix entries must be finite")
        if not np.array_equal(m, m.T):
            raise ValueError("covariance matrix must be exactly symmetric")
        m.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "first_moments", d)

    @classmethod
    def vacuum(cls) -> "CovarianceMatrix4":
        return cls(np.eye(4))

    @property
    def blocks(self):
        m = self.matrix
        return m[:2, :2], m[2:, 2:], m[:2, 2:]


@dataclass(frozen=True)
class SymplecticSpectrum:
    nu_minus: float
    nu_plus: float


def two_mode_squeezed_vacuum(r: float) -> CovarianceMatrix4:
    if r < 0:
        raise ValueError("squeezing r must be >= 0")
    c, s = math.cosh(2.0 * r), math.sinh(2.0 * r)
    return CovarianceMatrix4(
        np.array(
            [
                [c, 0.0, s, 0.0],
                [0.0, c, 0.0, -s],
                [s, 0.0, c, 0.0],
                [0.0, -s, 0.0, c],
            ]
        )
    )


def _det2(m) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def _det4(state: CovarianceMatrix4) -> float:
    # Schur complement on the first block
    a, b, c = state.blocks
    det_a = _det2(a)
    a_inv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det_a
    return det_a * _det2(b - c.T @ a_inv @ c)


def _discriminant(a, b, c) -> float:
    # Delta^2 - 4 det sigma == (det A - det B)^2 + 4 det(A J C + C J B),
    # both terms invariant under local symplectic maps; no catastrophic
    # cancellation near degenerate spectra
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return (_det2(a) - _det2(b)) ** 2 + 4.0 * _det2(a @ j @ c + c @ j @ b)


def symplectic_eigenvalues(state: CovarianceMatrix4) -> SymplecticSpectrum:
    """Closed-form symplectic eigenvalues of a two-mode covariance matrix.

    Uses ``Delta = det A + det B + 2 det C`` and
    ``2 nu^2 = Delta -/+ sqrt(Delta^2 - 4 det sigma)``.  The discriminant is
    evaluated in a cancellation-free form and the smaller eigenvalue comes
    from ``nu_- nu_+ = sqrt(det sigma)``, so pure states give exactly 1.
    """
    a, b, c = state.blocks
    delta = _det2(a) + _det2(b) + 2.0 * _det2(c)
    det = _det4(state)
    disc = _discriminant(a, b, c)
    if disc < -1e-9 * delta * delta or det <= 0.0:
        raise UnphysicalStateError(
            f"no real symplectic spectrum (Delta={delta!r}, det={det!r})"
        )
    nu_plus = math.sqrt(0.5 * (delta + math.sqrt(max(disc, 0.0))))
    nu_minus = math.sqrt(det) / nu_plus
    if nu_minus < 1.0 - PHYSICAL_TOL:
        raise UnphysicalStateError(f"symplectic eigenvalue {nu_minus!r} below 1")
    return SymplecticSpectrum(nu_minus, nu_plus)


def symplectic_eigenvalues_numeric(state: CovarianceMatrix4) -> SymplecticSpectrum:
    """Moduli of the eigenvalues of ``i Omega sigma`` (independent cross-check)."""
    ev = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form() @ state.matrix)))
    return SymplecticSpectrum(float(0.5 * (ev[0] + ev[1])), float(0.5 * (ev[2] + ev[3])))


def entropy_term(nu: float) -> float:
    """f(nu) = (nu+1)/2 log2((nu+1)/2) - (nu-1)/2 log2((nu-1)/2), with f(1) = 0."""
    nu = max(float(nu), 1.0)
    p = 0.5 * (nu + 1.0)
    m = 0.5 * (nu - 1.0)
    out = p * math.log2(p)
    if m > 0.0:
        out -= m * math.log2(m)
    return out


def occupation_term(n: float) -> float:
    """(n+1) log2(n+1) - n log2 n, with 0 log 0 = 0."""
    if n <= 0.0:
        return 0.0
    return (n + 1.0) * math.log2(n + 1.0) - n * math.log2(n)


def von_neumann_entropy(state: CovarianceMatrix4) -> float:
    spec = symplectic_eigenvalues(state)
    return entropy_term(spec.nu_minus) + entropy_term(spec.nu_plus)


def mean_occupations(state: CovarianceMatrix4, convention: str = "physical") -> tuple[float, float]:
    """Mean occupations of the two modes.

    ``paper`` uses (sigma_11 + sigma_22)/4 with no vacuum offset; ``physical`` subtracts the
    vacuum contribution so that the vacuum has n = 0.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown occupation convention {convention!r}")
    m = state.matrix
    sums = (m[0, 0] + m[1, 1], m[2, 2] + m[3, 3])
    if convention == "paper":
        return sums[0] / 4.0, sums[1] / 4.0
    out = []
    for s in sums:
        n = (s - 2.0) / 4.0
        if n < 0.0:
            if n < -PHYSICAL_TOL:
                warnings.warn(f"sub-vacuum quadrature variance (n = {n:g}); clamped to 0",
                              RuntimeWarning, stacklevel=2)
            n = 0.0
        out.append(n)
    return out[0], out[1]


def coherence(state: CovarianceMatrix4, convention: str = "physical") -> float:
    """Relative-entropy coherence of a zero-mean two-mode Gaussian state."""
    if np.any(state.first_moments != 0.0):
        raise ValueError("coherence is implemented for zero first moments only")
    n1, n2 = mean_occupations(state, convention)
    value = occupation_term(n1) + occupation_term(n2) - von_neumann_entropy(state)
    if convention == "physical" and -1e-12 < value < 0.0:
        value = 0.0
    return value
