"""Localized inertial (input) and accelerated (output) wave packets at t = 0.

Coordinates are distances from the common wedge apex, so region I uses
``x > 0`` directly and region II is its mirror image.  Both profiles share the
log-Gaussian envelope ``exp[-2 (x0/L ln(x/x0))^2]`` centred on ``x0 = 1/accel``.

Cauchy data are stored as ``(values, rate)`` with ``d_t f = -i * rate`` at
t = 0.  For the raw input packet ``rate = Omega0 * phi``; for the output packet
the Rindler time derivative at the packet centre gives
``rate = Omega0 * (x0 / x) * psi``.  The Klein-Gordon norm is then
``2 * integral(values * rate)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import integrate_panels
from .special import bessel_product_im

__all__ = [
    "ENVELOPE_FLOOR",
    "GRID_FLOOR",
    "HORIZON_RATIO",
    "InvalidModeSpec",
    "ModeSpec",
    "Region",
    "SampledMode",
    "UnsupportedModeError",
    "build_grid",
    "grid_spacing",
    "input_profile",
    "kg_norm",
    "normalization_constants",
    "output_profile",
    "positive_frequency_residual",
    "project_positive_frequency",
    "sample_input",
    "sample_output",
    "spectral_window",
]

GRID_FLOOR = 0.02
GRID_STEP = 0.01
ENVELOPE_FLOOR = 1e-12
MIN_OMEGA_WIDTH = 5.0
# 1/accel >= HORIZON_RATIO * width; see README "Parameter guards"
HORIZON_RATIO = 2.5
NORM_RTOL = 1e-10


class InvalidModeSpec(ValueError):
    pass


class UnsupportedModeError(ValueError):
    pass


class Region(str, enum.Enum):
    I = "I"  # noqa: E741
    II = "II"

    @property
    def sign(self) -> float:
        return 1.0 if self is Region.I else -1.0


@dataclass(frozen=True)
class ModeSpec:
    """Parameters of one localized packet.

    ``guards=False`` skips the regime guards (``omega0*width >= 5`` and
    ``1/accel >= 2.5*width``) for diagnostic runs; the hard constraints are
    always enforced.
    """

    region: Region
    accel: float
    width: float
    omega0: float
    mass: float
    guards: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "region", Region(self.region))
        for name in ("accel", "width", "omega0", "mass"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidModeSpec(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.accel <= 0 or self.width <= 0 or self.omega0 <= 0:
            raise InvalidModeSpec("accel, width and omega0 must be positive")
        if self.mass < 0:
            raise InvalidModeSpec("mass must be >= 0")
        if self.omega0 <= self.mass:
            raise InvalidModeSpec(f"omega0={self.omega0} must exceed mass={self.mass}")
        if self.guards:
            problems = self.guard_violations()
            if problems:
                raise InvalidModeSpec("; ".join(problems))

    def guard_violations(self, horizon_ratio: float = HORIZON_RATIO) -> list[str]:
        problems = []
        if self.omega0 * self.width < MIN_OMEGA_WIDTH:
            problems.append(
                f"omega0*width = {self.omega0 * self.width:g} < {MIN_OMEGA_WIDTH:g}"
            )
        if 1.0 / self.accel < horizon_ratio * self.width:
            problems.append(
                f"1/accel = {1.0 / self.accel:g} < {horizon_ratio:g}*width"
            )
        return problems

    @property
    def x0(self) -> float:
        return 1.0 / self.accel

    @property
    def nu(self) -> float:
        """Bessel order Omega0/accel of the output modulation."""
        return self.omega0 / self.accel

    @property
    def wavenumber(self) -> float:
        return math.sqrt(self.omega0**2 - self.mass**2)

    def with_region(self, region) -> "ModeSpec":
        return ModeSpec(Region(region), self.accel, self.width, self.omega0, self.mass, self.guards)


def _check_positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("profiles are defined for coordinates x > 0 only")
    return x


def _envelope(spec: ModeSpec, x: np.ndarray) -> np.ndarray:
    u = (spec.x0 / spec.width) * np.log(x / spec.x0)
    return np.exp(-2.0 * u * u)


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def input_profile(spec: ModeSpec, x):
    """Unnormalised inertial packet ``env(x) sin(k (x - x0))``, ``k = sqrt(Omega0^2 - m^2)``."""
    x = _check_positive(x)
    return _scalar(_envelope(spec, x) * np.sin(spec.wavenumber * (x - spec.x0)))


def output_profile(spec: ModeSpec, chi):
    """Unnormalised accelerated packet ``env(chi) g(chi)`` with the rescaled Bessel product."""
    chi = _check_positive(chi)
    env = _envelope(spec, chi)
    out = np.zeros_like(env)
    live = env > 0.0
    if spec.mass == 0.0:
        # massless limit of the Bessel product
        out[live] = np.sin(spec.nu * np.log(chi[live] / spec.x0))
    elif np.any(live):
        out[live] = bessel_product_im(spec.nu, spec.mass * spec.x0, spec.mass * chi[live])
    return _scalar(env * out)


def envelope_support(spec: ModeSpec) -> tuple[float, float]:
    """Interval where the envelope exceeds ``ENVELOPE_FLOOR``, floored at 0.02."""
    half = (spec.width / spec.x0) * math.sqrt(math.log(1.0 / ENVELOPE_FLOOR) / 2.0)
    return max(GRID_FLOOR, spec.x0 * math.exp(-half)), spec.x0 * math.exp(half)


def grid_spacing(spec: ModeSpec) -> float:
    """``0.01/q``, the largest such step giving >= 20 points per oscillation period."""
    period = 2.0 * math.pi / spec.wavenumber
    q = max(1, math.ceil(GRID_STEP / (period / 20.0) - 1e-12))
    return GRID_STEP / q


def _lattice(lo: float, hi: float, h: float) -> np.ndarray:
    # points GRID_FLOOR + n*h covering [lo, hi]
    n0 = math.floor((lo - GRID_FLOOR) / h + 1e-9)
    n1 = math.ceil((hi - GRID_FLOOR) / h - 1e-9)
    return GRID_FLOOR + h * np.arange(n0, n1 + 1)


def build_grid(spec: ModeSpec) -> np.ndarray:
    lo, hi = envelope_support(spec)
    grid = _lattice(lo, hi, grid_spacing(spec))
    return grid[grid >= GRID_FLOOR - 1e-12]


def spectral_window(spec: ModeSpec) -> np.ndarray:
    """Padded uniform grid (same lattice as ``build_grid``) used for Fourier work.

    The positive-frequency projection is nonlocal with tails ~exp(-m|x|), so the
    window extends well beyond the envelope, into x < 0 if needed.
    """
    lo, hi = envelope_support(spec)
    pad = 100.0 if spec.mass >= 0.1 else min(400.0, 10.0 / max(spec.mass, 1e-12))
    return _lattice(lo - pad, hi + pad, grid_spacing(spec))


@dataclass(frozen=True)
class SampledMode:
    spec: ModeSpec
    grid: np.ndarray
    values: np.ndarray
    rate: np.ndarray
    norm_constant: float
    kind: str  # "input" | "output"
    projected: bool = False

    def __post_init__(self):
        if self.kind not in ("input", "output"):
            raise ValueError(f"unknown mode kind {self.kind!r}")
        for arr in (self.grid, self.values, self.rate):
            arr.setflags(write=False)


def normalization_constants(spec: ModeSpec, rtol: float = NORM_RTOL) -> tuple[float, float]:
    """Constants ``(C, C')`` giving unit Klein-Gordon norm, signed by region.

    Region II carries an overall minus sign on both packets.
    """
    lo, hi = envelope_support(spec)
    period = 2.0 * math.pi / spec.wavenumber
    x0 = spec.x0

    def integrand(x):
        phi = input_profile(spec, x)
        psi = output_profile(spec, x)
        return np.stack([phi * phi, psi * psi / x])

    res = integrate_panels(integrand, lo, hi, period / 10.0, rtol=rtol)
    n_in = 2.0 * spec.omega0 * res.values[0]
    n_out = 2.0 * spec.omega0 * x0 * res.values[1]
    if not (n_in > 0 and n_out > 0):
        raise ArithmeticError(f"non-positive Klein-Gordon norm for {spec}")
    sign = spec.region.sign
    return sign / math.sqrt(n_in), sign / math.sqrt(n_out)


def sample_input(spec: ModeSpec, grid=None, constant: float | None = None) -> SampledMode:
    grid = build_grid(spec) if grid is None else np.asarray(grid, dtype=float)
    if constant is None:
        constant = normalization_constants(spec)[0]
    values = constant * input_profile(spec, grid)
    return SampledMode(spec, grid, values, spec.omega0 * values, constant, "input")


def sample_output(spec: ModeSpec, grid=None, constant: float | None = None) -> SampledMode:
    grid = build_grid(spec) if grid is None else np.asarray(grid, dtype=float)
    if constant is None:
        constant = normalization_constants(spec)[1]
    values = constant * output_profile(spec, grid)
    rate = spec.omega0 * spec.x0 / grid * values
    return SampledMode(spec, grid, values, rate, constant, "output")


def kg_norm(mode: SampledMode) -> float:
    """Klein-Gordon self-product ``2 * integral(values * rate)`` by the trapezoid rule."""
    norm = 2.0 * float(np.trapezoid(mode.values * mode.rate, mode.grid))
    if not norm > 0:
        raise ArithmeticError(f"non-positive Klein-Gordon norm {norm!r}")
    return norm


def _uniform_step(grid: np.ndarray) -> float:
    steps = np.diff(grid)
    h = float(steps.mean())
    if np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)) + 1e-12:
        raise ValueError("Fourier analysis needs a uniform grid")
    return h


def _padded(mode: SampledMode):
    """Grid, values and rate zero-padded (centred) to the spectral window length."""
    h = _uniform_step(mode.grid)
    target = spectral_window(mode.spec).size
    n = mode.grid.size
    if n >= target:
        return mode.grid, mode.values, mode.rate, h
    left = (target - n) // 2
    grid = mode.grid[0] + h * np.arange(-left, target - left)
    values = np.zeros(target)
    rate = np.zeros(target)
    values[left:left + n] = mode.values
    rate[left:left + n] = mode.rate
    return grid, values, rate, h


def _plane_wave_amplitudes(values, rate, h, mass):
    n = values.size
    phi_k = np.fft.fft(values)
    rate_k = np.fft.fft(rate)
    k = 2.0 * np.pi * np.fft.fftfreq(n, h)
    omega = np.sqrt(k * k + mass * mass)
    zero = omega == 0.0
    inv = np.divide(1.0, omega, out=np.zeros_like(omega), where=~zero)
    pos = 0.5 * (phi_k + rate_k * inv)
    neg = 0.5 * (phi_k - rate_k * inv)
    # zero-frequency cutoff: the omega = 0 bin (massless field only) is dropped
    pos[zero] = 0.0
    neg[zero] = 0.0
    return pos, neg, omega


def positive_frequency_residual(mode: SampledMode) -> float:
    """Fraction of the Klein-Gordon norm carried by negative-frequency plane waves."""
    if mode.kind != "input":
        raise UnsupportedModeError("frequency analysis is only defined for input modes")
    _, values, rate, h = _padded(mode)
    pos, neg, omega = _plane_wave_amplitudes(values, rate, h, mode.spec.mass)
    p = float(np.sum(omega * np.abs(pos) ** 2))
    q = float(np.sum(omega * np.abs(neg) ** 2))
    return q / (p + q)


def project_positive_frequency(mode: SampledMode) -> SampledMode:
    """Drop the negative-frequency part of an input mode and renormalise.

    The result lives on the padded spectral window, not on the input grid.
    """
    if mode.kind != "input":
        raise UnsupportedModeError("projection is only defined for input modes")
    grid, values, rate, h = _padded(mode)
    pos, _, omega = _plane_wave_amplitudes(values, rate, h, mode.spec.mass)
    new_values = np.fft.ifft(pos).real
    new_rate = np.fft.ifft(omega * pos).real
    norm = 2.0 * h * float(np.sum(new_values * new_rate))
    scale = 1.0 / math.sqrt(norm)
    return SampledMode(
        mode.spec,
        grid,
        new_values * scale,
        new_rate * scale,
        mode.norm_constant * scale,
        "input",
        projected=True,
    )
