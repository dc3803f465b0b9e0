"""Parameter sweeps: coherence surface, random state scan, median contour."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .channel import apply, build_simplified
from .gaussian import CONVENTIONS, coherence, symplectic_eigenvalues, two_mode_squeezed_vacuum
from .mismatch import pair_mismatch
from .modes import InvalidModeSpec, ModeSpec
from .overlaps import DEFAULT_RTOL, ENGINE_VERSION, cached_overlaps, compute_overlaps

__all__ = [
    "ContourResult",
    "ScanConfig",
    "ScanConfigError",
    "ScanRecord",
    "SurfaceRow",
    "coherence_surface",
    "median_contour",
    "random_scan",
    "sample_parameters",
]

log = logging.getLogger(__name__)

SCAN_HORIZON_RATIO = 5.0
MAX_ATTEMPTS = 10_000
PILOT_DRAWS = 2_000


class ScanConfigError(ValueError):
    pass


def _alpha(spec: ModeSpec, cache_dir, rtol=DEFAULT_RTOL) -> float:
    coeffs = compute_overlaps(spec, rtol) if cache_dir is None else cached_overlaps(spec, cache_dir, rtol)
    return coeffs.alpha.real


def _coherence(alpha_I: float, alpha_II: float, r: float, convention: str) -> float:
    state = apply(build_simplified(alpha_I, alpha_II), two_mode_squeezed_vacuum(r))
    return coherence(state, convention)


@dataclass(frozen=True)
class SurfaceRow:
    accel_I: float
    accel_II: float
    coherence: float | None
    skipped: str | None = None


def coherence_surface(accels_I, accels_II, r: float, width: float = 2.0, omega0: float = 5.0,
                      mass: float = 0.1, convention: str = "physical",
                      cache_dir=None) -> list[SurfaceRow]:
    """Output-state coherence on an (accel_I, accel_II) grid, row-major in accel_I."""
    alphas: dict[float, float | str] = {}
    for a in {float(v) for v in list(accels_I) + list(accels_II)}:
        try:
            alphas[a] = _alpha(ModeSpec("I", a, width, omega0, mass), cache_dir)
        except (InvalidModeSpec, ArithmeticError) as exc:
            alphas[a] = str(exc)
    rows = []
    for a1 in map(float, accels_I):
        for a2 in map(float, accels_II):
            bad = [v for v in (alphas[a1], alphas[a2]) if isinstance(v, str)]
            if bad:
                rows.append(SurfaceRow(a1, a2, None, bad[0]))
            else:
                rows.append(SurfaceRow(a1, a2, _coherence(alphas[a1], alphas[a2], r, convention)))
    return rows


@dataclass(frozen=True)
class ScanConfig:
    seed: int = 42
    count: int = 2000
    r_range: tuple[float, float] = (1.0, 3.0)
    accel_range: tuple[float, float] = (0.01, 0.2)
    width_range: tuple[float, float] = (1.0, 3.0)
    omega0_range: tuple[float, float] = (4.0, 6.0)
    mass: float = 0.1
    convention: str = "physical"
    workers: int = 1

    def __post_init__(self):
        if self.count <= 0:
            raise ScanConfigError("count must be positive")
        if self.workers < 1:
            raise ScanConfigError("workers must be >= 1")
        if self.convention not in CONVENTIONS:
            raise ScanConfigError(f"unknown convention {self.convention!r}")
        if not 0 <= self.seed < 2**64:
            raise ScanConfigError("seed must be a 64-bit unsigned integer")
        for name in ("r_range", "accel_range", "width_range", "omega0_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ScanConfigError(f"{name} must be an ordered finite pair")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.r_range[0] < 0 or self.accel_range[0] <= 0 or self.width_range[0] <= 0:
            raise ScanConfigError("r must be >= 0; accel and width positive")


@dataclass(frozen=True)
class ScanRecord:
    index: int
    r: float
    accel_I: float
    accel_II: float
    width: float
    omega0: float
    alpha_I: float
    alpha_II: float
    mismatch: float
    coherence: float


SCAN_COLUMNS = tuple(f.name for f in fields(ScanRecord))


def _record_rng(seed: int, index: int) -> np.random.Generator:
    # counter-based Philox stream keyed by (seed, index)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, index))))


def _draw(rng, config: ScanConfig):
    u = rng.random(5)
    lerp = lambda rng_, t: rng_[0] + (rng_[1] - rng_[0]) * t  # noqa: E731
    return (lerp(config.r_range, u[0]), lerp(config.accel_range, u[1]),
            lerp(config.accel_range, u[2]), lerp(config.width_range, u[3]),
            lerp(config.omega0_range, u[4]))


def _acceptable(config: ScanConfig, a1, a2, width, omega0) -> bool:
    if omega0 <= config.mass or omega0 * width < 5.0:
        return False
    return 1.0 / max(a1, a2) >= SCAN_HORIZON_RATIO * width


def sample_parameters(config: ScanConfig, index: int):
    """Parameters (r, accel_I, accel_II, width, omega0) of record ``index``."""
    rng = _record_rng(config.seed, index)
    for _ in range(MAX_ATTEMPTS):
        draw = _draw(rng, config)
        if _acceptable(config, *draw[1:]):
            return draw
    raise ScanConfigError(f"record {index}: no acceptable parameters in {MAX_ATTEMPTS} draws")


def _check_acceptance_rate(config: ScanConfig) -> float:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((config.seed, 2**63))))
    ok = sum(_acceptable(config, *_draw(rng, config)[1:]) for _ in range(PILOT_DRAWS))
    rate = ok / PILOT_DRAWS
    if rate < 0.01:
        raise ScanConfigError(
            f"sampling starvation: only {rate:.2%} of draws satisfy the parameter guards"
        )
    return rate


def _scan_one(config: ScanConfig, index: int, cache_dir) -> ScanRecord:
    r, a1, a2, width, omega0 = map(float, sample_parameters(config, index))
    s1 = ModeSpec("I", a1, width, omega0, config.mass)
    s2 = ModeSpec("II", a2, width, omega0, config.mass)
    al1, al2 = _alpha(s1, cache_dir), _alpha(s2, cache_dir)
    state = apply(build_simplified(al1, al2), two_mode_squeezed_vacuum(r))
    symplectic_eigenvalues(state)  # raises if the output is unphysical
    return ScanRecord(
        index=index, r=r, accel_I=a1, accel_II=a2, width=width, omega0=omega0,
        alpha_I=al1, alpha_II=al2,
        mismatch=pair_mismatch(s1, s2, cache_dir),
        coherence=float(coherence(state, config.convention)),
    )


def _scan_chunk(args):
    config, indices, cache_dir = args
    return [_scan_one(config, i, cache_dir) for i in indices]


def random_scan(config: ScanConfig, cache_dir=None) -> list[ScanRecord]:
    """Sample ``config.count`` states and evaluate them, optionally in parallel.

    Each record depends only on ``(seed, index)``, so the output is identical
    for any worker count.
    """
    _check_acceptance_rate(config)
    indices = list(range(config.count))
    if config.workers == 1:
        return _scan_chunk((config, indices, cache_dir))
    chunks = [indices[i::config.workers * 4] for i in range(config.workers * 4)]
    chunks = [c for c in chunks if c]
    records: list[ScanRecord] = []
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        for part in pool.map(_scan_chunk, [(config, c, cache_dir) for c in chunks]):
            records.extend(part)
    records.sort(key=lambda rec: rec.index)
    return records


@dataclass
class ContourResult:
    level: float | None
    polylines: list[np.ndarray]
    r_centers: np.ndarray
    m_centers: np.ndarray
    bin_medians: np.ndarray
    bin_counts: np.ndarray
    flagged_bins: int = 0
    diagnostic: str = ""
    extra: dict = field(default_factory=dict)


def median_contour(records, r_bins: int = 10, m_bins: int = 10, min_count: int = 10,
                   mismatch_scale: str = "log") -> ContourResult:
    """Iso-line of the global median coherence over the binned (r, mismatch) plane.

    Bins with fewer than ``min_count`` records are masked; marching squares runs
    on the bin-centre lattice of per-bin median coherence.  Vertices are
    returned as ``(r, mismatch)`` pairs.
    """
    from skimage.measure import find_contours

    r = np.array([rec.r for rec in records], dtype=float)
    m = np.array([rec.mismatch for rec in records], dtype=float)
    c = np.array([rec.coherence for rec in records], dtype=float)
    if r.size == 0:
        raise ValueError("no records")
    if mismatch_scale not in ("linear", "log"):
        raise ValueError("mismatch_scale must be 'linear' or 'log'")
    mv = np.log10(m) if mismatch_scale == "log" else m
    r_edges = np.linspace(r.min(), r.max(), r_bins + 1)
    m_edges = np.linspace(mv.min(), mv.max(), m_bins + 1)
    ri = np.clip(np.searchsorted(r_edges, r, side="right") - 1, 0, r_bins - 1)
    mi = np.clip(np.searchsorted(m_edges, mv, side="right") - 1, 0, m_bins - 1)
    counts = np.zeros((r_bins, m_bins), dtype=int)
    medians = np.full((r_bins, m_bins), np.nan)
    for i in range(r_bins):
        for j in range(m_bins):
            sel = (ri == i) & (mi == j)
            counts[i, j] = sel.sum()
            if counts[i, j] >= min_count:
                medians[i, j] = np.median(c[sel])
    r_centers = 0.5 * (r_edges[:-1] + r_edges[1:])
    m_centers = 0.5 * (m_edges[:-1] + m_edges[1:])
    occupied = counts > 0
    flagged = int(np.sum(occupied & (counts < min_count)))
    result = ContourResult(None, [], r_centers,
                           10**m_centers if mismatch_scale == "log" else m_centers,
                           medians, counts, flagged)
    if np.ptp(c) == 0.0:
        result.diagnostic = "degenerate level set: all coherence values are equal"
        return result
    level = float(np.median(c))
    result.level = level
    valid = np.isfinite(medians)
    if valid.sum() < 4:
        result.diagnostic = "too few sufficiently occupied bins for a contour"
        return result
    pieces = find_contours(np.where(valid, medians, level), level, mask=valid)
    idx_r = np.arange(r_bins)
    idx_m = np.arange(m_bins)
    for piece in pieces:
        pr = np.interp(piece[:, 0], idx_r, r_centers)
        pm = np.interp(piece[:, 1], idx_m, m_centers)
        if mismatch_scale == "log":
            pm = 10**pm
        result.polylines.append(np.column_stack([pr, pm]))
    if not result.polylines:
        result.diagnostic = "median level not crossed on the occupied bins"
    elif flagged:
        result.diagnostic = f"{flagged} under-occupied bins masked"
    return result


def scan_provenance(config: ScanConfig) -> dict:
    prov = {k: v for k, v in asdict(config).items() if k != "workers"}
    prov["engine_version"] = ENGINE_VERSION
    prov["scan_horizon_ratio"] = SCAN_HORIZON_RATIO
    return prov
