"""Mode mismatch: mean squared difference of the normalised packets on a fixed grid."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .modes import (
    GRID_FLOOR,
    InvalidModeSpec,
    ModeSpec,
    input_profile,
    normalization_constants,
    output_profile,
)
from .overlaps import DiskCache, spec_key

__all__ = [
    "MISMATCH_STEP",
    "MismatchResult",
    "SweepRow",
    "cached_mismatch",
    "mismatch_grid",
    "mode_mismatch",
    "pair_mismatch",
    "mismatch_sweep",
]

MISMATCH_STEP = 0.01
SWEEP_PARAMS = ("accel", "accel_I", "accel_II", "width", "omega0", "mass")


@dataclass(frozen=True)
class MismatchResult:
    value: float
    grid_points: int
    spec: ModeSpec


def mismatch_grid(spec: ModeSpec) -> np.ndarray:
    """0.02, 0.03, ..., 1/accel + 3 L."""
    upper = spec.x0 + 3.0 * spec.width
    k = math.floor((upper - GRID_FLOOR) / MISMATCH_STEP + 1e-9) + 1
    return GRID_FLOOR + MISMATCH_STEP * np.arange(k)


def mode_mismatch(spec: ModeSpec) -> MismatchResult:
    x = mismatch_grid(spec)
    c_in, c_out = normalization_constants(spec)
    # region II packets carry the same overall sign on both sides, so they cancel
    diff = c_in * input_profile(spec, x) - c_out * output_profile(spec, x)
    return MismatchResult(float(np.mean(diff * diff)), int(x.size), spec)


def cached_mismatch(spec: ModeSpec, cache_dir) -> float:
    cache = DiskCache(cache_dir)
    fields = spec_key(spec, step=repr(MISMATCH_STEP))
    entry = cache.get("mismatch", fields)
    if entry is not None and "value" in entry:
        try:
            return float(entry["value"])
        except ValueError:
            pass
    result = mode_mismatch(spec)
    cache.put("mismatch", fields, {"value": format(result.value, ".17g"),
                                   "grid_points": str(result.grid_points)})
    return result.value


def pair_mismatch(spec_I: ModeSpec, spec_II: ModeSpec, cache_dir=None) -> float:
    """Two-mode mismatch: arithmetic mean of the single-mode values."""
    if cache_dir is None:
        m1, m2 = mode_mismatch(spec_I).value, mode_mismatch(spec_II).value
    else:
        m1, m2 = cached_mismatch(spec_I, cache_dir), cached_mismatch(spec_II, cache_dir)
    return 0.5 * (m1 + m2)


@dataclass(frozen=True)
class SweepRow:
    index: tuple[int, int]
    param1: float
    param2: float
    mismatch: float | None
    skipped: str | None = None


def mismatch_sweep(fixed: dict, varying: dict, cache_dir=None) -> list[SweepRow]:
    """Mismatch over a two-parameter grid.

    ``varying`` maps exactly two names from ``accel, accel_I, accel_II, width,
    omega0, mass`` to value sequences; ``fixed`` supplies the rest (``accel``
    sets both observers).  Observer accelerations enter through
    :func:`pair_mismatch`.  Guard-violating points are returned with
    ``mismatch=None`` and a reason.
    """
    names = list(varying)
    if len(names) != 2 or any(n not in SWEEP_PARAMS for n in names):
        raise ValueError(f"need two sweep parameters from {SWEEP_PARAMS}, got {names}")
    unknown = set(fixed) - set(SWEEP_PARAMS)
    if unknown:
        raise ValueError(f"unknown fixed parameters {sorted(unknown)}")
    rows = []
    v1, v2 = (list(map(float, varying[n])) for n in names)
    for (i, p1), (j, p2) in itertools.product(enumerate(v1), enumerate(v2)):
        params = dict(fixed)
        params[names[0]] = p1
        params[names[1]] = p2
        a1 = params.get("accel_I", params.get("accel"))
        a2 = params.get("accel_II", params.get("accel"))
        try:
            if a1 is None or a2 is None:
                raise ValueError("acceleration not specified")
            s1 = ModeSpec("I", a1, params["width"], params["omega0"], params["mass"])
            s2 = ModeSpec("II", a2, params["width"], params["omega0"], params["mass"])
        except InvalidModeSpec as exc:
            rows.append(SweepRow((i, j), p1, p2, None, str(exc)))
            continue
        rows.append(SweepRow((i, j), p1, p2, pair_mismatch(s1, s2, cache_dir)))
    return rows
