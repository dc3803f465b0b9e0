"""Bogolyubov overlaps between the inertial and accelerated packets.

With the Cauchy data described in :mod:`rindlercoh.modes` the Klein-Gordon
products reduce to

    alpha = (psi, phi)   = Omega0 * integral psi phi (1 + x0/x) dx
    beta  = -(psi, phi*) = Omega0 * integral psi phi (1 - x0/x) dx

for unit-normalised packets.  Both are real in this phase convention.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .modes import (
    InvalidModeSpec,
    ModeSpec,
    Region,
    envelope_support,
    input_profile,
    normalization_constants,
    output_profile,
)
from .quadrature import integrate_panels

__all__ = [
    "ENGINE_VERSION",
    "DiskCache",
    "OverlapCoefficients",
    "cached_overlaps",
    "compute_overlaps",
    "overlap_curve",
]

log = logging.getLogger(__name__)

ENGINE_VERSION = 1
DEFAULT_RTOL = 1e-8
GRID_POLICY = "gl16-panel<=period/10-support1e-12-floor0.02"


@dataclass(frozen=True)
class OverlapCoefficients:
    alpha: complex
    beta: complex
    spec: ModeSpec
    quadrature_tol: float

    def check(self) -> None:
        a, b = abs(self.alpha), abs(self.beta)
        if not 0.0 < a <= 1.0:
            raise ArithmeticError(f"|alpha| = {a!r} outside (0, 1]")
        if a * a - b * b > 1.0 + 1e-6:
            raise ArithmeticError(f"|alpha|^2 - |beta|^2 = {a * a - b * b!r} exceeds 1")


def compute_overlaps(spec: ModeSpec, rtol: float = DEFAULT_RTOL) -> OverlapCoefficients:
    """Overlap coefficients of one packet pair by adaptive Gauss-Legendre quadrature."""
    c_in, c_out = normalization_constants(spec, rtol=min(rtol, 1e-10))
    lo, hi = envelope_support(spec)
    period = 2.0 * math.pi / spec.wavenumber
    x0 = spec.x0

    def integrand(x):
        prod = input_profile(spec, x) * output_profile(spec, x)
        return np.stack([prod, prod * (x0 / x)])

    res = integrate_panels(integrand, lo, hi, period / 10.0, rtol=rtol)
    direct, weighted = res.values
    pref = spec.omega0 * c_in * c_out
    coeffs = OverlapCoefficients(
        alpha=complex(pref * (direct + weighted), 0.0),
        beta=complex(pref * (direct - weighted), 0.0),
        spec=spec,
        quadrature_tol=rtol,
    )
    coeffs.check()
    return coeffs


def overlap_curve(base: ModeSpec, accels: Iterable[float], rtol: float = DEFAULT_RTOL,
                  cache_dir=None):
    """``(accel, coefficients or exception)`` for each acceleration, in input order."""
    out = []
    for accel in accels:
        try:
            spec = ModeSpec(base.region, accel, base.width, base.omega0, base.mass)
            if cache_dir is None:
                coeffs = compute_overlaps(spec, rtol)
            else:
                coeffs = cached_overlaps(spec, cache_dir, rtol)
        except (InvalidModeSpec, ArithmeticError) as exc:
            out.append((float(accel), exc))
            continue
        out.append((float(accel), coeffs))
    return out


class DiskCache:
    """One small text file per key; writes are atomic (temp file + rename)."""

    def __init__(self, directory):
        self.directory = Path(directory)

    def _path(self, kind: str, fields: dict) -> Path:
        canon = ";".join(f"{k}={fields[k]}" for k in sorted(fields))
        digest = hashlib.sha256(f"{kind}|{canon}".encode()).hexdigest()[:32]
        return self.directory / kind / f"{digest}.txt"

    def get(self, kind: str, fields: dict) -> dict | None:
        path = self._path(kind, fields)
        try:
            text = path.read_text()
        except FileNotFoundError:
            return None
        try:
            entry = dict(
                line.split(" = ", 1) for line in text.splitlines()
                if line and not line.startswith("#")
            )
            if entry.pop("engine_version") != str(ENGINE_VERSION):
                return None
            if any(entry.get(k) != str(v) for k, v in fields.items()):
                raise ValueError("key mismatch")
            if entry.pop("end", None) != "ok":
                raise ValueError("truncated entry")
        except ValueError as exc:
            log.warning("corrupt cache entry %s (%s); recomputing", path, exc)
            return None
        return entry

    def put(self, kind: str, fields: dict, values: dict) -> Path:
        path = self._path(kind, fields)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [f"# rindlercoh {kind} cache entry", f"engine_version = {ENGINE_VERSION}"]
        lines += [f"{k} = {fields[k]}" for k in sorted(fields)]
        lines += [f"{k} = {v}" for k, v in values.items()]
        lines.append("end = ok")
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".txt")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write("\n".join(lines) + "\n")
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return path


def spec_key(spec: ModeSpec, **extra) -> dict:
    fields = {
        "region": spec.region.value,
        "accel": repr(spec.accel),
        "width": repr(spec.width),
        "omega0": repr(spec.omega0),
        "mass": repr(spec.mass),
    }
    fields.update({k: str(v) for k, v in extra.items()})
    return fields


def _fmt(x: float) -> str:
    return format(x, ".17g")


def cached_overlaps(
    spec: ModeSpec,
    cache_dir,
    rtol: float = DEFAULT_RTOL,
    compute: Callable[..., OverlapCoefficients] = compute_overlaps,
) -> OverlapCoefficients:
    """``compute_overlaps`` served through an on-disk cache."""
    cache = DiskCache(cache_dir)
    fields = spec_key(spec, grid_policy=GRID_POLICY, tolerance=repr(float(rtol)))
    entry = cache.get("overlaps", fields)
    if entry is not None:
        try:
            return OverlapCoefficients(
                alpha=complex(float(entry["alpha_re"]), float(entry["alpha_im"])),
                beta=complex(float(entry["beta_re"]), float(entry["beta_im"])),
                spec=spec,
                quadrature_tol=rtol,
            )
        except (KeyError, ValueError) as exc:
            log.warning("corrupt overlap cache entry for %s (%s); recomputing", spec, exc)
    coeffs = compute(spec, rtol)
    cache.put(
        "overlaps",
        fields,
        {
            "alpha_re": _fmt(coeffs.alpha.real),
            "alpha_im": _fmt(coeffs.alpha.imag),
            "beta_re": _fmt(coeffs.beta.real),
            "beta_im": _fmt(coeffs.beta.imag),
        },
    )
    return coeffs


def region_pair(spec: ModeSpec) -> tuple[ModeSpec, ModeSpec]:
    return spec.with_region(Region.I), spec.with_region(Region.II)
