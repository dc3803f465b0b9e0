"""Fast built-in invariant checks (``rindlercoh selftest``)."""

from __future__ import annotations

import math
import time

import numpy as np

from .channel import apply, build_simplified, output_tmsv_closed_form
from .gaussian import (
    CovarianceMatrix4,
    coherence,
    symplectic_eigenvalues,
    symplectic_eigenvalues_numeric,
    two_mode_squeezed_vacuum,
)
from .modes import ModeSpec, kg_norm, sample_input, sample_output
from .overlaps import compute_overlaps
from .special import log_gamma_complex, scaled_bessel


def _check_log_gamma():
    got = log_gamma_complex(5.0)
    return abs(got - math.log(24.0)) < 1e-13, f"log Gamma(5) = {got.real:.15g}"


def _check_bessel_zero_order():
    # S(z; 0) is the ordinary I_0
    got = scaled_bessel(0.0, 1.0)
    want = 1.2660658777520083
    return abs(got - want) < 1e-14, f"S(1; 0) = {got.real:.16g}"


def _check_mode_norms():
    spec = ModeSpec("I", 0.1, 2.0, 5.0, 0.1)
    n_in = kg_norm(sample_input(spec))
    n_out = kg_norm(sample_output(spec))
    ok = abs(n_in - 1) < 1e-6 and abs(n_out - 1) < 1e-6
    return ok, f"norms {n_in:.9f}, {n_out:.9f}"


def _check_overlap_bounds():
    c = compute_overlaps(ModeSpec("I", 0.1, 2.0, 5.0, 0.1))
    ok = 0 < abs(c.alpha) <= 1 and abs(c.beta) < 1e-2 * abs(c.alpha)
    return ok, f"alpha = {c.alpha.real:.6f}, |beta/alpha| = {abs(c.beta / c.alpha):.2e}"


def _check_tmsv_pure():
    worst = 0.0
    for r in (0.5, 1.0, 2.0):
        s = symplectic_eigenvalues(two_mode_squeezed_vacuum(r))
        worst = max(worst, abs(s.nu_minus - 1), abs(s.nu_plus - 1))
    return worst < 1e-9, f"max |nu - 1| = {worst:.1e}"


def _check_channel_closed_form():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(20):
        a1, a2 = rng.uniform(0.05, 1.0, 2)
        r = rng.uniform(0.0, 3.0)
        got = apply(build_simplified(a1, a2), two_mode_squeezed_vacuum(r)).matrix
        want = output_tmsv_closed_form(a1, a2, r).matrix
        worst = max(worst, float(np.max(np.abs(got - want))))
    return worst <= 1e-12 * math.cosh(6.0), f"max deviation {worst:.1e}"


def _check_symplectic_oracle():
    state = apply(build_simplified(0.8, 0.6), two_mode_squeezed_vacuum(1.0))
    a, b = symplectic_eigenvalues(state), symplectic_eigenvalues_numeric(state)
    err = max(abs(a.nu_minus - b.nu_minus), abs(a.nu_plus - b.nu_plus))
    return err < 1e-9, f"closed form vs eigen-solver {err:.1e}"


def _check_vacuum():
    c = coherence(CovarianceMatrix4.vacuum())
    return c == 0.0, f"vacuum coherence {c!r}"


CHECKS = [
    ("log-gamma integer value", _check_log_gamma),
    ("Bessel series at zero order", _check_bessel_zero_order),
    ("unit Klein-Gordon norms", _check_mode_norms),
    ("overlap bounds", _check_overlap_bounds),
    ("squeezed vacuum is pure", _check_tmsv_pure),
    ("channel closed form", _check_channel_closed_form),
    ("symplectic eigenvalue oracle", _check_symplectic_oracle),
    ("vacuum has zero coherence", _check_vacuum),
]


def run_selftest(verbose: bool = False, out=print) -> bool:
    all_ok = True
    for name, check in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = check()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        if verbose:
            line += f"  ({time.perf_counter() - t0:.2f} s)"
        out(line)
    return all_ok
