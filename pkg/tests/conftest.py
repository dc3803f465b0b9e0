import numpy as np
import pytest
from scipy.linalg import expm

from rindlercoh.gaussian import CovarianceMatrix4, symplectic_form
from rindlercoh.modes import ModeSpec

FIDUCIAL = dict(accel=0.1, width=2.0, omega0=5.0, mass=0.1)


@pytest.fixture
def fiducial_spec():
    return ModeSpec("I", **FIDUCIAL)


def random_symplectic(rng, scale=0.5):
    h = rng.normal(size=(4, 4))
    return expm(symplectic_form() @ (h + h.T) * scale)


def random_physical_state(rng, scale=0.5):
    """S diag(nu1, nu1, nu2, nu2) S^T with nu >= 1 (Williamson form)."""
    s = random_symplectic(rng, scale)
    nus = rng.uniform(1.0, 4.0, 2)
    m = s @ np.diag(np.repeat(nus, 2)) @ s.T
    return CovarianceMatrix4(0.5 * (m + m.T)), np.sort(nus)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# ----------------------------------------------------------- acceptance lines
ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def acceptance_report():
    def record(number: int, passed: bool, detail: str):
        line = f"ACCEPTANCE {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[f"{number:02d}"] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
