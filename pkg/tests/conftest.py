import numpy as np
import pytest

from fourcolor import InstanceMask, gen_random_packing

# Acceptance criteria results, printed as one line each in the terminal summary.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_criterion(ident: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((ident, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ident, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  criterion {ident}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def roundtrip_corpus() -> list[InstanceMask]:
    """200 seeded packings at 256x256 with 30..150 cells (dense corpus)."""
    rng = np.random.default_rng(20240801)
    masks = []
    for i in range(200):
        n = int(rng.integers(30, 151))
        masks.append(gen_random_packing(n, (256, 256), seed=1000 + i))
    return masks


@pytest.fixture(scope="session")
def small_packing_corpus() -> list[InstanceMask]:
    """100 seeded packings with at most 20 cells for exact chromatic checks."""
    rng = np.random.default_rng(777)
    masks = []
    for i in range(100):
        n = int(rng.integers(2, 21))
        masks.append(gen_random_packing(n, (256, 256), seed=5000 + i))
    return masks
