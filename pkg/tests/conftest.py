from __future__ import annotations

import numpy as np
import pytest

from privinfer.gf2 import SignVector

# acceptance results, filled by tests/test_acceptance.py and echoed at the end of the run
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sign(n: int, rng) -> SignVector:
    return SignVector.from_signs(rng.choice(np.array([1, -1], dtype=np.int8), size=n))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d}: {title} ({detail})")


def paley12() -> np.ndarray:
    """Order-12 Hadamard matrix from the quadratic residues mod 11."""
    q = 11
    residues = {(i * i) % q for i in range(1, q)}

    def chi(a):
        a %= q
        return 0 if a == 0 else (1 if a in residues else -1)

    S = np.zeros((12, 12), dtype=np.int64)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = [[chi(j - i) for j in range(q)] for i in range(q)]
    return S + np.eye(12, dtype=np.int64)
