"""Exact private inner-product scheme over cosets of V.

The server publishes the syndrome of ``w``. The user recovers a shift vector
``u`` of that coset and answers ``v_i x^T`` for ``v_i = u xor c_i``, where
the ``c_i`` are the rows of ``C = L kron 1_{n/t}``. Since ``C C^T = n I``, the
server's coefficients are ``beta = w U C^T / n`` and ``sum_i beta_i v_i = w``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import CosetMismatchError, LengthMismatchError, ParameterError
from .gf2 import (
    BlockPartition,
    SignVector,
    SyndromeMatrix,
    solve_B,
    syndrome,
    syndrome_matrix,
)
from .hadamard import HadamardMatrix, hadamard, validate

__all__ = [
    "SchemeParams",
    "CodingMatrix",
    "build_C",
    "user_vectors",
    "exact_coeffs",
    "exact_infer",
    "check_same_coset",
]


@dataclass(frozen=True, eq=False)
class CodingMatrix:
    """``t x n`` matrix with rows ``c_i = xor_r L[i, r] (.) 1_{S_r}``."""

    L: HadamardMatrix
    partition: BlockPartition
    entries: np.ndarray
    rows: tuple[SignVector, ...]

    @property
    def t(self) -> int:
        return self.partition.t

    @property
    def n(self) -> int:
        return self.partition.n


def build_C(L: HadamardMatrix, p: BlockPartition) -> CodingMatrix:
    if L.order != p.t:
        raise ParameterError(f"Hadamard order {L.order} != number of blocks {p.t}")
    rows = []
    for i in range(p.t):
        bits = 0
        for r in range(p.t):
            if L.entries[i, r] == -1:
                bits ^= p.masks[r]
        rows.append(SignVector(p.n, bits))
    entries = np.kron(L.entries, np.ones((1, p.size), dtype=np.int64)).astype(np.int8)
    entries.setflags(write=False)
    return CodingMatrix(L=L, partition=p, entries=entries, rows=tuple(rows))


@dataclass(frozen=True, eq=False)
class SchemeParams:
    """Scheme dimensions ``(n, t)``, perturbation budget ``h`` and matrix ``L``.

    ``L`` defaults to the Sylvester matrix of order ``t``; other orders must be
    supplied explicitly.
    """

    n: int
    t: int
    h: int = 0
    L: HadamardMatrix | None = None

    def __post_init__(self):
        for name in ("n", "t", "h"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
        if self.n < 1 or self.t < 1:
            raise ParameterError(f"need n >= 1 and t >= 1, got n={self.n}, t={self.t}")
        if self.n % self.t:
            raise ParameterError(f"t={self.t} must divide n={self.n}")
        if not 0 <= 2 * self.h <= self.n:
            raise ParameterError(f"h must satisfy 0 <= h <= n/2, got h={self.h}, n={self.n}")
        L = self.L if self.L is not None else hadamard(self.t)
        if not isinstance(L, HadamardMatrix):
            L = validate(L)
        if L.order != self.t:
            raise ParameterError(f"Hadamard order {L.order} != t={self.t}")
        object.__setattr__(self, "L", L)

    @cached_property
    def partition(self) -> BlockPartition:
        return BlockPartition(self.n, self.t)

    @cached_property
    def M(self) -> SyndromeMatrix:
        return syndrome_matrix(self.partition)

    @cached_property
    def C(self) -> CodingMatrix:
        return build_C(self.L, self.partition)

    @property
    def publication_cost(self) -> int:
        """Number of published query bits."""
        return self.n - self.t

    @property
    def user_privacy(self) -> int:
        """Number of revealed inner products."""
        return self.t

    def with_h(self, h: int) -> "SchemeParams":
        return SchemeParams(self.n, self.t, h, self.L)


def user_vectors(u: SignVector, C: CodingMatrix) -> list[SignVector]:
    if u.n != C.n:
        raise LengthMismatchError(f"shift vector length {u.n} != {C.n}")
    return [u ^ c for c in C.rows]


def check_same_coset(w: SignVector, u: SignVector, p: BlockPartition) -> bool:
    """True iff ``w xor u`` is constant on every block, i.e. lies in V."""
    d = (w ^ u).bits
    for mask in p.masks:
        part = d & mask
        if part and part != mask:
            return False
    return True


def exact_coeffs(w: SignVector, u: SignVector, C: CodingMatrix) -> np.ndarray:
    """Real coefficients ``beta`` with ``sum_i beta_i v_i = w``."""
    if w.n != C.n or u.n != C.n:
        raise LengthMismatchError(f"lengths {w.n}, {u.n} do not match n={C.n}")
    if not check_same_coset(w, u, C.partition):
        raise CosetMismatchError("w xor u is not in V; u does not define the coset of w")
    wu = w.to_array(np.float64) * u.to_array(np.float64)
    return (C.entries @ wu) / C.n


def exact_infer(w: SignVector, x, params: SchemeParams) -> float:
    """Run the exact protocol end to end and return the server's ``w x^T``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.n,):
        raise LengthMismatchError(f"x must have shape ({params.n},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    q = syndrome(params.M, w)
    u = solve_B(params.M, q)
    # user side
    V = params.C.entries * u.to_array()
    answers = V @ x
    # server side
    beta = exact_coeffs(w, u, params.C)
    return float(beta @ answers)
