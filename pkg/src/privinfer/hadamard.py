"""Hadamard matrices: Sylvester construction, validation and file loading."""
from __future__ import annotations

from dataclasses import dataclass
from os import PathLike

import numpy as np

from .exceptions import HadamardError, ParameterError

__all__ = ["HadamardMatrix", "sylvester", "validate", "is_hadamard", "hadamard", "load_hadamard"]

MAX_SYLVESTER_EXPONENT = 16


@dataclass(frozen=True, eq=False)
class HadamardMatrix:
    """A validated +-1 matrix with ``L @ L.T == t * I``."""

    entries: np.ndarray

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, HadamardMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def sylvester(k: int, max_exponent: int = MAX_SYLVESTER_EXPONENT) -> HadamardMatrix:
    """Order ``2**k`` matrix via H_k = [[H, H], [H, -H]]."""
    if k < 0:
        raise ParameterError(f"exponent must be non-negative, got {k}")
    if k > max_exponent:
        raise ParameterError(f"exponent {k} exceeds the configured maximum {max_exponent}")
    h = np.ones((1, 1), dtype=np.int64)
    for _ in range(k):
        h = np.block([[h, h], [h, -h]])
    return HadamardMatrix(_freeze(h))


def validate(L) -> HadamardMatrix:
    """Return ``L`` as a :class:`HadamardMatrix` or raise :class:`HadamardError`.

    The Gram check runs on Python integers so it is exact at any order.
    """
    a = np.asarray(L)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise HadamardError(f"matrix must be square and non-empty, got shape {a.shape}")
    if not np.all((a == 1) | (a == -1)):
        raise HadamardError("entries must be +1 or -1")
    t = a.shape[0]
    gram = a.astype(object) @ a.T.astype(object)
    expected = np.eye(t, dtype=np.int64) * t
    bad = np.argwhere(gram != expected)
    if bad.size:
        i, j = bad[0]
        raise HadamardError(f"L L^T != {t} I: entry ({i}, {j}) is {gram[i, j]}")
    return HadamardMatrix(_freeze(a))


def is_hadamard(L) -> bool:
    try:
        validate(L)
    except HadamardError:
        return False
    return True


def hadamard(order: int) -> HadamardMatrix:
    """Sylvester matrix of the given order, which must be a power of two."""
    if order < 1 or order & (order - 1):
        raise ParameterError(
            f"no built-in Hadamard matrix of order {order}; supply one via load_hadamard()"
        )
    return sylvester(order.bit_length() - 1)


def load_hadamard(path: str | PathLike) -> HadamardMatrix:
    """Read ``t`` lines of ``t`` whitespace-separated +1/-1 entries."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rows.append([int(tok) for tok in line.split()])
            except ValueError as exc:
                raise HadamardError(f"{path}:{lineno}: {exc}") from None
    if len({len(r) for r in rows}) > 1:
        raise HadamardError(f"{path}: rows have unequal lengths")
    return validate(np.array(rows, dtype=np.int64))
