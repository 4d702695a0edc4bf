"""Boolean algebra over F2 in its {+1, -1} representation.

A :class:`SignVector` stores its entries bit-packed in a Python integer:
bit ``i`` is set exactly when entry ``i`` equals -1 (the Boolean one).
Coordinates are 0-based, and packing is little-endian, so bit ``i`` lives in
64-bit word ``i // 64`` at position ``i % 64``.

Under this encoding ``xor`` of two sign vectors is their entrywise real
product, and the Hamming weight is the population count.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .exceptions import LengthMismatchError, ParameterError

__all__ = [
    "SignVector",
    "BlockPartition",
    "SyndromeMatrix",
    "xor",
    "hamming_weight",
    "hamming_distance",
    "block_weights",
    "syndrome_matrix",
    "syndrome",
    "solve_B",
    "syndrome_array",
    "solve_B_array",
    "signs_to_bits",
    "bits_to_signs",
    "bits_to_sign_rows",
]


def signs_to_bits(signs) -> int:
    """Pack a 1-d array of +-1 entries into an integer (-1 -> set bit)."""
    arr = np.asarray(signs)
    if arr.ndim != 1:
        raise ValueError("expected a 1-d sign array")
    if arr.size and not np.all((arr == 1) | (arr == -1)):
        raise ValueError("sign vectors may only contain +1 and -1")
    packed = np.packbits(arr == -1, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def bits_to_signs(bits: int, n: int, dtype=np.int8) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    ones = np.unpackbits(raw, bitorder="little", count=n)
    return (1 - 2 * ones.astype(np.int8)).astype(dtype, copy=False)


def bits_to_sign_rows(bits: Sequence[int], n: int, dtype=np.int8) -> np.ndarray:
    """Row ``k`` is ``bits_to_signs(bits[k], n)``; one unpacking pass for all rows."""
    width = (n + 7) // 8
    raw = np.frombuffer(b"".join(b.to_bytes(width, "little") for b in bits), dtype=np.uint8)
    ones = np.unpackbits(raw.reshape(len(bits), width), axis=1, bitorder="little", count=n)
    return (1 - 2 * ones.astype(np.int8)).astype(dtype, copy=False)


@dataclass(frozen=True)
class SignVector:
    """Immutable length-``n`` vector over {+1, -1}."""

    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bit pattern does not fit in {self.n} coordinates")

    @classmethod
    def ones(cls, n: int) -> "SignVector":
        """The all-(+1) vector, i.e. the Boolean zero."""
        return cls(n, 0)

    @classmethod
    def from_signs(cls, signs: Iterable[int]) -> "SignVector":
        arr = np.fromiter(signs, dtype=np.int64) if not hasattr(signs, "__array__") else np.asarray(signs)
        return cls(int(arr.shape[0]), signs_to_bits(arr))

    @classmethod
    def from_support(cls, n: int, indices: Iterable[int]) -> "SignVector":
        """Vector with -1 exactly at the given 0-based indices."""
        bits = 0
        for i in indices:
            if not 0 <= i < n:
                raise IndexError(f"index {i} out of range for length {n}")
            bits |= 1 << i
        return cls(n, bits)

    @classmethod
    def from_words(cls, n: int, words: Sequence[int]) -> "SignVector":
        bits = 0
        for k, word in enumerate(words):
            bits |= int(word) << (64 * k)
        return cls(n, bits)

    @classmethod
    def from_bytes(cls, n: int, data: bytes) -> "SignVector":
        if len(data) != (n + 7) // 8:
            raise LengthMismatchError(f"{len(data)} bytes cannot hold exactly {n} packed signs")
        return cls(n, int.from_bytes(data, "little"))

    @property
    def words(self) -> np.ndarray:
        """Little-endian 64-bit word view of the packed bits."""
        count = max(1, (self.n + 63) // 64)
        mask = (1 << 64) - 1
        return np.array([(self.bits >> (64 * k)) & mask for k in range(count)], dtype=np.uint64)

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes((self.n + 7) // 8, "little")

    def to_array(self, dtype=np.int8) -> np.ndarray:
        return bits_to_signs(self.bits, self.n, dtype)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @property
    def support(self) -> list[int]:
        return [i for i in range(self.n) if self.bits >> i & 1]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not -self.n <= i < self.n:
            raise IndexError(i)
        return -1 if self.bits >> (i % self.n) & 1 else 1

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        for _ in range(self.n):
            yield -1 if bits & 1 else 1
            bits >>= 1

    def __xor__(self, other: "SignVector") -> "SignVector":
        return xor(self, other)

    def __repr__(self) -> str:
        body = "".join("-" if self.bits >> i & 1 else "+" for i in range(min(self.n, 64)))
        if self.n > 64:
            body += "..."
        return f"SignVector(n={self.n}, {body})"


def _check_same_length(a: SignVector, b: SignVector) -> None:
    if a.n != b.n:
        raise LengthMismatchError(f"lengths differ: {a.n} != {b.n}")


def xor(a: SignVector, b: SignVector) -> SignVector:
    _check_same_length(a, b)
    return SignVector(a.n, a.bits ^ b.bits)


def hamming_weight(a: SignVector) -> int:
    return a.bits.bit_count()


def hamming_distance(a: SignVector, b: SignVector) -> int:
    _check_same_length(a, b)
    return (a.bits ^ b.bits).bit_count()


@dataclass(frozen=True)
class BlockPartition:
    """``t`` contiguous blocks of ``n // t`` coordinates each.

    Block ``r`` (0-based) covers ``range(r * size, (r + 1) * size)`` and its
    representative is its smallest coordinate.
    """

    n: int
    t: int

    def __post_init__(self):
        if self.t < 1 or self.n < 1:
            raise ParameterError(f"need n >= 1 and t >= 1, got n={self.n}, t={self.t}")
        if self.n % self.t:
            raise ParameterError(f"t={self.t} must divide n={self.n}")

    @property
    def size(self) -> int:
        return self.n // self.t

    @property
    def blocks(self) -> tuple[range, ...]:
        s = self.size
        return tuple(range(r * s, (r + 1) * s) for r in range(self.t))

    def block_of(self, j: int) -> int:
        return j // self.size

    def representative(self, r: int) -> int:
        return r * self.size

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Bit mask of each block, i.e. the packed form of 1_{S_r}."""
        s = self.size
        full = (1 << s) - 1
        return tuple(full << (r * s) for r in range(self.t))

    def indicator(self, r: int) -> SignVector:
        return SignVector(self.n, self.masks[r])

    def labels(self) -> np.ndarray:
        """Block index of every coordinate."""
        return np.repeat(np.arange(self.t), self.size)


def block_weights(a: SignVector, p: BlockPartition) -> list[int]:
    if a.n != p.n:
        raise LengthMismatchError(f"vector length {a.n} != partition size {p.n}")
    s = p.size
    full = (1 << s) - 1
    bits = a.bits
    return [((bits >> (r * s)) & full).bit_count() for r in range(p.t)]


@dataclass(frozen=True, eq=False)
class SyndromeMatrix:
    """Parity-check matrix whose right kernel is V = span{1_{S_r}}.

    Row ``k`` checks ``x_j xor x_rep`` for the ``k``-th non-representative
    coordinate ``j`` (ascending) against its block representative.
    """

    partition: BlockPartition
    rows: tuple[SignVector, ...]
    row_index: dict[int, int] = field(repr=False)
    nonrep: np.ndarray = field(repr=False)
    rep_of_nonrep: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.partition.n

    def to_array(self) -> np.ndarray:
        """Rows as a 0/1 matrix (Boolean form)."""
        out = np.zeros(self.shape, dtype=np.uint8)
        out[np.arange(len(self.rows)), self.nonrep] = 1
        out[np.arange(len(self.rows)), self.rep_of_nonrep] = 1
        return out


def syndrome_matrix(p: BlockPartition) -> SyndromeMatrix:
    rows = []
    row_index = {}
    nonrep = []
    reps = []
    for r, block in enumerate(p.blocks):
        rep = p.representative(r)
        for j in block:
            if j == rep:
                continue
            row_index[j] = len(rows)
            rows.append(SignVector(p.n, (1 << j) | (1 << rep)))
            nonrep.append(j)
            reps.append(rep)
    return SyndromeMatrix(
        partition=p,
        rows=tuple(rows),
        row_index=row_index,
        nonrep=np.array(nonrep, dtype=np.intp),
        rep_of_nonrep=np.array(reps, dtype=np.intp),
    )


def syndrome(M: SyndromeMatrix, v: SignVector) -> SignVector:
    """``M (.) v^T`` over F2: one parity per row of ``M``."""
    if v.n != M.partition.n:
        raise LengthMismatchError(f"vector length {v.n} != {M.partition.n}")
    vb = v.bits
    out = 0
    for k, row in enumerate(M.rows):
        out |= ((row.bits & vb).bit_count() & 1) << k
    return SignVector(len(M.rows), out)


def solve_B(M: SyndromeMatrix, q: SignVector) -> SignVector:
    """Canonical solution of ``M (.) u^T = q``.

    Block representatives are set to +1 and every other coordinate copies its
    syndrome entry. Relies on ``M`` having been built by :func:`syndrome_matrix`.
    """
    m = len(M.rows)
    if q.n != m:
        raise LengthMismatchError(f"syndrome length {q.n} != {m}")
    out = 0
    qb = q.bits
    for k, j in enumerate(M.nonrep.tolist()):
        out |= ((qb >> k) & 1) << j
    return SignVector(M.partition.n, out)


# Dense (unpacked) counterparts, batched over leading axes.

def syndrome_array(M: SyndromeMatrix, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.shape[-1] != M.partition.n:
        raise LengthMismatchError(f"vector length {v.shape[-1]} != {M.partition.n}")
    return v[..., M.nonrep] * v[..., M.rep_of_nonrep]


def solve_B_array(M: SyndromeMatrix, q: np.ndarray) -> np.ndarray:
    q = np.asarray(q)
    if q.shape[-1] != len(M.rows):
        raise LengthMismatchError(f"syndrome length {q.shape[-1]} != {len(M.rows)}")
    out = np.ones(q.shape[:-1] + (M.partition.n,), dtype=q.dtype)
    out[..., M.nonrep] = q
    return out
