"""Approximate private inference with a randomized coset query.

The server perturbs ``w`` by a random low-weight ``g`` from a family Gamma
and publishes the syndrome of ``w xor g``. The user answers exactly as in the
exact scheme, but for the shift vector ``u'`` of the perturbed coset. The
server then outputs ``w' x^T``, where ``w'`` is the vector of
``span_R{v'_i}`` closest to ``w``. This is the closed form
``alpha = w U' C^T / n``.

Gamma holds the vectors of weight at most ``h`` whose weight inside every
block is strictly below ``n / (2t)``. Distinct members lie in distinct cosets
of V. The query therefore hides which of ``|Gamma|`` cosets holds ``w``, and
``I(W; Q) = n - t - log2 |Gamma|``.
"""
from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Literal, Optional

import numpy as np

from .exact import CodingMatrix, SchemeParams
from .exceptions import GammaMembershipError, LengthMismatchError, ParameterError
from .gf2 import (
    BlockPartition,
    SignVector,
    SyndromeMatrix,
    block_weights,
    hamming_distance,
    solve_B,
    solve_B_array,
    syndrome,
    syndrome_array,
)

__all__ = [
    "GammaSpec",
    "gamma_contains",
    "count_gamma",
    "count_gamma_members",
    "gamma_unrank",
    "gamma_rank",
    "sample_gamma",
    "server_query",
    "user_answer",
    "decode_coefficients",
    "server_decode",
    "closest_vector",
    "approx_distance",
    "Transcript",
    "run_session",
    "SessionBatch",
    "run_sessions",
    "draw_inputs",
]

Family = Literal["le", "lemma"]


@dataclass(frozen=True)
class GammaSpec:
    """Perturbation family for parameters ``(n, t, h)``.

    ``family="le"`` is the membership rule: weight <= h and every block
    weight < n/(2t). ``family="lemma"`` is the set whose size the closed-form
    count describes. It differs only when ``h < n/(2t)``, where it keeps the
    vectors of weight exactly ``h``.
    """

    n: int
    t: int
    h: int
    family: Family = "le"

    def __post_init__(self):
        if self.n < 1 or self.t < 1 or self.n % self.t:
            raise ParameterError(f"t={self.t} must divide n={self.n}")
        if not 0 <= 2 * self.h <= self.n:
            raise ParameterError(f"h must satisfy 0 <= h <= n/2, got h={self.h}, n={self.n}")
        if self.family not in ("le", "lemma"):
            raise ParameterError(f"unknown Gamma family {self.family!r}")

    @classmethod
    def from_params(cls, params: SchemeParams, family: Family = "le") -> "GammaSpec":
        return cls(params.n, params.t, params.h, family)

    @property
    def block_size(self) -> int:
        return self.n // self.t

    @property
    def block_cap(self) -> Fraction:
        """Strict upper limit n/(2t) on every block weight."""
        return Fraction(self.n, 2 * self.t)

    @property
    def max_block_weight(self) -> int:
        # largest integer e with e < n/(2t), i.e. 2e < n/t
        return (self.block_size - 1) // 2

    @property
    def low_branch(self) -> bool:
        """Whether h < n/(2t), where the caps cannot bind."""
        return 2 * self.h * self.t < self.n

    @property
    def weights(self) -> range:
        """Total Hamming weights present in the family."""
        if self.family == "lemma" and self.low_branch:
            return range(self.h, self.h + 1)
        return range(0, self.h + 1)

    @cached_property
    def _powers(self) -> tuple[tuple[int, ...], ...]:
        return _block_powers(self.block_size, self.max_block_weight, self.t, self.h)

    @cached_property
    def _member_count(self) -> int:
        top = self._powers[self.t]
        return sum(top[k] for k in self.weights)


@lru_cache(maxsize=256)
def _block_powers(b: int, emax: int, t: int, h: int) -> tuple[tuple[int, ...], ...]:
    """``out[k][s]``: ways to fill ``k`` blocks with total weight ``s`` (s <= h)."""
    per_block = [math.comb(b, e) for e in range(min(emax, h) + 1)]
    out = [tuple([1] + [0] * h)]
    for _ in range(t):
        prev = out[-1]
        nxt = [0] * (h + 1)
        for s, ways in enumerate(prev):
            if ways:
                for e, c in enumerate(per_block):
                    if s + e > h:
                        break
                    nxt[s + e] += ways * c
        out.append(tuple(nxt))
    return tuple(out)


def gamma_contains(g: SignVector, spec: GammaSpec) -> bool:
    if g.n != spec.n:
        raise LengthMismatchError(f"vector length {g.n} != n={spec.n}")
    if g.weight not in spec.weights:
        return False
    p = BlockPartition(spec.n, spec.t)
    # strict comparison e < n/(2t) in integers: 2 e t < n
    return all(2 * e * spec.t < spec.n for e in block_weights(g, p))


def count_gamma(spec: GammaSpec) -> int:
    """Closed-form count: C(n, h) when h < n/(2t), else the block-profile sum.

    This is the formula value regardless of ``spec.family``. Use
    :func:`count_gamma_members` for the size of the family actually sampled.
    """
    if spec.low_branch:
        return math.comb(spec.n, spec.h)
    return sum(spec._powers[spec.t])


def count_gamma_members(spec: GammaSpec) -> int:
    return spec._member_count


SMALL_BLOCK = 64


@lru_cache(maxsize=256)
def _comb_row(b: int) -> tuple[int, ...]:
    return tuple(math.comb(b, e) for e in range(b + 1))


@lru_cache(maxsize=64)
def _comb_columns(b: int) -> tuple[tuple[int, ...], ...]:
    """``cols[m][c] = C(c, m)`` for ``0 <= c < b``; each column is non-decreasing."""
    return tuple(tuple(math.comb(c, m) for c in range(b)) for m in range(b + 1))


def _unrank_combination(b: int, e: int, rank: int) -> int:
    """Bit pattern of the ``rank``-th ``e``-subset of ``range(b)`` (colex order).

    Each step takes the largest ``c`` with ``C(c, m) <= rank``.
    """
    bits = 0
    if b <= SMALL_BLOCK:
        cols = _comb_columns(b)
        hi = b
        for m in range(e, 0, -1):
            col = cols[m]
            c = bisect_right(col, rank, 0, hi) - 1
            bits |= 1 << c
            rank -= col[c]
            hi = c
        return bits
    c = b - 1
    for m in range(e, 0, -1):
        while math.comb(c, m) > rank:
            c -= 1
        bits |= 1 << c
        rank -= math.comb(c, m)
        c -= 1
    return bits


def _rank_combination(bits: int) -> int:
    rank = 0
    m = 0
    pos = 0
    while bits:
        if bits & 1:
            m += 1
            rank += math.comb(pos, m)
        bits >>= 1
        pos += 1
    return rank


def gamma_unrank(spec: GammaSpec, rank: int) -> SignVector:
    """Bijection from ``range(count_gamma_members(spec))`` onto the family."""
    pw = spec._powers
    t, b = spec.t, spec.block_size
    if not 0 <= rank < spec._member_count:
        raise ValueError(f"rank {rank} out of range")
    for k in spec.weights:
        if rank < pw[t][k]:
            break
        rank -= pw[t][k]
    bits = 0
    remaining = k
    emax = spec.max_block_weight
    per_block = _comb_row(b)
    for i in range(t):
        if remaining == 0:
            break  # the rest of the blocks are empty
        rest = pw[t - i - 1]
        for e in range(min(emax, remaining) + 1):
            cnt = per_block[e] * rest[remaining - e]
            if rank < cnt:
                break
            rank -= cnt
        sub, rank = divmod(rank, rest[remaining - e])
        bits |= _unrank_combination(b, e, sub) << (i * b)
        remaining -= e
    return SignVector(spec.n, bits)


def gamma_rank(spec: GammaSpec, g: SignVector) -> int:
    """Inverse of :func:`gamma_unrank`."""
    if not gamma_contains(g, spec):
        raise GammaMembershipError("vector is not a member of the family")
    pw = spec._powers
    t, b = spec.t, spec.block_size
    k = g.weight
    rank = sum(pw[t][j] for j in spec.weights if j < k)
    remaining = k
    mask = (1 << b) - 1
    for i in range(t):
        rest = pw[t - i - 1]
        chunk = (g.bits >> (i * b)) & mask
        e = chunk.bit_count()
        rank += sum(math.comb(b, f) * rest[remaining - f] for f in range(e))
        rank += _rank_combination(chunk) * rest[remaining - e]
        remaining -= e
    return rank


def _randbelow(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in ``[0, n)``, exact for arbitrarily large ``n``."""
    if n <= 0:
        raise ValueError("upper bound must be positive")
    if n <= 1 << 62:
        return int(rng.integers(n))
    k = (n - 1).bit_length()
    words = (k + 63) // 64
    excess = 64 * words - k
    while True:
        raw = rng.bit_generator.random_raw(words)
        r = int.from_bytes(raw.astype("<u8").tobytes(), "little") >> excess
        if r < n:
            return r


def sample_gamma(spec: GammaSpec, rng=None, method: Literal["unrank", "rejection"] = "unrank") -> SignVector:
    """Uniform random member of the family.

    ``unrank`` draws one uniform index below the family size and maps it
    through :func:`gamma_unrank`. ``rejection`` draws a weight class with
    probability proportional to C(n, k), then a uniform vector of that
    weight, and retries until the block caps hold. Both are exactly uniform.
    The second is only practical while the caps rarely bind.
    """
    rng = np.random.default_rng(rng)
    if method == "unrank":
        return gamma_unrank(spec, _randbelow(rng, spec._member_count))
    if method != "rejection":
        raise ValueError(f"unknown sampling method {method!r}")
    classes = list(spec.weights)
    sizes = [math.comb(spec.n, k) for k in classes]
    total = sum(sizes)
    while True:
        r = _randbelow(rng, total)
        for k, size in zip(classes, sizes):
            if r < size:
                break
            r -= size
        idx = rng.choice(spec.n, size=k, replace=False)
        g = SignVector.from_support(spec.n, idx.tolist())
        if gamma_contains(g, spec):
            return g


def server_query(w: SignVector, g: SignVector, M: SyndromeMatrix, gamma: Optional[GammaSpec] = None) -> SignVector:
    """Syndrome of ``w xor g``. With ``gamma`` given, ``g`` must be a member."""
    if gamma is not None and not gamma_contains(g, gamma):
        raise GammaMembershipError("perturbation vector is outside Gamma")
    return syndrome(M, w ^ g)


def user_answer(q: SignVector, x, C: CodingMatrix, M: SyndromeMatrix) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (C.n,):
        raise LengthMismatchError(f"x must have shape ({C.n},), got {x.shape}")
    u_prime = solve_B(M, q)
    return (C.entries * u_prime.to_array()) @ x


def decode_coefficients(w: SignVector, u_prime: SignVector, C: CodingMatrix) -> np.ndarray:
    """``alpha = w U' C^T / n``."""
    if w.n != C.n or u_prime.n != C.n:
        raise LengthMismatchError(f"lengths {w.n}, {u_prime.n} do not match n={C.n}")
    return (C.entries @ (w.to_array(np.float64) * u_prime.to_array(np.float64))) / C.n


def server_decode(w: SignVector, q: SignVector, answers, C: CodingMatrix, M: SyndromeMatrix) -> float:
    answers = np.asarray(answers, dtype=np.float64)
    if answers.shape != (C.t,):
        raise LengthMismatchError(f"expected {C.t} answers, got shape {answers.shape}")
    alpha = decode_coefficients(w, solve_B(M, q), C)
    return float(alpha @ answers)


def closest_vector(w: SignVector, u_prime: SignVector, C: CodingMatrix) -> np.ndarray:
    """``(t/n) w U' blockdiag(J) U'``: the point of ``span{v'_i}`` nearest ``w``."""
    if w.n != C.n or u_prime.n != C.n:
        raise LengthMismatchError(f"lengths {w.n}, {u_prime.n} do not match n={C.n}")
    p = C.partition
    u = u_prime.to_array(np.float64)
    block_sums = (w.to_array(np.float64) * u).reshape(p.t, p.size).sum(axis=1)
    return (p.t / p.n) * u * np.repeat(block_sums, p.size)


def approx_distance(w: SignVector, u_prime: SignVector, p: BlockPartition) -> float:
    """``||w - w'||_2 = 2 sqrt(d_H(w, u') - (t/n) sum_p w_H((w xor u')|S_p)^2)``."""
    d = hamming_distance(w, u_prime)
    sq = sum(e * e for e in block_weights(w ^ u_prime, p))
    inner = d - Fraction(p.t * sq, p.n)
    return 2.0 * math.sqrt(inner)


def draw_inputs(n: int, rng: np.random.Generator, x_norm: float = 1.0) -> tuple[SignVector, np.ndarray]:
    """Uniform weights and a standard-normal ``x`` rescaled to ``||x|| = x_norm``."""
    w = SignVector(n, _randbelow(rng, 1 << n) if n else 0)
    x = rng.standard_normal(n)
    norm = math.sqrt(float(x @ x))
    x = x * (x_norm / norm) if norm > 0 else x
    return w, x


@dataclass(frozen=True)
class Transcript:
    """Everything exchanged (and, in test mode, the ground truth) in one session."""

    n: int
    t: int
    h: int
    seed: Optional[int]
    g: SignVector
    q: SignVector
    u_prime: SignVector
    answers: tuple[float, ...]
    estimate: float
    truth: Optional[float] = None
    family: str = "le"

    @property
    def error(self) -> Optional[float]:
        return None if self.truth is None else abs(self.estimate - self.truth)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "h": self.h,
            "family": self.family,
            "seed": self.seed,
            "g": self.g.to_bytes().hex(),
            "q": self.q.to_bytes().hex(),
            "u_prime": self.u_prime.to_bytes().hex(),
            "answers": list(self.answers),
            "estimate": self.estimate,
            "truth": self.truth,
        }

    def to_bytes(self) -> bytes:
        return (json.dumps(self.to_dict(), sort_keys=True) + "\n").encode("utf-8")

    @classmethod
    def from_dict(cls, d: dict) -> "Transcript":
        n, t = d["n"], d["t"]
        return cls(
            n=n,
            t=t,
            h=d["h"],
            seed=d["seed"],
            g=SignVector.from_bytes(n, bytes.fromhex(d["g"])),
            q=SignVector.from_bytes(n - t, bytes.fromhex(d["q"])),
            u_prime=SignVector.from_bytes(n, bytes.fromhex(d["u_prime"])),
            answers=tuple(d["answers"]),
            estimate=d["estimate"],
            truth=d["truth"],
            family=d.get("family", "le"),
        )


def run_session(
    params: SchemeParams,
    w: SignVector,
    x,
    seed=None,
    *,
    family: Family = "le",
    strict: bool = True,
    test_mode: bool = True,
) -> Transcript:
    """One full protocol round; deterministic for a fixed integer ``seed``.

    ``seed`` may also be a ``numpy.random.Generator``, in which case the
    perturbation is drawn from it and the transcript records no seed.
    """
    x = np.asarray(x, dtype=np.float64)
    if w.n != params.n or x.shape != (params.n,):
        raise LengthMismatchError(f"w and x must have length n={params.n}")
    spec = GammaSpec.from_params(params, family)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = sample_gamma(spec, rng)
    q = server_query(w, g, params.M, spec if strict else None)
    answers = user_answer(q, x, params.C, params.M)
    estimate = server_decode(w, q, answers, params.C, params.M)
    truth = float(w.to_array(np.float64) @ x) if test_mode else None
    return Transcript(
        n=params.n,
        t=params.t,
        h=params.h,
        seed=seed if isinstance(seed, (int, np.integer)) else None,
        g=g,
        q=q,
        u_prime=solve_B(params.M, q),
        answers=tuple(float(a) for a in answers),
        estimate=estimate,
        truth=truth,
        family=family,
    )


@dataclass
class SessionBatch:
    """Array form of many sessions; row ``i`` is one session."""

    q: np.ndarray
    u_prime: np.ndarray
    answers: np.ndarray
    alpha: np.ndarray
    estimate: np.ndarray
    truth: np.ndarray = field(repr=False)

    @property
    def error(self) -> np.ndarray:
        return np.abs(self.estimate - self.truth)


def run_sessions(params: SchemeParams, W, X, G, *, strict: bool = True, family: Family = "le") -> SessionBatch:
    """Vectorized protocol over dense +-1 arrays ``W``, ``G`` and real ``X``.

    Shapes are ``(trials, n)``. Produces the same values as running
    :func:`run_session` row by row with the same perturbations.
    """
    W = np.asarray(W, dtype=np.int8)
    G = np.asarray(G, dtype=np.int8)
    X = np.asarray(X, dtype=np.float64)
    if W.ndim != 2 or W.shape != G.shape or W.shape != X.shape or W.shape[1] != params.n:
        raise LengthMismatchError("W, G and X must all have shape (trials, n)")
    if strict:
        spec = GammaSpec.from_params(params, family)
        neg = (G == -1).reshape(len(G), params.t, -1).sum(axis=2)
        total = neg.sum(axis=1)
        ok = np.all(2 * neg * params.t < params.n, axis=1) & (total >= spec.weights.start) & (total < spec.weights.stop)
        if not ok.all():
            raise GammaMembershipError(f"row {int(np.argmin(ok))} of G is outside Gamma")
    C = params.C.entries.astype(np.float64)
    Q = syndrome_array(params.M, W * G)
    U = solve_B_array(params.M, Q)
    answers = (U * X) @ C.T
    alpha = ((W * U).astype(np.float64) @ C.T) / params.n
    estimate = np.einsum("ij,ij->i", alpha, answers)
    truth = np.einsum("ij,ij->i", W.astype(np.float64), X)
    return SessionBatch(q=Q, u_prime=U, answers=answers, alpha=alpha, estimate=estimate, truth=truth)
