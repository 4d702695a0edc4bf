"""Brute-force reference computations for the closed forms.

Everything here deliberately avoids the fast paths it checks. Cosets are
identified by canonical representatives instead of syndromes, Gamma is found
by scanning all of {+-1}^n, and projections come from dense linear algebra.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .approx import GammaSpec
from .exact import CodingMatrix
from .exceptions import LengthMismatchError, OracleSizeError, ParameterError
from .gf2 import SignVector

__all__ = [
    "gf2_rank",
    "brute_closest",
    "BruteGamma",
    "brute_gamma",
    "MutualInformation",
    "brute_mi",
    "SubspaceBasis",
    "brute_neighborhood",
    "brute_orthants",
    "orthant_distance_clipped",
    "worstcase_objective",
    "brute_worstcase_distance",
    "lagrange_min_sum_squares",
    "cascade_residual",
]

TOL = 1e-9


def gf2_rank(rows) -> int:
    """Rank over F2 of integer bit-rows (Gaussian elimination)."""
    pivots: dict[int, int] = {}
    rank = 0
    for row in rows:
        r = int(row)
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


def brute_closest(w: SignVector, u_prime: SignVector, C: CodingMatrix) -> np.ndarray:
    """Least-squares projection of ``w`` onto ``span{u' xor c_i}`` by normal equations."""
    if C.n > 4096:
        raise OracleSizeError("n > 4096")
    if w.n != C.n or u_prime.n != C.n:
        raise LengthMismatchError("length mismatch")
    basis = np.array([(u_prime ^ c).to_array(np.float64) for c in C.rows])
    gram = basis @ basis.T
    if np.linalg.matrix_rank(gram) < len(basis):
        raise np.linalg.LinAlgError("singular basis; coding matrix is corrupt")
    coef = np.linalg.solve(gram, basis @ w.to_array(np.float64))
    return coef @ basis


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a)


def _all_block_weights(n: int, t: int) -> np.ndarray:
    """Block weights of every integer in ``range(2**n)``, shape (2**n, t)."""
    b = n // t
    v = np.arange(1 << n, dtype=np.int64)
    mask = (1 << b) - 1
    return np.stack([_popcount((v >> (r * b)) & mask) for r in range(t)], axis=1).astype(np.int64)


class BruteGamma(NamedTuple):
    count_le: int
    count_lemma: int
    members: list[SignVector]

    @property
    def discrepancy(self) -> int:
        """Vectors admitted by the weight <= h rule but not by the counting formula."""
        return self.count_le - self.count_lemma


def _gamma_masks(n: int, t: int, h: int) -> tuple[np.ndarray, np.ndarray]:
    bw = _all_block_weights(n, t)
    total = bw.sum(axis=1)
    capped = np.all(2 * bw * t < n, axis=1)
    le = (total <= h) & capped
    if 2 * h * t < n:
        lemma = total == h
    else:
        lemma = le
    return le, lemma


def brute_gamma(spec: GammaSpec) -> BruteGamma:
    """Scan all sign vectors. ``members`` follows ``spec.family``."""
    if spec.n > 20:
        raise OracleSizeError("brute_gamma needs n <= 20")
    le, lemma = _gamma_masks(spec.n, spec.t, spec.h)
    chosen = le if spec.family == "le" else lemma
    members = [SignVector(spec.n, int(b)) for b in np.flatnonzero(chosen)]
    return BruteGamma(int(le.sum()), int(lemma.sum()), members)


def _canonical(v: np.ndarray, n: int, t: int) -> np.ndarray:
    """Coset representative with every block representative bit cleared."""
    b = n // t
    out = v.copy()
    for r in range(t):
        flip = (out >> (r * b)) & 1
        out ^= flip * (((1 << b) - 1) << (r * b))
    return out


@dataclass(frozen=True)
class MutualInformation:
    bits: float
    conditional_entropies: np.ndarray  # H(W | Q=q) for every q in the support
    support_sizes: np.ndarray  # |supp(W | Q=q)|
    uniform: bool  # every W | Q=q is uniform on its support
    gamma_size: int


def brute_mi(n: int, t: int, h: int, family: str = "le") -> MutualInformation:
    """Exact ``I(W; Q)`` by summing the full joint distribution.

    W is uniform on {+-1}^n, g is uniform on the Gamma family found by
    exhaustive scan, and Q is identified with the coset of ``w xor g``.
    """
    if n > 14:
        raise OracleSizeError("brute_mi needs n <= 14")
    if n % t:
        raise ParameterError("t must divide n")
    le, lemma = _gamma_masks(n, t, h)
    gammas = np.flatnonzero(le if family == "le" else lemma).astype(np.int64)
    G = len(gammas)
    N = 1 << n
    w_all = np.arange(N, dtype=np.int64)
    q_counts = np.zeros(N, dtype=np.int64)  # counts of (w, g) pairs per coset id
    pair_counts_unique = True
    h_q_given_w = 0.0
    chunk = max(1, (1 << 22) // max(G, 1))
    for start in range(0, N, chunk):
        ws = w_all[start:start + chunk]
        ids = _canonical(ws[:, None] ^ gammas[None, :], n, t)
        q_counts += np.bincount(ids.ravel(), minlength=N)
        srt = np.sort(ids, axis=1)
        dup = (srt[:, 1:] == srt[:, :-1]) if G > 1 else np.zeros((len(ws), 0), bool)
        if dup.any():
            pair_counts_unique = False
        # H(Q | W=w) by direct counting per w
        for row in srt:
            _, c = np.unique(row, return_counts=True)
            p = c / G
            h_q_given_w += float(-(p * np.log2(p)).sum())
    h_q_given_w /= N
    p_q = q_counts[q_counts > 0] / (N * G)
    h_q = float(-(p_q * np.log2(p_q)).sum())
    mi = h_q - h_q_given_w
    # W | Q=q: with unique pairs every consistent w has weight 1/(N G)
    sizes = q_counts[q_counts > 0]
    cond = np.log2(sizes.astype(np.float64)) if pair_counts_unique else np.full(len(sizes), np.nan)
    return MutualInformation(
        bits=mi,
        conditional_entropies=cond,
        support_sizes=sizes,
        uniform=pair_counts_unique,
        gamma_size=G,
    )


@dataclass(frozen=True)
class SubspaceBasis:
    """``ell`` linearly independent rows spanning a subspace of R^n."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=np.float64))
        if rows.shape[0] > rows.shape[1]:
            raise ParameterError("more basis vectors than the ambient dimension")
        s = np.linalg.svd(rows, compute_uv=False)
        if s.size == 0 or s[-1] <= TOL * max(1.0, s[0]):
            raise ParameterError("basis is rank deficient")
        object.__setattr__(self, "rows", rows)

    @property
    def ell(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def projector(self) -> np.ndarray:
        q, _ = np.linalg.qr(self.rows.T)
        return q @ q.T


def _all_signs(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1, -1), repeat=n)), dtype=np.float64)


def brute_neighborhood(basis: SubspaceBasis, eps_prime: float) -> int:
    """Count sign vectors within ``eps_prime`` of the row space."""
    if basis.n > 16:
        raise OracleSizeError("brute_neighborhood needs n <= 16")
    Y = _all_signs(basis.n)
    resid = Y - Y @ basis.projector()
    dist = np.linalg.norm(resid, axis=1)
    return int(np.count_nonzero(dist <= eps_prime + TOL))


def brute_orthants(basis: SubspaceBasis, samples: int, rng=None) -> int:
    """Distinct strict sign patterns met by random directions in the subspace.

    A lower estimate of the number of orthants the subspace crosses. Samples
    landing within 1e-9 of a coordinate hyperplane are discarded.
    """
    if basis.ell > 4 or basis.n > 16:
        raise OracleSizeError("brute_orthants needs ell <= 4 and n <= 16")
    rng = np.random.default_rng(rng)
    seen = set()
    weights = 1 << np.arange(basis.n, dtype=np.int64)
    remaining = samples
    while remaining > 0:
        m = min(remaining, 1 << 16)
        z = rng.standard_normal((m, basis.ell))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        y = z @ basis.rows
        ok = np.all(np.abs(y) >= TOL, axis=1)
        codes = ((y[ok] < 0).astype(np.int64) * weights).sum(axis=1)
        seen.update(np.unique(codes).tolist())
        remaining -= m
    return len(seen)


def orthant_distance_clipped(a, v) -> float:
    """Distance from ``v`` to the orthant ``{y : a_i y_i >= 0}`` via clipping."""
    a = np.asarray(a, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nearest = a * np.maximum(a * v, 0.0)
    return float(np.linalg.norm(v - nearest))


def worstcase_objective(d, n: int, t: int) -> float:
    return float(sum(di for di in d) - t / n * sum(di * di for di in d))


def brute_worstcase_distance(spec: GammaSpec, *, limit: int = 10**7, return_argmax: bool = False):
    """Maximum of ``2 sqrt(sum d_i - (t/n) sum d_i^2)`` over integer block profiles.

    Profiles satisfy ``sum d_i <= h`` and ``0 <= d_i < n/(2t)``.
    """
    n, t, h = spec.n, spec.t, spec.h
    dmax = spec.max_block_weight
    if (dmax + 1) ** t > limit:
        raise OracleSizeError("integer program too large to enumerate")
    best, arg = 0.0, (0,) * t
    for d in itertools.product(range(dmax + 1), repeat=t):
        if sum(d) > h:
            continue
        # exact rational objective: (n sum d - t sum d^2) / n
        num = n * sum(d) - t * sum(x * x for x in d)
        val = num / n
        if val > best:
            best, arg = val, d
    dist = 2.0 * math.sqrt(best)
    return (dist, arg) if return_argmax else dist


def lagrange_min_sum_squares(total: float, t: int) -> tuple[np.ndarray, float]:
    """Continuous minimiser of ``sum d_i^2`` subject to ``sum d_i = total``."""
    point = np.full(t, total / t)
    return point, total * total / t


def cascade_residual(epsilon: float, n: int) -> np.ndarray:
    """Extremal residual of the counting argument: ``|r_i| = eps / sqrt(i)``."""
    return epsilon / np.sqrt(np.arange(1, n + 1, dtype=np.float64))
