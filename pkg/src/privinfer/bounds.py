"""Closed-form error, privacy and lower-bound quantities.

Information quantities are in bits (log base 2). The natural log appears only
in the neighbourhood radius ``eps' = eps * sqrt(ln n + 1)``. All binomial
sums and Gamma sizes are exact Python integers.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional

from .approx import GammaSpec, count_gamma, count_gamma_members
from .exceptions import LengthMismatchError, ParameterError
from .gf2 import SignVector, hamming_distance

__all__ = [
    "error_bound",
    "relative_error_bound",
    "mi_achieved",
    "closew_bound",
    "closew_bound_harmonic",
    "harmonic",
    "neighborhood_radius",
    "floor_square",
    "mu_bound",
    "MiLower",
    "mi_lower",
    "binomial_sum",
    "binomial_sum_bound",
    "binomial_sum_bound_holds",
    "orthant_cell_bound",
    "orthant_cell_recursion",
    "orthant_distance",
    "BoundReport",
    "report",
    "comparison_row",
    "log2_int",
]

# eps'^2 values within this distance below an integer are snapped up to it,
# matching the 1e-9 slack the brute-force neighbourhood count uses
SQUARE_SNAP = 1e-9


def log2_int(k: int) -> float:
    """log2 of a positive integer of any size."""
    if k <= 0:
        raise ValueError("log2 of a non-positive integer")
    shift = max(0, k.bit_length() - 1000)
    return math.log2(k >> shift) + shift


def _check_h(h: int, n: int) -> None:
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    if not 0 <= 2 * h <= n:
        raise ParameterError(f"h must satisfy 0 <= h <= n/2, got h={h}, n={n}")


def error_bound(h: int, n: int, x_norm: float = 1.0) -> float:
    """Worst-case ``|w' x^T - w x^T|``: ``2 ||x|| sqrt(h (1 - h/n))``."""
    _check_h(h, n)
    return 2.0 * x_norm * math.sqrt(h * (n - h) / n)


def relative_error_bound(h: int, n: int) -> float:
    """Error bound relative to the range ``2 sqrt(n) ||x||`` of ``w x^T``."""
    _check_h(h, n)
    return math.sqrt(h * (n - h) / n) / math.sqrt(n)


def mi_achieved(n: int, t: int, h: int, family: str = "lemma") -> float:
    """``I(W; Q) = n - t - log2 |Gamma|`` in bits.

    With ``family="lemma"`` (the default) ``|Gamma|`` is the closed-form
    count. With ``family="le"`` it is the size of the weight <= h family.
    """
    spec = GammaSpec(n, t, h, family)
    size = count_gamma(spec) if family == "lemma" else count_gamma_members(spec)
    return n - t - log2_int(size)


def harmonic(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))


def closew_bound(epsilon: float, n: int) -> float:
    """``eps sqrt(ln n + 1)``: l2 radius implied by an eps inner-product error."""
    if n < 1:
        raise ParameterError("n must be positive")
    if epsilon < 0:
        raise ParameterError("epsilon must be non-negative")
    return epsilon * math.sqrt(math.log(n) + 1)


def closew_bound_harmonic(epsilon: float, n: int) -> float:
    """Tighter ``eps sqrt(H_n)`` form obtained before bounding ``H_n``."""
    if n < 1:
        raise ParameterError("n must be positive")
    return epsilon * math.sqrt(harmonic(n))


def neighborhood_radius(epsilon: float, n: int) -> float:
    return closew_bound(epsilon, n)


def floor_square(eps_prime) -> int:
    """``floor(eps'^2)``, exact for rationals, snapped for near-integer floats."""
    if eps_prime < 0:
        raise ParameterError("radius must be non-negative")
    if isinstance(eps_prime, Rational):
        return math.floor(Fraction(eps_prime) ** 2)
    sq = Fraction(float(eps_prime)) ** 2
    k = math.floor(sq)
    if (k + 1) - sq <= SQUARE_SNAP * max(1, sq):
        k += 1
    return k


def binomial_sum(m: int, n: int) -> int:
    """``sum_{k=0}^{m} C(n, k)`` (``m`` clipped to ``[.., n]``)."""
    if m < 0:
        return 0
    return sum(math.comb(n, k) for k in range(min(m, n) + 1))


def orthant_cell_bound(n_hyperplanes: int, ell: int) -> int:
    """``2 sum_{j<ell} C(n-1, j)``: cells of n hyperplanes through 0 in R^ell."""
    if n_hyperplanes < 1 or ell < 1:
        raise ParameterError("need at least one hyperplane and ell >= 1")
    return 2 * binomial_sum(ell - 1, n_hyperplanes - 1)


def orthant_cell_recursion(n_hyperplanes: int, ell: int) -> int:
    """F(n+1, l) = F(n, l) + F(n, l-1) with F(1, l) = F(n, 1) = 2."""
    if n_hyperplanes < 1 or ell < 1:
        raise ParameterError("need at least one hyperplane and ell >= 1")
    row = [2] * (ell + 1)  # row[l] = F(1, l)
    for _ in range(n_hyperplanes - 1):
        row = [2, 2] + [row[l] + row[l - 1] for l in range(2, ell + 1)]
    return row[ell]


def mu_bound(ell: int, n: int, eps_prime) -> int:
    """Number of sign vectors within ``eps_prime`` of some ``ell``-subspace, at most."""
    if not 1 <= ell <= n:
        raise ParameterError(f"need 1 <= ell <= n, got ell={ell}, n={n}")
    return orthant_cell_bound(n, ell) * binomial_sum(floor_square(eps_prime), n)


@dataclass(frozen=True)
class MiLower:
    eps_prime: float
    mu: int
    value: float
    closed_form: Optional[float]

    @property
    def clipped(self) -> float:
        return max(self.value, 0.0)


def mi_lower(n: int, ell: int, epsilon: float) -> MiLower:
    """Lower bound on ``I(W; Q)`` for any linear decoder with error ``epsilon``.

    ``value`` is the exact ``n - log2 mu``. ``closed_form`` is the looser
    ``n - ell log2 n - eps^2 log2(n)^2 - 1``, reported only when
    ``e <= eps'^2``. Otherwise it is ``None``.
    """
    eps_prime = closew_bound(epsilon, n)
    mu = mu_bound(ell, n, eps_prime)
    closed = None
    if math.e <= eps_prime**2:
        closed = n - ell * math.log2(n) - epsilon**2 * math.log2(n) ** 2 - 1
    return MiLower(eps_prime=eps_prime, mu=mu, value=n - log2_int(mu), closed_form=closed)


def binomial_sum_bound(m: int, n: int) -> float:
    """``(e n / m)^m``, an upper bound on ``sum_{k<=m} C(n, k)``."""
    if not 1 <= m <= n:
        raise ParameterError(f"need 1 <= m <= n, got m={m}, n={n}")
    return (math.e * n / m) ** m


def _e_lower() -> Fraction:
    # partial sum of 1/k!; strictly below e, within 1e-30 of it
    return sum((Fraction(1, math.factorial(k)) for k in range(30)), Fraction(0))


def binomial_sum_bound_holds(m: int, n: int) -> bool:
    """Exact check of ``sum_{k<=m} C(n, k) <= (e n / m)^m``.

    Uses a rational lower bound on ``e``, so a True result is a proof.
    """
    if not 1 <= m <= n:
        raise ParameterError(f"need 1 <= m <= n, got m={m}, n={n}")
    return binomial_sum(m, n) * m**m <= _e_lower() ** m * n**m


def orthant_distance(a: SignVector, v: SignVector) -> float:
    """Euclidean distance from ``v`` to the orthant with signature ``a``: sqrt(d_H)."""
    if a.n != v.n:
        raise LengthMismatchError(f"lengths differ: {a.n} != {v.n}")
    return math.sqrt(hamming_distance(a, v))


@dataclass(frozen=True)
class BoundReport:
    n: int
    t: int
    h: int
    ell: int
    epsilon: float
    error_bound: float
    relative_error_bound: float
    mi_achieved_bits: float
    gamma_count: int
    gamma_count_le: int
    mi_achieved_le_bits: float
    mu: int
    mi_lower_bits: float
    mi_lower_closed_form_bits: Optional[float]
    lower_bound_applies: bool
    consistent: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        # exact integers can exceed what JSON consumers parse as numbers
        d["gamma_count"] = str(self.gamma_count)
        d["gamma_count_le"] = str(self.gamma_count_le)
        d["mu"] = str(self.mu)
        return d


def report(n: int, t: int, h: int, ell: Optional[int] = None, epsilon: Optional[float] = None) -> BoundReport:
    """Scheme guarantees next to the linear-decoding lower bound.

    ``ell`` defaults to ``t`` and ``epsilon`` to the scheme's own error bound
    for unit-norm data. The lower bound constrains this scheme only when
    ``epsilon`` is at least that error bound. In that case ``consistent``
    asserts that the achieved leakage is not below it.
    """
    ell = t if ell is None else ell
    err = error_bound(h, n)
    epsilon = err if epsilon is None else float(epsilon)
    spec_lemma = GammaSpec(n, t, h, "lemma")
    spec_le = GammaSpec(n, t, h, "le")
    count = count_gamma(spec_lemma)
    count_le = count_gamma_members(spec_le)
    lower = mi_lower(n, ell, epsilon)
    achieved = n - t - log2_int(count)
    achieved_le = n - t - log2_int(count_le)
    applies = epsilon >= err and ell == t
    consistent = (not applies) or (min(achieved, achieved_le) >= lower.value - 1e-9)
    return BoundReport(
        n=n,
        t=t,
        h=h,
        ell=ell,
        epsilon=epsilon,
        error_bound=err,
        relative_error_bound=relative_error_bound(h, n),
        mi_achieved_bits=achieved,
        gamma_count=count,
        gamma_count_le=count_le,
        mi_achieved_le_bits=achieved_le,
        mu=lower.mu,
        mi_lower_bits=lower.value,
        mi_lower_closed_form_bits=lower.closed_form,
        lower_bound_applies=applies,
        consistent=consistent,
    )


def comparison_row(n: int, t: int, h: int) -> dict:
    """Scheme leakage vs. the lower bound at ``ell = t`` and ``eps = 2 sqrt(h)``.

    Both sides are evaluated exactly, alongside their asymptotic shorthands
    ``n - t - h log2 n`` and ``n - t log2 n - 4 h log2(n)^2``.
    """
    eps = 2.0 * math.sqrt(h)
    lower = mi_lower(n, t, eps)
    log_n = math.log2(n)
    return {
        "n": n,
        "t": t,
        "h": h,
        "scheme_bits": mi_achieved(n, t, h),
        "scheme_shorthand_bits": n - t - h * log_n,
        "lower_exact_bits": lower.value,
        "lower_shorthand_bits": n - t * log_n - 4 * h * log_n**2,
    }
