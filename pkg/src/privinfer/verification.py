"""Closed form vs. brute-force oracle checks behind ``privinfer verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import approx, bounds, oracles
from .exact import SchemeParams, exact_coeffs, exact_infer
from .gf2 import BlockPartition, SignVector, solve_B, syndrome, syndrome_matrix

__all__ = ["CheckResult", "CHECKS", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_sign(n: int, rng) -> SignVector:
    return SignVector(n, approx._randbelow(rng, 1 << n))


def check_closest_vector(rng) -> tuple[bool, str]:
    worst = 0.0
    for n, t in [(4, 2), (12, 4), (16, 4), (32, 8), (64, 8)]:
        C = SchemeParams(n, t).C
        for _ in range(40):
            w, u = _random_sign(n, rng), _random_sign(n, rng)
            diff = np.abs(approx.closest_vector(w, u, C) - oracles.brute_closest(w, u, C)).max()
            worst = max(worst, diff)
    return worst <= 1e-9, f"max deviation {worst:.2e}"


def check_distance_formula(rng) -> tuple[bool, str]:
    worst = 0.0
    for n, t in [(12, 4), (16, 2), (64, 8)]:
        C = SchemeParams(n, t).C
        for _ in range(50):
            w, u = _random_sign(n, rng), _random_sign(n, rng)
            direct = np.linalg.norm(w.to_array(float) - approx.closest_vector(w, u, C))
            worst = max(worst, abs(direct - approx.approx_distance(w, u, C.partition)))
    return worst <= 1e-9, f"max deviation {worst:.2e}"


def check_gamma_count(rng) -> tuple[bool, str]:
    cases = 0
    discrepancies = 0
    for n in range(2, 13):
        for t in range(1, n + 1):
            if n % t:
                continue
            for h in range(0, n // 2 + 1):
                brute = oracles.brute_gamma(approx.GammaSpec(n, t, h))
                if approx.count_gamma(approx.GammaSpec(n, t, h)) != brute.count_lemma:
                    return False, f"lemma count mismatch at n={n}, t={t}, h={h}"
                if approx.count_gamma_members(approx.GammaSpec(n, t, h)) != brute.count_le:
                    return False, f"member count mismatch at n={n}, t={t}, h={h}"
                discrepancies += brute.discrepancy > 0
                cases += 1
    return True, f"{cases} cases; weight<=h exceeds the formula in {discrepancies}"


def check_mutual_information(rng) -> tuple[bool, str]:
    details = []
    for n, t, h, fam in [(8, 2, 1, "lemma"), (8, 2, 1, "le"), (12, 4, 2, "le"), (8, 2, 0, "le")]:
        mi = oracles.brute_mi(n, t, h, fam)
        spec = approx.GammaSpec(n, t, h, fam)
        size = approx.count_gamma_members(spec)
        expected = n - t - math.log2(size)
        if abs(mi.bits - expected) > 1e-9 or not mi.uniform or set(mi.support_sizes.tolist()) != {2**t * size}:
            return False, f"n={n}, t={t}, h={h}, {fam}: {mi.bits} vs {expected}"
        details.append(f"{mi.bits:.4f}")
    return True, "I(W;Q) = " + ", ".join(details)


def check_neighborhood(rng) -> tuple[bool, str]:
    worst_ratio = 0.0
    for _ in range(30):
        n = int(rng.integers(4, 11))
        ell = int(rng.integers(1, 4))
        eps_prime = float(rng.uniform(0.0, 2.5))
        basis = oracles.SubspaceBasis(rng.standard_normal((ell, n)))
        count = oracles.brute_neighborhood(basis, eps_prime)
        mu = bounds.mu_bound(ell, n, eps_prime)
        if count > mu:
            return False, f"count {count} > mu {mu} (n={n}, ell={ell}, eps'={eps_prime})"
        worst_ratio = max(worst_ratio, count / mu)
    return True, f"max count/mu {worst_ratio:.3f}"


def check_orthants(rng) -> tuple[bool, str]:
    for n in range(2, 7):
        basis = oracles.SubspaceBasis(rng.standard_normal((2, n)))
        est = oracles.brute_orthants(basis, 50_000, rng)
        bound = bounds.orthant_cell_bound(n, 2)
        if est != bound:
            return False, f"generic plane in R^{n}: {est} orthants vs bound {bound}"
    for n, ell in [(6, 3), (8, 3), (8, 4)]:
        basis = oracles.SubspaceBasis(rng.standard_normal((ell, n)))
        est = oracles.brute_orthants(basis, 50_000, rng)
        if est > bounds.orthant_cell_bound(n, ell):
            return False, f"estimate {est} exceeds bound at n={n}, ell={ell}"
    return True, "estimates within bound, tight for generic planes"


def check_orthant_distance(rng) -> tuple[bool, str]:
    for _ in range(200):
        n = int(rng.integers(1, 17))
        a, v = _random_sign(n, rng), _random_sign(n, rng)
        if abs(bounds.orthant_distance(a, v) - oracles.orthant_distance_clipped(a.to_array(), v.to_array())) > 1e-12:
            return False, f"mismatch at n={n}"
    return True, "sqrt(d_H) matches clipping"


def check_worst_case(rng) -> tuple[bool, str]:
    for n, t in [(12, 4), (12, 2), (16, 2)]:
        p = SchemeParams(n, t)
        for h in range(0, n // 2 + 1):
            spec = approx.GammaSpec(n, t, h)
            ip = oracles.brute_worstcase_distance(spec)
            if ip > bounds.error_bound(h, n) + 1e-12:
                return False, f"integer optimum above bound at n={n}, t={t}, h={h}"
            if n <= 12:
                w = SignVector.ones(n)
                members = oracles.brute_gamma(spec).members
                best = max(approx.approx_distance(w, solve_B(p.M, syndrome(p.M, g)), p.partition) for g in members)
                if abs(best - ip) > 1e-9:
                    return False, f"Gamma maximum {best} != integer optimum {ip} at n={n}, t={t}, h={h}"
    return True, "integer optimum <= 2 sqrt(h(1-h/n)) and attained in Gamma"


def check_binomial_sum(rng) -> tuple[bool, str]:
    for n in range(1, 65):
        for m in range(1, n + 1):
            if not bounds.binomial_sum_bound_holds(m, n):
                return False, f"fails at m={m}, n={n}"
    return True, "all 1 <= m <= n <= 64, exact rational comparison"


def check_cell_recursion(rng) -> tuple[bool, str]:
    for n in range(1, 30):
        for ell in range(1, 8):
            if bounds.orthant_cell_bound(n, ell) != bounds.orthant_cell_recursion(n, ell):
                return False, f"n={n}, ell={ell}"
    return True, "closed form equals recursion"


def check_syndrome_kernel(rng) -> tuple[bool, str]:
    for n, t in [(8, 2), (12, 4), (12, 3), (10, 5)]:
        part = BlockPartition(n, t)
        M = syndrome_matrix(part)
        if oracles.gf2_rank(r.bits for r in M.rows) != n - t:
            return False, f"rank != n - t at n={n}, t={t}"
        for v in range(1 << n):
            sv = SignVector(n, v)
            in_v = all((v & m) in (0, m) for m in part.masks)
            if (syndrome(M, sv).bits == 0) != in_v:
                return False, f"kernel mismatch at n={n}, t={t}"
    return True, "kernel = V and rank n - t"


def check_exact_scheme(rng) -> tuple[bool, str]:
    worst = 0.0
    for n, t in [(4, 2), (12, 4), (64, 8), (256, 8)]:
        p = SchemeParams(n, t)
        for _ in range(20):
            w = _random_sign(n, rng)
            x = rng.standard_normal(n)
            x /= np.linalg.norm(x)
            worst = max(worst, abs(exact_infer(w, x, p) - float(w.to_array(float) @ x)))
            u = solve_B(p.M, syndrome(p.M, w))
            beta = exact_coeffs(w, u, p.C)
            recon = sum(b * (u ^ c).to_array(float) for b, c in zip(beta, p.C.rows))
            worst = max(worst, np.abs(recon - w.to_array(float)).max())
    return worst <= 1e-9, f"max deviation {worst:.2e}"


def check_lagrange(rng) -> tuple[bool, str]:
    for _ in range(200):
        t = int(rng.integers(1, 10))
        total = float(rng.uniform(0, 20))
        _, opt = oracles.lagrange_min_sum_squares(total, t)
        d = rng.dirichlet(np.ones(t)) * total
        if float(d @ d) < opt - 1e-9:
            return False, f"feasible point below optimum (t={t})"
    return True, "no feasible point beats h'^2/t"


def check_cascade(rng) -> tuple[bool, str]:
    for n in [1, 2, 10, 100, 10_000]:
        for eps in [0.5, 1.0, 3.0]:
            r = oracles.cascade_residual(eps, n)
            norm = float(np.linalg.norm(r))
            if not norm <= bounds.closew_bound_harmonic(eps, n) + 1e-12 <= bounds.closew_bound(eps, n) + 2e-12:
                return False, f"n={n}, eps={eps}"
    return True, "eps sqrt(H_n) <= eps sqrt(ln n + 1)"


CHECKS: dict[str, Callable] = {
    "closest_vector == normal-equations projection": check_closest_vector,
    "distance formula == direct norm": check_distance_formula,
    "Gamma counts == exhaustive enumeration": check_gamma_count,
    "I(W;Q) == exhaustive joint distribution": check_mutual_information,
    "neighbourhood count <= mu": check_neighborhood,
    "orthants met <= cell bound": check_orthants,
    "orthant distance == clipping": check_orthant_distance,
    "worst-case distance integer program": check_worst_case,
    "binomial sum <= (en/m)^m": check_binomial_sum,
    "cell bound == recursion": check_cell_recursion,
    "syndrome kernel and rank": check_syndrome_kernel,
    "exact scheme reconstruction": check_exact_scheme,
    "Lagrange optimum h'^2/t": check_lagrange,
    "closeness cascade": check_cascade,
}


def run_checks(seed: int = 0) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS.items():
        rng = np.random.default_rng(seed)
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crash is a failed check, not a crashed run
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail))
    return results
