"""Acceptance criteria, one test each, at their stated tolerances and time limits.

Every test records a PASS/FAIL line that is printed at the end of the run.
"""
from __future__ import annotations

import io
import math
import time

import numpy as np
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import ACCEPTANCE, random_sign
from privinfer.approx import (
    GammaSpec,
    approx_distance,
    closest_vector,
    count_gamma,
    count_gamma_members,
    run_session,
)
from privinfer.cli import main
from privinfer.bounds import (
    binomial_sum_bound_holds,
    closew_bound,
    closew_bound_harmonic,
    error_bound,
    mi_achieved,
    mu_bound,
    orthant_cell_bound,
    orthant_distance,
)
from privinfer.exact import SchemeParams, exact_infer
from privinfer.experiment import ExperimentConfig, run_experiment
from privinfer.gf2 import BlockPartition, SignVector, syndrome_array, syndrome_matrix
from privinfer.oracles import (
    SubspaceBasis,
    brute_closest,
    brute_gamma,
    brute_mi,
    brute_neighborhood,
    brute_orthants,
    brute_worstcase_distance,
    cascade_residual,
    orthant_distance_clipped,
)


def record(k: int, title: str, failures: list[str], detail: str, elapsed: float | None = None, limit: float | None = None):
    if limit is not None and elapsed is not None and elapsed >= limit:
        failures.append(f"runtime {elapsed:.1f}s >= {limit:.0f}s")
    timing = f", {elapsed:.1f}s" if elapsed is not None else ""
    ok = not failures
    ACCEPTANCE[k] = (title, ok, (detail if ok else "; ".join(failures[:3])) + timing)
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {title}")
    assert ok, failures


def _unit_x(n: int, rng) -> np.ndarray:
    x = rng.standard_normal(n)
    return x / np.linalg.norm(x)


def test_criterion_01_exact_scheme():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    failures, worst, configs = [], 0.0, 0
    for n in (4, 8, 16, 64, 256):
        for t in (2, 4, 8):
            if t > n or n % t:
                continue
            configs += 1
            p = SchemeParams(n, t)
            for _ in range(1000):
                w = random_sign(n, rng)
                x = _unit_x(n, rng)
                err = abs(exact_infer(w, x, p) - float(w.to_array(np.float64) @ x))
                worst = max(worst, err)
            if worst > 1e-9:
                failures.append(f"n={n}, t={t}: error {worst:.2e}")
    record(1, "exact scheme returns w x^T", failures, f"{configs} (n,t) pairs x 1000, max error {worst:.1e}", time.perf_counter() - start, 10)


GRID = {8: 2, 12: 4, 16: 4, 64: 8}


def test_criterion_02_error_bound():
    start = time.perf_counter()
    failures, sessions, worst_ratio = [], 0, 0.0
    for n, t in GRID.items():
        for h in range(0, n // 2 + 1):
            res = run_experiment(ExperimentConfig(n=n, t=t, h=h, trials=10_000, seed=1000 * n + h))
            sessions += res.summary["trials"]
            if res.summary["violations"]:
                failures.append(f"n={n}, t={t}, h={h}: {res.summary['violations']} violations")
            if h:
                worst_ratio = max(worst_ratio, max(r["abs_error"] / r["bound"] for r in res.rows))
    for h in range(4):
        wc = brute_worstcase_distance(GammaSpec(12, 4, h))
        if wc > error_bound(h, 12) + 1e-12:
            failures.append(f"worst case {wc} above bound at n=12, t=4, h={h}")
    record(
        2,
        "|y - w x^T| <= 2 ||x|| sqrt(h (1 - h/n))",
        failures,
        f"{sessions} sessions, max error/bound {worst_ratio:.3f}; worst case n=12 t=4 within bound",
        time.perf_counter() - start,
        60,
    )


def test_criterion_03_closest_vector():
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    shapes = [(4, 2), (8, 2), (8, 4), (12, 4), (16, 4), (32, 8), (64, 8), (64, 4)]
    worst = 0.0
    for k in range(1000):
        n, t = shapes[k % len(shapes)]
        C = SchemeParams(n, t).C
        w, u = random_sign(n, rng), random_sign(n, rng)
        worst = max(worst, float(np.abs(closest_vector(w, u, C) - brute_closest(w, u, C)).max()))
    failures = [] if worst <= 1e-9 else [f"max deviation {worst:.2e}"]
    record(3, "closed-form closest vector == least squares", failures, f"1000 instances, max deviation {worst:.1e}", time.perf_counter() - start, 10)


def test_criterion_04_distance_formula():
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    failures = []
    worst = 0.0
    shapes = [(4, 2), (12, 4), (16, 2), (32, 4), (64, 8)]
    for k in range(1000):
        n, t = shapes[k % len(shapes)]
        C = SchemeParams(n, t).C
        w, u = random_sign(n, rng), random_sign(n, rng)
        direct = float(np.linalg.norm(w.to_array(np.float64) - closest_vector(w, u, C)))
        worst = max(worst, abs(direct - approx_distance(w, u, C.partition)))
    if worst > 1e-9:
        failures.append(f"random instances: deviation {worst:.2e}")

    # exhaustive n=12, t=4: every (w, u') pair. The formula value depends on
    # w xor u' only, so tabulate it once and compare every direct norm to it.
    n, t = 12, 4
    p = BlockPartition(n, t)
    one = SignVector.ones(n)
    table = np.array([approx_distance(one, SignVector(n, d), p) for d in range(1 << n)])
    signs = np.array([SignVector(n, b).to_array(np.float64) for b in range(1 << n)])
    idx = np.arange(1 << n)
    ex_worst = 0.0
    for wb in range(1 << n):
        w = signs[wb]
        wu = w * signs  # rows: w * u' for every u'
        sums = wu.reshape(-1, t, n // t).sum(axis=2)
        wp = (t / n) * signs * np.repeat(sums, n // t, axis=1)
        direct = np.sqrt(((w - wp) ** 2).sum(axis=1))
        ex_worst = max(ex_worst, float(np.abs(direct - table[idx ^ wb]).max()))
    if ex_worst > 1e-9:
        failures.append(f"exhaustive n=12: deviation {ex_worst:.2e}")
    record(
        4,
        "distance formula == direct norm",
        failures,
        f"1000 random max {worst:.1e}; all 2^24 pairs at n=12 t=4 max {ex_worst:.1e}",
        time.perf_counter() - start,
        10,
    )


def test_criterion_05_mutual_information():
    start = time.perf_counter()
    failures = []
    mi8 = brute_mi(8, 2, 1, "lemma")
    size8 = count_gamma(GammaSpec(8, 2, 1))
    if abs(mi8.bits - 3.0) > 1e-9 or abs(mi8.bits - (8 - 2 - math.log2(size8))) > 1e-9:
        failures.append(f"brute_mi(8,2,1) = {mi8.bits}")
    if set(mi8.support_sizes.tolist()) != {4 * size8}:
        failures.append("n=8 support sizes")
    checks = []
    for fam in ("le", "lemma"):
        mi12 = brute_mi(12, 4, 2, fam)
        size = count_gamma_members(GammaSpec(12, 4, 2, fam))
        if abs(mi12.bits - (8 - math.log2(size))) > 1e-9:
            failures.append(f"brute_mi(12,4,2,{fam}) = {mi12.bits} vs {8 - math.log2(size)}")
        if not mi12.uniform or set(mi12.support_sizes.tolist()) != {16 * size}:
            failures.append(f"n=12 {fam}: support sizes {sorted(set(mi12.support_sizes.tolist()))}")
        checks.append(f"{fam}: {mi12.bits:.5f}")
    le8 = brute_mi(8, 2, 1, "le")
    if abs(le8.bits - (6 - math.log2(count_gamma_members(GammaSpec(8, 2, 1))))) > 1e-9:
        failures.append("n=8 weight<=h family")
    record(
        5,
        "I(W;Q) = n - t - log2|Gamma|",
        failures,
        f"I(8,2,1) = {mi8.bits:.6f} (weight<=h family: {le8.bits:.4f}); I(12,4,2) {', '.join(checks)}; supports 2^t |Gamma|",
        time.perf_counter() - start,
        120,
    )


def test_criterion_06_gamma_counting():
    start = time.perf_counter()
    failures, cases, disc = [], 0, []
    for n in range(2, 15):
        ts = sorted({t for t in (2, n / 3, n / 4) if float(t).is_integer() and t >= 1 and n % int(t) == 0})
        for t in map(int, ts):
            for h in range(0, n // 2 + 1):
                brute = brute_gamma(GammaSpec(n, t, h))
                lemma = count_gamma(GammaSpec(n, t, h))
                members = count_gamma_members(GammaSpec(n, t, h, "le"))
                cases += 1
                if lemma != brute.count_lemma:
                    failures.append(f"n={n}, t={t}, h={h}: formula {lemma} vs enumerated {brute.count_lemma}")
                if members != brute.count_le:
                    failures.append(f"n={n}, t={t}, h={h}: members {members} vs enumerated {brute.count_le}")
                if brute.discrepancy:
                    disc.append((n, t, h, brute.discrepancy))
    print(f"weight<=h exceeds the formula count in {len(disc)} of {cases} cases, e.g. {disc[:4]}")
    record(
        6,
        "|Gamma| formula == exhaustive enumeration",
        failures,
        f"{cases} cases; weight<=h vs formula discrepancy in {len(disc)} (all with h < n/(2t))",
        time.perf_counter() - start,
        60,
    )
    assert all(2 * h * t < n for n, t, h, _ in disc)


def _packed_syndromes(M, rows: np.ndarray) -> np.ndarray:
    s = (syndrome_array(M, rows) == -1).astype(np.int64)
    return s @ (1 << np.arange(s.shape[-1], dtype=np.int64))


def test_criterion_07_coset_lemmas():
    start = time.perf_counter()
    failures, cases = [], 0
    # distinct members of Gamma land in distinct cosets, also after a common offset r
    for n in range(2, 13):
        for t in range(1, n + 1):
            if n % t:
                continue
            M = syndrome_matrix(BlockPartition(n, t))
            all_r = np.array([SignVector(n, b).to_array() for b in range(1 << n)], dtype=np.int8)
            for h in range(0, n // 2 + 1):
                members = brute_gamma(GammaSpec(n, t, h)).members
                G = np.array([g.to_array() for g in members], dtype=np.int8)
                cases += 1
                if len(G) < 2:
                    continue
                for lo in range(0, len(all_r), 256):
                    shifted = G[:, None, :] * all_r[None, lo:lo + 256, :]
                    codes = np.sort(_packed_syndromes(M, shifted), axis=0)  # (|Gamma|, chunk)
                    if np.any(codes[1:] == codes[:-1]):
                        failures.append(f"collision at n={n}, t={t}, h={h}")
                        break

    # any shift vector of the coset gives the same decode structure
    rng = np.random.default_rng(7)
    pairs = 0
    for k in range(1000):
        n, t = [(8, 2), (12, 4), (16, 4), (64, 8)][k % 4]
        p = BlockPartition(n, t)
        C = SchemeParams(n, t).C
        u1 = random_sign(n, rng)
        v = SignVector(n, sum(m for m in p.masks if rng.random() < 0.5))
        u2 = u1 ^ v
        J = np.kron(np.eye(t, dtype=np.int64), np.ones((n // t, n // t), dtype=np.int64))
        U1 = np.diag(u1.to_array(np.int64))
        U2 = np.diag(u2.to_array(np.int64))
        if not np.array_equal(U1 @ J @ U1, U2 @ J @ U2):
            failures.append(f"matrix identity fails at n={n}")
        w = random_sign(n, rng)
        if not np.array_equal(closest_vector(w, u1, C), closest_vector(w, u2, C)):
            failures.append(f"closest vector differs at n={n}")
        pairs += 1
    record(
        7,
        "distinct cosets for Gamma; shift-vector invariance",
        failures,
        f"{cases} (n,t,h) with every offset r, n <= 12; {pairs} (u', v) pairs exact",
        time.perf_counter() - start,
        10,
    )


def test_criterion_08_lower_bound_machinery():
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    failures = []

    ratio = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 13))
        ell = int(rng.integers(1, 4))
        eps_prime = float(rng.uniform(0.5, 3.0))
        basis = SubspaceBasis(rng.standard_normal((ell, n)))
        count = brute_neighborhood(basis, eps_prime)
        mu = mu_bound(ell, n, eps_prime)
        ratio = max(ratio, count / mu)
        if count > mu:
            failures.append(f"neighbourhood {count} > mu {mu} at n={n}, ell={ell}")

    tight = 0
    for n in range(1, 7):
        for ell in (1, 2):
            if ell > n:
                continue
            basis = SubspaceBasis(rng.standard_normal((ell, n)))
            est = brute_orthants(basis, 40_000, rng)
            bound = orthant_cell_bound(n, ell)
            if est > bound:
                failures.append(f"orthants {est} > {bound} at n={n}, ell={ell}")
            if est != bound:
                failures.append(f"generic basis misses equality at n={n}, ell={ell}: {est} vs {bound}")
            tight += est == bound

    for n in range(1, 11):
        vecs = [SignVector(n, b) for b in range(1 << n)]
        arr = np.array([v.to_array(np.float64) for v in vecs])
        for a, arow in zip(vecs, arr):
            clipped = np.linalg.norm(arr - arow * np.maximum(arow * arr, 0.0), axis=1)
            formula = np.array([orthant_distance(a, v) for v in vecs])
            if np.abs(clipped - formula).max() > 1e-12:
                failures.append(f"orthant distance at n={n}")
                break
        # the scalar oracle itself, spot-checked against the vectorised form
        if abs(orthant_distance_clipped(arr[0], arr[-1]) - math.sqrt(n)) > 1e-12:
            failures.append(f"clipping oracle at n={n}")

    bad = [(m, n) for n in range(1, 65) for m in range(1, n + 1) if not binomial_sum_bound_holds(m, n)]
    if bad:
        failures.append(f"binomial sum bound fails at {bad[:3]}")

    for n in (1, 2, 5, 10, 100, 1000, 10**5):
        for eps in (0.1, 1.0, 2.5):
            r = float(np.linalg.norm(cascade_residual(eps, n)))
            hn = closew_bound_harmonic(eps, n)
            if not (r <= hn * (1 + 1e-12) and hn <= closew_bound(eps, n) * (1 + 1e-12)):
                failures.append(f"cascade at n={n}, eps={eps}: {r}, {hn}, {closew_bound(eps, n)}")
    record(
        8,
        "lower-bound machinery",
        failures,
        f"neighbourhood/mu <= {ratio:.3f} over 100 subspaces; {tight} generic cases tight; "
        "sqrt(d_H) exhaustive n <= 10; binomial bound exact n <= 64; cascade ok",
        time.perf_counter() - start,
        120,
    )


_c9 = {"cases": 0, "failures": []}


def _nontrivial_params():
    # Gamma contains a non-zero vector only when a block holds at least 3 coordinates
    return st.integers(0, 7).flatmap(
        lambda k: st.integers(3, 64).flatmap(
            lambda b: st.tuples(st.just(2**k * b), st.just(2**k), st.integers(1, 2**k * b // 2))
        )
    )


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(_nontrivial_params())
def _c9_property(nth):
    n, t, h = nth
    p = SchemeParams(n, t, h)
    _c9["cases"] += 1
    for fam in ("lemma", "le"):
        mi = mi_achieved(n, t, h, fam)
        if not mi < n - t:
            _c9["failures"].append(f"{fam} n={n}, t={t}, h={h}: {mi}")
    if p.publication_cost != n - t or p.user_privacy != t:
        _c9["failures"].append(f"cost/privacy changed at n={n}, t={t}")
    if mi_achieved(n, t, 0) != n - t:
        _c9["failures"].append(f"h=0 not at the equality point n={n}, t={t}")


def test_criterion_09_breaks_equality_point():
    start = time.perf_counter()
    _c9_property()
    # the exhaustive computation agrees with the formula on small instances
    for n, t, h in [(6, 2, 1), (9, 3, 2), (12, 4, 1), (12, 2, 3), (12, 4, 3)]:
        mi = brute_mi(n, t, h, "le").bits
        if not mi < n - t - 1e-9:
            _c9["failures"].append(f"exhaustive I(W;Q) = {mi} at n={n}, t={t}, h={h}")
    record(
        9,
        "I(W;Q) < n - t for h >= 1 at cost n - t and ell = t",
        list(_c9["failures"]),
        f"{_c9['cases']} generated (n,t,h) with n/t >= 3 plus 5 exhaustive",
        time.perf_counter() - start,
    )


def test_criterion_10_determinism(tmp_path):
    failures = []
    p = SchemeParams(64, 8, 4)
    rng = np.random.default_rng(10)
    w = random_sign(64, rng)
    x = rng.standard_normal(64)
    if run_session(p, w, x, 99).to_bytes() != run_session(p, w, x, 99).to_bytes():
        failures.append("transcripts differ")
    for fmt in ("csv", "json"):
        blobs = []
        for k in range(2):
            out = tmp_path / f"{fmt}{k}.out"
            res = run_experiment(ExperimentConfig(n=16, t=4, h=3, trials=500, seed=42, format=fmt, output_path=str(out)))
            side = out.with_name(out.name + ".summary.json")
            blobs.append(out.read_bytes() + (side.read_bytes() if side.exists() else b""))
            del res
        if blobs[0] != blobs[1]:
            failures.append(f"{fmt} output differs")
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        main(["session", "--n", "16", "--t", "4", "--h", "3", "--seed", "4", "--hex"], out=buf)
        outs.append(buf.getvalue())
    if outs[0] != outs[1]:
        failures.append("CLI session dump differs")
    record(10, "identical seeds give byte-identical outputs", failures, "transcripts, CSV, JSON and CLI session dumps")
