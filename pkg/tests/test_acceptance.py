"""Acceptance gate: twelve numbered end-to-end criteria.

Each criterion prints exactly one PASS/FAIL line (bypassing pytest capture)
and then asserts. Criteria 5 and 10 contain sub-checks that are expected to
fail at any desk-scale parameters: the recursion's validity depth at
nondeterministic points where the target touches 0/1 is bounded by the
acceptance-window geometry, independent of the per-level sample size. For
those, the test additionally verifies the sampler against its *own* exact
level-capped oracle (which passes), so the recorded failure is a property of
the construction at feasible parameters, not an implementation bug.
"""
from __future__ import annotations

import math
import random
import sys
import time
from fractions import Fraction

from coinfactory import (
    AffineCubeDomain,
    BoundarySampford,
    BudgetedCoins,
    CoinBank,
    CombinatorialFactory,
    FactoryRecursion,
    LevelSchedule,
    PolytopeP,
    TargetFunction,
    all_subsets,
    check_1d,
    check_poly_bounded,
    classic_sampford,
    exact_eval,
    facet_separation_check,
    free_triangle,
    full_cube_domain,
    k_subset_domain,
    naive_sampford,
    polytope_separation_check,
    resample_domination_check,
    run_trials,
    subset_prob_closed,
    within_3sigma,
)
from coinfactory.combinators import _walk_tree
from coinfactory.sampford import bound_certificate
from conftest import p_squared_one_minus_p_tree, random_domain_point, random_point

F = Fraction
TRIALS = 100_000


def announce(num: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {num:2d}: {'PASS' if ok else 'FAIL'} — {detail}"
    from conftest import ACCEPTANCE_LINES

    ACCEPTANCE_LINES.append(line)
    print(line)  # also live with pytest -s
    assert ok, line


def freq_sigma(q: float, n: int) -> float:
    return math.sqrt(max(q * (1 - q), 1e-12) / n)


# -- 1: the introductory three-flip tree -----------------------------------------


def test_criterion_01_intro_tree():
    t0 = time.time()
    tree = p_squared_one_minus_p_tree()
    rng = random.Random(101)
    exact_ok = all(
        exact_eval(tree, p) == p[0] ** 2 - p[0] ** 3
        for p in (random_point(rng, 1) for _ in range(20))
    )
    rep = run_trials(
        lambda coins: _walk_tree(tree, coins), ["1/2"], TRIALS, seed=1,
        oracle={1: F(1, 8), 0: F(7, 8)}, sampler_id="intro-tree",
    )
    mc_ok = within_3sigma(rep, 1, F(1, 8))
    dt = time.time() - t0
    announce(
        1, exact_ok and mc_ok and dt < 5,
        f"exact at 20 rational points; freq {rep.frequency(1):.5f} vs 1/8, {dt:.1f}s",
    )


# -- 2: partial-sum sandwich, exact ------------------------------------------------


def test_criterion_02_partial_sum_sandwich():
    target = TargetFunction(1, lambda p: (1 + 2 * p[0]) / 4, "affine14")
    eng = FactoryRecursion(target, LevelSchedule(t_const=64))
    bad = 0
    for i in range(17):
        p = (F(i, 16),)
        f = target(p)
        for k in range(1, 7):
            s = eng.partial_sum(k, p)
            if not (0 <= f - s <= F(3, 4) ** k):
                bad += 1
    announce(2, bad == 0, f"17 grid points x k=1..6, exact sandwich, {bad} violations")


# -- 3: general factory incl. boundary p -------------------------------------------


def test_criterion_03_general_factory():
    target = TargetFunction(1, lambda p: (1 + 2 * p[0]) / 4, "affine14")
    eng = FactoryRecursion(target, LevelSchedule(t_const=64, level_cap=28))
    prog = eng.factory_program()
    details = []
    ok = True
    for p_str in ("0", "1/4", "1/2", "1"):
        p = F(p_str)
        fp = target((p,))
        rep = run_trials(
            prog.sample, [p_str], TRIALS, seed=3,
            oracle={1: fp, 0: 1 - fp}, sampler_id=f"general@{p_str}",
        )
        good = within_3sigma(rep, 1, fp)
        ok = ok and good
        details.append(f"p={p_str}:{rep.frequency(1):.5f}/{float(fp):.5f}")
    announce(3, ok, "freq/target " + " ".join(details) + " (3-sigma, cap 28)")


# -- 4: resampling domination, exhaustive -------------------------------------------


def test_criterion_04_resampling_domination():
    rng = random.Random(404)
    eps, t = F(2, 5), 12
    cases = [
        ("2-of-1-subset", k_subset_domain(2, 1), (F(2, 5), F(3, 5))),
        (
            "birkhoff-2x2",
            AffineCubeDomain(4, [(1, 1, 0, 0), (0, 0, 1, 1), (1, 0, 1, 0)], [1, 1, 1]),
            (F(1, 3), F(2, 3), F(2, 3), F(1, 3)),
        ),
    ]
    violations = 0
    for name, dom, p in cases:
        n = dom.n
        for _ in range(50):
            a = [rng.randint(-3, 3) for _ in range(n)]
            c = F(rng.randint(-2 * n, 2 * n), 2)
            event = lambda z, a=a, c=c: sum(ai * zi for ai, zi in zip(a, z)) >= c
            rep = resample_domination_check(dom, p, t, eps, event)
            violations += not rep.holds
    announce(4, violations == 0, f"2 domains x 50 half-space events, {violations} violations")


# -- 5: the ratio target on a segment, boundary termination included -----------------


def test_criterion_05_ratio_subdomain():
    K = AffineCubeDomain(2, [(1, 1)], [F(1, 2)])
    target = TargetFunction(2, lambda p: p[0] / (p[0] + p[1]), "ratio")
    cap = 3
    eng = FactoryRecursion(
        target, LevelSchedule(t_const=96, max_level=3, level_cap=cap),
        domain=K, eps=F(1, 8),
    )
    prog = eng.factory_program()
    norm = 1 - F(3, 4) ** cap
    ok = True
    details = []
    for pt in ((F(3, 10), F(1, 10)), (F(1, 2), F(0)), (F(0), F(1, 2))):
        fp = target(pt)
        own = eng.partial_sum(cap, pt) / norm  # exact capped conditional oracle
        rep = run_trials(
            prog.sample, pt, TRIALS, seed=5,
            oracle={1: fp, 0: 1 - fp}, sampler_id=f"ratio@{pt}",
        )
        freq = rep.frequency(1)
        # The implementation must match its own capped oracle ...
        sig = freq_sigma(float(own), rep.completed)
        assert abs(freq - float(own)) <= 3 * sig + 1e-12, (pt, freq, float(own))
        # ... and the criterion asks for the true target:
        good = within_3sigma(rep, 1, fp)
        ok = ok and good
        details.append(
            f"p={tuple(map(str, pt))}:{freq:.4f} target {float(fp):.4f} capped-oracle {float(own):.4f}"
        )
    announce(
        5, ok,
        "; ".join(details)
        + " — interior point exceeds 3-sigma: the deepest level whose residuals stay in"
        " [0,1] is 3 at any feasible (eps, t); sampler verified against its exact capped oracle",
    )


# -- 6: boundary-terminating subset sampling headline --------------------------------


def test_criterion_06_sampford_boundary():
    p = [1, 1, 0]
    classic = run_trials(
        lambda coins: classic_sampford(coins, 3, 2), p, 1000, seed=6, budget=10_000,
        sampler_id="classic@vertex",
    )
    bs = BoundarySampford(3, 2, LevelSchedule(t_const=8, max_level=3), F(1, 2))
    boundary = run_trials(bs.sample, p, 1000, seed=7, sampler_id="boundary@vertex")
    ok = (
        classic.exhausted == 1000
        and boundary.exhausted == 0
        and boundary.aborted == 0
        and boundary.counts.get(frozenset({1, 2}), 0) == 1000
    )
    announce(
        6, ok,
        f"classic exhausted {classic.exhausted}/1000 at 10^4 flips; boundary returned "
        f"{{1,2}} {boundary.counts.get(frozenset({1, 2}), 0)}/1000 "
        f"(flips p50={boundary.flips_p50}, max={boundary.flips_max})",
    )


# -- 7: subset-probability identities, exact ------------------------------------------


def test_criterion_07_subset_identities():
    rng = random.Random(707)
    bad = 0
    for n, k in ((3, 2), (4, 2), (5, 3)):
        verts = [
            tuple(F(1) if i in U else F(0) for i in range(1, n + 1))
            for U in all_subsets(n, k)
        ]
        subsets = all_subsets(n, k)
        for _ in range(50):
            p = random_domain_point(rng, verts)
            probs = {U: subset_prob_closed(p, U) for U in subsets}
            if sum(probs.values()) != 1:
                bad += 1
            for i in range(1, n + 1):
                if sum(probs[U] for U in subsets if i in U) != p[i - 1]:
                    bad += 1
    announce(7, bad == 0, f"(3,2),(4,2),(5,3) x 50 random rational p, exact, {bad} violations")


# -- 8: face-polynomial domination certificate ----------------------------------------


def test_criterion_08_face_bound_certificate():
    bad = []
    for n, k in ((3, 2), (4, 2)):
        K = k_subset_domain(n, k)
        cert = bound_certificate(n, k)
        for U in all_subsets(n, k):
            reports = check_poly_bounded(
                lambda p, U=U: subset_prob_closed(p, U), n, cert, 8, domain=K
            )
            for r in reports:
                if not r.passed:
                    bad.append((n, k, sorted(U), r.face.label()))
    announce(8, not bad, f"(3,2),(4,2), all subset targets, mesh 1/8; failures: {bad}")


# -- 9: polytope mixture identities + separation witness --------------------------------


def POLYTOPES():
    return [
        ("triangle-3-2", k_subset_domain(3, 2)),
        (
            "birkhoff-2x2",
            AffineCubeDomain(4, [(1, 1, 0, 0), (0, 0, 1, 1), (1, 0, 1, 0)], [1, 1, 1]),
        ),
        ("cube-3", full_cube_domain(3)),
    ]


def test_criterion_09_mixture_identities_and_separation():
    rng = random.Random(909)
    bad = 0
    for name, dom in POLYTOPES():
        P = PolytopeP(dom)
        for _ in range(50):
            p = random_domain_point(rng, P.vertices, max_den=20)
            f = P.mixture(p)
            if sum(f.values()) != 1 or any(c < 0 for c in f.values()):
                bad += 1
            for i in range(P.n):
                if sum(c * v[i] for v, c in f.items()) != p[i]:
                    bad += 1
        if not polytope_separation_check(P).holds:
            bad += 1
    verts, facets = free_triangle()
    planted = facet_separation_check(verts, facets)
    planted_ok = (not planted.holds) and any(
        v == (F(0), F(0)) for v, _ in planted.counterexamples
    )
    announce(
        9, bad == 0 and planted_ok,
        f"3 polytopes x 50 points exact, separation witness holds; "
        f"planted free-triangle correctly fails at vertex (0,0)",
    )


# -- 10: combinatorial factory frequencies and means -------------------------------------


def test_criterion_10_combinatorial_factory():
    # Deepest level whose residuals stay in [0,1] at eps=1/2, t=8, measured by
    # exhaustive table construction: triangle dies at 4, Birkhoff 2x2 at 24,
    # the 3-cube at 10. Caps sit one below.
    cases = [
        ("triangle-3-2", k_subset_domain(3, 2), 3,
         [(F(3, 4), F(3, 4), F(1, 2)), (F(1, 2), F(3, 4), F(3, 4)), (F(2, 3), F(2, 3), F(2, 3))]),
        ("birkhoff-2x2",
         AffineCubeDomain(4, [(1, 1, 0, 0), (0, 0, 1, 1), (1, 0, 1, 0)], [1, 1, 1]), 23,
         [(F(1, 4), F(3, 4), F(3, 4), F(1, 4)), (F(1, 2),) * 4, (F(5, 8), F(3, 8), F(3, 8), F(5, 8))]),
        ("cube-3", full_cube_domain(3), 9,
         [(F(1, 4), F(1, 2), F(3, 4)), (F(1, 3), F(2, 3), F(1, 2)), (F(1, 2),) * 3]),
    ]
    ok = True
    lines = []
    for name, dom, cap, interior in cases:
        P = PolytopeP(dom)
        sched = LevelSchedule(t_const=8, max_level=min(3, cap), level_cap=cap)
        fac = CombinatorialFactory(P, sched, F(1, 2))
        points = list(interior) + [P.vertices[0], P.vertices[-1]]
        worst = 0.0
        for pt in points:
            mix = P.mixture(pt)
            rep = run_trials(
                fac.sample, pt, TRIALS, seed=10, oracle=mix,
                sampler_id=f"{name}@{pt}",
            )
            n_done = rep.completed
            # Own-oracle check: capped race frequency is partial_U / sum partials
            # (the per-round abort probability cancels).
            partials = {
                v: eng.partial_sum(cap, pt) for v, eng in zip(P.vertices, fac.engines)
            }
            total = sum(partials.values())
            point_ok = True
            for v in P.vertices:
                own = partials[v] / total
                fr = rep.frequency(v)
                assert abs(fr - float(own)) <= 3 * freq_sigma(float(own), n_done) + 1e-12, (
                    name, pt, v, fr, float(own),
                )
                good = within_3sigma(rep, v, mix[v])
                dev = abs(fr - float(mix[v])) / max(freq_sigma(float(mix[v]), n_done), 1e-12)
                worst = max(worst, dev)
                point_ok = point_ok and good
            # Mean vector within 3 sigma componentwise.
            for i in range(P.n):
                mean_i = sum(rep.counts.get(v, 0) * float(v[i]) for v in P.vertices) / n_done
                var_i = float(
                    sum(mix[v] * v[i] * v[i] for v in P.vertices) - pt[i] ** 2
                )
                sig = math.sqrt(max(var_i, 1e-12) / n_done)
                point_ok = point_ok and abs(mean_i - float(pt[i])) <= 3 * sig
            ok = ok and point_ok
        lines.append(f"{name}(cap {cap}): worst dev {worst:.1f} sigma")
    announce(
        10, ok,
        "; ".join(lines)
        + " — triangle and cube interior points exceed 3-sigma (validity depth is"
        " window-limited at any feasible parameters); samplers verified against their"
        " exact capped race oracles; all vertex points exact",
    )


# -- 11: the harness rejects the planted-wrong sampler -------------------------------------


def test_criterion_11_naive_sampler_rejected():
    p = ["9/10", "9/10", "1/5"]
    oracle = {
        U: subset_prob_closed(tuple(F(x) for x in p), U) for U in all_subsets(3, 2)
    }
    rep = run_trials(
        lambda coins: naive_sampford(coins, 3, 2), p, TRIALS, seed=11,
        oracle=oracle, alpha=0.001, sampler_id="naive",
    )
    rejected = rep.chi2 is not None and not rep.chi2.passed
    announce(
        11, rejected,
        f"chi2={rep.chi2.statistic:.1f} (dof {rep.chi2.dof}), p={rep.chi2.p_value:.3g} < 0.001",
    )


# -- 12: scalar-bound reduction -----------------------------------------------------------


def test_criterion_12_scalar_reduction():
    tree = p_squared_one_minus_p_tree()
    cases = [
        ("p^2(1-p)", lambda p: exact_eval(tree, p), F(1), 2),
        ("p", lambda p: p[0], F(1), 1),
        ("1-p", lambda p: 1 - p[0], F(1), 1),
        ("p(1-p)", lambda p: p[0] * (1 - p[0]), F(1), 1),
        ("const 1/2", lambda p: F(1, 2), F(1, 2), 0),
    ]
    bad = []
    from coinfactory import BoundCertificate

    for name, f, c, m in cases:
        face_reports = check_poly_bounded(f, 1, BoundCertificate(c, m), 16)
        if not all(r.passed for r in face_reports):
            bad.append((name, "face-check"))
            continue
        m_prime = math.ceil(math.log2(float(1 / c))) + 2 * m
        if not check_1d(f, m_prime, 16).passed:
            bad.append((name, f"scalar m'={m_prime}"))
    announce(12, not bad, f"5 functions, m' = ceil(log2(1/c)) + 2m; failures: {bad}")
