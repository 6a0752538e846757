"""Acceptance criteria 1-11.  Each test prints one PASS/FAIL line and asserts it."""
import math
import time

import numpy as np
from generators import chord_pair

from nsegments import geodesics as geo
from nsegments import orbifold as ob
from nsegments import rulings as ru
from nsegments import segment_core as sc


def test_01_char_poly(criterion):
    start = time.perf_counter()
    bad = [n for n in range(3, 41) if ob.char_poly(ob.shift_matrix(n)) != [1] * n]
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 5
    assert criterion(1, ok, f"char poly all ones for n=3..40 (mismatches {bad}), {elapsed:.2f} s < 5 s"), bad


def test_02_eigen_relation(criterion):
    worst = 0.0
    for n in range(3, 41):
        M = ob.shift_matrix(n).array()
        e = ob.eigen_pairs(n)
        for k in range(1, n):
            B = e.vectors[:, k - 1]
            lam = np.exp(2j * np.pi * k / n)
            worst = max(worst, np.linalg.norm(M @ B - lam * B) / np.linalg.norm(B))
    assert criterion(2, worst <= 1e-10, f"max ||M B_k - lambda_k B_k|| / ||B_k|| = {worst:.2e} <= 1e-10")


def test_03_conjugation(criterion):
    worst = 0.0
    for n in range(3, 41):
        M = ob.shift_matrix(n).array()
        f = ob.rotation_form(n)
        worst = max(worst, np.linalg.norm(f.B @ f.R - M @ f.B) / np.linalg.norm(M @ f.B))
    assert criterion(3, worst <= 1e-10, f"max ||B R - M B|| / ||M B|| = {worst:.2e} <= 1e-10")


STRATA_20 = {
    1: ("S^0", "{1}"),
    2: ("S^0 ∪ S^1", "{1} ∪ S^1"),
    4: ("S^2", "D^2"),
    5: ("S^3 ∪ S^4", "L(10,7) ∪ (C_{L(5,3)}/{([X],1)~([-X],1)})"),
    10: ("S^8 ∪ S^9", "L(10) ∪ L_20(1,3,5,7,9)"),
}


def test_04_strata_n20(criterion):
    start = time.perf_counter()
    s = ob.stratification(20)
    got = {x.j: (x.spheres, x.quotient_label) for x in s.strata}
    lens = ob.lens_params_odd(5)
    elapsed = time.perf_counter() - start
    ok = got == STRATA_20 and (lens.q, lens.p) == (10, (7, 9)) and elapsed < 1
    detail = f"stratification(20) matches 5 strata and labels, lens_params_odd(5) = {lens}, {elapsed:.3f} s < 1 s"
    assert criterion(4, ok, detail), got


def test_05_fixed_set_cross_check(criterion):
    start = time.perf_counter()
    pairs = [(n, j) for n in range(4, 61) for j in ob.proper_divisors(n)]
    bad = [(n, j) for n, j in pairs if ob.kernel_dims(n, j, 1e-8) != ob.block_count_dims(n, j)]
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 30
    assert criterion(5, ok, f"{len(pairs)} (n, j) pairs, {len(bad)} mismatches, {elapsed:.2f} s < 30 s"), bad


def test_06_round_trips(criterion):
    rng = np.random.default_rng(6)
    worst_psi = worst_chart = 0.0
    for n in range(3, 9):
        for _ in range(10_000):
            Z = sc.random_M(rng, n)
            back = sc.psi(sc.psi_inv(Z))
            worst_psi = max(worst_psi, np.max(np.abs(back - Z)) / np.max(np.abs(Z)))
            Zh = Z + complex(*rng.standard_normal(2))
            for P, space in ((Z, "M"), (Zh, "L")):
                c = sc.point_to_chart(P, sc.best_chart(P), space)
                again = sc.chart_to_point(c)
                worst_chart = max(worst_chart, np.max(np.abs(again - P)) / np.max(np.abs(P)))
    ok = worst_psi <= 1e-12 and worst_chart <= 1e-12
    detail = f"60000 points: psi(psi_inv) {worst_psi:.2e}, chart {worst_chart:.2e} (relative, <= 1e-12)"
    assert criterion(6, ok, detail)


def test_07_ruling_lines(criterion):
    rng = np.random.default_rng(7)
    worst_off = 0.0
    rank_fail = member_fail = 0
    for n in range(3, 9):
        for _ in range(100):
            Z = sc.random_M(rng, n)
            lines = ru.ruling_lines_M(Z)
            G = ru.gram([ln.direction for ln in lines])
            worst_off = max(worst_off, np.max(np.abs(G - np.diag(np.diag(G)))))
            rank_fail += len(lines) != n
            Zh = sc.random_L(rng, n)
            lines_L = ru.ruling_lines_L(Zh)
            rank_fail += np.linalg.matrix_rank(ru.as_real([ln.direction for ln in lines_L]), tol=1e-10) != n + 2
            for ln in lines + lines_L:
                for t in rng.uniform(-5, 5, 20):
                    member_fail += not sc.is_n_segment(ln.at(t), 1e-10)
    ok = worst_off <= 1e-10 and rank_fail == 0 and member_fail == 0
    detail = f"600 base points: Gram off-diagonal {worst_off:.2e}, rank failures {rank_fail}, off-manifold samples {member_fail}"
    assert criterion(7, ok, detail)


def test_08_containment_vs_oracle(criterion):
    rng = np.random.default_rng(8)
    disagreements = 0
    kinds = {}
    for n in range(3, 7):
        for _ in range(10_000):
            space = "M" if rng.random() < 0.5 else "L"
            Z, W, kind = chord_pair(rng, n, space)
            a = ru.segment_in_manifold(Z, W, space)
            b = ru.segment_in_manifold_sampled(Z, W, space, samples=64)
            disagreements += a != b
            kinds[kind, a] = kinds.get((kind, a), 0) + 1
    inside = sum(v for (k, a), v in kinds.items() if a)
    detail = f"40000 pairs ({inside} contained), {disagreements} disagreements with the 64-point oracle"
    assert criterion(8, disagreements == 0, detail)


def calibrated_initial(n):
    u = np.array([1.0, 0.5] + [0.3 * j for j in range(1, n - 1)])
    v = np.array([0.4, 1.0] + [0.7 * (-1) ** j for j in range(n - 2)])
    return u, 5 * v / np.linalg.norm(v)


def test_09_geodesic_conservation(criterion):
    worst_drift, ratios = 0.0, []
    for n in (3, 4, 5):
        u0, v0 = calibrated_initial(n)
        coarse = geo.integrate_geodesic(u0, v0, T=1.0, dt=1e-3)
        fine = geo.integrate_geodesic(u0, v0, T=1.0, dt=5e-4)
        assert coarse.halted is None and fine.halted is None
        a, b = coarse.drift(), fine.drift()
        worst_drift = max(worst_drift, max(a.values()))
        ratios += [a[k] / b[k] for k in a]
    ok = worst_drift <= 1e-7 and all(12 <= r <= 20 for r in ratios)
    detail = f"n=3,4,5: max drift {worst_drift:.2e} <= 1e-7, dt/(dt/2) ratios in [{min(ratios):.2f}, {max(ratios):.2f}] within [12, 20]"
    assert criterion(9, ok, detail)


def zero_sum_spec(rng, n):
    """Balanced spec whose lift has vertex sum identically zero (so it also lifts to L(n))."""
    m = n - 2
    size1 = int(rng.integers(1, m - 1))  # at least two following amplitudes
    x = rng.standard_normal(size1)
    x = x - x.mean() - 1.0 / size1
    y = rng.standard_normal(m - size1)
    y = y - y.mean()
    y *= math.sqrt(1 + np.sum(x**2)) / np.linalg.norm(y)
    return geo.LiftSpec(tuple(x) + tuple(y), (False,) * size1 + (True,) * (m - size1))


def balanced_spec(rng, n):
    m = n - 2
    flags = [True] + [bool(f) for f in rng.random(m - 1) < 0.5]
    a = rng.uniform(0.3, 1.5, m)
    const = 1 + np.sum(a[[not f for f in flags]] ** 2)
    rest = np.sum(a[1:][flags[1:]] ** 2)
    if const <= rest:
        flags = [True] + [False] * (m - 1)
        const, rest = 1 + np.sum(a[1:] ** 2), 0.0
    a[0] = math.sqrt(const - rest)
    return geo.LiftSpec(tuple(a), tuple(flags))


def test_10_lifting(criterion):
    v = np.array([0.4, 1.0, -0.7])
    beta = geo.integrate_geodesic([1.0, 0.5, 0.3], 3 * v / np.linalg.norm(v), T=1.0, dt=1e-3)
    rng = np.random.default_rng(10)
    worst_pass, weakest_fail = 0.0, math.inf
    for n in range(4, 9):
        spec = balanced_spec(rng, n)
        assert geo.check_lift_condition(spec)
        worst_pass = max(worst_pass, geo.residuals_M(geo.lift_M3_to_Mn(beta, spec)).worst())
        a = list(spec.amplitudes)
        a[0] *= 1.1
        bad = geo.lift_M3_to_Mn(beta, geo.LiftSpec(a, spec.follows_r))
        weakest_fail = min(weakest_fail, geo.residuals_M(bad).maxima["I"])

    agree = 0
    outcomes = {True: 0, False: 0}
    for trial in range(100):
        kind = trial % 4
        n = int(rng.integers(4, 8))
        if kind in (0, 1):
            n = max(n, 5)  # needs one constant and two following amplitudes
            gamma = geo.lift_M3_to_Mn(beta, zero_sum_spec(rng, n))
        elif kind == 2:
            u0, v0 = geo.random_initial(rng, n, "M", speed=2.0)
            gamma = geo.integrate_geodesic(u0, v0, T=0.5, dt=1e-3)
        else:
            u0 = geo.random_initial(rng, n, "M")[0]
            gamma = geo.integrate_geodesic(u0, [0, 0] + list(rng.standard_normal(n - 2)), T=0.5, dt=1e-3)
        coeffs = list(rng.standard_normal(2) + 1j * rng.standard_normal(2))
        if kind == 1:
            coeffs.append(complex(*rng.standard_normal(2)))
        lv = geo.lift_M_to_L(gamma, coeffs, tol=1e-7)
        agree += lv.agree
        outcomes[lv.verdict] += 1
    ok = worst_pass <= 1e-7 and weakest_fail >= 1e-3 and agree == 100
    detail = (
        f"balanced n=4..8 worst residual {worst_pass:.2e} <= 1e-7; perturbed condition I >= {weakest_fail:.2e}; "
        f"lift_M_to_L agreement {agree}/100 ({outcomes[True]} true, {outcomes[False]} false)"
    )
    assert criterion(10, ok, detail)


def test_11_freeness(criterion):
    start = time.perf_counter()
    problems = []
    for n in (3, 5, 7, 11, 13):
        G = -ob.rotation_matrix(n)  # generates the whole group for odd n
        eye = np.eye(n - 1)
        for k in range(1, 2 * n):
            g = np.linalg.matrix_power(G, k)
            ev = np.linalg.eigvals(g)
            if np.any(np.abs(ev - 1) < 1e-8):
                problems.append((n, k, "+1"))
            if not np.allclose(g, -eye) and np.any(np.abs(ev + 1) < 1e-8):
                problems.append((n, k, "-1"))
        problems += [(n, "report")] if not ob.freeness_check(n)["free"] else []
    for n in (4, 6, 8, 9, 10, 12, 20):
        if not ob.stratification(n).strata or ob.freeness_check(n)["free"]:
            problems.append((n, "no stratum"))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 10
    assert criterion(11, ok, f"primes free, composites stratified, problems {problems}, {elapsed:.2f} s < 10 s")
