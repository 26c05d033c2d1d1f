"""End-to-end acceptance suite.

One test per shipped guarantee, in dependency order: the two
approximation sweeps come first and stash every cut they saw, then the
cut audit replays those cuts against full enumeration.  All arithmetic
is exact; no tolerance anywhere.
"""

import json
import random
import time
from fractions import Fraction

from colorful_kcenter import lp, solver
from colorful_kcenter.cli import main as cli_main
from colorful_kcenter.dp import DpProgram, dp_solve
from colorful_kcenter.fair import epsilon_gap, solve_fair, weighted_coverage
from colorful_kcenter.generators import (
    fixture_adversarial,
    gen_clumps,
    gen_from_setcover,
    gen_from_vc3,
    gen_random,
    gen_random_graph,
    gen_random_setcover,
)
from colorful_kcenter.model import check_feasible, union_ball
from colorful_kcenter.oracle import (
    brute_force_colorful,
    brute_force_fair,
    enumerate_feasible,
)
from colorful_kcenter.rounding import sparse_round as real_sparse_round
from colorful_kcenter.solver import build_relaxation, solve_colorful, solve_fixed_radius

# cuts observed by the approximation sweeps, audited later:
# (instance, probe radius, cut) and (fair instance, separation, cut)
COLORFUL_CUTS = []
FAIR_CUTS = []
# every rounding call observed during the colorful sweep:
# (within budget, demands covered at four times the probe radius)
ROUNDING_FIRINGS = []


def _colorful_pool():
    """The colorful sweep: 200 seeded random instances on both metrics
    plus the clump family that forces the cutting plane."""
    rng = random.Random(90)
    pool = []
    for trial in range(200):
        n = rng.randint(4, 14)
        k = rng.randint(1, min(4, n))
        gamma = rng.randint(1, 3)
        metric = "line" if trial % 2 == 0 else "grid-l1"
        density = Fraction(1) if trial % 3 == 0 else Fraction(1, 2)
        pool.append(
            gen_random(
                seed=20_000 + trial,
                n=n,
                k=k,
                gamma=gamma,
                metric=metric,
                demand_density=density,
            )
        )
    for k in range(2, 5):
        for gamma in range(2, min(k, 3) + 1):
            pool.append(gen_clumps(k, gamma))
    return pool


def test_colorful_radius_within_four_times_optimum():
    start = time.monotonic()
    observed = ROUNDING_FIRINGS

    def spy(inst, r, part, system, k, pt):
        chosen = real_sparse_round(inst, r, part, system, k, pt)
        report = check_feasible(inst, chosen, 4 * Fraction(r))
        observed.append((len(set(chosen)) <= inst.k, report.feasible))
        return chosen

    pool = _colorful_pool()
    solver.sparse_round = spy
    try:
        for inst in pool:
            opt = brute_force_colorful(inst)
            sol = solve_colorful(inst)
            assert check_feasible(inst, sol.centers.centers, sol.centers.radius).feasible
            assert sol.centers.radius <= 4 * opt.radius
            for rec in sol.trace.records:
                for cut in rec.cuts:
                    COLORFUL_CUTS.append((inst, rec.radius, cut))
    finally:
        solver.sparse_round = real_sparse_round
    assert len(pool) >= 200
    assert time.monotonic() - start < 300


def test_fair_radius_and_exact_coverage():
    start = time.monotonic()
    rng = random.Random(92)
    count = 0
    for trial in range(50):
        n = rng.randint(3, 10)
        k = rng.randint(1, min(3, n))
        gamma = rng.randint(1, 2)
        finst = gen_random(
            seed=21_000 + trial,
            n=n,
            k=k,
            gamma=gamma,
            metric="line" if trial % 2 == 0 else "grid-l1",
            p_density=Fraction(2, 3),
        )
        opt = brute_force_fair(finst)
        sol = solve_fair(finst)
        dist = sol.distribution
        assert dist.radius <= 4 * opt.radius
        weights = [w for _, w in dist.support]
        assert sum(weights) == 1 and all(w > 0 for w in weights)
        for centers, _ in dist.support:
            assert check_feasible(finst.base, centers, dist.radius).feasible
        for u in range(finst.n):
            got = sum(
                (w for centers, w in dist.support
                 if any(finst.base.dist[u][c] <= dist.radius for c in centers)),
                Fraction(0),
            )
            assert got >= finst.p[u]
        for rec in sol.trace.records:
            for sep in rec.separations:
                for cut in sep.cuts:
                    FAIR_CUTS.append((finst, sep, cut))
        count += 1
    assert count >= 50
    assert time.monotonic() - start < 600


def test_every_emitted_cut_survives_enumeration():
    if not COLORFUL_CUTS:
        # standalone run: regenerate the cut-forcing family
        for k in range(2, 5):
            for gamma in range(2, min(k, 3) + 1):
                inst = gen_clumps(k, gamma)
                sol = solve_colorful(inst)
                for rec in sol.trace.records:
                    for cut in rec.cuts:
                        COLORFUL_CUTS.append((inst, rec.radius, cut))
    assert COLORFUL_CUTS
    for inst, r, cut in COLORFUL_CUTS:
        fence = union_ball(inst, cut.centers, r)
        for centers in enumerate_feasible(inst, r):
            assert len(centers & fence) <= cut.bound
    for finst, sep, cut in FAIR_CUTS:
        goal = sep.mu + sep.eps
        fence = union_ball(finst.base, cut.centers, sep.radius)
        for centers in enumerate_feasible(finst.base, sep.radius):
            if weighted_coverage(finst.base, sep.alpha, centers, sep.radius) < goal:
                continue
            assert len(centers & fence) <= cut.bound


def _min_vertex_cover(g):
    import itertools

    for size in range(g.n + 1):
        for combo in itertools.combinations(range(g.n), size):
            s = set(combo)
            if all(u in s or v in s for u, v in g.edges):
                return size
    raise AssertionError("unreachable")


def _min_set_cover(sc):
    import itertools

    full = set(range(sc.universe))
    for size in range(len(sc.sets) + 1):
        for combo in itertools.combinations(range(len(sc.sets)), size):
            got = set().union(*(sc.sets[i] for i in combo)) if combo else set()
            if got >= full:
                return size
    raise AssertionError("generator restocks every element")


def test_cover_reductions_decide_radius_zero():
    sampled = 0
    for trial in range(500):
        n = 1 + trial % 8
        g = gen_random_graph(seed=22_000 + trial, n=n)
        sampled += 1
        vc = _min_vertex_cover(g)
        budgets = {t for t in (1, vc - 1, vc, vc + 1, n) if 1 <= t <= n}
        for t in sorted(budgets):
            inst = gen_from_vc3(g, t)
            res = solve_fixed_radius(inst, 0)
            assert (res.status == "solved") == (t >= vc)
            if res.status == "solved":
                assert check_feasible(inst, res.centers.centers, 0).feasible
    assert sampled >= 500

    rng = random.Random(94)
    for trial in range(120):
        universe = rng.randint(0, 7)
        num_sets = rng.randint(1, 6)
        sc = gen_random_setcover(seed=23_000 + trial, universe=universe, num_sets=num_sets)
        best = _min_set_cover(sc)
        budgets = {
            t for t in (1, best - 1, best, best + 1, num_sets) if 1 <= t <= num_sets
        }
        for t in sorted(budgets):
            inst = gen_from_setcover(sc, t)
            res = solve_fixed_radius(inst, 0)
            assert (res.status == "solved") == (t >= best)


def test_dp_agrees_with_exhaustive_enumeration():
    rng = random.Random(96)
    infeasible_seen = feasible_seen = 0
    for _ in range(1000):
        q = rng.randint(1, 12)
        t = rng.randint(0, 3)
        bound = rng.randint(0, 6)
        rows = tuple(
            tuple(rng.randint(0, bound) for _ in range(q)) for _ in range(t)
        )
        demands = tuple(rng.randint(0, bound) for _ in range(t))
        weights = tuple(Fraction(rng.randint(0, 6), rng.randint(1, 3)) for _ in range(q))
        capacity = rng.randint(0, q)
        prog = DpProgram(weights=weights, rows=rows, demands=demands, capacity=capacity)

        # exhaustive pass over all subsets via shared-prefix sums
        size = [0] * (1 << q)
        val = [Fraction(0)] * (1 << q)
        sums = [(0,) * t] * (1 << q)
        best = None
        if all(d <= 0 for d in demands):
            best = Fraction(0)
        for mask in range(1, 1 << q):
            low = mask & -mask
            i = low.bit_length() - 1
            prev = mask ^ low
            size[mask] = size[prev] + 1
            val[mask] = val[prev] + weights[i]
            sums[mask] = tuple(s + row[i] for s, row in zip(sums[prev], rows))
            if size[mask] <= capacity and all(
                s >= d for s, d in zip(sums[mask], demands)
            ):
                if best is None or val[mask] > best:
                    best = val[mask]

        got = dp_solve(prog)
        if best is None:
            infeasible_seen += 1
            assert got is None
        else:
            feasible_seen += 1
            assert got is not None and got.value == best
    assert infeasible_seen > 50 and feasible_seen > 500


def test_rounding_stays_sparse_and_feasible():
    # every rounding call observed by the colorful sweep kept the budget
    # and covered all demands
    assert ROUNDING_FIRINGS
    assert all(budget and covered for budget, covered in ROUNDING_FIRINGS)

    # extreme points of box-constrained covering programs have at most
    # one fractional coordinate per constraint row
    rng = random.Random(98)
    solved = 0
    for _ in range(500):
        q = rng.randint(1, 8)
        t = rng.randint(0, 4)
        program = lp.LinearProgram(
            q,
            tuple(Fraction(1) for _ in range(q)),
            lp.MIN,
            tuple(Fraction(0) for _ in range(q)),
            tuple(Fraction(1) for _ in range(q)),
        )
        for _ in range(t):
            row = tuple(Fraction(rng.randint(0, 4)) for _ in range(q))
            rhs = Fraction(rng.randint(0, int(sum(row))) if sum(row) > 0 else 0)
            program.add(row, lp.GE, rhs)
        out = lp.solve(program)
        assert out.status == "optimal"
        assert lp.check_point(program, out.solution) is None
        fractional = sum(1 for z in out.solution if 0 < z < 1)
        assert fractional <= t
        solved += 1
    assert solved == 500


def test_two_cluster_fixture_regression():
    fx = fixture_adversarial()
    inst = fx.instance
    assert brute_force_colorful(inst).radius == 1
    program = build_relaxation(inst, 1)
    assert lp.check_point(program, fx.x + fx.y) is None
    sol = solve_colorful(inst)
    assert sol.centers.radius <= 4
    assert check_feasible(inst, sol.centers.centers, sol.centers.radius).feasible


def test_strict_threshold_margin_is_exact():
    rng = random.Random(100)
    for _ in range(1000):
        n = rng.randint(1, 8)
        alpha = tuple(
            Fraction(rng.randint(0, 50), rng.randint(1, 50)) for _ in range(n)
        )
        mu = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        eps = epsilon_gap(alpha, mu)
        assert eps > 0
        sums = [Fraction(0)] * (1 << n)
        for mask in range(1, 1 << n):
            low = mask & -mask
            sums[mask] = sums[mask ^ low] + alpha[low.bit_length() - 1]
        for v in sums:
            assert (v > mu) == (v >= mu + eps)


def test_identical_runs_produce_identical_bytes(tmp_path):
    inst = tmp_path / "inst.json"
    assert cli_main([
        "gen", "random", "--seed", "31", "--n", "10", "--k", "3", "--gamma", "2",
        "--demand-density", "1", "--out", str(inst),
    ]) == 0
    inst2 = tmp_path / "inst2.json"
    assert cli_main([
        "gen", "random", "--seed", "31", "--n", "10", "--k", "3", "--gamma", "2",
        "--demand-density", "1", "--out", str(inst2),
    ]) == 0
    assert inst.read_bytes() == inst2.read_bytes()

    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli_main(["solve", "--instance", str(inst), "--out", str(a)]) == 0
    assert cli_main(["solve", "--instance", str(inst), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    json.loads(a.read_text())

    fair = tmp_path / "fair.json"
    assert cli_main([
        "gen", "random", "--seed", "33", "--n", "7", "--k", "2", "--gamma", "1",
        "--p-density", "1/2", "--out", str(fair),
    ]) == 0
    fa, fb = tmp_path / "fa.json", tmp_path / "fb.json"
    argv = ["solve-fair", "--instance", str(fair), "--samples", "6", "--seed", "5"]
    assert cli_main(argv + ["--out", str(fa)]) == 0
    assert cli_main(argv + ["--out", str(fb)]) == 0
    assert fa.read_bytes() == fb.read_bytes()
