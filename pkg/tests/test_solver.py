"""Round-or-cut solver: relaxation shape, fixed-radius probes, end-to-end
approximation ratio, cut validity, and the exact enumeration branch."""

import random
from fractions import Fraction

import pytest

from colorful_kcenter import lp
from colorful_kcenter.generators import fixture_adversarial, gen_clumps, gen_random
from colorful_kcenter.model import (
    Instance,
    candidate_radii,
    check_feasible,
    union_ball,
)
from colorful_kcenter.oracle import brute_force_colorful, enumerate_feasible
from colorful_kcenter.solver import (
    Cut,
    RadiusRecord,
    build_relaxation,
    pseudo_approx_baseline,
    solve_colorful,
    solve_fixed_radius,
)


def test_relaxation_shape():
    fx = fixture_adversarial()
    inst = fx.instance
    n = inst.n
    cut = Cut(frozenset({0}), 1)
    prog = build_relaxation(inst, 1, cuts=(cut,), extra_row=((Fraction(1),) * n, 2))
    assert prog.num_vars == 2 * n
    # budget + per-point coverage + per-color demand + extra + cut
    assert len(prog.constraints) == 1 + n + inst.num_colors + 1 + 1
    assert prog.lower == tuple(Fraction(0) for _ in range(2 * n))
    assert prog.upper == tuple(Fraction(1) for _ in range(2 * n))
    assert prog.objective[:n] == tuple(Fraction(1) for _ in range(n))
    assert prog.objective[n:] == tuple(Fraction(0) for _ in range(n))
    # the cut row fences opening mass near its centers
    last = prog.constraints[-1]
    assert last.rel == lp.LE and last.rhs == 1
    assert all(coef == 0 for coef in last.coeffs[:n])


def test_fixture_fixed_radius():
    fx = fixture_adversarial()
    inst = fx.instance
    res = solve_fixed_radius(inst, fx.optimal_radius)
    assert res.status == "solved"
    report = check_feasible(inst, res.centers.centers, res.centers.radius)
    assert report.feasible
    assert res.centers.radius <= 4 * fx.optimal_radius

    res0 = solve_fixed_radius(inst, 0)
    assert res0.status == "infeasible"
    prog = build_relaxation(inst, 0)
    assert lp.verify_certificate(prog, res0.certificate)


def test_solve_within_four_times_optimum():
    rng = random.Random(12)
    ratios = []
    for trial in range(120):
        n = rng.randint(3, 10)
        k = rng.randint(1, 3)
        gamma = rng.randint(1, 3)
        metric = rng.choice(["line", "grid-l1"])
        inst = gen_random(seed=1000 + trial, n=n, k=k, gamma=gamma, metric=metric)
        opt = brute_force_colorful(inst)
        sol = solve_colorful(inst)
        report = check_feasible(inst, sol.centers.centers, sol.centers.radius)
        assert report.feasible
        assert sol.centers.radius <= 4 * opt.radius
        if sol.optimal:
            assert sol.centers.radius == opt.radius
        if opt.radius > 0:
            ratios.append(sol.centers.radius / opt.radius)
    assert ratios and max(ratios) <= 4


def test_enumeration_branch_is_exact():
    rng = random.Random(14)
    hits = 0
    for trial in range(60):
        n = rng.randint(3, 9)
        k = rng.randint(1, 2)
        gamma = rng.randint(k, 3)
        inst = gen_random(seed=2000 + trial, n=n, k=k, gamma=gamma)
        assert inst.num_colors >= inst.k
        opt = brute_force_colorful(inst)
        sol = solve_colorful(inst)
        assert sol.optimal
        assert sol.centers.radius == opt.radius
        assert check_feasible(inst, sol.centers.centers, sol.centers.radius).feasible
        hits += 1
    assert hits == 60


def test_linear_scan_never_settles_higher():
    rng = random.Random(16)
    for trial in range(40):
        n = rng.randint(4, 9)
        k = rng.randint(2, 3)
        gamma = rng.randint(1, min(2, k - 1)) if k > 1 else 1
        inst = gen_random(seed=3000 + trial, n=n, k=k, gamma=gamma)
        opt = brute_force_colorful(inst)
        scan = solve_colorful(inst, linear_scan=True)
        bis = solve_colorful(inst)
        # the scan takes the first workable radius, so it cannot sit
        # above the binary search, and neither may pass the optimum
        assert scan.probe_radius <= bis.probe_radius <= opt.radius
        for sol in (scan, bis):
            assert check_feasible(inst, sol.centers.centers, sol.centers.radius).feasible
            assert sol.centers.radius <= 4 * opt.radius


def cut_is_valid(inst, cut, r):
    """No feasible radius-r center set opens more than the bound inside
    the fenced region."""
    fence = union_ball(inst, cut.centers, r)
    for centers in enumerate_feasible(inst, r):
        if len(centers & fence) > cut.bound:
            return False
    return True


def test_clump_family_fires_valid_cuts():
    fired = 0
    for k in range(2, 5):
        for gamma in range(2, k + 1):
            inst = gen_clumps(k, gamma)
            sol = solve_colorful(inst)
            assert check_feasible(inst, sol.centers.centers, sol.centers.radius).feasible
            for rec in sol.trace.records:
                for cut in rec.cuts:
                    fired += 1
                    assert cut.bound == inst.k - inst.num_colors + 1
                    assert cut_is_valid(inst, cut, rec.radius)
    assert fired >= 3


def test_clump_end_to_end_ratio():
    inst = gen_clumps(3, 2)
    opt = brute_force_colorful(inst)
    sol = solve_colorful(inst)
    assert sol.centers.radius <= 4 * opt.radius


def test_never_infeasible_when_solution_exists():
    rng = random.Random(18)
    checked = 0
    for trial in range(30):
        n = rng.randint(3, 7)
        k = rng.randint(1, 3)
        gamma = rng.randint(1, 2)
        inst = gen_random(seed=4000 + trial, n=n, k=k, gamma=gamma)
        for r in candidate_radii(inst):
            exists = bool(enumerate_feasible(inst, r))
            res = solve_fixed_radius(inst, r)
            if exists:
                assert res.status == "solved"
                checked += 1
            elif res.status == "infeasible":
                prog = build_relaxation(inst, r)
                assert lp.verify_certificate(prog, res.certificate)
    assert checked > 50


def test_trace_bookkeeping():
    rng = random.Random(20)
    for trial in range(30):
        n = rng.randint(4, 9)
        k = rng.randint(2, 3)
        gamma = rng.randint(1, k - 1)
        inst = gen_random(seed=5000 + trial, n=n, k=k, gamma=gamma)
        sol = solve_colorful(inst)
        trace = sol.trace
        assert trace.total_lp_solves() == sum(r.lp_solves for r in trace.records)
        assert trace.total_cuts() == sum(len(r.cuts) for r in trace.records)
        outcomes = {r.outcome for r in trace.records}
        assert outcomes <= {"rounded-4r", "solved-2r", "infeasible", "enumerated"}
        solved = [r for r in trace.records if r.radius == sol.probe_radius]
        assert any(r.outcome in ("rounded-4r", "solved-2r", "enumerated") for r in solved)
        if sol.centers.radius == 4 * sol.probe_radius:
            pass  # rounded support
        elif sol.centers.radius == 2 * sol.probe_radius:
            pass  # dp support
        else:
            assert sol.optimal and sol.centers.radius == sol.probe_radius


def test_baseline_budget_and_coverage():
    rng = random.Random(22)
    tried = 0
    for trial in range(40):
        n = rng.randint(3, 9)
        k = rng.randint(1, 3)
        gamma = rng.randint(1, 3)
        inst = gen_random(seed=6000 + trial, n=n, k=k, gamma=gamma)
        opt = brute_force_colorful(inst)
        got = pseudo_approx_baseline(inst, opt.radius)
        assert len(got.centers) <= inst.k + inst.num_colors - 1
        assert got.radius == 4 * opt.radius
        counts = check_feasible(inst, got.centers, got.radius).counts
        assert all(c >= col.demand for c, col in zip(counts, inst.colors))
        tried += 1
    assert tried == 40


def test_baseline_rejects_empty_relaxation():
    fx = fixture_adversarial()
    prog = build_relaxation(fx.instance, 0)
    assert lp.solve(prog).status == "infeasible"
    with pytest.raises(ValueError):
        pseudo_approx_baseline(fx.instance, 0)
