"""Packing dynamic program against exhaustive enumeration."""

import itertools
import random
from fractions import Fraction

import pytest

from colorful_kcenter.dp import DpProgram, DpResult, WeightedTarget, dp_solve, find_few_outside
from colorful_kcenter.model import Instance, ball, union_ball


def brute_best(prog):
    """Exhaustive reference: best total weight over feasible picks,
    preferring fewer items, then lexicographically smaller picks."""
    q = prog.num_items
    best = None
    for size in range(min(q, prog.capacity) + 1):
        for picks in itertools.combinations(range(q), size):
            ok = True
            for row, need in zip(prog.rows, prog.demands):
                if sum(row[i] for i in picks) < need:
                    ok = False
                    break
            if not ok:
                continue
            value = sum((prog.weights[i] for i in picks), Fraction(0))
            if best is None or value > best[0]:
                best = (value, picks)
    return best


def random_program(rng, weighted):
    q = rng.randint(0, 9)
    t = rng.randint(0, 3)
    rows = tuple(
        tuple(rng.randint(0, 3) for _ in range(q)) for _ in range(t)
    )
    demands = tuple(rng.randint(0, 6) for _ in range(t))
    if weighted:
        weights = tuple(Fraction(rng.randint(0, 8), 4) for _ in range(q))
    else:
        weights = tuple(Fraction(0) for _ in range(q))
    capacity = rng.randint(0, q + 1)
    return DpProgram(weights=weights, rows=rows, demands=demands, capacity=capacity)


def test_unweighted_matches_enumeration():
    rng = random.Random(2)
    hits = misses = 0
    for _ in range(400):
        prog = random_program(rng, weighted=False)
        res = dp_solve(prog)
        want = brute_best(prog)
        if want is None:
            misses += 1
            assert res is None
        else:
            hits += 1
            assert res is not None
            # unweighted: any feasible picks, value zero
            assert res.value == 0
            for row, need in zip(prog.rows, prog.demands):
                assert sum(row[i] for i in res.picks) >= need
            assert len(res.picks) <= prog.capacity
    assert hits > 100 and misses > 50


def test_weighted_matches_enumeration():
    rng = random.Random(4)
    for _ in range(400):
        prog = random_program(rng, weighted=True)
        res = dp_solve(prog)
        want = brute_best(prog)
        if want is None:
            assert res is None
            continue
        assert res is not None
        assert res.value == want[0]
        # claimed picks must earn the claimed value and be feasible
        assert sum((prog.weights[i] for i in res.picks), Fraction(0)) == res.value
        for row, need in zip(prog.rows, prog.demands):
            assert sum(row[i] for i in res.picks) >= need
        assert len(res.picks) <= prog.capacity


def test_deterministic_picks():
    rng = random.Random(6)
    for _ in range(60):
        prog = random_program(rng, weighted=True)
        a = dp_solve(prog)
        b = dp_solve(prog)
        assert (a is None) == (b is None)
        if a is not None:
            assert a.picks == b.picks and a.value == b.value


def test_zero_capacity_edge():
    prog = DpProgram(
        weights=(Fraction(1),), rows=((1,),), demands=(1,), capacity=0
    )
    assert dp_solve(prog) is None
    prog = DpProgram(
        weights=(Fraction(1),), rows=((1,),), demands=(0,), capacity=0
    )
    res = dp_solve(prog)
    assert res is not None and res.picks == ()


def test_demand_above_reach_is_infeasible():
    prog = DpProgram(
        weights=(Fraction(0), Fraction(0)),
        rows=((2, 2),),
        demands=(5,),
        capacity=2,
    )
    assert dp_solve(prog) is None


def line_instance(coords, k, colors):
    dist = tuple(
        tuple(Fraction(abs(a - b)) for b in coords) for a in coords
    )
    return Instance(dist=dist, k=k, colors=tuple(colors))


def brute_few_outside(inst, r2, centers_s, beta, target=None):
    """Does any center set with <= beta points outside centers_s meet
    every demand (and the weight threshold) at radius r2?"""
    s_set = set(centers_s)
    outside = [u for u in range(inst.n) if u not in s_set]
    for qsize in range(min(beta, inst.k, len(outside)) + 1):
        for guess in itertools.combinations(outside, qsize):
            for wsize in range(min(len(s_set), inst.k - qsize) + 1):
                for w in itertools.combinations(sorted(s_set), wsize):
                    chosen = set(guess) | set(w)
                    covered = union_ball(inst, chosen, r2)
                    if any(
                        len(c.members & covered) < c.demand for c in inst.colors
                    ):
                        continue
                    if target is not None:
                        got = sum(
                            (target.weights[u] for u in covered), Fraction(0)
                        )
                        if got < target.threshold:
                            continue
                    return True
    return False


def spread_instance(rng):
    """Far-apart anchor points plus satellites, so some spread set can
    serve as inside-centers with disjoint 2r balls."""
    anchors = rng.randint(1, 3)
    coords = []
    for i in range(anchors):
        base = i * 100
        coords.append(base)
        for _ in range(rng.randint(0, 2)):
            coords.append(base + rng.randint(1, 8))
    rng.shuffle(coords)
    n = len(coords)
    gamma = rng.randint(1, 3)
    colors = []
    for _ in range(gamma):
        members = tuple(u for u in range(n) if rng.random() < 0.7) or (0,)
        colors.append((members, rng.randint(0, len(members))))
    k = rng.randint(1, n)
    inst = line_instance(coords, k, colors)
    centers = tuple(u for u, c in enumerate(coords) if c % 100 == 0)
    return inst, centers


def test_find_few_outside_matches_brute_existence():
    rng = random.Random(8)
    found_count = none_count = 0
    for _ in range(250):
        inst, centers = spread_instance(rng)
        r2 = Fraction(rng.randint(1, 10))
        beta = rng.randint(0, 2)
        exists = brute_few_outside(inst, r2, centers, beta)
        got = find_few_outside(inst, r2, centers, beta)
        assert (got is not None) == exists
        if got is None:
            none_count += 1
            continue
        found_count += 1
        assert len(got.centers) <= inst.k
        assert len(set(got.centers) - set(centers)) <= beta
        covered = union_ball(inst, got.centers, r2)
        for c in inst.colors:
            assert len(c.members & covered) >= c.demand
    assert found_count > 60 and none_count > 30


def test_find_few_outside_weighted_threshold():
    rng = random.Random(10)
    found_count = none_count = 0
    for _ in range(250):
        inst, centers = spread_instance(rng)
        r2 = Fraction(rng.randint(1, 10))
        beta = rng.randint(0, 2)
        weights = tuple(
            Fraction(rng.randint(0, 4), 4) for _ in range(inst.n)
        )
        threshold = Fraction(rng.randint(0, 3 * inst.n), 4)
        target = WeightedTarget(weights=weights, threshold=threshold)
        exists = brute_few_outside(inst, r2, centers, beta, target)
        got = find_few_outside(inst, r2, centers, beta, target=target)
        assert (got is not None) == exists
        if got is None:
            none_count += 1
            continue
        found_count += 1
        covered = union_ball(inst, got.centers, r2)
        assert sum((weights[u] for u in covered), Fraction(0)) >= threshold
        for c in inst.colors:
            assert len(c.members & covered) >= c.demand
    assert found_count > 50 and none_count > 30


def test_find_few_outside_rejects_close_centers():
    inst = line_instance([0, 1, 50], 2, [((0, 1, 2), 1)])
    with pytest.raises(ValueError):
        find_few_outside(inst, Fraction(3), (0, 1), 0)
