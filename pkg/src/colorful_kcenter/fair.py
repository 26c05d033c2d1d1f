"""Coverage-probability distributions via dual column generation.

Given per-point coverage targets p, find a distribution over center
sets, each meeting the color demands, whose probability of covering
every point u at the returned radius is at least p(u).  The search
runs in the dual: a candidate (alpha, mu) claiming no such
distribution exists is either refuted by a new center set whose
alpha-weighted coverage beats mu (a new column for the distribution),
or confirmed through the fixed-radius round-or-cut machinery, proving
the probe radius too small.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import lp
from .dp import WeightedTarget, find_few_outside
from .model import (
    CenterSet,
    FairInstance,
    Instance,
    candidate_radii,
    check_feasible,
    rational_from,
    union_ball,
)
from .partition import (
    FractionalPoint,
    good_partition,
    opening_mass,
    verify_partition,
)
from .rounding import build_cluster_system, sparse_round
from .solver import Cut, InternalError, build_relaxation


def epsilon_gap(alpha, mu) -> Fraction:
    """Strictness margin for weighted-coverage thresholds.

    Every subset sum of alpha minus mu is a multiple of one over the
    product of all denominators, so "strictly above mu" and "at least
    mu plus the margin" pick out exactly the same center sets.
    """
    prod = rational_from(mu).denominator
    for a in alpha:
        prod *= rational_from(a).denominator
    return Fraction(1, prod)


@dataclass(frozen=True)
class DualPoint:
    """Candidate witness (alpha, mu) against the coverage targets."""

    alpha: tuple
    mu: Fraction

    def __post_init__(self):
        alpha = tuple(rational_from(a) for a in self.alpha)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "mu", rational_from(self.mu))
        for u, a in enumerate(alpha):
            if a < 0:
                raise ValueError(f"negative weight {a} at point {u}")


@dataclass(frozen=True)
class InQ:
    """Separation failed: no center set feasible at this radius has
    alpha-weighted coverage above mu, so no distribution at this
    radius meets the targets and the radius search must move up.
    """

    radius: Fraction
    dual: DualPoint


@dataclass(frozen=True)
class Distribution:
    """Probability weights over center sets, all at one radius."""

    support: tuple
    radius: Fraction

    def __post_init__(self):
        support = tuple(
            (frozenset(centers), rational_from(weight))
            for centers, weight in self.support
        )
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "radius", rational_from(self.radius))
        if not support:
            raise ValueError("distribution needs at least one center set")
        total = Fraction(0)
        for centers, weight in support:
            if weight <= 0:
                raise ValueError(f"weight {weight} for {set(centers)} not positive")
            total += weight
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")


def coverage_probability(inst: Instance, dist: Distribution, u: int) -> Fraction:
    """Probability that point u lies within the distribution's radius
    of a drawn center set."""
    total = Fraction(0)
    for centers, weight in dist.support:
        if any(inst.dist[u][c] <= dist.radius for c in centers):
            total += weight
    return total


def weighted_coverage(inst: Instance, alpha, centers, r) -> Fraction:
    """Total alpha-mass of the points within distance r of centers."""
    return sum((alpha[u] for u in union_ball(inst, centers, r)), Fraction(0))


@dataclass
class SeparationRecord:
    """What happened while answering one dual point."""

    radius: Fraction
    alpha: tuple = ()
    mu: Fraction = None
    eps: Fraction = None
    outcome: str = ""  # "column-4r" | "column-2r" | "certified"
    cuts: list = field(default_factory=list)
    lp_solves: int = 0
    dp_calls: int = 0


@dataclass
class FairRadiusRecord:
    """What happened while probing one radius."""

    radius: Fraction
    outcome: str = ""  # "distribution" | "certified" | "exact" | "infeasible"
    separations: list = field(default_factory=list)
    restricted_solves: int = 0


@dataclass
class FairTrace:
    records: list = field(default_factory=list)

    def total_cuts(self) -> int:
        return sum(
            len(sep.cuts) for rec in self.records for sep in rec.separations
        )

    def total_columns(self) -> int:
        return sum(
            1
            for rec in self.records
            for sep in rec.separations
            if sep.outcome.startswith("column")
        )


def separate_or_certify(
    finst: FairInstance, r, dual: DualPoint, record: SeparationRecord = None
):
    """Find a center set meeting the color demands at 4r (sometimes 2r)
    whose alpha-weighted coverage strictly exceeds mu, or certify that
    none exists even at radius r.

    Mirrors the fixed-radius round-or-cut loop with one extra covering
    row for the weights; the row count grows by one, so the rounding
    threshold and cut bound drop to k - gamma while the outside-guess
    budget of the packing search rises to gamma - 1.
    """
    inst = finst.base
    r = Fraction(r)
    gamma = inst.num_colors
    threshold = inst.k - gamma
    eps = epsilon_gap(dual.alpha, dual.mu)
    goal = dual.mu + eps
    if record is None:
        record = SeparationRecord(radius=r)
    record.alpha = dual.alpha
    record.mu = dual.mu
    record.eps = eps
    extra = (dual.alpha, max(Fraction(0), goal))
    cuts = []
    seen = set()
    while True:
        program = build_relaxation(inst, r, cuts, extra_row=extra)
        out = lp.solve(program)
        record.lp_solves += 1
        if out.status == "infeasible":
            record.outcome = "certified"
            return InQ(radius=r, dual=dual)
        if out.status != "optimal":
            raise InternalError("relaxation LP cannot be unbounded")
        if lp.check_point(program, out.solution) is not None:
            raise InternalError("LP returned a point outside its own polytope")
        pt = FractionalPoint(out.solution[: inst.n], out.solution[inst.n :])
        part = good_partition(inst, r, pt)
        bad = verify_partition(inst, r, pt, part)
        if bad is not None:
            raise InternalError(f"clustering violated {bad}")
        mass = opening_mass(inst, r, pt, part.centers)
        if mass <= threshold:
            system = build_cluster_system(inst, part, extra_rows=(extra,))
            chosen = sparse_round(inst, r, part, system, inst.k, pt)
            four_r = 4 * r
            got = weighted_coverage(inst, dual.alpha, chosen, four_r)
            if not check_feasible(inst, chosen, four_r).feasible or got < goal:
                raise InternalError("rounded column fails its own guarantees")
            record.outcome = "column-4r"
            return CenterSet(frozenset(chosen), four_r)
        record.dp_calls += 1
        found = find_few_outside(
            inst,
            2 * r,
            part.centers,
            gamma - 1,
            target=WeightedTarget(weights=dual.alpha, threshold=goal),
        )
        if found is not None:
            got = weighted_coverage(inst, dual.alpha, found.centers, found.radius)
            if not check_feasible(inst, found.centers, found.radius).feasible:
                raise InternalError("packing column fails raw-ball coverage")
            if got < goal:
                raise InternalError("packing column misses the weight goal")
            record.outcome = "column-2r"
            return found
        s = frozenset(part.centers)
        if s in seen:
            raise InternalError("cut centers repeated; loop would not progress")
        seen.add(s)
        cut = Cut(s, threshold)
        cuts.append(cut)
        record.cuts.append(cut)


def solve_restricted(finst: FairInstance, r, columns):
    """Best dual response to the center sets found so far.

    Minimizes mu over alpha >= 0 and free mu, normalized so the
    target-weighted alpha mass exceeds mu by exactly one, subject to
    every known column's coverage staying at most mu.  When even that
    program is infeasible the known columns already support a
    distribution meeting every target, and it is returned instead.
    """
    inst = finst.base
    n = inst.n
    r4 = 4 * Fraction(r)
    covers = [union_ball(inst, c, r4) for c in columns]
    program = lp.LinearProgram(
        n + 1,
        tuple([Fraction(0)] * n + [Fraction(1)]),
        lp.MIN,
        tuple([Fraction(0)] * n + [None]),
    )
    program.add(tuple(list(finst.p) + [Fraction(-1)]), lp.EQ, 1)
    for cov in covers:
        row = [Fraction(0)] * (n + 1)
        for u in cov:
            row[u] = Fraction(1)
        row[n] = Fraction(-1)
        program.add(tuple(row), lp.LE, 0)
    out = lp.solve(program)
    if out.status == "optimal":
        if lp.check_point(program, out.solution) is not None:
            raise InternalError("LP returned a point outside its own polytope")
        return DualPoint(alpha=out.solution[:n], mu=out.solution[n])
    if out.status != "infeasible":
        # mu >= weighted mass - 1 >= -1 on every feasible point
        raise InternalError("dual response LP cannot be unbounded")
    dist = _distribution_over(finst, columns, r4)
    if dist is None:
        raise InternalError("restricted distribution LP must be solvable")
    return dist


def _distribution_over(finst: FairInstance, columns, radius):
    """Probability weights over the given center sets meeting every
    coverage target at the given radius, or None."""
    if not columns:
        return None
    covers = [union_ball(finst.base, c, radius) for c in columns]
    program = lp.LinearProgram(
        len(columns), tuple(Fraction(0) for _ in columns)
    )
    program.add(tuple(Fraction(1) for _ in columns), lp.EQ, 1)
    for u in range(finst.base.n):
        if finst.p[u] <= 0:
            continue
        program.add(
            tuple(Fraction(int(u in cov)) for cov in covers), lp.GE, finst.p[u]
        )
    out = lp.solve(program)
    if out.status != "optimal":
        return None
    support = tuple(
        (frozenset(c), w) for c, w in zip(columns, out.solution) if w > 0
    )
    return Distribution(support=support, radius=radius)


@dataclass(frozen=True)
class FairSolution:
    distribution: Distribution
    probe_radius: Fraction  # the relaxation radius that produced it
    optimal: bool  # True when found by exact enumeration
    trace: FairTrace


def _probe(finst: FairInstance, r, rec: FairRadiusRecord):
    """Column generation at one radius: alternate best dual responses
    with separation until a distribution emerges or a dual point
    survives, which proves the radius too small."""
    columns = []
    known = set()
    while True:
        rec.restricted_solves += 1
        response = solve_restricted(finst, r, columns)
        if isinstance(response, Distribution):
            rec.outcome = "distribution"
            return response
        sep = SeparationRecord(radius=Fraction(r))
        rec.separations.append(sep)
        got = separate_or_certify(finst, r, response, sep)
        if isinstance(got, InQ):
            rec.outcome = "certified"
            return None
        col = frozenset(got.centers)
        if col in known:
            raise InternalError("separation repeated a known column")
        known.add(col)
        columns.append(col)


def _exact_at(finst: FairInstance, r):
    """Distribution over all feasible center sets at radius r itself,
    or None.  Only used at enumeration scale."""
    inst = finst.base
    columns = []
    for size in range(inst.k + 1):
        for combo in itertools.combinations(range(inst.n), size):
            if check_feasible(inst, combo, r).feasible:
                columns.append(frozenset(combo))
    return _distribution_over(finst, columns, Fraction(r))


def solve_fair(
    finst: FairInstance, linear_scan: bool = False, enum_cap: int = 10**7
) -> FairSolution:
    """Minimize the radius at which some distribution over feasible
    center sets meets every coverage target.

    With fewer centers than colors the cut machinery is not needed:
    when the subset count fits under enum_cap, exact feasibility per
    radius is monotone and plain binary search finds the optimum.
    Otherwise binary search (or a linear scan from below) probes radii
    with column generation; probes at or above the optimum always end
    in a distribution, so the search never settles above the optimum
    and the returned radius is at most four times it.
    """
    inst = finst.base
    radii = candidate_radii(inst)
    trace = FairTrace()
    subsets = sum(math.comb(inst.n, j) for j in range(inst.k + 1))
    if inst.num_colors >= inst.k and subsets <= enum_cap:
        lo, hi = 0, len(radii) - 1
        best = None
        best_idx = None
        while lo < hi:
            mid = (lo + hi) // 2
            rec = FairRadiusRecord(radius=radii[mid])
            found = _exact_at(finst, radii[mid])
            rec.outcome = "exact" if found is not None else "infeasible"
            trace.records.append(rec)
            if found is not None:
                best, best_idx = found, mid
                hi = mid
            else:
                lo = mid + 1
        if best_idx != lo:
            rec = FairRadiusRecord(radius=radii[lo], outcome="exact")
            trace.records.append(rec)
            best = _exact_at(finst, radii[lo])
        if best is None:
            raise InternalError("full-radius enumeration found nothing")
        return FairSolution(best, radii[lo], True, trace)

    best = None
    best_idx = None
    if linear_scan:
        for idx, r in enumerate(radii):
            rec = FairRadiusRecord(radius=r)
            trace.records.append(rec)
            dist = _probe(finst, r, rec)
            if dist is not None:
                best, best_idx = dist, idx
                break
    else:
        # probes at or above the optimum always succeed, and failures
        # only happen strictly below it, so lo never passes the
        # optimum's index and the final radius is at most the optimum
        lo, hi = 0, len(radii) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            rec = FairRadiusRecord(radius=radii[mid])
            trace.records.append(rec)
            dist = _probe(finst, radii[mid], rec)
            if dist is not None:
                best, best_idx = dist, mid
                hi = mid
            else:
                lo = mid + 1
        if best_idx != lo:
            rec = FairRadiusRecord(radius=radii[lo])
            trace.records.append(rec)
            dist = _probe(finst, radii[lo], rec)
            if dist is not None:
                best, best_idx = dist, lo
    if best is None:
        raise InternalError("largest candidate radius must admit a distribution")
    return FairSolution(best, radii[best_idx], False, trace)


def sample(dist: Distribution, seed: int) -> frozenset:
    """Draw one center set; each appears with probability exactly its
    weight, deterministically in the seed."""
    rng = random.Random(seed)
    denom = math.lcm(*(weight.denominator for _, weight in dist.support))
    draw = rng.randrange(denom)
    acc = 0
    for centers, weight in dist.support:
        acc += int(weight * denom)
        if draw < acc:
            return centers
    raise InternalError("weights did not cover the sample space")
