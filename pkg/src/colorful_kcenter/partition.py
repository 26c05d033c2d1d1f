"""Greedy clustering of a fractional relaxation point.

Centers are picked by descending opening-mass x, each grabbing every
unassigned point within four radii.  The resulting clusters are pairwise
far apart (centers > 4r), so radius-r balls, and even radius-2r balls,
around distinct centers never overlap; and because the center maximizes
x within its cluster, the y-mass inside its radius-r ball dominates the
x of every point it absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, ball, union_ball


@dataclass(frozen=True)
class FractionalPoint:
    """Coverage values x and opening values y of a relaxation point."""

    x: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(Fraction(v) for v in self.x))
        object.__setattr__(self, "y", tuple(Fraction(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have equal length")


@dataclass(frozen=True)
class GoodPartition:
    """Cluster centers in pick order and the clusters they absorbed.

    clusters[i] is the set of points assigned to centers[i]; together
    the clusters partition all points.
    """

    centers: tuple
    clusters: tuple

    @property
    def size(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class PartitionViolation:
    """First failed clustering property.

    prop is "partition" (clusters must tile all points and contain
    their center), "separation" (centers pairwise > 4r), "radius"
    (cluster inside the 4r ball of its center), or "mass" (y-mass of
    the center's r-ball must dominate x of every cluster member).
    """

    prop: str
    witness: tuple


def good_partition(inst: Instance, r, pt: FractionalPoint) -> GoodPartition:
    """Cluster all points greedily by descending x.

    Repeatedly takes the unassigned point with maximum x (ties: lowest
    index) as a center and assigns it everything unassigned within 4r.
    """
    if len(pt.x) != inst.n:
        raise ValueError("point size != instance size")
    four_r = 4 * Fraction(r)
    unassigned = set(range(inst.n))
    centers = []
    clusters = []
    while unassigned:
        s = max(sorted(unassigned), key=lambda u: pt.x[u])
        row = inst.dist[s]
        cluster = frozenset(u for u in unassigned if row[u] <= four_r)
        centers.append(s)
        clusters.append(cluster)
        unassigned -= cluster
    return GoodPartition(tuple(centers), tuple(clusters))


def verify_partition(inst: Instance, r, pt: FractionalPoint, part: GoodPartition):
    """Check all clustering properties exactly.

    Returns None if everything holds, else the first violation in the
    order partition, separation, radius, mass.
    """
    r = Fraction(r)
    four_r = 4 * r
    seen = set()
    for s, cluster in zip(part.centers, part.clusters):
        if s not in cluster:
            return PartitionViolation("partition", (s,))
        if cluster & seen:
            return PartitionViolation("partition", tuple(sorted(cluster & seen)))
        seen |= cluster
    if seen != set(range(inst.n)):
        missing = sorted(set(range(inst.n)) - seen)
        return PartitionViolation("partition", tuple(missing))
    for i, s in enumerate(part.centers):
        for t in part.centers[i + 1 :]:
            if inst.dist[s][t] <= four_r:
                return PartitionViolation("separation", (s, t))
    for s, cluster in zip(part.centers, part.clusters):
        for u in sorted(cluster):
            if inst.dist[s][u] > four_r:
                return PartitionViolation("radius", (s, u))
    for s, cluster in zip(part.centers, part.clusters):
        mass = sum((pt.y[v] for v in ball(inst, s, r)), Fraction(0))
        for u in sorted(cluster):
            if mass < pt.x[u]:
                return PartitionViolation("mass", (s, u))
    return None


def opening_mass(inst: Instance, r, pt: FractionalPoint, centers) -> Fraction:
    """Total y-mass inside the union of radius-r balls around centers."""
    covered = union_ball(inst, centers, r)
    return sum((pt.y[v] for v in covered), Fraction(0))
