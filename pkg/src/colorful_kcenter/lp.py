"""Exact rational linear programming.

Bounded-variable primal simplex over exact rationals, two phases, Bland's
pivoting rule.  Returns basic optimal solutions (vertices of the feasible
region), a dual solution whose objective matches the primal exactly, and
on infeasible programs a Farkas certificate: a signed combination of
constraints and variable bounds that sums to "0 >= positive".

Internally the tableau runs on gmpy2.mpq when available (same exact
semantics as Fraction, several times faster); all inputs and outputs are
fractions.Fraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

try:
    from gmpy2 import mpq as _fastq
except ImportError:  # pragma: no cover - gmpy2 present in normal installs
    _fastq = None

LE = "<="
GE = ">="
EQ = "=="

MIN = "min"
MAX = "max"


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    raise TypeError(f"expected int or Fraction, got {type(v).__name__}")


@dataclass
class Constraint:
    coeffs: tuple
    rel: str
    rhs: Fraction


@dataclass
class LinearProgram:
    """min or max c.x subject to row constraints and box bounds.

    lower/upper entries may be None for an unbounded side; lower defaults
    to all zero, upper to all None.
    """

    num_vars: int
    objective: tuple
    sense: str = MIN
    lower: tuple = None
    upper: tuple = None
    constraints: list = field(default_factory=list)

    def __post_init__(self):
        n = self.num_vars
        self.objective = tuple(_frac(c) for c in self.objective)
        if len(self.objective) != n:
            raise ValueError("objective length != num_vars")
        if self.sense not in (MIN, MAX):
            raise ValueError(f"sense must be {MIN!r} or {MAX!r}")
        if self.lower is None:
            self.lower = tuple(Fraction(0) for _ in range(n))
        else:
            self.lower = tuple(None if v is None else _frac(v) for v in self.lower)
        if self.upper is None:
            self.upper = tuple(None for _ in range(n))
        else:
            self.upper = tuple(None if v is None else _frac(v) for v in self.upper)
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError("bound vector length != num_vars")
        for lo, up in zip(self.lower, self.upper):
            if lo is not None and up is not None and lo > up:
                raise ValueError(f"empty bound interval [{lo}, {up}]")
        norm = []
        for con in self.constraints:
            if not isinstance(con, Constraint):
                con = Constraint(tuple(con[0]), con[1], con[2])
            norm.append(con)
        self.constraints = []
        for con in norm:
            self.add(con.coeffs, con.rel, con.rhs)

    def add(self, coeffs, rel, rhs):
        coeffs = tuple(_frac(c) for c in coeffs)
        if len(coeffs) != self.num_vars:
            raise ValueError("constraint length != num_vars")
        if rel not in (LE, GE, EQ):
            raise ValueError(f"bad relation {rel!r}")
        self.constraints.append(Constraint(coeffs, rel, _frac(rhs)))


@dataclass(frozen=True)
class ViolatedConstraint:
    """Separating hyperplane witness returned by check_point.

    kind is "lower", "upper", or "row"; index is the variable or
    constraint index; amount is by how much the point misses it.
    """

    kind: str
    index: int
    amount: Fraction


def check_point(lp: LinearProgram, point):
    """Exact membership test.  Returns None if point satisfies every
    bound and constraint of lp, else the first violation in order
    (bounds by variable index, then rows in constraint order).
    """
    point = [_frac(v) for v in point]
    if len(point) != lp.num_vars:
        raise ValueError("point length != num_vars")
    for i, (lo, up) in enumerate(zip(lp.lower, lp.upper)):
        if lo is not None and point[i] < lo:
            return ViolatedConstraint("lower", i, lo - point[i])
        if up is not None and point[i] > up:
            return ViolatedConstraint("upper", i, point[i] - up)
    for j, con in enumerate(lp.constraints):
        lhs = sum((c * v for c, v in zip(con.coeffs, point) if c), Fraction(0))
        if con.rel == LE and lhs > con.rhs:
            return ViolatedConstraint("row", j, lhs - con.rhs)
        if con.rel == GE and lhs < con.rhs:
            return ViolatedConstraint("row", j, con.rhs - lhs)
        if con.rel == EQ and lhs != con.rhs:
            return ViolatedConstraint("row", j, abs(lhs - con.rhs))
    return None


@dataclass(frozen=True)
class DualInfo:
    """Dual solution for the user's program.

    objective equals sum(row_duals . rhs) + sum(lower_duals . lower)
    - sum(upper_duals . upper) and matches the primal optimum exactly.
    For min programs row_duals are >= 0 on >= rows and <= 0 on <= rows
    and the bound duals are >= 0; for max programs all signs flip.
    """

    row_duals: tuple
    lower_duals: tuple
    upper_duals: tuple
    objective: Fraction


@dataclass(frozen=True)
class FarkasCertificate:
    """Infeasibility witness.

    With y = row_mults (>= 0 on >= rows, <= 0 on <= rows, free on ==),
    p = lower_mults >= 0 and q = upper_mults >= 0, the combination
    sum_j y_j a_j + p - q is the zero vector while gap =
    sum_j y_j b_j + p.lower - q.upper is strictly positive.  Any point
    inside all rows and bounds would give 0 >= gap > 0, so none exists.
    """

    row_mults: tuple
    lower_mults: tuple
    upper_mults: tuple
    gap: Fraction


def verify_certificate(lp: LinearProgram, cert: FarkasCertificate) -> bool:
    """Exact validity check of a Farkas certificate against lp."""
    n = lp.num_vars
    y = cert.row_mults
    p = cert.lower_mults
    q = cert.upper_mults
    if len(y) != len(lp.constraints) or len(p) != n or len(q) != n:
        return False
    for yj, con in zip(y, lp.constraints):
        if con.rel == GE and yj < 0:
            return False
        if con.rel == LE and yj > 0:
            return False
    for i in range(n):
        if p[i] < 0 or q[i] < 0:
            return False
        if p[i] > 0 and lp.lower[i] is None:
            return False
        if q[i] > 0 and lp.upper[i] is None:
            return False
    combo = [Fraction(0)] * n
    for yj, con in zip(y, lp.constraints):
        if yj:
            for i, c in enumerate(con.coeffs):
                if c:
                    combo[i] += yj * c
    for i in range(n):
        combo[i] += p[i] - q[i]
        if combo[i] != 0:
            return False
    gap = sum((yj * con.rhs for yj, con in zip(y, lp.constraints) if yj), Fraction(0))
    gap += sum(p[i] * lp.lower[i] for i in range(n) if p[i])
    gap -= sum(q[i] * lp.upper[i] for i in range(n) if q[i])
    return gap > 0 and gap == cert.gap


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    solution: tuple = None
    value: Fraction = None
    dual: DualInfo = None
    certificate: FarkasCertificate = None


_AT_LOWER = 0
_AT_UPPER = 1
_AT_FREE = 2
_BASIC = 3


class _Simplex:
    """State for one solve.

    Columns: structural variables, then one slack per row, then
    artificials for rows whose slack start is infeasible.  Constraint
    "a.x rel b" is held as "a.x + s = b" with the slack bounded by
    [0, inf) for <=, (-inf, 0] for >=, and [0, 0] for ==.

    The tableau rows carry the identity on the current basis, so the
    slack columns hold the basis inverse; in particular the row duals
    are the negated reduced costs of the slack columns, a fact used for
    both the dual solution and the Farkas certificate.
    """

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        self.n = lp.num_vars
        self.m = len(lp.constraints)
        # Fraction fallback keeps every tableau entry exact (never int,
        # whose division would go through floats)
        q = _fastq if _fastq is not None else Fraction
        self.q = q
        self.zero = q(0)
        self.one = q(1)
        self.minimize = lp.sense == MIN
        self.cost = [q(c) if self.minimize else q(-c) for c in lp.objective]

        self.lo = [None if v is None else q(v) for v in lp.lower]
        self.up = [None if v is None else q(v) for v in lp.upper]
        rows = []
        for con in lp.constraints:
            rows.append([q(c) for c in con.coeffs])
            if con.rel == LE:
                self.lo.append(self.zero)
                self.up.append(None)
            elif con.rel == GE:
                self.lo.append(None)
                self.up.append(self.zero)
            else:
                self.lo.append(self.zero)
                self.up.append(self.zero)
        self.ncols = self.n + self.m
        self.state = []
        for j in range(self.ncols):
            if self.lo[j] is not None:
                self.state.append(_AT_LOWER)
            elif self.up[j] is not None:
                self.state.append(_AT_UPPER)
            else:
                self.state.append(_AT_FREE)
        self.T = []
        for i in range(self.m):
            row = rows[i] + [self.zero] * self.m
            row[self.n + i] = self.one
            self.T.append(row)
        self.basis = [None] * self.m
        self.beta = [self.zero] * self.m
        self.artificial = []
        self.banned = set()
        self.d = []

    def bound_value(self, j):
        st = self.state[j]
        if st == _AT_LOWER:
            return self.lo[j]
        if st == _AT_UPPER:
            return self.up[j]
        return self.zero

    def total_cols(self):
        return self.ncols + len(self.artificial)

    def solve(self) -> LpOutcome:
        if self._start_basis():
            status = self._iterate()
            assert status == "optimal", "phase 1 is bounded below by zero"
            infeas = self.zero
            for i in range(self.m):
                if self.basis[i] >= self.ncols:
                    infeas += self.beta[i]
            if infeas > 0:
                return self._infeasible_outcome()
            self._drive_out_artificials()
            self.banned.update(self.artificial)
        self._reduced_costs(self.cost + [self.zero] * (self.total_cols() - self.n))
        status = self._iterate()
        if status == "unbounded":
            return LpOutcome(status="unbounded")
        return self._optimal_outcome()

    # -- setup ------------------------------------------------------------

    def _start_basis(self) -> bool:
        """Slack basis where the start point allows it, artificials
        elsewhere.  Returns True if a feasibility phase is needed.
        """
        need = []
        for i in range(self.m):
            row = self.T[i]
            rho = self.q(self.lp.constraints[i].rhs)
            for j in range(self.n):
                v = self.bound_value(j)
                if v and row[j]:
                    rho -= row[j] * v
            s = self.n + i
            if (self.lo[s] is None or rho >= self.lo[s]) and (
                self.up[s] is None or rho <= self.up[s]
            ):
                self.basis[i] = s
                self.state[s] = _BASIC
                self.beta[i] = rho
            else:
                need.append((i, rho))
        if not need:
            return False
        for i, rho in need:
            if rho < 0:
                # flip the row so the artificial starts basic at +|rho|
                self.T[i] = [-v for v in self.T[i]]
                rho = -rho
            col = self.total_cols()
            for r in range(self.m):
                self.T[r].append(self.one if r == i else self.zero)
            self.lo.append(self.zero)
            self.up.append(None)
            self.state.append(_BASIC)
            self.basis[i] = col
            self.beta[i] = rho
            self.artificial.append(col)
        phase_cost = [self.zero] * self.total_cols()
        for j in self.artificial:
            phase_cost[j] = self.one
        self._reduced_costs(phase_cost)
        return True

    def _reduced_costs(self, cost):
        """d_j = c_j - c_B . T[:,j], fresh at the start of a phase."""
        d = list(cost)
        width = len(d)
        for i in range(self.m):
            cb = cost[self.basis[i]]
            if cb:
                row = self.T[i]
                for j in range(width):
                    if row[j]:
                        d[j] -= cb * row[j]
        self.d = d

    # -- core loop --------------------------------------------------------

    def _iterate(self):
        while True:
            enter, direction = self._pick_entering()
            if enter is None:
                return "optimal"
            step, leave_row, leave_state = self._ratio_test(enter, direction)
            if step is None:
                return "unbounded"
            self._apply(enter, direction, step, leave_row, leave_state)

    def _pick_entering(self):
        """Bland: lowest-index nonbasic column whose reduced cost can
        improve the objective in its feasible move direction.
        """
        d = self.d
        state = self.state
        for j in range(len(d)):
            st = state[j]
            if st == _BASIC or j in self.banned:
                continue
            lo, up = self.lo[j], self.up[j]
            if lo is not None and up is not None and lo == up:
                continue  # fixed variable can never move
            dj = d[j]
            if st == _AT_LOWER:
                if dj < 0:
                    return j, 1
            elif st == _AT_UPPER:
                if dj > 0:
                    return j, -1
            else:
                if dj < 0:
                    return j, 1
                if dj > 0:
                    return j, -1
        return None, 0

    def _ratio_test(self, enter, direction):
        """Largest step t >= 0 when column `enter` moves by direction*t.

        Candidates: each basic variable hitting one of its bounds, and
        the entering variable hitting its own opposite bound.  Ties are
        broken on the smallest variable index (Bland), the entering
        variable counting with its own index.
        """
        best_t = None
        best_var = None
        best_row = -1
        best_state = None
        lo_e, up_e = self.lo[enter], self.up[enter]
        if lo_e is not None and up_e is not None:
            best_t = up_e - lo_e
            best_var = enter
            best_state = _AT_UPPER if direction > 0 else _AT_LOWER
        for i in range(self.m):
            coef = self.T[i][enter]
            if not coef:
                continue
            delta = coef if direction > 0 else -coef
            b = self.basis[i]
            if delta > 0:
                bound = self.lo[b]
                if bound is None:
                    continue
                t = (self.beta[i] - bound) / delta
                new_state = _AT_LOWER
            else:
                bound = self.up[b]
                if bound is None:
                    continue
                t = (bound - self.beta[i]) / (-delta)
                new_state = _AT_UPPER
            if best_t is None or t < best_t or (t == best_t and b < best_var):
                best_t = t
                best_var = b
                best_row = i
                best_state = new_state
        if best_t is None:
            return None, None, None
        return best_t, best_row, best_state

    def _apply(self, enter, direction, step, leave_row, leave_state):
        if step:
            move = step if direction > 0 else -step
            for i in range(self.m):
                coef = self.T[i][enter]
                if coef:
                    self.beta[i] -= move * coef
        if leave_row < 0:
            # entering variable hit its own far bound: flip, no pivot
            self.state[enter] = leave_state
            return
        enter_val = self.bound_value(enter) + (step if direction > 0 else -step)
        leaving = self.basis[leave_row]
        row = self.T[leave_row]
        piv = row[enter]
        if piv != self.one:
            inv = self.one / piv
            row = [v * inv if v else v for v in row]
            self.T[leave_row] = row
        width = len(row)
        for i in range(self.m):
            if i == leave_row:
                continue
            f = self.T[i][enter]
            if f:
                ti = self.T[i]
                for j in range(width):
                    if row[j]:
                        ti[j] -= f * row[j]
        f = self.d[enter]
        if f:
            d = self.d
            for j in range(width):
                if row[j]:
                    d[j] -= f * row[j]
        self.basis[leave_row] = enter
        self.beta[leave_row] = enter_val
        self.state[enter] = _BASIC
        self.state[leaving] = leave_state

    def _drive_out_artificials(self):
        """After a feasible phase 1, pivot basic artificials (all at
        value 0) onto an independent real column; a row offering none is
        redundant and keeps its artificial pinned to [0, 0].
        """
        for i in range(self.m):
            b = self.basis[i]
            if b < self.ncols:
                continue
            row = self.T[i]
            target = None
            for j in range(self.ncols):
                if self.state[j] != _BASIC and row[j]:
                    target = j
                    break
            if target is None:
                self.up[b] = self.zero
                continue
            self._apply(target, 1, self.zero, i, _AT_LOWER)

    # -- outcomes ---------------------------------------------------------

    def _to_frac(self, v):
        if isinstance(v, Fraction):
            return v
        return Fraction(int(v.numerator), int(v.denominator))

    def _structural_values(self):
        vals = [None] * self.n
        for j in range(self.n):
            if self.state[j] != _BASIC:
                vals[j] = self._to_frac(self.bound_value(j))
        for i in range(self.m):
            if self.basis[i] < self.n:
                vals[self.basis[i]] = self._to_frac(self.beta[i])
        return vals

    def _bound_multipliers(self):
        """Nonnegative multipliers on finite bounds read off the
        structural reduced costs (min convention).
        """
        low = [Fraction(0)] * self.n
        upp = [Fraction(0)] * self.n
        for j in range(self.n):
            if self.state[j] == _BASIC:
                continue
            dj = self._to_frac(self.d[j])
            if dj > 0:
                assert self.lp.lower[j] is not None
                low[j] = dj
            elif dj < 0:
                assert self.lp.upper[j] is not None
                upp[j] = -dj
        return low, upp

    def _row_duals(self):
        return [self._to_frac(-self.d[self.n + i]) for i in range(self.m)]

    def _optimal_outcome(self):
        x = self._structural_values()
        value = sum(
            (c * v for c, v in zip(self.lp.objective, x) if c), Fraction(0)
        )
        y = self._row_duals()
        low, upp = self._bound_multipliers()
        if not self.minimize:
            y = [-v for v in y]
            low = [-v for v in low]
            upp = [-v for v in upp]
        dual_obj = sum(
            (yj * con.rhs for yj, con in zip(y, self.lp.constraints) if yj),
            Fraction(0),
        )
        for j in range(self.n):
            if low[j]:
                dual_obj += low[j] * self.lp.lower[j]
            if upp[j]:
                dual_obj -= upp[j] * self.lp.upper[j]
        assert dual_obj == value, "strong duality failed, simplex bug"
        dual = DualInfo(tuple(y), tuple(low), tuple(upp), dual_obj)
        return LpOutcome(status="optimal", solution=tuple(x), value=value, dual=dual)

    def _infeasible_outcome(self):
        y = self._row_duals()
        low, upp = self._bound_multipliers()
        gap = sum(
            (yj * con.rhs for yj, con in zip(y, self.lp.constraints) if yj),
            Fraction(0),
        )
        for j in range(self.n):
            if low[j]:
                gap += low[j] * self.lp.lower[j]
            if upp[j]:
                gap -= upp[j] * self.lp.upper[j]
        cert = FarkasCertificate(tuple(y), tuple(low), tuple(upp), gap)
        assert verify_certificate(self.lp, cert), "phase 1 built a bad certificate"
        return LpOutcome(status="infeasible", certificate=cert)


def solve(lp: LinearProgram) -> LpOutcome:
    """Solve lp exactly.

    "optimal" comes with a basic solution (a vertex whenever the
    feasible region is pointed), its value, and a dual of equal value;
    "infeasible" with a verified Farkas certificate.  Identical input
    always takes the identical pivot path, so results are deterministic.
    """
    return _Simplex(lp).solve()
