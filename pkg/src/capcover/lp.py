"""Exact LP relaxations of capacitated covering and a rational simplex solver.

Variables are keyed ``("y", copy)`` and ``("x", copy, point)``. For the
natural relaxation a copy is just a ball id; the auxiliary relaxations key
copies by :class:`~capcover.rounding.config.Copy`. Pairs whose point lies
outside the ball are never created, which encodes ``x = 0`` by omission.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import InfeasibleError, UnboundedError
from .field import format_rational
from .instance import Instance, contains

LE, EQ, GE = "<=", "=", ">="
ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class Row:
    name: tuple
    coeffs: dict
    rel: str
    rhs: Fraction


@dataclass
class LPModel:
    name: str
    variables: list
    objective: dict
    rows: list
    upper: dict
    index: dict = field(init=False)

    def __post_init__(self):
        self.index = {}
        for k, v in enumerate(self.variables):
            if v in self.index:
                raise ValueError(f"duplicate variable {v!r}")
            self.index[v] = k


@dataclass
class FractionalSolution:
    """``y`` per copy and ``x`` per (copy, point); absent entries are zero."""

    y: dict = field(default_factory=dict)
    x: dict = field(default_factory=dict)
    basis: Optional[list] = None

    @property
    def cost(self) -> Fraction:
        return sum(self.y.values(), ZERO)

    def value(self, var) -> Fraction:
        if var[0] == "y":
            return self.y.get(var[1], ZERO)
        return self.x.get((var[1], var[2]), ZERO)

    def copy(self) -> "FractionalSolution":
        return FractionalSolution(dict(self.y), dict(self.x), self.basis)

    def flow_out(self, copy, points=None) -> Fraction:
        if points is None:
            return sum((v for (c, _), v in self.x.items() if c == copy), ZERO)
        pts = set(points)
        return sum((v for (c, p), v in self.x.items() if c == copy and p in pts), ZERO)

    def inflow(self, point, copies=None) -> Fraction:
        if copies is None:
            return sum((v for (_, p), v in self.x.items() if p == point), ZERO)
        cs = set(copies)
        return sum((v for (c, p), v in self.x.items() if p == point and c in cs), ZERO)

    def served_by(self, copy) -> list:
        return sorted(p for (c, p), v in self.x.items() if c == copy and v > 0)

    def servers(self, point) -> list:
        return sorted(c for (c, p), v in self.x.items() if p == point and v > 0)

    def prune(self) -> None:
        for k in [k for k, v in self.x.items() if v == 0]:
            del self.x[k]


# ---------------------------------------------------------------- builders


def _covering_model(name, instance, copies, points, caps, demands=None):
    """Shared constructor: ``copies`` is a list of (key, ball id)."""
    variables, objective, rows, upper = [], {}, [], {}
    pairs = []
    for key, ball in copies:
        yv = ("y", key)
        variables.append(yv)
        objective[yv] = ONE
        upper[yv] = ONE
    for key, ball in copies:
        for p in points:
            if contains(instance, ball, p):
                xv = ("x", key, p)
                variables.append(xv)
                pairs.append((key, ball, p))
    for key, ball, p in pairs:
        rows.append(Row(("open", key, p), {("x", key, p): ONE, ("y", key): -ONE}, LE, ZERO))
    for key, ball in copies:
        coeffs = {("x", k, p): ONE for (k, b, p) in pairs if k == key}
        coeffs[("y", key)] = -Fraction(caps[key])
        rows.append(Row(("cap", key), coeffs, LE, ZERO))
    for p in points:
        coeffs = {("x", k, q): ONE for (k, b, q) in pairs if q == p}
        if demands is None:
            if not coeffs:
                raise InfeasibleError(f"point {p} is contained in no ball")
            rows.append(Row(("flow", p), coeffs, EQ, ONE))
        else:
            rows.append(Row(("demand", p), coeffs, GE, Fraction(demands[p])))
    return LPModel(name, variables, objective, rows, upper)


def build_mmcc_lp(instance: Instance) -> LPModel:
    """Natural relaxation: open, capacity, unit flow, domain constraints."""
    copies = [(b.id, b.id) for b in instance.balls]
    caps = {b.id: b.capacity for b in instance.balls}
    return _covering_model("MMCC-LP", instance, copies, list(instance.clients), caps)


def build_aux1_lp(instance, heavy, light, points, scaled_caps) -> LPModel:
    """First auxiliary relaxation over heavy (H1) and light (L1) copies and ``points``."""
    from .rounding.config import Copy

    copies = [(Copy(b, "H1"), b) for b in sorted(heavy)]
    copies += [(Copy(b, "L1"), b) for b in sorted(light)]
    caps = {key: scaled_caps[b] for key, b in copies}
    return _covering_model("AUX-LP1", instance, copies, sorted(points), caps)


def build_aux2_lp(instance, light, points, scaled_caps, demands) -> LPModel:
    """Second auxiliary relaxation: L2 copies, coverage at least each demand."""
    from .rounding.config import Copy

    copies = [(Copy(b, "L2"), b) for b in sorted(light)]
    caps = {key: scaled_caps[b] for key, b in copies}
    return _covering_model("AUX-LP2", instance, copies, sorted(points), caps, demands)


# ---------------------------------------------------------------- feasibility


@dataclass(frozen=True)
class Violation:
    name: tuple
    rel: str
    lhs: Fraction
    rhs: Fraction

    @property
    def excess(self) -> Fraction:
        """Amount by which the constraint is violated (always positive)."""
        if self.rel == LE:
            return self.lhs - self.rhs
        if self.rel == GE:
            return self.rhs - self.lhs
        return abs(self.lhs - self.rhs)

    def __str__(self):
        return (
            f"{self.name}: {format_rational(self.lhs)} {self.rel} "
            f"{format_rational(self.rhs)} violated by {format_rational(self.excess)}"
        )


def _holds(lhs, rel, rhs) -> bool:
    if rel == LE:
        return lhs <= rhs
    if rel == GE:
        return lhs >= rhs
    return lhs == rhs


def check_lp_feasibility(solution: FractionalSolution, model: LPModel) -> list:
    """Every violated constraint of ``model`` at ``solution``, with exact amounts.

    Nonzero values on variables the model does not have (pairs outside the
    ball) are reported as ``("coverage", copy, point)`` violations.
    """
    out = []
    for row in model.rows:
        lhs = sum((c * solution.value(v) for v, c in row.coeffs.items()), ZERO)
        if not _holds(lhs, row.rel, row.rhs):
            out.append(Violation(row.name, row.rel, lhs, row.rhs))
    for var in model.variables:
        val = solution.value(var)
        if val < 0:
            out.append(Violation(("nonneg",) + var[1:], GE, val, ZERO))
        ub = model.upper.get(var)
        if ub is not None and val > ub:
            out.append(Violation(("ub",) + var[1:], LE, val, ub))
    copies = {v[1] for v in model.variables if v[0] == "y"}
    for key, val in sorted(solution.y.items(), key=repr):
        if key not in copies and val != 0:
            out.append(Violation(("unknown", key), EQ, val, ZERO))
    for (key, p), val in sorted(solution.x.items(), key=repr):
        if val != 0 and ("x", key, p) not in model.index:
            out.append(Violation(("coverage", key, p), EQ, val, ZERO))
    return out


# ---------------------------------------------------------------- simplex


@dataclass
class _StandardForm:
    columns: list  # column names: structural keys, then ("slack"|"surplus", row)
    cost: list
    rows: list  # (dict col -> coeff, rhs, name)


def _standard_form(model: LPModel) -> _StandardForm:
    columns = list(model.variables)
    cost = [model.objective.get(v, ZERO) for v in columns]
    rows = []
    all_rows = list(model.rows)
    for v in model.variables:
        if v in model.upper:
            all_rows.append(Row(("ub",) + tuple(v), {v: ONE}, LE, model.upper[v]))
    for row in all_rows:
        coeffs = {model.index[v]: Fraction(c) for v, c in row.coeffs.items() if c != 0}
        if row.rel != EQ:
            kind = "slack" if row.rel == LE else "surplus"
            columns.append((kind, row.name))
            cost.append(ZERO)
            coeffs[len(columns) - 1] = ONE if row.rel == LE else -ONE
        rows.append((coeffs, Fraction(row.rhs), row.name))
    return _StandardForm(columns, cost, rows)


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.d = {}
        self.dval = ZERO
        self.pivots = 0

    def set_objective(self, cost: dict):
        d = {k: v for k, v in cost.items() if v != 0}
        dval = ZERO
        for i, b in enumerate(self.basis):
            cb = cost.get(b, ZERO)
            if cb:
                for k, v in self.rows[i].items():
                    nv = d.get(k, ZERO) - cb * v
                    if nv:
                        d[k] = nv
                    else:
                        d.pop(k, None)
                dval -= cb * self.rhs[i]
        self.d, self.dval = d, dval

    @property
    def objective(self) -> Fraction:
        return -self.dval

    def pivot(self, r: int, c: int):
        prow = self.rows[r]
        piv = prow[c]
        prow = {k: v / piv for k, v in prow.items()}
        self.rows[r] = prow
        self.rhs[r] /= piv
        pr = self.rhs[r]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row.get(c)
            if not f:
                continue
            for k, v in prow.items():
                nv = row.get(k, ZERO) - f * v
                if nv:
                    row[k] = nv
                else:
                    del row[k]
            self.rhs[i] -= f * pr
        f = self.d.get(c)
        if f:
            for k, v in prow.items():
                nv = self.d.get(k, ZERO) - f * v
                if nv:
                    self.d[k] = nv
                else:
                    del self.d[k]
            self.dval -= f * pr
        self.basis[r] = c
        self.pivots += 1

    def run(self, allowed):
        """Bland's rule: lowest-index improving column, lowest-index leaving basic."""
        while True:
            entering = min((k for k, v in self.d.items() if v < 0 and k in allowed), default=None)
            if entering is None:
                return
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise UnboundedError(f"LP unbounded along column {entering}")
            self.pivot(best[1], entering)


def solve_lp(model: LPModel) -> FractionalSolution:
    """Exact optimal basic solution by two-phase simplex with Bland's rule.

    Raises ``InfeasibleError`` whose ``witness`` maps row names to Farkas
    multipliers ``u`` with ``u.A <= 0`` on every structural column and
    ``u.b > 0`` (rows in the model's own orientation).
    """
    sf = _standard_form(model)
    n_cols = len(sf.columns)
    rows, rhs, basis, ident, flips = [], [], [], [], []
    art_cols = []
    for coeffs, b, name in sf.rows:
        coeffs = dict(coeffs)
        flip = b < 0
        if flip:
            coeffs = {k: -v for k, v in coeffs.items()}
            b = -b
        slack = next(
            (k for k, v in coeffs.items() if k >= len(model.variables) and v == 1), None
        )
        if slack is not None:
            basis.append(slack)
            ident.append(slack)
        else:
            col = n_cols + len(art_cols)
            art_cols.append(col)
            coeffs[col] = ONE
            basis.append(col)
            ident.append(col)
        rows.append(coeffs)
        rhs.append(b)
        flips.append(flip)
    arts = set(art_cols)
    tab = _Tableau(rows, rhs, basis)
    if arts:
        tab.set_objective({a: ONE for a in arts})
        tab.run(allowed=set(range(n_cols)) | arts)
        if tab.objective > 0:
            witness = {}
            for r, (coeffs, b, name) in enumerate(sf.rows):
                c_id = ONE if ident[r] in arts else ZERO
                u = c_id - tab.d.get(ident[r], ZERO)
                if flips[r]:
                    u = -u
                if u:
                    witness[name] = u
            raise InfeasibleError(
                f"{model.name} infeasible (phase-1 value {tab.objective})", witness=witness
            )
        keep = []
        for i, b in enumerate(tab.basis):
            if b in arts:
                col = min((k for k, v in tab.rows[i].items() if k not in arts and v), default=None)
                if col is None:
                    continue  # redundant row
                tab.pivot(i, col)
            keep.append(i)
        tab.rows = [{k: v for k, v in tab.rows[i].items() if k not in arts} for i in keep]
        tab.rhs = [tab.rhs[i] for i in keep]
        tab.basis = [tab.basis[i] for i in keep]
    tab.set_objective({k: c for k, c in enumerate(sf.cost) if c})
    tab.run(allowed=set(range(n_cols)))
    if any(v < 0 for v in tab.d.values()):
        raise AssertionError("simplex terminated with a negative reduced cost")
    values = {b: tab.rhs[i] for i, b in enumerate(tab.basis)}
    sol = FractionalSolution()
    for k, var in enumerate(model.variables):
        v = values.get(k, ZERO)
        if var[0] == "y":
            sol.y[var[1]] = v
        elif v:
            sol.x[(var[1], var[2])] = v
    sol.basis = [sf.columns[b] for b in tab.basis]
    return sol


def resolve_basis(model: LPModel, basis: list) -> FractionalSolution:
    """Recompute the basic solution for ``basis`` (column names) by exact elimination."""
    sf = _standard_form(model)
    pos = {name: k for k, name in enumerate(sf.columns)}
    cols = [pos[name] for name in basis]
    mat = [[coeffs.get(c, ZERO) for c in cols] + [b] for coeffs, b, _ in sf.rows]
    m, k = len(mat), len(cols)
    r = 0
    pivcols = []
    for c in range(k):
        p = next((i for i in range(r, m) if mat[i][c] != 0), None)
        if p is None:
            raise ValueError("basis columns are linearly dependent")
        mat[r], mat[p] = mat[p], mat[r]
        pv = mat[r][c]
        mat[r] = [v / pv for v in mat[r]]
        for i in range(m):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivcols.append(c)
        r += 1
    for i in range(r, m):
        if mat[i][k] != 0:
            raise ValueError("basis is inconsistent with the right-hand side")
    values = {cols[c]: mat[i][k] for i, c in enumerate(pivcols)}
    sol = FractionalSolution()
    for idx, var in enumerate(model.variables):
        v = values.get(idx, ZERO)
        if var[0] == "y":
            sol.y[var[1]] = v
        elif v:
            sol.x[(var[1], var[2])] = v
    sol.basis = list(basis)
    return sol


def dump_lp(model: LPModel) -> str:
    """Human-readable constraint listing (debugging aid, not a stable format)."""

    def term(c, v):
        name = "y" + str(v[1]) if v[0] == "y" else f"x{v[1]},{v[2]}"
        return f"{format_rational(c)}*{name}"

    out = [f"# {model.name}: {len(model.variables)} variables, {len(model.rows)} rows"]
    out.append("minimize " + " + ".join(term(c, v) for v, c in model.objective.items()))
    for row in model.rows:
        lhs = " + ".join(term(c, v) for v, c in row.coeffs.items())
        out.append(f"{row.name}: {lhs} {row.rel} {format_rational(row.rhs)}")
    for v, ub in model.upper.items():
        out.append(f"0 <= {term(ONE, v)[4:]} <= {format_rational(ub)}")
    return "\n".join(out) + "\n"
