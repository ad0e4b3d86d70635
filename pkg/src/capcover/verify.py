"""Certificates for solutions and pipeline traces.

All comparisons are exact: distances and flows are rationals, expansion
factors live in Q(sqrt5). A failed check always carries a witness naming the
ids and values involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .field import QSqrt5, format_factor, format_rational
from .instance import Instance
from .lp import FractionalSolution
from .rounding.config import PipelineConfig
from .solution import RoundedSolution

ZERO = Fraction(0)


@dataclass
class Check:
    name: str
    passed: bool = True
    witness: str = ""


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def _record(self, name, failure: Optional[str]):
        self.checks.append(Check(name, failure is None, failure or ""))

    def format(self) -> str:
        return format_report(self)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, QSqrt5):
        return format_factor(v)
    return str(v)


def format_report(report: VerificationReport) -> str:
    """One ``[check name]`` block per check, in order, then a ``[metrics]`` block with sorted keys."""
    out = []
    for c in report.checks:
        out.append(f"[check {c.name}]")
        out.append("status = " + ("pass" if c.passed else "fail"))
        if not c.passed:
            out.append(f"witness = {c.witness}")
        out.append("")
    out.append("[metrics]")
    for k in sorted(report.metrics):
        out.append(f"{k} = {_fmt(report.metrics[k])}")
    return "\n".join(out) + "\n"


def parse_report(text: str) -> VerificationReport:
    rep = VerificationReport()
    section = None
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("[check "):
            section = Check(line[7:-1])
            rep.checks.append(section)
        elif line == "[metrics]":
            section = rep.metrics
        else:
            key, _, value = line.partition(" = ")
            if isinstance(section, Check):
                if key == "status":
                    section.passed = value == "pass"
                elif key == "witness":
                    section.witness = value
            elif section is rep.metrics:
                rep.metrics[key] = value
            else:
                raise ValueError(f"report line outside a block: {line!r}")
    return rep


def _normalize(solution):
    """``(y, x, factors)`` with y per ball, x per (ball, point), recorded factors or None."""
    if isinstance(solution, RoundedSolution):
        y = {b: Fraction(1) for b in solution.open}
        return y, dict(solution.x), dict(solution.open)
    if isinstance(solution, FractionalSolution):
        return dict(solution.y), dict(solution.x), None
    if isinstance(solution, tuple) and len(solution) == 2:
        factors, phi = solution
        rs = RoundedSolution.from_assignment(factors, phi)
        return _normalize(rs)
    raise TypeError(f"cannot verify a {type(solution).__name__}")


def check_solution(
    instance: Instance,
    solution,
    beta_limit,
    integral: bool = False,
    lp_opt: Optional[Fraction] = None,
    opt: Optional[int] = None,
) -> VerificationReport:
    """Check flows, capacities and coverage at expansion ``beta_limit``.

    ``solution`` is a ``RoundedSolution``, a ``FractionalSolution`` of the
    natural relaxation, or a ``(factors, phi)`` pair. In integral mode every
    y and x must be 0 or 1.
    """
    beta = QSqrt5.coerce(beta_limit)
    y, x, factors = _normalize(solution)
    rep = VerificationReport()
    m, n = len(instance.balls), instance.n_points
    clients = set(instance.clients)

    bad_ref = next(
        (f"ball {b} point {p}" for (b, p) in x if not (0 <= b < m and 0 <= p < n)), None
    ) or next((f"ball {b}" for b in y if not 0 <= b < m), None)
    rep._record("references", bad_ref)
    if bad_ref:
        return rep

    fail = None
    for (b, p), v in sorted(x.items()):
        if v < 0:
            fail = f"x[{b},{p}] = {format_rational(v)} < 0"
            break
        if v and p not in clients:
            fail = f"non-client point {p} receives {format_rational(v)} from ball {b}"
            break
    inflow = {}
    for (b, p), v in x.items():
        inflow[p] = inflow.get(p, ZERO) + v
    if fail is None:
        for p in sorted(clients):
            if inflow.get(p, ZERO) != 1:
                fail = f"point {p} receives {format_rational(inflow.get(p, ZERO))} != 1"
                break
    rep._record("flow", fail)

    load = {}
    for (b, p), v in x.items():
        load[b] = load.get(b, ZERO) + v
    fail = None
    for b in sorted(load):
        cap = instance.balls[b].capacity * y.get(b, ZERO)
        if load[b] > cap:
            fail = f"ball {b} load {format_rational(load[b])} > {format_rational(cap)}"
            break
    rep._record("capacity", fail)

    fail = None
    for (b, p), v in sorted(x.items()):
        if v > y.get(b, ZERO):
            fail = f"x[{b},{p}] = {format_rational(v)} > y[{b}] = {format_rational(y.get(b, ZERO))}"
            break
    rep._record("open", fail)

    fail = None
    max_exp = ZERO
    for (b, p), v in sorted(x.items()):
        if not v:
            continue
        d, r = instance.dist(b, p), instance.balls[b].radius
        max_exp = max(max_exp, d / r)
        if QSqrt5.coerce(d) > beta * r and fail is None:
            fail = (f"point {p} at distance {format_rational(d)} from ball {b} "
                    f"(radius {format_rational(r)}) exceeds {format_factor(beta)} * radius")
    rep._record("coverage", fail)

    if factors is not None:
        fail = None
        for (b, p), v in sorted(x.items()):
            if v and QSqrt5.coerce(instance.dist(b, p)) > factors[b] * instance.balls[b].radius:
                fail = f"point {p} outside ball {b} expanded by its recorded {format_factor(factors[b])}"
                break
        rep._record("recorded_expansion", fail)

    if integral:
        fail = next((f"y[{b}] = {format_rational(v)}" for b, v in sorted(y.items()) if v not in (0, 1)), None)
        fail = fail or next(
            (f"x[{b},{p}] = {format_rational(v)}" for (b, p), v in sorted(x.items()) if v not in (0, 1)),
            None,
        )
        rep._record("integral", fail)

    cost = sum(y.values(), ZERO)
    rep.metrics["cost"] = cost
    rep.metrics["max_expansion"] = max_exp
    if factors:
        rep.metrics["max_recorded_expansion"] = max(factors.values())
    if lp_opt:
        rep.metrics["cost_over_lp"] = cost / lp_opt
    if opt:
        rep.metrics["cost_over_opt"] = cost / opt
    return rep


def check_trace(trace, cfg: Optional[PipelineConfig] = None, sigma_star_cost=None) -> VerificationReport:
    """Replay the y-accumulation of heavy balls from a pipeline trace and check its bounds.

    Checks, with exact arithmetic: every opened light ball drew at least
    ``k/60`` from heavy balls; every heavy ball's accumulation stays below
    ``1 + 10 alpha``; after each opening a heavy ball's available capacity is at
    least its accumulation times ``k``; the number of opened light balls is at
    most ``60((1 + 10 alpha)|H1| + sum ybar)``; clusters contribute at most
    ``top_k`` balls each and ``top_k |H1| + |O|`` is within the selection bound;
    the final cost is within ``(90 + 600 alpha) / alpha`` times the LP cost
    (6000 at the default alpha).
    """
    cfg = cfg or PipelineConfig()
    rep = VerificationReport()
    alpha = cfg.alpha
    events = list(trace)
    if not events:
        for name in ("trace_shape", "flow_credit", "accumulation_upper",
                     "capacity_credit", "opened_count", "selection_cost", "final_cost"):
            rep._record(name, None)
        return rep

    init = next((e for e in events if e.kind == "init"), None)
    summary = next((e for e in events if e.kind == "summary"), None)
    shape = None
    if init is None:
        shape = "no init event"
    elif summary is None:
        shape = "no summary event"
    elif init["alpha"] != alpha:
        shape = f"trace alpha {format_rational(init['alpha'])} != configured {format_rational(alpha)}"
    rep._record("trace_shape", shape)
    if shape:
        return rep

    heavy = list(init["heavy"])
    ybar = dict(init["ybar"])
    acc = {h: ZERO for h in heavy}
    upper = 1 + 10 * alpha
    credit_fail = upper_fail = cap_fail = None
    last_k = None
    opened = 0
    max_acc = ZERO
    for idx, ev in enumerate(events):
        try:
            if ev.kind == "absorb":
                acc[ev["heavy"]] -= ybar[ev["light"]]
            elif ev.kind == "open":
                opened += 1
                k, f, frm = ev["k"], ev["F"], ev["from"]
                if credit_fail is None and sum(frm.values(), ZERO) != f:
                    credit_fail = f"event {idx}: F = {format_rational(f)} is not the sum of its parts"
                if credit_fail is None and f < k / 60:
                    credit_fail = (f"event {idx} (open {ev['light']}): F = {format_rational(f)} "
                                   f"< k/60 = {format_rational(k / 60)}")
                for h, v in frm.items():
                    acc[h] += v / k
                    max_acc = max(max_acc, acc[h])
                    if upper_fail is None and acc[h] >= upper:
                        upper_fail = (f"event {idx}: accumulation of heavy {h} reaches "
                                      f"{format_rational(acc[h])} >= {format_rational(upper)}")
                last_k = k
            elif ev.kind == "capacity":
                for h, ac in ev["ac"].items():
                    if cap_fail is None and ac < acc[h] * last_k:
                        cap_fail = (f"event {idx}: AC of heavy {h} = {format_rational(ac)} < "
                                    f"{format_rational(acc[h])} * {format_rational(last_k)}")
        except (KeyError, TypeError) as exc:
            rep._record("trace_shape_events", f"event {idx} ({ev.kind}) malformed: {exc!r}")
            return rep
    rep._record("flow_credit", credit_fail)
    rep._record("accumulation_upper", upper_fail)
    rep._record("capacity_credit", cap_fail)

    n_heavy = len(heavy)
    ybar_sum = sum(ybar.values(), ZERO)
    bound_o = 60 * (upper * n_heavy + ybar_sum)
    rep._record("opened_count", None if opened <= bound_o else
                f"|O| = {opened} > {format_rational(bound_o)}")
    if summary["O"] != opened or summary["H1"] != n_heavy:
        rep._record("summary_consistent", f"summary H1={summary['H1']} O={summary['O']} "
                    f"but replay gives H1={n_heavy} O={opened}")
    else:
        rep._record("summary_consistent", None)

    fail = None
    if summary["selected"] > cfg.top_k * n_heavy:
        fail = f"{summary['selected']} balls selected from {n_heavy} clusters"
    elif sigma_star_cost is not None:
        lhs = cfg.top_k * n_heavy + opened
        rhs = cfg.selection_bound_factor * Fraction(sigma_star_cost)
        if lhs > rhs:
            fail = f"{cfg.top_k}|H1| + |O| = {lhs} > {format_rational(rhs)}"
    rep._record("selection_cost", fail)

    fail = None
    if sigma_star_cost is not None:
        rhs = cfg.cost_bound_factor * Fraction(sigma_star_cost)
        if summary["cost"] > rhs:
            fail = f"cost {summary['cost']} > {format_rational(rhs)}"
        o_rhs = 20 * Fraction(sigma_star_cost) / alpha
        if fail is None and summary["Oprime"] > o_rhs:
            fail = f"|O'| = {summary['Oprime']} > {format_rational(o_rhs)}"
    rep._record("final_cost", fail)

    rep.metrics["opened"] = opened
    rep.metrics["heavy"] = n_heavy
    rep.metrics["max_accumulation"] = max_acc
    rep.metrics["cost"] = summary["cost"]
    return rep
