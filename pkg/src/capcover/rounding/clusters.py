"""Cluster Formation over the first auxiliary solution.

Heavy copies absorb intersecting light copies whose whole flow fits in their
available capacity; when no absorption is possible the light copy with the
largest ``k = min(U', |served points|)`` is opened and pulls flow towards
itself, mostly from heavy copies. The flow a heavy copy gives away is what
later lets it absorb more light copies.

Heavy copies keep, per point, a record of how much of their flow was carried
in from each absorbed light copy. Selection of Balls hands that flow back to
a light copy when the light copy is chosen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..lp import FractionalSolution
from .config import Copy, PipelineConfig
from .prepare import reroute, reroute_ball, require
from .trace import Event

ZERO = Fraction(0)


@dataclass
class ClusterState:
    instance: object
    cfg: PipelineConfig
    points: list  # P1, ascending
    solution: FractionalSolution  # mutable copy of sigma-bar
    caps: dict  # copy -> U'
    heavy: list
    lam: list  # light copies not yet resolved
    opened: list = field(default_factory=list)
    clusters: dict = field(default_factory=dict)
    dropped: list = field(default_factory=list)
    carried: dict = field(default_factory=dict)  # (heavy, point) -> {light: amount}
    ybar0: dict = field(default_factory=dict)
    k_values: dict = field(default_factory=dict)  # opened copy -> k_t
    heavy_credit: dict = field(default_factory=dict)  # opened copy -> {heavy: F}
    trace: list = field(default_factory=list)

    @classmethod
    def initial(cls, instance, cfg, sigma_bar, caps, heavy, light, points):
        h1 = [Copy(b, "H1") for b in sorted(heavy)]
        l1 = [Copy(b, "L1") for b in sorted(light)]
        copy_caps = {c: caps[c.ball] for c in h1 + l1}
        state = cls(
            instance=instance,
            cfg=cfg,
            points=sorted(points),
            solution=sigma_bar.copy(),
            caps=copy_caps,
            heavy=h1,
            lam=list(l1),
            clusters={h: [] for h in h1},
            ybar0={c: sigma_bar.y[c] for c in l1},
        )
        state._meets = {
            (h, l): instance.intersects(h.ball, l.ball) for h in h1 for l in l1
        }
        state.trace.append(
            Event(
                "init",
                {
                    "alpha": cfg.alpha,
                    "heavy": [h.ball for h in h1],
                    "light": [c.ball for c in l1],
                    "ybar": {c.ball: state.ybar0[c] for c in l1},
                },
            )
        )
        return state

    # -- bookkeeping -------------------------------------------------------

    def load(self, copy) -> Fraction:
        return sum((v for (c, _), v in self.solution.x.items() if c == copy), ZERO)

    def available(self, copy) -> Fraction:
        return self.caps[copy] - self.load(copy)

    def heavy_inflow(self, point) -> Fraction:
        return sum((self.solution.x.get((h, point), ZERO) for h in self.heavy), ZERO)

    def own_flow(self, heavy, point) -> Fraction:
        layers = self.carried.get((heavy, point), {})
        return self.solution.x.get((heavy, point), ZERO) - sum(layers.values(), ZERO)

    def _move(self, point, sources, target, amount) -> dict:
        """Reroute and keep the carried-flow records of drained heavy copies in step."""
        taken = reroute(self.solution, point, list(sources), target, amount,
                        available=self.available(target))
        for src, amt in taken.items():
            if src.tag != "H1":
                continue
            own = self.own_flow(src, point) + amt  # value before the drain
            rest = amt - min(own, amt)
            layers = self.carried.get((src, point), {})
            for light in sorted(layers):
                if rest == 0:
                    break
                t = min(layers[light], rest)
                layers[light] -= t
                rest -= t
        return taken

    def check_invariants(self):
        sol = self.solution
        alpha = self.cfg.alpha
        for p in self.points:
            require(sol.inflow(p) == 1, f"flow conservation broken at point {p}")
        for c in self.heavy + self.opened:
            require(self.available(c) >= 0, f"capacity of {c} exceeded")
        lam = set(self.lam)
        for p in self.points:
            if any(sol.x.get((c, p), ZERO) > 0 for c in lam):
                require(
                    self.heavy_inflow(p) >= 1 - 4 * alpha,
                    f"point {p} served by an unresolved light copy gets < 1-4a heavy flow",
                )
        for (h, p), layers in self.carried.items():
            require(all(v >= 0 for v in layers.values()), "negative carried flow")
            require(self.own_flow(h, p) >= 0, f"carried flow exceeds flow of {h} at {p}")

    # -- the two steps -----------------------------------------------------

    def absorb_all(self):
        """Absorb until no heavy copy can take a whole intersecting light copy."""
        progress = True
        while progress and self.lam:
            progress = False
            for h in self.heavy:
                for light in self.lam:
                    if not self._meets[(h, light)]:
                        continue
                    out = self.load(light)
                    if self.available(h) < out:
                        continue
                    moved = reroute_ball(self.solution, light, h)
                    for p, v in moved.items():
                        layers = self.carried.setdefault((h, p), {})
                        layers[light] = layers.get(light, ZERO) + v
                    self.clusters[h].append(light)
                    self.lam.remove(light)
                    self.trace.append(
                        Event("absorb", {"heavy": h.ball, "light": light.ball, "flow": out})
                    )
                    progress = True
                    break
                if progress:
                    break

    def open_next(self):
        """Open the unresolved light copy with the largest k and pull flow to it."""
        sol = self.solution
        alpha = self.cfg.alpha
        served = {c: sol.served_by(c) for c in self.lam}
        ks = {c: min(self.caps[c], Fraction(len(served[c]))) for c in self.lam}
        kmax = max(ks.values())
        if kmax == 0:
            # flowless and meeting no heavy copy: nothing to open for
            for c in self.lam:
                self.dropped.append(c)
                self.trace.append(Event("drop", {"light": c.ball}))
            self.lam = []
            return
        t = min(c for c in self.lam if ks[c] == kmax)
        k = ks[t]
        a_t = served[t]
        self.lam.remove(t)
        self.opened.append(t)
        lam = set(self.lam)
        heavy = set(self.heavy)
        credit = {}

        def pull_everything(p):
            need = 1 - sol.x.get((t, p), ZERO)
            amt = min(need, self.available(t))
            taken = self._move(p, [c for c in sol.servers(p) if c != t], t, amt)
            for c, v in taken.items():
                if c in heavy:
                    credit[c] = credit.get(c, ZERO) + v

        def pull_light(p):
            srcs = [c for c in sol.servers(p) if c in lam]
            amt = sum((sol.x[(c, p)] for c in srcs), ZERO)
            require(amt <= self.available(t), f"no room in {t} for light flow of point {p}")
            self._move(p, srcs, t, amt)

        def pull_heavy(p, amount):
            srcs = [c for c in sol.servers(p) if c in heavy]
            amount = min(amount, sum((sol.x[(c, p)] for c in srcs), ZERO))
            taken = self._move(p, srcs, t, amount)
            for c, v in taken.items():
                credit[c] = credit.get(c, ZERO) + v

        scaled_alpha = self.cfg.light_capacity_divisor * alpha
        if k > 2:
            case = "1"
            for p in a_t[: math.floor((1 - scaled_alpha) * k)]:
                pull_everything(p)
        elif k >= 1:
            if self.caps[t] >= len(a_t):
                case = "2a"
                for p in a_t:
                    pull_everything(p)
            else:
                case = "2b"
                p = a_t[0]
                pull_light(p)
                f = sol.x.get((t, p), ZERO)
                require(f <= 4 * alpha, f"opened copy {t} holds {f} > 4a of point {p}")
                pull_heavy(p, min(self.available(t), 1 - f))
        else:
            case = "3"
            p = a_t[0]
            pull_light(p)
            pull_heavy(p, self.available(t))

        credit = {h: v for h, v in sorted(credit.items()) if v}
        self.k_values[t] = k
        self.heavy_credit[t] = credit
        self.trace.append(
            Event(
                "open",
                {
                    "light": t.ball,
                    "k": k,
                    "F": sum(credit.values(), ZERO),
                    "case": case,
                    "from": {h.ball: v for h, v in credit.items()},
                },
            )
        )
        self.trace.append(
            Event(
                "capacity",
                {"after": t.ball, "ac": {h.ball: self.available(h) for h in self.heavy}},
            )
        )

    def finish(self):
        for c in self.opened:
            self.solution.y[c] = Fraction(1)
        for h in self.heavy:
            for light in self.clusters[h]:
                self.solution.y[light] = ZERO
        for c in self.dropped:
            self.solution.y[c] = ZERO
        self.solution.prune()


def cluster_formation(state: ClusterState) -> ClusterState:
    """Run Cluster Formation to completion, checking the running invariants after every step."""
    state.check_invariants()
    while state.lam:
        state.absorb_all()
        state.check_invariants()
        if not state.lam:
            break
        state.open_next()
        state.check_invariants()
    state.finish()
    for h in state.heavy:
        require(
            state.load(h) <= state.instance.balls[h.ball].capacity,
            f"cluster of {h} carries more than its capacity",
        )
    return state
