"""Depth-parameterized memory policy.

Each deadline event builds the root path of the expiring request, grows it
through remembered investments whose timers have run out, and then lets
every expansion vertex (deepest first) spend a budget proportional to its
cost on vertices below it, in deadline order.
"""
from __future__ import annotations

from fractions import Fraction

from .engine import INF, AlgoState, Simulator
from .model import Request, RootedTree, to_fraction


def default_theta(depth: int) -> Fraction:
    # a single-vertex tree has D = 0; any positive value is valid there
    return Fraction(depth) if depth > 0 else Fraction(1)


class DepthPolicy:
    name = "depth"

    def __init__(self, tree: RootedTree, theta=None):
        self.tree = tree
        self.theta = default_theta(tree.max_depth) if theta is None else to_fraction(theta)
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        self.state = AlgoState.initial(tree)
        self.sim: Simulator | None = None
        self.t = None

    @property
    def params(self) -> dict:
        return {"theta": self.theta}

    def on_deadline(self, sim: Simulator, t, critical: Request):
        self.sim = sim
        self.t = t
        st = self.state
        st.VE = set(self.tree.root_path(critical.vertex))
        st.VI = set()
        st.budgets = {}
        self.expansion_stage(self.tree.root)
        self.before_investment()
        self.investment_stage(self.tree.root)
        return set(st.VE), set(st.VI)

    def before_investment(self) -> None:
        pass

    def children_in_ve(self, v: int) -> list[int]:
        VE = self.state.VE
        return [c for c in self.tree.children[v] if c in VE]

    def expansion_stage(self, v: int) -> None:
        st = self.state
        if self.t >= st.next[v]:
            for w in sorted(st.invest_set[v]):
                st.VE.update(self.tree.path_between(v, w))
        for c in self.children_in_ve(v):
            self.expansion_stage(c)

    def first_uncovered_on_path(self, v: int, target: int) -> int:
        st = self.state
        for u in self.tree.path_between(v, target):
            if not st.covered(u):
                return u
        raise AssertionError("pending request vertex is already covered")

    def budget(self, v: int) -> Fraction:
        return self.theta * self.tree.cost[v]

    def investment_stage(self, v: int) -> None:
        st = self.state
        for c in self.children_in_ve(v):
            self.investment_stage(c)
        st.invest_set[v] = set()
        st.budgets[v] = self.budget(v)
        self.sim.note_budget(v, st.budgets[v])
        self.spend(v)
        self.set_next(v)

    def spend(self, v: int) -> None:
        st = self.state
        while st.budgets[v] > 0:
            rho = self.sim.first_pending_below(v)
            if rho is None:
                break
            self.invest(v, self.first_uncovered_on_path(v, rho.vertex))

    def set_next(self, v: int) -> None:
        rho = self.sim.first_pending_below(v)
        self.state.next[v] = INF if rho is None else rho.deadline

    def invest(self, v: int, target: int) -> None:
        st = self.state
        delta = min(st.budgets[v], st.ell[target])
        st.budgets[v] -= delta
        st.ell[target] -= delta
        st.invest_set[v].add(target)
        done = st.ell[target] == 0
        self.sim.note_invest(v, target, delta, done)
        if done:
            st.VI.add(target)
            st.ell[target] = self.tree.cost[target]
