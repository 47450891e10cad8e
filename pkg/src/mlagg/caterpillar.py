"""Caterpillar-dimension-parameterized policy.

Same expansion as :class:`~mlagg.depth.DepthPolicy`.  In the investment
stage the deepest expansion vertex on each heavy path gets the enlarged
budget ``theta1 * c(p(v))``; the other expansion vertices on that path get
``theta2 * c(v)`` and hand over to the deepest one as soon as their next
target lies beneath it.
"""
from __future__ import annotations

from fractions import Fraction

from .depth import DepthPolicy
from .hpd import Decomposition, min_caterpillar_decomposition, prefix_cost
from .model import RootedTree, to_fraction


def default_thetas(dimension: int) -> tuple[Fraction, Fraction]:
    return Fraction(2 * dimension + 1), Fraction(2 * dimension)


class CaterpillarPolicy(DepthPolicy):
    name = "caterpillar"

    def __init__(self, tree: RootedTree, theta1=None, theta2=None, decomposition: Decomposition | None = None):
        self.decomposition = decomposition or min_caterpillar_decomposition(tree)
        if set(self.decomposition.path_of) != set(tree.parent):
            raise ValueError("decomposition does not cover the tree")
        d1, d2 = default_thetas(self.decomposition.dimension)
        self.theta1 = d1 if theta1 is None else to_fraction(theta1)
        self.theta2 = d2 if theta2 is None else to_fraction(theta2)
        if self.theta1 <= 0 or self.theta2 <= 0:
            raise ValueError("theta1 and theta2 must be positive")
        super().__init__(tree, theta=1)
        self.theta = None
        self._prefix = {v: prefix_cost(self.decomposition, tree, v) for v in tree.parent}
        self.deepest: dict[int, int] = {}
        self.last_disproportional: frozenset = frozenset()

    @property
    def params(self) -> dict:
        return {"theta1": self.theta1, "theta2": self.theta2, "H": self.decomposition.dimension}

    def before_investment(self) -> None:
        # V^E is fixed from here on, so the deepest vertex per path is too
        depth = self.tree.depth
        path_of = self.decomposition.path_of
        deepest: dict[int, int] = {}
        for v in self.state.VE:
            p = path_of[v]
            if p not in deepest or depth[v] > depth[deepest[p]]:
                deepest[p] = v
        self.deepest = deepest
        self.last_disproportional = frozenset(deepest.values())

    def deepest_on_path(self, v: int) -> int:
        return self.deepest[self.decomposition.path_of[v]]

    def budget(self, v: int) -> Fraction:
        if v == self.deepest_on_path(v):
            return self.theta1 * self._prefix[v]
        return self.theta2 * self.tree.cost[v]

    def spend(self, v: int) -> None:
        st = self.state
        down = self.deepest_on_path(v)
        while st.budgets[v] > 0:
            rho = self.sim.first_pending_below(v)
            if rho is None:
                break
            target = self.first_uncovered_on_path(v, rho.vertex)
            if v != down and self.tree.in_subtree(target, down):
                # reuse the deepest vertex's fresh investments; next_v is still set by the caller
                st.invest_set[v] = set(st.invest_set[down])
                break
            self.invest(v, target)
