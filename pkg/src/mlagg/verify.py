"""Empirical checks of the structural observations and amortization lemmas.

Every check reads a finished trace; nothing here touches policy state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .bounds import caterpillar_bound, depth_bound
from .caterpillar import CaterpillarPolicy
from .engine import TraceRecord
from .hpd import prefix_cost
from .model import Instance, Solution, validate_solution


@dataclass(frozen=True)
class Violation:
    check: str
    transmission: int | None
    detail: str

    def __str__(self) -> str:
        at = "run" if self.transmission is None else f"#{self.transmission}"
        return f"{self.check} [{at}]: {self.detail}"


@dataclass
class RunReport:
    alg: str
    feasible: bool
    alg_cost: Fraction
    unanticipated_total: Fraction
    amortized_factor: Fraction
    violations: list[Violation] = field(default_factory=list)

    @property
    def amortized_ok(self) -> bool:
        return self.alg_cost <= self.amortized_factor * self.unanticipated_total

    def failed(self, check: str) -> list[Violation]:
        return [v for v in self.violations if v.check == check]

    @property
    def ok(self) -> bool:
        return self.feasible and not self.violations


def amortized_factor(policy, tree) -> Fraction:
    """The multiplier on sum c(unanticipated) that bounds the total cost."""
    if isinstance(policy, CaterpillarPolicy):
        return caterpillar_bound(policy.decomposition.dimension, policy.theta1, policy.theta2)
    return depth_bound(tree.max_depth, policy.theta)


def expansion_factor(policy, tree) -> Fraction:
    """Per-transmission multiplier on c(unanticipated) that bounds c(V^E)."""
    if isinstance(policy, CaterpillarPolicy):
        H = policy.decomposition.dimension
        return (1 + 1 / policy.theta1) ** (H + 1) * (1 + 1 / policy.theta2) ** H
    return (1 + 1 / policy.theta) ** tree.max_depth


def check_observations(tree, trace: list[TraceRecord]) -> list[Violation]:
    out = []
    for rec in trace:
        i = rec.index
        if not tree.is_rooted_subtree(rec.VE):
            out.append(Violation("rooted_expansion", i, f"V^E {sorted(rec.VE)} is not a rooted subtree"))
        if rec.VE & rec.VI:
            out.append(Violation("disjoint", i, f"V^E and V^I share {sorted(rec.VE & rec.VI)}"))
        for v, inv in rec.invest.items():
            bad = [w for w in inv if w == v or not tree.in_subtree(w, v)]
            if bad:
                out.append(Violation("invest_in_subtree", i, f"I_{v} contains {sorted(bad)} outside its strict subtree"))
        for ev in rec.invest_events:
            if not ev.ancestors_covered:
                out.append(Violation("invest_order", i, f"invest({ev.investor}, {ev.target}) before its ancestors were covered"))
        for u in rec.VE:
            for v in rec.VE:
                if u == v or not tree.is_ancestor(u, v):
                    continue
                if any(tree.in_subtree(w, v) for w in rec.invest[u]) and not rec.next[u] >= rec.next[v]:
                    out.append(Violation("next_monotone", i, f"next'_{u}={rec.next[u]} < next'_{v}={rec.next[v]}"))
    return out


def check_budget_lemmas(policy, tree, trace: list[TraceRecord]) -> list[Violation]:
    """Anticipated vertices were expanded earlier and carry their full investment budget."""
    out = []
    cater = isinstance(policy, CaterpillarPolicy)
    last_exp: dict[int, TraceRecord] = {}
    for rec in trace:
        i = rec.index
        recently = set()
        for v in rec.anticipated:
            prev = last_exp.get(v)
            if prev is None:
                out.append(Violation("anticipated_expanded", i, f"anticipated {v} was never an expansion vertex before"))
                continue
            if cater and v in prev.disproportional:
                recently.add(v)
        for v in rec.anticipated:
            if v not in last_exp:
                continue
            got = tree.set_cost(rec.pre_invest[v])
            if not cater:
                need = policy.theta * tree.cost[v]
                if got < need:
                    out.append(Violation("depth_budget", i, f"c(I_{v})={got} < theta*c({v})={need}"))
                continue
            dec = policy.decomposition
            if v in recently:
                need = policy.theta1 * prefix_cost(dec, tree, v)
                if got < need:
                    out.append(Violation("deepest_budget", i, f"c(I_{v})={got} < theta1*c(p({v}))={need}"))
            below = [w for w in recently if dec.path_of[w] == dec.path_of[v] and tree.in_subtree(w, v)]
            if not below:
                need = policy.theta2 * tree.cost[v]
                if got < need:
                    out.append(Violation("path_budget", i, f"c(I_{v})={got} < theta2*c({v})={need}"))
        for v in rec.VE:
            last_exp[v] = rec
    return out


def check_run(instance: Instance, policy, solution: Solution, trace: list[TraceRecord]) -> RunReport:
    tree = instance.tree
    report = validate_solution(instance, solution)
    total_abar = sum((r.unanticipated_cost for r in trace), Fraction(0))
    rep = RunReport(
        alg=policy.name,
        feasible=report.feasible and report.cost_ok,
        alg_cost=solution.total_cost,
        unanticipated_total=total_abar,
        amortized_factor=amortized_factor(policy, tree),
    )
    rep.violations += check_observations(tree, trace)
    rep.violations += check_budget_lemmas(policy, tree, trace)

    if isinstance(policy, CaterpillarPolicy):
        mult = policy.theta1 + policy.theta2
    else:
        mult = policy.theta
    ve_total = sum((tree.set_cost(r.VE) for r in trace), Fraction(0))
    vi_total = sum((tree.set_cost(r.VI) for r in trace), Fraction(0))
    if vi_total > mult * ve_total:
        rep.violations.append(Violation("budget", None, f"sum c(V^I)={vi_total} > {mult}*sum c(V^E)={mult * ve_total}"))
    for r in trace:
        spent = sum((ev.amount for ev in r.invest_events if ev.investor in r.VE), Fraction(0))
        if spent > sum(r.assigned_budget.values(), Fraction(0)):
            rep.violations.append(Violation("budget", r.index, "spent more than the assigned budgets"))

    ef = expansion_factor(policy, tree)
    for r in trace:
        if tree.set_cost(r.VE) > ef * r.unanticipated_cost:
            rep.violations.append(Violation(
                "expansion", r.index, f"c(V^E)={tree.set_cost(r.VE)} > {ef}*c(Abar)={ef * r.unanticipated_cost}"
            ))
    if not rep.amortized_ok:
        rep.violations.append(Violation(
            "amortized", None, f"ALG={rep.alg_cost} > {rep.amortized_factor}*{total_abar}"
        ))
    return rep
