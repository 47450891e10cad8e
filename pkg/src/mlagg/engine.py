"""Event loop for the online process.

Only deadlines are events: whenever the earliest-deadline unserved request
expires, the policy builds a transmission.  Each transmission is recorded
with enough instrumentation to check the analysis invariants afterwards.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Protocol

from .model import Instance, Request, RootedTree, Solution

INF = math.inf


class InvariantError(RuntimeError):
    """The policy produced something the engine cannot accept."""


@dataclass
class AlgoState:
    """Per-vertex memory plus the working sets of the current invocation."""

    ell: dict[int, Fraction]
    next: dict[int, object]          # Fraction or INF
    invest_set: dict[int, set[int]]
    VE: set[int] = field(default_factory=set)
    VI: set[int] = field(default_factory=set)
    budgets: dict[int, Fraction] = field(default_factory=dict)

    @classmethod
    def initial(cls, tree: RootedTree) -> "AlgoState":
        return cls(
            ell=dict(tree.cost),
            next={v: INF for v in tree.parent},
            invest_set={v: set() for v in tree.parent},
        )

    def covered(self, v: int) -> bool:
        return v in self.VE or v in self.VI


@dataclass(frozen=True)
class InvestEvent:
    investor: int
    target: int
    amount: Fraction
    completed: bool
    ancestors_covered: bool


@dataclass
class TraceRecord:
    index: int
    time: Fraction
    critical: int
    VE: frozenset
    VI: frozenset
    anticipated: frozenset
    unanticipated: frozenset
    pre_next: dict
    pre_invest: dict
    ell: dict
    next: dict
    invest: dict
    assigned_budget: dict
    invest_events: list
    served: tuple
    cost: Fraction
    unanticipated_cost: Fraction
    disproportional: frozenset | None = None

    @property
    def vertices(self) -> frozenset:
        return self.VE | self.VI


class Policy(Protocol):
    name: str
    state: AlgoState

    def on_deadline(self, sim: "Simulator", t: Fraction, critical: Request) -> tuple[set, set]:
        ...


def pending_below(state: AlgoState, instance: Instance, t, v: int, unserved: Iterable[int]) -> list[Request]:
    """Unserved, already-arrived requests in the subtree of v outside V^E and V^I.

    Ordered by (deadline, id).
    """
    tree = instance.tree
    reqs = instance.request_map
    out = [
        reqs[rid] for rid in unserved
        if reqs[rid].arrival <= t
        and tree.in_subtree(reqs[rid].vertex, v)
        and not state.covered(reqs[rid].vertex)
    ]
    out.sort(key=lambda r: r.order_key)
    return out


def classify(VE: Iterable[int], pre_next: dict, t) -> tuple[frozenset, frozenset]:
    """Split expansion vertices into anticipated (next <= t) and the rest."""
    A = frozenset(v for v in VE if pre_next[v] <= t)
    return A, frozenset(VE) - A


class Simulator:
    """Runs one policy over one instance.  Owns all mutable run state."""

    def __init__(self, instance: Instance, policy: Policy):
        self.instance = instance
        self.tree = instance.tree
        self.policy = policy
        self.t: Fraction | None = None
        self._by_deadline = sorted(instance.requests, key=lambda r: r.order_key)
        self._unserved = {r.id for r in instance.requests}
        self._pending_now: list[Request] = []
        self._events: list[InvestEvent] = []
        self._assigned: dict[int, Fraction] = {}

    # queries used by the policies during an invocation

    def pending_below(self, v: int) -> list[Request]:
        state = self.policy.state
        tree = self.tree
        return [r for r in self._pending_now if tree.in_subtree(r.vertex, v) and not state.covered(r.vertex)]

    def first_pending_below(self, v: int) -> Request | None:
        state = self.policy.state
        tree = self.tree
        for r in self._pending_now:
            if tree.in_subtree(r.vertex, v) and not state.covered(r.vertex):
                return r
        return None

    # instrumentation hooks

    def note_budget(self, v: int, budget: Fraction) -> None:
        self._assigned[v] = budget

    def note_invest(self, v: int, target: int, amount: Fraction, completed: bool) -> None:
        """Called before the target's membership changes."""
        state = self.policy.state
        p = self.tree.parent[target]
        ok = True
        while p is not None:
            if not state.covered(p):
                ok = False
                break
            p = self.tree.parent[p]
        self._events.append(InvestEvent(v, target, amount, completed, ok))

    # main loop

    def run(self) -> tuple[Solution, list[TraceRecord]]:
        tree = self.tree
        state = self.policy.state
        solution = Solution()
        trace: list[TraceRecord] = []
        pos = 0
        while self._unserved:
            while self._by_deadline[pos].id not in self._unserved:
                pos += 1
            critical = self._by_deadline[pos]
            t = critical.deadline
            self.t = t
            self._pending_now = [
                r for r in self._by_deadline[pos:] if r.id in self._unserved and r.arrival <= t
            ]
            self._events = []
            self._assigned = {}
            pre_next = dict(state.next)
            pre_invest = {v: frozenset(s) for v, s in state.invest_set.items()}

            VE, VI = self.policy.on_deadline(self, t, critical)
            VE, VI = frozenset(VE), frozenset(VI)
            if critical.vertex not in VE:
                raise InvariantError(
                    f"t={t}: transmission does not contain vertex {critical.vertex} of critical request {critical.id}"
                )
            if VE & VI:
                raise InvariantError(f"t={t}: V^E and V^I overlap on {sorted(VE & VI)}")
            T = VE | VI
            served = tuple(
                r.id for r in self._by_deadline[pos:]
                if r.id in self._unserved and r.arrival <= t <= r.deadline and r.vertex in T
            )
            self._unserved.difference_update(served)
            A, Abar = classify(VE, pre_next, t)
            idx = len(solution.transmissions)
            solution.transmissions.append((t, T))
            for rid in served:
                solution.served[rid] = idx
            cost = tree.set_cost(T)
            solution.total_cost += cost
            trace.append(TraceRecord(
                index=idx + 1,
                time=t,
                critical=critical.id,
                VE=VE,
                VI=VI,
                anticipated=A,
                unanticipated=Abar,
                pre_next=pre_next,
                pre_invest=pre_invest,
                ell=dict(state.ell),
                next=dict(state.next),
                invest={v: frozenset(s) for v, s in state.invest_set.items()},
                assigned_budget=dict(self._assigned),
                invest_events=list(self._events),
                served=served,
                cost=cost,
                unanticipated_cost=tree.set_cost(Abar),
                disproportional=getattr(self.policy, "last_disproportional", None),
            ))
        return solution, trace


def simulate(instance: Instance, policy: Policy) -> tuple[Solution, list[TraceRecord]]:
    return Simulator(instance, policy).run()
