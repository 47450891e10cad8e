"""Exact offline optimum for small instances.

Transmission times can be restricted to request deadlines: a transmission
serving a set S can be delayed to the earliest deadline in S without
losing any request.  The search assigns each request to one such time in
its window and pays, per time, for the union of the assigned root paths.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from ..model import Instance, Solution, format_fraction
from . import _kernel_py

try:
    from . import _kernel as _kernel_c
except ImportError:  # extension not built
    _kernel_c = None

INT64_SAFE = 2**62


class OptLimitError(ValueError):
    """Instance is larger than the configured caps."""


@dataclass(frozen=True)
class OptLimits:
    max_requests: int = 8
    max_vertices: int | None = None


@dataclass
class OptResult:
    cost: Fraction
    schedule: list[tuple[Fraction, frozenset]] = field(default_factory=list)
    assignment: dict[int, Fraction] = field(default_factory=dict)

    def as_solution(self) -> Solution:
        idx = {t: i for i, (t, _) in enumerate(self.schedule)}
        return Solution(list(self.schedule), {rid: idx[t] for rid, t in self.assignment.items()}, self.cost)

    def format(self) -> str:
        lines = [f"cost {format_fraction(self.cost)}"]
        for t, vs in self.schedule:
            lines.append(f"t {format_fraction(t)} : {' '.join(str(v) for v in sorted(vs))}")
        return "\n".join(lines) + "\n"


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _kernel_c is not None else [])


def default_backend() -> str:
    if os.environ.get("MLAGG_PURE_PYTHON") or _kernel_c is None:
        return "python"
    return "compiled"


def exact_opt(instance: Instance, limits: OptLimits | None = None, backend: str | None = None) -> OptResult:
    limits = limits or OptLimits()
    tree = instance.tree
    reqs = sorted(instance.requests, key=lambda r: r.order_key)
    if len(reqs) > limits.max_requests:
        raise OptLimitError(f"{len(reqs)} requests exceed the cap of {limits.max_requests}")
    if limits.max_vertices is not None and len(tree) > limits.max_vertices:
        raise OptLimitError(f"{len(tree)} vertices exceed the cap of {limits.max_vertices}")
    if not reqs:
        return OptResult(Fraction(0))

    # only vertices on some request's root path can ever be bought
    useful = sorted({v for r in reqs for v in tree.root_path(r.vertex)}, key=tree.preorder.index)
    bit = {v: i for i, v in enumerate(useful)}
    scale = lcm(*(tree.cost[v].denominator for v in useful))
    costs = [int(tree.cost[v] * scale) for v in useful]
    masks = []
    for r in reqs:
        mk = 0
        for v in tree.root_path(r.vertex):
            mk |= 1 << bit[v]
        masks.append(mk)
    times = sorted({r.deadline for r in reqs})
    options = [[k for k, t in enumerate(times) if r.arrival <= t <= r.deadline] for r in reqs]

    backend = backend or default_backend()
    if backend == "compiled" and (_kernel_c is None or len(useful) > 64 or sum(costs) >= INT64_SAFE):
        backend = "python"
    kernel = _kernel_c if backend == "compiled" else _kernel_py
    best, assign = kernel.solve(masks, options, len(times), costs)

    buckets: dict[int, set] = {}
    for r, k in zip(reqs, assign):
        buckets.setdefault(k, set()).update(tree.root_path(r.vertex))
    schedule = [(times[k], frozenset(buckets[k])) for k in sorted(buckets)]
    cost = sum((tree.set_cost(vs) for _, vs in schedule), Fraction(0))
    assert cost == Fraction(best, scale)
    return OptResult(cost, schedule, {r.id: times[k] for r, k in zip(reqs, assign)})


@dataclass(frozen=True)
class Lemma2Verdict:
    holds: bool
    unanticipated_total: Fraction
    opt_cost: Fraction

    def __str__(self) -> str:
        return (f"sum c(Abar)={format_fraction(self.unanticipated_total)} <= "
                f"OPT={format_fraction(self.opt_cost)}: {self.holds}")


def lemma2_check(trace, opt: OptResult) -> Lemma2Verdict:
    total = sum((r.unanticipated_cost for r in trace), Fraction(0))
    return Lemma2Verdict(total <= opt.cost, total, opt.cost)
