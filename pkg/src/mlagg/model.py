"""Trees, requests, instances and solutions for aggregation with deadlines.

All costs and times are :class:`fractions.Fraction` so that the online
policies can branch on exact equalities.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class InstanceFormatError(ValueError):
    """Malformed or invalid instance text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class TreeError(ValueError):
    pass


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass int, str or Fraction")
    return Fraction(value)


def format_fraction(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class VertexRecord:
    id: int
    parent: int | None
    cost: Fraction
    children: tuple[int, ...]


class RootedTree:
    """Vertex-weighted rooted tree.

    Children are kept sorted by id; every traversal in the package iterates
    them in that order.
    """

    def __init__(self, parents: Mapping[int, int | None], costs: Mapping[int, object]):
        if set(parents) != set(costs):
            raise TreeError("parents and costs must cover the same vertices")
        if not parents:
            raise TreeError("tree must have at least one vertex")
        roots = [v for v, p in parents.items() if p is None]
        if len(roots) != 1:
            raise TreeError(f"expected exactly one root, found {len(roots)}")
        self.root: int = roots[0]
        self.parent: dict[int, int | None] = dict(parents)
        self.cost: dict[int, Fraction] = {v: to_fraction(c) for v, c in costs.items()}
        for v, c in self.cost.items():
            if c < 0:
                raise TreeError(f"vertex {v} has negative cost {c}")
        children: dict[int, list[int]] = {v: [] for v in self.parent}
        for v, p in self.parent.items():
            if p is None:
                continue
            if p not in children:
                raise TreeError(f"vertex {v} has unknown parent {p}")
            children[p].append(v)
        self.children: dict[int, tuple[int, ...]] = {v: tuple(sorted(cs)) for v, cs in children.items()}

        # preorder with entry/exit stamps; also detects cycles (unreached vertices)
        self.depth: dict[int, int] = {}
        self.preorder: list[int] = []
        self._tin: dict[int, int] = {}
        self._tout: dict[int, int] = {}
        stack = [(self.root, 0, False)]
        while stack:
            v, d, done = stack.pop()
            if done:
                self._tout[v] = len(self.preorder)
                continue
            self._tin[v] = len(self.preorder)
            self.preorder.append(v)
            self.depth[v] = d
            stack.append((v, d, True))
            for c in reversed(self.children[v]):
                stack.append((c, d + 1, False))
        if len(self.preorder) != len(self.parent):
            raise TreeError("parent pointers contain a cycle")

    # basic accessors

    def __len__(self) -> int:
        return len(self.parent)

    def __contains__(self, v) -> bool:
        return v in self.parent

    def __eq__(self, other) -> bool:
        return isinstance(other, RootedTree) and self.parent == other.parent and self.cost == other.cost

    def __repr__(self) -> str:
        return f"RootedTree(n={len(self)}, root={self.root}, D={self.max_depth})"

    @property
    def vertices(self) -> list[VertexRecord]:
        return [VertexRecord(v, self.parent[v], self.cost[v], self.children[v]) for v in sorted(self.parent)]

    @property
    def max_depth(self) -> int:
        """D: the largest vertex depth, root at depth 0."""
        return max(self.depth.values())

    def leaves(self) -> list[int]:
        return [v for v in self.preorder if not self.children[v]]

    def is_ancestor(self, u: int, v: int) -> bool:
        """True if u is an ancestor of v (or u == v)."""
        return self._tin[u] <= self._tin[v] < self._tout[u]

    def in_subtree(self, v: int, top: int) -> bool:
        return self.is_ancestor(top, v)

    def subtree(self, v: int) -> list[int]:
        return self.preorder[self._tin[v]:self._tout[v]]

    def root_path(self, v: int) -> list[int]:
        """Vertices from the root down to v, inclusive."""
        path = []
        while v is not None:
            path.append(v)
            v = self.parent[v]
        path.reverse()
        return path

    def path_between(self, top: int, v: int) -> list[int]:
        """Vertices from ancestor ``top`` down to ``v``, inclusive."""
        path = []
        while v != top:
            path.append(v)
            v = self.parent[v]
            if v is None:
                raise TreeError(f"{top} is not an ancestor")
        path.append(top)
        path.reverse()
        return path

    def set_cost(self, vertices: Iterable[int]) -> Fraction:
        return sum((self.cost[v] for v in vertices), Fraction(0))

    def is_rooted_subtree(self, vertices) -> bool:
        vs = set(vertices)
        if self.root not in vs:
            return False
        return all(v == self.root or self.parent[v] in vs for v in vs)


@dataclass(frozen=True)
class Request:
    id: int
    vertex: int
    arrival: Fraction
    deadline: Fraction

    def __post_init__(self):
        object.__setattr__(self, "arrival", to_fraction(self.arrival))
        object.__setattr__(self, "deadline", to_fraction(self.deadline))
        if self.arrival < 0:
            raise ValueError(f"request {self.id}: negative arrival")
        if self.arrival > self.deadline:
            raise ValueError(f"request {self.id}: arrival {self.arrival} > deadline {self.deadline}")

    @property
    def order_key(self) -> tuple[Fraction, int]:
        # strict total order standing in for the distinct-deadline assumption
        return (self.deadline, self.id)


@dataclass
class Instance:
    tree: RootedTree
    requests: list[Request] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for r in self.requests:
            if r.id in seen:
                raise ValueError(f"duplicate request id {r.id}")
            seen.add(r.id)
            if r.vertex not in self.tree:
                raise ValueError(f"request {r.id} on unknown vertex {r.vertex}")

    @property
    def request_map(self) -> dict[int, Request]:
        return {r.id: r for r in self.requests}


@dataclass
class Solution:
    transmissions: list[tuple[Fraction, frozenset]] = field(default_factory=list)
    served: dict[int, int] = field(default_factory=dict)
    total_cost: Fraction = Fraction(0)


# ---------------------------------------------------------------------------
# text format


def _parse_number(tok: str, lineno: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise InstanceFormatError(f"bad number {tok!r}", lineno, col) from None


def _parse_int(tok: str, lineno: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceFormatError(f"bad integer id {tok!r}", lineno, col) from None


def _tokens(line: str) -> list[tuple[str, int]]:
    """Whitespace tokens with 1-based columns."""
    out = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((line[i:j], i + 1))
        i = j
    return out


def parse_instance(text: str | bytes) -> Instance:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw.split("#", 1)[0])
        if toks:
            lines.append((lineno, toks))
    if not lines:
        raise InstanceFormatError("empty instance", 1, 1)

    lineno, toks = lines[0]
    if toks[0][0] != "tree" or len(toks) != 2:
        raise InstanceFormatError("expected 'tree <n>'", lineno, toks[0][1])
    n = _parse_int(toks[1][0], lineno, toks[1][1])
    if n < 1:
        raise InstanceFormatError("tree needs at least one vertex", lineno, toks[1][1])
    if len(lines) < n + 1:
        raise InstanceFormatError(f"expected {n} vertex lines", lines[-1][0], 1)

    parents: dict[int, int | None] = {}
    costs: dict[int, Fraction] = {}
    where: dict[int, tuple[int, int]] = {}
    for lineno, toks in lines[1:n + 1]:
        if toks[0][0] != "v" or len(toks) != 4:
            raise InstanceFormatError("expected 'v <id> <parent|-> <cost>'", lineno, toks[0][1])
        vid = _parse_int(toks[1][0], lineno, toks[1][1])
        if vid in parents:
            raise InstanceFormatError(f"duplicate vertex id {vid}", lineno, toks[1][1])
        parents[vid] = None if toks[2][0] == "-" else _parse_int(toks[2][0], lineno, toks[2][1])
        cost = _parse_number(toks[3][0], lineno, toks[3][1])
        if cost < 0:
            raise InstanceFormatError(f"negative cost {toks[3][0]}", lineno, toks[3][1])
        costs[vid] = cost
        where[vid] = (lineno, toks[2][1])

    roots = [v for v, p in parents.items() if p is None]
    if len(roots) != 1:
        lineno = where[roots[1]][0] if len(roots) > 1 else lines[1][0]
        raise InstanceFormatError(f"expected exactly one root, found {len(roots)}", lineno, None)
    for v, p in parents.items():
        if p is not None and p not in parents:
            raise InstanceFormatError(f"unknown parent id {p}", *where[v])
    try:
        tree = RootedTree(parents, costs)
    except TreeError as exc:
        raise InstanceFormatError(str(exc)) from None

    requests = []
    seen = set()
    for lineno, toks in lines[n + 1:]:
        if toks[0][0] != "r" or len(toks) != 5:
            raise InstanceFormatError("expected 'r <id> <vertex> <arrival> <deadline>'", lineno, toks[0][1])
        rid = _parse_int(toks[1][0], lineno, toks[1][1])
        if rid in seen:
            raise InstanceFormatError(f"duplicate request id {rid}", lineno, toks[1][1])
        seen.add(rid)
        vertex = _parse_int(toks[2][0], lineno, toks[2][1])
        if vertex not in parents:
            raise InstanceFormatError(f"unknown vertex {vertex}", lineno, toks[2][1])
        arrival = _parse_number(toks[3][0], lineno, toks[3][1])
        deadline = _parse_number(toks[4][0], lineno, toks[4][1])
        if arrival < 0:
            raise InstanceFormatError("negative arrival", lineno, toks[3][1])
        if arrival > deadline:
            raise InstanceFormatError("arrival after deadline", lineno, toks[4][1])
        requests.append(Request(rid, vertex, arrival, deadline))
    return Instance(tree, requests)


def serialize_instance(instance: Instance) -> str:
    tree = instance.tree
    out = [f"tree {len(tree)}"]
    for v in sorted(tree.parent):
        p = tree.parent[v]
        out.append(f"v {v} {'-' if p is None else p} {format_fraction(tree.cost[v])}")
    for r in instance.requests:
        out.append(f"r {r.id} {r.vertex} {format_fraction(r.arrival)} {format_fraction(r.deadline)}")
    return "\n".join(out) + "\n"


def serialize_solution(solution: Solution) -> str:
    return "".join(
        f"t {format_fraction(t)} : {' '.join(str(v) for v in sorted(vs))}\n"
        for t, vs in solution.transmissions
    )


def parse_solution(text: str, instance: Instance | None = None) -> Solution:
    """Read ``t <time> : <ids>`` lines.

    When an instance is given, requests are mapped to the first transmission
    that serves them and the cost is filled in.
    """
    transmissions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        parts = head.split()
        if not sep or len(parts) != 2 or parts[0] != "t":
            raise InstanceFormatError("expected 't <time> : <ids>'", lineno, 1)
        t = _parse_number(parts[1], lineno, 3)
        vs = frozenset(_parse_int(tok, lineno, col) for tok, col in _tokens(rest))
        transmissions.append((t, vs))
    sol = Solution(transmissions)
    if instance is not None:
        sol.total_cost = sum((instance.tree.set_cost(vs) for _, vs in transmissions), Fraction(0))
        for r in instance.requests:
            for i, (t, vs) in enumerate(transmissions):
                if r.arrival <= t <= r.deadline and r.vertex in vs:
                    sol.served[r.id] = i
                    break
    return sol


# ---------------------------------------------------------------------------
# edge-weighted instances


def reduce_edge_weighted(root: int, edges: Iterable[tuple[int, int, object]]) -> RootedTree:
    """Turn an edge-weighted tree into the vertex-weighted form.

    Each edge weight moves to its endpoint farther from ``root``; the old
    root is dropped and its single neighbour becomes the new root.
    """
    adj: dict[int, list[tuple[int, Fraction]]] = {}
    for u, v, w in edges:
        w = to_fraction(w)
        if w < 0:
            raise TreeError(f"negative edge weight on ({u}, {v})")
        adj.setdefault(u, []).append((v, w))
        adj.setdefault(v, []).append((u, w))
    if len(adj.get(root, [])) != 1:
        raise TreeError(f"root {root} must have exactly one neighbour, has {len(adj.get(root, []))}")

    new_root, w0 = adj[root][0]
    parents: dict[int, int | None] = {new_root: None}
    costs: dict[int, Fraction] = {new_root: w0}
    stack = [new_root]
    seen = {root, new_root}
    while stack:
        u = stack.pop()
        for v, w in adj[u]:
            if v in seen:
                if v != root and parents.get(u) != v:
                    raise TreeError("edges contain a cycle")
                continue
            seen.add(v)
            parents[v] = u
            costs[v] = w
            stack.append(v)
    if len(seen) != len(adj):
        raise TreeError("edges do not form a connected tree")
    return RootedTree(parents, costs)


# ---------------------------------------------------------------------------
# feasibility


@dataclass
class FeasibilityReport:
    served: dict[int, int | None]
    connectivity_violations: list[int]
    order_violations: list[int]
    cost_ok: bool
    recomputed_cost: Fraction

    @property
    def unserved(self) -> list[int]:
        return [rid for rid, i in self.served.items() if i is None]

    @property
    def feasible(self) -> bool:
        return not self.unserved and not self.connectivity_violations and not self.order_violations

    def summary(self) -> str:
        parts = [f"feasible={self.feasible}", f"unserved={self.unserved}"]
        if self.connectivity_violations:
            parts.append(f"disconnected transmissions={self.connectivity_violations}")
        if self.order_violations:
            parts.append(f"out-of-order transmissions={self.order_violations}")
        if not self.cost_ok:
            parts.append(f"cost mismatch (recomputed {format_fraction(self.recomputed_cost)})")
        return ", ".join(parts)


def validate_solution(instance: Instance, solution: Solution) -> FeasibilityReport:
    """Check every request against the transmissions of ``solution``.

    Transmissions that are not root-containing connected subtrees are flagged
    and do not count towards serving anything.
    """
    tree = instance.tree
    bad = [i for i, (_, vs) in enumerate(solution.transmissions) if not tree.is_rooted_subtree(vs)]
    # equal times are allowed: they stand for the perturbed order of tied deadlines
    order = [
        i for i in range(1, len(solution.transmissions))
        if solution.transmissions[i][0] < solution.transmissions[i - 1][0]
    ]
    bad_set = set(bad)
    served: dict[int, int | None] = {}
    for r in instance.requests:
        served[r.id] = None
        for i, (t, vs) in enumerate(solution.transmissions):
            if i not in bad_set and r.arrival <= t <= r.deadline and r.vertex in vs:
                served[r.id] = i
                break
    recomputed = sum((tree.set_cost(vs) for _, vs in solution.transmissions), Fraction(0))
    return FeasibilityReport(served, bad, order, recomputed == solution.total_cost, recomputed)


def tree_from_parent_list(parents: Sequence[int | None], costs: Sequence[object] | None = None) -> RootedTree:
    """Convenience constructor: vertex i has parent ``parents[i]``."""
    if costs is None:
        costs = [1] * len(parents)
    return RootedTree(dict(enumerate(parents)), dict(enumerate(costs)))
