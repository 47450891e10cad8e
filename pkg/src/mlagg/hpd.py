"""Heavy path decompositions and caterpillar dimension."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .model import RootedTree


@dataclass(frozen=True)
class Decomposition:
    """Partition of the vertices into downward paths.

    A path is identified by its topmost vertex.  ``continue_child[v]`` is
    the child whose path v extends, or None when v is the bottom (a leaf).
    """

    path_of: dict[int, int]
    paths: dict[int, tuple[int, ...]]
    dimension: int
    continue_child: dict[int, int | None]

    def path(self, v: int) -> tuple[int, ...]:
        return self.paths[self.path_of[v]]

    def prefix(self, v: int) -> tuple[int, ...]:
        """Vertices of v's path from its top down to v."""
        p = self.path(v)
        return p[: p.index(v) + 1]


@dataclass(frozen=True)
class HeavyPathTree:
    nodes: tuple[int, ...]
    root: int
    parent: dict[int, int | None]
    depth: dict[int, int]

    def children(self, node: int) -> list[int]:
        return sorted(p for p, q in self.parent.items() if q == node)

    @property
    def height(self) -> int:
        return max(self.depth.values())


def decomposition_from_choice(tree: RootedTree, continue_child: Mapping[int, int | None]) -> Decomposition:
    """Build a decomposition from each vertex's continuing child."""
    choice = {v: continue_child.get(v) for v in tree.preorder}
    for v, c in choice.items():
        if tree.children[v]:
            if c not in tree.children[v]:
                raise ValueError(f"vertex {v}: continue child {c} is not a child")
        elif c is not None:
            raise ValueError(f"leaf {v} cannot continue a path")

    path_of: dict[int, int] = {}
    paths: dict[int, tuple[int, ...]] = {}
    for v in tree.preorder:
        p = tree.parent[v]
        if p is not None and choice[p] == v:
            continue
        chain = [v]
        while choice[chain[-1]] is not None:
            chain.append(choice[chain[-1]])
        paths[v] = tuple(chain)
        for u in chain:
            path_of[u] = v

    # count distinct paths met on each root-to-vertex walk
    count: dict[int, int] = {}
    for v in tree.preorder:
        p = tree.parent[v]
        if p is None:
            count[v] = 1
        else:
            count[v] = count[p] + (path_of[v] != path_of[p])
    dim = max(count[u] for u in tree.leaves())
    return Decomposition(path_of, paths, dim, choice)


def min_caterpillar_decomposition(tree: RootedTree) -> Decomposition:
    """Decomposition of minimum dimension (the caterpillar dimension).

    Bottom-up rank: a leaf has rank 1; an internal vertex takes the maximum
    child rank m, plus one if two or more children attain m.  The path runs
    through a maximum-rank child, smallest id on ties.
    """
    rank: dict[int, int] = {}
    choice: dict[int, int | None] = {}
    for v in reversed(tree.preorder):
        kids = tree.children[v]
        if not kids:
            rank[v] = 1
            choice[v] = None
            continue
        m = max(rank[c] for c in kids)
        best = [c for c in kids if rank[c] == m]
        rank[v] = m if len(best) == 1 else m + 1
        choice[v] = best[0]
    dec = decomposition_from_choice(tree, choice)
    assert dec.dimension == rank[tree.root]
    return dec


def size_heavy_decomposition(tree: RootedTree) -> Decomposition:
    """Classical heavy-light rule: continue into the largest child subtree."""
    size: dict[int, int] = {}
    choice: dict[int, int | None] = {}
    for v in reversed(tree.preorder):
        kids = tree.children[v]
        size[v] = 1 + sum(size[c] for c in kids)
        # max() keeps the first maximum, i.e. the smallest id
        choice[v] = max(kids, key=lambda c: size[c]) if kids else None
    return decomposition_from_choice(tree, choice)


def heavy_path_tree(decomp: Decomposition, tree: RootedTree) -> HeavyPathTree:
    """Contract every path to a node; edges come from tree edges between paths."""
    parent: dict[int, int | None] = {}
    depth: dict[int, int] = {}
    for top in tree.preorder:
        if top not in decomp.paths:
            continue
        above = tree.parent[top]
        if above is None:
            parent[top] = None
            depth[top] = 0
        else:
            q = decomp.path_of[above]
            parent[top] = q
            depth[top] = depth[q] + 1
    root = decomp.path_of[tree.root]
    return HeavyPathTree(tuple(parent), root, parent, depth)


def prefix_cost(decomp: Decomposition, tree: RootedTree, v: int) -> Fraction:
    """c(p(v)): cost of v's path from its top vertex down to v."""
    return tree.set_cost(decomp.prefix(v))


def format_decomposition(decomp: Decomposition, tree: RootedTree) -> str:
    hpt = heavy_path_tree(decomp, tree)
    lines = [f"dimension {decomp.dimension}", f"paths {len(decomp.paths)}"]
    for top in hpt.nodes:
        lines.append("path " + " ".join(str(v) for v in decomp.paths[top]))
    lines.append("heavy-path-tree")
    for top in hpt.nodes:
        p = hpt.parent[top]
        lines.append(f"node {top} parent {'-' if p is None else p} depth {hpt.depth[top]}")
    return "\n".join(lines) + "\n"
