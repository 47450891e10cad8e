"""Seeded tree and request generators for test corpora."""
from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from .model import Instance, Request, RootedTree, serialize_instance

SHAPES = ("line", "caterpillar", "lobster", "random", "perfect-binary")

# base times live on a 1/GRID lattice; per-request jitter is a multiple of
# 1/JITTER, always smaller than one lattice step, so no two times collide
GRID = 100
JITTER = 10**9


def _parents(shape: str, n: int, rng: random.Random) -> list[int | None]:
    if shape == "line":
        return [None] + list(range(n - 1))
    if shape == "perfect-binary":
        return [None] + [(i - 1) // 2 for i in range(1, n)]
    if shape == "random":
        return [None] + [rng.randrange(i) for i in range(1, n)]
    if shape == "caterpillar":
        spine = rng.randint(1, n)
        parents = [None] + list(range(spine - 1))
        parents += [rng.randrange(spine) for _ in range(n - spine)]
        return parents
    if shape == "lobster":
        spine = rng.randint(1, n)
        parents: list[int | None] = [None] + list(range(spine - 1))
        legs: list[int] = []
        for i in range(spine, n):
            if legs and rng.random() < 0.5:
                parents.append(rng.choice(legs))
            else:
                parents.append(rng.randrange(spine))
                legs.append(i)
        return parents
    raise ValueError(f"unknown shape {shape!r}; expected one of {SHAPES}")


def gen_tree(shape: str, n: int, seed: int, cost_range: tuple[int, int] = (1, 20), costs=None) -> RootedTree:
    """Vertices are 0..n-1 with root 0; costs uniform integers unless given."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(f"tree:{shape}:{n}:{seed}")
    parents = _parents(shape, n, rng)
    if costs is None:
        lo, hi = cost_range
        costs = [rng.randint(lo, hi) for _ in range(n)]
    return RootedTree(dict(enumerate(parents)), dict(enumerate(costs)))


def gen_requests(tree: RootedTree, m: int, horizon=10, overlap: float = 0.3, seed: int = 0) -> list[Request]:
    """m requests on uniformly random vertices.

    Windows are uniform in [0, overlap * horizon]; larger ``overlap`` means
    more intervals intersect.  All 2m arrival/deadline values are distinct.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    rng = random.Random(f"req:{len(tree)}:{m}:{horizon}:{overlap}:{seed}")
    horizon = Fraction(horizon)
    vertices = sorted(tree.parent)
    span = int(horizon * GRID)
    max_window = int(Fraction(overlap).limit_denominator(1000) * horizon * GRID)
    out = []
    for i in range(m):
        a = Fraction(rng.randint(0, span), GRID)
        w = Fraction(rng.randint(0, max_window), GRID)
        arrival = a + Fraction(2 * i + 1, JITTER)
        deadline = a + w + Fraction(2 * i + 2, JITTER)
        out.append(Request(i + 1, rng.choice(vertices), arrival, deadline))
    return out


def gen_instance(shape: str, n: int, m: int, seed: int, horizon=10, overlap: float = 0.3) -> Instance:
    tree = gen_tree(shape, n, seed)
    return Instance(tree, gen_requests(tree, m, horizon, overlap, seed))


def gen_corpus(count: int, seed: int, max_vertices: int, max_requests: int,
               shapes=SHAPES, horizon=10) -> list[tuple[str, Instance]]:
    """Mixed-shape corpus; instance k only depends on (seed, k) and the caps."""
    out = []
    for k in range(count):
        rng = random.Random(f"corpus:{seed}:{k}")
        shape = shapes[k % len(shapes)]
        n = rng.randint(1, max_vertices)
        m = rng.randint(1, max_requests)
        overlap = rng.choice([0.05, 0.2, 0.5, 1.0])
        sub = rng.randrange(2**31)
        name = f"c{seed}_{k:04d}_{shape}"
        out.append((name, gen_instance(shape, n, m, sub, horizon, overlap)))
    return out


def write_corpus(corpus, directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, inst in corpus:
        p = directory / f"{name}.inst"
        p.write_text(serialize_instance(inst))
        paths.append(p)
    return paths
