"""Seeded random zigzag diagrams plus a brute-force limit for cross-checks."""

from itertools import product
from typing import List, Tuple

import random

from evasion_kit.limit import ZigzagSetDiagram


def random_diagram(rng: random.Random, max_cobordisms: int = 2,
                   max_labels: int = 5, allow_empty: bool = True) -> ZigzagSetDiagram:
    shape = rng.choice(("interval", "circle"))
    n = rng.randint(1 if shape == "circle" else 0, max_cobordisms)
    lo = 0 if allow_empty else 1
    fiber_sets: List[Tuple[int, ...]] = [
        tuple(range(rng.randint(lo, max_labels))) for _ in range(n + 1)
    ]
    if shape == "circle":
        fiber_sets[-1] = fiber_sets[0]
    cobordism_sets = [tuple(range(rng.randint(1, max_labels))) for _ in range(n)]
    left = []
    right = []
    for i in range(n):
        cob = cobordism_sets[i]
        left.append({x: rng.choice(cob) for x in fiber_sets[i]})
        right.append({x: rng.choice(cob) for x in fiber_sets[i + 1]})
    return ZigzagSetDiagram(
        shape=shape,
        fiber_sets=tuple(fiber_sets),
        cobordism_sets=tuple(cobordism_sets),
        left_maps=tuple(left),
        right_maps=tuple(right),
    )


def brute_force_limit(z: ZigzagSetDiagram) -> List[tuple]:
    """Every consistent tuple by exhaustive product, in lexicographic order."""
    fibers = [sorted(fs) for fs in z.fiber_sets]
    out = []
    for tup in product(*fibers):
        ok = all(
            z.left_maps[i][tup[i]] == z.right_maps[i][tup[i + 1]]
            for i in range(len(z.cobordism_sets))
        )
        if ok and (z.shape != "circle" or tup[0] == tup[-1]):
            out.append(tup)
    return out
