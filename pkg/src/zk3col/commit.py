"""F_3 arithmetic and the two-prover commitment ``w = b*r + c``.

A prover holding mask ``b`` and color ``c`` answers randomness ``r`` (nonzero)
with ``commit(b, r, c)``.  Two commitments to the same vertex under opposite
randomness reveal ``c``; a single commitment is uniform whenever ``b`` is.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .graph import Coloring, Graph, GraphError, find_coloring

TRITS = (0, 1, 2)
NONZERO = (1, 2)


def f3_add(a: int, b: int) -> int:
    return (a + b) % 3


def f3_mul(a: int, b: int) -> int:
    return (a * b) % 3


def f3_neg(a: int) -> int:
    return (-a) % 3


def f3_inv(a: int) -> int:
    if a % 3 == 0:
        raise ZeroDivisionError("0 has no inverse in F_3")
    # every nonzero element of F_3 is its own inverse
    return a % 3


def commit(b: int, r: int, c: int) -> int:
    return (b * r + c) % 3


def implicit_unveil(w: int, r: int, w2: int, r2: int) -> int:
    """Recover the committed trit from commitments under ``r`` and ``r2 != r``."""
    if r % 3 == 0 or r2 % 3 == 0:
        raise ValueError("randomness must be nonzero")
    if r % 3 == r2 % 3:
        raise ValueError("implicit unveiling needs two different randomness values")
    return f3_mul(f3_inv(2), f3_add(w, w2))


def unveil_general(w: int, r: int, w2: int, r2: int) -> int:
    """Field-generic form ``(w*r2 - w2*r) / (r2 - r)``."""
    if r % 3 == r2 % 3:
        raise ValueError("implicit unveiling needs two different randomness values")
    return f3_mul((w * r2 - w2 * r) % 3, f3_inv((r2 - r) % 3))


@dataclass(frozen=True)
class ProverSecret:
    """Pre-agreed state of the honest provers: a proper coloring and one mask per vertex."""

    coloring: Coloring
    masks: tuple[int, ...]

    def color(self, v: int) -> int:
        return self.coloring[v]

    def mask(self, v: int) -> int:
        return self.masks[v - 1]

    def commitment(self, v: int, r: int) -> int:
        return commit(self.mask(v), r, self.color(v))


def random_secret(graph: Graph, rng: random.Random) -> ProverSecret:
    coloring = find_coloring(graph, rng)
    if coloring is None:
        raise GraphError("graph is not 3-colorable")
    masks = tuple(rng.randrange(3) for _ in graph.vertices)
    return ProverSecret(coloring, masks)
