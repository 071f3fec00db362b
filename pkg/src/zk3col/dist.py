"""Verifier question distributions, exact and sampled.

Three distributions are built here:

* ``pmf_base``      -- edge pairs for the plain two-prover protocol;
* ``pmf_committed`` -- edge pairs with two nonzero trits per prover;
* ``pmf_triple``    -- the committed pair plus a third question that copies
  one of the first two with probability 1/2.

Exact pmfs use :class:`fractions.Fraction` throughout and are meant for
test-scale graphs.  The ``sample_*`` functions draw questions procedurally in
two stages and never touch the full support.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, NamedTuple, Union

from .commit import NONZERO, f3_neg
from .graph import Edge, Graph

EXACT_EDGE_LIMIT = 64
DEFAULT_EPSILON = Fraction(1, 3)

RationalLike = Union[Fraction, int, str, float]


class Question(NamedTuple):
    """An edge plus randomness ``r`` for its lower vertex and ``s`` for its higher one."""

    edge: Edge
    r: int
    s: int

    def randomness(self, v: int) -> int:
        if v == self.edge[0]:
            return self.r
        if v == self.edge[1]:
            return self.s
        raise ValueError(f"vertex {v} not in {self.edge}")

    def flipped(self) -> "Question":
        return Question(self.edge, f3_neg(self.r), f3_neg(self.s))

    def token(self) -> str:
        return f"e=({self.edge[0]},{self.edge[1]}) {self.r} {self.s}"


def edge_token(e: Edge) -> str:
    return f"e=({e[0]},{e[1]})"


def parse_question(token: str) -> Question:
    head, r, s = token.split()
    e = parse_edge_token(head)
    return Question(e, int(r), int(s))


def parse_edge_token(token: str) -> Edge:
    token = token.strip()
    if not (token.startswith("e=(") and token.endswith(")")):
        raise ValueError(f"bad edge token {token!r}")
    i, j = token[3:-1].split(",")
    return (int(i), int(j))


def outcome_token(outcome) -> str:
    if isinstance(outcome, Question):
        return outcome.token()
    if isinstance(outcome, tuple) and len(outcome) == 2 and all(isinstance(x, int) for x in outcome):
        return edge_token(outcome)
    return " | ".join(outcome_token(x) for x in outcome)


def as_epsilon(value: RationalLike) -> Fraction:
    eps = Fraction(value)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie strictly between 0 and 1, got {eps}")
    return eps


class Pmf:
    """Finite probability mass function with exact rational weights."""

    def __init__(self, masses: dict, *, check: bool = True):
        self._p = {k: Fraction(v) for k, v in masses.items() if v != 0}
        if check:
            if any(v < 0 for v in self._p.values()):
                raise ValueError("negative probability")
            total = sum(self._p.values(), Fraction(0))
            if total != 1:
                raise ValueError(f"probabilities sum to {total}, not 1")

    def __getitem__(self, outcome) -> Fraction:
        return self._p.get(outcome, Fraction(0))

    def __len__(self) -> int:
        return len(self._p)

    def __iter__(self) -> Iterator:
        return iter(self._p)

    def __contains__(self, outcome) -> bool:
        return outcome in self._p

    def __eq__(self, other) -> bool:
        return isinstance(other, Pmf) and self._p == other._p

    def __repr__(self) -> str:
        return f"Pmf(<{len(self._p)} outcomes>)"

    def items(self):
        return self._p.items()

    def total(self) -> Fraction:
        return sum(self._p.values(), Fraction(0))

    def marginal(self, fn: Callable[[Hashable], Hashable]) -> "Pmf":
        acc: dict = defaultdict(Fraction)
        for k, v in self._p.items():
            acc[fn(k)] += v
        return Pmf(acc)

    def expect(self, fn: Callable[[Hashable], RationalLike]) -> Fraction:
        return sum((v * Fraction(fn(k)) for k, v in self._p.items()), Fraction(0))

    def sample(self, rng: random.Random):
        """Inverse-CDF draw over the materialized support (test-scale only)."""
        outcomes = sorted(self._p, key=outcome_token)
        den = math.lcm(*(self._p[o].denominator for o in outcomes))
        x = rng.randrange(den)
        for o in outcomes:
            x -= self._p[o].numerator * (den // self._p[o].denominator)
            if x < 0:
                return o
        raise AssertionError("unreachable: total mass is 1")

    def dump(self, token: Callable[[Hashable], str] = outcome_token) -> str:
        rows = sorted((token(k), v) for k, v in self._p.items())
        return "".join(f"{t} {v.numerator}/{v.denominator}\n" for t, v in rows)


def load_dump(text: str) -> dict[str, Fraction]:
    """Parse the ``outcome-token numerator/denominator`` dump format."""
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        token, _, prob = line.rpartition(" ")
        out[token] = Fraction(prob)
    return out


def _check_size(graph: Graph) -> None:
    if graph.m > EXACT_EDGE_LIMIT:
        raise ValueError(f"|E|={graph.m} too large for an exact pmf (limit {EXACT_EDGE_LIMIT})")


def wd_partner_probs(graph: Graph, e: Edge) -> dict[Edge, Fraction]:
    """Distribution of the second edge in a well-definition test, given the first."""
    i, j = e
    out: dict[Edge, Fraction] = defaultdict(Fraction)
    for v in (i, j):
        inc = graph.incident(v)
        for f in inc:
            out[f] += Fraction(1, 2 * len(inc))
    return dict(out)


def pmf_base(graph: Graph, eps: RationalLike = DEFAULT_EPSILON) -> Pmf:
    eps = as_epsilon(eps)
    _check_size(graph)
    first = Fraction(1, graph.m)
    acc: dict = defaultdict(Fraction)
    for e in graph.edges:
        acc[(e, e)] += first * eps
        for f, p in wd_partner_probs(graph, e).items():
            acc[(e, f)] += first * (1 - eps) * p
    return Pmf(acc)


def pmf_committed(graph: Graph, eps: RationalLike = DEFAULT_EPSILON) -> Pmf:
    eps = as_epsilon(eps)
    _check_size(graph)
    first = Fraction(1, 4 * graph.m)
    acc: dict = defaultdict(Fraction)
    for e in graph.edges:
        partners = wd_partner_probs(graph, e)
        for r in NONZERO:
            for s in NONZERO:
                q1 = Question(e, r, s)
                acc[(q1, q1.flipped())] += first * eps
                for f, p in partners.items():
                    for r2 in NONZERO:
                        for s2 in NONZERO:
                            acc[(q1, Question(f, r2, s2))] += first * (1 - eps) * p / 4
    return Pmf(acc)


def pmf_triple(graph: Graph, eps: RationalLike = DEFAULT_EPSILON) -> Pmf:
    acc: dict = defaultdict(Fraction)
    for (q1, q2), p in pmf_committed(graph, eps).items():
        acc[(q1, q2, q1)] += p / 2
        acc[(q1, q2, q2)] += p / 2
    return Pmf(acc)


# -- procedural samplers --------------------------------------------------

def bernoulli(rng: random.Random, p: Fraction) -> bool:
    return rng.randrange(p.denominator) < p.numerator


def _wd_partner(graph: Graph, e: Edge, rng: random.Random) -> Edge:
    v = e[rng.randrange(2)]
    return rng.choice(graph.incident(v))


def sample_base(graph: Graph, eps: Fraction, rng: random.Random) -> tuple[Edge, Edge]:
    e = rng.choice(graph.edges)
    if bernoulli(rng, eps):
        return e, e
    return e, _wd_partner(graph, e, rng)


def sample_committed(graph: Graph, eps: Fraction, rng: random.Random) -> tuple[Question, Question]:
    e = rng.choice(graph.edges)
    q1 = Question(e, rng.choice(NONZERO), rng.choice(NONZERO))
    if bernoulli(rng, eps):
        return q1, q1.flipped()
    f = _wd_partner(graph, e, rng)
    return q1, Question(f, rng.choice(NONZERO), rng.choice(NONZERO))


def sample_triple(graph: Graph, eps: Fraction, rng: random.Random) -> tuple[Question, Question, Question]:
    q1, q2 = sample_committed(graph, eps, rng)
    return q1, q2, (q1 if rng.randrange(2) == 0 else q2)


def sample_many(sampler, graph: Graph, eps: Fraction, rng: random.Random, count: int) -> Iterable:
    for _ in range(count):
        yield sampler(graph, eps, rng)


def exactness_checks(graph: Graph, eps: RationalLike = DEFAULT_EPSILON) -> list[tuple[str, bool]]:
    """Named exact identities the three question pmfs must satisfy."""
    eps = as_epsilon(eps)
    base, comm, trip = pmf_base(graph, eps), pmf_committed(graph, eps), pmf_triple(graph, eps)
    m = graph.m
    out = [
        ("base sums to 1", base.total() == 1),
        ("committed sums to 1", comm.total() == 1),
        ("triple sums to 1", trip.total() == 1),
        ("base p(e,e) >= eps/|E|", all(base[(e, e)] >= eps / m for e in graph.edges)),
        (
            "committed p(q,flip q) >= eps/(4|E|)",
            all(comm[(q, q.flipped())] >= eps / (4 * m) for q in (Question(e, r, s) for e in graph.edges for r in NONZERO for s in NONZERO)),
        ),
    ]
    first = base.marginal(lambda o: o[0])
    out.append(("base first edge uniform", all(first[e] == Fraction(1, m) for e in graph.edges)))
    cfirst = comm.marginal(lambda o: o[0])
    out.append(("committed first question uniform", len(cfirst) == 4 * m and all(p == Fraction(1, 4 * m) for _, p in cfirst.items())))
    out.append(("committed edges marginalize to base", comm.marginal(lambda o: (o[0].edge, o[1].edge)) == base))
    out.append(("triple marginalizes to committed", trip.marginal(lambda o: (o[0], o[1])) == comm))
    out.append(("third question copies one of the first two", all(o[2] in (o[0], o[1]) for o in trip)))
    return out
