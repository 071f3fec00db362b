"""Zero-knowledge simulator, leakage taxonomy and exact view comparison.

The simulator sees only the graph and the verifier's three questions.  It
hands out fresh uniform trits for first commitments and, when a vertex is
asked a second time under the other randomness, forces the pair to unveil
the next color of a random permutation of F_3.
"""

from __future__ import annotations

import enum
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .commit import NONZERO, ProverSecret, f3_neg, implicit_unveil
from .dist import Pmf, Question
from .engine import Answer, answer_token, honest_answer_committed
from .graph import COLOR_PERMUTATIONS, Graph, GraphError, base_coloring

ZK_ENUMERATION_LIMIT = 10


class ZKError(ValueError):
    pass


@dataclass
class SimulatorState:
    col: tuple[int, int, int]
    c: int = 0
    mark: set = field(default_factory=set)
    count: dict = field(default_factory=dict)
    W: dict = field(default_factory=dict)


def _run_simulator(graph: Graph, questions: Sequence[Question], state: SimulatorState, draw: Callable[[], int]) -> tuple[Answer, ...]:
    out: list[Answer] = []
    for q in questions:
        i, j = q.edge
        if not graph.has_edge(i, j):
            out.append(None)
            continue
        for v, r in ((i, q.r), (j, q.s)):
            if (v, r) in state.mark:
                continue
            seen = state.count.get(v, 0)
            if seen == 0:
                state.W[v, r] = draw()
            elif seen == 1:
                state.W[v, r] = (-state.col[state.c] - state.W[v, f3_neg(r)]) % 3
                state.c += 1
            else:
                raise AssertionError("vertex committed under both randomness values yet unmarked")
            state.count[v] = seen + 1
        state.mark.add((i, q.r))
        state.mark.add((j, q.s))
        out.append((state.W[i, q.r], state.W[j, q.s]))
    return tuple(out)


def _validate(questions: Sequence[Question]) -> None:
    if len(questions) != 3:
        raise ZKError("the simulator answers exactly three questions")
    for q in questions:
        if q.r not in NONZERO or q.s not in NONZERO:
            raise ZKError(f"randomness must be nonzero in {q}")


def simulate(graph: Graph, questions: Sequence[Question], rng: random.Random) -> tuple[Answer, ...]:
    """Simulated prover answers for a question triple; never reads a coloring."""
    _validate(questions)
    state = SimulatorState(col=rng.choice(COLOR_PERMUTATIONS))
    return _run_simulator(graph, questions, state, lambda: rng.randrange(3))


def simulate_with_state(graph: Graph, questions: Sequence[Question], rng: random.Random) -> tuple[tuple[Answer, ...], SimulatorState]:
    _validate(questions)
    state = SimulatorState(col=rng.choice(COLOR_PERMUTATIONS))
    answers = _run_simulator(graph, questions, state, lambda: rng.randrange(3))
    return answers, state


class Pattern(enum.Enum):
    EMPTY = "EMPTY"
    SINGLE = "SINGLE"
    EDGE = "EDGE"
    TRIANGLE = "TRIANGLE"
    # never produced for three questions; marks a leak that would break zero knowledge
    OTHER = "OTHER"


@dataclass(frozen=True)
class LeakageReport:
    unveiled: frozenset
    pattern: Pattern

    def token(self) -> str:
        verts = ",".join(str(v) for v in sorted(self.unveiled))
        return f"pattern={self.pattern.value} unveiled={verts}"


def leakage(graph: Graph, questions: Sequence[Question]) -> LeakageReport:
    seen: dict[int, set] = {}
    for q in questions:
        i, j = q.edge
        if not graph.has_edge(i, j):
            continue
        seen.setdefault(i, set()).add(q.r)
        seen.setdefault(j, set()).add(q.s)
    unveiled = frozenset(v for v, rs in seen.items() if len(rs) >= 2)
    verts = sorted(unveiled)
    pairs_adjacent = all(graph.has_edge(a, b) for a in verts for b in verts if a < b)
    if not verts:
        pattern = Pattern.EMPTY
    elif len(verts) == 1:
        pattern = Pattern.SINGLE
    elif len(verts) == 2 and pairs_adjacent:
        pattern = Pattern.EDGE
    elif len(verts) == 3 and pairs_adjacent:
        pattern = Pattern.TRIANGLE
    else:
        pattern = Pattern.OTHER
    return LeakageReport(unveiled, pattern)


def unveiled_colors(questions: Sequence[Question], answers: Sequence[Answer]) -> dict[int, int]:
    """Colors a verifier recovers from commitments to one vertex under both randomness values."""
    commits: dict[tuple[int, int], int] = {}
    for q, a in zip(questions, answers):
        if a is None:
            continue
        commits[(q.edge[0], q.r)] = a[0]
        commits[(q.edge[1], q.s)] = a[1]
    out = {}
    for (v, r), w in commits.items():
        if r == 1 and (v, 2) in commits:
            out[v] = implicit_unveil(w, 1, commits[(v, 2)], 2)
    return out


def _involved(graph: Graph, questions: Sequence[Question]) -> list[int]:
    vs = set()
    for q in questions:
        if graph.has_edge(*q.edge):
            vs.update(q.edge)
    return sorted(vs)


def exact_view_dist(graph: Graph, questions: Sequence[Question]) -> Pmf:
    """Exact distribution of honest answers to a fixed question triple.

    Prover randomness is the color permutation and the masks; masks of
    vertices that are never asked do not affect the answers and are summed out.
    """
    _validate(questions)
    if graph.n > ZK_ENUMERATION_LIMIT:
        raise ZKError(f"n={graph.n} exceeds the enumeration limit {ZK_ENUMERATION_LIMIT}")
    base = base_coloring(graph)
    if base is None:
        raise GraphError("graph is not 3-colorable: honest view undefined")
    verts = _involved(graph, questions)
    counts: Counter = Counter()
    for perm in COLOR_PERMUTATIONS:
        coloring = base.permuted(perm)
        for ms in product(range(3), repeat=len(verts)):
            masks = [0] * graph.n
            for v, b in zip(verts, ms):
                masks[v - 1] = b
            secret = ProverSecret(coloring, tuple(masks))
            counts[tuple(honest_answer_committed(graph, secret, q) for q in questions)] += 1
    total = sum(counts.values())
    return Pmf({k: Fraction(v, total) for k, v in counts.items()})


def draws_needed(graph: Graph, questions: Sequence[Question]) -> int:
    used = [0]

    def draw() -> int:
        used[0] += 1
        return 0

    _run_simulator(graph, questions, SimulatorState(col=(0, 1, 2)), draw)
    return used[0]


def exact_sim_dist(graph: Graph, questions: Sequence[Question]) -> Pmf:
    """Exact output distribution of :func:`simulate`, enumerating its coins."""
    _validate(questions)
    if graph.n > ZK_ENUMERATION_LIMIT:
        raise ZKError(f"n={graph.n} exceeds the enumeration limit {ZK_ENUMERATION_LIMIT}")
    k = draws_needed(graph, questions)
    counts: Counter = Counter()
    for perm in COLOR_PERMUTATIONS:
        for coins in product(range(3), repeat=k):
            it = iter(coins)
            state = SimulatorState(col=perm)
            counts[_run_simulator(graph, questions, state, lambda: next(it))] += 1
    total = sum(counts.values())
    return Pmf({key: Fraction(v, total) for key, v in counts.items()})


def dist_equal(p: Pmf, q: Pmf) -> bool:
    """Exact equality of supports and probabilities."""
    return set(p) == set(q) and all(p[k] == q[k] for k in p)


def answers_token(answers: Sequence[Answer]) -> str:
    return " | ".join(answer_token(a) for a in answers)


def all_questions(graph: Graph, include_non_edges: bool = True) -> list[Question]:
    if include_non_edges:
        pairs = [(i, j) for i in graph.vertices for j in graph.vertices if i < j]
    else:
        pairs = list(graph.edges)
    return [Question(e, r, s) for e in pairs for r in NONZERO for s in NONZERO]


def all_triples(graph: Graph, include_non_edges: bool = True) -> Iterator[tuple[Question, Question, Question]]:
    qs = all_questions(graph, include_non_edges)
    return product(qs, repeat=3)


@dataclass
class ZKCheckResult:
    checked: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _zk_chunk(graph: Graph, triples: list) -> tuple[int, list]:
    bad = []
    for t in triples:
        if not dist_equal(exact_view_dist(graph, t), exact_sim_dist(graph, t)):
            bad.append(t)
    return len(triples), bad


def verify_zk(graph: Graph, triples: Optional[Iterable] = None, jobs: int = 1) -> ZKCheckResult:
    """Compare real and simulated views on every triple (all triples by default)."""
    items = list(all_triples(graph) if triples is None else triples)
    if jobs > 1:
        chunks = [items[k::jobs] for k in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_zk_chunk, [graph] * jobs, chunks))
    else:
        parts = [_zk_chunk(graph, items)]
    mismatches = sorted((t for _, bad in parts for t in bad), key=lambda t: tuple(q.token() for q in t))
    return ZKCheckResult(sum(n for n, _ in parts), mismatches)


def leakage_census(graph: Graph, include_non_edges: bool = True) -> Counter:
    return Counter(leakage(graph, t).pattern for t in all_triples(graph, include_non_edges))
