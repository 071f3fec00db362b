"""Cheating provers: exact acceptance, best responses and game values.

Deterministic strategies are tables from a prover's question space to an
answer pair.  Answers are coded ``3*w_lo + w_hi`` so a table is an int array
indexed by question number, and code order equals lexicographic answer order.

:class:`Game` precomputes the question support with integer weights over a
common denominator and a pass table ``passes[k, a1, a2]`` filled by the
engine's reference check, so every value below is an exact rational.
"""

from __future__ import annotations

import functools
import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .commit import NONZERO, commit
from .dist import Question, as_epsilon
from .engine import Protocol, answer_token, check, question_pmf, question_token
from .graph import Coloring, Graph

ANSWERS: tuple[tuple[int, int], ...] = tuple((a, b) for a in range(3) for b in range(3))
STD2_ENUM_LIMIT = 8


class StrategyError(ValueError):
    pass


class GraphTooLargeError(ValueError):
    pass


def answer_code(a: tuple[int, int]) -> int:
    return 3 * a[0] + a[1]


class QuestionSpace:
    """Ordered list of the questions one prover can receive on edges of ``graph``."""

    def __init__(self, graph: Graph, protocol: Protocol):
        self.graph = graph
        self.protocol = protocol
        if protocol is Protocol.STD2:
            qs: list = list(graph.edges)
        else:
            qs = [Question(e, r, s) for e in graph.edges for r in NONZERO for s in NONZERO]
        self.questions = tuple(qs)
        self.index = {q: k for k, q in enumerate(qs)}

    def __len__(self) -> int:
        return len(self.questions)

    def __eq__(self, other) -> bool:
        return isinstance(other, QuestionSpace) and self.questions == other.questions

    def __hash__(self) -> int:
        return hash(self.questions)


@dataclass(frozen=True)
class StrategyTable:
    space: QuestionSpace
    codes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        codes = np.asarray(self.codes, dtype=np.int64)
        if codes.shape != (len(self.space),):
            raise StrategyError(f"table has shape {codes.shape}, expected ({len(self.space)},)")
        if codes.min(initial=0) < 0 or codes.max(initial=0) > 8:
            raise StrategyError("answer codes must lie in 0..8")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StrategyTable)
            and self.space == other.space
            and np.array_equal(self.codes, other.codes)
        )

    def __hash__(self) -> int:
        return hash((self.space, self.codes.tobytes()))

    def answer(self, q) -> tuple[int, int]:
        k = self.space.index.get(q)
        if k is None:
            # off-edge questions are refused, as an honest prover would
            return None
        return ANSWERS[int(self.codes[k])]

    __call__ = answer

    @classmethod
    def from_mapping(cls, space: QuestionSpace, table: Mapping) -> "StrategyTable":
        missing = [q for q in space.questions if q not in table]
        if missing:
            raise StrategyError(f"strategy not total: {len(missing)} questions unanswered, e.g. {missing[0]}")
        return cls(space, np.array([answer_code(table[q]) for q in space.questions]))

    @classmethod
    def from_function(cls, space: QuestionSpace, fn: Callable) -> "StrategyTable":
        return cls(space, np.array([answer_code(fn(q)) for q in space.questions]))

    def to_mapping(self) -> dict:
        return {q: ANSWERS[int(c)] for q, c in zip(self.space.questions, self.codes)}

    def replace(self, q, answer: tuple[int, int]) -> "StrategyTable":
        codes = self.codes.copy()
        codes[self.space.index[q]] = answer_code(answer)
        return StrategyTable(self.space, codes)

    def lines(self) -> list[str]:
        return [f"{question_token(q)} | {answer_token(ANSWERS[int(c)])}" for q, c in zip(self.space.questions, self.codes)]


def coloring_table(space: QuestionSpace, coloring: Coloring, masks: Optional[Sequence[int]] = None) -> StrategyTable:
    """Well-defined table committing to ``coloring`` (any coloring, proper or not)."""
    if masks is None:
        masks = [0] * space.graph.n
    if space.protocol is Protocol.STD2:
        return StrategyTable.from_function(space, lambda e: (coloring[e[0]], coloring[e[1]]))

    def ans(q: Question):
        i, j = q.edge
        return (commit(masks[i - 1], q.r, coloring[i]), commit(masks[j - 1], q.s, coloring[j]))

    return StrategyTable.from_function(space, ans)


def vertex_table(space: QuestionSpace, values: Mapping[tuple[int, int], int]) -> StrategyTable:
    """Table answering ``values[(v, r)]`` for every vertex/randomness: the well-defined tables."""
    return StrategyTable.from_function(
        space, lambda q: (values[(q.edge[0], q.r)], values[(q.edge[1], q.s)])
    )


def _prover_protocol(protocol: Protocol) -> Protocol:
    return Protocol.STD2 if protocol is Protocol.STD2 else Protocol.LOC2


class Game:
    """The two-prover game underlying ``protocol`` (the third prover is handled separately)."""

    def __init__(self, graph: Graph, protocol: Protocol, eps):
        self.graph = graph
        self.protocol = protocol
        self.eps = as_epsilon(eps)
        pair_protocol = _prover_protocol(protocol)
        self.space = QuestionSpace(graph, pair_protocol)
        pmf = question_pmf(graph, pair_protocol, self.eps)
        outcomes = sorted(pmf, key=lambda qs: (self.space.index[qs[0]], self.space.index[qs[1]]))
        self.denominator = int(np.lcm.reduce([pmf[o].denominator for o in outcomes]))
        self.outcomes = outcomes
        self.pair_index = {o: k for k, o in enumerate(outcomes)}
        self.idx1 = np.array([self.space.index[o[0]] for o in outcomes])
        self.idx2 = np.array([self.space.index[o[1]] for o in outcomes])
        self.weights = np.array([int(pmf[o] * self.denominator) for o in outcomes], dtype=np.int64)
        passes = np.zeros((len(outcomes), 9, 9), dtype=bool)
        for k, qs in enumerate(outcomes):
            for c1, a1 in enumerate(ANSWERS):
                for c2, a2 in enumerate(ANSWERS):
                    passes[k, c1, c2] = check(graph, pair_protocol, qs, (a1, a2)).accepted
        self.passes = passes
        n_q = len(self.space)
        self._onehot1 = np.zeros((len(outcomes), n_q), dtype=np.int64)
        self._onehot1[np.arange(len(outcomes)), self.idx1] = 1
        self._onehot2 = np.zeros((len(outcomes), n_q), dtype=np.int64)
        self._onehot2[np.arange(len(outcomes)), self.idx2] = 1
        if protocol is Protocol.QNL3:
            self._build_triple()

    def _build_triple(self) -> None:
        pmf = question_pmf(self.graph, Protocol.QNL3, self.eps)
        trip = sorted(pmf, key=lambda qs: tuple(self.space.index[q] for q in qs))
        self.triple_den = int(np.lcm.reduce([pmf[o].denominator for o in trip]))
        self.t_pair = np.array([self.pair_index[(o[0], o[1])] for o in trip])
        self.t_idx = np.array([[self.space.index[q] for q in o] for o in trip])
        self.t_same1 = np.array([o[2] == o[0] for o in trip])
        self.t_same2 = np.array([o[2] == o[1] for o in trip])
        self.t_weights = np.array([int(pmf[o] * self.triple_den) for o in trip], dtype=np.int64)

    # -- evaluation ---------------------------------------------------------

    def pair_numerator(self, w1: np.ndarray, w2: np.ndarray) -> int:
        ok = self.passes[np.arange(len(self.outcomes)), w1[self.idx1], w2[self.idx2]]
        return int(self.weights[ok].sum())

    def pair_value(self, w1: np.ndarray, w2: np.ndarray) -> Fraction:
        return Fraction(self.pair_numerator(w1, w2), self.denominator)

    def batch_numerators(self, w1s: np.ndarray, w2s: np.ndarray) -> np.ndarray:
        """Acceptance numerators for row-aligned batches of tables, shape ``(B,)``."""
        k = np.arange(len(self.outcomes))
        ok = self.passes[k[None, :], w1s[:, self.idx1], w2s[:, self.idx2]]
        return ok.astype(np.int64) @ self.weights

    def triple_value(self, w1: np.ndarray, w2: np.ndarray, w3: np.ndarray) -> Fraction:
        a1 = w1[self.t_idx[:, 0]]
        a2 = w2[self.t_idx[:, 1]]
        a3 = w3[self.t_idx[:, 2]]
        ok = self.passes[self.t_pair, a1, a2]
        ok &= ~self.t_same1 | (a3 == a1)
        ok &= ~self.t_same2 | (a3 == a2)
        return Fraction(int(self.t_weights[ok].sum()), self.triple_den)

    def value(self, tables: Sequence[np.ndarray]) -> Fraction:
        if self.protocol is Protocol.QNL3:
            return self.triple_value(*tables)
        return self.pair_value(*tables)

    # -- best responses -----------------------------------------------------

    def response_scores(self, opponent: np.ndarray, slot: int) -> np.ndarray:
        """Integer score of every (question, answer) for ``slot`` against a fixed opponent."""
        k = np.arange(len(self.outcomes))
        if slot == 2:
            gains = self.passes[k, opponent[self.idx1], :] * self.weights[:, None]
            return self._onehot2.T @ gains
        gains = self.passes[k, :, opponent[self.idx2]] * self.weights[:, None]
        return self._onehot1.T @ gains

    def best_response(self, opponent: np.ndarray, slot: int) -> np.ndarray:
        # argmax returns the first maximum: lexicographically smallest answer
        return np.argmax(self.response_scores(opponent, slot), axis=1)

    def batch_best_response_numerators(self, w1s: np.ndarray) -> np.ndarray:
        """Value of (W1, BR(W1)) for a batch of prover-1 tables."""
        k = np.arange(len(self.outcomes))
        gains = self.passes[k[None, :], w1s[:, self.idx1], :] * self.weights[None, :, None]
        scores = np.einsum("bka,kq->bqa", gains, self._onehot2)
        return scores.max(axis=2).sum(axis=1)


@functools.lru_cache(maxsize=32)
def get_game(graph: Graph, protocol: Protocol, eps: Fraction) -> Game:
    return Game(graph, protocol, eps)


TableLike = Union[StrategyTable, Mapping]


def _codes(game: Game, table: TableLike) -> np.ndarray:
    if isinstance(table, StrategyTable):
        if table.space != game.space:
            raise StrategyError("strategy table built for a different question space")
        return np.asarray(table.codes)
    return np.asarray(StrategyTable.from_mapping(game.space, table).codes)


def strategy_accept_prob(graph: Graph, eps, protocol: Protocol, strategies: Sequence[TableLike]) -> Fraction:
    """Exact acceptance probability of deterministic provers playing ``strategies``."""
    if len(strategies) != protocol.arity:
        raise StrategyError(f"{protocol.value} needs {protocol.arity} strategies")
    game = get_game(graph, protocol, as_epsilon(eps))
    return game.value([_codes(game, t) for t in strategies])


def best_response(graph: Graph, eps, protocol: Protocol, opponent: TableLike, slot: int) -> StrategyTable:
    """Exact best response of prover ``slot`` (1 or 2) in the two-prover game.

    For the three-prover protocol the response is computed in the underlying
    two-prover game; a classical third prover then copies one of the tables.
    """
    if slot not in (1, 2):
        raise ValueError("slot must be 1 or 2")
    game = get_game(graph, Protocol.STD2 if protocol is Protocol.STD2 else Protocol.LOC2, as_epsilon(eps))
    return StrategyTable(game.space, game.best_response(_codes(game, opponent), slot))


@dataclass
class GameValueReport:
    value: Fraction
    method: str
    witnesses: tuple[StrategyTable, ...]
    restarts: int = 0
    iterations: int = 0
    trace: list = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if not 0 <= self.value <= 1:
            raise ValueError(f"game value {self.value} outside [0,1]")

    def headline(self) -> str:
        v = self.value
        return f"{self.method} value={v.numerator}/{v.denominator} restarts={self.restarts}"

    def to_text(self) -> str:
        out = [self.headline()]
        for k, w in enumerate(self.witnesses, start=1):
            out += [f"W{k} {line}" for line in w.lines()]
        return "\n".join(out) + "\n"


def _digits(start: int, stop: int, width: int) -> np.ndarray:
    t = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(t), width), dtype=np.int64)
    for col in range(width - 1, -1, -1):
        out[:, col] = t % 9
        t //= 9
    return out


def _std2_chunk(graph: Graph, eps: Fraction, start: int, stop: int) -> tuple[int, int]:
    game = get_game(graph, Protocol.STD2, eps)
    best, arg = -1, -1
    step = 20000
    for lo in range(start, stop, step):
        hi = min(lo + step, stop)
        vals = game.batch_best_response_numerators(_digits(lo, hi, len(game.space)))
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, arg = int(vals[k]), lo + k
    return best, arg


def exact_value_std2(graph: Graph, eps=Fraction(1, 3), jobs: int = 1) -> GameValueReport:
    """Exact classical value of the plain two-prover game by enumerating prover 1."""
    eps = as_epsilon(eps)
    if graph.m > STD2_ENUM_LIMIT:
        raise GraphTooLargeError(f"|E|={graph.m} exceeds the enumeration limit {STD2_ENUM_LIMIT}")
    game = get_game(graph, Protocol.STD2, eps)
    total = 9 ** graph.m
    if jobs > 1:
        bounds = np.linspace(0, total, jobs + 1, dtype=np.int64)
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_std2_chunk, [graph] * jobs, [eps] * jobs, bounds[:-1].tolist(), bounds[1:].tolist()))
    else:
        parts = [_std2_chunk(graph, eps, 0, total)]
    best, arg = -1, -1
    for val, idx in parts:  # chunks ascend, so ties keep the smallest table index
        if val > best:
            best, arg = val, idx
    w1 = _digits(arg, arg + 1, graph.m)[0]
    w2 = game.best_response(w1, 2)
    value = game.pair_value(w1, w2)
    assert value == Fraction(best, game.denominator)
    return GameValueReport(
        value, "EnumBestResponse", (StrategyTable(game.space, w1), StrategyTable(game.space, w2)), restarts=0, iterations=total
    )


def derive_seed(seed: int, *stream) -> int:
    h = hashlib.sha256(repr((seed,) + tuple(stream)).encode()).digest()
    return int.from_bytes(h[:8], "little")


@dataclass
class _SearchResult:
    numerator: int
    w1: np.ndarray
    w2: np.ndarray
    iterations: int
    trace: list


def _climb(game: Game, w1: np.ndarray, w2: np.ndarray, max_iter: int = 200) -> _SearchResult:
    value = game.pair_numerator(w1, w2)
    trace = [value]
    it = 0
    while it < max_iter:
        it += 1
        w2 = game.best_response(w1, 2)
        w1 = game.best_response(w2, 1)
        new = game.pair_numerator(w1, w2)
        trace.append(new)
        if new <= value:
            break
        value = new
    return _SearchResult(game.pair_numerator(w1, w2), w1, w2, it, trace)


def _search_chunk(graph: Graph, eps: Fraction, protocol: Protocol, seed: int, restarts: range):
    game = get_game(graph, protocol, eps)
    n_q = len(game.space)
    results = []
    for k in restarts:
        rng = np.random.default_rng(derive_seed(seed, k))
        res = _climb(game, rng.integers(0, 9, n_q), rng.integers(0, 9, n_q))
        results.append((k, res))
    return results


def local_search_value(
    graph: Graph,
    eps=Fraction(1, 3),
    protocol: Protocol = Protocol.LOC2,
    restarts: int = 100,
    seed: int = 0,
    jobs: int = 1,
    keep_traces: bool = False,
) -> GameValueReport:
    """Lower bound on the classical value by alternating best responses from random tables.

    Restart ``k`` draws its initial tables from a stream derived from
    ``(seed, k)``, so results do not depend on ``jobs``.  For the three-prover
    protocol each fixpoint ``(W1, W2)`` is scored with the third prover
    copying ``W1`` or ``W2``, whichever is better.
    """
    eps = as_epsilon(eps)
    game = get_game(graph, protocol, eps)
    if jobs > 1:
        splits = [range(j, restarts, jobs) for j in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            chunks = list(pool.map(_search_chunk, [graph] * jobs, [eps] * jobs, [protocol] * jobs, [seed] * jobs, splits))
        results = sorted((r for c in chunks for r in c), key=lambda kr: kr[0])
    else:
        results = _search_chunk(graph, eps, protocol, seed, range(restarts))

    best: Optional[tuple] = None
    iterations = 0
    traces = []
    for _, res in results:
        iterations += res.iterations
        if keep_traces:
            traces.append([Fraction(v, game.denominator) for v in res.trace])
        if protocol is Protocol.QNL3:
            cands = [
                (game.triple_value(res.w1, res.w2, res.w1), (res.w1, res.w2, res.w1)),
                (game.triple_value(res.w1, res.w2, res.w2), (res.w1, res.w2, res.w2)),
            ]
            val, tabs = max(cands, key=lambda c: c[0])
        else:
            val, tabs = Fraction(res.numerator, game.denominator), (res.w1, res.w2)
        if best is None or val > best[0]:
            best = (val, tabs)
    assert best is not None, "restarts must be positive"
    witnesses = tuple(StrategyTable(game.space, t) for t in best[1])
    return GameValueReport(best[0], "LocalSearch", witnesses, restarts=restarts, iterations=iterations, trace=traces)


# -- soundness bound formulas ---------------------------------------------

def classical_bound(m: int) -> Fraction:
    """Upper bound ``1 - 1/(12 m)`` on the classical value of the committed two-prover game."""
    if m < 1:
        raise ValueError("edge count must be positive")
    return 1 - Fraction(1, 12 * m)


@dataclass(frozen=True)
class QuantumBoundChain:
    m: int
    question_count: int
    sqrt_delta_lower: Fraction
    sqrt_delta_floor: Fraction
    delta_floor: Fraction
    bound: Fraction

    def consistent(self) -> bool:
        q = self.question_count
        return (
            q == 4 * self.m
            and self.sqrt_delta_lower == Fraction(1, (1 + 12 * q) * 12 * self.m)
            and self.sqrt_delta_lower >= self.sqrt_delta_floor
            and self.delta_floor == self.sqrt_delta_floor ** 2
            and self.delta_floor >= 1 - self.bound
        )


def quantum_bound_chain(m: int) -> QuantumBoundChain:
    if m < 1:
        raise ValueError("edge count must be positive")
    q = 4 * m
    floor = Fraction(1, 588 * m * m)
    return QuantumBoundChain(
        m=m,
        question_count=q,
        sqrt_delta_lower=Fraction(1, 12 * m + 576 * m * m),
        sqrt_delta_floor=floor,
        delta_floor=floor * floor,
        bound=1 - Fraction(1, 25 * m) ** 4,
    )


def quantum_bound(m: int) -> Fraction:
    """Upper bound ``1 - (1/(25 m))^4`` on the entangled value of the three-prover game."""
    return quantum_bound_chain(m).bound


def chain_holds_upto(limit: int) -> bool:
    """Integer form of the chain for every ``m`` in ``1..limit``.

    With ``a = 12 m + 576 m^2`` and ``b = 588 m^2`` the chain needs ``a <= b``
    and ``b^2 <= (25 m)^4``.
    """
    for m in range(1, limit + 1):
        m2 = m * m
        if 12 * m + 576 * m2 > 588 * m2:
            return False
        if 345744 * m2 * m2 > 390625 * m2 * m2:
            return False
    return True
