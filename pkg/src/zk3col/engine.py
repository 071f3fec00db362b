"""Honest provers, verifier checks and single-round execution.

Answers are ``(w_lo, w_hi)`` pairs of trits (values for the lower and higher
vertex of the asked edge) or ``None`` for a refusal.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .commit import NONZERO, ProverSecret, f3_add
from .dist import (
    Pmf,
    Question,
    as_epsilon,
    edge_token,
    parse_edge_token,
    parse_question,
    pmf_base,
    pmf_committed,
    pmf_triple,
    sample_base,
    sample_committed,
    sample_triple,
)
from .graph import Edge, Graph, RelationKind, edge_relation

Answer = Optional[tuple[int, int]]
REFUSED: Answer = None


class Protocol(enum.Enum):
    STD2 = "std2"
    LOC2 = "loc2"
    QNL3 = "qnl3"

    @property
    def arity(self) -> int:
        return 3 if self is Protocol.QNL3 else 2

    @property
    def committed(self) -> bool:
        return self is not Protocol.STD2


class Reason(enum.Enum):
    ALL_PASSED = "ALL_PASSED"
    EDGE_VERIFICATION_FAILED = "EDGE_VERIFICATION_FAILED"
    WELL_DEFINITION_FAILED = "WELL_DEFINITION_FAILED"
    CONSISTENCY_FAILED = "CONSISTENCY_FAILED"
    PROVER_REFUSED = "PROVER_REFUSED"
    TIMING_VIOLATION = "TIMING_VIOLATION"


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Reason

    def __post_init__(self) -> None:
        if self.accepted != (self.reason is Reason.ALL_PASSED):
            raise ValueError(f"inconsistent verdict {self.accepted} / {self.reason}")

    def token(self) -> str:
        return f"{'ACCEPT' if self.accepted else 'REJECT'} {self.reason.value}"

    @classmethod
    def parse(cls, token: str) -> "Verdict":
        word, reason = token.split()
        return cls(word == "ACCEPT", Reason(reason))


ACCEPT = Verdict(True, Reason.ALL_PASSED)


def reject(reason: Reason) -> Verdict:
    return Verdict(False, reason)


def answer_token(a: Answer) -> str:
    return "REFUSE" if a is None else f"{a[0]} {a[1]}"


def parse_answer(token: str) -> Answer:
    token = token.strip()
    if token == "REFUSE":
        return None
    x, y = token.split()
    return (int(x), int(y))


# -- honest provers -------------------------------------------------------

def honest_answer_std(graph: Graph, secret: ProverSecret, q: Edge) -> Answer:
    i, j = q
    if not graph.has_edge(i, j):
        return REFUSED
    return (secret.color(i), secret.color(j))


def honest_answer_committed(graph: Graph, secret: ProverSecret, q: Question) -> Answer:
    if q.r not in NONZERO or q.s not in NONZERO:
        raise ValueError(f"randomness must be a nonzero trit: {q}")
    i, j = q.edge
    if not graph.has_edge(i, j):
        return REFUSED
    return (secret.commitment(i, q.r), secret.commitment(j, q.s))


def honest_provers(graph: Graph, secret: ProverSecret, protocol: Protocol) -> list[Callable]:
    if protocol is Protocol.STD2:
        fn = lambda q: honest_answer_std(graph, secret, q)  # noqa: E731
    else:
        fn = lambda q: honest_answer_committed(graph, secret, q)  # noqa: E731
    return [fn] * protocol.arity


# -- checks ---------------------------------------------------------------

def _edge(q) -> Edge:
    return q.edge if isinstance(q, Question) else q


def _refusal_verdict(graph: Graph, questions: Sequence, answers: Sequence[Answer]) -> Optional[Verdict]:
    refused = [k for k, a in enumerate(answers) if a is None]
    if not refused:
        return None
    if any(graph.has_edge(*_edge(questions[k])) for k in refused):
        return reject(Reason.PROVER_REFUSED)
    return None


def _value_at(q, a: tuple[int, int], v: int) -> int:
    return a[0] if v == _edge(q)[0] else a[1]


def check_std2(graph: Graph, q: Sequence[Edge], a: Sequence[Answer]) -> Verdict:
    (e1, e2), (a1, a2) = q, a
    refusal = _refusal_verdict(graph, q, a)
    if refusal is not None:
        return refusal
    if a1 is None or a2 is None:
        return ACCEPT
    rel = edge_relation(e1, e2)
    if rel.kind is RelationKind.SAME:
        if a1 == a2 and a1[0] != a1[1]:
            return ACCEPT
        return reject(Reason.EDGE_VERIFICATION_FAILED)
    if rel.kind is RelationKind.SHARED:
        h = rel.vertex
        if _value_at(e1, a1, h) == _value_at(e2, a2, h):
            return ACCEPT
        return reject(Reason.WELL_DEFINITION_FAILED)
    return ACCEPT


def check_loc2(graph: Graph, q: Sequence[Question], a: Sequence[Answer]) -> Verdict:
    (q1, q2), (a1, a2) = q, a
    refusal = _refusal_verdict(graph, q, a)
    if refusal is not None:
        return refusal
    if a1 is None or a2 is None:
        return ACCEPT
    rel = edge_relation(q1.edge, q2.edge)
    if rel.kind is RelationKind.SAME:
        if q1.r != q2.r and q1.s != q2.s:
            # both vertices implicitly unveiled; 2^-1 is a bijection so compare sums
            if f3_add(a1[0], a2[0]) != f3_add(a1[1], a2[1]):
                return ACCEPT
            return reject(Reason.EDGE_VERIFICATION_FAILED)
        ok_lo = a1[0] == a2[0] or q1.r != q2.r
        ok_hi = a1[1] == a2[1] or q1.s != q2.s
        return ACCEPT if ok_lo and ok_hi else reject(Reason.WELL_DEFINITION_FAILED)
    if rel.kind is RelationKind.SHARED:
        h = rel.vertex
        if q1.randomness(h) != q2.randomness(h):
            return ACCEPT
        if _value_at(q1, a1, h) == _value_at(q2, a2, h):
            return ACCEPT
        return reject(Reason.WELL_DEFINITION_FAILED)
    return ACCEPT


def check_qnl3(graph: Graph, q: Sequence[Question], a: Sequence[Answer]) -> Verdict:
    (q1, q2, q3), (a1, a2, a3) = q, a
    refusal = _refusal_verdict(graph, q, a)
    if refusal is not None:
        return refusal
    if q3 == q1 and a3 != a1:
        return reject(Reason.CONSISTENCY_FAILED)
    if q3 == q2 and a3 != a2:
        return reject(Reason.CONSISTENCY_FAILED)
    return check_loc2(graph, (q1, q2), (a1, a2))


CHECKS = {
    Protocol.STD2: check_std2,
    Protocol.LOC2: check_loc2,
    Protocol.QNL3: check_qnl3,
}


def check(graph: Graph, protocol: Protocol, q: Sequence, a: Sequence[Answer]) -> Verdict:
    return CHECKS[protocol](graph, q, a)


def question_pmf(graph: Graph, protocol: Protocol, eps) -> Pmf:
    if protocol is Protocol.STD2:
        return pmf_base(graph, eps)
    if protocol is Protocol.LOC2:
        return pmf_committed(graph, eps)
    return pmf_triple(graph, eps)


def sample_questions(graph: Graph, protocol: Protocol, eps: Fraction, rng: random.Random) -> tuple:
    if protocol is Protocol.STD2:
        return sample_base(graph, eps, rng)
    if protocol is Protocol.LOC2:
        return sample_committed(graph, eps, rng)
    return sample_triple(graph, eps, rng)


# -- rounds and transcripts -----------------------------------------------

def question_token(q) -> str:
    return q.token() if isinstance(q, Question) else edge_token(q)


def parse_question_token(token: str, protocol: Protocol):
    if protocol is Protocol.STD2:
        return parse_edge_token(token)
    return parse_question(token)


@dataclass(frozen=True)
class Transcript:
    protocol: Protocol
    eps: Fraction
    seed: int
    questions: tuple
    answers: tuple
    verdict: Verdict

    def __post_init__(self) -> None:
        k = self.protocol.arity
        if len(self.questions) != k or len(self.answers) != k:
            raise ValueError(f"{self.protocol.value} transcripts carry {k} questions and answers")

    def to_line(self) -> str:
        parts = [f"{self.protocol.value} {self.eps.numerator}/{self.eps.denominator} {self.seed}"]
        parts += [question_token(q) for q in self.questions]
        parts += [answer_token(a) for a in self.answers]
        parts.append(self.verdict.token())
        return " | ".join(parts)

    @classmethod
    def from_line(cls, line: str) -> "Transcript":
        fields = [f.strip() for f in line.strip().split("|")]
        name, eps, seed = fields[0].split()
        protocol = Protocol(name)
        k = protocol.arity
        qs = tuple(parse_question_token(t, protocol) for t in fields[1 : 1 + k])
        ans = tuple(parse_answer(t) for t in fields[1 + k : 1 + 2 * k])
        return cls(protocol, Fraction(eps), int(seed), qs, ans, Verdict.parse(fields[1 + 2 * k]))


def run_round(
    graph: Graph,
    protocol: Protocol,
    eps,
    seed: int,
    provers: Sequence[Callable],
) -> Transcript:
    """Sample one question tuple from ``seed``, collect answers, and check them."""
    eps = as_epsilon(eps)
    if len(provers) != protocol.arity:
        raise ValueError(f"{protocol.value} needs {protocol.arity} provers, got {len(provers)}")
    rng = random.Random(seed)
    questions = sample_questions(graph, protocol, eps, rng)
    answers = tuple(p(q) for p, q in zip(provers, questions))
    verdict = check(graph, protocol, questions, answers)
    return Transcript(protocol, eps, seed, tuple(questions), answers, verdict)


def exact_acceptance(graph: Graph, protocol: Protocol, eps, provers: Sequence[Callable]) -> Fraction:
    """Acceptance probability of deterministic provers, summed over the exact question pmf."""
    pmf = question_pmf(graph, protocol, eps)
    total = Fraction(0)
    for qs, p in pmf.items():
        answers = tuple(f(q) for f, q in zip(provers, qs))
        if check(graph, protocol, qs, answers).accepted:
            total += p
    return total
