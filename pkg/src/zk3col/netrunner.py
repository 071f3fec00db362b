"""Prover servers and a split verifier that talks to them over TCP.

Frames are ASCII lines, space separated, tag first::

    HELLO <protocol> <digest> <role>
    Q <i> <j> <r> <s>
    A <w1> <w2>
    A-REFUSE
    VERDICT <ACCEPT|REJECT> <reason>
    ERR <text>

Each prover gets exactly one ``Q`` per round, so a prover's k-th ``Q`` in a
session belongs to round k.  Honest provers derive a fresh coloring and
fresh masks for every round from their shared seed and k; reusing masks
across rounds would let a verifier combine commitments from different rounds.

The deadline is wall-clock time at the coordinator between sending a ``Q``
and reading the reply.  It demonstrates the mechanism only.
"""

from __future__ import annotations

import logging
import os
import random
import socket
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .adversary import derive_seed
from .commit import ProverSecret, random_secret
from .dist import Question, as_epsilon
from .engine import (
    Protocol,
    Reason,
    Transcript,
    Verdict,
    check,
    honest_answer_committed,
    honest_answer_std,
    reject,
    sample_questions,
)
from .graph import Graph

log = logging.getLogger(__name__)

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def graph_digest(graph: Graph) -> str:
    return f"{fnv1a_64(graph.to_text().encode('ascii')):016x}"


class WireError(ValueError):
    pass


class NetError(RuntimeError):
    pass


@dataclass(frozen=True)
class Hello:
    protocol: str
    digest: str
    role: int


@dataclass(frozen=True)
class Q:
    i: int
    j: int
    r: int
    s: int


@dataclass(frozen=True)
class A:
    w1: int
    w2: int


@dataclass(frozen=True)
class ARefuse:
    pass


@dataclass(frozen=True)
class VerdictMsg:
    accepted: bool
    reason: str


@dataclass(frozen=True)
class Error:
    text: str


WireMessage = Union[Hello, Q, A, ARefuse, VerdictMsg, Error]
PROTOCOL_NAMES = {p.value for p in Protocol}
REASON_NAMES = {r.value for r in Reason}


def _trit(tok: str) -> int:
    if tok not in ("0", "1", "2"):
        raise WireError(f"not a trit: {tok!r}")
    return int(tok)


def _vertex(tok: str) -> int:
    if not tok.isdigit() or int(tok) < 1:
        raise WireError(f"not a vertex: {tok!r}")
    return int(tok)


def encode(msg: WireMessage) -> str:
    if isinstance(msg, Hello):
        return f"HELLO {msg.protocol} {msg.digest} {msg.role}"
    if isinstance(msg, Q):
        return f"Q {msg.i} {msg.j} {msg.r} {msg.s}"
    if isinstance(msg, A):
        return f"A {msg.w1} {msg.w2}"
    if isinstance(msg, ARefuse):
        return "A-REFUSE"
    if isinstance(msg, VerdictMsg):
        return f"VERDICT {'ACCEPT' if msg.accepted else 'REJECT'} {msg.reason}"
    if isinstance(msg, Error):
        return f"ERR {msg.text}"
    raise TypeError(f"not a wire message: {msg!r}")


def decode(line: str) -> WireMessage:
    line = line.rstrip("\r\n")
    if line.startswith("ERR"):
        if line != "ERR" and not line.startswith("ERR "):
            raise WireError(f"unknown frame {line!r}")
        return Error(line[4:])
    parts = line.split(" ")
    tag, args = parts[0], parts[1:]
    try:
        if tag == "HELLO" and len(args) == 3:
            proto, digest, role = args
            if proto not in PROTOCOL_NAMES:
                raise WireError(f"unknown protocol {proto!r}")
            if len(digest) != 16 or any(c not in "0123456789abcdef" for c in digest):
                raise WireError(f"bad digest {digest!r}")
            if role not in ("1", "2", "3"):
                raise WireError(f"bad role {role!r}")
            return Hello(proto, digest, int(role))
        if tag == "Q" and len(args) == 4:
            return Q(_vertex(args[0]), _vertex(args[1]), _trit(args[2]), _trit(args[3]))
        if tag == "A" and len(args) == 2:
            return A(_trit(args[0]), _trit(args[1]))
        if tag == "A-REFUSE" and not args:
            return ARefuse()
        if tag == "VERDICT" and len(args) == 2:
            if args[0] not in ("ACCEPT", "REJECT") or args[1] not in REASON_NAMES:
                raise WireError(f"bad verdict {line!r}")
            return VerdictMsg(args[0] == "ACCEPT", args[1])
    except WireError:
        raise
    raise WireError(f"malformed frame {line!r}")


def round_secret(graph: Graph, seed: int, round_index: int) -> ProverSecret:
    """Shared prover state for one round, derived from the provers' common seed."""
    return random_secret(graph, random.Random(derive_seed(seed, "round-secret", round_index)))


def round_seed(seed: int, round_index: int) -> int:
    """Verifier seed for one round of a run."""
    return derive_seed(seed, "round", round_index)


def honest_answer(graph: Graph, protocol: Protocol, secret: ProverSecret, q):
    if protocol is Protocol.STD2:
        return honest_answer_std(graph, secret, q)
    return honest_answer_committed(graph, secret, q)


# -- prover side -----------------------------------------------------------

class ProverServer:
    """Honest prover listening on ``host:port``; serves sessions one after another."""

    def __init__(
        self,
        graph: Graph,
        seed: int,
        host: str = "127.0.0.1",
        port: int = 0,
        protocol: Optional[Protocol] = None,
        delay: float = 0.0,
        session_log: Optional[str] = None,
    ):
        self.graph = graph
        self.seed = seed
        self.protocol = protocol
        self.delay = delay
        self.session_log = session_log
        self.digest = graph_digest(graph)
        self._sock = socket.create_server((host, port))
        self._stop = threading.Event()

    @property
    def address(self) -> tuple[str, int]:
        return self._sock.getsockname()[:2]

    def close(self) -> None:
        self._stop.set()
        try:
            self._sock.close()
        except OSError:
            pass

    def serve_forever(self, max_sessions: Optional[int] = None) -> None:
        served = 0
        while not self._stop.is_set() and (max_sessions is None or served < max_sessions):
            try:
                conn, peer = self._sock.accept()
            except OSError:
                break
            with conn:
                log.info("session from %s:%s", *peer[:2])
                self.handle(conn)
            served += 1

    def _log(self, line: str) -> None:
        if self.session_log:
            with open(self.session_log, "a", encoding="ascii") as fh:
                fh.write(line + "\n")

    def handle(self, conn: socket.socket) -> None:
        rfile = conn.makefile("r", encoding="ascii", newline="\n")
        wfile = conn.makefile("w", encoding="ascii", newline="\n")

        def send(msg: WireMessage) -> None:
            wfile.write(encode(msg) + "\n")
            wfile.flush()

        protocol: Optional[Protocol] = None
        rounds = 0
        try:
            for line in rfile:
                self._log(line.rstrip("\n"))
                try:
                    msg = decode(line)
                except WireError as exc:
                    send(Error(str(exc)))
                    return
                if protocol is None:
                    if not isinstance(msg, Hello):
                        send(Error("expected HELLO"))
                        return
                    if msg.digest != self.digest:
                        send(Error(f"graph digest mismatch: have {self.digest}"))
                        return
                    if self.protocol is not None and msg.protocol != self.protocol.value:
                        send(Error(f"protocol mismatch: serving {self.protocol.value}"))
                        return
                    protocol = Protocol(msg.protocol)
                    send(Hello(msg.protocol, self.digest, msg.role))
                    continue
                if isinstance(msg, Q):
                    if protocol.committed and (msg.r == 0 or msg.s == 0):
                        send(Error("randomness must be nonzero"))
                        return
                    if msg.i >= msg.j:
                        send(Error("edge must be given as i < j"))
                        return
                    secret = round_secret(self.graph, self.seed, rounds)
                    rounds += 1
                    q = (msg.i, msg.j) if protocol is Protocol.STD2 else Question((msg.i, msg.j), msg.r, msg.s)
                    ans = honest_answer(self.graph, protocol, secret, q)
                    if self.delay:
                        time.sleep(self.delay)
                    send(ARefuse() if ans is None else A(*ans))
                elif isinstance(msg, VerdictMsg):
                    continue
                else:
                    send(Error(f"unexpected frame {encode(msg)}"))
                    return
        except (OSError, ValueError) as exc:
            log.warning("session aborted: %s", exc)
        finally:
            for f in (rfile, wfile):
                try:
                    f.close()
                except OSError:
                    pass


def serve_prover(listen: str, graph: Graph, seed: int, **kwargs) -> None:
    host, port = parse_endpoint(listen)
    server = ProverServer(graph, seed, host, port, **kwargs)
    addr = server.address
    print(f"LISTENING {addr[0]}:{addr[1]}", flush=True)
    try:
        server.serve_forever()
    finally:
        server.close()


def parse_endpoint(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"endpoint must be HOST:PORT, got {text!r}")
    return host or "127.0.0.1", int(port)


# -- verifier side ---------------------------------------------------------

class ProverSession:
    """Connection from one local verifier to its prover."""

    def __init__(self, endpoint: str, graph: Graph, protocol: Protocol, role: int, io_timeout: float = 30.0):
        host, port = parse_endpoint(endpoint)
        try:
            self.sock = socket.create_connection((host, port), timeout=io_timeout)
        except OSError as exc:
            raise NetError(f"cannot reach prover {role} at {endpoint}: {exc}") from exc
        self.sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self.rfile = self.sock.makefile("r", encoding="ascii", newline="\n")
        self.wfile = self.sock.makefile("w", encoding="ascii", newline="\n")
        self.role = role
        self.protocol = protocol
        reply = self._exchange(Hello(protocol.value, graph_digest(graph), role))
        if isinstance(reply, Error):
            raise NetError(f"prover {role} refused session: {reply.text}")
        if not isinstance(reply, Hello):
            raise NetError(f"prover {role} answered HELLO with {encode(reply)}")

    def _send(self, msg: WireMessage) -> None:
        self.wfile.write(encode(msg) + "\n")
        self.wfile.flush()

    def _recv(self) -> WireMessage:
        try:
            line = self.rfile.readline()
        except OSError as exc:
            raise NetError(f"prover {self.role}: {exc}") from exc
        if not line:
            raise NetError(f"prover {self.role} closed the connection")
        return decode(line)

    def _exchange(self, msg: WireMessage) -> WireMessage:
        self._send(msg)
        return self._recv()

    def ask(self, q) -> tuple[object, float, float]:
        if isinstance(q, Question):
            frame = Q(q.edge[0], q.edge[1], q.r, q.s)
        else:
            frame = Q(q[0], q[1], 0, 0)
        sent = time.perf_counter()
        reply = self._exchange(frame)
        received = time.perf_counter()
        if isinstance(reply, A):
            return (reply.w1, reply.w2), sent, received
        if isinstance(reply, ARefuse):
            return None, sent, received
        if isinstance(reply, Error):
            raise NetError(f"prover {self.role} error: {reply.text}")
        raise NetError(f"prover {self.role} sent unexpected {encode(reply)}")

    def tell(self, verdict: Verdict) -> None:
        self._send(VerdictMsg(verdict.accepted, verdict.reason.value))

    def close(self) -> None:
        for f in (self.rfile, self.wfile, self.sock):
            try:
                f.close()
            except OSError:
                pass


@dataclass(frozen=True)
class RoundTiming:
    sent: tuple[float, ...]
    received: tuple[float, ...]
    deadline: float

    @property
    def latencies(self) -> tuple[float, ...]:
        return tuple(r - s for s, r in zip(self.sent, self.received))

    @property
    def violations(self) -> tuple[bool, ...]:
        return tuple(lat > self.deadline for lat in self.latencies)


def coordinate_round(
    sessions: Sequence[ProverSession],
    graph: Graph,
    protocol: Protocol,
    eps,
    seed: int,
    deadline: float,
    pool: Optional[ThreadPoolExecutor] = None,
) -> tuple[Transcript, RoundTiming]:
    """Run one round over the network; late answers reject with a timing violation."""
    eps = as_epsilon(eps)
    if len(sessions) != protocol.arity:
        raise ValueError(f"{protocol.value} needs {protocol.arity} provers, got {len(sessions)}")
    questions = sample_questions(graph, protocol, eps, random.Random(seed))
    own_pool = pool is None
    pool = pool or ThreadPoolExecutor(len(sessions))
    try:
        futures = [pool.submit(s.ask, q) for s, q in zip(sessions, questions)]
        results = [f.result() for f in futures]
    finally:
        if own_pool:
            pool.shutdown()
    answers = tuple(r[0] for r in results)
    timing = RoundTiming(tuple(r[1] for r in results), tuple(r[2] for r in results), deadline)
    if any(timing.violations):
        verdict = reject(Reason.TIMING_VIOLATION)
    else:
        verdict = check(graph, protocol, questions, answers)
    for s in sessions:
        s.tell(verdict)
    return Transcript(protocol, eps, seed, tuple(questions), answers, verdict), timing


def verify_remote(
    endpoints: Sequence[str],
    graph: Graph,
    protocol: Protocol,
    eps,
    rounds: int,
    deadline: float,
    seed: int,
    io_timeout: float = 30.0,
) -> list[tuple[Transcript, RoundTiming]]:
    sessions = [ProverSession(ep, graph, protocol, role, io_timeout) for role, ep in enumerate(endpoints, start=1)]
    out = []
    try:
        with ThreadPoolExecutor(len(sessions)) as pool:
            for k in range(rounds):
                out.append(coordinate_round(sessions, graph, protocol, eps, round_seed(seed, k), deadline, pool))
    finally:
        for s in sessions:
            s.close()
    return out


def run_local(graph: Graph, protocol: Protocol, eps, rounds: int, seed: int, prover_seed: int) -> list[Transcript]:
    """In-process counterpart of :func:`verify_remote` with the same seed derivations."""
    from .engine import run_round

    out = []
    for k in range(rounds):
        secret = round_secret(graph, prover_seed, k)
        provers = [lambda q, s=secret: honest_answer(graph, protocol, s, q)] * protocol.arity
        out.append(run_round(graph, protocol, eps, round_seed(seed, k), provers))
    return out


def log_level_from_env() -> int:
    name = os.environ.get("ZK3COL_LOG", "WARNING").upper()
    return getattr(logging, name, logging.WARNING)
