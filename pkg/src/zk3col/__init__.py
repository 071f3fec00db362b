"""Relativistic zero-knowledge proofs for graph 3-coloring: protocol simulator, game values and tools."""

from .commit import ProverSecret, commit, implicit_unveil, random_secret
from .dist import Pmf, Question, pmf_base, pmf_committed, pmf_triple
from .engine import Protocol, Reason, Transcript, Verdict, check, run_round
from .graph import Coloring, Graph, GraphError, load_graph, parse_graph

__all__ = [
    "Coloring",
    "Graph",
    "GraphError",
    "Pmf",
    "Protocol",
    "ProverSecret",
    "Question",
    "Reason",
    "Transcript",
    "Verdict",
    "check",
    "commit",
    "implicit_unveil",
    "load_graph",
    "parse_graph",
    "pmf_base",
    "pmf_committed",
    "pmf_triple",
    "random_secret",
    "run_round",
]
__version__ = "0.1.0"
