"""Command-line front end.

Exit codes: 0 success, 1 a verification or run failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .adversary import (
    GameValueReport,
    chain_holds_upto,
    classical_bound,
    exact_value_std2,
    local_search_value,
    quantum_bound,
)
from .dist import Pmf, as_epsilon, exactness_checks
from .engine import Protocol, question_pmf
from .graph import FIXTURES, Graph, GraphError, base_coloring, load_graph
from .netrunner import (
    NetError,
    WireError,
    log_level_from_env,
    parse_endpoint,
    run_local,
    serve_prover,
    verify_remote,
)
from .timing import BASELINE_ENVELOPE_M, RATES, format_meters, timing_table

log = logging.getLogger("zk3col")

SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


class UsageError(Exception):
    pass


# -- flag types ------------------------------------------------------------

def epsilon_type(text: str) -> Fraction:
    try:
        return as_epsilon(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def endpoint_type(text: str) -> str:
    try:
        parse_endpoint(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return text


def graph_arg(text: str) -> Graph:
    """A graph file, or one of the built-in fixture names."""
    path = Path(text)
    if path.exists():
        try:
            return load_graph(path)
        except GraphError as exc:
            raise argparse.ArgumentTypeError(f"{text}: {exc}") from exc
    if text in FIXTURES:
        return FIXTURES[text]()
    raise argparse.ArgumentTypeError(f"no such graph file or fixture: {text!r}")


def frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# -- subcommands -----------------------------------------------------------

def cmd_run(args) -> int:
    g, proto = args.graph, args.protocol
    if base_coloring(g) is None:
        print("error: graph has no proper 3-coloring, honest provers cannot run", file=sys.stderr)
        return 1
    prover_seed = args.seed if args.prover_seed is None else args.prover_seed
    transcripts = run_local(g, proto, args.epsilon, args.rounds, args.seed, prover_seed)
    accepted = sum(t.verdict.accepted for t in transcripts)
    if args.format == "tsv":
        for t in transcripts:
            print(t.to_line())
    print(f"accepted {accepted}/{len(transcripts)}")
    return 0 if accepted == len(transcripts) else 1


def cmd_value(args) -> int:
    g, proto = args.graph, args.protocol
    method = args.method or ("exact" if proto is Protocol.STD2 else "local")
    if method == "exact":
        if proto is not Protocol.STD2:
            raise UsageError("--method exact is only available for --protocol std2")
        report: GameValueReport = exact_value_std2(g, args.epsilon, jobs=args.jobs)
    else:
        report = local_search_value(
            g, args.epsilon, proto, restarts=args.restarts, seed=args.seed, jobs=args.jobs, keep_traces=bool(args.plot)
        )
    bound = classical_bound(g.m)
    if args.format == "tsv":
        sys.stdout.write(report.to_text())
    else:
        print(report.headline())
    print(f"classical bound 1 - 1/(12*{g.m}) = {frac(bound)}; value {'<=' if report.value <= bound else '>'} bound")
    if args.plot and report.trace:
        from .plots import plot_search_trace

        print(f"figure {plot_search_trace(report.trace, args.plot, bound)}")
    return 0


def cmd_zk_verify(args) -> int:
    from .zk import leakage_census, verify_zk

    g = args.graph
    if base_coloring(g) is None:
        print("error: graph has no proper 3-coloring", file=sys.stderr)
        return 1
    res = verify_zk(g, jobs=args.jobs)
    if args.census or args.plot:
        census = leakage_census(g)
        for pattern, count in sorted(census.items(), key=lambda kv: kv[0].value):
            print(f"census\t{pattern.value}\t{count}")
        if args.plot:
            from .plots import plot_leakage

            print(f"figure {plot_leakage(census, args.plot)}")
    if res.ok:
        print(f"PERFECT-ZK: all question triples equal ({res.checked} triples)")
        return 0
    print(f"ZK-MISMATCH: {len(res.mismatches)} of {res.checked} triples differ")
    for t in res.mismatches[:10]:
        print("  " + " | ".join(q.token() for q in t))
    return 1


def cmd_dist_check(args) -> int:
    g, eps = args.graph, args.epsilon
    results = exactness_checks(g, eps)
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'}\t{name}")
    if args.dump:
        pmf: Pmf = question_pmf(g, args.dump, eps)
        if args.dump_file:
            Path(args.dump_file).write_text(pmf.dump())
        else:
            sys.stdout.write(pmf.dump())
    return 0 if all(ok for _, ok in results) else 1


def cmd_bounds(args) -> int:
    m = args.edges
    c = classical_bound(m)
    q = quantum_bound(m)
    d = 25 * m
    print(f"classical ≤ {frac(c)}, quantum ≤ 1 − 1/{d}{'4'.translate(SUPERSCRIPT)}")
    if args.format == "tsv":
        print(f"classical\t{frac(c)}\nquantum\t{frac(q)}")
    if args.check_upto:
        ok = chain_holds_upto(args.check_upto)
        print(f"chain 12m+576m² ≤ 588m² and 588² ≤ 25⁴ for m ≤ {args.check_upto}: {'holds' if ok else 'FAILS'}")
        return 0 if ok else 1
    return 0


def cmd_timing(args) -> int:
    rows = timing_table(args.n, args.protocol, RATES)
    rates = list(RATES)
    header = ["n", "protocol_bits", "cl17_bits"] + [f"ours@{r}" for r in rates] + [f"cl17@{r}" for r in rates]
    sep = "\t" if args.format == "tsv" else "  "
    print(sep.join(header))
    for r in rows:
        cells = [str(r.n), str(r.protocol_bits), str(r.cl17_bits)]
        if args.format == "tsv":
            cells += [frac(r.ours_m[k]) for k in rates] + [frac(r.cl17_m[k]) for k in rates]
        else:
            cells += [format_meters(r.ours_m[k]) for k in rates] + [format_meters(r.cl17_m[k]) for k in rates]
        print(sep.join(cells))
    print("# separation = c * (bits to prover + bits from prover) / link rate; reply propagation excluded")
    print(f"# quoted envelope for the 200 n^2 baseline at n=500: at least {BASELINE_ENVELOPE_M // 1000} km (shown, not reconciled)")
    if args.plot:
        from .plots import plot_separation

        print(f"figure {plot_separation(rows, args.plot, BASELINE_ENVELOPE_M)}")
    return 0


def cmd_serve_prover(args) -> int:
    g = args.graph
    if base_coloring(g) is None:
        print("error: graph has no proper 3-coloring", file=sys.stderr)
        return 1
    serve_prover(
        args.listen,
        g,
        args.seed,
        protocol=args.protocol,
        delay=args.delay_ms / 1000,
        session_log=args.session_log,
    )
    return 0


def cmd_verify_remote(args) -> int:
    endpoints = args.provers.split(",")
    for ep in endpoints:
        try:
            parse_endpoint(ep)
        except ValueError as exc:
            raise UsageError(f"--provers: {exc}") from exc
    if len(endpoints) != args.protocol.arity:
        raise UsageError(f"--provers: {args.protocol.value} needs {args.protocol.arity} endpoints, got {len(endpoints)}")
    try:
        results = verify_remote(endpoints, args.graph, args.protocol, args.epsilon, args.rounds, args.deadline_ms / 1000, args.seed)
    except (NetError, WireError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    accepted = sum(t.verdict.accepted for t, _ in results)
    late = sum(any(tm.violations) for _, tm in results)
    worst = max((max(tm.latencies) for _, tm in results), default=0.0)
    if args.format == "tsv":
        for t, tm in results:
            print(t.to_line() + "\t" + ",".join(f"{lat * 1000:.3f}" for lat in tm.latencies))
    print(f"accepted {accepted}/{len(results)}")
    print(f"timing violations {late}/{len(results)}; worst latency {worst * 1000:.3f} ms (deadline {args.deadline_ms:g} ms)")
    return 0 if accepted == len(results) else 1


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zk3col", description="Relativistic zero-knowledge proofs for 3-coloring: simulator and tools.")
    sub = p.add_subparsers(dest="command", required=True)

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "tsv"), default="text")
    proto = argparse.ArgumentParser(add_help=False)
    proto.add_argument("--protocol", type=Protocol, choices=list(Protocol), default=Protocol.QNL3, metavar="{std2,loc2,qnl3}")
    eps = argparse.ArgumentParser(add_help=False)
    eps.add_argument("--epsilon", type=epsilon_type, default=Fraction(1, 3), metavar="P/Q")
    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--graph", type=graph_arg, required=True, metavar="FILE")

    s = sub.add_parser("run", parents=[fmt, proto, eps, graph], help="honest rounds in process")
    s.add_argument("--rounds", type=positive_int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--prover-seed", type=int, default=None, help="seed of the provers' shared secrets (default: --seed)")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("value", parents=[fmt, proto, eps, graph], help="classical game value")
    s.add_argument("--method", choices=("exact", "local"), default=None)
    s.add_argument("--restarts", type=positive_int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=positive_int, default=1)
    s.add_argument("--plot", metavar="PNG", default=None)
    s.set_defaults(func=cmd_value)

    s = sub.add_parser("zk-verify", parents=[fmt, graph], help="compare real and simulated views on every triple")
    s.add_argument("--jobs", type=positive_int, default=1)
    s.add_argument("--census", action="store_true", help="also print the leakage pattern census")
    s.add_argument("--plot", metavar="PNG", default=None)
    s.set_defaults(func=cmd_zk_verify)

    s = sub.add_parser("dist-check", parents=[fmt, eps, graph], help="exact pmf identities")
    s.add_argument("--dump", type=Protocol, choices=list(Protocol), default=None, metavar="{std2,loc2,qnl3}")
    s.add_argument("--dump-file", default=None)
    s.set_defaults(func=cmd_dist_check)

    s = sub.add_parser("bounds", parents=[fmt], help="soundness bound formulas")
    s.add_argument("--edges", type=positive_int, required=True)
    s.add_argument("--check-upto", type=positive_int, default=None)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("timing", parents=[fmt, proto], help="separation table")
    s.add_argument("--n", type=lambda t: [positive_int(x) for x in t.split(",")], default=[4, 10, 100, 500, 1000, 10000])
    s.add_argument("--plot", metavar="PNG", default=None)
    s.set_defaults(func=cmd_timing)

    s = sub.add_parser("serve-prover", parents=[graph], help="run one honest prover over TCP")
    s.add_argument("--listen", type=endpoint_type, default="127.0.0.1:0")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--protocol", type=Protocol, choices=list(Protocol), default=None, metavar="{std2,loc2,qnl3}")
    s.add_argument("--delay-ms", type=float, default=0.0, help="sleep before each answer")
    s.add_argument("--session-log", default=None)
    s.set_defaults(func=cmd_serve_prover)

    s = sub.add_parser("verify-remote", parents=[fmt, proto, eps, graph], help="split verifier against prover servers")
    s.add_argument("--provers", required=True, metavar="HOST:PORT,HOST:PORT[,HOST:PORT]")
    s.add_argument("--rounds", type=positive_int, default=100)
    s.add_argument("--deadline-ms", type=float, default=1000.0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_verify_remote)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=log_level_from_env(), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"zk3col: error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
