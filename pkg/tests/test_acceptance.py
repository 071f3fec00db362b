"""Acceptance gate: one test per criterion, each at its stated tolerance and runtime budget.

Every test records a ``PASS``/``FAIL`` line (printed immediately and again in the
terminal summary) before asserting.
"""

import itertools
import random
import time
from fractions import Fraction

import numpy as np

from zk3col.adversary import (
    QuestionSpace,
    StrategyTable,
    chain_holds_upto,
    classical_bound,
    coloring_table,
    exact_value_std2,
    get_game,
    local_search_value,
    quantum_bound,
    strategy_accept_prob,
)
from zk3col.commit import NONZERO, TRITS, commit, f3_neg, implicit_unveil, random_secret, unveil_general
from zk3col.dist import exactness_checks
from zk3col.engine import Protocol, Reason, exact_acceptance, honest_provers, run_round
from zk3col.graph import Coloring
from zk3col.netrunner import run_local, verify_remote
from zk3col.timing import TimingScenario, cl17_bits, exchange_bits, message_bits, min_separation
from zk3col.zk import Pattern, leakage_census, verify_zk

from .conftest import ACCEPTANCE_LINES, FIXTURE_DIR, fixture_graph
from .test_adversary import _well_defined_codes, joint_value_std2
from .test_netrunner import _spawn

THIRD = Fraction(1, 3)


def record(name, ok, detail, started, budget):
    elapsed = time.perf_counter() - started
    within = elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    line = f"{status}  criterion {name}: {detail} [{elapsed:.1f}s of {budget:g}s]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert within, line


def test_criterion_1_perfect_completeness():
    t0 = time.perf_counter()
    notes = []
    ok = True
    for name in ("k3", "c5"):
        g = fixture_graph(name)
        for proto in Protocol:
            secret = random_secret(g, random.Random(1))
            p = exact_acceptance(g, proto, THIRD, honest_provers(g, secret, proto))
            ok &= p == 1
            notes.append(f"{name}/{proto.value}={p}")
    g = fixture_graph("petersen")
    for proto in Protocol:
        provers = honest_provers(g, random_secret(g, random.Random(2)), proto)
        acc = sum(run_round(g, proto, THIRD, seed, provers).verdict.accepted for seed in range(10**4))
        ok &= acc == 10**4
        notes.append(f"petersen/{proto.value}={acc}/10000")
    record("1", ok, ", ".join(notes), t0, 10)


def test_criterion_2_commitment_algebra():
    t0 = time.perf_counter()
    round_trip = [
        implicit_unveil(commit(b, r, c), r, commit(b, f3_neg(r), c), f3_neg(r)) == c
        for b, c, r in itertools.product(TRITS, TRITS, NONZERO)
    ]

    def outcome(fn, *a):
        try:
            return fn(*a)
        except ValueError:
            return None

    two_form = [
        outcome(implicit_unveil, w, r, w2, r2) == outcome(unveil_general, w, r, w2, r2)
        and (outcome(implicit_unveil, w, r, w2, r2) is None) == (r == r2)
        for w, w2, r, r2 in itertools.product(TRITS, TRITS, NONZERO, NONZERO)
    ]
    hiding = [sorted(commit(b, r, c) for b in TRITS) == [0, 1, 2] for r, c in itertools.product(NONZERO, TRITS)]
    ok = len(round_trip) == 18 and all(round_trip) and len(two_form) == 36 and all(two_form) and all(hiding)
    record("2", ok, f"round-trip {sum(round_trip)}/18, two-form {sum(two_form)}/36, hiding {sum(hiding)}/6", t0, 1)


def test_criterion_3_distribution_exactness():
    t0 = time.perf_counter()
    failures = []
    for name in ("k3", "k4", "c5", "petersen"):
        for eps in (Fraction(1, 3), Fraction(1, 2), Fraction(1, 10)):
            failures += [f"{name}@{eps}:{n}" for n, ok in exactness_checks(fixture_graph(name), eps) if not ok]
    record("3", not failures, "all sums, bounds and marginals exact" if not failures else "; ".join(failures), t0, 10)


def test_criterion_4a_all_zero_coloring():
    t0 = time.perf_counter()
    g = fixture_graph("k4")
    t = coloring_table(QuestionSpace(g, Protocol.LOC2), Coloring((0, 0, 0, 0)))
    p = strategy_accept_prob(g, THIRD, Protocol.LOC2, [t, t])
    record("4a", p == Fraction(2, 3), f"all-zero coloring on K4 accepts with {p} (target 2/3)", t0, 600)


def test_criterion_4b_random_and_local_optima():
    t0 = time.perf_counter()
    g = fixture_graph("k4")
    game = get_game(g, Protocol.LOC2, THIRD)
    bound = classical_bound(g.m)
    rng = np.random.default_rng(20240601)
    worst = 0
    for _ in range(10):
        w1 = rng.integers(0, 9, (10**4, len(game.space)))
        w2 = rng.integers(0, 9, (10**4, len(game.space)))
        worst = max(worst, int(game.batch_numerators(w1, w2).max()))
    random_max = Fraction(worst, game.denominator)
    search = local_search_value(g, THIRD, Protocol.LOC2, restarts=1000, seed=1)
    ok = random_max <= bound and search.value <= bound
    record("4b", ok, f"max over 1e5 random pairs {random_max}, over 1e3 local optima {search.value}, bound {bound}", t0, 600)


def test_criterion_4c_handcrafted_tables():
    t0 = time.perf_counter()
    g = fixture_graph("k4")
    eps, m = THIRD, g.m
    game = get_game(g, Protocol.LOC2, eps)
    den = game.denominator
    wd = _well_defined_codes(game, np.array(list(itertools.product(range(3), repeat=8))).reshape(-1, 4, 2))
    wd_max = int(game.batch_numerators(wd, wd).max())
    wd_ok = Fraction(wd_max, den) <= 1 - eps / (4 * m)
    # every single-entry corruption of every well-defined table, played against the clean table and against itself
    nd_max = 0
    count = 0
    for k in range(len(game.space)):
        for delta in (3, 6, 1, 2):  # shift the low or high trit by 1 or 2
            bad = wd.copy()
            lo, hi = bad[:, k] // 3, bad[:, k] % 3
            if delta in (3, 6):
                lo = (lo + delta // 3) % 3
            else:
                hi = (hi + delta) % 3
            bad[:, k] = 3 * lo + hi
            nd_max = max(nd_max, int(game.batch_numerators(bad, wd).max()), int(game.batch_numerators(bad, bad).max()))
            count += 2 * len(wd)
    nd_ok = Fraction(nd_max, den) <= 1 - (1 - eps) / (8 * m)
    record(
        "4c",
        wd_ok and nd_ok,
        f"{len(wd)} well-defined tables max {Fraction(wd_max, den)} <= {1 - eps / (4 * m)}; "
        f"{count} corrupted pairs max {Fraction(nd_max, den)} <= {1 - (1 - eps) / (8 * m)}",
        t0,
        600,
    )


def test_criterion_5_exact_std2_value():
    t0 = time.perf_counter()
    g = fixture_graph("k4")
    a, b = exact_value_std2(g, THIRD), exact_value_std2(g, THIRD)
    same = a.value == b.value and a.witnesses == b.witnesses
    controls = {}
    for name in ("edge", "k3"):
        c = fixture_graph(name)
        controls[name] = (exact_value_std2(c, THIRD).value, joint_value_std2(c, THIRD))
    ok = a.value < 1 and same and all(x == y == 1 for x, y in controls.values())
    detail = f"K4 value {a.value} (repeat identical: {same}); controls " + ", ".join(
        f"{k} enum={x} joint={y}" for k, (x, y) in controls.items()
    )
    record("5", ok, detail, t0, 1800)


def test_criterion_6_perfect_zero_knowledge():
    t0 = time.perf_counter()
    k3 = verify_zk(fixture_graph("k3"))
    p4 = verify_zk(fixture_graph("path4"))
    ok = k3.ok and p4.ok
    detail = f"K3 {k3.checked} triples, {len(k3.mismatches)} differ; path4 {p4.checked} triples, {len(p4.mismatches)} differ"
    record("6", ok, detail, t0, 600)


def test_criterion_7_leakage_taxonomy():
    t0 = time.perf_counter()
    census = leakage_census(fixture_graph("k4"))
    ok = census[Pattern.OTHER] == 0 and set(census) <= {Pattern.EMPTY, Pattern.SINGLE, Pattern.EDGE, Pattern.TRIANGLE}
    detail = ", ".join(f"{p.value}={census[p]}" for p in Pattern)
    record("7", ok, detail, t0, 300)


def test_criterion_8_bound_formulas():
    t0 = time.perf_counter()
    ok = classical_bound(6) == Fraction(71, 72) and quantum_bound(6) == 1 - Fraction(1, 150**4)
    chain = chain_holds_upto(10**6)
    record("8", ok and chain, f"classical(6)={classical_bound(6)}, quantum chain for m<=1e6: {chain}", t0, 5)


def test_criterion_9_timing():
    t0 = time.perf_counter()
    reply_ok = all(message_bits(p, n)[1] == 4 for p in Protocol for n in list(range(2, 5000)) + [10**6, 10**12])
    base = min_separation(TimingScenario(cl17_bits(500), 10**12))
    ours = min_separation(TimingScenario(exchange_bits(Protocol.QNL3, 500), 10**12))
    ratio = base / ours
    ok = reply_ok and 10_000 <= base <= 100_000 and ours < 1 and ratio > 10**6
    record("9", ok, f"reply 4 bits for all n: {reply_ok}; baseline {float(base):.0f} m, ours {float(ours) * 1000:.2f} mm, ratio {float(ratio):.3g}", t0, 1)


def test_criterion_10_network_equivalence():
    t0 = time.perf_counter()
    g = fixture_graph("k3")
    procs = []
    try:
        eps = []
        for _ in range(3):
            p, ep = _spawn(FIXTURE_DIR / "k3.g", 21)
            procs.append(p)
            eps.append(ep)
        remote = verify_remote(eps, g, Protocol.QNL3, THIRD, 100, 5.0, seed=314)
        local = run_local(g, Protocol.QNL3, THIRD, 100, 314, 21)
        same = [r.to_line() for r, _ in remote] == [t.to_line() for t in local]
        slow, ep = _spawn(FIXTURE_DIR / "k3.g", 21, "--delay-ms", "200")
        procs.append(slow)
        late = verify_remote(eps[:2] + [ep], g, Protocol.QNL3, THIRD, 5, 0.05, seed=7)
        flagged = all(t.verdict.reason is Reason.TIMING_VIOLATION and tm.violations == (False, False, True) for t, tm in late)
    finally:
        for p in procs:
            p.terminate()
            p.wait(timeout=10)
    record("10", same and flagged, f"100 rounds identical to in-process: {same}; injected delay flagged in 5/5 rounds: {flagged}", t0, 60)
