import itertools
import random

import pytest

from zk3col.commit import (
    NONZERO,
    TRITS,
    ProverSecret,
    commit,
    f3_add,
    f3_inv,
    f3_mul,
    f3_neg,
    implicit_unveil,
    random_secret,
    unveil_general,
)
from zk3col.graph import Coloring, GraphError, complete_graph


def test_field_examples():
    assert f3_add(2, 2) == 1
    assert f3_inv(2) == 2
    assert f3_neg(1) == 2
    assert f3_mul(2, 2) == 1
    with pytest.raises(ZeroDivisionError):
        f3_inv(0)


def test_field_axioms():
    for a, b in itertools.product(TRITS, repeat=2):
        assert f3_add(a, f3_neg(a)) == 0
        assert f3_add(a, b) == f3_add(b, a)
    for a in NONZERO:
        assert f3_mul(a, f3_inv(a)) == 1
        assert f3_neg(a) == ({1, 2} - {a}).pop()


def test_commit_examples():
    assert commit(1, 1, 2) == 0
    assert all(commit(0, 2, c) == c for c in TRITS)
    assert commit(2, 2, 1) == 2


def test_unveil_examples():
    assert implicit_unveil(0, 1, 1, 2) == 2
    assert (commit(1, 1, 2), commit(1, 2, 2)) == (0, 1)
    # only b=0, c=1 gives w=1 under both r=2 and r=1
    consistent = [c for b, c in itertools.product(TRITS, repeat=2) if commit(b, 2, c) == 1 and commit(b, 1, c) == 1]
    assert consistent == [1]
    assert implicit_unveil(1, 2, 1, 1) == 1


def test_round_trip_exhaustive():
    cases = 0
    for b, c, r in itertools.product(TRITS, TRITS, NONZERO):
        assert implicit_unveil(commit(b, r, c), r, commit(b, f3_neg(r), c), f3_neg(r)) == c
        cases += 1
    assert cases == 18


def _outcome(fn, *args):
    try:
        return fn(*args)
    except ValueError:
        return "rejected"


def test_two_formulas_agree():
    # full grid: 18 unveiling pairs agree, 18 equal-randomness pairs are rejected by both
    grid = list(itertools.product(TRITS, TRITS, NONZERO, NONZERO))
    assert len(grid) == 36
    for w, w2, r, r2 in grid:
        got = _outcome(implicit_unveil, w, r, w2, r2)
        assert got == _outcome(unveil_general, w, r, w2, r2)
        assert (got == "rejected") == (r == r2)


def test_forever_hiding():
    for r, c in itertools.product(NONZERO, TRITS):
        assert sorted(commit(b, r, c) for b in TRITS) == [0, 1, 2]


def test_consistency_is_deterministic():
    for b, c, r in itertools.product(TRITS, TRITS, NONZERO):
        assert commit(b, r, c) == commit(b, r, c)


def test_unveil_rejects_bad_pairs():
    with pytest.raises(ValueError):
        implicit_unveil(0, 1, 1, 1)
    with pytest.raises(ValueError):
        implicit_unveil(0, 0, 1, 2)
    with pytest.raises(ValueError):
        unveil_general(0, 2, 1, 2)


def test_prover_secret():
    s = ProverSecret(Coloring((0, 1, 2)), (1, 0, 2))
    assert s.color(3) == 2 and s.mask(1) == 1
    assert s.commitment(1, 1) == commit(1, 1, 0)


def test_random_secret():
    g = complete_graph(3)
    s = random_secret(g, random.Random(4))
    assert s.coloring.is_proper(g) and len(s.masks) == 3
    assert random_secret(g, random.Random(4)) == s
    with pytest.raises(GraphError):
        random_secret(complete_graph(4), random.Random(0))
