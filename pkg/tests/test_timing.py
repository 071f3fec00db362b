from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zk3col.engine import Protocol
from zk3col.timing import (
    SPEED_OF_LIGHT,
    TimingScenario,
    cl17_bits,
    exchange_bits,
    format_meters,
    message_bits,
    min_separation,
    timing_table,
)


def test_message_bits_examples():
    assert message_bits(Protocol.LOC2, 500) == (22, 4)
    assert message_bits(Protocol.QNL3, 4) == (8, 4)
    assert message_bits(Protocol.STD2, 4) == (4, 4)
    assert exchange_bits(Protocol.QNL3, 500) == 26
    with pytest.raises(ValueError):
        message_bits(Protocol.LOC2, 1)


@given(st.integers(2, 10**9))
def test_reply_is_two_trits(n):
    for proto in Protocol:
        assert message_bits(proto, n)[1] == 4
    # 2 * ceil(log2 n) + 4, checked against exact powers of two
    k = 0
    while 2**k < n:
        k += 1
    assert message_bits(Protocol.LOC2, n)[0] == 2 * k + 4


def test_cl17_bits():
    assert cl17_bits(500) == 5 * 10**7
    assert cl17_bits(1) == 200


def test_min_separation_examples():
    assert min_separation(TimingScenario(0, 10**9)) == 0
    assert min_separation(TimingScenario(5 * 10**7, 10**12)) == 14990
    ours = min_separation(TimingScenario(26, 10**12))
    assert ours == Fraction(77948, 10**7)
    assert format_meters(ours) == "7.795 mm"
    with pytest.raises(ValueError):
        TimingScenario(1, 0)


@given(st.integers(0, 10**12), st.integers(1, 10**15), st.integers(1, 50))
def test_separation_linear(bits, rate, k):
    base = min_separation(TimingScenario(bits, rate))
    assert min_separation(TimingScenario(k * bits, rate)) == k * base
    assert min_separation(TimingScenario(bits, k * rate)) == base / k
    assert base == SPEED_OF_LIGHT * bits / rate


@given(st.integers(4, 10**6))
def test_ours_beats_baseline(n):
    row = timing_table([n])[0]
    for rate in row.ours_m:
        assert row.ours_m[rate] < row.cl17_m[rate]


def test_ratio_grows():
    ratios = [Fraction(r.cl17_bits, r.protocol_bits) for r in timing_table([4, 16, 256, 4096, 65536])]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
