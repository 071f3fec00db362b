"""Message sizes and the verifier separation they force.

A prover must finish receiving its pre-challenge traffic before a light-speed
signal could travel between verifier sites, so the minimum separation is the
distance light covers while those bits cross the link.  Only the transmission
time counts; propagation of the reply itself is left out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import Protocol

SPEED_OF_LIGHT = Fraction(2998, 10) * 10**6  # m/s, 2.998e8
BITS_PER_TRIT = 2
RATES = {"1Gb/s": 10**9, "1Tb/s": 10**12}
BASELINE_ENVELOPE_M = 100_000


def vertex_bits(n: int) -> int:
    """Bits needed for a vertex label in ``1..n`` (exact ``ceil(log2 n)``)."""
    return (n - 1).bit_length()


def message_bits(protocol: Protocol, n: int) -> tuple[int, int]:
    """Bits (to the prover, from the prover) in one round for one prover."""
    if n < 2:
        raise ValueError("need at least two vertices")
    to_prover = 2 * vertex_bits(n)
    if protocol.committed:
        to_prover += 2 * BITS_PER_TRIT
    return to_prover, 2 * BITS_PER_TRIT


def exchange_bits(protocol: Protocol, n: int) -> int:
    to_p, from_p = message_bits(protocol, n)
    return to_p + from_p


def cl17_bits(n: int) -> int:
    """Pre-challenge traffic of the Hamiltonian-cycle baseline, ``200 n^2`` bits."""
    if n < 1:
        raise ValueError("need at least one vertex")
    return 200 * n * n


@dataclass(frozen=True)
class TimingScenario:
    bits_per_exchange: int
    link_rate: int  # bits per second
    signal_speed: Fraction = SPEED_OF_LIGHT

    def __post_init__(self) -> None:
        if self.bits_per_exchange < 0:
            raise ValueError("bit count must be non-negative")
        if self.link_rate <= 0 or self.signal_speed <= 0:
            raise ValueError("link rate and signal speed must be positive")


def min_separation(scenario: TimingScenario) -> Fraction:
    """Meters light travels while ``bits_per_exchange`` bits cross the link."""
    return scenario.signal_speed * scenario.bits_per_exchange / Fraction(scenario.link_rate)


@dataclass(frozen=True)
class TimingRow:
    n: int
    protocol_bits: int
    cl17_bits: int
    ours_m: dict
    cl17_m: dict


def timing_table(ns, protocol: Protocol = Protocol.QNL3, rates: dict = RATES) -> list[TimingRow]:
    rows = []
    for n in ns:
        ours, base = exchange_bits(protocol, n), cl17_bits(n)
        rows.append(
            TimingRow(
                n,
                ours,
                base,
                {k: min_separation(TimingScenario(ours, r)) for k, r in rates.items()},
                {k: min_separation(TimingScenario(base, r)) for k, r in rates.items()},
            )
        )
    return rows


def format_meters(x: Fraction) -> str:
    v = float(x)
    if v >= 1000:
        return f"{v / 1000:.3f} km"
    if v >= 1:
        return f"{v:.3f} m"
    return f"{v * 1000:.3f} mm"
