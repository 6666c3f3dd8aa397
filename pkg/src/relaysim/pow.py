"""Proof-of-work primitives: compact difficulty-target decoding, SHA-256
header checks, nonce search, and the halving subsidy schedule.

Deliberate divergences from Bitcoin mainnet, chosen for simplicity:
single SHA-256 instead of double, big-endian digest interpretation, and a
strict less-than accept condition (ties have negligible probability).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

MAX_TARGET = 1 << 256

ATOMIC_UNITS_PER_COIN = 100_000_000
MAX_SUPPLY_COINS = 21_000_000

NONCE_BYTES = 4
MAX_NONCE_SPACE = 1 << (8 * NONCE_BYTES)


class TargetOverflowError(OverflowError):
    """Compact bits decode to a target that does not fit in 256 bits."""


def decode_compact(bits: int) -> int:
    """Expand 4-byte compact difficulty bits into the 256-bit integer target.

    The high byte is the exponent, the low three bytes the coefficient:
    target = coefficient * 2^(8 (exponent - 3)). Exponents below 3 shift
    right instead.
    """
    if not 0 <= bits <= 0xFFFFFFFF:
        raise ValueError(f"compact bits must be a 32-bit value, got {bits!r}")
    exponent = bits >> 24
    coefficient = bits & 0x00FFFFFF
    if exponent <= 3:
        target = coefficient >> (8 * (3 - exponent))
    else:
        target = coefficient << (8 * (exponent - 3))
    if target >= MAX_TARGET:
        raise TargetOverflowError(f"compact bits 0x{bits:08x} decode beyond 256 bits")
    return target


def check_pow(header: bytes, target: int) -> bool:
    """True iff SHA-256(header), read as a big-endian integer, is below target."""
    digest = hashlib.sha256(header).digest()
    return int.from_bytes(digest, "big") < target


def mine(header_template: bytes, target: int, max_nonce: int) -> int | None:
    """Search nonces 0..max_nonce-1 for the smallest one whose header passes
    check_pow; the nonce is appended to the template as 4 big-endian bytes.
    Returns None when the range is exhausted.
    """
    if max_nonce < 1:
        raise ValueError(f"max_nonce must be >= 1, got {max_nonce!r}")
    if max_nonce > MAX_NONCE_SPACE:
        raise ValueError(f"max_nonce exceeds the {NONCE_BYTES}-byte nonce space")
    for nonce in range(max_nonce):
        if check_pow(header_template + nonce.to_bytes(NONCE_BYTES, "big"), target):
            return nonce
    return None


@dataclass(frozen=True)
class SubsidySchedule:
    """Geometric halving schedule. The defaults (50 coins, halving every
    210,000 blocks) are the unique round pair that keeps total emission under
    the 21-million-coin cap."""

    initial_subsidy: int = 50 * ATOMIC_UNITS_PER_COIN
    halving_interval: int = 210_000
    atomic_units_per_coin: int = ATOMIC_UNITS_PER_COIN

    def __post_init__(self) -> None:
        if self.initial_subsidy < 0:
            raise ValueError("initial subsidy must be nonnegative")
        if self.halving_interval < 1:
            raise ValueError("halving interval must be at least one block")


DEFAULT_SCHEDULE = SubsidySchedule()


def block_subsidy(height: int, schedule: SubsidySchedule = DEFAULT_SCHEDULE) -> int:
    """Subsidy at a block height, in atomic units: the initial subsidy floored
    through one halving per elapsed interval, reaching zero once the shifts
    exhaust it."""
    if height < 0:
        raise ValueError(f"height must be nonnegative, got {height!r}")
    eras = height // schedule.halving_interval
    if eras >= schedule.initial_subsidy.bit_length():
        return 0
    return schedule.initial_subsidy >> eras


def total_supply(schedule: SubsidySchedule = DEFAULT_SCHEDULE) -> int:
    """Exact total emission over all heights, in atomic units."""
    total = 0
    era = 0
    while True:
        subsidy = schedule.initial_subsidy >> era
        if subsidy == 0:
            return total
        total += subsidy * schedule.halving_interval
        era += 1
