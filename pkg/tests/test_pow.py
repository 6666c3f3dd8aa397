"""Difficulty decoding, hash checking, mining search, and subsidy schedule."""

from __future__ import annotations

import hashlib

import pytest

from relaysim.pow import (
    ATOMIC_UNITS_PER_COIN,
    DEFAULT_SCHEDULE,
    MAX_TARGET,
    SubsidySchedule,
    TargetOverflowError,
    block_subsidy,
    check_pow,
    decode_compact,
    mine,
    total_supply,
)

# 238348 * 2**176, expanded once by hand and pinned
TARGET_1903A30C = 22829202948393929850749706076701368331072452018388575715328


def test_decode_mainnet_style_bits():
    target = decode_compact(0x1903A30C)
    assert target == TARGET_1903A30C
    assert target == 0x03A30C << (8 * (0x19 - 3))
    # two significant figures: roughly 2.2e58
    assert target // 10**57 == 22


def test_decode_small_exponent_no_shift():
    assert decode_compact(0x03000042) == 0x42 == 66


def test_decode_exponent_below_three_shifts_right():
    assert decode_compact(0x02003456) == 0x34
    assert decode_compact(0x01003456) == 0x00
    assert decode_compact(0x00003456) == 0x00


def test_decode_rejects_overflow():
    with pytest.raises(TargetOverflowError):
        decode_compact(0xFF000001)
    with pytest.raises(TargetOverflowError):
        decode_compact(0x23000001)  # 1 << 256 is one past the top
    assert decode_compact(0x22000001) == 1 << 248


def test_decode_rejects_out_of_range_bits():
    with pytest.raises(ValueError):
        decode_compact(-1)
    with pytest.raises(ValueError):
        decode_compact(1 << 32)


def test_decode_zero_coefficient():
    assert decode_compact(0x1D000000) == 0


def test_check_pow_strict_less_than():
    header = b"boundary-check"
    digest_value = int.from_bytes(hashlib.sha256(header).digest(), "big")
    assert check_pow(header, digest_value + 1)
    assert not check_pow(header, digest_value)  # equality must not pass
    assert not check_pow(header, 0)
    assert check_pow(header, MAX_TARGET)


def test_mine_finds_first_accepting_nonce():
    # regression pin: first nonce whose appended 4-byte BE encoding passes
    # at target 2**252 (leading hex digit 0)
    target = 1 << 252
    nonce = mine(b"relaysim", target, max_nonce=1 << 16)
    assert nonce == 8
    assert check_pow(b"relaysim" + nonce.to_bytes(4, "big"), target)
    for earlier in range(nonce):
        assert not check_pow(b"relaysim" + earlier.to_bytes(4, "big"), target)


def test_mine_exhausted_range_returns_none():
    assert mine(b"relaysim", 1 << 252, max_nonce=8) is None


def test_mine_rejects_bad_nonce_range():
    with pytest.raises(ValueError):
        mine(b"x", 1 << 255, max_nonce=0)
    with pytest.raises(ValueError):
        mine(b"x", 1 << 255, max_nonce=(1 << 32) + 1)


def test_mine_impossible_target():
    assert mine(b"anything", 0, max_nonce=256) is None


def test_subsidy_initial_and_halvings():
    assert block_subsidy(0) == 50 * ATOMIC_UNITS_PER_COIN
    assert block_subsidy(209_999) == 50 * ATOMIC_UNITS_PER_COIN
    assert block_subsidy(210_000) == 25 * ATOMIC_UNITS_PER_COIN
    assert block_subsidy(420_000) == 12 * ATOMIC_UNITS_PER_COIN + ATOMIC_UNITS_PER_COIN // 2
    with pytest.raises(ValueError):
        block_subsidy(-1)


def test_subsidy_reaches_zero_and_stays():
    # 50e8 has 33 bits, so 33 halvings exhaust it
    eras = DEFAULT_SCHEDULE.initial_subsidy.bit_length()
    boundary = eras * DEFAULT_SCHEDULE.halving_interval
    assert block_subsidy(boundary - 1) == 1
    assert block_subsidy(boundary) == 0
    assert block_subsidy(boundary * 10) == 0


def test_subsidy_nonincreasing():
    interval = DEFAULT_SCHEDULE.halving_interval
    values = [block_subsidy(era * interval) for era in range(40)]
    assert values == sorted(values, reverse=True)


def test_total_supply_exact_and_capped():
    supply = total_supply()
    assert supply == 2_099_999_997_690_000
    assert supply < 21_000_000 * ATOMIC_UNITS_PER_COIN
    # geometric-series cross-check: sum of every era's emission
    direct = sum(
        (DEFAULT_SCHEDULE.initial_subsidy >> era) * DEFAULT_SCHEDULE.halving_interval
        for era in range(DEFAULT_SCHEDULE.initial_subsidy.bit_length())
    )
    assert supply == direct


def test_total_supply_custom_schedule():
    tiny = SubsidySchedule(initial_subsidy=4, halving_interval=3)
    # eras emit 4,4,4 then 2,2,2 then 1,1,1
    assert total_supply(tiny) == 3 * (4 + 2 + 1)
    assert block_subsidy(5, tiny) == 2


def test_schedule_validation():
    with pytest.raises(ValueError):
        SubsidySchedule(initial_subsidy=-1)
    with pytest.raises(ValueError):
        SubsidySchedule(halving_interval=0)
