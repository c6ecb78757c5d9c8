import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wreathwalk.graychain import (
    ORIGIN,
    BinaryState,
    TruncatedChain,
    check_chain_identities,
    check_return_bounds,
    check_return_time_escape,
    effective_resistance,
    escape_probability,
    expected_return_time,
    expected_return_time_solve,
    gray_bits,
    gray_position,
    hitting_time_top,
    hitting_time_top_solve,
    hitting_times_to_origin,
    orbit_size_exact,
    return_tail,
    step_kernel,
    survival_exceeds_quarter_mean,
)
from wreathwalk.reporting import failing
from wreathwalk.sequences import DegreeSequence, ScaleTable, constant_sequence


# --- Gray code -------------------------------------------------------------


def test_gray_position_examples():
    assert gray_position(()) == 0
    assert gray_position((1,)) == 1
    assert gray_position((1, 1)) == 2
    assert gray_position((0, 1)) == 3


def test_gray_bits_examples():
    assert gray_bits(0, 4) == BinaryState(())
    assert gray_bits(2, 2) == BinaryState((1, 1))
    assert gray_bits(3, 2) == BinaryState((0, 1))
    with pytest.raises(ValueError):
        gray_bits(4, 2)


@given(st.integers(min_value=0, max_value=2 ** 16 - 1))
@settings(max_examples=200, deadline=None)
def test_gray_round_trip(p):
    assert gray_position(gray_bits(p, 16)) == p


def test_gray_adjacency_exhaustive_small():
    L = 10
    prev = gray_bits(0, L).bits
    for p in range(1, 1 << L):
        cur = gray_bits(p, L).bits
        a = sum(bit << i for i, bit in enumerate(prev))
        b = sum(bit << i for i, bit in enumerate(cur))
        assert bin(a ^ b).count("1") == 1
        prev = cur


# --- step kernel -----------------------------------------------------------


def test_step_kernel_origin(seq2):
    dist = step_kernel(seq2, ORIGIN)
    assert dist.stay == Fraction(3, 4)
    assert dist.toggle_front == Fraction(1, 4)
    assert dist.toggle_after_first_nonzero == 0


def test_step_kernel_position_one(seq2):
    dist = step_kernel(seq2, gray_bits(1, 4))
    assert dist.toggle_front == Fraction(1, 4)  # back to 0
    assert dist.toggle_after_first_nonzero == Fraction(1, 4)  # to position 2
    assert dist.stay == Fraction(1, 2)


def test_step_kernel_origin_m3():
    seq = constant_sequence(3)
    dist = step_kernel(seq, ORIGIN)
    assert dist.toggle_front == Fraction(1, 3)
    assert dist.stay == Fraction(2, 3)


def test_kernel_matches_chain_rows(seq23):
    chain = TruncatedChain(seq23, level=5)
    for p in range(1, chain.top):
        dist = step_kernel(seq23, gray_bits(p, 5))
        up, down = chain.up[p], chain.down[p]
        assert {up, down} == {dist.toggle_front, dist.toggle_after_first_nonzero}
        assert chain.stay[p] == dist.stay


# --- chain invariants ------------------------------------------------------


def test_row_sums_and_reversibility(seq2, seq4, seq23, designed_06):
    for seq in (seq2, seq4, seq23, designed_06[0]):
        chain = TruncatedChain(seq, level=6)
        assert chain.check_reversibility()
        for p in chain.states():
            assert chain.up[p] + chain.down[p] + chain.stay[p] == 1


def test_expected_return_time_examples(seq2, seq23):
    assert expected_return_time(TruncatedChain(seq2, level=1)) == 2
    assert expected_return_time(TruncatedChain(seq2, level=3)) == 8
    assert expected_return_time(TruncatedChain(seq23, level=2)) == 6


def test_expected_return_time_solve_agrees(seq2, seq23):
    for seq, level in [(seq2, 1), (seq2, 4), (seq23, 3)]:
        chain = TruncatedChain(seq, level=level)
        assert expected_return_time(chain) == expected_return_time_solve(chain)


def test_hand_check_expected_return_level1(seq2):
    # two states, pi = (1, 1): E T = 3/4 * 1 + 1/4 * (1 + 4) = 2
    chain = TruncatedChain(seq2, level=1)
    hit = hitting_times_to_origin(chain)
    assert hit[1] == 4
    assert 1 + chain.up[0] * hit[1] == 2


def test_hitting_time_formula_vs_solve(seq2, seq23, designed_06):
    for seq in (seq2, seq23, designed_06[0]):
        for l in (1, 2, 3, 4):
            assert hitting_time_top(seq, l) == hitting_time_top_solve(seq, l)


def test_hitting_time_lower_bounds(seq2, seq23):
    # m == 2, l = 2: value >= r_1 v_1 (m_2 - 1) = 4
    assert hitting_time_top(seq2, 2) >= 4
    # (2, 3) sequence, l = 2: bound = 2 * 2 * 2 = 8
    assert hitting_time_top(seq23, 2) >= 8


def test_hitting_time_level1_hand_value(seq2):
    # states 0,1,2; from 2: E = 12 by direct elimination
    assert hitting_time_top(seq2, 1) == 12


def test_effective_resistance_examples(seq2):
    chain = TruncatedChain(seq2, top=4)
    assert effective_resistance(chain, 0, 1) == 4
    assert effective_resistance(chain, 0, 2) == 8
    assert effective_resistance(chain, 0, 0) == 0


def test_resistance_sandwich(seq2, seq4, seq23, designed_06):
    for seq in (seq2, seq4, seq23, designed_06[0]):
        table = ScaleTable(seq)
        chain = TruncatedChain(seq, top=1 << 8)
        for l in range(1, 9):
            res = effective_resistance(chain, 0, 1 << l)
            r_l = table.row(l).r
            assert r_l <= res <= 2 * seq.m_star * r_l


def test_escape_probability(seq2, seq23):
    chain2 = TruncatedChain(seq2, top=8)
    assert escape_probability(chain2, 1) == Fraction(1, 8)
    assert escape_probability(chain2, 0) == 1
    chain23 = TruncatedChain(seq23, top=8)
    table = ScaleTable(seq23)
    assert escape_probability(chain23, 2) >= 1 / (2 * 3 * table.row(2).r)


# --- return tail -----------------------------------------------------------


def test_return_tail_small_values(seq2):
    tail = return_tail(seq2, 4)
    assert tail[0] == 1.0
    assert tail[1] == pytest.approx(0.25, abs=1e-15)
    assert tail[2] == pytest.approx(3 / 16, abs=1e-15)
    exact = return_tail(seq2, 8, exact=True)
    assert exact[0] == 1
    assert exact[1] == Fraction(1, 4)
    assert exact[2] == Fraction(3, 16)


def test_return_tail_exact_matches_float(seq23, designed_06):
    for seq in (seq23, designed_06[0]):
        exact = return_tail(seq, 64, exact=True)
        approx = return_tail(seq, 64)
        for t in range(65):
            assert approx[t] == pytest.approx(float(exact[t]), rel=1e-12, abs=1e-15)


def test_return_tail_monotone(seq2, seq4):
    for seq in (seq2, seq4):
        tail = return_tail(seq, 512)
        assert np.all(np.diff(tail) <= 1e-15)
        assert np.all(tail >= 0)


def test_return_tail_sums_to_expected_return_on_truncation(seq2):
    # On the truncated chain the tail sums to E T' = v_L; the unbounded chain
    # dominates the truncated one, so partial sums stay below v_L + tail mass.
    # Direct identity instead: exact orbit size equals E[T ∧ (n+1)].
    exact = return_tail(seq2, 32, exact=True)
    s = orbit_size_exact(seq2, 3, tail=exact)
    assert s == 1 + Fraction(1, 4) + Fraction(3, 16) + exact[3]


def test_orbit_size_examples(seq2):
    exact = return_tail(seq2, 8, exact=True)
    assert orbit_size_exact(seq2, 1, tail=exact) == Fraction(5, 4)
    assert orbit_size_exact(seq2, 2, tail=exact) == Fraction(23, 16)
    assert orbit_size_exact(seq2, 0, tail=exact) == 1


def test_underflow_flagged():
    # an artificial horizon cannot underflow at polynomial decay, so force the
    # check by probing the guard directly
    seq = constant_sequence(2)
    tail = return_tail(seq, 64)
    assert tail[64] > 1e-280


# --- inequality batteries ---------------------------------------------------


def test_check_return_bounds(seq2, seq4, designed_06):
    for seq in (seq2, seq4, designed_06[0]):
        checks = check_return_bounds(seq, ns=[2 ** k for k in range(1, 11)])
        assert not failing(checks)


def test_check_return_time_escape(seq2, seq23):
    for seq in (seq2, seq23):
        checks = check_return_time_escape(seq, max_level=5)
        assert not failing(checks)


def test_quarter_mean_survival(seq2):
    prob, mean = survival_exceeds_quarter_mean(seq2, 1)
    assert mean == 12
    # by hand: P(tau <= 3) = 9/64 so P(tau > 3) = 55/64
    assert prob == pytest.approx(55 / 64, abs=1e-12)
    assert prob >= 1 / 31


def test_chain_identities_battery(seq23):
    checks = check_chain_identities(
        seq23, return_levels=5, hitting_levels=4, resistance_levels=6, solve_levels=3,
        survival_levels=4,
    )
    assert not failing(checks)


def test_truncation_semantics(seq2):
    # at the top of a level truncation the escalation move folds into stay
    chain = TruncatedChain(seq2, level=3)
    top = chain.top
    assert chain.up[top] == 0
    assert chain.down[top] > 0
    # at an even top (position 2^l) the front move folds instead
    chain2 = TruncatedChain(seq2, top=4)
    assert chain2.up[4] == 0
    assert chain2.down[4] == Fraction(1, 4)  # flip prob 1/m_3 halved by the coin
