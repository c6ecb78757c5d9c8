import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wreathwalk.designer import (
    TargetFunction,
    c_gamma,
    choose_m_star,
    design_sequence,
    entropy_to_speed_target,
    named_target,
    power_log_target,
    power_target,
    validate_log_lipschitz,
    verify_tracking,
)


def scan_m_star(gamma):
    """Brute-force oracle for the smallest admissible ceiling degree."""
    m = 2
    while True:
        if (m * m / (m - 1)) ** gamma <= m * (1 + 1e-12):
            return m
        m += 1


def test_choose_m_star_examples():
    assert choose_m_star(0.5) == 2
    assert choose_m_star(0.75) == 4
    m = choose_m_star(0.9)
    assert 2 <= m <= 3 * math.exp(10)
    assert m == scan_m_star(0.9)


@given(gamma=st.floats(min_value=0.5, max_value=0.97))
@settings(max_examples=40, deadline=None)
def test_choose_m_star_matches_scan_and_bound(gamma):
    m = choose_m_star(gamma)
    assert m == scan_m_star(gamma)
    assert m <= math.ceil(math.e * math.exp(1 / (1 - gamma)))
    assert m <= c_gamma(gamma)


def test_choose_m_star_rejects_out_of_range():
    with pytest.raises(ValueError):
        choose_m_star(0.4)
    with pytest.raises(ValueError):
        choose_m_star(1.0)


def test_log_lipschitz_pass_and_fail():
    ok = validate_log_lipschitz(power_target(0.6, gamma=0.6))
    assert ok.passed and ok.checked >= 100

    bad = validate_log_lipschitz(power_target(0.4, gamma=0.6))
    assert not bad.passed
    assert any(side == "lower" for _, _, side, _ in bad.violations)

    sqrt = validate_log_lipschitz(power_target(0.5, gamma=0.5))
    assert sqrt.passed


def test_log_lipschitz_rejects_bad_target():
    broken = TargetFunction(name="zero", gamma=0.6, fn=lambda n: 0.0)
    with pytest.raises(ValueError):
        validate_log_lipschitz(broken)


def test_pow_log_validity_depends_on_band():
    # slope at n=1 is beta + k; valid iff it stays within [1/2, gamma]
    good = power_log_target(0.55, 0.1, gamma=0.7)
    assert validate_log_lipschitz(good).passed
    bad = power_log_target(0.55, 1.0, gamma=0.7)
    assert not validate_log_lipschitz(bad).passed


def test_named_target_parse():
    t = named_target("pow:0.6", gamma=0.65)
    assert t(4.0) == pytest.approx(4 ** 0.6)
    t2 = named_target("pow-log:0.55,0.1", gamma=0.7)
    assert t2(1.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        named_target("exp:2", gamma=0.6)


def test_design_sqrt_gives_all_twos():
    seq, cert = design_sequence(power_target(0.5, gamma=0.5), levels=20)
    assert set(seq.head) == {2}
    assert cert.m_star == 2
    for step in cert.steps:
        assert step.ratio == pytest.approx(1.0, abs=1e-9)
    assert cert.check_invariants() == []


def test_design_power_06(designed_06):
    seq, cert = designed_06
    assert cert.m_star == 3
    assert set(seq.head) == {2, 3}
    lo, hi = cert.ratio_bracket()
    assert lo == pytest.approx(1 / math.sqrt(2))
    assert hi == pytest.approx(2 ** 0.3)
    assert cert.check_invariants() == []


def test_design_power_075_uses_2_and_4():
    seq, cert = design_sequence(power_target(0.75, gamma=0.75), levels=25)
    assert cert.m_star == 4
    assert set(seq.head) <= {2, 4}
    assert 4 in set(seq.head)
    assert cert.check_invariants() == []


def test_design_deterministic():
    f = power_target(0.6, gamma=0.65)
    a = design_sequence(f, levels=30)
    b = design_sequence(f, levels=30)
    assert a[0] == b[0]
    assert [s.chosen_m for s in a[1].steps] == [s.chosen_m for s in b[1].steps]


def test_tracking_sqrt_ratios():
    f = power_target(0.5, gamma=0.5)
    seq, _ = design_sequence(f, levels=20)
    grid = [float(n) for n in range(1, 200)] + [10.0 ** k for k in range(1, 7)]
    report = verify_tracking(seq, f, n_grid=grid)
    assert report.passed
    levels = [e for e in report.entries if e["kind"] == "level"]
    assert levels and all(abs(e["ratio"] - 1.0) < 1e-9 for e in levels)
    # between scales the ratio dips towards 1/2 but stays in the all-n bracket
    all_n = [e for e in report.entries if e["kind"] == "all-n"]
    assert min(e["ratio"] for e in all_n) < 0.75
    assert all(e["ok"] for e in all_n)


def test_tracking_designed_06(designed_06):
    seq, cert = designed_06
    f = power_target(0.6, gamma=0.65)
    grid = [10 ** (k / 3) for k in range(0, 19)]
    report = verify_tracking(seq, f, n_grid=grid)
    assert report.passed
    assert report.worst_margin() > 0


def test_tracking_flags_corrupted_sequence(designed_06):
    from wreathwalk.sequences import DegreeSequence

    seq, _ = designed_06
    f = power_target(0.6, gamma=0.65)
    head = list(seq.head)
    # flip an entry at a level the grid actually reaches
    idx = 2
    head[idx] = 3 if head[idx] == 2 else 2
    corrupted = DegreeSequence(head=tuple(head))
    report = verify_tracking(corrupted, f, n_grid=[10 ** (k / 3) for k in range(0, 19)])
    assert not report.passed


def test_entropy_to_speed_transform():
    f = power_target(0.75, gamma=0.75)
    ft = entropy_to_speed_target(f)
    assert ft.gamma == pytest.approx(0.5)
    assert ft(16.0) == pytest.approx(16.0 ** 0.5)
    assert validate_log_lipschitz(ft).passed
