"""Exact analysis of the projected letter-line birth-and-death chain.

The walk on finite-support letter strings (front letter resampled on heads,
the letter after the first nonzero letter resampled on tails) projects to
binary strings b_1 b_2 ... via b_i = 1(w_i > 0).  Listing binary strings in
reflected Gray-code order turns the projection into a nearest-neighbor
chain on the nonnegative integers:

* heads toggles b_1 (the front bit), moving position p to p+1 if p is even,
  to p-1 if p is odd;
* tails toggles the bit just after the first nonzero bit, moving p to p+1
  if p is odd, to p-1 if p is even; at position 0 tails does nothing.

A bit at level j resamples to 1 with probability (m_j - 1)/m_j, so the flip
probabilities and the stationary weights

    pi(b) = prod_i (m_i - 1)**b_i

are exact rationals.  Everything downstream (return-time tails, expected
return and hitting times, effective resistances, escape probabilities) is
computed from this kernel, in exact rational arithmetic where feasible and
in float64 dynamic programming for long horizons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .reporting import BoundCheck
from .sequences import DegreeSequence, ScaleTable


def gray_position(bits) -> int:
    """Position of a binary string in reflected Gray order.

    ``bits`` is (b_1, ..., b_L) front first; position digit i is the parity
    of b_i + b_{i+1} + ... .
    """
    if isinstance(bits, BinaryState):
        bits = bits.bits
    g = 0
    for i, b in enumerate(bits):
        if b:
            g |= 1 << i
    p = 0
    while g:
        p ^= g
        g >>= 1
    return p


def gray_bits(position: int, level: int) -> "BinaryState":
    """Inverse of :func:`gray_position` on {0, ..., 2**level - 1}."""
    if not 0 <= position < (1 << level):
        raise ValueError(f"position {position} out of range for level {level}")
    g = position ^ (position >> 1)
    bits = []
    i = 0
    while g >> i:
        bits.append((g >> i) & 1)
        i += 1
    return BinaryState(tuple(bits))


@dataclass(frozen=True)
class BinaryState:
    """Binary string b_1 b_2 ... with trailing zeros trimmed."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(self.bits)
        while bits and bits[-1] == 0:
            bits = bits[:-1]
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @property
    def position(self) -> int:
        return gray_position(self.bits)

    def __len__(self):
        return len(self.bits)


ORIGIN = BinaryState(())


@dataclass(frozen=True)
class StepDistribution:
    """Exact one-step law at a state: hold, front toggle, escalation toggle.

    The two toggles are the Gray-order neighbors; ``toggle_after_first_nonzero``
    is zero at the all-zero state, where tails is a no-op.
    """

    stay: Fraction
    toggle_front: Fraction
    toggle_after_first_nonzero: Fraction

    def __post_init__(self):
        total = self.stay + self.toggle_front + self.toggle_after_first_nonzero
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")


def step_kernel(seq: DegreeSequence, state: BinaryState) -> StepDistribution:
    bits = state.bits
    m1 = seq.m(1)
    b1 = bits[0] if bits else 0
    front = Fraction(m1 - 1, 2 * m1) if b1 == 0 else Fraction(1, 2 * m1)
    if bits:
        i = bits.index(1) + 1  # first nonzero level
        mj = seq.m(i + 1)
        bj = bits[i] if i < len(bits) else 0
        after = Fraction(mj - 1, 2 * mj) if bj == 0 else Fraction(1, 2 * mj)
    else:
        after = Fraction(0)
    return StepDistribution(
        stay=1 - front - after, toggle_front=front, toggle_after_first_nonzero=after
    )


def _position_moves(seq: DegreeSequence, p: int):
    """(front_target, front_prob, after_target, after_prob) at position p."""
    g = p ^ (p >> 1)
    m1 = seq.m(1)
    front = Fraction(m1 - 1, 2 * m1) if (g & 1) == 0 else Fraction(1, 2 * m1)
    front_target = p + 1 if p % 2 == 0 else p - 1
    if p == 0:
        return front_target, front, None, Fraction(0)
    i = (g & -g).bit_length()  # first nonzero level
    j = i + 1
    mj = seq.m(j)
    bj = (g >> (j - 1)) & 1
    after = Fraction(mj - 1, 2 * mj) if bj == 0 else Fraction(1, 2 * mj)
    after_target = p + 1 if p % 2 == 1 else p - 1
    return front_target, front, after_target, after


def stationary_weight(seq: DegreeSequence, p: int) -> int:
    """pi(p) = prod over set bits at level j of (m_j - 1); pi(0) = 1."""
    g = p ^ (p >> 1)
    out = 1
    j = 1
    while g:
        if g & 1:
            out *= seq.m(j) - 1
        g >>= 1
        j += 1
    return out


class TruncatedChain:
    """The projected chain restricted to positions 0..top.

    ``level=L`` keeps all binary strings of length <= L (top = 2**L - 1);
    an explicit ``top`` supports the variant truncated at an arbitrary
    position (moves past ``top`` become holds).  All kernel entries and
    weights are exact rationals / integers; detailed balance
    pi(x) P(x,y) = pi(y) P(y,x) holds exactly on every edge.
    """

    def __init__(self, seq: DegreeSequence, level: int | None = None, top: int | None = None):
        if (level is None) == (top is None):
            raise ValueError("give exactly one of level, top")
        if level is not None:
            if level < 1:
                raise ValueError("level must be >= 1")
            top = (1 << level) - 1
        assert top is not None
        if top < 1:
            raise ValueError("top must be >= 1")
        self.seq = seq
        self.level = level
        self.top = top
        n = top + 1
        self.pi = [stationary_weight(seq, p) for p in range(n)]
        self.up = [Fraction(0)] * n
        self.down = [Fraction(0)] * n
        self.stay = [Fraction(0)] * n
        for p in range(n):
            ft, fp, at, ap = _position_moves(seq, p)
            stay = Fraction(1) - fp - ap
            for target, prob in ((ft, fp), (at, ap)):
                if target is None or prob == 0:
                    continue
                if target > top:
                    stay += prob
                elif target == p + 1:
                    self.up[p] += prob
                else:
                    self.down[p] += prob
            self.stay[p] = stay
            assert self.stay[p] + self.up[p] + self.down[p] == 1

    def states(self) -> range:
        return range(self.top + 1)

    def check_reversibility(self) -> bool:
        return all(
            self.pi[p] * self.up[p] == self.pi[p + 1] * self.down[p + 1]
            for p in range(self.top)
        )

    def edge_conductance(self, p: int) -> Fraction:
        """c(p, p+1) = pi(p) P(p, p+1)."""
        if not 0 <= p < self.top:
            raise ValueError("edge index out of range")
        return self.pi[p] * self.up[p]

    def total_weight(self) -> int:
        return sum(self.pi)


def expected_return_time(chain: TruncatedChain) -> Fraction:
    """Expected first return time to position 0: total weight over pi(0).

    For a truncation at level L this equals the volume v_L exactly.
    """
    return Fraction(chain.total_weight(), chain.pi[0])


def expected_return_time_solve(chain: TruncatedChain) -> Fraction:
    """Same quantity through the hitting-time linear system (cross-check)."""
    hit = hitting_times_to_origin(chain)
    return 1 + chain.up[0] * hit[1]


def hitting_times_to_origin(chain: TruncatedChain) -> list[Fraction]:
    """E_p[time to hit 0] for every p, by exact tridiagonal elimination."""
    top = chain.top
    # (1 - stay_p) E_p - down_p E_{p-1} - up_p E_{p+1} = 1,  E_0 = 0.
    diag = [Fraction(1) - chain.stay[p] for p in range(top + 1)]
    rhs = [Fraction(1)] * (top + 1)
    # Forward elimination over p = 1..top (E_0 = 0 removes the first column).
    for p in range(2, top + 1):
        factor = chain.down[p] / diag[p - 1]
        diag[p] -= factor * chain.up[p - 1]
        rhs[p] += factor * rhs[p - 1]
    out = [Fraction(0)] * (top + 1)
    out[top] = rhs[top] / diag[top]
    for p in range(top - 1, 0, -1):
        out[p] = (rhs[p] + chain.up[p] * out[p + 1]) / diag[p]
    return out


def hitting_time_top(chain_or_seq, level: int) -> Fraction:
    """E[time to hit 0 from position 2**level] in the chain truncated there.

    Uses the closed birth-and-death formula

        sum_{i=1}^{top} (pi_{i-1} p(i-1,i))^{-1} * sum_{j=i}^{top} pi_j

    which agrees exactly with the linear-system solution
    (:func:`hitting_times_to_origin`), and dominates
    r_{level-1} v_{level-1} (m_level - 1).
    """
    chain = _chain_truncated_at(chain_or_seq, 1 << level)
    top = chain.top
    suffix = Fraction(0)
    suffixes = [Fraction(0)] * (top + 2)
    for j in range(top, 0, -1):
        suffix += chain.pi[j]
        suffixes[j] = suffix
    total = Fraction(0)
    for i in range(1, top + 1):
        total += suffixes[i] / (chain.pi[i - 1] * chain.up[i - 1])
    return total


def hitting_time_top_solve(chain_or_seq, level: int) -> Fraction:
    """Independent value of :func:`hitting_time_top` via the linear system."""
    chain = _chain_truncated_at(chain_or_seq, 1 << level)
    return hitting_times_to_origin(chain)[chain.top]


def _chain_truncated_at(chain_or_seq, top: int) -> TruncatedChain:
    if isinstance(chain_or_seq, TruncatedChain):
        if chain_or_seq.top == top:
            return chain_or_seq
        if chain_or_seq.top < top:
            raise ValueError("chain truncation below the requested position")
        return TruncatedChain(chain_or_seq.seq, top=top)
    return TruncatedChain(chain_or_seq, top=top)


def effective_resistance(chain: TruncatedChain, a: int, b: int) -> Fraction:
    """Resistance between positions a <= b: series sum of 1/c(e) on the path."""
    if a > b:
        raise ValueError("need a <= b")
    if b > chain.top:
        raise ValueError("position beyond truncation")
    return sum((1 / chain.edge_conductance(p) for p in range(a, b)), Fraction(0))


def escape_probability(chain: TruncatedChain, level: int) -> Fraction:
    """P(hit 2**level before returning to 0), starting from 0.

    Network form 1/(pi(0) * res(0, 2**level)); holds at 0 count as returns,
    and the first-step factor P(0,1) cancels against the first edge.  The
    degenerate level 0 returns 1 by convention.
    """
    if level == 0:
        return Fraction(1)
    target = 1 << level
    if target > chain.top:
        raise ValueError("target beyond truncation")
    return 1 / (chain.pi[0] * effective_resistance(chain, 0, target))


# ---------------------------------------------------------------------------
# Return-time tail by dynamic programming on the unbounded chain.
# ---------------------------------------------------------------------------


def _kernel_arrays(seq: DegreeSequence, max_position: int):
    """float64 (up, down, stay) for positions 0..max_position."""
    n = max_position + 1
    up = np.zeros(n)
    down = np.zeros(n)
    stay = np.zeros(n)
    for p in range(n):
        ft, fp, at, ap = _position_moves(seq, p)
        u = d = 0.0
        for target, prob in ((ft, fp), (at, ap)):
            if target is None:
                continue
            if target == p + 1:
                u += float(prob)
            else:
                d += float(prob)
        up[p] = u
        down[p] = d
        stay[p] = 1.0 - u - d
    return up, down, stay


def return_tail(seq: DegreeSequence, horizon: int, exact: bool = False):
    """P(T > i) for i = 0..horizon, where T is the first return time to 0.

    T = min{t >= 1 : position_t = 0}; holds at 0 count as returns.  The DP
    makes 0 absorbing after the first step and tracks the surviving mass;
    at time t the walk sits at position <= t, so the state window grows
    with t.  ``exact=True`` switches to integer arithmetic over the common
    denominator (2 * lcm of degrees)**t and returns Fractions (use for
    horizons up to a few thousand).
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if exact:
        return _return_tail_exact(seq, horizon)
    max_pos = horizon + 1
    up, down, stay = _kernel_arrays(seq, max_pos)
    surv = np.ones(horizon + 1)
    if horizon == 0:
        return surv
    cur = np.zeros(max_pos + 2)
    nxt = np.zeros(max_pos + 2)
    cur[1] = up[0]
    surv[1] = cur[1]
    hi = 1
    for t in range(2, horizon + 1):
        hi = min(hi + 1, max_pos)
        a = cur[1 : hi + 1]
        np.multiply(a, stay[1 : hi + 1], out=nxt[1 : hi + 1])
        nxt[2 : hi + 1] += a[:-1] * up[1:hi]
        nxt[1:hi] += cur[2 : hi + 1] * down[2 : hi + 1]
        surv[t] = nxt[1 : hi + 1].sum()
        cur, nxt = nxt, cur
    if horizon >= 1 and surv[horizon] < 1e-280:
        raise FloatingPointError(
            "surviving mass underflowed double precision; rerun with exact=True"
        )
    return surv


def _lcm_degrees(seq: DegreeSequence) -> int:
    out = 1
    for m in seq.distinct_values():
        out = math.lcm(out, m)
    return out


def _return_tail_exact(seq: DegreeSequence, horizon: int) -> list[Fraction]:
    denom_step = 2 * _lcm_degrees(seq)
    max_pos = horizon + 1
    moves = []  # per position: scaled integer (up, down, stay)
    for p in range(max_pos + 1):
        ft, fp, at, ap = _position_moves(seq, p)
        u = d = 0
        for target, prob in ((ft, fp), (at, ap)):
            if target is None:
                continue
            scaled = prob * denom_step
            assert scaled.denominator == 1
            if target == p + 1:
                u += int(scaled)
            else:
                d += int(scaled)
        moves.append((u, d, denom_step - u - d))
    surv: list[Fraction] = [Fraction(1)] * (horizon + 1)
    if horizon == 0:
        return surv
    cur = [0] * (max_pos + 2)
    cur[1] = moves[0][0]
    surv[1] = Fraction(cur[1], denom_step)
    denom = denom_step
    hi = 1
    for t in range(2, horizon + 1):
        hi = min(hi + 1, max_pos)
        nxt = [0] * (max_pos + 2)
        for p in range(1, hi + 1):
            mass = cur[p]
            if not mass:
                continue
            u, d, s = moves[p]
            nxt[p] += mass * s
            nxt[p + 1] += mass * u
            if p > 1:
                nxt[p - 1] += mass * d
        denom *= denom_step
        surv[t] = Fraction(sum(nxt[1 : hi + 2]), denom)
        cur = nxt
    return surv


def orbit_size_exact(seq: DegreeSequence, n: int, tail=None):
    """E of the inverted-orbit range size: sum_{i=0}^{n} P(T > i) = E[T ∧ (n+1)]."""
    if tail is None:
        tail = return_tail(seq, n)
    if n >= len(tail):
        raise ValueError("horizon exceeded; recompute the tail")
    if isinstance(tail, np.ndarray):
        return float(tail[: n + 1].sum())
    return sum(tail[: n + 1], Fraction(0))


def hitting_tail_from_top(chain_or_seq, level: int, horizon: int) -> np.ndarray:
    """P(time to hit 0 from 2**level > t) for t = 0..horizon, float64 DP.

    Runs on the chain truncated at 2**level with 0 absorbing.  This is the
    exact law evaluated by deterministic DP (no sampling); rounding is the
    only approximation.
    """
    chain = _chain_truncated_at(chain_or_seq, 1 << level)
    top = chain.top
    up = np.array([float(x) for x in chain.up])
    down = np.array([float(x) for x in chain.down])
    stay = np.array([float(x) for x in chain.stay])
    cur = np.zeros(top + 2)
    cur[top] = 1.0
    surv = np.ones(horizon + 1)
    for t in range(1, horizon + 1):
        nxt = np.zeros(top + 2)
        body = cur[1 : top + 1]
        nxt[1 : top + 1] = body * stay[1 : top + 1]
        nxt[2 : top + 2] += body * up[1 : top + 1]
        nxt[1 : top] += cur[2 : top + 1] * down[2 : top + 1]
        nxt[top + 1] = 0.0  # nothing moves past the reflecting top
        surv[t] = nxt[1 : top + 1].sum()
        cur = nxt
    return surv


def survival_exceeds_quarter_mean(chain_or_seq, level: int) -> tuple[float, Fraction]:
    """(P(T' > E T'/4), E T') for the hitting time T' from 2**level.

    The probability comes from the deterministic DP tail; the mean is exact.
    """
    mean = hitting_time_top(chain_or_seq, level)
    # X integer-valued: P(X > mean/4) = P(X > floor(mean/4)) in both the
    # integer and non-integer threshold cases.
    steps = int(mean / 4)
    tail = hitting_tail_from_top(chain_or_seq, level, steps)
    return float(tail[steps]), mean


# ---------------------------------------------------------------------------
# Inequality batteries.
# ---------------------------------------------------------------------------


def check_return_bounds(
    seq: DegreeSequence, ns, tail=None, name_prefix: str = ""
) -> list[BoundCheck]:
    """Pointwise return-probability sandwich with exact exponents.

    For each n: P(T>n) >= n**(alpha_n - 1) / (500 m_star^2) and
    sum_{i<=n} P(T>i) <= 2 n**alpha_n, where n**alpha_n = v_{level(n)}
    exactly.  Also asserts the level form sum_{i <= n_l} P(T>i) <= 2 v_l for
    every level scale within the horizon.
    """
    ns = sorted(set(int(n) for n in ns))
    if not ns or ns[0] < 1:
        raise ValueError("need a nonempty grid of n >= 1")
    horizon = ns[-1]
    if tail is None:
        tail = return_tail(seq, horizon)
    tail = np.asarray(tail, dtype=float)
    partial = np.cumsum(tail)
    table = ScaleTable(seq)
    m2 = 500 * seq.m_star ** 2
    checks = []
    for n in ns:
        v = table.row(table.level_of(n)).v
        checks.append(
            BoundCheck(
                name=f"{name_prefix}return_tail_lower[n={n}]",
                value=float(tail[n]),
                lower=v / (m2 * n),
                inputs={"n": n, "v_level": v, "m_star": seq.m_star},
            )
        )
        checks.append(
            BoundCheck(
                name=f"{name_prefix}return_sum_upper[n={n}]",
                value=float(partial[n]),
                upper=2.0 * v,
                inputs={"n": n, "v_level": v},
            )
        )
    l = 1
    while True:
        row = table.row(l)
        cutoff = int(row.n)  # sum over i <= n_l means i <= floor(n_l)
        if cutoff > horizon:
            break
        checks.append(
            BoundCheck(
                name=f"{name_prefix}return_sum_at_scale[l={l}]",
                value=float(partial[cutoff]),
                upper=2.0 * row.v,
                inputs={"level": l, "n_level": float(row.n), "v_level": row.v},
            )
        )
        l += 1
    return checks


def _identity_check(name: str, holds: bool, **inputs) -> BoundCheck:
    return BoundCheck(name=name, value=1.0 if holds else 0.0, lower=1.0, inputs=inputs)


def check_chain_identities(
    seq: DegreeSequence,
    return_levels: int = 10,
    hitting_levels: int = 8,
    resistance_levels: int = 12,
    solve_levels: int = 6,
    survival_levels: int = 8,
) -> list[BoundCheck]:
    """Exact identity battery for truncated chains.

    Covers reversibility, expected return time = volume, the hitting-time
    formula against the tridiagonal linear solve and its lower bound, the
    resistance sandwich, the escape-probability bound, and the quarter-mean
    survival bound P(T' > E T'/4) >= 1/31.
    """
    checks = []
    table = ScaleTable(seq)
    m_star = seq.m_star
    # Top at 2**resistance_levels so res(0, 2**l) is defined for every l.
    chain = TruncatedChain(seq, top=1 << resistance_levels)
    checks.append(_identity_check("reversible", chain.check_reversibility()))

    for l in range(1, return_levels + 1):
        sub = TruncatedChain(seq, level=l)
        ert = expected_return_time(sub)
        checks.append(
            _identity_check(
                f"expected_return_is_volume[l={l}]",
                ert == table.row(l).v,
                value=float(ert),
                volume=table.row(l).v,
            )
        )
        if l <= solve_levels:
            checks.append(
                _identity_check(
                    f"expected_return_solve_agrees[l={l}]",
                    ert == expected_return_time_solve(sub),
                )
            )

    for l in range(1, hitting_levels + 1):
        formula = hitting_time_top(seq, l)
        solved = hitting_time_top_solve(seq, l)
        checks.append(
            BoundCheck(
                name=f"hitting_formula_matches_solve[l={l}]",
                value=abs(float(formula - solved)) / float(formula),
                upper=1e-10,
                inputs={"formula": float(formula), "solve": float(solved)},
            )
        )
        bound = table.row(l - 1).r * table.row(l - 1).v * (seq.m(l) - 1)
        checks.append(
            BoundCheck(
                name=f"hitting_time_lower[l={l}]",
                value=float(formula),
                lower=float(bound),
                inputs={"bound": float(bound)},
            )
        )

    for l in range(1, resistance_levels + 1):
        res = effective_resistance(chain, 0, 1 << l)
        r_l = table.row(l).r
        checks.append(
            BoundCheck(
                name=f"resistance_sandwich[l={l}]",
                value=float(res),
                lower=float(r_l),
                upper=float(2 * m_star * r_l),
            )
        )
        checks.append(
            BoundCheck(
                name=f"escape_probability_lower[l={l}]",
                value=float(escape_probability(chain, l)),
                lower=float(1 / (2 * m_star * r_l)),
            )
        )

    for l in range(1, survival_levels + 1):
        prob, mean = survival_exceeds_quarter_mean(seq, l)
        checks.append(
            BoundCheck(
                name=f"quarter_mean_survival[l={l}]",
                value=prob,
                lower=1.0 / 31.0,
                inputs={"mean_hitting_time": float(mean)},
            )
        )
    return checks


def check_return_time_escape(
    seq: DegreeSequence, max_level: int = 8, tail=None
) -> list[BoundCheck]:
    """P(T > r_{l-1} v_{l-1} / 4) >= 1 / (62 m_star r_l) on the full chain."""
    table = ScaleTable(seq)
    thresholds = []
    for l in range(1, max_level + 1):
        prev = table.row(l - 1)
        thresholds.append((l, int(prev.r * prev.v / 4)))
    horizon = max(t for _, t in thresholds)
    if tail is None:
        tail = return_tail(seq, horizon)
    checks = []
    for l, t in thresholds:
        if t >= len(tail):
            raise ValueError("tail horizon too short")
        checks.append(
            BoundCheck(
                name=f"return_escape_lower[l={l}]",
                value=float(tail[t]),
                lower=float(1 / (62 * seq.m_star * table.row(l).r)),
                inputs={"threshold": t},
            )
        )
    return checks
