"""Design of degree sequences that realize a prescribed growth profile.

Given an exponent gamma in [1/2, 1) and a target f with f(1) = 1 that is
log-Lipschitz between exponents 1/2 and gamma, i.e. for all real a, n >= 1

    a**0.5 * f(n) <= f(a*n) <= a**gamma * f(n),

the construction picks a ceiling degree m_star = m_star(gamma) and then
builds the sequence level by level: append 2 while f(n_l)/v_l <= 1, append
m_star otherwise.  The resulting exponent profile tracks f up to the
constant c_gamma = 3 * exp(1/(1-gamma)) on both sides:

    1/c_gamma <= f(n) / n**alpha(n) <= 2 * c_gamma     for all n >= 1.

The choice of m_star makes the one-step ratio

    y = f(n_l * m^2/(m-1)) / f(n_l) / m

at most 1 for m = m_star, while the lower log-Lipschitz bound keeps
y >= 1/sqrt(m-1); the induction then pins f(n_l)/v_l inside
[1/sqrt(m_star-1), 2**(2*gamma-1)] at every level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .sequences import DegreeSequence, ScaleTable

# Relative slack absorbing double-precision rounding in bracket checks; every
# bracket this package asserts has constant-factor room.
REL_SLACK = 1e-9


def c_gamma(gamma: float) -> float:
    """Tracking constant 3 * e**(1/(1-gamma))."""
    if not 0 <= gamma < 1:
        raise ValueError("gamma must lie in [0, 1)")
    return 3.0 * math.exp(1.0 / (1.0 - gamma))


@dataclass(frozen=True)
class TargetFunction:
    """A growth target f with declared exponent band [1/2, gamma]."""

    name: str
    gamma: float
    fn: Callable[[float], float]

    def __call__(self, n) -> float:
        value = self.fn(float(n))
        if not value > 0:
            raise ValueError(f"target {self.name} returned non-positive value at n={n}")
        return value


def power_target(beta: float, gamma: float | None = None) -> TargetFunction:
    """f(n) = n**beta, declared band [1/2, gamma or beta]."""
    g = beta if gamma is None else gamma
    return TargetFunction(name=f"pow:{beta:g}", gamma=g, fn=lambda n: n ** beta)


def power_log_target(beta: float, k: float, gamma: float) -> TargetFunction:
    """f(n) = n**beta * log(e*n)**k.  Validity is checked, not assumed.

    The local log-log slope is beta + k/(1 + log n), so the target is
    admissible for the band [1/2, gamma] iff both beta and beta + k lie in
    [1/2, gamma].  :func:`validate_log_lipschitz` confirms numerically.
    """
    return TargetFunction(
        name=f"pow-log:{beta:g},{k:g}",
        gamma=gamma,
        fn=lambda n: n ** beta * math.log(math.e * n) ** k,
    )


def named_target(spec: str, gamma: float) -> TargetFunction:
    """Parse ``pow:beta`` or ``pow-log:beta,k`` into a target."""
    kind, _, args = spec.partition(":")
    if kind == "pow":
        return power_target(float(args), gamma=gamma)
    if kind == "pow-log":
        beta_s, _, k_s = args.partition(",")
        return power_log_target(float(beta_s), float(k_s or 0), gamma=gamma)
    raise ValueError(f"unknown target family {spec!r}")


def entropy_to_speed_target(f: TargetFunction) -> TargetFunction:
    """The transform used to trade a speed target for a return-scale target.

    For speed targets with band [3/4, gamma], ft(n) = f(n)**2 / n has band
    [1/2, 2*gamma - 1].  Validity beyond power-law families should be
    confirmed with :func:`validate_log_lipschitz`.
    """
    return TargetFunction(
        name=f"squared-over-n({f.name})",
        gamma=2 * f.gamma - 1,
        fn=lambda n: f.fn(float(n)) ** 2 / float(n),
    )


@dataclass
class LipschitzReport:
    passed: bool
    checked: int
    violations: list[tuple[float, float, str, float]] = field(default_factory=list)

    @property
    def worst(self):
        if not self.violations:
            return None
        return min(self.violations, key=lambda rec: rec[3])


def default_pair_grid(count: int = 100, n_max: float = 1e6) -> list[tuple[float, float]]:
    """Log-spaced (a, n) pairs covering [1, n_max] on both coordinates."""
    side = max(2, int(math.isqrt(count)))
    points = [math.exp(math.log(n_max) * i / (side - 1)) for i in range(side)]
    return [(a, n) for a in points for n in points][:count] or [(2.0, 2.0)]


def validate_log_lipschitz(
    f: TargetFunction,
    grid: Sequence[tuple[float, float]] | None = None,
    rel_tol: float = REL_SLACK,
) -> LipschitzReport:
    """Check a**0.5 f(n) <= f(a n) <= a**gamma f(n) on every grid pair."""
    grid = list(grid) if grid is not None else default_pair_grid()
    if not grid:
        raise ValueError("grid must be nonempty")
    violations = []
    for a, n in grid:
        if a < 1 or n < 1:
            raise ValueError("grid pairs must satisfy a, n >= 1")
        fn = f(n)
        fan = f(a * n)
        low = math.sqrt(a) * fn
        high = a ** f.gamma * fn
        if fan < low * (1 - rel_tol):
            violations.append((a, n, "lower", fan / low - 1))
        if fan > high * (1 + rel_tol):
            violations.append((a, n, "upper", high / fan - 1))
    return LipschitzReport(passed=not violations, checked=len(grid), violations=violations)


def choose_m_star(gamma: float) -> int:
    """Smallest integer m >= 2 with (m^2/(m-1))**gamma <= m.

    The scan is guaranteed to stop by ceil(e * e**(1/(1-gamma))), which is
    itself at most 3 * e**(1/(1-gamma)).
    """
    if not 0.5 <= gamma < 1:
        raise ValueError("gamma must lie in [1/2, 1)")
    limit = math.ceil(math.e * math.exp(1.0 / (1.0 - gamma)))
    for m in range(2, limit + 1):
        # log form of (m^2/(m-1))**gamma <= m, with slack for rounding at
        # equality cases such as gamma = 1/2, m = 2.
        if gamma * math.log(m * m / (m - 1)) <= math.log(m) * (1 + REL_SLACK):
            return m
    raise AssertionError("scan exceeded the guaranteed ceiling")  # pragma: no cover


@dataclass
class DesignStep:
    """State at one level and the choice made from it.

    ``ratio`` is f(n_level)/v_level before appending; ``chosen_m`` is the
    degree appended as m_{level+1}; ``y`` is the one-step update ratio
    f(n_{level+1})/f(n_level)/m_{level+1}.
    """

    level: int
    n_level: Fraction
    v_level: int
    ratio: float
    chosen_m: int
    y: float


@dataclass
class DesignCertificate:
    gamma: float
    c_gamma: float
    m_star: int
    steps: list[DesignStep] = field(default_factory=list)
    final_ratio: float = 1.0

    def ratio_bracket(self) -> tuple[float, float]:
        """Induction bracket for f(n_l)/v_l at every level."""
        lo = 1.0 / math.sqrt(self.m_star - 1) if self.m_star > 1 else 1.0
        return lo, 2.0 ** (2 * self.gamma - 1)

    def check_invariants(self) -> list[str]:
        """Return a list of violated invariants (empty when all hold)."""
        problems = []
        lo, hi = self.ratio_bracket()
        for step in self.steps:
            if step.chosen_m not in (2, self.m_star):
                problems.append(f"level {step.level}: chose m={step.chosen_m}")
            if not lo * (1 - REL_SLACK) <= step.ratio <= hi * (1 + REL_SLACK):
                problems.append(
                    f"level {step.level}: ratio {step.ratio:.6g} outside [{lo:.6g}, {hi:.6g}]"
                )
            m = step.chosen_m
            y_lo = 1.0 / math.sqrt(m - 1)
            y_hi = (m * m / (m - 1)) ** self.gamma / m
            if not y_lo * (1 - REL_SLACK) <= step.y <= y_hi * (1 + REL_SLACK):
                problems.append(
                    f"level {step.level}: step ratio y={step.y:.6g} outside [{y_lo:.6g}, {y_hi:.6g}]"
                )
        if not lo * (1 - REL_SLACK) <= self.final_ratio <= hi * (1 + REL_SLACK):
            problems.append(f"final ratio {self.final_ratio:.6g} outside [{lo:.6g}, {hi:.6g}]")
        return problems

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "c_gamma": self.c_gamma,
            "m_star": self.m_star,
            "final_ratio": self.final_ratio,
            "steps": [
                {
                    "level": s.level,
                    "n_level": float(s.n_level),
                    "v_level": s.v_level,
                    "ratio": s.ratio,
                    "chosen_m": s.chosen_m,
                    "y": s.y,
                }
                for s in self.steps
            ],
        }


def design_sequence(
    f: TargetFunction, gamma: float | None = None, levels: int = 40
) -> tuple[DegreeSequence, DesignCertificate]:
    """Build a head of ``levels`` degrees tracking f by the inductive rule.

    The rule is applied uniformly from level 0 where f(n_0)/v_0 = f(1) = 1,
    so the first degree is always 2 (the induction's base case).  The
    construction is deterministic.
    """
    gamma = f.gamma if gamma is None else gamma
    if levels < 1:
        raise ValueError("levels must be >= 1")
    m_star = choose_m_star(gamma)
    cert = DesignCertificate(gamma=gamma, c_gamma=c_gamma(gamma), m_star=m_star)
    head: list[int] = []
    v = 1
    n = Fraction(1)
    for level in range(levels):
        ratio = f(float(n)) / v
        m = 2 if ratio <= 1 + REL_SLACK else m_star
        n_next = n * Fraction(m * m, m - 1)
        y = f(float(n_next)) / f(float(n)) / m
        cert.steps.append(
            DesignStep(level=level, n_level=n, v_level=v, ratio=ratio, chosen_m=m, y=y)
        )
        head.append(m)
        v *= m
        n = n_next
    cert.final_ratio = f(float(n)) / v
    seq = DegreeSequence(head=tuple(head), extension_kind="constant")
    return seq, cert


@dataclass
class TrackingReport:
    passed: bool
    entries: list[dict] = field(default_factory=list)

    def worst_margin(self) -> float:
        return min((e["margin"] for e in self.entries), default=math.inf)


def verify_tracking(
    seq: DegreeSequence,
    f: TargetFunction,
    gamma: float | None = None,
    n_grid: Sequence[float] | None = None,
) -> TrackingReport:
    """Check the tracking brackets for a designed sequence.

    Three families of checks, all with relative slack ``REL_SLACK``:

    * headline, every grid point: 1/c_gamma <= f(n)/n**alpha(n) <= 2*c_gamma;
    * at the level scales n = n_l: 1/sqrt(m_star-1) <= f(n_l)/v_l <= 2**(2*gamma-1);
    * every grid point: 1/(m_star*sqrt(m_star-1)) <= f(n)/n**alpha(n) <= 2*m_star.

    The all-n lower constant carries the extra 1/m_star factor: with the
    ceiling convention for level(n), the ratio dips by up to one degree
    factor just above each scale n_l (e.g. the all-2 sequence with f = sqrt
    has f(5)/5**alpha(5) = sqrt(5)/4 < 1), so the bracket without it is
    unattainable; the headline bracket absorbs the factor since
    m_star*sqrt(m_star-1) <= c_gamma throughout the admissible range.
    """
    gamma = f.gamma if gamma is None else gamma
    m_star = choose_m_star(gamma)
    cg = c_gamma(gamma)
    if m_star * math.sqrt(m_star - 1) > cg:
        raise ValueError("gamma outside the range where the tracking constant applies")
    table = ScaleTable(seq)
    if n_grid is None:
        n_grid = [10 ** (k / 4) for k in range(0, 25)]

    level_lo = 1.0 / math.sqrt(m_star - 1) if m_star > 1 else 1.0
    level_hi = 2 ** (2 * gamma - 1)
    entries = []
    passed = True

    def record(kind, n, ratio, lo, hi):
        nonlocal passed
        ok = lo * (1 - REL_SLACK) <= ratio <= hi * (1 + REL_SLACK)
        passed = passed and ok
        entries.append(
            {
                "kind": kind,
                "n": float(n),
                "ratio": ratio,
                "lower": lo,
                "upper": hi,
                "margin": min(ratio - lo, hi - ratio),
                "ok": ok,
            }
        )

    max_level = 0
    for n in n_grid:
        if n < 1:
            raise ValueError("grid points must be >= 1")
        l = table.level_of(n)
        max_level = max(max_level, l)
        ratio = f(n) / table.row(l).v
        record("headline", n, ratio, 1.0 / cg, 2.0 * cg)
        record("all-n", n, ratio, level_lo / m_star, 2.0 * m_star)
    for l in range(1, max_level + 1):
        row = table.row(l)
        ratio = f(float(row.n)) / row.v
        record("level", row.n, ratio, level_lo, level_hi)
    return TrackingReport(passed=passed, entries=entries)
