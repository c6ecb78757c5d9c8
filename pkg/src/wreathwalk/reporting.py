"""Report records shared by the exact checks, the bound evaluators and the CLI."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction


def _to_plain(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (list, tuple)):
        return [_to_plain(v) for v in x]
    if isinstance(x, dict):
        return {k: _to_plain(v) for k, v in x.items()}
    return x


@dataclass
class BoundCheck:
    """One inequality check: lower <= value <= upper, up to declared slack.

    ``slack`` is 0 for exact inputs and a multiple of the standard error for
    Monte Carlo inputs.  Either side may be None (one-sided checks).
    """

    name: str
    value: float
    lower: float | None = None
    upper: float | None = None
    slack: float = 0.0
    inputs: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        margins = []
        if self.lower is not None:
            margins.append(self.value - self.lower)
        if self.upper is not None:
            margins.append(self.upper - self.value)
        return min(margins) if margins else math.inf

    @property
    def passed(self) -> bool:
        ok = True
        if self.lower is not None:
            ok = ok and self.value >= self.lower - self.slack
        if self.upper is not None:
            ok = ok and self.value <= self.upper + self.slack
        return ok

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "FAIL"

    def to_json(self) -> dict:
        data = asdict(self)
        data = _to_plain(data)
        data["margin"] = _to_plain(self.margin)
        data["verdict"] = self.verdict
        return data


@dataclass
class ExperimentReport:
    """Named statistics plus bound checks and regression slopes for one run."""

    name: str
    seed: int | None = None
    statistics: dict = field(default_factory=dict)
    checks: list[BoundCheck] = field(default_factory=list)
    slopes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "statistics": _to_plain(self.statistics),
            "slopes": _to_plain(self.slopes),
            "checks": [c.to_json() for c in self.checks],
            "passed": self.passed,
        }

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


def failing(checks) -> list[BoundCheck]:
    return [c for c in checks if not c.passed]
