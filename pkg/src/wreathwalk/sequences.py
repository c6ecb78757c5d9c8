"""Bounded tree degree sequences and their exact scale quantities.

A degree sequence m_1, m_2, ... (every entry an integer >= 2, bounded
overall) determines three increasing scales:

    v_l = m_1 * ... * m_l            (volume at level l, an integer)
    r_l = prod_{i<=l} m_i / (m_i-1)  (resistance factor, a rational)
    n_l = v_l * r_l                  (time scale, a rational)

and for a real n >= 1 the inverse level and exponent

    level(n) = min{ l : n_l >= n },   alpha(n) = log v_{level(n)} / log n,

so that n ** alpha(n) equals v_{level(n)} exactly.  Everything except the
logarithms is kept in exact integer/rational arithmetic: the sandwich
inequalities built on these quantities carry explicit constants and must
not drift.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

Real = Union[int, float, Fraction]

EXTENSION_KINDS = ("constant", "periodic")


@dataclass(frozen=True)
class DegreeSequence:
    """An infinite degree sequence: finite head plus an extension rule.

    ``extension_kind`` is either ``"constant"`` (repeat the last head entry
    forever) or ``"periodic"`` (cycle through ``period`` after the head).
    Entries are 1-indexed via :meth:`m`.
    """

    head: tuple[int, ...]
    extension_kind: str = "constant"
    period: tuple[int, ...] = ()

    def __post_init__(self):
        if self.extension_kind not in EXTENSION_KINDS:
            raise ValueError(f"unknown extension kind {self.extension_kind!r}")
        if self.extension_kind == "periodic" and not self.period:
            raise ValueError("periodic extension requires a nonempty period")
        if self.extension_kind == "constant" and not self.head:
            raise ValueError("constant extension requires a nonempty head")
        for m in self.head + self.period:
            if not isinstance(m, int) or m < 2:
                raise ValueError(f"degree entries must be integers >= 2, got {m!r}")
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "period", tuple(self.period))

    def m(self, level: int) -> int:
        """Entry m_level for any level >= 1."""
        if level < 1:
            raise ValueError("levels are 1-indexed")
        if level <= len(self.head):
            return self.head[level - 1]
        if self.extension_kind == "constant":
            return self.head[-1]
        return self.period[(level - len(self.head) - 1) % len(self.period)]

    @property
    def m_star(self) -> int:
        """Maximum entry over the whole (bounded) sequence."""
        tail = self.period if self.extension_kind == "periodic" else self.head[-1:]
        return max(self.head + tuple(tail))

    def distinct_values(self) -> frozenset[int]:
        tail = self.period if self.extension_kind == "periodic" else self.head[-1:]
        return frozenset(self.head + tuple(tail))

    def prefix(self, length: int) -> tuple[int, ...]:
        return tuple(self.m(l) for l in range(1, length + 1))

    def to_json(self) -> dict:
        ext: dict = {"kind": self.extension_kind}
        if self.extension_kind == "periodic":
            ext["period"] = list(self.period)
        return {"head": list(self.head), "extension": ext}

    @classmethod
    def from_json(cls, data: dict) -> "DegreeSequence":
        ext = data.get("extension", {"kind": "constant"})
        return cls(
            head=tuple(data["head"]),
            extension_kind=ext.get("kind", "constant"),
            period=tuple(ext.get("period", ())),
        )

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "DegreeSequence":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def constant_sequence(m: int) -> DegreeSequence:
    return DegreeSequence(head=(m,))


def volume(seq: DegreeSequence, level: int) -> int:
    """v_level = m_1 * ... * m_level; the empty product is 1."""
    if level < 0:
        raise ValueError("level must be >= 0")
    out = 1
    for l in range(1, level + 1):
        out *= seq.m(l)
    return out


def resistance_factor(seq: DegreeSequence, level: int) -> Fraction:
    """r_level = prod_{i<=level} m_i / (m_i - 1), exact."""
    if level < 0:
        raise ValueError("level must be >= 0")
    out = Fraction(1)
    for l in range(1, level + 1):
        m = seq.m(l)
        out *= Fraction(m, m - 1)
    return out


def scale(seq: DegreeSequence, level: int) -> Fraction:
    """n_level = v_level * r_level, exact."""
    return volume(seq, level) * resistance_factor(seq, level)


@dataclass
class ScaleRow:
    level: int
    v: int
    r: Fraction
    n: Fraction


class ScaleTable:
    """Lazily grown table of (level, v_l, r_l, n_l), all exact."""

    def __init__(self, seq: DegreeSequence):
        self.seq = seq
        self._rows: list[ScaleRow] = [ScaleRow(0, 1, Fraction(1), Fraction(1))]

    def row(self, level: int) -> ScaleRow:
        if level < 0:
            raise ValueError("level must be >= 0")
        while len(self._rows) <= level:
            prev = self._rows[-1]
            l = prev.level + 1
            m = self.seq.m(l)
            v = prev.v * m
            r = prev.r * Fraction(m, m - 1)
            self._rows.append(ScaleRow(l, v, r, v * r))
        return self._rows[level]

    def level_of(self, n: Real) -> int:
        """Smallest level l with n_l >= n (exact comparison)."""
        n = _as_fraction(n)
        if n < 1:
            raise ValueError("n must be >= 1")
        l = 0
        while self.row(l).n < n:
            l += 1
        return l


def _as_fraction(n: Real) -> Fraction:
    if isinstance(n, Fraction):
        return n
    if isinstance(n, int):
        return Fraction(n)
    if isinstance(n, float):
        if not math.isfinite(n):
            raise ValueError("n must be finite")
        return Fraction(n)
    raise TypeError(f"unsupported numeric type {type(n)!r}")


def level_of(seq: DegreeSequence, n: Real, table: ScaleTable | None = None) -> tuple[int, float]:
    """Return (level(n), alpha(n)) for real n >= 1.

    alpha(1) is taken to be 0 with level 0; log v_0 / log 1 is 0/0 and every
    downstream use evaluates at n >= 2, so the convention is inert.
    """
    table = table or ScaleTable(seq)
    frac = _as_fraction(n)
    if frac < 1:
        raise ValueError("n must be >= 1")
    if frac == 1:
        return 0, 0.0
    l = table.level_of(frac)
    alpha = math.log(table.row(l).v) / math.log(float(frac))
    return l, alpha


def n_to_alpha_power(seq: DegreeSequence, n: Real, table: ScaleTable | None = None) -> int:
    """n ** alpha(n) evaluated exactly: it equals v_{level(n)} by definition."""
    table = table or ScaleTable(seq)
    return table.row(table.level_of(_as_fraction(n)) if _as_fraction(n) > 1 else 0).v
