"""Heegaard and trisection data at the level of fundamental groups.

Only obstructions are produced: a comparison either certifies that two
trisections are not isotopic or says nothing.

Trisection text format (``heegaard v1`` is the same without sectors, with a
``genus:`` line and a single ``tuple:`` line)::

    trisection v1
    gens: x y
    rel: x^5
    g: 6
    k: 2 2 2
    sector 1: x, y
    sector 2: x, y
    sector 3: x, y
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from nielsenkit.errors import DomainError
from nielsenkit.moves import GeneratingTuple
from nielsenkit.oracle import (
    DEFAULT_CAP,
    Distinction,
    DistinguishResult,
    FiniteQuotient,
    distinguish_via_quotients,
)
from nielsenkit.presentation import (
    Presentation,
    SeifertInvariants,
    VerticalChoice,
    format_presentation,
    fuchsian_quotient,
    parse_presentation,
    vertical_system,
)
from nielsenkit.words import identity


@dataclass(frozen=True)
class HeegaardData:
    group: Presentation
    h1_tuple: GeneratingTuple
    genus: int

    def __post_init__(self):
        if self.h1_tuple.arity != self.genus:
            raise DomainError(f"tuple arity {self.h1_tuple.arity} != genus {self.genus}")
        if self.h1_tuple.rank != self.group.rank:
            raise DomainError("tuple rank does not match the group's generator count")


@dataclass(frozen=True)
class TrisectionData:
    group: Presentation
    sectors: tuple[GeneratingTuple, GeneratingTuple, GeneratingTuple]
    g: int
    k: tuple[int, int, int]

    def __post_init__(self):
        sectors, k = tuple(self.sectors), tuple(self.k)
        object.__setattr__(self, "sectors", sectors)
        object.__setattr__(self, "k", k)
        if len(sectors) != 3 or len(k) != 3:
            raise DomainError("a trisection has exactly three sectors")
        for i, (t, ki) in enumerate(zip(sectors, k), start=1):
            if t.arity != ki:
                raise DomainError(f"sector {i} has arity {t.arity} but k_{i} = {ki}")
            if t.rank != self.group.rank:
                raise DomainError(f"sector {i} rank does not match the group")

    @property
    def balanced(self) -> bool:
        return self.k[0] == self.k[1] == self.k[2]


def heegaard_from_vertical(
    inv: SeifertInvariants,
    choice: VerticalChoice,
    exponents: Mapping[int, int] | None = None,
) -> HeegaardData:
    """H1 side of a vertical splitting, in the center-killed quotient group."""
    t = vertical_system(inv, choice, exponents)
    return HeegaardData(fuchsian_quotient(inv), t, 2 * inv.g + inv.r - 1)


def spin(h: HeegaardData) -> TrisectionData:
    """All three sectors of the spun trisection carry the H1 tuple unchanged."""
    t = h.h1_tuple
    return TrisectionData(h.group, (t, t, t), 3 * h.genus, (h.genus,) * 3)


def _check_sector(sector: int):
    if sector not in (1, 2, 3):
        raise DomainError(f"sector must be 1, 2 or 3, got {sector}")


def unbalanced_stabilize(t: TrisectionData, sector: int) -> TrisectionData:
    _check_sector(sector)
    i = sector - 1
    old = t.sectors[i]
    grown = GeneratingTuple(old.words + (identity(old.rank),), old.rank)
    sectors = list(t.sectors)
    sectors[i] = grown
    k = list(t.k)
    k[i] += 1
    return TrisectionData(t.group, tuple(sectors), t.g + 1, tuple(k))


def balanced_stabilize(t: TrisectionData) -> TrisectionData:
    for sector in (1, 2, 3):
        t = unbalanced_stabilize(t, sector)
    return t


class Mode(enum.Enum):
    LABELED = "Labeled"
    UNLABELED = "Unlabeled"


class Outcome(enum.Enum):
    NOT_ISOTOPIC = "NotIsotopic"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Obstruction:
    sector: int  # sector of the first trisection
    other: int  # matched sector of the second trisection
    detail: DistinguishResult


@dataclass
class CompareResult:
    outcome: Outcome
    mode: Mode
    # Labeled: the certifying pair.  Unlabeled: one per compatible sector permutation.
    obstructions: list[tuple[tuple[int, int, int], Obstruction]] = field(default_factory=list)


def compare_trisections(
    t1: TrisectionData,
    t2: TrisectionData,
    quotients: Sequence[FiniteQuotient],
    cap: int = DEFAULT_CAP,
    mode: Mode = Mode.LABELED,
    workers: int = 1,
) -> CompareResult:
    if t1.group != t2.group:
        raise DomainError("trisections are presented over different groups")
    cache: dict[tuple[int, int], DistinguishResult] = {}

    def pair(i: int, j: int) -> DistinguishResult:
        if (i, j) not in cache:
            cache[(i, j)] = distinguish_via_quotients(
                t1.group, t1.sectors[i], t2.sectors[j], quotients, cap, workers
            )
        return cache[(i, j)]

    def obstruct(sigma) -> Obstruction | None:
        for i in range(3):
            res = pair(i, sigma[i])
            if res.verdict is Distinction.DISTINCT:
                return Obstruction(i + 1, sigma[i] + 1, res)
        return None

    if mode is Mode.LABELED:
        if t1.k != t2.k:
            raise DomainError(f"sector genera differ: {t1.k} vs {t2.k}")
        ob = obstruct((0, 1, 2))
        if ob is None:
            return CompareResult(Outcome.INCONCLUSIVE, mode)
        return CompareResult(Outcome.NOT_ISOTOPIC, mode, [((1, 2, 3), ob)])

    perms = [s for s in itertools.permutations(range(3))
             if all(t1.k[i] == t2.k[s[i]] for i in range(3))]
    if not perms:
        raise DomainError(f"no sector permutation matches genera {t1.k} and {t2.k}")
    found = []
    for sigma in perms:
        ob = obstruct(sigma)
        if ob is None:
            return CompareResult(Outcome.INCONCLUSIVE, mode)
        found.append((tuple(s + 1 for s in sigma), ob))
    return CompareResult(Outcome.NOT_ISOTOPIC, mode, found)


@dataclass
class RobustnessReport:
    untouched: int
    sequence: list[int]
    verdict: Distinction
    detail: DistinguishResult
    untouched_unchanged: bool
    before: tuple[TrisectionData, TrisectionData]
    after: tuple[TrisectionData, TrisectionData]


def stabilization_sequence(sectors: Sequence[int], length: int, seed: int) -> list[int]:
    pool = sorted(set(sectors))
    if not pool:
        return []
    rng = random.Random(seed)
    return [pool[rng.randrange(len(pool))] for _ in range(length)]


def stabilization_robustness(
    t1: TrisectionData,
    t2: TrisectionData,
    stab_sectors: Sequence[int],
    sequence_len: int,
    seed: int,
    quotients: Sequence[FiniteQuotient],
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> RobustnessReport:
    """Stabilize both trisections in ``stab_sectors`` only, then compare an untouched sector."""
    chosen = set(stab_sectors)
    for s in chosen:
        _check_sector(s)
    if chosen == {1, 2, 3}:
        raise DomainError("stabilizing every sector leaves no untouched sector")
    if sequence_len < 0:
        raise DomainError("sequence length must be non-negative")
    if t1.group != t2.group:
        raise DomainError("trisections are presented over different groups")
    m = min({1, 2, 3} - chosen)
    seq = stabilization_sequence(sorted(chosen), sequence_len, seed)
    a, b = t1, t2
    for s in seq:
        a = unbalanced_stabilize(a, s)
        b = unbalanced_stabilize(b, s)
    unchanged = (
        a.sectors[m - 1].words == t1.sectors[m - 1].words
        and b.sectors[m - 1].words == t2.sectors[m - 1].words
    )
    detail = distinguish_via_quotients(
        a.group, a.sectors[m - 1], b.sectors[m - 1], quotients, cap, workers
    )
    return RobustnessReport(m, seq, detail.verdict, detail, unchanged, (t1, t2), (a, b))


# -- text formats --------------------------------------------------------------


def _split_header(text: str, header: str) -> list[str]:
    lines = [ln.split("#", 1)[0].rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    if not lines or lines[0].strip() != header:
        raise DomainError(f"expected a {header!r} header line")
    return [ln.strip() for ln in lines[1:]]


def _tuple_from_text(p: Presentation, text: str) -> GeneratingTuple:
    text = text.strip()
    parts = [] if not text else text.split(",")
    return GeneratingTuple(tuple(p.word(x) for x in parts), p.rank)


def _tuple_text(p: Presentation, t: GeneratingTuple) -> str:
    return ", ".join(p.format(w) for w in t.words)


def format_heegaard(h: HeegaardData) -> str:
    return (
        "heegaard v1\n"
        + format_presentation(h.group)
        + f"genus: {h.genus}\n"
        + f"tuple: {_tuple_text(h.group, h.h1_tuple)}\n"
    )


def parse_heegaard(text: str) -> HeegaardData:
    body = _split_header(text, "heegaard v1")
    pres = [ln for ln in body if ln.startswith(("gens:", "rel:"))]
    rest = [ln for ln in body if not ln.startswith(("gens:", "rel:"))]
    p = parse_presentation("\n".join(pres))
    fields = {}
    for ln in rest:
        key, sep, value = ln.partition(":")
        if not sep or key in fields or key not in ("genus", "tuple"):
            raise DomainError(f"bad heegaard line {ln!r}")
        fields[key] = value
    if "tuple" not in fields:
        raise DomainError("heegaard data has no tuple line")
    t = _tuple_from_text(p, fields["tuple"])
    try:
        genus = int(fields["genus"]) if "genus" in fields else t.arity
    except ValueError:
        raise DomainError("bad genus line") from None
    return HeegaardData(p, t, genus)


def format_trisection(t: TrisectionData) -> str:
    lines = ["trisection v1", format_presentation(t.group).rstrip("\n")]
    lines.append(f"g: {t.g}")
    lines.append("k: " + " ".join(map(str, t.k)))
    for i, s in enumerate(t.sectors, start=1):
        lines.append(f"sector {i}: {_tuple_text(t.group, s)}")
    return "\n".join(lines) + "\n"


def parse_trisection(text: str) -> TrisectionData:
    body = _split_header(text, "trisection v1")
    pres = [ln for ln in body if ln.startswith(("gens:", "rel:"))]
    rest = [ln for ln in body if not ln.startswith(("gens:", "rel:"))]
    p = parse_presentation("\n".join(pres))
    g = k = None
    sectors: dict[int, GeneratingTuple] = {}
    for ln in rest:
        key, sep, value = ln.partition(":")
        if not sep:
            raise DomainError(f"bad trisection line {ln!r}")
        try:
            if key == "g":
                g = int(value)
            elif key == "k":
                k = tuple(int(x) for x in value.split())
            elif key.startswith("sector "):
                idx = int(key.split()[1])
                _check_sector(idx)
                sectors[idx] = _tuple_from_text(p, value)
            else:
                raise DomainError(f"bad trisection line {ln!r}")
        except ValueError:
            raise DomainError(f"bad trisection line {ln!r}") from None
    if g is None or k is None or sorted(sectors) != [1, 2, 3]:
        raise DomainError("trisection needs g, k and three sectors")
    return TrisectionData(p, (sectors[1], sectors[2], sectors[3]), g, k)


__all__ = [
    "CompareResult",
    "HeegaardData",
    "Mode",
    "Obstruction",
    "Outcome",
    "RobustnessReport",
    "TrisectionData",
    "balanced_stabilize",
    "compare_trisections",
    "format_heegaard",
    "format_trisection",
    "heegaard_from_vertical",
    "parse_heegaard",
    "parse_trisection",
    "spin",
    "stabilization_robustness",
    "stabilization_sequence",
    "unbalanced_stabilize",
]
