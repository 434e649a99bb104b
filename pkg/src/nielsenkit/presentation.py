"""Finitely presented groups and the Seifert fibered space builders.

Presentation file format::

    gens: s1 s2 s3
    rel: s1^5
    rel: s1 s2 s3
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from nielsenkit import perm
from nielsenkit.errors import DomainError
from nielsenkit.moves import GeneratingTuple
from nielsenkit.words import (
    NAME_RE,
    Word,
    commutator,
    cyclic_reduce,
    exponent_sums,
    format_word,
    generator,
    identity,
    multiply,
    parse_word,
    power,
    substitute,
)

# Sign convention for the Euler class in the fiber-product relator.
EULER_SIGN = -1


@dataclass(frozen=True)
class Presentation:
    generator_names: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        names = tuple(self.generator_names)
        object.__setattr__(self, "generator_names", names)
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate generator names in {names}")
        for name in names:
            if not NAME_RE.match(name):
                raise DomainError(f"bad generator name {name!r}")
        rels = []
        for r in self.relators:
            if r.rank != len(names):
                raise DomainError(f"relator of rank {r.rank} over {len(names)} generators")
            rels.append(cyclic_reduce(r))
        object.__setattr__(self, "relators", tuple(rels))

    @property
    def rank(self) -> int:
        return len(self.generator_names)

    def gen(self, name: str) -> Word:
        try:
            return generator(self.generator_names.index(name), self.rank)
        except ValueError:
            raise DomainError(f"unknown generator {name!r}") from None

    def word(self, text: str) -> Word:
        return parse_word(text, self.generator_names)

    def format(self, w: Word) -> str:
        return format_word(w, self.generator_names)

    def tuple_of(self, texts: Sequence[str]) -> GeneratingTuple:
        return GeneratingTuple(tuple(self.word(t) for t in texts), self.rank)


def parse_presentation(text: str) -> Presentation:
    names: list[str] | None = None
    rel_texts: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition(":")
        key = key.strip()
        if key == "gens":
            if names is not None:
                raise DomainError("duplicate gens line")
            names = value.split()
        elif key == "rel":
            rel_texts.append(value)
        else:
            raise DomainError(f"unexpected presentation line {raw!r}")
    if names is None:
        raise DomainError("presentation has no gens line")
    return Presentation(tuple(names), tuple(parse_word(r, names) for r in rel_texts))


def format_presentation(p: Presentation) -> str:
    lines = ["gens: " + " ".join(p.generator_names)]
    lines += ["rel: " + p.format(r) for r in p.relators]
    return "\n".join(lines) + "\n"


def kill_generators(p: Presentation, names: Sequence[str]) -> Presentation:
    """Quotient by the normal closure of the named generators.

    Relators that become trivial are dropped, as are repeats.
    """
    dead = set(names)
    for name in dead:
        p.gen(name)
    keep = [n for n in p.generator_names if n not in dead]
    rank = len(keep)
    images = [
        identity(rank) if n in dead else generator(keep.index(n), rank)
        for n in p.generator_names
    ]
    rels: list[Word] = []
    for r in p.relators:
        w = cyclic_reduce(substitute(r, images, rank))
        if w.letters and w not in rels:
            rels.append(w)
    return Presentation(tuple(keep), tuple(rels))


def abelianization_matrix(p: Presentation) -> list[list[int]]:
    """Exponent-sum rows, one per relator."""
    return [exponent_sums(r) for r in p.relators]


# -- Seifert fibered spaces -------------------------------------------------


@dataclass(frozen=True)
class SeifertInvariants:
    g: int
    e: int
    fibers: tuple[tuple[int, int], ...]

    def __post_init__(self):
        fibers = tuple((int(a), int(b)) for a, b in self.fibers)
        object.__setattr__(self, "fibers", fibers)
        if self.g < 0:
            raise DomainError(f"base genus must be >= 0, got {self.g}")
        if not fibers:
            raise DomainError("at least one exceptional fiber is required")
        for a, b in fibers:
            if a < 2:
                raise DomainError(f"fiber multiplicity {a} < 2")
            if math.gcd(a, b) != 1:
                raise DomainError(f"fiber ({a},{b}) is not coprime")

    @property
    def r(self) -> int:
        return len(self.fibers)

    @property
    def alphas(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.fibers)

    @property
    def betas(self) -> tuple[int, ...]:
        return tuple(b for _, b in self.fibers)

    def format(self) -> str:
        fibers = ",".join(f"{a}/{b}" for a, b in self.fibers)
        return f"g={self.g},e={self.e},fibers={fibers}"


def parse_sfs(text: str) -> SeifertInvariants:
    """Parse ``g=0,e=-1,fibers=5/2,7/2,9/2``."""
    values: dict[str, list[str]] = {}
    key = None
    for token in text.replace(" ", "").split(","):
        if "=" in token:
            key, _, token = token.partition("=")
            if key not in ("g", "e", "fibers") or key in values:
                raise DomainError(f"bad or repeated field {key!r} in {text!r}")
            values[key] = []
        if key is None:
            raise DomainError(f"bad Seifert invariants {text!r}")
        values[key].append(token)
    try:
        g = int(values.get("g", ["0"])[0])
        e = int(values.get("e", ["0"])[0])
        fibers = []
        for f in values.get("fibers", []):
            a, b = f.split("/")
            fibers.append((int(a), int(b)))
    except ValueError as exc:
        raise DomainError(f"bad Seifert invariants {text!r}") from exc
    if len(values.get("g", [])) > 1 or len(values.get("e", [])) > 1:
        raise DomainError(f"bad Seifert invariants {text!r}")
    return SeifertInvariants(g, e, tuple(fibers))


def _surface_names(inv: SeifertInvariants) -> list[str]:
    names = [f"s{i + 1}" for i in range(inv.r)]
    for j in range(inv.g):
        names += [f"a{j + 1}", f"b{j + 1}"]
    return names


def _fiber_product(gens: list[Word], inv: SeifertInvariants, rank: int) -> Word:
    w = identity(rank)
    for i in range(inv.r):
        w = multiply(w, gens[i])
    for j in range(inv.g):
        a, b = gens[inv.r + 2 * j], gens[inv.r + 2 * j + 1]
        w = multiply(w, commutator(a, b))
    return w


def sfs_group(inv: SeifertInvariants) -> Presentation:
    """Standard presentation of the fundamental group, central fiber ``h`` last."""
    names = _surface_names(inv) + ["h"]
    rank = len(names)
    gens = [generator(i, rank) for i in range(rank)]
    h = gens[-1]
    rels = [commutator(x, h) for x in gens[:-1]]
    for i, (a, b) in enumerate(inv.fibers):
        rels.append(multiply(power(gens[i], a), power(h, b)))
    rels.append(multiply(_fiber_product(gens, inv, rank), power(h, EULER_SIGN * inv.e)))
    return Presentation(tuple(names), tuple(rels))


def fuchsian_quotient(inv: SeifertInvariants) -> Presentation:
    """The group modulo its center: ``<s_i, a_j, b_j | s_i^alpha_i, s_1...s_r prod [a_j, b_j]>``."""
    names = _surface_names(inv)
    rank = len(names)
    gens = [generator(i, rank) for i in range(rank)]
    rels = [power(gens[i], a) for i, a in enumerate(inv.alphas)]
    rels.append(_fiber_product(gens, inv, rank))
    return Presentation(tuple(names), tuple(rels))


# -- vertical splittings ----------------------------------------------------


@dataclass(frozen=True)
class VerticalChoice:
    """A nonempty proper subset of ``{1..r}`` plus the excluded loop index."""

    subset: frozenset[int]
    excluded_q: int

    def __post_init__(self):
        object.__setattr__(self, "subset", frozenset(self.subset))

    @classmethod
    def of(cls, subset, r: int, excluded_q: int | None = None) -> VerticalChoice:
        subset = frozenset(subset)
        if excluded_q is None:
            rest = sorted(set(range(1, r + 1)) - subset)
            excluded_q = rest[0] if rest else 0
        choice = cls(subset, excluded_q)
        choice.validate(r)
        return choice

    def validate(self, r: int):
        universe = set(range(1, r + 1))
        if not self.subset or not self.subset < universe:
            raise DomainError(
                f"subset {sorted(self.subset)} is not a nonempty proper subset of 1..{r}"
            )
        if self.excluded_q not in universe - self.subset:
            raise DomainError(
                f"excluded_q {self.excluded_q} is not in the complement of {sorted(self.subset)}"
            )

    def complement(self, r: int) -> frozenset[int]:
        return frozenset(range(1, r + 1)) - self.subset


def enumerate_vertical_choices(r: int) -> list[frozenset[int]]:
    """One subset per ``{subset, complement}`` pair: the member containing 1."""
    if r < 2:
        raise DomainError(f"need r >= 2 exceptional fibers, got {r}")
    out = []
    for size in range(1, r):
        for rest in combinations(range(2, r + 1), size - 1):
            out.append(frozenset((1,) + rest))
    return out


def canonical_subset(subset, r: int) -> frozenset[int]:
    subset = frozenset(subset)
    return subset if 1 in subset else frozenset(range(1, r + 1)) - subset


def default_exponents(inv: SeifertInvariants, choice: VerticalChoice) -> dict[int, int]:
    return {i: inv.fibers[i - 1][1] for i in sorted(choice.subset)}


def vertical_system(
    inv: SeifertInvariants,
    choice: VerticalChoice,
    exponents: Mapping[int, int] | None = None,
) -> GeneratingTuple:
    """Generating tuple of the vertical splitting, as words in the Fuchsian quotient.

    Order: ``s_i^{e_i}`` for chosen ``i``, then ``s_m`` for the unchosen
    indices other than ``excluded_q``, then ``a_1, b_1, ..., a_g, b_g``.
    """
    choice.validate(inv.r)
    if exponents is None:
        exponents = default_exponents(inv, choice)
    p = fuchsian_quotient(inv)
    rank = p.rank
    words = []
    for i in sorted(choice.subset):
        if i not in exponents:
            raise DomainError(f"no exponent given for fiber {i}")
        k = exponents[i]
        alpha = inv.fibers[i - 1][0]
        if math.gcd(k, alpha) != 1:
            raise DomainError(f"exponent {k} not coprime to alpha_{i} = {alpha}")
        words.append(power(generator(i - 1, rank), k))
    for m in sorted(choice.complement(inv.r) - {choice.excluded_q}):
        words.append(generator(m - 1, rank))
    for j in range(2 * inv.g):
        words.append(generator(inv.r + j, rank))
    return GeneratingTuple(tuple(words), rank)


def check_lm_hypotheses(inv: SeifertInvariants) -> tuple[bool, list[str]]:
    """Hypotheses of the vertical-splitting classification theorem."""
    reasons = []
    if not ((inv.g > 0 and inv.r > 0) or inv.r >= 3):
        reasons.append(f"need g > 0 and r > 0, or r >= 3 (got g = {inv.g}, r = {inv.r})")
    for i, (a, b) in enumerate(inv.fibers, start=1):
        if b % a in (1 % a, (-1) % a):
            sign = "+1" if b % a == 1 % a else "-1"
            reasons.append(f"beta_{i} = {b} is congruent to {sign} mod alpha_{i} = {a}")
    alphas = inv.alphas
    for i, a in enumerate(alphas, start=1):
        if a % 2 == 0:
            reasons.append(f"alpha_{i} = {a} is even")
    for (i, a), (j, b) in combinations(enumerate(alphas, start=1), 2):
        if a == b:
            reasons.append(f"alpha_{i} = alpha_{j} = {a} are not distinct")
        elif math.gcd(a, b) != 1:
            reasons.append(f"alpha_{i} = {a} and alpha_{j} = {b} are not coprime")
    return not reasons, reasons


class Verdict(enum.Enum):
    EQUAL = "Equal"
    DISTINCT = "Distinct"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class PairVerdict:
    verdict: Verdict
    reason: str = field(default="")


def _as_subset(choice) -> frozenset[int]:
    return choice.subset if isinstance(choice, VerticalChoice) else frozenset(choice)


def classify_vertical_pair(inv: SeifertInvariants, choice_a, choice_b) -> PairVerdict:
    """Theorem-backed verdict on whether two vertical splittings share a Nielsen class."""
    r = inv.r
    a, b = _as_subset(choice_a), _as_subset(choice_b)
    universe = frozenset(range(1, r + 1))
    for s in (a, b):
        if not s or not s < universe:
            raise DomainError(f"subset {sorted(s)} is not a nonempty proper subset of 1..{r}")
    ok, reasons = check_lm_hypotheses(inv)
    if not ok:
        return PairVerdict(Verdict.UNKNOWN, "; ".join(reasons))
    if a == b:
        return PairVerdict(Verdict.EQUAL, "equal subsets")
    if a == universe - b:
        return PairVerdict(Verdict.EQUAL, "complementary subsets")
    return PairVerdict(Verdict.DISTINCT, "subsets neither equal nor complementary")


def failing_relator(p: Presentation, images: Sequence[perm.Permutation]) -> Word | None:
    """First relator not sent to the identity, or ``None``."""
    if len(images) != p.rank:
        raise DomainError(f"{len(images)} images for {p.rank} generators")
    degrees = {len(x) for x in images}
    if len(degrees) > 1:
        raise DomainError("images have mixed degrees")
    degree = degrees.pop() if degrees else 0
    inverses = [perm.inverse(x) for x in images]
    for r in p.relators:
        acc = perm.identity(degree)
        for a in r.letters:
            acc = perm.compose(acc, images[a - 1] if a > 0 else inverses[-a - 1])
        if not perm.is_identity(acc):
            return r
    return None


def validate_homomorphism(p: Presentation, images: Sequence[perm.Permutation]) -> bool:
    return failing_relator(p, images) is None


def free_presentation(rank: int, names: Sequence[str] | None = None) -> Presentation:
    if names is None:
        names = [f"x{i + 1}" for i in range(rank)]
    return Presentation(tuple(names), ())
