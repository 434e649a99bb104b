"""Finite quotients and the Nielsen-orbit distinguishing engine.

If two generating tuples are Nielsen equivalent, so are their images in any
quotient.  Exhausting the orbit of one image without meeting the other is
therefore a certificate that the original tuples are inequivalent.  Nothing
here ever claims equivalence of the preimages.

Quotient file format::

    degree: 10
    image x: (0 1 2 3 4)
    image y: (5 6 7 8 9)
"""

from __future__ import annotations

import enum
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from nielsenkit import library, perm
from nielsenkit.errors import BudgetExceeded, DomainError, InvalidQuotient
from nielsenkit.moves import (
    GeneratingTuple,
    Invert,
    Move,
    RightMultiply,
    Swap,
    invert_sequence,
    permute_entries,
)
from nielsenkit.orbit import TableSpace, make_side, make_space, meeting_points
from nielsenkit.presentation import Presentation, failing_relator
from nielsenkit.words import Word

DEFAULT_CAP = 2_000_000
DEFAULT_BUDGET = 1_000_000

TupleImage = tuple[perm.Permutation, ...]


@dataclass(frozen=True)
class FiniteQuotient:
    """A homomorphism from a presentation onto a permutation group."""

    presentation: Presentation
    degree: int
    generator_images: tuple[perm.Permutation, ...]
    name: str = "quotient"

    def __post_init__(self):
        images = tuple(perm.check_perm(p) for p in self.generator_images)
        object.__setattr__(self, "generator_images", images)
        for p in images:
            if len(p) != self.degree:
                raise DomainError(f"image of degree {len(p)} in a degree {self.degree} quotient")
        bad = failing_relator(self.presentation, images)
        if bad is not None:
            rel = self.presentation.format(bad)
            raise InvalidQuotient(
                f"quotient {self.name!r} does not kill relator {rel!r}", relator=rel
            )
        inverses = tuple(perm.inverse(p) for p in images)
        object.__setattr__(self, "_inverses", inverses)

    @classmethod
    def from_builtin(cls, name: str, p: Presentation) -> FiniteQuotient:
        t = library.target(name)
        return cls(p, t.degree, library.images_for(t, p.rank), t.name)

    @property
    def generators(self) -> tuple[perm.Permutation, ...]:
        return self.generator_images


def parse_quotient(text: str, p: Presentation, name: str = "quotient") -> FiniteQuotient:
    degree = None
    images: dict[str, perm.Permutation] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise DomainError(f"bad quotient line {raw!r}")
        key = key.strip()
        if key == "degree":
            try:
                degree = int(value)
            except ValueError:
                raise DomainError(f"bad degree line {raw!r}") from None
        elif key.startswith("image "):
            if degree is None:
                raise DomainError("degree must precede images")
            gen = key[len("image ") :].strip()
            if gen not in p.generator_names:
                raise DomainError(f"image for unknown generator {gen!r}")
            if gen in images:
                raise DomainError(f"duplicate image for {gen!r}")
            images[gen] = perm.parse_cycles(value, degree)
        else:
            raise DomainError(f"bad quotient line {raw!r}")
    if degree is None:
        raise DomainError("quotient has no degree line")
    missing = [g for g in p.generator_names if g not in images]
    if missing:
        raise DomainError(f"no image for generators {missing}")
    return FiniteQuotient(p, degree, tuple(images[g] for g in p.generator_names), name)


def format_quotient(q: FiniteQuotient) -> str:
    lines = [f"degree: {q.degree}"]
    for g, img in zip(q.presentation.generator_names, q.generator_images):
        lines.append(f"image {g}: {perm.format_cycles(img)}")
    return "\n".join(lines) + "\n"


def evaluate(w: Word, q: FiniteQuotient) -> perm.Permutation:
    if w.rank != q.presentation.rank:
        raise DomainError(f"word of rank {w.rank} in a quotient of {q.presentation.rank} generators")
    images, inverses = q.generator_images, q._inverses
    acc = perm.identity(q.degree)
    for a in w.letters:
        acc = perm.compose(acc, images[a - 1] if a > 0 else inverses[-a - 1])
    return acc


def image_of(t: GeneratingTuple, q: FiniteQuotient) -> TupleImage:
    return tuple(evaluate(w, q) for w in t.words)


def apply_move_image(image: TupleImage, m: Move) -> TupleImage:
    n = len(image)
    if isinstance(m, (Swap, RightMultiply)) and not (0 <= m.i < n and 0 <= m.j < n):
        raise DomainError(f"move {m} out of range for arity {n}")
    if isinstance(m, Invert) and not 0 <= m.i < n:
        raise DomainError(f"move {m} out of range for arity {n}")
    return permute_entries(image, m, perm.inverse, perm.compose)


def apply_moves_image(image: TupleImage, ms: Sequence[Move]) -> TupleImage:
    for m in ms:
        image = apply_move_image(image, m)
    return image


def _degree(t: Sequence[perm.Permutation], default: int | None = None) -> int:
    degrees = {len(p) for p in t}
    if len(degrees) > 1:
        raise DomainError(f"tuple entries have mixed degrees {sorted(degrees)}")
    if degrees:
        return degrees.pop()
    if default is None:
        return 0
    return default


@dataclass
class OrbitResult:
    canonical: TupleImage | None
    size: int
    truncated: bool
    witness_log: list[Move] | None = None
    members: list[TupleImage] | None = field(default=None, repr=False)


def nielsen_orbit(
    t: Sequence[perm.Permutation],
    cap: int = DEFAULT_CAP,
    keep_members: bool = False,
    workers: int = 1,
    degree: int | None = None,
) -> OrbitResult:
    """Enumerate the Nielsen orbit of a permutation tuple, up to ``cap`` states.

    When the orbit closes, ``canonical`` is its lexicographically least
    member (entries compared in one-line form, position by position) and
    ``witness_log`` moves ``t`` onto it.
    """
    if cap < 1:
        raise DomainError("cap must be >= 1")
    t = tuple(perm.check_perm(p) for p in t)
    d = _degree(t, degree)
    space = make_space(t, d, workers)
    side = make_side(space, t, cap)
    while not side.done:
        side.step()
    if side.truncated:
        return OrbitResult(None, side.size, True)
    best = side.minimum()
    log = [space.moves[k] for k in side.path(best)]
    members = None
    if keep_members:
        if isinstance(space, TableSpace):
            members = space.decode_many(side.all_codes())
        else:
            members = [space.decode(s) for s in side.all_states()]
    return OrbitResult(space.decode(best), side.size, False, log, members)


class Answer(enum.Enum):
    YES = "Yes"
    NO = "No"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class SameOrbitResult:
    answer: Answer
    witness: list[Move] | None = None
    # Which root had its whole orbit enumerated for a No: 1 or 2.
    exhausted: int | None = None
    exhausted_size: int | None = None
    visited: tuple[int, int] = (0, 0)


def same_orbit(
    t1: Sequence[perm.Permutation],
    t2: Sequence[perm.Permutation],
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> SameOrbitResult:
    """Decide whether ``t2`` lies in the Nielsen orbit of ``t1``.

    Both orbits are grown alternately (smaller frontier first).  ``YES``
    carries a witness move log taking ``t1`` to ``t2``; ``NO`` is only
    returned once one of the two orbits has been enumerated completely.
    """
    if cap < 1:
        raise DomainError("cap must be >= 1")
    t1 = tuple(perm.check_perm(p) for p in t1)
    t2 = tuple(perm.check_perm(p) for p in t2)
    if len(t1) != len(t2):
        raise DomainError(f"arity mismatch: {len(t1)} vs {len(t2)}")
    d1, d2 = _degree(t1), _degree(t2)
    if t1 and d1 != d2:
        raise DomainError(f"degree mismatch: {d1} vs {d2}")
    n = len(t1)
    if t1 == t2:
        return SameOrbitResult(Answer.YES, [], visited=(1, 1))
    space = make_space(t1, d1, workers)
    a = make_side(space, t1, cap)
    if isinstance(space, TableSpace) and not space.contains(t2):
        # t2 leaves the subgroup generated by t1, so only a full orbit decides.
        while not a.done:
            a.step()
        if a.closed:
            return SameOrbitResult(Answer.NO, None, 1, a.size, (a.size, 0))
        return SameOrbitResult(Answer.INCONCLUSIVE, visited=(a.size, 0))
    b = make_side(space, t2, cap)
    sides = (a, b)
    while True:
        live = [s for s in sides if not s.done]
        if not live:
            return SameOrbitResult(Answer.INCONCLUSIVE, visited=(a.size, b.size))
        x = min(live, key=lambda s: (len(s.frontier), s is b))
        y = b if x is a else a
        new = x.step()
        meet = meeting_points(space, new, y)
        if meet:
            m = meet[0]
            to_m = [space.moves[k] for k in a.path(m)]
            from_m = invert_sequence([space.moves[k] for k in b.path(m)], n)
            return SameOrbitResult(Answer.YES, to_m + from_m, visited=(a.size, b.size))
        if x.closed:
            which = 1 if x is a else 2
            return SameOrbitResult(Answer.NO, None, which, x.size, (a.size, b.size))


def generated_subgroup_order(t: Sequence[perm.Permutation]) -> int:
    if not t:
        raise DomainError("empty tuple")
    t = tuple(perm.check_perm(p) for p in t)
    return len(perm.dimino(list(t), _degree(t)))


# -- brute-force ground truth ------------------------------------------------


def _closure(gens: Sequence[perm.Permutation], degree: int) -> list[perm.Permutation]:
    # Plain BFS closure; deliberately not shared with the search engine.
    e = perm.identity(degree)
    seen = {e}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = perm.compose(x, g)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


def _carrier(group) -> tuple[list[perm.Permutation], int]:
    if isinstance(group, FiniteQuotient):
        return list(group.generator_images), group.degree
    if isinstance(group, library.Target):
        return list(group.generators), group.degree
    if isinstance(group, str):
        t = library.target(group)
        return list(t.generators), t.degree
    gens = [perm.check_perm(p) for p in group]
    return gens, _degree(gens)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


@dataclass
class Census:
    elements: list[perm.Permutation]
    arity: int
    count: int
    classes: list[list[int]]

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def class_sizes(self) -> list[int]:
        return sorted((len(c) for c in self.classes), reverse=True)

    def decode(self, code: int) -> TupleImage:
        G, out = len(self.elements), []
        for _ in range(self.arity):
            code, r = divmod(code, G)
            out.append(self.elements[r])
        return tuple(reversed(out))

    def partition(self) -> set[frozenset[TupleImage]]:
        return {frozenset(self.decode(c) for c in cls) for cls in self.classes}

    def tuples(self) -> list[TupleImage]:
        return [self.decode(c) for cls in self.classes for c in cls]


def enumerate_generating_tuples(group, n: int, budget: int = DEFAULT_BUDGET) -> Census:
    """All generating ``n``-tuples of a finite group, split into Nielsen classes.

    Classes are the connected components, found by union-find, of the graph
    whose edges are the four fixed-position moves.  Those moves generate the
    same transformation group as the generalized ones, so the components
    are the Nielsen classes.
    """
    if n < 0:
        raise DomainError("arity must be non-negative")
    gens, degree = _carrier(group)
    elements = _closure(gens, degree)
    G = len(elements)
    total = G**n
    if total > budget:
        raise BudgetExceeded(f"|G|^n = {G}^{n} = {total} exceeds budget {budget}")
    index = {p: i for i, p in enumerate(elements)}
    inv = np.array([index[perm.inverse(p)] for p in elements], dtype=np.int64)
    mul = None
    if n >= 2:
        mul = np.array(
            [[index[perm.compose(p, q)] for q in elements] for p in elements], dtype=np.int64
        )

    codes = np.arange(total, dtype=np.int64)
    weights = np.array([G ** (n - 1 - k) for k in range(n)], dtype=np.int64)
    digits = (codes[:, None] // weights) % G if n else np.zeros((total, 0), dtype=np.int64)

    generating = _generating_mask(digits, elements, index, G)
    if G == 1:
        generating[:] = True

    def encode(dg):
        return dg @ weights if n else np.zeros(len(dg), dtype=np.int64)

    neighbours = []
    if n >= 1:
        d = digits.copy()
        d[:, 0] = inv[d[:, 0]]
        neighbours.append(encode(d))
    if n >= 2:
        d = digits.copy()
        d[:, [0, 1]] = d[:, [1, 0]]
        neighbours.append(encode(d))
        neighbours.append(encode(np.roll(digits, -1, axis=1)))
        d = digits.copy()
        d[:, 0] = mul[d[:, 0], d[:, 1]]
        neighbours.append(encode(d))

    gen_codes = np.flatnonzero(generating)
    local = {int(c): k for k, c in enumerate(gen_codes)}
    uf = _UnionFind(len(gen_codes))
    for nb in neighbours:
        targets = nb[gen_codes]
        if not generating[targets].all():
            raise AssertionError("a move left the set of generating tuples")
        for k, c in enumerate(targets.tolist()):
            uf.union(k, local[c])
    groups: dict[int, list[int]] = defaultdict(list)
    for k, c in enumerate(gen_codes.tolist()):
        groups[uf.find(k)].append(c)
    classes = sorted(groups.values(), key=lambda c: c[0])
    return Census(elements, n, len(gen_codes), classes)


def _subgroup_size(ids: Sequence[int], elements) -> int:
    degree = len(elements[0])
    return len(_closure([elements[i] for i in ids], degree))


def _generating_mask(digits: np.ndarray, elements, index, G: int) -> np.ndarray:
    total = len(digits)
    if digits.shape[1] == 0:
        return np.full(total, G == 1)
    if G <= 62:
        masks = np.zeros(total, dtype=np.int64)
        for k in range(digits.shape[1]):
            masks |= np.left_shift(np.int64(1), digits[:, k])
        uniq, inverse = np.unique(masks, return_inverse=True)
        ok = np.array(
            [
                _subgroup_size([i for i in range(G) if (int(m) >> i) & 1], elements) == G
                for m in uniq
            ]
        )
        return ok[inverse.ravel()]
    cache: dict[frozenset[int], bool] = {}
    out = np.zeros(total, dtype=bool)
    for row, ids in enumerate(digits.tolist()):
        key = frozenset(ids)
        if key not in cache:
            cache[key] = _subgroup_size(sorted(key), elements) == G
        out[row] = cache[key]
    return out


def classes_by_orbit(
    tuples: Sequence[TupleImage], cap: int = DEFAULT_CAP, workers: int = 1
) -> dict[TupleImage, frozenset[TupleImage]]:
    """Group tuples by the canonical form of their Nielsen orbit."""
    assigned: dict[TupleImage, TupleImage] = {}
    classes: dict[TupleImage, frozenset[TupleImage]] = {}
    for t in tuples:
        if t in assigned:
            continue
        res = nielsen_orbit(t, cap, keep_members=True, workers=workers)
        if res.truncated:
            raise BudgetExceeded(f"orbit exceeded cap {cap}")
        members = frozenset(res.members)
        classes[res.canonical] = members
        for m in members:
            assigned[m] = res.canonical
    return classes


# -- distinguishing ------------------------------------------------------------


class Distinction(enum.Enum):
    DISTINCT = "Distinct"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class DistinguishResult:
    verdict: Distinction
    quotient: str | None = None
    exhausted: int | None = None
    exhausted_size: int | None = None
    checked: list[tuple[str, str]] = field(default_factory=list)


def distinguish_via_quotients(
    p: Presentation,
    ta: GeneratingTuple,
    tb: GeneratingTuple,
    quotients: Sequence[FiniteQuotient],
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> DistinguishResult:
    """Certify that two tuples are not Nielsen equivalent, if some quotient shows it.

    ``checked`` records the per-quotient ``same_orbit`` answers in order.
    """
    if ta.arity != tb.arity:
        raise DomainError(f"arity mismatch: {ta.arity} vs {tb.arity}")
    for t in (ta, tb):
        if t.rank != p.rank:
            raise DomainError(f"tuple of rank {t.rank} for a presentation of rank {p.rank}")
    for q in quotients:
        if q.presentation != p:
            raise DomainError(f"quotient {q.name!r} belongs to a different presentation")
    result = DistinguishResult(Distinction.INCONCLUSIVE)
    for q in quotients:
        res = same_orbit(image_of(ta, q), image_of(tb, q), cap, workers)
        result.checked.append((q.name, res.answer.value))
        if res.answer is Answer.NO:
            result.verdict = Distinction.DISTINCT
            result.quotient = q.name
            result.exhausted = res.exhausted
            result.exhausted_size = res.exhausted_size
            return result
    return result


def bundled_quotients(p: Presentation, names: Sequence[str] = library.BUNDLED) -> list[FiniteQuotient]:
    """Built-in targets that define homomorphisms of ``p``; others are skipped."""
    out = []
    for name in names:
        try:
            out.append(FiniteQuotient.from_builtin(name, p))
        except InvalidQuotient:
            continue
    return out


__all__ = [
    "Answer",
    "Census",
    "DEFAULT_BUDGET",
    "DEFAULT_CAP",
    "Distinction",
    "DistinguishResult",
    "FiniteQuotient",
    "OrbitResult",
    "SameOrbitResult",
    "apply_move_image",
    "apply_moves_image",
    "bundled_quotients",
    "classes_by_orbit",
    "distinguish_via_quotients",
    "enumerate_generating_tuples",
    "evaluate",
    "format_quotient",
    "generated_subgroup_order",
    "image_of",
    "nielsen_orbit",
    "parse_quotient",
    "same_orbit",
]
