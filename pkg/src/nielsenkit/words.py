"""Words in a free group of finite rank.

A letter is a nonzero integer: ``+(i + 1)`` stands for the generator with
index ``i`` and ``-(i + 1)`` for its inverse.  A :class:`Word` is a freely
reduced tuple of letters together with the rank of the ambient free group,
so that arity mismatches are caught instead of silently widening the group.

Text syntax: whitespace separated tokens ``name`` or ``name^k``, e.g.
``a b^-1 a^2``.  The identity is written ``1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from nielsenkit.errors import DomainError

NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
_TOKEN_RE = re.compile(r"([a-z][a-z0-9_]*)(?:\^(-?\d+))?\Z")


def letter(index: int, sign: int = 1) -> int:
    if sign not in (1, -1):
        raise DomainError(f"letter sign must be +1 or -1, got {sign}")
    if index < 0:
        raise DomainError(f"negative generator index {index}")
    return sign * (index + 1)


def letter_index(a: int) -> int:
    return abs(a) - 1


def letter_sign(a: int) -> int:
    return 1 if a > 0 else -1


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the free group of rank ``rank``."""

    letters: tuple[int, ...]
    rank: int

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if self.rank < 0:
            raise DomainError(f"negative rank {self.rank}")
        prev = 0
        for a in letters:
            if a == 0 or abs(a) > self.rank:
                raise DomainError(f"letter {a} out of range for rank {self.rank}")
            if a == -prev:
                raise DomainError("word is not freely reduced")
            prev = a

    @classmethod
    def _trusted(cls, letters: tuple[int, ...], rank: int) -> Word:
        # Skips validation; callers guarantee reduced, in-range letters.
        w = object.__new__(cls)
        object.__setattr__(w, "letters", letters)
        object.__setattr__(w, "rank", rank)
        return w

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: Word) -> Word:
        return multiply(self, other)

    def __pow__(self, k: int) -> Word:
        return power(self, k)

    def __invert__(self) -> Word:
        return invert(self)

    def inverse(self) -> Word:
        return invert(self)

    def is_identity(self) -> bool:
        return not self.letters

    def pairs(self) -> list[tuple[int, int]]:
        """The letters as ``(generator index, sign)`` pairs."""
        return [(letter_index(a), letter_sign(a)) for a in self.letters]

    def __str__(self) -> str:
        return format_word(self)


def _check_letters(letters: Iterable[int], rank: int) -> list[int]:
    out = []
    for a in letters:
        a = int(a)
        if a == 0 or abs(a) > rank:
            raise DomainError(f"letter {a} out of range for rank {rank}")
        out.append(a)
    return out


def free_reduce(letters: Iterable[int], rank: int) -> Word:
    """Freely reduce a raw letter sequence with a single stack pass."""
    stack: list[int] = []
    for a in _check_letters(letters, rank):
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return Word._trusted(tuple(stack), rank)


def identity(rank: int) -> Word:
    return Word._trusted((), rank)


def generator(index: int, rank: int) -> Word:
    if not 0 <= index < rank:
        raise DomainError(f"generator index {index} out of range for rank {rank}")
    return Word._trusted((index + 1,), rank)


def basis(rank: int) -> tuple[Word, ...]:
    return tuple(generator(i, rank) for i in range(rank))


def multiply(u: Word, v: Word) -> Word:
    if u.rank != v.rank:
        raise DomainError(f"rank mismatch: {u.rank} vs {v.rank}")
    a, b = u.letters, v.letters
    # Cancellation only happens at the junction.
    k = 0
    n = min(len(a), len(b))
    while k < n and a[len(a) - 1 - k] == -b[k]:
        k += 1
    return Word._trusted(a[: len(a) - k] + b[k:], u.rank)


def invert(w: Word) -> Word:
    return Word._trusted(tuple(-a for a in reversed(w.letters)), w.rank)


def power(w: Word, k: int) -> Word:
    if k < 0:
        w, k = invert(w), -k
    out = identity(w.rank)
    for _ in range(k):
        out = multiply(out, w)
    return out


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u v u^-1 v^-1``."""
    return multiply(multiply(u, v), multiply(invert(u), invert(v)))


def cyclic_reduce(w: Word) -> Word:
    a = w.letters
    i, j = 0, len(a) - 1
    while i < j and a[i] == -a[j]:
        i += 1
        j -= 1
    return Word._trusted(a[i : j + 1], w.rank)


def substitute(w: Word, images: Sequence[Word], rank: int | None = None) -> Word:
    """Apply the endomorphism sending generator ``i`` to ``images[i]``.

    ``rank`` is the rank of the target free group; it is only needed when
    ``images`` is empty.
    """
    if len(images) != w.rank:
        raise DomainError(f"expected {w.rank} images, got {len(images)}")
    ranks = {im.rank for im in images}
    if len(ranks) > 1:
        raise DomainError(f"images have mixed ranks {sorted(ranks)}")
    target = ranks.pop() if ranks else (rank if rank is not None else 0)
    if rank is not None and rank != target:
        raise DomainError(f"images have rank {target}, expected {rank}")
    inverses: dict[int, Word] = {}
    stack: list[int] = []
    for a in w.letters:
        i = abs(a) - 1
        if a > 0:
            piece = images[i].letters
        else:
            if i not in inverses:
                inverses[i] = invert(images[i])
            piece = inverses[i].letters
        for b in piece:
            if stack and stack[-1] == -b:
                stack.pop()
            else:
                stack.append(b)
    return Word._trusted(tuple(stack), target)


def exponent_sums(w: Word) -> list[int]:
    sums = [0] * w.rank
    for a in w.letters:
        sums[abs(a) - 1] += 1 if a > 0 else -1
    return sums


def default_names(rank: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(rank))


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse ``a b^-1 a^2`` style text over the given generator names."""
    index = {name: i for i, name in enumerate(names)}
    rank = len(names)
    raw: list[int] = []
    for token in text.split():
        if token == "1":
            continue
        m = _TOKEN_RE.match(token)
        if m is None:
            raise DomainError(f"bad word token {token!r}")
        name, exp = m.group(1), m.group(2)
        if name not in index:
            raise DomainError(f"unknown generator {name!r}")
        k = int(exp) if exp is not None else 1
        a = index[name] + 1
        raw.extend([a if k > 0 else -a] * abs(k))
    return free_reduce(raw, rank)


def format_word(w: Word, names: Sequence[str] | None = None) -> str:
    if names is None:
        names = default_names(w.rank)
    if len(names) != w.rank:
        raise DomainError(f"{len(names)} names for a rank {w.rank} word")
    if not w.letters:
        return "1"
    tokens = []
    i = 0
    a = w.letters
    while i < len(a):
        j = i
        while j < len(a) and a[j] == a[i]:
            j += 1
        k = (j - i) * (1 if a[i] > 0 else -1)
        name = names[abs(a[i]) - 1]
        tokens.append(name if k == 1 else f"{name}^{k}")
        i = j
    return " ".join(tokens)
