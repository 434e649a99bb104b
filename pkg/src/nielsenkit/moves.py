"""Elementary Nielsen transformations on ordered tuples of words.

The primitive moves act on arbitrary positions:

* ``Swap(i, j)``           exchange entries ``i`` and ``j``
* ``Cycle()``              ``(t1, ..., tn) -> (t2, ..., tn, t1)``
* ``Invert(i)``            ``ti -> ti^-1``
* ``RightMultiply(i, j)``  ``ti -> ti tj``

The classical fixed-position forms are ``Swap(0, 1)``, ``Cycle()``,
``Invert(0)`` and ``RightMultiply(0, 1)``; :func:`as_fixed_position_moves` rewrites any
generalized move in terms of those four.

Move log text format, one move per line: ``swap i j``, ``cycle``,
``invert i``, ``rmul i j``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from nielsenkit.errors import DomainError
from nielsenkit.words import (
    Word,
    basis,
    format_word,
    invert,
    multiply,
    parse_word,
    substitute,
)


@dataclass(frozen=True)
class Swap:
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise DomainError(f"swap needs distinct indices, got {self.i}")


@dataclass(frozen=True)
class Cycle:
    pass


@dataclass(frozen=True)
class Invert:
    i: int


@dataclass(frozen=True)
class RightMultiply:
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise DomainError(f"rmul needs distinct indices, got {self.i}")


Move = Union[Swap, Cycle, Invert, RightMultiply]

FIXED_POSITION_MOVES = (Swap(0, 1), Cycle(), Invert(0), RightMultiply(0, 1))


@dataclass(frozen=True)
class GeneratingTuple:
    """An ordered tuple of words over a common free group."""

    words: tuple[Word, ...]
    rank: int

    def __post_init__(self):
        words = tuple(self.words)
        object.__setattr__(self, "words", words)
        for w in words:
            if w.rank != self.rank:
                raise DomainError(f"word of rank {w.rank} in a rank {self.rank} tuple")

    @classmethod
    def of(cls, words: Sequence[Word], rank: int | None = None) -> GeneratingTuple:
        if rank is None:
            if not words:
                raise DomainError("rank required for an empty tuple")
            rank = words[0].rank
        return cls(tuple(words), rank)

    @classmethod
    def basis(cls, n: int) -> GeneratingTuple:
        return cls(basis(n), n)

    @property
    def arity(self) -> int:
        return len(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __getitem__(self, i):
        return self.words[i]

    def __iter__(self):
        return iter(self.words)

    def format(self, names: Sequence[str] | None = None) -> str:
        return ", ".join(format_word(w, names) for w in self.words)


def parse_tuple(text: str, names: Sequence[str]) -> GeneratingTuple:
    """Parse comma separated words, e.g. ``"x^2, y"``."""
    text = text.strip()
    parts = [] if not text else text.split(",")
    return GeneratingTuple(tuple(parse_word(p, names) for p in parts), len(names))


def _check_index(i: int, n: int):
    if not 0 <= i < n:
        raise DomainError(f"index {i} out of range for arity {n}")


def check_move(m: Move, n: int):
    if isinstance(m, (Swap, RightMultiply)):
        _check_index(m.i, n)
        _check_index(m.j, n)
    elif isinstance(m, Invert):
        _check_index(m.i, n)
    elif not isinstance(m, Cycle):
        raise DomainError(f"not a Nielsen move: {m!r}")


def permute_entries(entries: Sequence, m: Move, inv, mul) -> tuple:
    """Apply ``m`` to any tuple, given the group's inverse and product.

    Shared by words and permutation images so both see the same move
    semantics.
    """
    out = list(entries)
    if isinstance(m, Swap):
        out[m.i], out[m.j] = out[m.j], out[m.i]
    elif isinstance(m, Cycle):
        out = out[1:] + out[:1]
    elif isinstance(m, Invert):
        out[m.i] = inv(out[m.i])
    else:
        out[m.i] = mul(out[m.i], out[m.j])
    return tuple(out)


def apply_move(t: GeneratingTuple, m: Move) -> GeneratingTuple:
    check_move(m, t.arity)
    return GeneratingTuple(permute_entries(t.words, m, invert, multiply), t.rank)


def apply_sequence(t: GeneratingTuple, ms: Iterable[Move]) -> GeneratingTuple:
    for m in ms:
        t = apply_move(t, m)
    return t


def inverse_sequence(m: Move, n: int) -> list[Move]:
    """Moves undoing ``m`` on every tuple of arity ``n``."""
    check_move(m, n)
    if isinstance(m, (Swap, Invert)):
        return [m]
    if isinstance(m, Cycle):
        return [Cycle()] * (n - 1)
    return [Invert(m.j), RightMultiply(m.i, m.j), Invert(m.j)]


def invert_sequence(ms: Sequence[Move], n: int) -> list[Move]:
    out: list[Move] = []
    for m in reversed(ms):
        out.extend(inverse_sequence(m, n))
    return out


def left_multiply(i: int, j: int) -> list[Move]:
    """Composite realizing ``ti -> tj ti``."""
    return [Invert(j), Invert(i), RightMultiply(i, j), Invert(i), Invert(j)]


def move_as_automorphism(ms: Sequence[Move], n: int) -> GeneratingTuple:
    """Images of the standard basis under the composed transformation."""
    return apply_sequence(GeneratingTuple.basis(n), ms)


def apply_automorphism(images: GeneratingTuple, t: GeneratingTuple) -> GeneratingTuple:
    """Entry ``i`` is ``images[i]`` evaluated at the words of ``t``."""
    return GeneratingTuple(
        tuple(substitute(w, t.words, t.rank) for w in images.words), t.rank
    )


def all_moves(n: int, cycle: bool = True) -> list[Move]:
    """Every valid generalized move at arity ``n`` in a fixed order."""
    moves: list[Move] = [Swap(i, j) for i in range(n) for j in range(i + 1, n)]
    if cycle and n >= 2:
        moves.append(Cycle())
    moves += [Invert(i) for i in range(n)]
    moves += [RightMultiply(i, j) for i in range(n) for j in range(n) if i != j]
    return moves


def random_walk(
    t: GeneratingTuple, steps: int, seed: int
) -> tuple[GeneratingTuple, list[Move]]:
    if steps < 0:
        raise DomainError("steps must be non-negative")
    rng = random.Random(seed)
    moves = all_moves(t.arity)
    log: list[Move] = []
    if not moves:
        return t, log
    for _ in range(steps):
        m = moves[rng.randrange(len(moves))]
        t = apply_move(t, m)
        log.append(m)
    return t, log


def _rotate_to(k: int, n: int) -> list[Move]:
    return [Cycle()] * (k % n)


def _adjacent_swap(k: int, n: int) -> list[Move]:
    # Swap positions k, k+1 by rotating them into positions 0, 1.
    return _rotate_to(k, n) + [Swap(0, 1)] + _rotate_to(n - k, n)


def as_fixed_position_moves(m: Move, n: int) -> list[Move]:
    """Rewrite a generalized move using only the four fixed-position moves."""
    check_move(m, n)
    if isinstance(m, Cycle):
        return [m]
    if isinstance(m, Invert):
        return _rotate_to(m.i, n) + [Invert(0)] + _rotate_to(n - m.i, n)
    if isinstance(m, Swap):
        i, j = sorted((m.i, m.j))
        out: list[Move] = []
        for k in range(i, j):
            out += _adjacent_swap(k, n)
        for k in range(j - 2, i - 1, -1):
            out += _adjacent_swap(k, n)
        return out
    # Bring i to slot 0 and j to slot 1, multiply there, then undo.
    prep: list[Move] = []
    i, j = m.i, m.j
    if i != 0:
        prep.append(Swap(0, i))
        if j == 0:
            j = i
    if j != 1:
        prep.append(Swap(1, j))
    out = []
    for s in prep:
        out += as_fixed_position_moves(s, n)
    out.append(RightMultiply(0, 1))
    for s in reversed(prep):
        out += as_fixed_position_moves(s, n)
    return out


def format_move(m: Move) -> str:
    if isinstance(m, Swap):
        return f"swap {m.i} {m.j}"
    if isinstance(m, Cycle):
        return "cycle"
    if isinstance(m, Invert):
        return f"invert {m.i}"
    if isinstance(m, RightMultiply):
        return f"rmul {m.i} {m.j}"
    raise DomainError(f"not a Nielsen move: {m!r}")


def parse_move(line: str) -> Move:
    parts = line.split()
    try:
        if parts == ["cycle"]:
            return Cycle()
        if len(parts) == 3 and parts[0] == "swap":
            return Swap(int(parts[1]), int(parts[2]))
        if len(parts) == 2 and parts[0] == "invert":
            return Invert(int(parts[1]))
        if len(parts) == 3 and parts[0] == "rmul":
            return RightMultiply(int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise DomainError(f"bad move line {line!r}") from exc
    raise DomainError(f"bad move line {line!r}")


def format_moves(ms: Iterable[Move]) -> str:
    return "".join(format_move(m) + "\n" for m in ms)


def parse_moves(text: str) -> list[Move]:
    return [parse_move(line) for line in text.splitlines() if line.strip()]


def same_words(a: GeneratingTuple, b: GeneratingTuple) -> bool:
    return a.rank == b.rank and a.words == b.words


__all__ = [
    "Cycle",
    "GeneratingTuple",
    "Invert",
    "Move",
    "FIXED_POSITION_MOVES",
    "RightMultiply",
    "Swap",
    "all_moves",
    "apply_automorphism",
    "apply_move",
    "apply_sequence",
    "as_fixed_position_moves",
    "check_move",
    "format_move",
    "format_moves",
    "inverse_sequence",
    "invert_sequence",
    "left_multiply",
    "move_as_automorphism",
    "parse_move",
    "parse_moves",
    "parse_tuple",
    "permute_entries",
    "random_walk",
    "same_words",
]
