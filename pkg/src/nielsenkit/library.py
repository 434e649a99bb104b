"""Built-in finite targets, loadable by name.

Names (case-insensitive):

``Z<n>``         cyclic group of order ``n <= 1000`` on ``n`` points
``Z<a>xZ<b>``    bicyclic group of order ``a*b <= 1000`` on ``a + b`` points
``S<d>``         symmetric group of degree ``d <= 8``
``A<d>``         alternating group of degree ``3 <= d <= 8``

Each target carries standard generators.  Bound to a presentation, the
presentation's generators are sent to the standard generators in order,
wrapping around when there are more presentation generators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from nielsenkit.errors import DomainError
from nielsenkit.perm import Permutation, from_cycles, identity

MAX_ABELIAN_ORDER = 1000
MAX_DEGREE = 8

# The panel used when a caller asks for "the bundled library" as a whole.
BUNDLED = (
    "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z11", "Z12",
    "Z2xZ2", "Z2xZ4", "Z3xZ3", "Z5xZ5", "Z7xZ7",
    "S3", "S4", "S5", "S6", "A4", "A5", "A6",
)


@dataclass(frozen=True)
class Target:
    name: str
    degree: int
    generators: tuple[Permutation, ...]


def _cycle(points, degree):
    return from_cycles([list(points)], degree)


def cyclic(n: int) -> Target:
    if not 1 <= n <= MAX_ABELIAN_ORDER:
        raise DomainError(f"cyclic order {n} outside 1..{MAX_ABELIAN_ORDER}")
    return Target(f"Z{n}", n, (_cycle(range(n), n),))


def bicyclic(a: int, b: int) -> Target:
    """``Z/a x Z/b`` acting on disjoint cycles of lengths ``a`` and ``b``."""
    if a < 1 or b < 1 or a * b > MAX_ABELIAN_ORDER:
        raise DomainError(f"bicyclic order {a}*{b} outside 1..{MAX_ABELIAN_ORDER}")
    d = a + b
    return Target(
        f"Z{a}xZ{b}", d, (_cycle(range(a), d), _cycle(range(a, d), d))
    )


def symmetric(d: int) -> Target:
    if not 1 <= d <= MAX_DEGREE:
        raise DomainError(f"symmetric degree {d} outside 1..{MAX_DEGREE}")
    if d == 1:
        return Target("S1", 1, (identity(1),))
    if d == 2:
        return Target("S2", 2, (_cycle((0, 1), 2),))
    return Target(f"S{d}", d, (_cycle(range(d), d), _cycle((0, 1), d)))


def alternating(d: int) -> Target:
    if not 3 <= d <= MAX_DEGREE:
        raise DomainError(f"alternating degree {d} outside 3..{MAX_DEGREE}")
    if d == 3:
        return Target("A3", 3, (_cycle((0, 1, 2), 3),))
    long = range(d) if d % 2 else range(1, d)
    return Target(f"A{d}", d, (_cycle((0, 1, 2), d), _cycle(long, d)))


def target(name: str) -> Target:
    key = name.strip().upper()
    if m := re.fullmatch(r"Z(\d+)", key):
        return cyclic(int(m.group(1)))
    if m := re.fullmatch(r"Z(\d+)XZ(\d+)", key):
        return bicyclic(int(m.group(1)), int(m.group(2)))
    if m := re.fullmatch(r"S(\d+)", key):
        return symmetric(int(m.group(1)))
    if m := re.fullmatch(r"A(\d+)", key):
        return alternating(int(m.group(1)))
    raise DomainError(f"unknown built-in target {name!r}")


def is_builtin(name: str) -> bool:
    try:
        target(name)
    except DomainError:
        return False
    return True


def images_for(t: Target, n_generators: int) -> tuple[Permutation, ...]:
    return tuple(t.generators[i % len(t.generators)] for i in range(n_generators))
