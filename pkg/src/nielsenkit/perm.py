"""Permutations as one-line tuples.

A permutation of degree ``d`` is a tuple ``p`` with ``p[x]`` the image of
``x``.  Products are functional composition: ``compose(p, q)[x] = p[q[x]]``.
Cycle notation ``(0 1 2)(3 4)`` is used for text; ``()`` is the identity.
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Sequence

from nielsenkit.errors import DomainError

Permutation = tuple[int, ...]

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def identity(degree: int) -> Permutation:
    return tuple(range(degree))


def check_perm(p: Sequence[int]) -> Permutation:
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(len(p))):
        raise DomainError(f"not a permutation: {p}")
    return p


def compose(p: Permutation, q: Permutation) -> Permutation:
    return tuple([p[x] for x in q])


def inverse(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for x, y in enumerate(p):
        out[y] = x
    return tuple(out)


def power(p: Permutation, k: int) -> Permutation:
    if k < 0:
        p, k = inverse(p), -k
    out = identity(len(p))
    base = p
    while k:
        if k & 1:
            out = compose(out, base)
        base = compose(base, base)
        k >>= 1
    return out


def is_identity(p: Permutation) -> bool:
    return all(x == i for i, x in enumerate(p))


def from_cycles(cycles: Iterable[Sequence[int]], degree: int) -> Permutation:
    out = list(range(degree))
    seen: set[int] = set()
    for c in cycles:
        c = list(c)
        for x in c:
            if not 0 <= x < degree:
                raise DomainError(f"point {x} out of range for degree {degree}")
            if x in seen:
                raise DomainError(f"point {x} repeated in cycle notation")
            seen.add(x)
        for a, b in zip(c, c[1:] + c[:1]):
            out[a] = b
    return tuple(out)


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse disjoint cycles such as ``(0 1 2 3 4)(5 6)``."""
    stripped = text.strip()
    if _CYCLE_RE.sub("", stripped).strip():
        raise DomainError(f"bad cycle notation {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(stripped):
        pts = body.replace(",", " ").split()
        try:
            cycles.append([int(x) for x in pts])
        except ValueError as exc:
            raise DomainError(f"bad cycle notation {text!r}") from exc
    return from_cycles([c for c in cycles if c], degree)


def format_cycles(p: Permutation) -> str:
    seen = set()
    out = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def order(p: Permutation) -> int:
    n = 1
    seen = set()
    for i in range(len(p)):
        if i in seen:
            continue
        length = 0
        j = i
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        n = n * length // math.gcd(n, length)
    return n


def dimino(gens: Sequence[Permutation], degree: int, limit: int | None = None):
    """Elements of the group generated by ``gens`` (Dimino's algorithm).

    Returns ``None`` if the group has more than ``limit`` elements.
    """
    e = identity(degree)
    elements = [e]
    members = {e}
    used: list[Permutation] = []
    for g in gens:
        if g in members:
            continue
        used.append(g)
        prev = list(elements)
        coset = [compose(h, g) for h in prev]
        elements.extend(coset)
        members.update(coset)
        rep_pos = len(prev)
        while rep_pos < len(elements):
            rep = elements[rep_pos]
            for s in used:
                elt = compose(rep, s)
                if elt not in members:
                    coset = [compose(h, elt) for h in prev]
                    elements.extend(coset)
                    members.update(coset)
                    if limit is not None and len(elements) > limit:
                        return None
            rep_pos += len(prev)
        if limit is not None and len(elements) > limit:
            return None
    return elements
