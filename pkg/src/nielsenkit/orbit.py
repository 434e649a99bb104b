"""Breadth-first search over Nielsen orbits of permutation tuples.

Two interchangeable state spaces back the search:

* ``TableSpace`` enumerates the group generated by the root tuple, sorts
  its elements by one-line form and precomputes the Cayley table.  A tuple
  is then a single integer code in base ``|G|`` and a whole BFS level is
  expanded with numpy.  Because element ids follow the one-line order, the
  smallest code is the lexicographically least tuple.
* ``ScalarSpace`` interns permutations lazily and searches tuple by tuple.
  It is used when the group is too large for a table.

Moves are the generalized set without ``Cycle`` (it is a product of swaps),
in the order given by :func:`nielsenkit.moves.all_moves`.  Expansion order is
fixed, so results never depend on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from nielsenkit import perm
from nielsenkit.moves import Invert, Swap, all_moves

TABLE_LIMIT = 2048
_CODE_LIMIT = 1 << 62
_KEY_SEED = 0x5EED


class TableUnavailable(Exception):
    pass


class TableSpace:
    def __init__(self, gens: Sequence[perm.Permutation], degree: int, n: int, workers: int = 1):
        elements = perm.dimino(list(gens), degree, limit=TABLE_LIMIT)
        if elements is None:
            raise TableUnavailable("group too large for a Cayley table")
        G = len(elements)
        if G**n >= _CODE_LIMIT:
            raise TableUnavailable("tuple codes overflow")
        elements.sort()
        self.elements = elements
        self.index = {p: i for i, p in enumerate(elements)}
        self.G = G
        self.n = n
        self.degree = degree
        self.workers = max(1, int(workers))
        self.moves = all_moves(n, cycle=False)
        self.weights = np.array([G ** (n - 1 - k) for k in range(n)], dtype=np.int64)
        self._build_tables()

    def _build_tables(self):
        G, d = self.G, self.degree
        P = np.array(self.elements, dtype=np.int64).reshape(G, d)
        rng = np.random.default_rng(_KEY_SEED)
        salt = rng.integers(1, 1 << 62, size=d, dtype=np.int64)
        keys = P @ salt
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        if G > 1 and np.any(sorted_keys[1:] == sorted_keys[:-1]):
            raise TableUnavailable("element key collision")

        def ids(rows):
            pos = np.searchsorted(sorted_keys, rows @ salt)
            return order[pos]

        mul = np.empty((G, G), dtype=np.int64)
        for a in range(G):
            mul[a] = ids(P[a][P])
        self.mul = mul
        self.inv = ids(np.argsort(P, axis=1))

    def encode(self, entries: Sequence[perm.Permutation]) -> int:
        code = 0
        for p in entries:
            code = code * self.G + self.index[p]
        return code

    def contains(self, entries: Sequence[perm.Permutation]) -> bool:
        return all(p in self.index for p in entries)

    def digits(self, codes: np.ndarray) -> np.ndarray:
        return (codes[:, None] // self.weights) % self.G

    def decode(self, code: int) -> tuple[perm.Permutation, ...]:
        out = []
        for _ in range(self.n):
            code, r = divmod(int(code), self.G)
            out.append(self.elements[r])
        return tuple(reversed(out))

    def decode_many(self, codes: np.ndarray) -> list[tuple[perm.Permutation, ...]]:
        els = self.elements
        return [tuple(els[x] for x in row) for row in self.digits(codes).tolist()]

    def _children(self, codes, digits, moves):
        w = self.weights
        out = np.empty((len(moves), len(codes)), dtype=np.int64)
        for k, m in enumerate(moves):
            if isinstance(m, Swap):
                di, dj = digits[:, m.i], digits[:, m.j]
                out[k] = codes + (dj - di) * (w[m.i] - w[m.j])
            elif isinstance(m, Invert):
                di = digits[:, m.i]
                out[k] = codes + (self.inv[di] - di) * w[m.i]
            else:
                di, dj = digits[:, m.i], digits[:, m.j]
                out[k] = codes + (self.mul[di, dj] - di) * w[m.i]
        return out

    def expand(self, codes: np.ndarray) -> np.ndarray:
        """Children of every code, shape ``(len(moves), len(codes))``."""
        digits = self.digits(codes)
        moves = self.moves
        if self.workers == 1 or len(moves) < 2:
            return self._children(codes, digits, moves)
        step = -(-len(moves) // self.workers)
        chunks = [moves[k : k + step] for k in range(0, len(moves), step)]
        with ThreadPoolExecutor(self.workers) as pool:
            parts = list(pool.map(lambda ms: self._children(codes, digits, ms), chunks))
        return np.concatenate(parts, axis=0)


class TableSide:
    """One BFS tree in a :class:`TableSpace`."""

    def __init__(self, space: TableSpace, root: int, cap: int):
        self.space = space
        self.cap = cap
        r = np.array([root], dtype=np.int64)
        self.levels = [(r, np.array([-1], dtype=np.int64), np.array([-1], dtype=np.int64))]
        self.seen = r
        self.frontier = r
        self.closed = False
        self.truncated = False

    @property
    def size(self) -> int:
        return len(self.seen)

    @property
    def done(self) -> bool:
        return self.closed or self.truncated

    def step(self) -> np.ndarray:
        f = self.frontier
        children = self.space.expand(f).ravel()
        uniq, first = np.unique(children, return_index=True)
        pos = np.searchsorted(self.seen, uniq)
        pos_c = np.minimum(pos, len(self.seen) - 1)
        fresh = self.seen[pos_c] != uniq
        new, first = uniq[fresh], first[fresh]
        if len(new) == 0:
            self.closed = True
            self.frontier = new
            return new
        room = self.cap - len(self.seen)
        if len(new) > room:
            keep = max(room, 0) + 1
            new, first = new[:keep], first[:keep]
            self.truncated = True
        width = len(f)
        self.levels.append((new, f[first % width], first // width))
        self.seen = np.union1d(self.seen, new)
        self.frontier = new
        return new

    def has(self, codes: np.ndarray) -> np.ndarray:
        pos = np.minimum(np.searchsorted(self.seen, codes), len(self.seen) - 1)
        return self.seen[pos] == codes

    def path(self, code: int) -> list[int]:
        """Move indices leading from the root to ``code``."""
        out = []
        for level in range(len(self.levels) - 1, 0, -1):
            codes, parents, moves = self.levels[level]
            k = np.searchsorted(codes, code)
            if k < len(codes) and codes[k] == code:
                out.append(int(moves[k]))
                code = int(parents[k])
        out.reverse()
        return out

    def minimum(self) -> int:
        return int(self.seen[0])

    def all_codes(self) -> np.ndarray:
        return self.seen


class ScalarSpace:
    def __init__(self, degree: int, n: int):
        self.degree = degree
        self.n = n
        self.moves = all_moves(n, cycle=False)
        self.perms: list[perm.Permutation] = []
        self.index: dict[perm.Permutation, int] = {}
        self._inv: list[int] = []
        self._mul: dict[tuple[int, int], int] = {}
        self._plan = [
            (0, m.i, m.j) if isinstance(m, Swap)
            else (1, m.i, 0) if isinstance(m, Invert)
            else (2, m.i, m.j)
            for m in self.moves
        ]

    def intern(self, p: perm.Permutation) -> int:
        k = self.index.get(p)
        if k is None:
            k = len(self.perms)
            self.perms.append(p)
            self.index[p] = k
            self._inv.append(-1)
        return k

    def inv(self, a: int) -> int:
        b = self._inv[a]
        if b < 0:
            b = self.intern(perm.inverse(self.perms[a]))
            self._inv[a] = b
        return b

    def mul(self, a: int, b: int) -> int:
        c = self._mul.get((a, b))
        if c is None:
            c = self.intern(perm.compose(self.perms[a], self.perms[b]))
            self._mul[(a, b)] = c
        return c

    def encode(self, entries) -> tuple[int, ...]:
        return tuple(self.intern(p) for p in entries)

    def decode(self, state) -> tuple[perm.Permutation, ...]:
        return tuple(self.perms[x] for x in state)

    def children(self, state: tuple[int, ...]):
        for kind, i, j in self._plan:
            s = list(state)
            if kind == 0:
                s[i], s[j] = s[j], s[i]
            elif kind == 1:
                s[i] = self.inv(s[i])
            else:
                s[i] = self.mul(s[i], s[j])
            yield tuple(s)


class ScalarSide:
    def __init__(self, space: ScalarSpace, root: tuple[int, ...], cap: int):
        self.space = space
        self.cap = cap
        self.parent: dict[tuple[int, ...], tuple[tuple[int, ...] | None, int]] = {root: (None, -1)}
        self.frontier = [root]
        self.closed = False
        self.truncated = False

    @property
    def size(self) -> int:
        return len(self.parent)

    @property
    def done(self) -> bool:
        return self.closed or self.truncated

    def step(self) -> list:
        new = []
        parent = self.parent
        for s in self.frontier:
            for k, c in enumerate(self.space.children(s)):
                if c not in parent:
                    parent[c] = (s, k)
                    new.append(c)
                    if len(parent) > self.cap:
                        self.truncated = True
                        self.frontier = new
                        return new
        if not new:
            self.closed = True
        self.frontier = new
        return new

    def has_any(self, states) -> list:
        return [s for s in states if s in self.parent]

    def path(self, state) -> list[int]:
        out = []
        while True:
            prev, k = self.parent[state]
            if prev is None:
                break
            out.append(k)
            state = prev
        out.reverse()
        return out

    def minimum(self):
        return min(self.parent, key=self.space.decode)

    def all_states(self):
        return list(self.parent)


def make_space(entries: Sequence[perm.Permutation], degree: int, workers: int = 1):
    try:
        return TableSpace(entries, degree, len(entries), workers)
    except TableUnavailable:
        return ScalarSpace(degree, len(entries))


def make_side(space, entries, cap):
    if isinstance(space, TableSpace):
        return TableSide(space, space.encode(entries), cap)
    return ScalarSide(space, space.encode(entries), cap)


def meeting_points(space, new, other) -> list:
    """States in ``new`` already seen by ``other``, smallest first."""
    if isinstance(space, TableSpace):
        if len(new) == 0:
            return []
        return [int(x) for x in new[other.has(new)]]
    return sorted(other.has_any(new), key=space.decode)
