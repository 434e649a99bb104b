"""One-vertex oriented spines of handlebodies, kept as loop labels.

A spine of a genus ``g`` handlebody is a rose of ``g`` oriented loops; each
loop is labeled by the element of the free fundamental group it carries.
Edge slides, orientation reversals and relabelings act on the labels exactly
as right multiplications, inversions and permutations act on tuples.

Spine text format, one loop per line (an optional ``gens:`` line names the
free generators, default ``x1 .. xg``)::

    loop 0: x1 x2
    loop 1: x2

Witness logs use ``slide i j``, ``reverse i`` and ``relabel p0 p1 ...``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence, Union

from nielsenkit.errors import DomainError
from nielsenkit.moves import GeneratingTuple, Invert, RightMultiply, Swap, Move
from nielsenkit.words import Word, basis, default_names, format_word, invert, multiply, parse_word


@dataclass(frozen=True)
class Slide:
    i: int
    j: int


@dataclass(frozen=True)
class Reverse:
    i: int


@dataclass(frozen=True)
class Relabel:
    perm: tuple[int, ...]


SpineMove = Union[Slide, Reverse, Relabel]


@dataclass(frozen=True)
class Spine:
    labels: tuple[Word, ...]
    # Moves from the standard spine, when known; certifies the labels form a basis.
    history: tuple[SpineMove, ...] | None = field(default=(), compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        for w in labels:
            if w.rank != len(labels):
                raise DomainError(f"label of rank {w.rank} on a genus {len(labels)} spine")

    @property
    def genus(self) -> int:
        return len(self.labels)

    def _extend(self, labels, move) -> Spine:
        history = None if self.history is None else self.history + (move,)
        return Spine(tuple(labels), history)


def standard_spine(g: int) -> Spine:
    if g < 0:
        raise DomainError("genus must be >= 0")
    return Spine(basis(g), ())


def spine_from_labels(labels: Sequence[Word]) -> Spine:
    """A spine with the given labels and no basis certificate."""
    return Spine(tuple(labels), None)


def _check(s: Spine, *idx: int):
    for i in idx:
        if not 0 <= i < s.genus:
            raise DomainError(f"loop {i} out of range for genus {s.genus}")


def edge_slide(s: Spine, i: int, j: int) -> Spine:
    """Slide loop ``i`` over loop ``j``: label_i becomes label_i label_j."""
    _check(s, i, j)
    if i == j:
        raise DomainError("cannot slide a loop over itself")
    labels = list(s.labels)
    labels[i] = multiply(labels[i], labels[j])
    return s._extend(labels, Slide(i, j))


def reverse_edge(s: Spine, i: int) -> Spine:
    _check(s, i)
    labels = list(s.labels)
    labels[i] = invert(labels[i])
    return s._extend(labels, Reverse(i))


def relabel(s: Spine, p: Sequence[int]) -> Spine:
    """Reorder loops: new loop ``k`` is old loop ``p[k]``."""
    p = tuple(p)
    if sorted(p) != list(range(s.genus)):
        raise DomainError(f"{p} is not a permutation of the loops")
    return s._extend([s.labels[k] for k in p], Relabel(p))


def slide_other_end(s: Spine, i: int, j: int) -> Spine:
    """The opposite slide direction, label_i becomes label_j label_i."""
    for step in (lambda x: reverse_edge(x, j), lambda x: reverse_edge(x, i),
                 lambda x: edge_slide(x, i, j), lambda x: reverse_edge(x, i),
                 lambda x: reverse_edge(x, j)):
        s = step(s)
    return s


def apply_spine_move(s: Spine, m: SpineMove) -> Spine:
    if isinstance(m, Slide):
        return edge_slide(s, m.i, m.j)
    if isinstance(m, Reverse):
        return reverse_edge(s, m.i)
    if isinstance(m, Relabel):
        return relabel(s, m.perm)
    raise DomainError(f"not a spine move: {m!r}")


def apply_spine_moves(s: Spine, ms: Sequence[SpineMove]) -> Spine:
    for m in ms:
        s = apply_spine_move(s, m)
    return s


def induced_tuple(s: Spine) -> GeneratingTuple:
    return GeneratingTuple(s.labels, s.genus)


def as_nielsen_moves(m: SpineMove) -> list[Move]:
    """The Nielsen moves with the same effect on the induced tuple."""
    if isinstance(m, Slide):
        return [RightMultiply(m.i, m.j)]
    if isinstance(m, Reverse):
        return [Invert(m.i)]
    # Sort positions into place with transpositions (selection sort).
    current = list(range(len(m.perm)))
    out: list[Move] = []
    for k, want in enumerate(m.perm):
        at = current.index(want)
        if at != k:
            out.append(Swap(k, at))
            current[k], current[at] = current[at], current[k]
    return out


def inverse_spine_moves(ms: Sequence[SpineMove], g: int) -> list[SpineMove]:
    out: list[SpineMove] = []
    for m in reversed(ms):
        if isinstance(m, Reverse):
            out.append(m)
        elif isinstance(m, Slide):
            out += [Reverse(m.j), Slide(m.i, m.j), Reverse(m.j)]
        else:
            inv = [0] * g
            for k, v in enumerate(m.perm):
                inv[v] = k
            out.append(Relabel(tuple(inv)))
    return out


def _label_distance(labels, target) -> int:
    return sum(abs(len(a) - len(b)) for a, b in zip(labels, target))


def _spine_moves(g: int) -> list[SpineMove]:
    moves: list[SpineMove] = [Slide(i, j) for i in range(g) for j in range(g) if i != j]
    moves += [Reverse(i) for i in range(g)]
    for i in range(g):
        for j in range(i + 1, g):
            p = list(range(g))
            p[i], p[j] = p[j], p[i]
            moves.append(Relabel(tuple(p)))
    return moves


def _act(labels: tuple[Word, ...], m: SpineMove) -> tuple[Word, ...]:
    out = list(labels)
    if isinstance(m, Slide):
        out[m.i] = multiply(out[m.i], out[m.j])
    elif isinstance(m, Reverse):
        out[m.i] = invert(out[m.i])
    else:
        out = [labels[k] for k in m.perm]
    return tuple(out)


def connect_spines(s1: Spine, s2: Spine, max_depth: int) -> list[SpineMove] | None:
    """Search for slides, reversals and transposition relabelings taking s1 to s2.

    Iterative deepening; at each node children are tried in order of the
    total label-length mismatch with the target, then by move order.  The
    first sequence found at the smallest depth is returned.  ``None`` means
    nothing was found within ``max_depth`` moves, which proves nothing.
    """
    if s1.genus != s2.genus:
        raise DomainError(f"genus mismatch: {s1.genus} vs {s2.genus}")
    target = s2.labels
    moves = _spine_moves(s1.genus)

    def dfs(labels, depth, path, on_path):
        if labels == target:
            return list(path)
        if depth == 0:
            return None
        children = []
        for k, m in enumerate(moves):
            nxt = _act(labels, m)
            if nxt in on_path:
                continue
            children.append((_label_distance(nxt, target), k, m, nxt))
        children.sort(key=lambda c: (c[0], c[1]))
        for _, _, m, nxt in children:
            path.append(m)
            on_path.add(nxt)
            found = dfs(nxt, depth - 1, path, on_path)
            on_path.discard(nxt)
            path.pop()
            if found is not None:
                return found
        return None

    for depth in range(max_depth + 1):
        found = dfs(s1.labels, depth, [], {s1.labels})
        if found is not None:
            return found
    return None


def format_spine_move(m: SpineMove) -> str:
    if isinstance(m, Slide):
        return f"slide {m.i} {m.j}"
    if isinstance(m, Reverse):
        return f"reverse {m.i}"
    return "relabel " + " ".join(map(str, m.perm))


def parse_spine_move(line: str) -> SpineMove:
    parts = line.split()
    try:
        if parts and parts[0] == "slide" and len(parts) == 3:
            return Slide(int(parts[1]), int(parts[2]))
        if parts and parts[0] == "reverse" and len(parts) == 2:
            return Reverse(int(parts[1]))
        if parts and parts[0] == "relabel":
            return Relabel(tuple(int(x) for x in parts[1:]))
    except ValueError:
        pass
    raise DomainError(f"bad spine move line {line!r}")


_LOOP_RE = re.compile(r"loop\s+(\d+)\s*:(.*)\Z")


def parse_spine(text: str) -> Spine:
    names = None
    loops: dict[int, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("gens:"):
            names = line[len("gens:") :].split()
            continue
        m = _LOOP_RE.match(line)
        if m is None:
            raise DomainError(f"bad spine line {raw!r}")
        k = int(m.group(1))
        if k in loops:
            raise DomainError(f"duplicate loop {k}")
        loops[k] = m.group(2)
    g = len(loops)
    if sorted(loops) != list(range(g)):
        raise DomainError("loops must be numbered 0 .. g-1")
    if names is None:
        names = list(default_names(g))
    if len(names) != g:
        raise DomainError(f"{len(names)} generator names for genus {g}")
    return spine_from_labels([parse_word(loops[k], names) for k in range(g)])


def format_spine(s: Spine, names: Sequence[str] | None = None) -> str:
    lines = []
    if names is not None:
        lines.append("gens: " + " ".join(names))
    for k, w in enumerate(s.labels):
        lines.append(f"loop {k}: {format_word(w, names)}")
    return "\n".join(lines) + "\n"
