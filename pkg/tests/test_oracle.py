import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nielsenkit import library, oracle, perm
from nielsenkit.errors import BudgetExceeded, DomainError, InvalidQuotient
from nielsenkit.moves import GeneratingTuple, all_moves, apply_sequence, random_walk
from nielsenkit.orbit import ScalarSpace
from nielsenkit.oracle import (
    Answer,
    Distinction,
    FiniteQuotient,
    apply_move_image,
    apply_moves_image,
    bundled_quotients,
    classes_by_orbit,
    distinguish_via_quotients,
    enumerate_generating_tuples,
    evaluate,
    format_quotient,
    generated_subgroup_order,
    image_of,
    nielsen_orbit,
    parse_quotient,
    same_orbit,
)
from nielsenkit.presentation import free_presentation, parse_presentation
from nielsenkit.words import free_reduce, identity

from strategies import words

TOY = parse_presentation("gens: x y\nrel: x^5\nrel: y^5\nrel: x y x^-1 y^-1\n")
Z5Z5 = FiniteQuotient.from_builtin("Z5xZ5", TOY)
X, Y = Z5Z5.generator_images


def z5z5(i, j):
    """The element (i, j) of Z/5 x Z/5."""
    return perm.compose(perm.power(X, i), perm.power(Y, j))


# -- permutations and the target library ---------------------------------------


def test_cycle_notation():
    p = perm.parse_cycles("(0 1 2 3 4)(5 6)", 8)
    assert p == (1, 2, 3, 4, 0, 6, 5, 7)
    assert perm.format_cycles(p) == "(0 1 2 3 4)(5 6)"
    assert perm.parse_cycles("()", 3) == perm.identity(3)
    assert perm.format_cycles(perm.identity(3)) == "()"
    for bad in ["(0 1", "(0 0)", "(0 9)", "(a)", "x(0 1)"]:
        with pytest.raises(DomainError):
            perm.parse_cycles(bad, 4)


def test_perm_algebra():
    p, q = (1, 2, 0), (1, 0, 2)
    assert perm.compose(p, q) == tuple(p[q[x]] for x in range(3))
    assert perm.compose(p, perm.inverse(p)) == perm.identity(3)
    assert perm.power(p, 3) == perm.identity(3)
    assert perm.power(p, -1) == perm.inverse(p)
    assert perm.order(perm.parse_cycles("(0 1)(2 3 4)", 5)) == 6
    assert len(perm.dimino([p, q], 3)) == 6
    assert perm.dimino([perm.parse_cycles("(0 1 2 3 4 5 6)", 7), perm.parse_cycles("(0 1)", 7)], 7, limit=100) is None


@pytest.mark.parametrize("name,order", [
    ("Z1", 1), ("Z12", 12), ("Z2xZ4", 8), ("z5xz5", 25), ("S1", 1), ("S2", 2),
    ("S3", 6), ("S5", 120), ("A3", 3), ("A4", 12), ("A5", 60), ("A6", 360),
])
def test_library_orders(name, order):
    t = library.target(name)
    assert len(perm.dimino(list(t.generators), t.degree)) == order


def test_library_limits():
    for bad in ["Z1001", "Z40xZ40", "S9", "A2", "Q8", ""]:
        with pytest.raises(DomainError):
            library.target(bad)
    assert library.is_builtin("S8") and not library.is_builtin("S9")
    assert library.target("Z3xZ4").degree == 7
    assert all(library.is_builtin(n) for n in library.BUNDLED)


# -- evaluation ---------------------------------------------------------------------


def test_evaluate_examples():
    p = free_presentation(1, ["s"])
    q = FiniteQuotient(p, 5, (perm.parse_cycles("(0 1 2 3 4)", 5),))
    assert evaluate(identity(1), q) == perm.identity(5)
    assert evaluate(p.word("s"), q) == (1, 2, 3, 4, 0)
    assert evaluate(p.word("s^2"), q) == (2, 3, 4, 0, 1)
    with pytest.raises(DomainError):
        evaluate(identity(2), q)


def test_image_of_examples():
    assert image_of(TOY.tuple_of(["x", "y"]), Z5Z5) == (X, Y)
    assert image_of(TOY.tuple_of(["x^2", "y"]), Z5Z5) == (perm.power(X, 2), Y)
    t = TOY.tuple_of(["x y^2", "y x"])
    assert apply_move_image(image_of(t, Z5Z5), oracle.RightMultiply(0, 1)) == image_of(
        TOY.tuple_of(["x y^2 y x", "y x"]), Z5Z5
    )


@given(st.lists(st.integers(1, 2).flatmap(lambda i: st.sampled_from([i, -i])), max_size=20))
def test_evaluate_respects_free_reduction(raw):
    q = FiniteQuotient.from_builtin("S4", free_presentation(2))
    acc = perm.identity(q.degree)
    for a in raw:
        g = q.generator_images[abs(a) - 1]
        acc = perm.compose(acc, g if a > 0 else perm.inverse(g))
    assert evaluate(free_reduce(raw, 2), q) == acc


@given(words(2), words(2))
def test_evaluate_is_homomorphic(u, v):
    q = FiniteQuotient.from_builtin("A5", free_presentation(2))
    assert evaluate(u * v, q) == perm.compose(evaluate(u, q), evaluate(v, q))


# -- quotient files --------------------------------------------------------------------


def test_quotient_file_round_trip():
    text = "degree: 10\nimage x: (0 1 2 3 4)\nimage y: (5 6 7 8 9)\n"
    q = parse_quotient(text, TOY, "toy")
    assert q.generator_images == Z5Z5.generator_images
    assert format_quotient(q) == text


def test_invalid_quotient_names_relator():
    with pytest.raises(InvalidQuotient) as info:
        parse_quotient("degree: 10\nimage x: (0 1 2 3)\nimage y: (5 6 7 8 9)\n", TOY)
    assert info.value.relator == "x^5"
    with pytest.raises(InvalidQuotient) as info:
        parse_quotient("degree: 4\nimage x: ()\nimage y: (0 1 2 3 )\n", TOY)
    assert info.value.relator == "y^5"


@pytest.mark.parametrize("text", [
    "image x: ()\nimage y: ()\n",
    "degree: 5\nimage x: ()\n",
    "degree: 5\nimage x: ()\nimage x: ()\nimage y: ()\n",
    "degree: 5\nimage z: ()\nimage x: ()\nimage y: ()\n",
    "degree: five\n",
    "degree 5\n",
])
def test_malformed_quotient_files(text):
    with pytest.raises(DomainError):
        parse_quotient(text, TOY)


def test_bundled_quotients_skip_invalid_targets():
    names = [q.name for q in bundled_quotients(TOY)]
    assert names == ["Z5", "Z5xZ5"]
    assert len(bundled_quotients(free_presentation(2))) == len(library.BUNDLED)


# -- orbits ---------------------------------------------------------------------------


def test_arity_one_orbits_in_a_cyclic_group():
    g = library.target("Z6").generators[0]
    assert nielsen_orbit((g,)).size == 2
    assert nielsen_orbit((perm.power(g, 3),)).size == 1


def test_z5z5_orbit_size_and_canonical_form():
    # Generating pairs with determinant +1 or -1: 2 * |SL2(5)| = 240.
    a = nielsen_orbit((z5z5(1, 0), z5z5(0, 1)))
    b = nielsen_orbit((z5z5(0, 1), z5z5(1, 0)))
    assert (a.size, a.truncated) == (240, False)
    assert b.size == 240 and a.canonical == b.canonical
    assert apply_moves_image((z5z5(1, 0), z5z5(0, 1)), a.witness_log) == a.canonical


def test_orbit_cap_truncates():
    res = nielsen_orbit((z5z5(1, 0), z5z5(0, 1)), cap=1)
    assert res.truncated and res.canonical is None and res.witness_log is None
    with pytest.raises(DomainError):
        nielsen_orbit((X,), cap=0)


def test_canonical_is_lexicographic_minimum_of_members():
    res = nielsen_orbit((z5z5(2, 1), z5z5(1, 3)), keep_members=True)
    assert len(res.members) == res.size == len(set(res.members))
    assert res.canonical == min(res.members)


def test_same_orbit_examples():
    start = (z5z5(1, 0), z5z5(0, 1))
    res = same_orbit(start, (z5z5(2, 0), z5z5(0, 1)))
    assert res.answer is Answer.NO and res.exhausted_size == 240
    s8 = library.target("S8").generators
    res = same_orbit(s8, s8[::-1], cap=10)
    assert res.answer is Answer.YES and res.witness == [oracle.Swap(0, 1)]
    res = same_orbit(s8, (perm.compose(s8[0], s8[0]), s8[1]), cap=10)
    assert res.answer is Answer.INCONCLUSIVE
    with pytest.raises(DomainError):
        same_orbit(start, start[:1])
    with pytest.raises(DomainError):
        same_orbit((X,), ((0, 1),))


def test_same_orbit_yes_after_random_walk():
    q = FiniteQuotient.from_builtin("S5", free_presentation(2))
    t = GeneratingTuple.basis(2)
    walked, _ = random_walk(t, 50, seed=3)
    a, b = image_of(t, q), image_of(walked, q)
    res = same_orbit(a, b)
    assert res.answer is Answer.YES
    assert apply_moves_image(a, res.witness) == b


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["S3", "A4", "Z3xZ3", "Z12"]))
def test_same_orbit_symmetric(seed, name):
    rng = random.Random(seed)
    t = library.target(name)
    elements = perm.dimino(list(t.generators), t.degree)
    a = (rng.choice(elements), rng.choice(elements))
    b = (rng.choice(elements), rng.choice(elements))
    ab, ba = same_orbit(a, b), same_orbit(b, a)
    assert ab.answer is ba.answer
    assert ab.answer is not Answer.INCONCLUSIVE


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["S4", "Z5xZ5", "A5"]), st.integers(2, 3))
def test_canonical_form_constant_along_walks(seed, name, n):
    q = FiniteQuotient.from_builtin(name, free_presentation(n))
    t = GeneratingTuple.basis(n)
    walked, _ = random_walk(t, 30, seed)
    assert nielsen_orbit(image_of(t, q)).canonical == nielsen_orbit(image_of(walked, q)).canonical


def test_workers_do_not_change_results():
    q = FiniteQuotient.from_builtin("S4", free_presentation(3))
    img = image_of(GeneratingTuple.basis(3), q)
    one = nielsen_orbit(img, workers=1)
    four = nielsen_orbit(img, workers=4)
    assert (one.size, one.canonical, one.witness_log) == (four.size, four.canonical, four.witness_log)
    other = (img[1], img[0], perm.compose(img[2], img[2]))
    assert same_orbit(img, other, workers=1) == same_orbit(img, other, workers=4)


def test_scalar_engine_agrees_with_table_engine(monkeypatch):
    cases = [
        (z5z5(1, 0), z5z5(0, 1)),
        tuple(library.target("S4").generators),
        tuple(library.target("A4").generators) + (perm.identity(4),),
    ]
    table = [nielsen_orbit(c) for c in cases]
    pairs = [(cases[0], (z5z5(2, 0), z5z5(0, 1))), (cases[1], cases[1][::-1])]
    table_pairs = [same_orbit(a, b).answer for a, b in pairs]
    monkeypatch.setattr(oracle, "make_space", lambda e, d, workers=1: ScalarSpace(d, len(e)))
    for c, expected in zip(cases, table):
        got = nielsen_orbit(c)
        assert (got.size, got.canonical) == (expected.size, expected.canonical)
        assert apply_moves_image(c, got.witness_log) == got.canonical
    assert [same_orbit(a, b).answer for a, b in pairs] == table_pairs


def test_large_group_uses_scalar_search():
    s8 = library.target("S8").generators
    res = nielsen_orbit(s8, cap=500)
    assert res.truncated and res.size > 500


# -- ground truth -------------------------------------------------------------------


def test_generated_subgroup_order_examples():
    assert generated_subgroup_order((perm.identity(3),)) == 1
    assert generated_subgroup_order((perm.parse_cycles("(0 1 2 3 4)", 5),)) == 5
    assert generated_subgroup_order(((1, 0, 2), (1, 2, 0))) == 6
    with pytest.raises(DomainError):
        generated_subgroup_order(())


@given(st.integers(0, 10**6), st.sampled_from(["S4", "A5", "Z2xZ4"]))
def test_subgroup_order_is_move_invariant(seed, name):
    rng = random.Random(seed)
    t = library.target(name)
    elements = perm.dimino(list(t.generators), t.degree)
    img = tuple(rng.choice(elements) for _ in range(3))
    before = generated_subgroup_order(img)
    for m in all_moves(3):
        assert generated_subgroup_order(apply_move_image(img, m)) == before


def test_census_examples():
    z5 = enumerate_generating_tuples("Z5", 1)
    assert z5.count == 4 and z5.class_count == 2 and z5.class_sizes == [2, 2]
    g = library.target("Z5").generators[0]
    assert {frozenset(c) for c in z5.partition()} == {
        frozenset({(g,), (perm.power(g, 4),)}),
        frozenset({(perm.power(g, 2),), (perm.power(g, 3),)}),
    }
    z2 = enumerate_generating_tuples("Z2", 1)
    assert (z2.count, z2.class_count) == (1, 1)
    s3 = enumerate_generating_tuples("S3", 2)
    assert s3.class_count == len(classes_by_orbit(s3.tuples()))


def test_census_matches_orbit_search_on_z5z5():
    census = enumerate_generating_tuples("Z5xZ5", 2)
    assert census.count == 480 and census.class_sizes == [240, 240]
    assert census.partition() == set(classes_by_orbit(census.tuples()).values())


def test_census_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_generating_tuples("S5", 3, budget=10_000)
    with pytest.raises(BudgetExceeded):
        classes_by_orbit([tuple(library.target("S8").generators)], cap=100)


# -- distinguishing --------------------------------------------------------------------


def test_distinguish_examples():
    a, b = TOY.tuple_of(["x", "y"]), TOY.tuple_of(["x^2", "y"])
    assert distinguish_via_quotients(TOY, a, a, [Z5Z5]).verdict is Distinction.INCONCLUSIVE
    res = distinguish_via_quotients(TOY, a, b, bundled_quotients(TOY))
    assert res.verdict is Distinction.DISTINCT and res.quotient == "Z5xZ5"
    assert res.checked == [("Z5", "Yes"), ("Z5xZ5", "No")]
    assert distinguish_via_quotients(TOY, a, b, []).verdict is Distinction.INCONCLUSIVE


def test_distinguish_errors():
    a = TOY.tuple_of(["x", "y"])
    other = FiniteQuotient.from_builtin("Z5xZ5", free_presentation(2, ["x", "y"]))
    with pytest.raises(DomainError):
        distinguish_via_quotients(TOY, a, a, [other])
    with pytest.raises(DomainError):
        distinguish_via_quotients(TOY, a, TOY.tuple_of(["x"]), [Z5Z5])


@settings(max_examples=20, deadline=None)
@given(st.lists(words(2, 6), min_size=2, max_size=2), st.integers(0, 60), st.integers(0, 10**6))
def test_walks_are_never_distinguished(ws, steps, seed):
    p = free_presentation(2)
    t = GeneratingTuple(tuple(ws), 2)
    walked, log = random_walk(t, steps, seed)
    assert apply_sequence(t, log) == walked
    res = distinguish_via_quotients(p, t, walked, bundled_quotients(p, ["Z5xZ5", "S4", "A5", "Z12"]))
    assert res.verdict is Distinction.INCONCLUSIVE
