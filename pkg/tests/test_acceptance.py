"""Acceptance gate: one test and one printed PASS/FAIL line per criterion."""

import contextlib
import io
import json
import random
import time
from pathlib import Path

import acceptance_log
from nielsenkit import library, perm
from nielsenkit.cli import main
from nielsenkit.moves import (
    GeneratingTuple,
    Invert,
    RightMultiply,
    all_moves,
    apply_move,
    apply_sequence,
    inverse_sequence,
    random_walk,
)
from nielsenkit.oracle import (
    Answer,
    Distinction,
    FiniteQuotient,
    bundled_quotients,
    classes_by_orbit,
    distinguish_via_quotients,
    enumerate_generating_tuples,
    image_of,
    nielsen_orbit,
    same_orbit,
)
from nielsenkit.presentation import (
    SeifertInvariants,
    Verdict,
    VerticalChoice,
    check_lm_hypotheses,
    classify_vertical_pair,
    enumerate_vertical_choices,
    free_presentation,
    parse_presentation,
)
from nielsenkit.spine import edge_slide, induced_tuple, reverse_edge, spine_from_labels
from nielsenkit.trisection import (
    HeegaardData,
    heegaard_from_vertical,
    spin,
    stabilization_robustness,
    stabilization_sequence,
    unbalanced_stabilize,
)
from nielsenkit.words import free_reduce

SAMPLES = Path(__file__).resolve().parents[1] / "samples"
TOY = parse_presentation("gens: x y\nrel: x^5\nrel: y^5\nrel: x y x^-1 y^-1\n")


def random_word(rng, rank, max_len):
    raw = [rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(rng.randint(0, max_len))]
    return free_reduce(raw, rank)


def gate(number, title, limit, check):
    """Run ``check`` (returns a detail string), time it and record one line."""
    start = time.perf_counter()
    error = None
    try:
        detail = check()
    except AssertionError as exc:
        error, detail = exc, f"assertion failed: {exc}"
    elapsed = time.perf_counter() - start
    ok = error is None and elapsed < limit
    line = (
        f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} "
        f"({elapsed:.2f} s, limit {limit} s) {detail}"
    )
    acceptance_log.LINES.append(line)
    print(line)
    if error is not None:
        raise error
    assert elapsed < limit, line


def test_criterion_1_move_inverses():
    def check():
        rng = random.Random(1)
        moves = all_moves(5)
        count = 0
        for _ in range(1000):
            t = GeneratingTuple(tuple(random_word(rng, 5, 10) for _ in range(5)), 5)
            for m in moves:
                assert apply_sequence(apply_move(t, m), inverse_sequence(m, 5)) == t, (t, m)
                count += 1
        return f"{count} move/tuple checks"

    gate(1, "apply then inverse_sequence is the identity", 5, check)


def test_criterion_2_spine_dictionary():
    def check():
        rng = random.Random(2)
        count = 0
        for _ in range(500):
            g = rng.randint(1, 5)
            s = spine_from_labels([random_word(rng, g, 12) for _ in range(g)])
            t = induced_tuple(s)
            for i in range(g):
                assert induced_tuple(reverse_edge(s, i)) == apply_move(t, Invert(i))
                count += 1
                for j in range(g):
                    if i != j:
                        assert induced_tuple(edge_slide(s, i, j)) == apply_move(t, RightMultiply(i, j))
                        count += 1
        return f"{count} slide/reverse checks"

    gate(2, "spine moves match Nielsen moves on induced tuples", 10, check)


def test_criterion_3_census_counts():
    def check():
        assert len(enumerate_vertical_choices(3)) == 3
        assert len(enumerate_vertical_choices(4)) == 7
        inv = SeifertInvariants(0, -1, ((5, 2), (7, 2), (9, 2)))
        assert check_lm_hypotheses(inv)[0]
        choices = enumerate_vertical_choices(3)
        verdicts = [
            classify_vertical_pair(inv, a, b).verdict
            for k, a in enumerate(choices) for b in choices[k + 1:]
        ]
        assert verdicts == [Verdict.DISTINCT] * 3
        return "r=3: 3, r=4: 7, (5,2),(7,2),(9,2): 3 pairs Distinct"

    gate(3, "vertical census counts and verdicts", 1, check)


def test_criterion_4_spin_shape():
    def check():
        inv = SeifertInvariants(0, -1, ((5, 2), (7, 2), (9, 2)))
        h = heegaard_from_vertical(inv, VerticalChoice.of({1, 2}, 3))
        assert h.genus == 2
        t = spin(h)
        assert (t.g, t.k) == (6, (2, 2, 2))
        a, b, c = t.sectors
        assert a.words == b.words == c.words == h.h1_tuple.words
        return "g=6, k=(2,2,2), sectors identical"

    gate(4, "spin of a genus-2 splitting", 1, check)


def ground_truth_cases():
    groups = [f"Z{n}" for n in range(2, 13)] + ["S3", "Z5xZ5"]
    for name in groups:
        t = library.target(name)
        order = len(perm.dimino(list(t.generators), t.degree))
        n = 1
        while order**n <= 10**5:
            yield name, n
            n += 1


def test_criterion_5_oracle_ground_truth():
    def check():
        cases = 0
        for name, n in ground_truth_cases():
            census = enumerate_generating_tuples(name, n)
            by_orbit = classes_by_orbit(census.tuples())
            assert census.partition() == set(by_orbit.values()), (name, n)
            cases += 1
        assert enumerate_generating_tuples("Z5", 1).class_count == 2
        return f"{cases} (group, arity) cases agree; Z5 arity 1 has 2 classes"

    gate(5, "orbit partition equals union-find partition", 60, check)


def test_criterion_6_distinguishing_certificate():
    def check():
        q = FiniteQuotient.from_builtin("Z5xZ5", TOY)
        a = image_of(TOY.tuple_of(["x", "y"]), q)
        b = image_of(TOY.tuple_of(["x^2", "y"]), q)
        res = same_orbit(a, b)
        assert res.answer is Answer.NO
        oa, ob = nielsen_orbit(a), nielsen_orbit(b)
        assert not oa.truncated and not ob.truncated
        assert oa.canonical != ob.canonical
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            code = main(["spin-compare", "--heegaard-a", str(SAMPLES / "toy_a.heegaard"),
                         "--heegaard-b", str(SAMPLES / "toy_b.heegaard"), "--quotient", "Z5xZ5"])
        assert code == 0
        verdict = json.loads(out.getvalue())["labeled"]["verdict"]
        assert verdict == "NotIsotopic"
        return f"same_orbit No, orbits {oa.size} and {ob.size} closed, pipeline {verdict}"

    gate(6, "Z5xZ5 certificate and spin-compare pipeline", 5, check)


def test_criterion_7_soundness_regression():
    def check():
        p = free_presentation(2)
        quotients = bundled_quotients(p)
        assert len(quotients) == len(library.BUNDLED)
        rng = random.Random(7)
        for k in range(200):
            n = 2 + k % 2
            t = GeneratingTuple(tuple(random_word(rng, 2, 6) for _ in range(n)), 2)
            walked, _ = random_walk(t, 25, seed=k)
            res = distinguish_via_quotients(p, t, walked, quotients)
            assert res.verdict is Distinction.INCONCLUSIVE, (k, res.quotient)
        return f"200 walk pairs over {len(quotients)} bundled quotients, none Distinct"

    gate(7, "random walks are never distinguished", 60, check)


def test_criterion_8_stabilization_invariance():
    def check():
        q = [FiniteQuotient.from_builtin("Z5xZ5", TOY)]
        a = spin(HeegaardData(TOY, TOY.tuple_of(["x", "y"]), 2))
        b = spin(HeegaardData(TOY, TOY.tuple_of(["x^2", "y"]), 2))
        base = distinguish_via_quotients(TOY, a.sectors[2], b.sectors[2], q).verdict
        for seed in range(100):
            length = 5 + seed % 16
            sa, sb = a, b
            for s in stabilization_sequence([1, 2], length, seed):
                sa, sb = unbalanced_stabilize(sa, s), unbalanced_stabilize(sb, s)
            assert sa.sectors[2] == a.sectors[2] and sb.sectors[2] == b.sectors[2]
            rep = stabilization_robustness(a, b, [1, 2], length, seed, q)
            assert rep.untouched == 3 and rep.untouched_unchanged
            assert rep.verdict is base
        return f"100 sequences, sector 3 unchanged, verdict stays {base.value}"

    gate(8, "stabilizing sectors 1 and 2 leaves sector 3 alone", 10, check)
