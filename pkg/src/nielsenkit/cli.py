"""Command line front end.

Every command writes one JSON report (``--out`` or stdout).  Identical
arguments give byte-identical reports.  Exit codes: 0 success (whatever the
verdict), 2 usage, 3 invalid input file, 4 resource refusal.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from nielsenkit import library, perm
from nielsenkit.errors import BudgetExceeded, DomainError, InvalidQuotient
from nielsenkit.moves import format_move, parse_tuple
from nielsenkit.oracle import (
    DEFAULT_BUDGET,
    DEFAULT_CAP,
    FiniteQuotient,
    classes_by_orbit,
    distinguish_via_quotients,
    enumerate_generating_tuples,
    image_of,
    nielsen_orbit,
    parse_quotient,
)
from nielsenkit.presentation import (
    Presentation,
    VerticalChoice,
    check_lm_hypotheses,
    classify_vertical_pair,
    enumerate_vertical_choices,
    free_presentation,
    fuchsian_quotient,
    parse_sfs,
    vertical_system,
)
from nielsenkit.spine import connect_spines, format_spine_move, parse_spine
from nielsenkit.trisection import (
    Mode,
    Outcome,
    balanced_stabilize,
    compare_trisections,
    heegaard_from_vertical,
    parse_heegaard,
    spin,
    stabilization_robustness,
)

REPORT_FORMAT = "nielsenkit-report/1"
LM_NOTE = (
    "classification hypotheses hold: distinct Nielsen classes imply non-diffeomorphic "
    "for this family, since generating systems of the Fuchsian quotient are "
    "Nielsen equivalent after an automorphism if and only if they are "
    "Nielsen equivalent"
)


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _subset(text: str) -> frozenset[int]:
    try:
        return frozenset(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad subset {text!r}") from None


def _exponents(text: str | None) -> dict[int, int] | None:
    if not text:
        return None
    out = {}
    try:
        for item in text.split(","):
            i, _, k = item.partition("=")
            out[int(i)] = int(k)
    except ValueError:
        raise UsageError(f"bad exponent map {text!r}") from None
    return out


def _sfs(args):
    try:
        return parse_sfs(args.sfs)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def load_quotients(specs, p: Presentation, notes: list[str]) -> list[FiniteQuotient]:
    """Resolve ``--quotient`` values: existing files first, then built-in names."""
    out = []
    for spec in specs or []:
        path = Path(spec)
        if path.is_file():
            try:
                out.append(parse_quotient(path.read_text(), p, name=path.name))
            except InvalidQuotient as exc:
                raise InputError(f"{spec}: {exc} (failing relator: {exc.relator})") from None
            except DomainError as exc:
                raise InputError(f"{spec}: {exc}") from None
        elif library.is_builtin(spec):
            try:
                out.append(FiniteQuotient.from_builtin(spec, p))
            except InvalidQuotient as exc:
                raise InputError(f"{spec}: {exc} (failing relator: {exc.relator})") from None
        else:
            notes.append(f"quotient {spec!r} not found; skipped")
    if not out:
        notes.append("no usable quotients; comparisons are inconclusive")
    return out


def _distinguish_json(res) -> dict:
    return {
        "verdict": res.verdict.value,
        "quotient": res.quotient,
        "exhausted_side": res.exhausted,
        "exhausted_orbit_size": res.exhausted_size,
        "checked": [{"quotient": q, "same_orbit": a} for q, a in res.checked],
    }


def _compare_json(res) -> dict:
    return {
        "mode": res.mode.value,
        "verdict": res.outcome.value,
        "obstructions": [
            {
                "sector_permutation": list(sigma),
                "sector": ob.sector,
                "matched_sector": ob.other,
                **_distinguish_json(ob.detail),
            }
            for sigma, ob in res.obstructions
        ],
    }


# -- commands -------------------------------------------------------------------


def cmd_vertical_census(args) -> dict:
    inv = _sfs(args)
    try:
        choices = enumerate_vertical_choices(inv.r)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    ok, reasons = check_lm_hypotheses(inv)
    p = fuchsian_quotient(inv)
    systems = []
    for s in choices:
        c = VerticalChoice.of(s, inv.r)
        t = vertical_system(inv, c)
        systems.append({
            "subset": sorted(s),
            "excluded_q": c.excluded_q,
            "tuple": [p.format(w) for w in t.words],
        })
    matrix = [[classify_vertical_pair(inv, a, b).verdict.value for b in choices] for a in choices]
    reasons_matrix = [[classify_vertical_pair(inv, a, b).reason for b in choices] for a in choices]
    report = {
        "sfs": inv.format(),
        "choices": [sorted(s) for s in choices],
        "choice_count": len(choices),
        "hypotheses_hold": ok,
        "hypothesis_failures": reasons,
        "verdicts": matrix,
        "verdict_reasons": reasons_matrix,
        "genus": 2 * inv.g + inv.r - 1,
        "fuchsian_presentation": {
            "gens": list(p.generator_names),
            "rels": [p.format(r) for r in p.relators],
        },
        "systems": systems,
    }
    summary = [
        f"{inv.format()}: {len(choices)} vertical choices, hypotheses "
        + ("hold" if ok else "fail: " + "; ".join(reasons)),
    ]
    off = {matrix[i][j] for i in range(len(choices)) for j in range(len(choices)) if i != j}
    summary.append("off-diagonal verdicts: " + (", ".join(sorted(off)) if off else "none"))
    if args.quotient:
        notes: list[str] = []
        qs = load_quotients(args.quotient, p, notes)
        exp = []
        for i, a in enumerate(choices):
            for j in range(i + 1, len(choices)):
                ta = vertical_system(inv, VerticalChoice.of(a, inv.r))
                tb = vertical_system(inv, VerticalChoice.of(choices[j], inv.r))
                res = distinguish_via_quotients(p, ta, tb, qs, args.cap, args.workers)
                exp.append({"pair": [sorted(a), sorted(choices[j])], **_distinguish_json(res)})
        report["quotient_experiment"] = exp
        report["notes"] = notes
    return {"summary": summary, **report}


def _heegaard_pair(args):
    if args.heegaard_a or args.heegaard_b:
        if not (args.heegaard_a and args.heegaard_b):
            raise UsageError("give both --heegaard-a and --heegaard-b")
        try:
            ha = parse_heegaard(_read(args.heegaard_a))
            hb = parse_heegaard(_read(args.heegaard_b))
        except DomainError as exc:
            raise InputError(str(exc)) from None
        return ha, hb, None
    if not (args.sfs and args.choice_a and args.choice_b):
        raise UsageError("give --heegaard-a/--heegaard-b or --sfs with --choice-a/--choice-b")
    inv = _sfs(args)
    try:
        ca = VerticalChoice.of(_subset(args.choice_a), inv.r)
        cb = VerticalChoice.of(_subset(args.choice_b), inv.r)
        ha = heegaard_from_vertical(inv, ca, _exponents(args.exponents_a))
        hb = heegaard_from_vertical(inv, cb, _exponents(args.exponents_b))
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return ha, hb, inv


def _trisection_json(t) -> dict:
    return {
        "g": t.g,
        "k": list(t.k),
        "sectors": [[t.group.format(w) for w in s.words] for s in t.sectors],
    }


def _shape(t) -> str:
    return f"({t.g},({','.join(map(str, t.k))}))"


def cmd_spin_compare(args) -> dict:
    ha, hb, inv = _heegaard_pair(args)
    if ha.group != hb.group:
        raise InputError("the two Heegaard data use different presentations")
    notes: list[str] = []
    qs = load_quotients(args.quotient, ha.group, notes)
    ta, tb = spin(ha), spin(hb)
    labeled = compare_trisections(ta, tb, qs, args.cap, Mode.LABELED, args.workers)
    unlabeled = compare_trisections(ta, tb, qs, args.cap, Mode.UNLABELED, args.workers)
    if inv is not None and check_lm_hypotheses(inv)[0] and labeled.outcome is Outcome.NOT_ISOTOPIC:
        notes.append(LM_NOTE)
    summary = [
        f"trisections {_shape(ta)} vs {_shape(tb)}",
        f"labeled: {labeled.outcome.value}",
        f"unlabeled: {unlabeled.outcome.value}",
    ]
    if labeled.obstructions:
        ob = labeled.obstructions[0][1]
        summary.append(f"certificate: sector {ob.sector}, quotient {ob.detail.quotient}")
    return {
        "summary": summary,
        "trisection_a": _trisection_json(ta),
        "trisection_b": _trisection_json(tb),
        "labeled": _compare_json(labeled),
        "unlabeled": _compare_json(unlabeled),
        "quotients": [q.name for q in qs],
        "notes": notes,
    }


def _load_group(args):
    if args.group_file:
        text = _read(args.group_file)
        degree = None
        names, gens = [], []
        try:
            for raw in text.splitlines():
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, value = line.partition(":")
                if key.strip() == "degree":
                    degree = int(value)
                elif key.startswith("gen ") and degree is not None:
                    names.append(key[4:].strip())
                    gens.append(perm.parse_cycles(value, degree))
                else:
                    raise DomainError(f"bad group line {raw!r}")
        except (DomainError, ValueError) as exc:
            raise InputError(f"{args.group_file}: {exc}") from None
        if degree is None or not gens:
            raise InputError(f"{args.group_file}: needs a degree line and generators")
        return args.group_file, names, tuple(gens), degree
    if not args.group:
        raise UsageError("give --group or --group-file")
    try:
        t = library.target(args.group)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    names = [f"g{i + 1}" for i in range(len(t.generators))]
    return t.name, names, t.generators, t.degree


def cmd_orbit(args) -> dict:
    name, names, gens, degree = _load_group(args)
    if args.tuple is not None:
        try:
            p = free_presentation(len(names), names)
            q = FiniteQuotient(p, degree, gens, name)
            img = image_of(parse_tuple(args.tuple, names), q)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        res = nielsen_orbit(img, args.cap, workers=args.workers, degree=degree)
        return {
            "summary": [
                f"orbit in {name}: size {res.size}" + (" (truncated)" if res.truncated else "")
            ],
            "group": name,
            "tuple": [perm.format_cycles(x) for x in img],
            "size": res.size,
            "truncated": res.truncated,
            "canonical": None if res.canonical is None else [perm.format_cycles(x) for x in res.canonical],
            "witness": None if res.witness_log is None else [format_move(m) for m in res.witness_log],
        }
    if args.arity is None:
        raise UsageError("give --tuple or --arity")
    census = enumerate_generating_tuples(gens, args.arity, args.budget)
    by_orbit = classes_by_orbit(census.tuples(), args.cap, args.workers)
    agree = census.partition() == set(by_orbit.values())
    canon = sorted(by_orbit)
    return {
        "summary": [
            f"{name}, arity {args.arity}: {census.count} generating tuples in "
            f"{census.class_count} Nielsen class{'' if census.class_count == 1 else 'es'}; orbit search "
            + ("agrees" if agree else "DISAGREES")
        ],
        "group": name,
        "group_order": len(census.elements),
        "arity": args.arity,
        "generating_tuples": census.count,
        "class_count": census.class_count,
        "class_sizes": census.class_sizes,
        "orbit_class_count": len(by_orbit),
        "partitions_agree": agree,
        "canonical_forms": [[perm.format_cycles(x) for x in c] for c in canon],
    }


def cmd_stab_robustness(args) -> dict:
    ha, hb, _ = _heegaard_pair(args)
    if ha.group != hb.group:
        raise InputError("the two Heegaard data use different presentations")
    sectors = sorted(_subset(args.sectors))
    if set(sectors) == {1, 2, 3}:
        raise UsageError("cannot stabilize all three sectors")
    if not set(sectors) <= {1, 2, 3}:
        raise UsageError("sectors must be drawn from 1, 2, 3")
    notes: list[str] = []
    qs = load_quotients(args.quotient, ha.group, notes)
    ta, tb = spin(ha), spin(hb)
    rep = stabilization_robustness(ta, tb, sectors, args.length, args.seed, qs, args.cap, args.workers)
    plain = distinguish_via_quotients(
        ta.group, ta.sectors[rep.untouched - 1], tb.sectors[rep.untouched - 1], qs, args.cap, args.workers
    )
    out = {
        "summary": [
            f"stabilized sectors {sectors} {args.length} times; sector {rep.untouched} "
            f"verdict {rep.verdict.value} (unstabilized: {plain.verdict.value}); "
            f"sector {rep.untouched} unchanged: {rep.untouched_unchanged}"
        ],
        "sectors": sectors,
        "sequence": rep.sequence,
        "untouched_sector": rep.untouched,
        "untouched_unchanged": rep.untouched_unchanged,
        "verdict": _distinguish_json(rep.detail),
        "unstabilized_verdict": _distinguish_json(plain),
        "after": [_trisection_json(rep.after[0]), _trisection_json(rep.after[1])],
        "notes": notes,
    }
    if args.balanced:
        ba, bb = balanced_stabilize(ta), balanced_stabilize(tb)
        res = compare_trisections(ba, bb, qs, args.cap, Mode.LABELED, args.workers)
        out["balanced"] = {
            "trisection_a": _trisection_json(ba),
            "trisection_b": _trisection_json(bb),
            "compare": _compare_json(res),
        }
        out["summary"].append(f"after one balanced stabilization: {res.outcome.value}")
    return out


def cmd_spine_connect(args) -> dict:
    try:
        s1 = parse_spine(_read(args.from_file))
        s2 = parse_spine(_read(args.to_file))
    except DomainError as exc:
        raise InputError(str(exc)) from None
    try:
        found = connect_spines(s1, s2, args.max_depth)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return {
        "summary": [
            f"witness of length {len(found)}" if found is not None
            else f"no witness within depth {args.max_depth} (not a disproof)"
        ],
        "found": found is not None,
        "witness": None if found is None else [format_spine_move(m) for m in found],
        "max_depth": args.max_depth,
    }


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="orbit visited-state cap")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--quotient", action="append", default=[],
                        help="quotient file or built-in name (repeatable)")
    common.add_argument("--workers", type=int, default=1)

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("--heegaard-a")
    pair.add_argument("--heegaard-b")
    pair.add_argument("--sfs")
    pair.add_argument("--choice-a")
    pair.add_argument("--choice-b")
    pair.add_argument("--exponents-a")
    pair.add_argument("--exponents-b")

    parser = argparse.ArgumentParser(prog="nielsenkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vertical-census", parents=[common])
    p.add_argument("--sfs", required=True)
    p.set_defaults(func=cmd_vertical_census)

    p = sub.add_parser("spin-compare", parents=[common, pair])
    p.set_defaults(func=cmd_spin_compare)

    p = sub.add_parser("orbit", parents=[common])
    p.add_argument("--group")
    p.add_argument("--group-file")
    p.add_argument("--tuple")
    p.add_argument("--arity", type=int)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("stab-robustness", parents=[common, pair])
    p.add_argument("--sectors", default="1,2")
    p.add_argument("--length", type=int, default=20)
    p.add_argument("--balanced", action="store_true")
    p.set_defaults(func=cmd_stab_robustness)

    p = sub.add_parser("spine-connect", parents=[common])
    p.add_argument("--from", dest="from_file", required=True)
    p.add_argument("--to", dest="to_file", required=True)
    p.add_argument("--max-depth", type=int, default=6)
    p.set_defaults(func=cmd_spine_connect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cap < 1 or args.workers < 1:
        parser.error("--cap and --workers must be positive")
    try:
        body = args.func(args)
    except UsageError as exc:
        print(f"nielsenkit: error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"nielsenkit: invalid input: {exc}", file=sys.stderr)
        return 3
    except BudgetExceeded as exc:
        print(f"nielsenkit: refused: {exc}", file=sys.stderr)
        return 4
    report = {"format": REPORT_FORMAT, "command": args.command, **body}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
