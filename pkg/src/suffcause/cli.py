"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal failure.
Significance of a test never changes the exit code.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import __version__
from .core import COUNT, PROBABILITY, LiteralSet, read_truth_table
from .empirical import (
    Design,
    irreducibility_contrast,
    msc_contrast,
    read_counts,
    singularity_contrast,
)
from .engine import (
    Representation,
    avoidance_representation,
    canonical_representation,
    essential_prime_implicants,
    prime_implicants,
    verify_representation,
)
from .errors import (
    ContractViolation,
    DataError,
    SuffCauseError,
    Unsupported,
    UnsupportedSize,
    UsageError,
)
from .interaction import (
    cell_means_from_population,
    extend_cause_set,
    irreducibility_finding,
    pns,
    pns_lower_bound,
    singularity_finding,
)
from .trees import LiteralTree, degree, enumerate_trees, m_irred, m_sing, prufer_encode

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


@dataclass
class AnalysisConfig:
    command: str
    inputs: list = field(default_factory=list)
    exposures: tuple | None = None
    strata: tuple = ()
    design: str = "cohort"
    b: list = field(default_factory=list)
    bplus: list | None = None
    c2: tuple | None = None
    assume_monotone: tuple = ()
    continuity: float = 0.0
    fmt: str = "text"

    def record(self) -> dict:
        """Verbatim user assertions, for inclusion in reports."""
        out = {"design": self.design}
        if self.bplus:
            out["bplus"] = list(self.bplus)
        if self.c2:
            out["c2"] = list(self.c2)
        if self.assume_monotone:
            out["assume_monotone"] = list(self.assume_monotone)
        if self.continuity:
            out["continuity"] = self.continuity
        return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def resolve_input(path: str) -> Path:
    """Existing path, or the name of a bundled fixture."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("suffcause") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise DataError(f"no such file: {path}")


def _split(values) -> list:
    out = []
    for v in values or ():
        out.extend(x.strip() for x in v.split(",") if x.strip())
    return out


def _parse_set(text, names) -> LiteralSet:
    if text.strip().lower() in ("", "none", "{}"):
        return LiteralSet()
    try:
        return LiteralSet.parse(text, names)
    except ContractViolation as exc:
        raise UsageError(str(exc)) from None


def _check_in_range(b: LiteralSet, k: int, names):
    if b.max_var() >= k:
        raise UsageError(f"{b} references a variable beyond the {k} declared exposures")


def _emit(obj, fmt, text_lines, out):
    if fmt == "json":
        out.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")
    else:
        out.write("\n".join(text_lines) + "\n")


# --------------------------------------------------------------------------
# analyze
# --------------------------------------------------------------------------

def cmd_analyze(args, out) -> int:
    mode = PROBABILITY if args.prob_mode else COUNT
    pop = read_truth_table(resolve_input(args.file), mode)
    if args.individuals:
        pop = pop.subset(_split(args.individuals))
    k = pop.k
    report = {"k": k, "mode": mode, "individuals": [], "queries": []}
    lines = [f"k={k} individuals={len(pop)} mode={mode}"]
    for m in pop.members:
        pis = prime_implicants(m.table)
        epis = essential_prime_implicants(m.table)
        entry = {
            "id": m.id,
            "weight": m.weight,
            "outcomes": "".join(map(str, m.table.outcomes)),
            "tautology": pis.tautology,
            "prime_implicants": [b.names() for b in pis],
            "essential_prime_implicants": [b.names() for b in epis],
        }
        report["individuals"].append(entry)
        lines.append(
            f"individual {m.id}: D={entry['outcomes']} "
            f"PI={' '.join(str(b) for b in pis) or ('(constant 1)' if pis.tautology else '-')} "
            f"EPI={' '.join(str(b) for b in epis) or '-'}"
        )
    extra = _split(args.extend_with)
    for text in args.b or ():
        b = _parse_set(text, None)
        if not b:
            raise UsageError("--b needs at least one literal")
        _check_in_range(b, k, None)
        irr = irreducibility_finding(pop, b)
        sing = singularity_finding(pop, b)
        if extra:
            irr = extend_cause_set(irr, extra, args.not_influenced)
            sing = extend_cause_set(sing, extra, args.not_influenced)
        q = {"b": b.names(), "irreducible": irr.to_dict(), "singular": sing.to_dict()}
        lines.append(f"query b={b}")
        lines.append(f"  irreducible: {'yes' if irr.holds else 'no'}" + _witness_text(irr))
        lines.append(f"  singular: {'yes' if sing.holds else 'no'}" + _witness_text(sing))
        for note in irr.assumptions:
            lines.append(f"  assumption: {note}")
        for note in irr.warnings + sing.warnings:
            lines.append(f"  warning: {note}")
        if not irr.holds:
            rep = avoidance_representation(pop, b)
            if rep is None:
                raise SuffCauseError("avoidance representation failed for a reducible conjunction")
            q["avoidance_representation"] = rep.to_dict()
            lines.append(f"  avoidance representation ({len(rep)} conjuncts, none containing {b}):")
            lines.extend("    " + _pair_text(rep, i) for i in range(len(rep)))
        if mode == PROBABILITY and len(b) == k and b.variables == frozenset(range(k)):
            exact = pns(pop, b)
            bound = pns_lower_bound(cell_means_from_population(pop, b))
            q["pns"] = exact
            q["pns_lower_bound"] = bound
            lines.append(f"  PNS={exact:.6g} lower bound from cell means={bound:.6g}")
        report["queries"].append(q)
    if args.representation:
        rep = canonical_representation(pop)
        report["canonical_representation"] = rep.to_dict()
        lines.append(f"canonical representation ({len(rep)} conjuncts):")
        lines.extend("  " + _pair_text(rep, i) for i in range(len(rep)))
    _emit(report, args.format, lines, out)
    return EXIT_OK


def _witness_text(finding) -> str:
    w = finding.witness
    if w is None:
        return ""
    d = w.to_dict(finding.partition)
    ctx = ",".join(f"{k}={v}" for k, v in d["context"].items())
    return f" (witness: individual {w.individual_id}" + (f", {ctx}" if ctx else "") + ")"


def _pair_text(rep: Representation, i: int) -> str:
    mem, b = rep.pairs[i]
    who = ",".join(x for x, a in zip(rep.ids, mem) if a) or "-"
    return f"A{i + 1}=[{who}] B{i + 1}={b}"


# --------------------------------------------------------------------------
# test
# --------------------------------------------------------------------------

def _trees_for(bplus: LiteralSet, allow_large: bool):
    if len(bplus) <= 1:
        return [None]
    return list(enumerate_trees(bplus, allow_large=allow_large))


def config_from_args(args) -> AnalysisConfig:
    return AnalysisConfig(
        command=args.command,
        inputs=[args.file],
        exposures=tuple(_split(args.exposures)) or None,
        strata=tuple(_split(args.strata)),
        design=args.design,
        b=_split([args.b]) if args.b else [],
        bplus=list(args.bplus) if args.bplus else None,
        c2=tuple(_split([args.c2])) if args.c2 else None,
        assume_monotone=tuple(_split(args.assume_monotone)),
        continuity=args.continuity,
        fmt=args.format,
    )


def cmd_test(args, out) -> int:
    config = config_from_args(args)
    design = Design(args.design)
    d = read_counts(
        resolve_input(args.file), design,
        tuple(_split(args.exposures)) or None, tuple(_split(args.strata)),
    )
    names = d.exposure_names
    if not args.b:
        raise UsageError("test needs --b")
    b = _parse_set(args.b, names)
    if not b:
        raise UsageError("--b needs at least one literal")
    _check_in_range(b, d.k, names)
    monotone = _parse_set(",".join(_split(args.assume_monotone)), names) if args.assume_monotone else LiteralSet()
    if args.bplus:
        bplus_sets = [_parse_set(x, names) for x in args.bplus]
    else:
        bplus_sets = [LiteralSet(monotone & b)]
    declared = set(monotone)
    for bp in bplus_sets:
        if not bp <= b:
            raise UsageError(f"bplus {bp.names(names)} is not a subset of b")
        declared |= set(bp)
    c2 = None
    if args.c2 is not None:
        try:
            c2 = tuple(int(x) for x in _split([args.c2]))
        except ValueError:
            raise UsageError("--c2 takes comma-separated 0/1 values") from None
    results = []
    for w in d.strata:
        for bp in bplus_sets:
            for tree in _trees_for(bp, args.allow_large):
                if args.condition == "irreducible":
                    r = irreducibility_contrast(d, b, bp, tree, c2, w, args.continuity)
                elif args.condition == "singular":
                    r = singularity_contrast(d, b, bp, tree, w, args.continuity)
                else:
                    if bp:
                        raise UsageError("--condition msc does not take --bplus")
                    r = msc_contrast(d, b, w, args.continuity)
                results.append(r)
            if args.condition == "msc":
                break
    report = {
        "design": design.value,
        "exposures": list(names),
        "b": b.names(names),
        "condition": args.condition,
        "config": config.record(),
        "declared_monotone": LiteralSet(declared).names(names),
        "conditions_tried": len(results),
        "results": [r.to_dict() for r in results],
        "summary": _summary(results, args.condition, b, names),
    }
    lines = [
        f"design={design.value} exposures={','.join(names)} b={{{','.join(b.names(names))}}} "
        f"condition={args.condition}"
    ]
    for r in results:
        lines.append(r.condition_id)
        lines.append(f"  {r.expression}")
        lines.append(
            f"  estimate={r.estimate:.4f} se={r.std_error:.4f} "
            f"95% CI=({r.ci_low:.4f}, {r.ci_high:.4f}) one-sided p={r.p_value:.4f}"
        )
        for note in r.warnings:
            lines.append(f"  warning: {note}")
    lines.append(f"conditions tried: {len(results)} (no multiplicity correction)")
    if results:
        lines.append("assumptions: " + "; ".join(dict.fromkeys(a for r in results for a in r.assumptions)))
    lines.extend(report["summary"])
    _emit(report, args.format, lines, out)
    return EXIT_OK


_CLAIMS = {
    "irreducible": "sufficient cause interaction (irreducibility) of",
    "singular": "singular interaction of",
    "msc": "minimal sufficient cause for some individual:",
}


def _summary(results, condition, b, names) -> list:
    label = "{" + ",".join(b.names(names)) + "}"
    sig = [r for r in results if r.ci_low > 0]
    if sig:
        return [
            f"conclusion: {_CLAIMS[condition]} {label} is supported by {len(sig)} of "
            f"{len(results)} conditions at the 95% level, under the listed assumptions"
        ]
    pos = sum(r.positive for r in results)
    return [
        f"conclusion: no condition is significant; {pos} of {len(results)} estimates are positive, "
        f"which does not establish {_CLAIMS[condition]} {label}"
    ]


# --------------------------------------------------------------------------
# trees / coef
# --------------------------------------------------------------------------

def _lattice(args):
    if args.b:
        b = _parse_set(args.b, None)
    elif args.k is not None:
        b = LiteralSet.parse([f"X{j + 1}" for j in range(args.k)])
    else:
        raise UsageError("give --k or --b")
    if not b:
        raise UsageError("b must be nonempty")
    return b


def cmd_trees(args, out) -> int:
    if args.n is not None:
        bplus = LiteralSet.parse([f"X{j + 1}" for j in range(args.n)]) if args.n else LiteralSet()
        b = bplus if args.b is None else _parse_set(args.b, None)
    else:
        b = _lattice(args)
        bplus = b if args.bplus is None else _parse_set(args.bplus, None)
    if not bplus <= b:
        raise UsageError("bplus must be a subset of b")
    for tree in enumerate_trees(bplus, allow_large=args.allow_large):
        rec = {
            "edges": [sorted(str(v) for v in e) for e in tree.literal_edges()],
            "prufer": list(prufer_encode(tree)),
            "degrees": {str(v): degree(tree, v) for v in tree.vertices},
        }
        if b:
            rec["m_irred"] = m_irred(b, bplus, tree).to_dict()
            rec["m_sing"] = m_sing(b, bplus, tree).to_dict()
            rec["irreducibility"] = m_irred(b, bplus, tree).render()
            rec["singularity"] = m_sing(b, bplus, tree).render()
        out.write(json.dumps(rec) + "\n")
    return EXIT_OK


def cmd_coef(args, out) -> int:
    b = _lattice(args)
    bplus = _parse_set(args.bplus, None) if args.bplus else LiteralSet()
    if not bplus <= b:
        raise UsageError("bplus must be a subset of b")
    if args.tree:
        edges = [tuple(_parse_set(e.replace("-", ","), None).ordered()) for e in _split([args.tree])]
        try:
            trees = [LiteralTree.from_literal_edges(sorted(bplus), edges)]
        except (ContractViolation, KeyError) as exc:
            raise UsageError(f"bad tree: {exc}") from None
    else:
        trees = list(enumerate_trees(bplus, allow_large=args.allow_large))
    records = []
    lines = []
    for tree in trees:
        mi, ms = m_irred(b, bplus, tree), m_sing(b, bplus, tree)
        rec = {
            "tree": tree.describe(),
            "m_irred": mi.to_dict(),
            "m_sing": ms.to_dict(),
            "irreducibility": mi.render(),
            "singularity": ms.render(),
        }
        records.append(rec)
        lines.append(f"tree {rec['tree']}")
        lines.append(f"  irreducible if {rec['irreducibility']}")
        lines.append(f"  singular if    {rec['singularity']}")
    _emit({"b": b.names(), "bplus": bplus.names(), "trees": records}, args.format, lines, out)
    return EXIT_OK


# --------------------------------------------------------------------------
# repr
# --------------------------------------------------------------------------

def cmd_repr(args, out) -> int:
    pop = read_truth_table(resolve_input(args.file))
    if args.individuals:
        pop = pop.subset(_split(args.individuals))
    if args.verify:
        try:
            data = json.loads(Path(args.verify).read_text())
            rep = Representation.from_dict(data, pop.ids)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise DataError(f"cannot read representation: {exc}") from None
        ok = verify_representation(rep, pop)
        _emit({"verified": ok}, args.format, [f"verified: {'yes' if ok else 'no'}"], out)
        return EXIT_OK
    if args.avoid:
        b = _parse_set(args.avoid, None)
        _check_in_range(b, pop.k, None)
        rep = avoidance_representation(pop, b)
        if rep is None:
            _emit(
                {"avoid": b.names(), "representation": None, "irreducible": True},
                args.format,
                [f"no representation avoids {b}: it is irreducible"],
                out,
            )
            return EXIT_OK
    else:
        rep = canonical_representation(pop)
    if args.format == "json":
        out.write(rep.to_json() + "\n")
    else:
        out.write("\n".join(_pair_text(rep, i) for i in range(len(rep))) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="suffcause", description="Sufficient-cause analysis of binary outcomes.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    a = sub.add_parser("analyze", help="counterfactual analysis of a truth-table file")
    a.add_argument("file")
    a.add_argument("--b", action="append", help="literal set to query, e.g. X2,!X3 (repeatable)")
    a.add_argument("--individuals", action="append", help="restrict to these ids")
    a.add_argument("--prob-mode", action="store_true", help="weights are probabilities")
    a.add_argument("--representation", action="store_true", help="emit the canonical representation")
    a.add_argument("--extend-with", action="append", help="extra variables for extending findings")
    a.add_argument("--not-influenced", action="store_true",
                   help="declare the --extend-with variables not causally influenced by the modeled ones")
    common(a)

    t = sub.add_parser("test", help="empirical tests on stratified counts")
    t.add_argument("file")
    t.add_argument("--design", choices=[x.value for x in Design], default="cohort")
    t.add_argument("--exposures", action="append")
    t.add_argument("--strata", action="append")
    t.add_argument("--b")
    t.add_argument("--bplus", action="append", help="monotone subset of b; 'none' for empty (repeatable)")
    t.add_argument("--c2", help="values for exposures outside b, comma-separated")
    t.add_argument("--assume-monotone", action="append", help="literals declared positively monotone")
    t.add_argument("--condition", choices=("irreducible", "singular", "msc"), default="irreducible")
    t.add_argument("--continuity", type=float, default=0.0)
    t.add_argument("--allow-large", action="store_true")
    common(t)

    tr = sub.add_parser("trees", help="spanning trees and coefficient vectors as JSON lines")
    tr.add_argument("n", nargs="?", type=int)
    tr.add_argument("--k", type=int)
    tr.add_argument("--b")
    tr.add_argument("--bplus")
    tr.add_argument("--allow-large", action="store_true")

    c = sub.add_parser("coef", help="linear constraints on saturated-model coefficients")
    c.add_argument("--k", type=int)
    c.add_argument("--b")
    c.add_argument("--bplus")
    c.add_argument("--tree", help="edges like X1-X2,X2-X3")
    c.add_argument("--allow-large", action="store_true")
    common(c)

    r = sub.add_parser("repr", help="sufficient-cause representations")
    r.add_argument("file")
    r.add_argument("--avoid", help="build a representation with no conjunct containing this set")
    r.add_argument("--verify", help="representation JSON to check against the file")
    r.add_argument("--individuals", action="append")
    common(r)
    return parser


COMMANDS = {
    "analyze": cmd_analyze,
    "test": cmd_test,
    "trees": cmd_trees,
    "coef": cmd_coef,
    "repr": cmd_repr,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        return COMMANDS[args.command](args, out)
    except (UsageError, Unsupported, UnsupportedSize) as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (DataError, ContractViolation) as exc:
        # contract violations reached from the command line come from the input
        err.write(f"data error: {exc}\n")
        return EXIT_DATA
    except SuffCauseError as exc:
        err.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL

if __name__ == "__main__":
    sys.exit(main())
