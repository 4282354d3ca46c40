"""Command line driver with JSON run artifacts.

Subcommands: `walter` computes a windowed slice of the ternary-law
classifying ring (axiom relations folded into a Groebner state with
trivial-variable elimination), `verify` checks the five axioms of a named
or saved law, `functor` applies sigma / N / C / W to a group law, and
`buchstaber` presents the degree-0 coefficient ring of the universal
2-valued law.

Artifacts are JSON documents with a fixed field order, so regression
files diff cleanly and a read-then-rewrite roundtrip is byte-identical.
Exit codes: 0 success, 2 verification or content failure, 3 step-budget
exhaustion (the partial artifact carries "incomplete": true), 4 usage
error.  The environment variable FTL_STEP_BUDGET caps pair reductions.
--threads is accepted for script compatibility; the engine itself runs
sequentially.
"""

from __future__ import annotations

import argparse
import json
import sys

from .fgl import FGL, additive, functor_N, functor_sigma, multiplicative
from .ftl import chow, hmw, ko, verify_ftl, witt
from .groebner import Budget, BudgetExhausted, incremental_gb, run_result
from .poly import (
    KIND_EPSILON,
    KIND_GEOM,
    KIND_INVERTER,
    KIND_T,
    KIND_USER,
    PolyRing,
    QQ,
    Variable,
    ZZ,
    Zmod,
    geom_var,
)
from .relgen import (
    DegreeWindow,
    build_generic_law,
    context_relations,
    generate_relations,
    relation_ring,
)
from .series import MSeries, series_ring
from .twofgl import compute_B0, functor_C

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_BUDGET = 3
EXIT_USAGE = 4

NAMED_LAWS = {"chow": chow, "hmw": hmw, "ko": ko, "witt": witt}

_EPS_VALUE = {"free": None, "+1": 1, "-1": -1}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract here reserves 2 for
    verification failures, so remap."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class CliError(Exception):
    """Content-level failure (bad file, failed gate); exits EXIT_FAIL."""


# -- JSON artifacts ----------------------------------------------------------


def write_json(path: str, doc: dict) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _coeff_ring(label: str):
    if label == "Z":
        return ZZ
    if label == "Q":
        return QQ
    body = label[2:] if label.startswith("Z/") else label[1:]
    if label.startswith("Z") and body.isdigit():
        return Zmod(int(body))
    raise ValueError(f"unknown ring {label!r}; expected Z, Q or Z/<n>")


def _coeff_sort_key(v: Variable):
    return (-v.grade, v.index, v.name)


def _state_doc(command: str, ring_label: str, degree_range, epsilon: str,
               inverted, res) -> dict:
    doc = {
        "schema-version": SCHEMA_VERSION,
        "command": command,
        "ring": ring_label,
        "degree_range": list(degree_range),
        "epsilon": epsilon,
        "inverted": list(inverted),
        "fixed": {
            v.name: p.text()
            for v, p in sorted(res.fixed.items(),
                               key=lambda kv: _coeff_sort_key(kv[0]))
        },
        "free": [v.name for v in res.free],
        "relations": [p.text() for p in res.relations],
        "stats": {
            "steps": res.stats.steps,
            "skipped": res.stats.skipped,
            "pair_reductions": res.stats.pair_reductions,
            "max_basis": res.stats.max_basis,
        },
    }
    if not res.complete:
        doc["incomplete"] = True
    return doc


# -- law (de)serialization ---------------------------------------------------


def _series_doc(command: str, series: MSeries, *, kind: str, epsilon: str,
                modulo=(), report=None) -> dict:
    ring = series.ring
    cvars = [v for v in ring.vars if v.kind not in (KIND_GEOM, KIND_T)]
    doc = {
        "schema-version": SCHEMA_VERSION,
        "command": command,
        "kind": kind,
        "epsilon": epsilon,
        "degree": series.trunc,
        "variables": [[v.name, v.kind, v.grade] for v in cvars],
        "gvars": [v.name for v in series.gvars],
        "components": [c.text() for c in series.components],
        "modulo": [p.text() for p in modulo],
    }
    if report is not None:
        doc["verify"] = report
    return doc


def _load_variables(entries):
    out = []
    for name, vkind, grade in entries:
        # structural kinds survive the roundtrip; coefficient flavors
        # collapse to plain symbols (their indices are not serialized)
        if vkind in (KIND_EPSILON, KIND_INVERTER):
            out.append(Variable(name, vkind, grade))
        else:
            out.append(Variable(name, KIND_USER, grade))
    return out


def _series_from_doc(doc: dict):
    try:
        cvars = _load_variables(doc["variables"])
        SR = series_ring(cvars, list(doc["gvars"]), coeff=ZZ)
        comps = [SR.parse(s) for s in doc["components"]]
        series = MSeries(SR, tuple(doc["gvars"]), comps,
                         trunc=int(doc["degree"]), validate=False)
        modulo = tuple(SR.parse(s) for s in doc.get("modulo", ()))
        epsilon = _EPS_VALUE[doc.get("epsilon", "free")]
    except (KeyError, ValueError, TypeError) as exc:
        raise CliError(f"bad law file: {exc}") from exc
    return series, epsilon, modulo


def _fgl_from_doc(doc: dict) -> FGL:
    try:
        cvars = _load_variables(doc["variables"])
        gvars = [geom_var(n) for n in doc["gvars"]]
        R = PolyRing(cvars + gvars, coeff=ZZ)
        return FGL(R.parse(doc["series"]), int(doc["degree"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise CliError(f"bad group-law file: {exc}") from exc


def _report_doc(rep) -> dict:
    out = {ax: ("pass" if not any(rs) else "fail")
           for ax, rs in rep.residuals.items()}
    if rep.aborted_at is not None:
        out["associativity"] = "fail"
    out["strong-neutral"] = "holds" if rep.strong_neutral_holds else "fails"
    return out


# -- walter ------------------------------------------------------------------


def run_walter_pipeline(window: DegreeWindow, *, coeff=ZZ,
                        epsilon: str = "free", invert2: bool = False,
                        prereduce: bool = True, budget: Budget | None = None):
    """Windowed classifying-ring computation, in two incremental stages.

    Stage one folds the context relations and the cheap axioms (neutral,
    linearity, weak neutral); their eliminations fix most coefficients.
    Stage two substitutes those values into the generic law before
    expanding associativity: the fully generic expansion is out of reach
    beyond tiny windows, while the plugged one stays tractable.
    Returns the final GBState (complete=False on budget exhaustion).
    """
    budget = budget or Budget()
    R = relation_ring(window, epsilon=epsilon, invert2=invert2, coeff=coeff)
    seed = [p for _, p in context_relations(R, epsilon=epsilon,
                                            invert2=invert2)]
    head = generate_relations(window, epsilon=epsilon, invert2=invert2,
                              rel_ring=R,
                              phases=("neutral", "linearity", "weak-neutral"))
    state = incremental_gb(head, R, prereduce=prereduce, seed=seed,
                           budget=budget)
    if not state.complete:
        return state
    law = build_generic_law(window, coeff=coeff)
    SR = law.ring
    subs = {}
    for v, val in state.fixed.items():
        try:
            subs[SR.vars[SR.var_index(v)]] = SR.parse(val.text())
        except (KeyError, ValueError):
            # value mentions a symbol the law ring lacks (the 2-inverter);
            # the fold substitutes it on the relation side instead
            continue
    if subs:
        comps = [c.subs(subs).reduce_epsilon() for c in law.components]
        law = MSeries(SR, law.gvars, comps, trunc=law.trunc, validate=False)
    stream = generate_relations(window, epsilon=epsilon, invert2=invert2,
                                law=law, rel_ring=R,
                                phases=("associativity",))
    return incremental_gb(stream, R, prereduce=prereduce, resume=state,
                          budget=budget)


def cmd_walter(ns) -> int:
    try:
        window = DegreeWindow(ns.dmin, ns.dmax)
        coeff = _coeff_ring(ns.ring)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    state = run_walter_pipeline(window, coeff=coeff, epsilon=ns.epsilon,
                                invert2=ns.invert_2, prereduce=ns.prereduce)
    res = run_result(state)
    doc = _state_doc(_command_line(), ns.ring, (window.d_min, window.d_max),
                     ns.epsilon, [2] if ns.invert_2 else [], res)
    write_json(ns.out, doc)
    print(f"fixed={len(res.fixed)} free={len(res.free)} "
          f"relations={len(res.relations)}"
          + ("" if res.complete else " (incomplete)"), file=sys.stderr)
    return EXIT_OK if res.complete else EXIT_BUDGET


# -- verify ------------------------------------------------------------------


def cmd_verify(ns) -> int:
    if ns.law in NAMED_LAWS:
        rep = NAMED_LAWS[ns.law](ns.degree).report
    else:
        try:
            doc = read_json(ns.law)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except json.JSONDecodeError as exc:
            print(f"error: {ns.law}: {exc}", file=sys.stderr)
            return EXIT_FAIL
        series, epsilon, modulo = _series_from_doc(doc)
        rep = verify_ftl(series, epsilon=epsilon, modulo=modulo)
    for line in rep.lines():
        print(line)
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- functor -----------------------------------------------------------------


def _source_fgl(spec: str, D: int) -> FGL:
    if spec == "additive":
        return additive(D)
    if spec == "multiplicative" or spec.startswith("multiplicative:"):
        _, _, name = spec.partition(":")
        return multiplicative(name or "a", D)
    doc = read_json(spec)
    if doc.get("kind") != "fgl":
        raise CliError(f"{spec}: expected a group-law file (kind fgl)")
    F = _fgl_from_doc(doc)
    if F.D < D:
        raise CliError(f"{spec}: stored degree {F.D} is below the "
                       f"required {D}")
    return F


def cmd_functor(ns) -> int:
    try:
        if ns.via == "sigma":
            series = functor_sigma(_source_fgl(ns.source, ns.degree))
            kind, modulo, report = "2fgl", (), None
        elif ns.via == "N":
            # the norm construction halves precision
            series = functor_N(_source_fgl(ns.source, 2 * ns.degree))
            kind, modulo, report = "2fgl", (), None
        elif ns.via == "C":
            try:
                doc = read_json(ns.source)
            except (OSError, json.JSONDecodeError):
                doc = None
            if doc is None or doc.get("kind") != "2fgl":
                raise CliError(
                    "functor C consumes a saved 2-valued law; apply N or "
                    "sigma to a group law first")
            inner, _, modulo = _series_from_doc(doc)
            series = functor_C(inner, modulo=modulo)
            kind, report = "ftl", None
        else:  # W = C after N
            half = functor_N(_source_fgl(ns.source, 2 * ns.degree))
            series = functor_C(half)
            rep = verify_ftl(series, epsilon=-1)
            kind, modulo, report = "ftl", (), _report_doc(rep)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"error: {ns.source}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (CliError, ValueError) as exc:
        # ValueError carries the type-I gate and precision complaints
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    doc = _series_doc(_command_line(), series, kind=kind, epsilon="-1",
                      modulo=modulo, report=report)
    write_json(ns.out, doc)
    if report is not None and any(
            v == "fail" for k, v in report.items() if k != "strong-neutral"):
        return EXIT_FAIL
    return EXIT_OK


# -- buchstaber ----------------------------------------------------------------


def cmd_buchstaber(ns) -> int:
    # the integral presentation is the classical (epsilon = -1) story;
    # keeping epsilon free gives the refined one
    mode = "refined" if ns.epsilon == "free" else "integral"
    res = compute_B0(mode=mode)
    doc = _state_doc(_command_line(), "Z", (0, 0), ns.epsilon, [], res)
    write_json(ns.out, doc)
    return EXIT_OK if res.complete else EXIT_BUDGET


# -- entry point ---------------------------------------------------------------


_ARGV: list[str] | None = None


def _command_line() -> str:
    args = _ARGV if _ARGV is not None else sys.argv[1:]
    return "multiform " + " ".join(args)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; runs sequentially")
    parser = _Parser(prog="multiform", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="cmd", required=True,
                                parser_class=_Parser)

    w = sub.add_parser("walter", parents=[common],
                       help="windowed classifying-ring run")
    w.add_argument("--ring", default="Z", help="Z, Q or Z/<n>")
    w.add_argument("--dmin", type=int, required=True)
    w.add_argument("--dmax", type=int, required=True)
    w.add_argument("--epsilon", choices=("free", "+1", "-1"), default="free")
    w.add_argument("--invert-2", action="store_true",
                   help="adjoin alpha with 2*alpha - 1 = 0")
    w.add_argument("--prereduce", action=argparse.BooleanOptionalAction,
                   default=True,
                   help="reduce each relation by the basis before folding")
    w.add_argument("--out", default="-", help="output file ('-' = stdout)")
    w.set_defaults(fn=cmd_walter)

    v = sub.add_parser("verify", parents=[common],
                       help="check the five ternary-law axioms")
    v.add_argument("--law", required=True,
                   help="chow, hmw, ko, witt, or a saved law file")
    v.add_argument("--degree", type=int, default=8,
                   help="truncation for named laws (files keep their own)")
    v.set_defaults(fn=cmd_verify)

    f = sub.add_parser("functor", parents=[common],
                       help="apply sigma, N, C or W")
    f.add_argument("--from", dest="source", required=True,
                   help="additive, multiplicative[:name], or a saved file")
    f.add_argument("--via", choices=("sigma", "N", "C", "W"), required=True)
    f.add_argument("--degree", type=int, default=6)
    f.add_argument("--out", default="-")
    f.set_defaults(fn=cmd_functor)

    b = sub.add_parser("buchstaber", parents=[common],
                       help="degree-0 ring of the universal 2-valued law")
    b.add_argument("--epsilon", choices=("free", "-1"), default="free")
    b.add_argument("--out", default="-")
    b.set_defaults(fn=cmd_buchstaber)
    return parser


def main(argv=None) -> int:
    global _ARGV
    _ARGV = list(argv) if argv is not None else None
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.threads < 1:
        parser.error("--threads must be positive")
    try:
        return ns.fn(ns)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
