"""The ``framedkit`` command line.

Exit codes: 0 when every check passes, 1 when a law is violated (the
report carries a witness and a replayable workspace), 2 on input errors.
Options given on the command line override the workspace metadata, which
overrides the built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import catalog
from .doublecore import (BudgetExceeded, LawReport, LawViolation, companion_conjoint,
                         companion_equations)
from .duality import (base_change_arrow, base_change_dual_pair, check_base_change_pairs,
                      check_dual_pair, check_mates, mate, mate_inverse, search_dual_pairs)
from .fibcon import ARR, FAM, FrInstance, bc_check, bc_square_json, check_bc_pullbacks
from .finkit import FinError
from .functors import comparison_functor
from .lawsuite import (build_inverse, check_double_axioms, check_equivalence,
                       check_framed_adjunction, check_framed_functor, check_framed_structure,
                       check_framed_transformation, check_involution, check_inverse,
                       check_monoidal_framed, replaying)
from .matinst import MatInstance
from .modcon import (ModInstance, bimodule_to_profunctor, check_bimodule,
                     check_category_roundtrip)
from .spaninst import SpanInstance
from .workspace import Workspace, WorkspaceError

COMMANDS = ("compose", "unit", "restrict", "extend", "companion", "tensor-over", "fr-build",
            "bc-check", "dual-check", "mate", "check", "build-inverse")
SUITES = ("double", "framed", "monoidal", "involution", "mates", "bc", "base-change-pairs",
          "functor", "transformation", "equivalence", "adjunction", "mod-roundtrip")
# options recorded in a replay workspace, in addition to the common ones
COMMAND_OPTIONS = ("lhs", "rhs", "object", "cell", "left", "right", "arrow", "square", "module",
                   "pair", "search", "left_pair", "right_pair", "suite", "subject")


class InputError(Exception):
    pass


@dataclass
class Outcome:
    ok: bool
    result: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)
    report: LawReport | None = None
    witness: dict | None = None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="framedkit",
                                description="Compute in and check finite framed bicategories.")
    p.add_argument("command", nargs="?", choices=COMMANDS,
                   help="omit to take the command from the workspace metadata")
    p.add_argument("--instance", choices=sorted(catalog.INSTANCES))
    p.add_argument("--fault", help="a corrupted variant of the span instance")
    p.add_argument("--input", help="workspace JSON file")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--max-size", dest="max_size", type=int)
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--format", choices=("text", "json"), default="text")
    g = p.add_argument_group("command arguments")
    g.add_argument("--lhs", help="left cell of a composite")
    g.add_argument("--rhs", help="right cell of a composite")
    g.add_argument("--object", help="object (set or category) name")
    g.add_argument("--cell", help="cell to restrict or extend")
    g.add_argument("--left", help="left vertical arrow")
    g.add_argument("--right", help="right vertical arrow")
    g.add_argument("--arrow", help="vertical arrow")
    g.add_argument("--square", help="named square")
    g.add_argument("--module", choices=("arr", "fam"), help="bifibration for bc-check")
    g.add_argument("--pair", help="named dual pair")
    g.add_argument("--search", help="search dual pairs between two objects, given as A,B")
    g.add_argument("--left-pair", dest="left_pair", help="dual pair on the left of a mate")
    g.add_argument("--right-pair", dest="right_pair", help="dual pair on the right of a mate")
    g.add_argument("--suite", choices=SUITES)
    g.add_argument("--subject", help="catalog entry checked by a functor-level suite")
    return p


class Context:
    """Resolved options plus the workspace and the instance."""

    def __init__(self, args, ws: Workspace):
        meta = ws.metadata
        stored = meta.get("args", {}) if isinstance(meta.get("args", {}), dict) else {}
        self.ws = ws

        def pick(name, default=None):
            value = getattr(args, name, None)
            if value is None:
                value = meta.get(name, stored.get(name))
            return default if value is None else value

        self.command = pick("command")
        if self.command is None:
            raise InputError("no command given and the workspace metadata names none")
        if self.command not in COMMANDS:
            raise InputError(f"metadata.command: unknown command {self.command!r}")
        self.instance_name = pick("instance", "span")
        self.fault = pick("fault")
        self.seed = pick("seed", 0)
        self.samples = pick("samples")
        self.max_size = pick("max_size")
        self.opts = {name: pick(name) for name in COMMAND_OPTIONS}
        self.witness = meta.get("witness")
        for name in ("seed", "samples", "max_size"):
            value = getattr(self, name)
            if value is not None and (not isinstance(value, int) or value < 0):
                raise InputError(f"{name} must be a non-negative integer")
        try:
            self.inst = catalog.instance(self.instance_name, self.fault)
        except FinError as exc:
            raise InputError(str(exc)) from None

    def opt(self, name, required=True):
        value = self.opts.get(name)
        if value is None and required:
            raise InputError(f"{self.command} needs --{name.replace('_', '-')}")
        return value

    def n(self, default):
        return default if self.samples is None else self.samples

    def cap(self, default):
        return default if self.max_size is None else self.max_size

    def replay_workspace(self, witness):
        data = {k: v for k, v in self.ws.data.items() if k != "metadata"}
        meta = {"command": self.command, "instance": self.instance_name, "seed": self.seed,
                "args": {k: v for k, v in self.opts.items() if v is not None},
                "witness": witness}
        for name in ("fault", "samples", "max_size"):
            if getattr(self, name) is not None:
                meta[name] = getattr(self, name)
        data["metadata"] = meta
        return data


# rendering


def render_cell(inst, cell) -> list[str]:
    if isinstance(inst, FrInstance):
        return render_cell(comparison_functor(inst).cod, comparison_functor(inst).on_cell(cell))
    if isinstance(inst, ModInstance):
        return render_profunctor(bimodule_to_profunctor(inst.base, cell))
    if isinstance(inst, SpanInstance):
        return [f"  {x}: ({cell.l(x)}, {cell.r(x)})" for x in cell.apex] or ["  (empty span)"]
    if isinstance(inst, MatInstance):
        lines = [f"  ({a}, {b}): [{', '.join(cell.entry(a, b).elements)}]"
                 for a, b in cell.indices() if len(cell.entry(a, b))]
        return lines or ["  (zero matrix)"]
    return [f"  {cell!r}"]


def render_profunctor(P) -> list[str]:
    return [f"  ({x}, {y}): [{', '.join(els)}]" for x, y, els in P.sets if els] or ["  (empty)"]


def profunctor_json(P) -> dict:
    return {"sets": [[x, y, list(els)] for x, y, els in P.sets],
            "act_left": [list(t) for t in P.act_left],
            "act_right": [list(t) for t in P.act_right]}


def render_report(report: LawReport, depth: int = 0) -> list[str]:
    pad = "  " * depth
    verdict = "PASS" if report.ok else "FAIL"
    extra = f", {report.skipped} skipped" if report.skipped else ""
    lines = [f"{pad}{verdict} {report.law} ({report.samples} samples{extra})"]
    if not report.details and not report.ok and report.witness:
        message = report.witness.get("message")
        if message:
            lines.append(f"{pad}  witness: {message}")
    for key, value in sorted(report.facts.items()):
        lines.append(f"{pad}  fact {key}: {json.dumps(value, sort_keys=True)}")
    for d in report.details:
        lines.extend(render_report(d, depth + 1))
    return lines


def from_report(report: LawReport, **result) -> Outcome:
    bad = report.first_failure()
    return Outcome(report.ok, result, render_report(report), report,
                   None if bad is None else bad.witness)


# commands


def cmd_compose(ctx: Context) -> Outcome:
    ws, inst = ctx.ws, ctx.inst
    lhs, rhs = ctx.opt("lhs"), ctx.opt("rhs")
    M, N = ws.cell(inst, lhs), ws.cell(inst, rhs)
    try:
        P = inst.compose(M, N)
    except FinError as exc:
        raise InputError(f"cannot compose {lhs} with {rhs}: {exc}") from None
    return Outcome(True, {"cell": inst.encode_cell(P)},
                   [f"{lhs} ⊙ {rhs} in {inst.name}:"] + render_cell(inst, P))


def cmd_unit(ctx: Context) -> Outcome:
    name = ctx.opt("object")
    U = ctx.inst.unit(ctx.ws.object(ctx.inst, name))
    return Outcome(True, {"cell": ctx.inst.encode_cell(U)},
                   [f"U_{name} in {ctx.inst.name}:"] + render_cell(ctx.inst, U))


def _base_change(ctx: Context, kind: str) -> Outcome:
    ws, inst = ctx.ws, ctx.inst
    f, g = ws.hom(inst, ctx.opt("left")), ws.hom(inst, ctx.opt("right"))
    M = ws.cell(inst, ctx.opt("cell"))
    try:
        cell, witness = (inst.restrict if kind == "restrict" else inst.extend)(f, M, g)
    except FinError as exc:
        raise InputError(f"{kind}: {exc}") from None
    label = "restriction" if kind == "restrict" else "extension"
    return Outcome(True, {"cell": inst.encode_cell(cell),
                          "square": inst.encode_square(witness.square)},
                   [f"{label} of {ctx.opts['cell']} along ({ctx.opts['left']}, "
                    f"{ctx.opts['right']}):"] + render_cell(inst, cell))


def cmd_restrict(ctx):
    return _base_change(ctx, "restrict")


def cmd_extend(ctx):
    return _base_change(ctx, "extend")


def cmd_companion(ctx: Context) -> Outcome:
    inst = ctx.inst
    name = ctx.opt("arrow")
    f = ctx.ws.hom(inst, name)
    try:
        data = companion_conjoint(inst, f)
        failed = [law for law, lhs, rhs in companion_equations(inst, data)
                  if not inst.same_square(lhs, rhs)]
        message = f"equation {failed[0]} fails" if failed else None
    except LawViolation as exc:
        data, message = None, str(exc)
    lines = []
    result = {}
    if data is not None:
        result = {"companion": inst.encode_cell(data.companion),
                  "conjoint": inst.encode_cell(data.conjoint)}
        lines = ([f"companion of {name}:"] + render_cell(inst, data.companion)
                 + [f"conjoint of {name}:"] + render_cell(inst, data.conjoint))
    witness = None
    if message is not None:
        witness = {"law": "companion_equations", "instance": inst.name,
                   "arrow": inst.encode_arrow(f), "message": message}
        lines.append(f"FAIL companion equations: {message}")
    else:
        lines.append("PASS companion equations")
    return Outcome(message is None, result, lines, None, witness)


def cmd_tensor_over(ctx: Context) -> Outcome:
    inst = ctx.inst
    if not isinstance(inst, ModInstance):
        raise InputError("tensor-over needs --instance mod-span or mod-mat")
    lhs, rhs = ctx.opt("lhs"), ctx.opt("rhs")
    M, N = ctx.ws.cell(inst, lhs), ctx.ws.cell(inst, rhs)
    if M.right != N.left:
        raise InputError(f"bimodules {lhs} and {rhs} do not share a middle category")
    for name, B in ((lhs, M), (rhs, N)):
        report = check_bimodule(inst.base, B)
        if not report.ok:
            raise InputError(f"bimodules.{name}: not a bimodule ({report.witness['diagram']})")
    P = inst.compose(M, N)
    report = check_bimodule(inst.base, P)
    prof = bimodule_to_profunctor(inst.base, P)
    out = from_report(report, profunctor=profunctor_json(prof))
    out.lines = [f"{lhs} ⊗ {rhs} over the middle category:"] + render_profunctor(prof) + out.lines
    return out


def cmd_fr_build(ctx: Context) -> Outcome:
    fr = ctx.inst
    if not isinstance(fr, FrInstance):
        raise InputError("fr-build needs --instance fr-arr or fr-fam")
    F = comparison_functor(fr)
    direct = F.cod
    if ctx.opts.get("object") is not None:
        A = ctx.ws.object(fr, ctx.opts["object"])
        built, expected, what = F.on_cell(fr.unit(A)), direct.unit(A), f"U_{ctx.opts['object']}"
    else:
        lhs, rhs = ctx.opt("lhs"), ctx.opt("rhs")
        M, N = ctx.ws.cell(fr, lhs), ctx.ws.cell(fr, rhs)
        try:
            composite = fr.compose(M, N)
        except FinError as exc:
            raise InputError(f"cannot compose {lhs} with {rhs}: {exc}") from None
        built = F.on_cell(composite)
        expected = direct.compose(F.on_cell(M), F.on_cell(N))
        what = f"{lhs} ⊙ {rhs}"
    ok = direct.cell_iso(built, expected) is not None
    lines = [f"{what} built in {fr.name}, read as a {direct.name} cell:"] + render_cell(direct, built)
    lines.append(("PASS" if ok else "FAIL") + f" isomorphic to the composite computed in {direct.name}")
    witness = None if ok else {"law": "fr_build", "instance": fr.name,
                               "built": direct.encode_cell(built),
                               "expected": direct.encode_cell(expected)}
    return Outcome(ok, {"cell": direct.encode_cell(built)}, lines, None, witness)


def cmd_bc_check(ctx: Context) -> Outcome:
    module = ctx.opts.get("module") or "arr"
    phi = ARR if module == "arr" else FAM
    name = ctx.opts.get("square")
    if name is None:
        report = check_bc_pullbacks(phi, ctx.seed, ctx.n(100), ctx.cap(6))
        return from_report(report)
    h, k, g, f, obj = ctx.ws.base_square(name)
    if isinstance(obj, dict):
        obj = obj.get(module)
    M = ctx.ws.bc_object(module, obj, h.cod)
    if phi.base_of(M) != h.cod:
        raise InputError(f"squares.{name}: the object must lie over the codomain of h")
    verdict = bc_check(phi, h, k, g, f, M)
    if verdict.ok:
        return Outcome(True, {"iso": True}, [f"PASS bc-check {name} [{module}]: comparison is an iso"])
    w = dict(verdict.witness, square=name, law="beck_chevalley",
             maps=bc_square_json(h, k, g, f), object=phi.encode_object(M))
    lines = [f"FAIL bc-check {name} [{module}]: comparison is not an iso "
             f"(source has {w['source_size']} elements, target has {w['target_size']})"]
    return Outcome(False, {"iso": False}, lines, None, w)


def cmd_dual_check(ctx: Context) -> Outcome:
    inst, ws = ctx.inst, ctx.ws
    if ctx.opts.get("pair") is not None:
        d = ws.dual_pair(inst, ctx.opts["pair"])
        return from_report(check_dual_pair(inst, d))
    if ctx.opts.get("arrow") is not None:
        f = ws.hom(inst, ctx.opts["arrow"])
        return from_report(check_dual_pair(inst, base_change_dual_pair(inst, f)))
    if ctx.opts.get("search") is not None:
        names = ctx.opts["search"].split(",")
        if len(names) != 2:
            raise InputError("--search takes two object names, A,B")
        A, B = (ws.object(inst, x) for x in names)
        try:
            found = search_dual_pairs(inst, A, B, ctx.cap(2))
        except FinError as exc:
            raise InputError(str(exc)) from None
        arrows = [base_change_arrow(inst, d) for d in found.pairs]
        stray = [i for i, f in enumerate(arrows) if f is None]
        lines = [f"{len(found.pairs)} dual pairs up to iso, {found.examined} candidates examined"
                 + (" (partial: search budget reached)" if found.partial else "")]
        for f in arrows:
            lines.append("  base change pair of " + (
                json.dumps(f.as_dict(), sort_keys=True) if f is not None else "nothing"))
        result = {"pairs": len(found.pairs), "partial": found.partial,
                  "examined": found.examined,
                  "arrows": [None if f is None else inst.encode_arrow(f) for f in arrows]}
        witness = None
        if stray:
            d = found.pairs[stray[0]]
            witness = {"law": "only_base_change_pairs", "instance": inst.name,
                       "M": inst.encode_cell(d.M), "N": inst.encode_cell(d.N)}
            lines.append("FAIL found a dual pair that is not a base change pair")
        return Outcome(not stray, result, lines, None, witness)
    return from_report(check_base_change_pairs(inst, ctx.cap(5)))


def cmd_mate(ctx: Context) -> Outcome:
    inst, ws = ctx.inst, ctx.ws
    name = ctx.opts.get("square")
    if name is None:
        return from_report(check_mates(inst, ctx.seed, ctx.n(100), ctx.cap(3)))
    alpha = ws.square(inst, name)

    def pair(side):
        if ctx.opts.get(f"{side}_pair") is not None:
            return ws.dual_pair(inst, ctx.opts[f"{side}_pair"])
        if ctx.opts.get(side) is not None:
            return base_change_dual_pair(inst, ws.hom(inst, ctx.opts[side]))
        raise InputError(f"mate needs --{side}-pair or --{side}")
    left, right = pair("left"), pair("right")
    try:
        beta = mate(inst, alpha, left, right)
        back = mate_inverse(inst, beta, left, right, alpha.left_arrow, alpha.right_arrow)
    except FinError as exc:
        raise InputError(f"mate: {exc}") from None
    ok = inst.same_square(back, alpha)
    lines = [f"mate of {name}:", "  " + json.dumps(inst.encode_square(beta), sort_keys=True),
             ("PASS" if ok else "FAIL") + " inverse mate recovers the square"]
    witness = None if ok else {"law": "mate_roundtrip", "instance": inst.name, "square": name}
    return Outcome(ok, {"mate": inst.encode_square(beta)}, lines, None, witness)


def _subject(ctx, table, kind):
    try:
        return catalog.lookup(table, kind, ctx.opts.get("subject"))
    except FinError as exc:
        raise InputError(str(exc)) from None


def cmd_check(ctx: Context) -> Outcome:
    inst = ctx.inst
    suite = ctx.opt("suite")
    seed = ctx.seed
    if suite == "double":
        report = check_double_axioms(inst, seed, ctx.n(200), ctx.cap(5))
    elif suite == "framed":
        report = check_framed_structure(inst, seed, ctx.n(200), ctx.cap(5))
    elif suite == "monoidal":
        if not hasattr(inst, "tensor_cell"):
            raise InputError(f"instance {inst.name} has no monoidal structure")
        report = check_monoidal_framed(inst, seed, ctx.n(50), ctx.cap(3))
    elif suite == "involution":
        if not hasattr(inst, "involute"):
            raise InputError(f"instance {inst.name} has no involution")
        report = check_involution(inst, seed, ctx.n(50), ctx.cap(3))
    elif suite == "mates":
        report = check_mates(inst, seed, ctx.n(100), ctx.cap(3))
    elif suite == "bc":
        phi = ARR if (ctx.opts.get("module") or "arr") == "arr" else FAM
        report = check_bc_pullbacks(phi, seed, ctx.n(100), ctx.cap(6))
    elif suite == "base-change-pairs":
        report = check_base_change_pairs(inst, ctx.cap(5))
    elif suite == "functor":
        F = _subject(ctx, catalog.FUNCTORS, "functor")
        report = check_framed_functor(F, seed, ctx.n(50), ctx.cap(3))
    elif suite == "transformation":
        al = _subject(ctx, catalog.TRANSFORMATIONS, "transformation")
        report = check_framed_transformation(al, seed, ctx.n(50), ctx.cap(3))
    elif suite == "equivalence":
        F, choices = _subject(ctx, catalog.EQUIVALENCES, "equivalence")
        report = check_equivalence(F, choices, seed, ctx.n(100), ctx.cap(3))
    elif suite == "adjunction":
        F, G, eta, eps = _subject(ctx, catalog.ADJUNCTIONS, "adjunction")
        report = check_framed_adjunction(F, G, eta, eps, seed, ctx.n(30), ctx.cap(3))
    else:  # mod-roundtrip
        base = inst.base if isinstance(inst, ModInstance) else inst
        if not isinstance(base, (SpanInstance, MatInstance)):
            raise InputError("mod-roundtrip needs a span or matrix base")
        report = check_category_roundtrip(base, 2, ctx.cap(4))
    return from_report(report)


def cmd_build_inverse(ctx: Context) -> Outcome:
    F, choices = _subject(ctx, catalog.EQUIVALENCES, "equivalence")
    if choices is None:
        # no chosen preimages: report why F is not an equivalence
        report = check_equivalence(F, None, ctx.seed, ctx.n(100), ctx.cap(3), inverse=False)
        if report.ok:
            raise InputError(f"equivalence {ctx.opts['subject']} has no chosen preimages")
        return from_report(report)
    try:
        inv = build_inverse(F, choices)
    except LawViolation as exc:
        w = dict(exc.witness, law="build_inverse", message=str(exc))
        return Outcome(False, {}, [f"FAIL build_inverse: {exc}"], None, w)
    report = check_inverse(F, inv, ctx.seed, ctx.n(25), ctx.cap(3))
    return from_report(report, inverse=inv.functor.name)


HANDLERS = {
    "compose": cmd_compose, "unit": cmd_unit, "restrict": cmd_restrict, "extend": cmd_extend,
    "companion": cmd_companion, "tensor-over": cmd_tensor_over, "fr-build": cmd_fr_build,
    "bc-check": cmd_bc_check, "dual-check": cmd_dual_check, "mate": cmd_mate,
    "check": cmd_check, "build-inverse": cmd_build_inverse,
}


def canonical(data) -> str:
    return json.dumps(data, sort_keys=True, ensure_ascii=False)


def run(argv=None) -> tuple[int, dict, list[str]]:
    """Parse, execute and build the report; returns (exit code, report, text lines)."""
    args = build_parser().parse_args(argv)
    try:
        ws = Workspace.load(args.input) if args.input else Workspace()
        ctx = Context(args, ws)
        if ctx.witness is not None:
            with replaying(ctx.witness):
                outcome = HANDLERS[ctx.command](ctx)
        else:
            outcome = HANDLERS[ctx.command](ctx)
    except (InputError, WorkspaceError) as exc:
        return 2, {"verdict": "error", "exit_code": 2, "error": str(exc)}, [f"error: {exc}"]
    except BudgetExceeded as exc:
        message = f"search budget exceeded ({exc}); raise FRAMEDKIT_BUDGET"
        return 2, {"verdict": "error", "exit_code": 2, "error": message}, [f"error: {message}"]
    except FinError as exc:
        return 2, {"verdict": "error", "exit_code": 2, "error": str(exc)}, [f"error: {exc}"]
    code = 0 if outcome.ok else 1
    report = {"command": ctx.command, "instance": ctx.inst.name, "seed": ctx.seed,
              "verdict": "pass" if outcome.ok else "fail", "exit_code": code,
              "result": outcome.result}
    if outcome.report is not None:
        report["laws"] = outcome.report.to_json()
    lines = list(outcome.lines)
    if outcome.witness is not None:
        report["witness"] = outcome.witness
        report["replay"] = ctx.replay_workspace(outcome.witness)
    if ctx.witness is not None:
        same = outcome.witness is not None and canonical(outcome.witness) == canonical(ctx.witness)
        report["replay_identical"] = same
        lines.append("replay: witness reproduced byte for byte" if same
                     else "replay: witness NOT reproduced")
    lines.append(f"verdict: {report['verdict']}")
    return code, report, lines


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, report, lines = run(argv)
    text = canonical(report)
    if args.report:
        try:
            with open(args.report, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"error: cannot write report: {exc.strerror}", file=sys.stderr)
            return 2
    if args.format == "json":
        print(text)
    else:
        out = sys.stderr if code == 2 else sys.stdout
        print("\n".join(lines), file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())
