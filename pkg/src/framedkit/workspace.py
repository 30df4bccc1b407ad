"""JSON workspaces: named sets, functions, cells, squares and metadata.

A workspace is validated section by section when it is loaded; every
error names the offending entry (``functions.f: ...``). Cells and squares
are resolved against an instance on demand, because a span and a matrix
section can both be present and only one of them is used by a command.
"""
from __future__ import annotations

import json
from pathlib import Path

from .doublecore import companion_conjoint
from .duality import DualPairData
from .fibcon import ARR, FAM, ArrObject, FamObject, FrInstance
from .finkit import FinError, FinFn, FinSet
from .matinst import MatInstance, MatrixSquare, SetMatrix
from .modcon import FinCat, Functor, ModInstance, Profunctor, decode_category, fincat_to_monoid
from .modcon import functor_to_hom, profunctor_to_bimodule, unit_bimodule
from .spaninst import Span, SpanInstance, SpanSquare

SECTIONS = ("sets", "functions", "spans", "matrices", "categories", "monoids", "functors",
            "bimodules", "arr_objects", "fam_objects", "squares", "dual_pairs", "metadata")


class WorkspaceError(FinError):
    """Malformed or inconsistent workspace input (exit code 2)."""


def _fail(where: str, message) -> WorkspaceError:
    return WorkspaceError(f"{where}: {message}")


def _mapping(where, data):
    if not isinstance(data, dict):
        raise _fail(where, "expected an object")
    return data


def _labels(where, data) -> tuple[str, ...]:
    if not isinstance(data, list) or not all(isinstance(x, (str, int)) for x in data):
        raise _fail(where, "a set is an array of labels")
    labels = tuple(str(x) for x in data)
    if len(set(labels)) != len(labels):
        raise _fail(where, "duplicate labels")
    return labels


class Workspace:
    def __init__(self, data: dict | None = None):
        data = {} if data is None else _mapping("workspace", data)
        unknown = sorted(set(data) - set(SECTIONS))
        if unknown:
            raise _fail("workspace", f"unknown section {unknown[0]!r}")
        self.data = data
        self.metadata = dict(_mapping("metadata", data.get("metadata", {})))
        self.sets = {name: FinSet(name, _labels(f"sets.{name}", v))
                     for name, v in _mapping("sets", data.get("sets", {})).items()}
        self.functions = {}
        for name, v in _mapping("functions", data.get("functions", {})).items():
            self.functions[name] = self._function(f"functions.{name}", v)
        self.categories = {}
        for name, v in _mapping("categories", data.get("categories", {})).items():
            try:
                self.categories[name] = decode_category(v)
            except FinError as exc:
                raise _fail(f"categories.{name}", exc) from None
        self.monoids = {}
        for name, v in _mapping("monoids", data.get("monoids", {})).items():
            v = _mapping(f"monoids.{name}", v)
            self.monoids[name] = self.category(f"monoids.{name}", v.get("category"))
        self.spans = {name: self._span(f"spans.{name}", v)
                      for name, v in _mapping("spans", data.get("spans", {})).items()}
        self.matrices = {name: self._matrix(f"matrices.{name}", v)
                         for name, v in _mapping("matrices", data.get("matrices", {})).items()}
        self.arr_objects = {name: self._arr_object(f"arr_objects.{name}", v)
                            for name, v in _mapping("arr_objects",
                                                    data.get("arr_objects", {})).items()}
        self.fam_objects = {name: self._fam_object(f"fam_objects.{name}", v)
                            for name, v in _mapping("fam_objects",
                                                    data.get("fam_objects", {})).items()}
        self.functors = {name: self._functor(f"functors.{name}", v)
                         for name, v in _mapping("functors", data.get("functors", {})).items()}
        self.profunctors = {name: self._profunctor(f"bimodules.{name}", v)
                            for name, v in _mapping("bimodules",
                                                    data.get("bimodules", {})).items()}
        self.squares = dict(_mapping("squares", data.get("squares", {})))
        for name, v in self.squares.items():
            v = _mapping(f"squares.{name}", v)
            if "h" in v:
                self.base_square(name)
        self.dual_pairs = dict(_mapping("dual_pairs", data.get("dual_pairs", {})))

    @staticmethod
    def load(path) -> "Workspace":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise WorkspaceError(f"cannot read {path}: {exc.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise WorkspaceError(f"{path}: invalid JSON at line {exc.lineno}") from None
        return Workspace(data)

    # base data
    def set(self, where, ref) -> FinSet:
        if isinstance(ref, list):
            return FinSet("_", _labels(where, ref))
        if isinstance(ref, str) and ref in self.sets:
            return self.sets[ref]
        raise _fail(where, f"unknown set {ref!r}")

    def _function(self, where, v) -> FinFn:
        v = _mapping(where, v)
        for key in ("dom", "cod", "map"):
            if key not in v:
                raise _fail(where, f"missing {key!r}")
        dom, cod = self.set(f"{where}.dom", v["dom"]), self.set(f"{where}.cod", v["cod"])
        table = {str(k): str(x) for k, x in _mapping(f"{where}.map", v["map"]).items()}
        for x in dom:
            if x not in table:
                raise _fail(where, f"no image for {x!r}")
        for x, y in table.items():
            if x not in dom:
                raise _fail(where, f"{x!r} is not in the domain")
            if y not in cod:
                raise _fail(where, f"image {y!r} of {x!r} is not in the codomain")
        return FinFn.from_dict(dom, cod, table)

    def arrow(self, where, ref) -> FinFn:
        if isinstance(ref, dict):
            return self._function(where, ref)
        if isinstance(ref, str):
            if ref in self.functions:
                return self.functions[ref]
            if ref.startswith("id:"):
                return FinFn.identity(self.set(where, ref[3:]))
        raise _fail(where, f"unknown function {ref!r}")

    def category(self, where, ref) -> FinCat:
        if isinstance(ref, dict):
            try:
                return decode_category(ref)
            except FinError as exc:
                raise _fail(where, exc) from None
        if isinstance(ref, str):
            if ref in self.categories:
                return self.categories[ref]
            if ref in self.monoids:
                return self.monoids[ref]
        raise _fail(where, f"unknown category {ref!r}")

    def _span(self, where, v) -> Span:
        v = _mapping(where, v)
        A, B = self.set(f"{where}.left", v.get("left")), self.set(f"{where}.right", v.get("right"))
        legs = {}
        for x, ab in _mapping(f"{where}.apex", v.get("apex", {})).items():
            if not isinstance(ab, list) or len(ab) != 2:
                raise _fail(where, f"apex element {x!r} needs a pair [left, right]")
            a, b = str(ab[0]), str(ab[1])
            if a not in A:
                raise _fail(where, f"left leg of {x!r} is {a!r}, not in {A.name}")
            if b not in B:
                raise _fail(where, f"right leg of {x!r} is {b!r}, not in {B.name}")
            legs[str(x)] = (a, b)
        return Span.make(A, B, legs, where.split(".")[-1])

    def _matrix(self, where, v) -> SetMatrix:
        v = _mapping(where, v)
        A, B = self.set(f"{where}.rows", v.get("rows")), self.set(f"{where}.cols", v.get("cols"))
        table = {}
        for a, row in _mapping(f"{where}.entries", v.get("entries", {})).items():
            if a not in A:
                raise _fail(where, f"row {a!r} is not in {A.name}")
            for b, elems in _mapping(f"{where}.entries.{a}", row).items():
                if b not in B:
                    raise _fail(where, f"column {b!r} is not in {B.name}")
                table[(a, b)] = list(_labels(f"{where}.entries.{a}.{b}", elems))
        return SetMatrix.from_table(A, B, table)

    def _arr_object(self, where, v) -> ArrObject:
        v = _mapping(where, v)
        base = self.set(f"{where}.base", v.get("base"))
        proj = {str(x): str(b) for x, b in _mapping(f"{where}.proj", v.get("proj", {})).items()}
        for x, b in proj.items():
            if b not in base:
                raise _fail(where, f"{x!r} lies over {b!r}, not in {base.name}")
        total = FinSet(where.split(".")[-1], tuple(proj))
        return ArrObject(total, base, FinFn.from_dict(total, base, proj))

    def _fam_object(self, where, v) -> FamObject:
        v = _mapping(where, v)
        index = self.set(f"{where}.index", v.get("index"))
        fibers = _mapping(f"{where}.fibers", v.get("fibers", {}))
        for i in fibers:
            if i not in index:
                raise _fail(where, f"fiber over {i!r}, which is not in {index.name}")
        return FamObject(index, tuple(FinSet(i, _labels(f"{where}.fibers.{i}", fibers.get(i, [])))
                                      for i in index))

    def _functor(self, where, v) -> Functor:
        v = _mapping(where, v)
        C, D = self.category(f"{where}.src", v.get("src")), self.category(f"{where}.tgt", v.get("tgt"))
        try:
            objs = FinFn.from_dict(C.objects, D.objects,
                                   _mapping(f"{where}.objects", v.get("objects", {})))
            mors = FinFn.from_dict(C.morphisms, D.morphisms,
                                   _mapping(f"{where}.morphisms", v.get("morphisms", {})))
            return Functor(C, D, objs, mors)
        except FinError as exc:
            raise _fail(where, exc) from None

    def _profunctor(self, where, v):
        v = _mapping(where, v)
        if "hom" in v:
            return ("hom", self.category(f"{where}.hom", v["hom"]))
        C, D = self.category(f"{where}.left", v.get("left")), self.category(f"{where}.right", v.get("right"))
        sets_in = _mapping(f"{where}.sets", v.get("sets", {}))
        sets = []
        for x in C.objects:
            row = _mapping(f"{where}.sets.{x}", sets_in.get(x, {}))
            for y in row:
                if y not in D.objects:
                    raise _fail(where, f"{y!r} is not an object of the right category")
            for y in D.objects:
                sets.append((x, y, _labels(f"{where}.sets.{x}.{y}", row.get(y, []))))
        for x in sets_in:
            if x not in C.objects:
                raise _fail(where, f"{x!r} is not an object of the left category")
        P = Profunctor(C, D, tuple(sets), tuple(tuple(map(str, t)) for t in v.get("act_left", [])),
                       tuple(tuple(map(str, t)) for t in v.get("act_right", [])))
        _check_profunctor(where, P)
        return ("profunctor", P)

    def base_square(self, name):
        where = f"squares.{name}"
        v = self.squares.get(name)
        if not isinstance(v, dict) or "h" not in v:
            raise _fail("squares", f"no base square named {name!r}")
        h, k, g, f = (self.arrow(f"{where}.{key}", v.get(key)) for key in ("h", "k", "g", "f"))
        if h.dom != k.dom or h.cod != g.dom or k.cod != f.dom or g.cod != f.cod:
            raise _fail(where, "the four maps h, k, g, f do not form a square")
        if h.then(g) != k.then(f):
            bad = next(a for a in h.dom if g(h(a)) != f(k(a)))
            raise _fail(where, f"the square does not commute at {bad!r}")
        return h, k, g, f, v.get("object")

    # instance-dependent resolution
    def object(self, inst, ref):
        where = f"object {ref!r}"
        if isinstance(inst, ModInstance):
            return fincat_to_monoid(inst.base, self.category(where, ref))
        return self.set(where, ref)

    def hom(self, inst, ref):
        if isinstance(inst, ModInstance):
            if ref in self.functors:
                F = self.functors[ref]
                return functor_to_hom(inst.base, F, fincat_to_monoid(inst.base, F.src),
                                      fincat_to_monoid(inst.base, F.tgt))
            if isinstance(ref, str) and ref.startswith("id:"):
                return inst.v_id(self.object(inst, ref[3:]))
            raise _fail(f"arrow {ref!r}", "unknown functor")
        return self.arrow(f"arrow {ref!r}", ref)

    def cell(self, inst, ref):
        """A horizontal cell: a name or an expression such as
        {"compose": [..]}, {"unit": A}, {"companion": f}, {"conjoint": f}."""
        if isinstance(ref, dict):
            if len(ref) != 1:
                raise _fail(f"cell {ref!r}", "an expression has exactly one key")
            (op, arg), = ref.items()
            if op == "compose":
                if not isinstance(arg, list) or not arg:
                    raise _fail(f"cell {ref!r}", "compose takes a non-empty array")
                cells = [self.cell(inst, r) for r in arg]
                out = cells[0]
                for c in cells[1:]:
                    try:
                        out = inst.compose(out, c)
                    except FinError as exc:
                        raise _fail(f"cell {ref!r}", exc) from None
                return out
            if op == "unit":
                return inst.unit(self.object(inst, arg))
            if op in ("companion", "conjoint"):
                data = companion_conjoint(inst, self.hom(inst, arg))
                return data.companion if op == "companion" else data.conjoint
            raise _fail(f"cell {ref!r}", f"unknown operation {op!r}")
        if not isinstance(ref, str):
            raise _fail(f"cell {ref!r}", "expected a name or an expression")
        if isinstance(inst, ModInstance):
            if ref not in self.profunctors:
                raise _fail(f"bimodules", f"no bimodule named {ref!r}")
            kind, P = self.profunctors[ref]
            if kind == "hom":
                return unit_bimodule(fincat_to_monoid(inst.base, P))
            try:
                return profunctor_to_bimodule(inst.base, P)
            except (FinError, KeyError) as exc:
                raise _fail(f"bimodules.{ref}", f"actions are incomplete: {exc}") from None
        base = inst
        if isinstance(inst, FrInstance):
            base = SpanInstance() if inst.phi is ARR else MatInstance()
        if isinstance(base, SpanInstance):
            if ref not in self.spans:
                raise _fail("spans", f"no span named {ref!r}")
            cell = self.spans[ref]
        elif isinstance(base, MatInstance):
            if ref not in self.matrices:
                raise _fail("matrices", f"no matrix named {ref!r}")
            cell = self.matrices[ref]
        else:
            raise _fail(f"cell {ref!r}", f"instance {inst.name} has no named cells")
        if isinstance(inst, FrInstance):
            from .functors import comparison_choices
            cell = comparison_choices(inst).cell(cell)
        return cell

    def square(self, inst, name):
        where = f"squares.{name}"
        v = self.squares.get(name)
        if not isinstance(v, dict) or "src" not in v:
            raise _fail("squares", f"no double square named {name!r}")
        src, tgt = self.cell(inst, v["src"]), self.cell(inst, v["tgt"])
        f = self.hom(inst, v["left"]) if "left" in v else inst.v_id(src.left_frame)
        g = self.hom(inst, v["right"]) if "right" in v else inst.v_id(src.right_frame)
        try:
            if isinstance(inst, SpanInstance):
                table = {str(k): str(x) for k, x in _mapping(f"{where}.map", v.get("map", {})).items()}
                return SpanSquare(src, tgt, f, g, FinFn.from_dict(src.apex, tgt.apex, table))
            if isinstance(inst, MatInstance):
                maps = _mapping(f"{where}.maps", v.get("maps", {}))
                fns = []
                for a, b in src.indices():
                    table = maps.get(a, {}).get(b, {})
                    fns.append(FinFn.from_dict(src.entry(a, b), tgt.entry(f(a), g(b)),
                                               {str(k): str(x) for k, x in table.items()}))
                return MatrixSquare(src, tgt, f, g, tuple(fns))
        except (FinError, AttributeError) as exc:
            raise _fail(where, exc) from None
        raise _fail(where, f"squares are not supported for instance {inst.name}")

    def dual_pair(self, inst, name) -> DualPairData:
        where = f"dual_pairs.{name}"
        v = self.dual_pairs.get(name)
        if not isinstance(v, dict):
            raise _fail("dual_pairs", f"no dual pair named {name!r}")
        for key in ("M", "N", "ev", "coev"):
            if key not in v:
                raise _fail(where, f"missing {key!r}")
        return DualPairData(self.cell(inst, v["M"]), self.cell(inst, v["N"]),
                            self.square(inst, v["ev"]), self.square(inst, v["coev"]))

    def bc_object(self, module, ref, B):
        table = self.arr_objects if module == "arr" else self.fam_objects
        if ref is None:
            # the default object over B: the identity (one element per point)
            if module == "arr":
                return ArrObject(B, B, FinFn.identity(B))
            return FamObject(B, tuple(FinSet(b, ("*",)) for b in B))
        if ref not in table:
            raise _fail(f"{module}_objects", f"no object named {ref!r}")
        return table[ref]


def _check_profunctor(where, P: Profunctor):
    C, D = P.left, P.right
    lt, rt = P.left_table(), P.right_table()
    for t in P.act_left + P.act_right:
        if len(t) != 4:
            raise _fail(where, f"action record {list(t)} needs four entries")
    for f in C.morphisms:
        x, w = C.src(f), C.tgt(f)
        for y in D.objects:
            for p in P.elements(w, y):
                r = lt.get((f, y, p))
                if r is None:
                    raise _fail(where, f"left action of {f} on {p!r} in ({w},{y}) is missing")
                if r not in P.elements(x, y):
                    raise _fail(where, f"left action of {f} on {p!r} lands outside ({x},{y})")
    for g in D.morphisms:
        z, y = D.src(g), D.tgt(g)
        for x in C.objects:
            for p in P.elements(x, z):
                r = rt.get((x, p, g))
                if r is None:
                    raise _fail(where, f"right action of {g} on {p!r} in ({x},{z}) is missing")
                if r not in P.elements(x, y):
                    raise _fail(where, f"right action of {g} on {p!r} lands outside ({x},{y})")
    # action laws, named by the first failing instance
    for x in C.objects:
        for y in D.objects:
            for p in P.elements(x, y):
                if lt[(C.identity(x), y, p)] != p:
                    raise _fail(where, f"identity {C.identity(x)} does not act trivially on {p!r}")
                if rt[(x, p, D.identity(y))] != p:
                    raise _fail(where, f"identity {D.identity(y)} does not act trivially on {p!r}")
    for f, f2, ff in C.composition:
        x, w = C.src(f), C.tgt(f2)
        for y in D.objects:
            for p in P.elements(w, y):
                if lt[(ff, y, p)] != lt[(f, y, lt[(f2, y, p)])]:
                    raise _fail(where, f"left action is not associative at ({f}, {f2}, {p})")
    for g, g2, gg in D.composition:
        z, y = D.src(g), D.tgt(g2)
        for x in C.objects:
            for p in P.elements(x, z):
                if rt[(x, p, gg)] != rt[(x, rt[(x, p, g)], g2)]:
                    raise _fail(where, f"right action is not associative at ({p}, {g}, {g2})")
    for f in C.morphisms:
        for g in D.morphisms:
            x, w, z, y = C.src(f), C.tgt(f), D.src(g), D.tgt(g)
            for p in P.elements(w, z):
                if lt[(f, y, rt[(w, p, g)])] != rt[(x, lt[(f, z, p)], g)]:
                    raise _fail(where, f"actions do not commute at ({f}, {p}, {g})")


__all__ = ["Workspace", "WorkspaceError", "SECTIONS"]
