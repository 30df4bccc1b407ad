"""Monoids, bimodules and the framed bicategory Mod(D) of a base instance
with local coequalizers (spans or set-valued matrices).

The tensor of bimodules M ⊙_B N is the coequalizer of the two actions of
B on M ⊙ N, computed in the base. Actions, horizontal composites and
coherence cells of Mod(D) are all induced by descending base squares
along such coequalizers.

Monoids in Span(FinSet) and Mat(FinSet) are small categories, so this
module also carries a minimal finite-category type, functors, and the
translation of Mat bimodules into profunctors.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _cartesian
from typing import Iterator

from .doublecore import (BudgetExceeded, CartesianWitness, DoubleInstance, LawReport,
                         LawViolation, extend_via_companions, factor_through_companions,
                         factor_universal, search_budget)
from .finkit import FinError, FinFn, FinSet, all_functions, pair_label
from .matinst import STAR, MatInstance, MatrixSquare, SetMatrix, tagged
from .spaninst import Span, SpanInstance, SpanSquare

# finite categories


@dataclass(frozen=True)
class FinCat:
    """A finite category with diagrammatic composition: comp[(f, g)] = f;g."""

    objects: FinSet
    morphisms: FinSet
    src: FinFn
    tgt: FinFn
    identities: tuple[str, ...]  # one per object, in object order
    composition: tuple[tuple[str, str, str], ...]  # (f, g, f;g)

    def __post_init__(self):
        object.__setattr__(self, "identities", tuple(self.identities))
        object.__setattr__(self, "composition", tuple(tuple(t) for t in self.composition))
        self.validate()

    @property
    def table(self) -> dict[tuple[str, str], str]:
        return {(f, g): h for f, g, h in self.composition}

    def identity(self, x: str) -> str:
        return self.identities[self.objects.index(x)]

    def hom(self, x: str, y: str) -> list[str]:
        return [f for f in self.morphisms if self.src(f) == x and self.tgt(f) == y]

    def composable(self) -> Iterator[tuple[str, str]]:
        for f in self.morphisms:
            for g in self.morphisms:
                if self.tgt(f) == self.src(g):
                    yield f, g

    def compose(self, f: str, g: str) -> str:
        return self.table[(f, g)]

    def validate(self) -> None:
        if self.src.dom != self.morphisms or self.tgt.dom != self.morphisms:
            raise FinError("source and target must be defined on the morphisms")
        if self.src.cod != self.objects or self.tgt.cod != self.objects:
            raise FinError("source and target must land in the objects")
        if len(self.identities) != len(self.objects):
            raise FinError("a category needs one identity per object")
        for x, i in zip(self.objects, self.identities):
            if i not in self.morphisms or self.src(i) != x or self.tgt(i) != x:
                raise FinError(f"identity of {x} is not an endomorphism of {x}")
        table: dict[tuple[str, str], str] = {}
        for f, g, h in self.composition:
            if (f, g) in table:
                raise FinError(f"composite of ({f}, {g}) is given twice")
            if f not in self.morphisms or g not in self.morphisms or h not in self.morphisms:
                raise FinError(f"composition entry ({f}, {g}, {h}) uses unknown morphisms")
            if self.tgt(f) != self.src(g):
                raise FinError(f"({f}, {g}) is not composable")
            if self.src(h) != self.src(f) or self.tgt(h) != self.tgt(g):
                raise FinError(f"composite {h} of ({f}, {g}) has the wrong endpoints")
            table[(f, g)] = h
        for f, g in self.composable():
            if (f, g) not in table:
                raise FinError(f"composite of ({f}, {g}) is missing")
        for f in self.morphisms:
            if table[(self.identity(self.src(f)), f)] != f or table[(f, self.identity(self.tgt(f)))] != f:
                raise FinError(f"identity law fails at {f}")
        for (f, g), fg in table.items():
            for h in self.morphisms:
                if self.tgt(g) == self.src(h) and table[(fg, h)] != table[(f, table[(g, h)])]:
                    raise FinError(f"composition is not associative at ({f}, {g}, {h})")

    @staticmethod
    def build(objects, morphisms: dict[str, tuple[str, str]], identities: dict[str, str],
              comp: dict[tuple[str, str], str]) -> "FinCat":
        obj = objects if isinstance(objects, FinSet) else FinSet("Ob", tuple(objects))
        mor = FinSet("Mor", tuple(morphisms))
        src = FinFn(mor, obj, tuple(morphisms[f][0] for f in mor))
        tgt = FinFn(mor, obj, tuple(morphisms[f][1] for f in mor))
        return FinCat(obj, mor, src, tgt, tuple(identities[x] for x in obj),
                      tuple((f, g, h) for (f, g), h in comp.items()))


def discrete_category(objects: FinSet) -> FinCat:
    ids = {x: f"id_{x}" for x in objects}
    return FinCat.build(objects, {ids[x]: (x, x) for x in objects}, ids,
                        {(ids[x], ids[x]): ids[x] for x in objects})


def preorder_category(objects: FinSet, relation: set[tuple[str, str]]) -> FinCat:
    """The preorder generated by ``relation`` (reflexive-transitive closure)."""
    order = {(x, x) for x in objects} | set(relation)
    changed = True
    while changed:
        changed = False
        for (x, y) in list(order):
            for (y2, z) in list(order):
                if y == y2 and (x, z) not in order:
                    order.add((x, z))
                    changed = True

    def label(x, y):
        return f"id_{x}" if x == y else f"{x}<{y}"
    pairs = [(x, y) for x in objects for y in objects if (x, y) in order]
    morphisms = {label(x, y): (x, y) for x, y in pairs}
    comp = {(label(x, y), label(y2, z)): label(x, z)
            for x, y in pairs for y2, z in pairs if y == y2}
    return FinCat.build(objects, morphisms, {x: label(x, x) for x in objects}, comp)


def monoid_category(name: str, elements: list[str], mult: dict[tuple[str, str], str],
                    unit: str) -> FinCat:
    """A one-object category from a monoid table (diagrammatic order)."""
    obj = FinSet("Ob", (name,))
    return FinCat.build(obj, {m: (name, name) for m in elements}, {name: unit}, mult)


def walking_arrow(prefix: str = "x") -> FinCat:
    a, b = f"{prefix}0", f"{prefix}1"
    return preorder_category(FinSet("Ob", (a, b)), {(a, b)})


def walking_idempotent(prefix: str = "x") -> FinCat:
    i, e = f"id_{prefix}", f"{prefix}e"
    return monoid_category(prefix, [i, e], {(i, i): i, (i, e): e, (e, i): e, (e, e): e}, i)


def cyclic_two(prefix: str = "x") -> FinCat:
    i, s = f"id_{prefix}", f"{prefix}s"
    return monoid_category(prefix, [i, s], {(i, i): i, (i, s): s, (s, i): s, (s, s): i}, i)


def random_category(rng, cap: int, prefix: str = "x") -> FinCat:
    roll = rng.random()
    if roll < 0.15:
        return walking_idempotent(prefix)
    if roll < 0.25:
        return cyclic_two(prefix)
    n = rng.randint(0 if roll < 0.3 else 1, max(1, cap))
    objects = FinSet("Ob", tuple(f"{prefix}{i}" for i in range(n)))
    relation = {(objects.elements[i], objects.elements[j])
                for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5}
    return preorder_category(objects, relation)


def enumerate_categories(max_objects: int = 2, max_morphisms: int = 4) -> Iterator[FinCat]:
    """Every category structure on objects x0..x{n-1} whose morphisms are the
    identities plus labeled extra arrows, for all hom-set sizes within the
    caps. Isomorphic copies are not removed."""
    for n in range(max_objects + 1):
        objs = [f"x{i}" for i in range(n)]
        slots = [(x, y) for x in objs for y in objs]
        spare = max_morphisms - n
        if spare < 0:
            continue
        for counts in _cartesian(range(spare + 1), repeat=len(slots)):
            if sum(counts) > spare:
                continue
            yield from _category_tables(objs, slots, counts)


def _category_tables(objs, slots, counts):
    morphisms = {f"id_{x}": (x, x) for x in objs}
    k = 0
    for (x, y), c in zip(slots, counts):
        for _ in range(c):
            morphisms[f"f{k}"] = (x, y)
            k += 1
    ids = {x: f"id_{x}" for x in objs}
    idset = set(ids.values())
    names = list(morphisms)
    comp: dict[tuple[str, str], str] = {}
    for f in names:
        for g in names:
            if morphisms[f][1] != morphisms[g][0]:
                continue
            if f in idset:
                comp[(f, g)] = g
            elif g in idset:
                comp[(f, g)] = f
    free = [(f, g) for f in names for g in names
            if morphisms[f][1] == morphisms[g][0] and (f, g) not in comp]
    options = [[h for h in names if morphisms[h] == (morphisms[f][0], morphisms[g][1])]
               for f, g in free]

    def consistent():
        for (f, g), fg in comp.items():
            for h in names:
                if morphisms[g][1] != morphisms[h][0]:
                    continue
                gh = comp.get((g, h))
                left = comp.get((fg, h))
                right = comp.get((f, gh)) if gh is not None else None
                if left is not None and right is not None and left != right:
                    return False
        return True

    def search(i):
        if i == len(free):
            yield FinCat.build(FinSet("Ob", tuple(objs)), morphisms, ids, dict(comp))
            return
        for h in options[i]:
            comp[free[i]] = h
            if consistent():
                yield from search(i + 1)
            del comp[free[i]]
    yield from search(0)


def encode_category(C: FinCat) -> dict:
    return {"objects": list(C.objects.elements),
            "morphisms": {f: [C.src(f), C.tgt(f)] for f in C.morphisms},
            "identities": {x: C.identity(x) for x in C.objects},
            "composition": [list(t) for t in C.composition]}


def decode_category(data) -> FinCat:
    try:
        objs = FinSet("Ob", tuple(str(x) for x in data["objects"]))
        morphisms = {str(f): (str(s), str(t)) for f, (s, t) in data["morphisms"].items()}
        ids = {str(x): str(i) for x, i in data["identities"].items()}
        comp = {(str(f), str(g)): str(h) for f, g, h in data["composition"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise FinError(f"malformed category: {exc}") from exc
    for x in objs:
        if x not in ids:
            raise FinError(f"object {x} has no identity")
    for x in morphisms.values():
        for y in x:
            if y not in objs:
                raise FinError(f"morphism endpoint {y} is not an object")
    return FinCat.build(objs, morphisms, ids, comp)


@dataclass(frozen=True)
class Functor:
    src: FinCat
    tgt: FinCat
    on_objects: FinFn
    on_morphisms: FinFn

    def __post_init__(self):
        if self.on_objects.dom != self.src.objects or self.on_objects.cod != self.tgt.objects:
            raise FinError("object map does not match the categories")
        if self.on_morphisms.dom != self.src.morphisms or self.on_morphisms.cod != self.tgt.morphisms:
            raise FinError("morphism map does not match the categories")
        C, D, F0, F1 = self.src, self.tgt, self.on_objects, self.on_morphisms
        for f in C.morphisms:
            if D.src(F1(f)) != F0(C.src(f)) or D.tgt(F1(f)) != F0(C.tgt(f)):
                raise FinError(f"functor does not respect the endpoints of {f}")
        for x in C.objects:
            if F1(C.identity(x)) != D.identity(F0(x)):
                raise FinError(f"functor does not preserve the identity of {x}")
        for f, g, h in C.composition:
            if D.compose(F1(f), F1(g)) != F1(h):
                raise FinError(f"functor does not preserve the composite of ({f}, {g})")


def functors(C: FinCat, D: FinCat, limit: int | None = None) -> Iterator[Functor]:
    """All functors C → D in a fixed order (at most ``limit``)."""
    count = 0
    names = list(C.morphisms)
    for F0 in all_functions(C.objects, D.objects):
        options = [D.hom(F0(C.src(f)), F0(C.tgt(f))) for f in names]
        assign: dict[str, str] = {}

        def ok():
            for x in C.objects:
                i = C.identity(x)
                if i in assign and assign[i] != D.identity(F0(x)):
                    return False
            for f, g, h in C.composition:
                if f in assign and g in assign and h in assign:
                    if D.compose(assign[f], assign[g]) != assign[h]:
                        return False
            return True

        def search(i):
            if i == len(names):
                yield Functor(C, D, F0, FinFn(C.morphisms, D.morphisms,
                                              tuple(assign[f] for f in names)))
                return
            for h in options[i]:
                assign[names[i]] = h
                if ok():
                    yield from search(i + 1)
                del assign[names[i]]

        for F in search(0):
            yield F
            count += 1
            if limit is not None and count >= limit:
                return


def categories_isomorphic(C: FinCat, D: FinCat) -> bool:
    if len(C.objects) != len(D.objects) or len(C.morphisms) != len(D.morphisms):
        return False
    for F in functors(C, D):
        if F.on_objects.is_bijective() and F.on_morphisms.is_bijective():
            return True
    return False


# monoids and bimodules in a base instance


@dataclass(frozen=True)
class MonoidData:
    base: object
    carrier: object
    unit: object
    mult: object


@dataclass(frozen=True)
class MonoidHom:
    src: MonoidData
    tgt: MonoidData
    arrow: object
    square: object


@dataclass(frozen=True)
class BimoduleData:
    left: MonoidData
    right: MonoidData
    cell: object
    act_left: object
    act_right: object

    @property
    def left_frame(self):
        return self.left

    @property
    def right_frame(self):
        return self.right


@dataclass(frozen=True)
class EquivariantMap:
    src: BimoduleData
    tgt: BimoduleData
    left_arrow: MonoidHom
    right_arrow: MonoidHom
    square: object


def _report(name: str, checks: list[tuple[str, object, object]], D) -> LawReport:
    for law, lhs, rhs in checks:
        if not D.same_square(lhs, rhs):
            return LawReport(name, False, len(checks), {"diagram": law})
    return LawReport(name, True, len(checks))


def _monoid_checks(D, m: MonoidData):
    A = m.carrier
    idA = D.sq_id(A)
    return [
        ("associativity", D.vcomp(D.hcomp(m.mult, idA), m.mult),
         D.vcomp_all(D.assoc(A, A, A), D.hcomp(idA, m.mult), m.mult)),
        ("left_unit", D.vcomp(D.hcomp(m.unit, idA), m.mult), D.lunitor(A)),
        ("right_unit", D.vcomp(D.hcomp(idA, m.unit), m.mult), D.runitor(A)),
    ]


def check_monoid(D, m: MonoidData) -> LawReport:
    try:
        return _report("monoid", _monoid_checks(D, m), D)
    except (FinError, LawViolation) as exc:
        return LawReport("monoid", False, 0, {"diagram": "shape", "message": str(exc)})


def check_monoid_hom(D, phi: MonoidHom) -> LawReport:
    A, B = phi.src, phi.tgt
    try:
        checks = [
            ("unit", D.vcomp(A.unit, phi.square), D.vcomp(D.unit_square(phi.arrow), B.unit)),
            ("multiplication", D.vcomp(A.mult, phi.square),
             D.vcomp(D.hcomp(phi.square, phi.square), B.mult)),
        ]
        return _report("monoid_hom", checks, D)
    except (FinError, LawViolation) as exc:
        return LawReport("monoid_hom", False, 0, {"diagram": "shape", "message": str(exc)})


def check_bimodule(D, M: BimoduleData) -> LawReport:
    A, B, X = M.left.carrier, M.right.carrier, M.cell
    try:
        idX = D.sq_id(X)
        checks = [
            ("left_unit", D.vcomp(D.hcomp(M.left.unit, idX), M.act_left), D.lunitor(X)),
            ("left_associativity", D.vcomp(D.hcomp(M.left.mult, idX), M.act_left),
             D.vcomp_all(D.assoc(A, A, X), D.hcomp(D.sq_id(A), M.act_left), M.act_left)),
            ("right_unit", D.vcomp(D.hcomp(idX, M.right.unit), M.act_right), D.runitor(X)),
            ("right_associativity", D.vcomp(D.hcomp(M.act_right, D.sq_id(B)), M.act_right),
             D.vcomp_all(D.assoc(X, B, B), D.hcomp(idX, M.right.mult), M.act_right)),
            ("actions_commute", D.vcomp(D.hcomp(M.act_left, D.sq_id(B)), M.act_right),
             D.vcomp_all(D.assoc(A, X, B), D.hcomp(D.sq_id(A), M.act_right), M.act_left)),
        ]
        return _report("bimodule", checks, D)
    except (FinError, LawViolation) as exc:
        return LawReport("bimodule", False, 0, {"diagram": "shape", "message": str(exc)})


def is_equivariant(D, a: EquivariantMap) -> bool:
    phi, psi, s = a.left_arrow, a.right_arrow, a.square
    left = D.same_square(D.vcomp(D.hcomp(phi.square, s), a.tgt.act_left),
                         D.vcomp(a.src.act_left, s))
    return left and D.same_square(D.vcomp(D.hcomp(s, psi.square), a.tgt.act_right),
                                  D.vcomp(a.src.act_right, s))


def unit_bimodule(m: MonoidData) -> BimoduleData:
    return BimoduleData(m, m, m.carrier, m.mult, m.mult)


def free_bimodule(D, A: MonoidData, X, B: MonoidData) -> BimoduleData:
    """(A ⊙ X) ⊙ B with the actions given by multiplication."""
    AX = D.compose(A.carrier, X)
    F = D.compose(AX, B.carrier)
    idX, idB = D.sq_id(X), D.sq_id(B.carrier)
    act_left = D.vcomp_all(
        D.assoc_inv(A.carrier, AX, B.carrier),
        D.hcomp(D.assoc_inv(A.carrier, A.carrier, X), idB),
        D.hcomp(D.hcomp(A.mult, idX), idB))
    act_right = D.vcomp(D.assoc(AX, B.carrier, B.carrier),
                        D.hcomp(D.sq_id(AX), B.mult))
    return BimoduleData(A, B, F, act_left, act_right)


def _install_actions(D, A: MonoidData, C: MonoidData, q, cand_left, cand_right) -> BimoduleData:
    """Actions on the target of a globular epi q: X ⇒ Q, descended from
    candidates A⊙X ⇒ Q and X⊙C ⇒ Q."""
    act_left = D.descend(D.hcomp(D.sq_id(A.carrier), q), cand_left)
    act_right = D.descend(D.hcomp(q, D.sq_id(C.carrier)), cand_right)
    return BimoduleData(A, C, q.tgt, act_left, act_right)


def tensor_over_monoid(D, M: BimoduleData, N: BimoduleData):
    """(M ⊙_B N, q) with q: M ⊙ N ⇒ M ⊙_B N the coequalizer."""
    if M.right != N.left:
        raise FinError("bimodules are not composable: middle monoids differ")
    X, B, Y = M.cell, M.right.carrier, N.cell
    s = D.hcomp(M.act_right, D.sq_id(Y))
    t = D.vcomp(D.assoc(X, B, Y), D.hcomp(D.sq_id(X), N.act_left))
    _, q = D.coequalize(s, t)
    A, C = M.left.carrier, N.right.carrier
    cand_left = D.vcomp_all(D.assoc_inv(A, X, Y), D.hcomp(M.act_left, D.sq_id(Y)), q)
    cand_right = D.vcomp_all(D.assoc(X, Y, C), D.hcomp(D.sq_id(X), N.act_right), q)
    return _install_actions(D, M.left, N.right, q, cand_left, cand_right), q


# categories as monoids in spans and matrices


def fincat_to_monoid(D, C: FinCat) -> MonoidData:
    R = C.objects
    if isinstance(D, SpanInstance):
        A = Span(R, R, C.morphisms, C.src, C.tgt)
        U = D.unit(R)
        unit = SpanSquare(U, A, FinFn.identity(R), FinFn.identity(R),
                          FinFn(U.apex, A.apex, C.identities))
        AA = D.compose(A, A)
        _, p1, p2 = _span_projections(D, A, A)
        mult = SpanSquare(AA, A, FinFn.identity(R), FinFn.identity(R),
                          FinFn(AA.apex, A.apex, tuple(C.compose(f, g) for f, g in
                                                       zip(p1.images, p2.images))))
        return MonoidData(R, A, unit, mult)
    if isinstance(D, MatInstance):
        A = SetMatrix.build(R, R, lambda x, y: FinSet(f"{x},{y}", tuple(C.hom(x, y))))
        U = D.unit(R)
        unit = D._globular(U, A, lambda x, y: (C.identity(x),) if x == y else ())
        AA = D.compose(A, A)
        mult = D._globular(AA, A, lambda x, z: tuple(
            C.compose(f, g) for y in R for f in C.hom(x, y) for g in C.hom(y, z)))
        return MonoidData(R, A, unit, mult)
    raise FinError(f"no category encoding for instance {getattr(D, 'name', D)}")


def same_category(C: FinCat, E: FinCat) -> bool:
    """Equal as labeled data; the listing order of morphisms and of
    composition records is ignored."""
    return (C.objects == E.objects and set(C.morphisms) == set(E.morphisms)
            and C.src.as_dict() == E.src.as_dict() and C.tgt.as_dict() == E.tgt.as_dict()
            and C.identities == E.identities and C.table == E.table)


def check_category_roundtrip(D, max_objects: int = 2, max_morphisms: int = 4) -> LawReport:
    """monoid_to_fincat ∘ fincat_to_monoid is the identity on every category
    within the caps, the monoid it produces satisfies the monoid laws, and
    going around once more returns the same monoid."""
    count = 0
    for C in enumerate_categories(max_objects, max_morphisms):
        count += 1
        m = fincat_to_monoid(D, C)
        witness = {"category": encode_category(C)}
        law = check_monoid(D, m)
        if not law.ok:
            return LawReport("category_roundtrip", False, count, dict(witness, **law.witness))
        back = monoid_to_fincat(D, m)
        if not same_category(back, C):
            return LawReport("category_roundtrip", False, count,
                             dict(witness, returned=encode_category(back)))
        if fincat_to_monoid(D, back) != m:
            return LawReport("category_roundtrip", False, count,
                             dict(witness, message="monoid changes on the second round"))
    return LawReport("category_roundtrip", True, count)


def _span_projections(D, M, N):
    from .spaninst import _composite
    return _composite(M, N)


def monoid_to_fincat(D, m: MonoidData) -> FinCat:
    R = m.base
    if isinstance(D, SpanInstance):
        A = m.carrier
        _, p1, p2 = _span_projections(D, A, A)
        comp = {(f, g): m.mult.h(x) for x, f, g in zip(m.mult.src.apex.elements,
                                                        p1.images, p2.images)}
        ids = {x: m.unit.h(u) for x, u in zip(R.elements, m.unit.src.apex.elements)}
        return FinCat.build(R, {f: A.legs(f) for f in A.apex}, ids, comp)
    if isinstance(D, MatInstance):
        A = m.carrier
        labels = [f for x in R for y in R for f in A.entry(x, y)]
        unique = len(set(labels)) == len(labels)

        def name(x, y, f):
            return f if unique else f"{x}>{y}:{f}"
        morphisms = {name(x, y, f): (x, y) for x in R for y in R for f in A.entry(x, y)}
        ids = {x: name(x, x, m.unit.at(x, x)(STAR)) for x in R}
        comp = {}
        for x in R:
            for z in R:
                mx = m.mult.at(x, z)
                for y in R:
                    for f in A.entry(x, y):
                        for g in A.entry(y, z):
                            comp[(name(x, y, f), name(y, z, g))] = name(
                                x, z, mx(tagged(y, pair_label(f, g))))
        return FinCat.build(R, morphisms, ids, comp)
    raise FinError(f"no category encoding for instance {getattr(D, 'name', D)}")


def functor_to_hom(D, F: Functor, A: MonoidData, B: MonoidData) -> MonoidHom:
    f = F.on_objects
    if isinstance(D, SpanInstance):
        return MonoidHom(A, B, f, SpanSquare(A.carrier, B.carrier, f, f, F.on_morphisms))
    if isinstance(D, MatInstance):
        maps = tuple(FinFn(A.carrier.entry(x, y), B.carrier.entry(f(x), f(y)),
                           tuple(F.on_morphisms(g) for g in A.carrier.entry(x, y)))
                     for x, y in A.carrier.indices())
        return MonoidHom(A, B, f, MatrixSquare(A.carrier, B.carrier, f, f, maps))
    raise FinError(f"no category encoding for instance {getattr(D, 'name', D)}")


def hom_to_functor(D, phi: MonoidHom) -> Functor:
    C, E = monoid_to_fincat(D, phi.src), monoid_to_fincat(D, phi.tgt)
    if isinstance(D, SpanInstance):
        return Functor(C, E, phi.arrow, phi.square.h)
    table = {}
    f = phi.arrow
    for x, y in phi.src.carrier.indices():
        for g in phi.src.carrier.entry(x, y):
            table[g] = phi.square.at(x, y)(g)
    return Functor(C, E, f, FinFn.from_dict(C.morphisms, E.morphisms, table))


# profunctors


@dataclass(frozen=True)
class Profunctor:
    """P: C ⇸ D as sets P(x, y), with f: x → w in C sending P(w, y) to
    P(x, y) and g: z → y in D sending P(x, z) to P(x, y).

    Element labels are only unique within an entry, so every action record
    names its entry: act_left holds (f, y, p, f·p) and act_right holds
    (x, p, g, p·g).
    """

    left: FinCat
    right: FinCat
    sets: tuple[tuple[str, str, tuple[str, ...]], ...]
    act_left: tuple[tuple[str, str, str, str], ...]
    act_right: tuple[tuple[str, str, str, str], ...]

    def elements(self, x, y) -> tuple[str, ...]:
        return self._sets.get((x, y), ())

    @property
    def _sets(self):
        return {(a, b): els for a, b, els in self.sets}

    def left_table(self):
        return {(f, y, p): r for f, y, p, r in self.act_left}

    def right_table(self):
        return {(x, p, g): r for x, p, g, r in self.act_right}


def bimodule_to_profunctor(D, M: BimoduleData) -> Profunctor:
    C, E = monoid_to_fincat(D, M.left), monoid_to_fincat(D, M.right)
    X = M.cell
    left, right = [], []
    if isinstance(D, SpanInstance):
        sets = tuple((x, y, tuple(p for p in X.apex if X.legs(p) == (x, y)))
                     for x in C.objects for y in E.objects)
        _, p1, p2 = _span_projections(D, M.left.carrier, X)
        for z, f, p in zip(M.act_left.src.apex, p1.images, p2.images):
            left.append((f, X.r(p), p, M.act_left.h(z)))
        _, p1, p2 = _span_projections(D, X, M.right.carrier)
        for z, p, g in zip(M.act_right.src.apex, p1.images, p2.images):
            right.append((X.l(p), p, g, M.act_right.h(z)))
        return Profunctor(C, E, sets, tuple(left), tuple(right))
    if not isinstance(D, MatInstance):
        raise FinError(f"no profunctor presentation for instance {getattr(D, 'name', D)}")
    sets = tuple((x, y, X.entry(x, y).elements) for x, y in X.indices())
    for x in C.objects:
        for y in E.objects:
            al, ar = M.act_left.at(x, y), M.act_right.at(x, y)
            for w in C.objects:
                for f in M.left.carrier.entry(x, w):
                    for p in X.entry(w, y):
                        left.append((f, y, p, al(tagged(w, pair_label(f, p)))))
            for z in E.objects:
                for p in X.entry(x, z):
                    for g in M.right.carrier.entry(z, y):
                        right.append((x, p, g, ar(tagged(z, pair_label(p, g)))))
    return Profunctor(C, E, sets, tuple(left), tuple(right))


def profunctor_to_bimodule(D, P: Profunctor) -> BimoduleData:
    A, B = fincat_to_monoid(D, P.left), fincat_to_monoid(D, P.right)
    lt, rt = P.left_table(), P.right_table()
    if isinstance(D, SpanInstance):
        # apex labels must be global, so qualify them unless already unique
        labels = [p for _, _, els in P.sets for p in els]
        unique = len(set(labels)) == len(labels)

        def name(x, y, p):
            return p if unique else f"{x},{y}:{p}"
        legs = {name(x, y, p): (x, y) for x, y, els in P.sets for p in els}
        X = Span.make(P.left.objects, P.right.objects, legs, "P")
        plain = {name(x, y, p): p for x, y, els in P.sets for p in els}
        AX, p1, p2 = _span_projections(D, A.carrier, X)
        act_left = SpanSquare(AX, X, FinFn.identity(X.left_frame), FinFn.identity(X.right_frame),
                              FinFn(AX.apex, X.apex, tuple(
                                  name(P.left.src(f), X.r(e), lt[(f, X.r(e), plain[e])])
                                  for f, e in zip(p1.images, p2.images))))
        XB, q1, q2 = _span_projections(D, X, B.carrier)
        act_right = SpanSquare(XB, X, FinFn.identity(X.left_frame), FinFn.identity(X.right_frame),
                               FinFn(XB.apex, X.apex, tuple(
                                   name(X.l(e), P.right.tgt(g), rt[(X.l(e), plain[e], g)])
                                   for e, g in zip(q1.images, q2.images))))
        return BimoduleData(A, B, X, act_left, act_right)
    if not isinstance(D, MatInstance):
        raise FinError(f"no profunctor presentation for instance {getattr(D, 'name', D)}")
    X = SetMatrix.build(P.left.objects, P.right.objects,
                        lambda x, y: FinSet(f"{x},{y}", P.elements(x, y)))
    act_left = D._globular(D.compose(A.carrier, X), X, lambda x, y: tuple(
        lt[(f, y, p)] for w in P.left.objects for f in A.carrier.entry(x, w)
        for p in X.entry(w, y)))
    act_right = D._globular(D.compose(X, B.carrier), X, lambda x, y: tuple(
        rt[(x, p, g)] for z in P.right.objects for p in X.entry(x, z)
        for g in B.carrier.entry(z, y)))
    return BimoduleData(A, B, X, act_left, act_right)


def profunctors_isomorphic(P: Profunctor, Q: Profunctor) -> bool:
    """Search for entrywise bijections commuting with both actions; the
    two profunctors must be between the same categories."""
    if P.left != Q.left or P.right != Q.right:
        return False
    if any(len(els) != len(Q.elements(x, y)) for x, y, els in P.sets):
        return False
    # moves[(x, y, p)] lists (target key, how to act on an image q)
    moves: dict[tuple, list] = {}
    ql, qr = Q.left_table(), Q.right_table()
    for f, y, p, r in P.act_left:
        x, w = P.left.src(f), P.left.tgt(f)
        moves.setdefault((w, y, p), []).append(((x, y, r), lambda q, f=f, y=y: ql[(f, y, q)]))
    for x, p, g, r in P.act_right:
        z, y = P.right.src(g), P.right.tgt(g)
        moves.setdefault((x, z, p), []).append(((x, y, r), lambda q, x=x, g=g: qr[(x, q, g)]))
    keys = [(x, y, p) for x, y, els in P.sets for p in els]

    def close(assign, key, q):
        assign = dict(assign)
        used = {}
        for (x, y, _), v in assign.items():
            used.setdefault((x, y), set()).add(v)
        stack = [(key, q)]
        while stack:
            k, v = stack.pop()
            if k in assign:
                if assign[k] != v:
                    return None
                continue
            if v in used.get(k[:2], set()):
                return None
            assign[k] = v
            used.setdefault(k[:2], set()).add(v)
            for target, act in moves.get(k, []):
                stack.append((target, act(v)))
        return assign

    def search(assign):
        free = next((k for k in keys if k not in assign), None)
        if free is None:
            return True
        for q in Q.elements(*free[:2]):
            trial = close(assign, free, q)
            if trial is not None and search(trial):
                return True
        return False

    return search({})


# the framed bicategory Mod(D)


class ModInstance(DoubleInstance):
    """Monoids, monoid homomorphisms, bimodules and equivariant maps in D."""

    def __init__(self, base):
        self.base = base
        self.name = f"mod-{base.name}"
        self._tensors: dict = {}

    # vertical category
    def arrow_src(self, phi):
        return phi.src

    def arrow_tgt(self, phi):
        return phi.tgt

    def v_id(self, A):
        D = self.base
        return MonoidHom(A, A, D.v_id(A.base), D.sq_id(A.carrier))

    def v_then(self, phi, chi):
        if phi.tgt != chi.src:
            raise FinError("monoid homomorphisms are not composable")
        D = self.base
        return MonoidHom(phi.src, chi.tgt, D.v_then(phi.arrow, chi.arrow),
                         D.vcomp(phi.square, chi.square))

    def arrows(self, A, B):
        C, E = monoid_to_fincat(self.base, A), monoid_to_fincat(self.base, B)
        for F in functors(C, E):
            yield functor_to_hom(self.base, F, A, B)

    def arrow_inverse(self, phi):
        D = self.base
        f = D.arrow_inverse(phi.arrow)
        s = D.invert(phi.square)
        if f is None or s is None:
            return None
        return MonoidHom(phi.tgt, phi.src, f, s)

    # cells
    def unit(self, A):
        return unit_bimodule(A)

    def _tensor(self, M, N):
        key = (M, N)
        if key not in self._tensors:
            self._tensors[key] = tensor_over_monoid(self.base, M, N)
        return self._tensors[key]

    def compose(self, M, N):
        return self._tensor(M, N)[0]

    def sq_id(self, M):
        return EquivariantMap(M, M, self.v_id(M.left), self.v_id(M.right),
                              self.base.sq_id(M.cell))

    def unit_square(self, phi):
        return EquivariantMap(self.unit(phi.src), self.unit(phi.tgt), phi, phi, phi.square)

    def vcomp(self, a, b):
        if a.tgt != b.src:
            raise FinError("vertical composite needs matching bimodules")
        return EquivariantMap(a.src, b.tgt, self.v_then(a.left_arrow, b.left_arrow),
                              self.v_then(a.right_arrow, b.right_arrow),
                              self.base.vcomp(a.square, b.square))

    def hcomp(self, a, b):
        if a.right_arrow != b.left_arrow:
            raise FinError("horizontal composite needs a shared middle homomorphism")
        D = self.base
        src, q1 = self._tensor(a.src, b.src)
        tgt, q2 = self._tensor(a.tgt, b.tgt)
        cand = D.vcomp(D.hcomp(a.square, b.square), q2)
        return EquivariantMap(src, tgt, a.left_arrow, b.right_arrow, D.descend(q1, cand))

    def _globular(self, src, tgt, square):
        return EquivariantMap(src, tgt, self.v_id(src.left), self.v_id(src.right), square)

    def assoc(self, M, N, P):
        D = self.base
        MN, q_mn = self._tensor(M, N)
        left, q_l = self._tensor(MN, P)
        NP, q_np = self._tensor(N, P)
        right, q_r = self._tensor(M, NP)
        epi = D.vcomp(D.hcomp(q_mn, D.sq_id(P.cell)), q_l)
        cand = D.vcomp_all(D.assoc(M.cell, N.cell, P.cell), D.hcomp(D.sq_id(M.cell), q_np), q_r)
        return self._globular(left, right, D.descend(epi, cand))

    def lunitor(self, M):
        src, q = self._tensor(self.unit(M.left), M)
        return self._globular(src, M, self.base.descend(q, M.act_left))

    def runitor(self, M):
        src, q = self._tensor(M, self.unit(M.right))
        return self._globular(src, M, self.base.descend(q, M.act_right))

    def invert(self, a):
        s = self.base.invert(a.square)
        if s is None:
            return None
        phi, psi = self.arrow_inverse(a.left_arrow), self.arrow_inverse(a.right_arrow)
        if phi is None or psi is None:
            return None
        return EquivariantMap(a.tgt, a.src, phi, psi, s)

    def same_square(self, a, b):
        return (self.base.same_square(a.square, b.square) and a.src == b.src
                and a.tgt == b.tgt)

    def squares(self, src, tgt, phi, psi):
        for s in self.base.squares(src.cell, tgt.cell, phi.arrow, psi.arrow):
            a = EquivariantMap(src, tgt, phi, psi, s)
            if is_equivariant(self.base, a):
                yield a

    def square_count_bound(self, src, tgt, phi, psi):
        return self.base.square_count_bound(src.cell, tgt.cell, phi.arrow, psi.arrow)

    # base change
    def restrict(self, phi, M, psi):
        D = self.base
        if phi.tgt != M.left or psi.tgt != M.right:
            raise FinError("restriction homomorphisms must land in the monoids of the bimodule")
        P, w = D.restrict(phi.arrow, M.cell, psi.arrow)
        c = w.square
        act_left = factor_universal(D, w, D.vcomp(D.hcomp(phi.square, c), M.act_left))
        act_right = factor_universal(D, w, D.vcomp(D.hcomp(c, psi.square), M.act_right))
        R = BimoduleData(phi.src, psi.src, P, act_left, act_right)
        return R, CartesianWitness(EquivariantMap(R, M, phi, psi, c), "cartesian")

    def extend(self, phi, M, psi):
        if phi.src != M.left or psi.src != M.right:
            raise FinError("extension homomorphisms must start at the monoids of the bimodule")
        return extend_via_companions(self, phi, M, psi)

    def factor_cartesian(self, cart, cand, h, k):
        w = CartesianWitness(cart.square, "cartesian")
        s = factor_universal(self.base, w, cand.square, h.arrow, k.arrow)
        return EquivariantMap(cand.src, cart.src, h, k, s)

    def factor_opcartesian(self, opcart, cand, h, k):
        return factor_through_companions(self, "opcartesian", opcart.left_arrow,
                                         opcart.right_arrow, cand, h, k)

    def cell_size(self, M) -> int:
        return self.base.cell_size(M.cell)

    def cell_iso(self, M, N):
        if M.left != N.left or M.right != N.right:
            return None
        phi, psi = self.v_id(M.left), self.v_id(M.right)
        if self.square_count_bound(M, N, phi, psi) > search_budget():
            raise BudgetExceeded("too many candidate isomorphisms")
        for a in self.squares(M, N, phi, psi):
            if self.base.invert(a.square) is not None:
                return a
        return None

    # local coequalizers
    def coequalize(self, s, t):
        D = self.base
        Y = s.tgt
        _, q = D.coequalize(s.square, t.square)
        Q = _install_actions(D, Y.left, Y.right, q, D.vcomp(Y.act_left, q),
                             D.vcomp(Y.act_right, q))
        return Q, self._globular(Y, Q, q)

    def descend(self, epi, cand):
        return EquivariantMap(epi.tgt, cand.tgt, cand.left_arrow, cand.right_arrow,
                              self.base.descend(epi.square, cand.square))

    # involution
    def involute_monoid(self, A):
        D = self.base
        Aop = D.involute(A.carrier)
        unit = D.vcomp(D.involution_unit(A.base), D.involute_square(A.unit))
        mult = D.vcomp(D.involution_constraint(A.carrier, A.carrier),
                       D.involute_square(A.mult))
        return MonoidData(A.base, Aop, unit, mult)

    def involute_hom(self, phi):
        return MonoidHom(self.involute_monoid(phi.src), self.involute_monoid(phi.tgt),
                         phi.arrow, self.base.involute_square(phi.square))

    def involute(self, M):
        D = self.base
        act_left = D.vcomp(D.involution_constraint(M.cell, M.right.carrier),
                           D.involute_square(M.act_right))
        act_right = D.vcomp(D.involution_constraint(M.left.carrier, M.cell),
                            D.involute_square(M.act_left))
        return BimoduleData(self.involute_monoid(M.right), self.involute_monoid(M.left),
                            D.involute(M.cell), act_left, act_right)

    def involute_square(self, a):
        return EquivariantMap(self.involute(a.src), self.involute(a.tgt),
                              self.involute_hom(a.right_arrow), self.involute_hom(a.left_arrow),
                              self.base.involute_square(a.square))

    def involution_constraint(self, M, N):
        """N^op ⊙ M^op ⇒ (M ⊙ N)^op, descended from the base constraint."""
        D = self.base
        src, q = self._tensor(self.involute(N), self.involute(M))
        MN, q_mn = self._tensor(M, N)
        cand = D.vcomp(D.involution_constraint(M.cell, N.cell), D.involute_square(q_mn))
        return self._globular(src, self.involute(MN), D.descend(q, cand))

    def involution_unit(self, A):
        """U_{A^op} ⇒ (U_A)^op; both have carrier A^op."""
        D = self.base
        Aop = self.involute_monoid(A)
        return self._globular(self.unit(Aop), self.involute(self.unit(A)),
                              D.sq_id(Aop.carrier))

    def involute_object(self, A):
        return self.involute_monoid(A)

    def involute_arrow(self, phi):
        return self.involute_hom(phi)

    def involution_xi(self, M):
        """ξ_M: (M^op)^op ⇒ M. Over Span and Mat the double involution is
        literally the identity, so ξ is an identity square."""
        twice = self.involute(self.involute(M))
        if twice != M:
            raise LawViolation("double involution is not strict on this bimodule")
        return self.sq_id(M)

    def involution_strict(self, A) -> bool:
        """Whether (A^op)^op is literally A (the vertical part of ξ is an identity)."""
        return self.involute_monoid(self.involute_monoid(A)) == A

    # sampling
    def random_object(self, rng, cap, prefix="a"):
        return fincat_to_monoid(self.base, random_category(rng, min(cap, 2), prefix))

    def random_arrow(self, rng, A, B):
        options = list(self.arrows_limited(A, B, 24))
        return rng.choice(options) if options else None

    def arrows_limited(self, A, B, limit):
        C, E = monoid_to_fincat(self.base, A), monoid_to_fincat(self.base, B)
        for F in functors(C, E, limit):
            yield functor_to_hom(self.base, F, A, B)

    def random_cell(self, rng, A, B, cap=4, prefix="m"):
        D = self.base
        roll = rng.random()
        if roll < 0.3:
            phi = self.random_arrow(rng, A, B)
            if phi is not None:
                return self.restrict(phi, self.unit(B), self.v_id(B))[0]
        elif roll < 0.5:
            psi = self.random_arrow(rng, B, A)
            if psi is not None:
                return self.restrict(self.v_id(A), self.unit(A), psi)[0]
        X = D.random_cell(rng, A.base, B.base, min(cap, 2), prefix)
        return free_bimodule(D, A, X, B)

    def random_square_from(self, rng, M, phi, psi, cap=4, prefix="n"):
        return self.extend(phi, M, psi)[1].square

    # serialization
    def encode_object(self, A):
        return {"category": encode_category(monoid_to_fincat(self.base, A))}

    def decode_object(self, data):
        return fincat_to_monoid(self.base, decode_category(data["category"]))

    def encode_arrow(self, phi):
        F = hom_to_functor(self.base, phi)
        return {"src": self.encode_object(phi.src), "tgt": self.encode_object(phi.tgt),
                "objects": F.on_objects.as_dict(), "morphisms": F.on_morphisms.as_dict()}

    def decode_arrow(self, data):
        A, B = self.decode_object(data["src"]), self.decode_object(data["tgt"])
        C, E = monoid_to_fincat(self.base, A), monoid_to_fincat(self.base, B)
        F = Functor(C, E, FinFn.from_dict(C.objects, E.objects, data["objects"]),
                    FinFn.from_dict(C.morphisms, E.morphisms, data["morphisms"]))
        return functor_to_hom(self.base, F, A, B)

    def encode_cell(self, M):
        D = self.base
        return {"left": self.encode_object(M.left), "right": self.encode_object(M.right),
                "cell": D.encode_cell(M.cell), "act_left": D.encode_square(M.act_left),
                "act_right": D.encode_square(M.act_right)}

    def decode_cell(self, data):
        D = self.base
        return BimoduleData(self.decode_object(data["left"]), self.decode_object(data["right"]),
                            D.decode_cell(data["cell"]), D.decode_square(data["act_left"]),
                            D.decode_square(data["act_right"]))

    def encode_square(self, a):
        return {"src": self.encode_cell(a.src), "tgt": self.encode_cell(a.tgt),
                "left": self.encode_arrow(a.left_arrow), "right": self.encode_arrow(a.right_arrow),
                "square": self.base.encode_square(a.square)}

    def decode_square(self, data):
        return EquivariantMap(self.decode_cell(data["src"]), self.decode_cell(data["tgt"]),
                              self.decode_arrow(data["left"]), self.decode_arrow(data["right"]),
                              self.base.decode_square(data["square"]))
