"""Concrete framed functors, transformations and adjunctions.

* endofunctors of finite sets (identity, covariant powerset, ``- × S``,
  ``(-)^S``, ``- + 1``) and natural transformations between them;
* ``span_functor(F)``: the normal oplax functor Span(F), strong when F
  preserves pullbacks, and ``span_transformation(α)``;
* ``rel_functor``: spans to relations, by taking images;
* the comparison functors Fr(Arr) → Span and Fr(Fam) → Mat together with
  the choices that exhibit them as equivalences;
* the adjunction Span(- × S) ⊣ Span((-)^S).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from .doublecore import LawViolation
from .fibcon import (ARR, FAM, ArrArrow, ArrObject, FamArrow, FamObject, FrCell, FrInstance,
                     FrSquare, p3)
from .finkit import (POINT, FinFn, FinSet, all_functions, coproduct, inl_label,
                     inr_label, pair_label, pairing, product, product_map, product_set)
from .lawsuite import (EquivalenceChoices, FramedFunctorData, FramedTransformationData,
                       flip_flavor)
from .matinst import STAR, MatInstance, MatrixSquare, SetMatrix, tagged
from .spaninst import (RelInstance, RelSquare, Span, SpanInstance, SpanSquare, _composite,
                       to_relation)

SPAN = SpanInstance()
MAT = MatInstance()
REL = RelInstance()


# endofunctors of finite sets


@dataclass(frozen=True)
class SetEndofunctor:
    name: str
    on_set: Callable[[FinSet], FinSet]
    on_map: Callable[[FinFn], FinFn]
    preserves_pullbacks: bool


@dataclass(frozen=True)
class SetTransformation:
    name: str
    source: SetEndofunctor
    target: SetEndofunctor
    component: Callable[[FinSet], FinFn]


IDENTITY = SetEndofunctor("Id", lambda A: A, lambda f: f, True)


def subset_label(A: FinSet, members) -> str:
    keep = set(members)
    return "{" + ",".join(x for x in A if x in keep) + "}"


@lru_cache(maxsize=1024)
def _powerset(A: FinSet) -> FinSet:
    n = len(A)
    labels = [subset_label(A, [A.elements[i] for i in range(n) if mask >> i & 1])
              for mask in range(1 << n)]
    return FinSet(f"P({A.name})", tuple(labels))


def _subsets(A: FinSet):
    n = len(A)
    return [[A.elements[i] for i in range(n) if mask >> i & 1] for mask in range(1 << n)]


def _powerset_map(f: FinFn) -> FinFn:
    return FinFn(_powerset(f.dom), _powerset(f.cod),
                 tuple(subset_label(f.cod, {f(x) for x in S}) for S in _subsets(f.dom)))


POWERSET = SetEndofunctor("P", _powerset, _powerset_map, False)


def times(S: FinSet) -> SetEndofunctor:
    return SetEndofunctor(f"-x{S.name}", lambda A: product_set(A, S),
                          lambda f: product_map(f, FinFn.identity(S)), True)


def fn_label(images) -> str:
    return "fn(" + ",".join(images) + ")"


@lru_cache(maxsize=1024)
def _exponential(S: FinSet, A: FinSet) -> tuple[FinSet, tuple[FinFn, ...]]:
    fns = tuple(all_functions(S, A))
    return FinSet(f"{A.name}^{S.name}", tuple(fn_label(g.images) for g in fns)), fns


def power(S: FinSet) -> SetEndofunctor:
    def on_map(f):
        src, fns = _exponential(S, f.dom)
        tgt, _ = _exponential(S, f.cod)
        return FinFn(src, tgt, tuple(fn_label(g.then(f).images) for g in fns))
    return SetEndofunctor(f"(-)^{S.name}", lambda A: _exponential(S, A)[0], on_map, True)


def _plus_one_set(A: FinSet) -> FinSet:
    return coproduct(A, POINT)[0]


def _plus_one_map(f: FinFn) -> FinFn:
    return FinFn(_plus_one_set(f.dom), _plus_one_set(f.cod),
                 tuple(inl_label(f(a)) for a in f.dom) + (inr_label("*"),))


PLUS_ONE = SetEndofunctor("-+1", _plus_one_set, _plus_one_map, True)

# natural transformations used in examples and tests

INL = SetTransformation("inl", IDENTITY, PLUS_ONE, lambda A: coproduct(A, POINT)[1])
SINGLETON = SetTransformation(
    "singleton", IDENTITY, POWERSET,
    lambda A: FinFn(A, _powerset(A), tuple("{" + a + "}" for a in A)))


def projection(S: FinSet) -> SetTransformation:
    return SetTransformation(f"proj_{S.name}", times(S), IDENTITY,
                             lambda A: product(A, S)[1])


def constants(S: FinSet) -> SetTransformation:
    """Id ⇒ (-)^S, a ↦ the constant function at a."""
    return SetTransformation(f"const_{S.name}", IDENTITY, power(S),
                             lambda A: FinFn(A, _exponential(S, A)[0],
                                             tuple(fn_label([a] * len(S)) for a in A)))


def then_functor(F: SetEndofunctor, G: SetEndofunctor) -> SetEndofunctor:
    """G ∘ F."""
    return SetEndofunctor(f"{G.name}.{F.name}", lambda A: G.on_set(F.on_set(A)),
                          lambda f: G.on_map(F.on_map(f)),
                          F.preserves_pullbacks and G.preserves_pullbacks)


def exp_unit(S: FinSet) -> SetTransformation:
    """η_A: A → (A × S)^S, a ↦ (s ↦ (a, s))."""
    F, G = times(S), power(S)
    return SetTransformation(
        f"eta_{S.name}", IDENTITY, then_functor(F, G),
        lambda A: FinFn(A, G.on_set(F.on_set(A)),
                        tuple(fn_label([pair_label(a, s) for s in S]) for a in A)))


def exp_counit(S: FinSet) -> SetTransformation:
    """ε_B: B^S × S → B, (φ, s) ↦ φ(s)."""
    def component(B):
        E, fns = _exponential(S, B)
        return FinFn(product_set(E, S), B, tuple(g(s) for g in fns for s in S))
    return SetTransformation(f"eps_{S.name}", then_functor(power(S), times(S)), IDENTITY,
                             component)


# Span(F) and Span(α)


def _span_image(F: SetEndofunctor, M: Span) -> Span:
    apex = F.on_set(M.apex)
    return Span(F.on_set(M.left_frame), F.on_set(M.right_frame), apex,
                F.on_map(M.l).with_cod(F.on_set(M.left_frame)),
                F.on_map(M.r).with_cod(F.on_set(M.right_frame)))


def span_functor(F: SetEndofunctor, inst: SpanInstance = SPAN) -> FramedFunctorData:
    """Span(F): normal oplax, with F(X ×_B Y) → FX ×_FB FY as compositor."""

    def on_square(a):
        return SpanSquare(_span_image(F, a.src), _span_image(F, a.tgt), F.on_map(a.left_arrow),
                          F.on_map(a.right_arrow), F.on_map(a.h))

    def compositor(M, N):
        MN, p1, p2 = _composite(M, N)
        src = _span_image(F, MN)
        tgt = inst.compose(_span_image(F, M), _span_image(F, N))
        Fp1, Fp2 = F.on_map(p1), F.on_map(p2)
        images = tuple(pair_label(Fp1(z), Fp2(z)) for z in src.apex)
        return SpanSquare(src, tgt, FinFn.identity(src.left_frame),
                          FinFn.identity(src.right_frame), FinFn(src.apex, tgt.apex, images))

    def unitor(A):
        src = _span_image(F, inst.unit(A))
        tgt = inst.unit(F.on_set(A))
        return SpanSquare(src, tgt, FinFn.identity(src.left_frame),
                          FinFn.identity(src.right_frame),
                          FinFn(src.apex, tgt.apex, src.apex.elements))

    return FramedFunctorData(f"Span({F.name})", inst, inst, F.on_set, F.on_map,
                             lambda M: _span_image(F, M), on_square, compositor, unitor,
                             "oplax")


def strong_span_functor(F: SetEndofunctor) -> FramedFunctorData:
    """Span(F) presented as a lax functor; F must preserve pullbacks."""
    if not F.preserves_pullbacks:
        raise ValueError(f"{F.name} does not preserve pullbacks")
    return flip_flavor(span_functor(F))


def span_transformation(alpha: SetTransformation, F: FramedFunctorData,
                        G: FramedFunctorData) -> FramedTransformationData:
    """Span(α): components α_A on objects and α_X on apexes."""

    def on_cell(M):
        return SpanSquare(F.on_cell(M), G.on_cell(M), alpha.component(M.left_frame),
                          alpha.component(M.right_frame), alpha.component(M.apex))

    return FramedTransformationData(f"Span({alpha.name})", F, G, alpha.component, on_cell)


def exponential_adjunction(S: FinSet):
    """(F, G, η, ε) for Span(- × S) ⊣ Span((-)^S), all lax."""
    from .lawsuite import compose_functors, identity_functor

    F, G = strong_span_functor(times(S)), strong_span_functor(power(S))
    GF, FG = compose_functors(F, G), compose_functors(G, F)
    eta_set, eps_set = exp_unit(S), exp_counit(S)

    def eta_cell(M):
        return SpanSquare(M, GF.on_cell(M), eta_set.component(M.left_frame),
                          eta_set.component(M.right_frame), eta_set.component(M.apex))

    def eps_cell(P):
        return SpanSquare(FG.on_cell(P), P, eps_set.component(P.left_frame),
                          eps_set.component(P.right_frame), eps_set.component(P.apex))

    eta = FramedTransformationData(f"eta_{S.name}", identity_functor(SPAN), GF,
                                   eta_set.component, eta_cell)
    eps = FramedTransformationData(f"eps_{S.name}", FG, identity_functor(SPAN),
                                   eps_set.component, eps_cell)
    return F, G, eta, eps


# spans to relations


def rel_functor() -> FramedFunctorData:
    """Span → Rel sending a span to the image of its apex; strong."""

    def on_square(a):
        return RelSquare(to_relation(a.src), to_relation(a.tgt), a.left_arrow, a.right_arrow)

    def compositor(M, N):
        src = REL.compose(to_relation(M), to_relation(N))
        tgt = to_relation(SPAN.compose(M, N))
        return RelSquare(src, tgt, FinFn.identity(src.left_frame),
                         FinFn.identity(src.right_frame))

    def unitor(A):
        return REL.sq_id(REL.unit(A))

    return FramedFunctorData("rel", SPAN, REL, lambda A: A, lambda f: f, to_relation,
                             on_square, compositor, unitor, "lax")


# Fr(Arr) → Span and Fr(Fam) → Mat


def _arr_cell(M: FrCell) -> Span:
    obj = M.obj
    _, pa, pb = product(M.left_frame, M.right_frame)
    return Span(M.left_frame, M.right_frame, obj.total, obj.proj.then(pa), obj.proj.then(pb))


def _fam_cell(M: FrCell) -> SetMatrix:
    return SetMatrix.build(M.left_frame, M.right_frame,
                           lambda a, b: M.obj.fiber(pair_label(a, b)))


def _middle_of(A, B, C):
    return {p3(a, b, c): b for a in A for b in B for c in C}


def _decompose(fr: FrInstance, M: FrCell, N: FrCell):
    """For each element z of M ⊙ N in Fr: (b, m, n) with m ∈ M, n ∈ N over b."""
    phi = fr.phi
    T, Y, cart, opcart, Z = fr._compose_data(M, N)
    split = phi.split_tensor(M.obj, N.obj)
    middle = _middle_of(M.left_frame, M.right_frame, N.right_frame)
    out = {}
    if phi is ARR:
        back = opcart.total.inverse()
        for z in Z.total:
            y = back(z)
            m, n = split(cart.total(y))
            out[z] = (middle[Y.proj(y)], m, n)
        return out
    sums = phi._fiber_sums(opcart)
    for j in Z.index:
        for z in Z.fiber(j):
            t, y = sums[j][z]
            m, n = split(cart.at(t)(y))
            out[(j, z)] = (middle[t], m, n)
    return out


def comparison_functor(fr: FrInstance) -> FramedFunctorData:
    """The strong functor Fr(Arr) → Span or Fr(Fam) → Mat, presented as lax."""
    if fr.phi is ARR:
        cod, on_cell = SPAN, _arr_cell

        def on_square(a):
            return SpanSquare(_arr_cell(a.src), _arr_cell(a.tgt), a.left_arrow, a.right_arrow,
                              a.arrow.total)

        def oplax_comp(M, N):
            parts = _decompose(fr, M, N)
            src = _arr_cell(fr.compose(M, N))
            tgt = SPAN.compose(_arr_cell(M), _arr_cell(N))
            images = tuple(pair_label(parts[z][1], parts[z][2]) for z in src.apex)
            return SpanSquare(src, tgt, FinFn.identity(src.left_frame),
                              FinFn.identity(src.right_frame), FinFn(src.apex, tgt.apex, images))

        def oplax_unit(A):
            src, tgt = _arr_cell(fr.unit(A)), SPAN.unit(A)
            return SpanSquare(src, tgt, FinFn.identity(A), FinFn.identity(A),
                              FinFn(src.apex, tgt.apex, tuple(src.l(x) for x in src.apex)))
    elif fr.phi is FAM:
        cod, on_cell = MAT, _fam_cell

        def on_square(a):
            return MatrixSquare(_fam_cell(a.src), _fam_cell(a.tgt), a.left_arrow,
                                a.right_arrow,
                                tuple(a.arrow.at(pair_label(x, y)) for x in a.src.left_frame
                                      for y in a.src.right_frame))

        def oplax_comp(M, N):
            parts = _decompose(fr, M, N)
            src = _fam_cell(fr.compose(M, N))
            tgt = MAT.compose(_fam_cell(M), _fam_cell(N))

            def entry(a, c):
                j = pair_label(a, c)
                return FinFn(src.entry(a, c), tgt.entry(a, c), tuple(
                    tagged(parts[(j, z)][0], pair_label(parts[(j, z)][1], parts[(j, z)][2]))
                    for z in src.entry(a, c)))
            return MAT._globular(src, tgt, lambda a, c: entry(a, c).images)

        def oplax_unit(A):
            src, tgt = _fam_cell(fr.unit(A)), MAT.unit(A)
            return MAT._globular(src, tgt, lambda a, b: tuple(STAR for _ in src.entry(a, b)))
    else:
        raise ValueError("comparison functors exist for Fr(Arr) and Fr(Fam)")

    def compositor(M, N):
        inv = cod.invert(oplax_comp(M, N))
        if inv is None:
            raise LawViolation("comparison compositor is not invertible")
        return inv

    def unitor(A):
        inv = cod.invert(oplax_unit(A))
        if inv is None:
            raise LawViolation("comparison unitor is not invertible")
        return inv

    return FramedFunctorData(f"compare({fr.name})", fr, cod, lambda A: A, lambda f: f, on_cell,
                             on_square, compositor, unitor, "lax")


def comparison_choices(fr: FrInstance) -> EquivalenceChoices:
    """Every span (matrix) is literally the image of a Fr cell."""
    if fr.phi is ARR:
        def cell(P):
            obj = ArrObject(P.apex, product_set(P.left_frame, P.right_frame),
                            pairing(P.l, P.r))
            return FrCell(P.left_frame, P.right_frame, obj)
        cod = SPAN
    else:
        def cell(P):
            fibers = tuple(P.entry(a, b) for a in P.left_frame for b in P.right_frame)
            return FrCell(P.left_frame, P.right_frame,
                          FamObject(product_set(P.left_frame, P.right_frame), fibers))
        cod = MAT

    def cell_iso(P):
        return cod.sq_id(P)

    def square_preimage(M, N, f, g, target):
        # the comparison is the identity on elements, so the square lifts as is
        if fr.phi is ARR:
            arrow = ArrArrow(M.obj, N.obj, product_map(f, g), target.h)
        else:
            arrow = FamArrow(M.obj, N.obj, product_map(f, g), target.maps)
        return FrSquare(M, N, f, g, arrow)

    return EquivalenceChoices(lambda C: C, FinFn.identity, cell, cell_iso, square_preimage)


def identity_choices(inst) -> EquivalenceChoices:
    return EquivalenceChoices(lambda C: C, inst.v_id, lambda N: N, inst.sq_id)


def cartesian_witness_fixture():
    """The restriction of U_{z} along {x1,x2} → {z} ← {y1,y2}."""
    Z = FinSet("Z", ("z",))
    X = FinSet("X", ("x1", "x2"))
    Y = FinSet("Y", ("y1", "y2"))
    f = FinFn(X, Z, ("z", "z"))
    g = FinFn(Y, Z, ("z", "z"))
    return f, SPAN.unit(Z), g


__all__ = [
    "SetEndofunctor", "SetTransformation", "IDENTITY", "POWERSET", "PLUS_ONE", "INL",
    "SINGLETON", "times", "power", "then_functor", "projection", "constants", "exp_unit", "exp_counit",
    "span_functor", "strong_span_functor", "span_transformation", "exponential_adjunction",
    "rel_functor", "comparison_functor", "comparison_choices", "identity_choices",
    "cartesian_witness_fixture", "subset_label", "fn_label",
]

