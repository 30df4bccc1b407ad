"""Law checkers for double categories, framed bicategories and the maps
between them.

Every checker draws deterministic samples (seeded per law and sample
index), evaluates a named equation with the coherence cells inserted
explicitly, and returns a :class:`LawReport`. A failing report carries a
witness holding the encoded sample, which :func:`replay_law` turns back
into the same verdict; :func:`replaying` reruns a whole checker on that one
sample.
"""
from __future__ import annotations

import random
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Any, Callable

from .doublecore import (BudgetExceeded, CartesianWitness, LawReport, LawViolation,
                         bc_objects_represent, combine, check_frames, companion_conjoint,
                         companion_equations, enumerate_factorizations, factor_universal,
                         globularize, restrict_via_companions, search_budget)
from .finkit import FinError


@dataclass
class Sample:
    cells: list = field(default_factory=list)
    squares: list = field(default_factory=list)
    arrows: list = field(default_factory=list)
    objects: list = field(default_factory=list)

    def encode(self, inst) -> dict:
        return {"objects": [inst.encode_object(x) for x in self.objects],
                "arrows": [inst.encode_arrow(x) for x in self.arrows],
                "cells": [inst.encode_cell(x) for x in self.cells],
                "squares": [inst.encode_square(x) for x in self.squares]}

    @staticmethod
    def decode(inst, data) -> "Sample":
        return Sample([inst.decode_cell(x) for x in data.get("cells", [])],
                      [inst.decode_square(x) for x in data.get("squares", [])],
                      [inst.decode_arrow(x) for x in data.get("arrows", [])],
                      [inst.decode_object(x) for x in data.get("objects", [])])


def sample_rng(seed: int, law: str, index: int) -> random.Random:
    return random.Random(f"{seed}:{law}:{index}")


# sampling helpers


def arrow_from(inst, rng, A, cap, prefix):
    for _ in range(20):
        B = inst.random_object(rng, cap, prefix)
        f = inst.random_arrow(rng, A, B)
        if f is not None:
            return B, f
    return A, inst.v_id(A)


def arrow_into(inst, rng, B, cap, prefix):
    for _ in range(20):
        A = inst.random_object(rng, cap, prefix)
        f = inst.random_arrow(rng, A, B)
        if f is not None:
            return A, f
    return B, inst.v_id(B)


def cell_chain(inst, rng, n, cap, cell_cap):
    objs = [inst.random_object(rng, cap, chr(ord("a") + i)) for i in range(n + 1)]
    cells = [inst.random_cell(rng, objs[i], objs[i + 1], cell_cap, f"m{i}_") for i in range(n)]
    return objs, cells


def square_chain(inst, rng, n, cap, cell_cap):
    objs, cells = cell_chain(inst, rng, n, cap, cell_cap)
    arrows = [arrow_from(inst, rng, A, cap, chr(ord("p") + i))[1] for i, A in enumerate(objs)]
    squares = [inst.random_square_from(rng, cells[i], arrows[i], arrows[i + 1], cell_cap, f"n{i}_")
               for i in range(n)]
    return objs, arrows, cells, squares


def _eq(inst, lhs, rhs, what):
    return None if inst.same_square(lhs, rhs) else f"{what}: the two pastings differ"


# double-category laws; each returns None or a failure message


def law_pentagon(inst, s: Sample):
    M, N, P, Q = s.cells
    a = inst.assoc
    lhs = inst.vcomp(a(inst.compose(M, N), P, Q), a(M, N, inst.compose(P, Q)))
    rhs = inst.vcomp_all(inst.hcomp(a(M, N, P), inst.sq_id(Q)),
                         a(M, inst.compose(N, P), Q),
                         inst.hcomp(inst.sq_id(M), a(N, P, Q)))
    return _eq(inst, lhs, rhs, "pentagon")


def law_triangle(inst, s: Sample):
    M, N = s.cells
    U = inst.unit(M.right_frame)
    lhs = inst.vcomp(inst.assoc(M, U, N), inst.hcomp(inst.sq_id(M), inst.lunitor(N)))
    rhs = inst.hcomp(inst.runitor(M), inst.sq_id(N))
    return _eq(inst, lhs, rhs, "unit triangle")


def law_unitors_agree_on_unit(inst, s: Sample):
    (A,) = s.objects
    U = inst.unit(A)
    return _eq(inst, inst.lunitor(U), inst.runitor(U), "left and right unitor on U")


def law_assoc_natural(inst, s: Sample):
    al, be, ga = s.squares
    lhs = inst.vcomp(inst.hcomp(inst.hcomp(al, be), ga), inst.assoc(al.tgt, be.tgt, ga.tgt))
    rhs = inst.vcomp(inst.assoc(al.src, be.src, ga.src), inst.hcomp(al, inst.hcomp(be, ga)))
    return _eq(inst, lhs, rhs, "associator naturality")


def law_unitors_natural(inst, s: Sample):
    (al,) = s.squares
    lhs = inst.vcomp(inst.hcomp(inst.unit_square(al.left_arrow), al), inst.lunitor(al.tgt))
    rhs = inst.vcomp(inst.lunitor(al.src), al)
    bad = _eq(inst, lhs, rhs, "left unitor naturality")
    if bad:
        return bad
    lhs = inst.vcomp(inst.hcomp(al, inst.unit_square(al.right_arrow)), inst.runitor(al.tgt))
    rhs = inst.vcomp(inst.runitor(al.src), al)
    return _eq(inst, lhs, rhs, "right unitor naturality")


def law_interchange(inst, s: Sample):
    al, be, al2, be2 = s.squares
    lhs = inst.vcomp(inst.hcomp(al, be), inst.hcomp(al2, be2))
    rhs = inst.hcomp(inst.vcomp(al, al2), inst.vcomp(be, be2))
    return _eq(inst, lhs, rhs, "interchange")


def law_hcomp_identities(inst, s: Sample):
    M, N = s.cells
    return _eq(inst, inst.hcomp(inst.sq_id(M), inst.sq_id(N)), inst.sq_id(inst.compose(M, N)),
               "identity squares compose to the identity")


def law_unit_functor(inst, s: Sample):
    f, g = s.arrows
    bad = _eq(inst, inst.unit_square(inst.v_then(f, g)),
              inst.vcomp(inst.unit_square(f), inst.unit_square(g)), "U preserves composites")
    if bad:
        return bad
    A = inst.arrow_src(f)
    return _eq(inst, inst.unit_square(inst.v_id(A)), inst.sq_id(inst.unit(A)),
               "U preserves identities")


def law_vertical_category(inst, s: Sample):
    al, be, ga = s.squares
    bad = _eq(inst, inst.vcomp(inst.vcomp(al, be), ga), inst.vcomp(al, inst.vcomp(be, ga)),
              "vertical associativity")
    if bad:
        return bad
    bad = _eq(inst, inst.vcomp(inst.sq_id(al.src), al), al, "vertical left identity")
    return bad or _eq(inst, inst.vcomp(al, inst.sq_id(al.tgt)), al, "vertical right identity")


def law_constraints_invertible(inst, s: Sample):
    M, N, P = s.cells
    for name, c in (("associator", inst.assoc(M, N, P)), ("left unitor", inst.lunitor(M)),
                    ("right unitor", inst.runitor(M))):
        check_frames(inst, c)
        if not inst.is_globular(c):
            return f"{name} is not globular"
        inv = inst.invert(c)
        if inv is None:
            return f"{name} is not invertible"
        if not inst.same_square(inst.vcomp(c, inv), inst.sq_id(c.src)):
            return f"{name} inverse is not two-sided"
    return None


def law_frames(inst, s: Sample):
    for a in s.squares:
        check_frames(inst, a)
    for a, b in zip(s.squares, s.squares[1:]):
        c = inst.hcomp(a, b)
        check_frames(inst, c)
        if c.src.left_frame != a.src.left_frame or c.src.right_frame != b.src.right_frame:
            return "horizontal composite has the wrong frames"
    return None


# framed laws


def law_companion_equations(inst, s: Sample):
    (f,) = s.arrows
    data = companion_conjoint(inst, f)
    for name, lhs, rhs in companion_equations(inst, data):
        if not inst.same_square(lhs, rhs):
            return f"{name} equation fails"
    return None


def law_bc_objects(inst, s: Sample):
    f, g = s.arrows
    (M,) = s.cells
    rep = bc_objects_represent(inst, f, M, g)
    return None if rep.ok else "restriction is not represented by companion and conjoint"


def law_restrict_identity(inst, s: Sample):
    (M,) = s.cells
    cell, w = inst.restrict(inst.v_id(M.left_frame), M, inst.v_id(M.right_frame))
    if inst.invert(w.square) is None:
        return "restriction along identities is not an isomorphism"
    cell, w = inst.extend(inst.v_id(M.left_frame), M, inst.v_id(M.right_frame))
    if inst.invert(w.square) is None:
        return "extension along identities is not an isomorphism"
    return None


def _factor_all(inst, witness, cands, h, k):
    for cand in cands:
        found = enumerate_factorizations(inst, witness, cand, h, k)
        if len(found) != 1:
            return f"{witness.direction} square admits {len(found)} factorizations"
        formula = factor_universal(inst, witness, cand, h, k)
        if not inst.same_square(formula, found[0]):
            return f"closed-form {witness.direction} factorization disagrees with search"
    return None


def law_restrict_cartesian(inst, s: Sample):
    f, g, h, k = s.arrows
    M, N = s.cells
    R, w = inst.restrict(f, M, g)
    budget = min(search_budget(), 20000)
    work = (inst.square_count_bound(N, M, inst.v_then(h, f), inst.v_then(k, g))
            * max(1, inst.square_count_bound(N, R, h, k)))
    if work > budget:
        raise BudgetExceeded("too many candidate squares")
    cands = list(inst.squares(N, M, inst.v_then(h, f), inst.v_then(k, g)))
    return _factor_all(inst, w, cands, h, k)


def law_extend_opcartesian(inst, s: Sample):
    f, g, h, k = s.arrows
    M, N = s.cells
    E, w = inst.extend(f, M, g)
    budget = min(search_budget(), 20000)
    work = (inst.square_count_bound(M, N, inst.v_then(f, h), inst.v_then(g, k))
            * max(1, inst.square_count_bound(E, N, h, k)))
    if work > budget:
        raise BudgetExceeded("too many candidate squares")
    cands = list(inst.squares(M, N, inst.v_then(f, h), inst.v_then(g, k)))
    return _factor_all(inst, w, cands, h, k)


# generators


def gen_pentagon(inst, rng, cap):
    return Sample(cells=cell_chain(inst, rng, 4, min(cap, 3), 2)[1])


def gen_pair(inst, rng, cap):
    return Sample(cells=cell_chain(inst, rng, 2, cap, 3)[1])


def gen_triple(inst, rng, cap):
    return Sample(cells=cell_chain(inst, rng, 3, min(cap, 4), 3)[1])


def gen_object(inst, rng, cap):
    return Sample(objects=[inst.random_object(rng, cap, "a")])


def gen_three_squares(inst, rng, cap):
    _, _, _, squares = square_chain(inst, rng, 3, min(cap, 4), 2)
    return Sample(squares=squares)


def gen_one_square(inst, rng, cap):
    _, _, _, squares = square_chain(inst, rng, 1, cap, 3)
    return Sample(squares=squares)


def gen_interchange(inst, rng, cap):
    objs, arrows, cells, squares = square_chain(inst, rng, 2, min(cap, 4), 2)
    second = [arrow_from(inst, rng, inst.arrow_tgt(f), min(cap, 4), chr(ord("u") + i))[1]
              for i, f in enumerate(arrows)]
    more = [inst.random_square_from(rng, squares[i].tgt, second[i], second[i + 1], 2, f"o{i}_")
            for i in range(2)]
    return Sample(squares=squares + more)


def gen_vertical_triple(inst, rng, cap):
    _, _, _, (al,) = square_chain(inst, rng, 1, cap, 3)
    out = [al]
    for i in range(2):
        prev = out[-1]
        f = arrow_from(inst, rng, prev.tgt.left_frame, cap, f"v{i}")[1]
        g = arrow_from(inst, rng, prev.tgt.right_frame, cap, f"w{i}")[1]
        out.append(inst.random_square_from(rng, prev.tgt, f, g, 3, f"o{i}_"))
    return Sample(squares=out)


def gen_two_arrows(inst, rng, cap):
    A = inst.random_object(rng, cap, "a")
    B, f = arrow_from(inst, rng, A, cap, "b")
    _, g = arrow_from(inst, rng, B, cap, "c")
    return Sample(arrows=[f, g])


def gen_one_arrow(inst, rng, cap):
    A = inst.random_object(rng, cap, "a")
    _, f = arrow_from(inst, rng, A, cap, "b")
    return Sample(arrows=[f])


def gen_bc(inst, rng, cap):
    A = inst.random_object(rng, cap, "a")
    B = inst.random_object(rng, cap, "b")
    _, f = arrow_into(inst, rng, A, cap, "c")
    _, g = arrow_into(inst, rng, B, cap, "d")
    return Sample(cells=[inst.random_cell(rng, A, B, 3)], arrows=[f, g])


def gen_cell(inst, rng, cap):
    A = inst.random_object(rng, cap, "a")
    B = inst.random_object(rng, cap, "b")
    return Sample(cells=[inst.random_cell(rng, A, B, 4)])


def gen_restrict_universal(inst, rng, cap):
    cap = min(cap, 3)
    A = inst.random_object(rng, cap, "a")
    B = inst.random_object(rng, cap, "b")
    C, f = arrow_into(inst, rng, A, cap, "c")
    D, g = arrow_into(inst, rng, B, cap, "d")
    X, h = arrow_into(inst, rng, C, cap, "x")
    Y, k = arrow_into(inst, rng, D, cap, "y")
    M = inst.random_cell(rng, A, B, 2)
    if rng.random() < 0.5:
        # the chosen restriction itself has many candidate squares into M
        N = inst.restrict(inst.v_then(h, f), M, inst.v_then(k, g))[0]
    else:
        N = inst.random_cell(rng, X, Y, 2, "n")
    return Sample(cells=[M, N], arrows=[f, g, h, k])


def gen_extend_universal(inst, rng, cap):
    cap = min(cap, 3)
    A = inst.random_object(rng, cap, "a")
    B = inst.random_object(rng, cap, "b")
    C, f = arrow_from(inst, rng, A, cap, "c")
    D, g = arrow_from(inst, rng, B, cap, "d")
    X, h = arrow_from(inst, rng, C, cap, "x")
    Y, k = arrow_from(inst, rng, D, cap, "y")
    return Sample(cells=[inst.random_cell(rng, A, B, 2), inst.random_cell(rng, X, Y, 3, "n")],
                  arrows=[f, g, h, k])


DOUBLE_LAWS: dict[str, tuple[Callable, Callable]] = {
    "pentagon": (law_pentagon, gen_pentagon),
    "unit_triangle": (law_triangle, gen_pair),
    "unitors_on_unit": (law_unitors_agree_on_unit, gen_object),
    "associator_naturality": (law_assoc_natural, gen_three_squares),
    "unitor_naturality": (law_unitors_natural, gen_one_square),
    "interchange": (law_interchange, gen_interchange),
    "identity_squares": (law_hcomp_identities, gen_pair),
    "unit_functor": (law_unit_functor, gen_two_arrows),
    "vertical_category": (law_vertical_category, gen_vertical_triple),
    "constraints_invertible": (law_constraints_invertible, gen_triple),
    "frames": (law_frames, gen_three_squares),
}

FRAMED_LAWS: dict[str, tuple[Callable, Callable]] = {
    "companion_equations": (law_companion_equations, gen_one_arrow),
    "restriction_by_companions": (law_bc_objects, gen_bc),
    "identity_base_change": (law_restrict_identity, gen_cell),
    "restriction_cartesian": (law_restrict_cartesian, gen_restrict_universal),
    "extension_opcartesian": (law_extend_opcartesian, gen_extend_universal),
}

LAW_TABLE: dict[str, Callable] = {name: fn for table in (DOUBLE_LAWS, FRAMED_LAWS)
                                  for name, (fn, _) in table.items()}


def evaluate(inst, law: str, sample: Sample, table: dict | None = None,
             subject=None) -> str | None:
    fn = (table or LAW_TABLE)[law]
    if isinstance(fn, tuple):
        fn = fn[0]
    try:
        return fn(inst if subject is None else subject, sample)
    except (LawViolation, FinError) as exc:
        # ill-formed pastings count as violations: they only arise from bad data
        return f"{law}: {exc}"


_REPLAY: ContextVar[dict | None] = ContextVar("framedkit_replay", default=None)


@contextmanager
def replaying(witness: dict):
    """Within this block every run_table call evaluates only the recorded
    failure: the law, instance, tag and sample index of ``witness``."""
    token = _REPLAY.set(witness)
    try:
        yield
    finally:
        _REPLAY.reset(token)


def _replay_indices(target, law, inst, seed, tag, samples):
    if target is None:
        return range(samples)
    if (target.get("law") != law or target.get("instance") != inst.name
            or target.get("seed") != seed
            or any(target.get(k) != v for k, v in (tag or {}).items())):
        return range(0)
    return range(target["sample"], target["sample"] + 1)


def run_table(subject, inst, laws: dict, suite: str, seed: int = 0, samples: int = 200,
              cap: int = 5, tag: dict | None = None) -> LawReport:
    """Run every law of ``laws`` on ``samples`` samples drawn from ``inst``.

    Laws are called as ``fn(subject, sample)``; the witness of the first
    failure records the encoded sample plus ``tag`` so it can be replayed.
    """
    target = _REPLAY.get()
    parts = []
    for law, (fn, gen) in laws.items():
        failure, skipped = None, 0
        indices = _replay_indices(target, law, inst, seed, tag, samples)
        for i in indices:
            sample = gen(inst, sample_rng(seed, law, i), cap)
            try:
                message = evaluate(inst, law, sample, laws, subject)
            except BudgetExceeded:
                skipped += 1
                continue
            if message is not None:
                failure = {"law": law, "instance": inst.name, "seed": seed, "sample": i,
                           "message": message, "args": sample.encode(inst)}
                failure.update(tag or {})
                break
        parts.append(LawReport(law, failure is None, len(indices) - skipped, failure, seed,
                               skipped=skipped))
    return combine(suite, parts, seed)


def run_laws(inst, laws: dict, suite: str, seed: int = 0, samples: int = 200,
             cap: int = 5) -> LawReport:
    return run_table(inst, inst, laws, suite, seed, samples, cap)


def check_double_axioms(inst, seed: int = 0, samples: int = 200, cap: int = 5) -> LawReport:
    return run_laws(inst, DOUBLE_LAWS, "double_axioms", seed, samples, cap)


def check_framed_structure(inst, seed: int = 0, samples: int = 200, cap: int = 5) -> LawReport:
    return run_laws(inst, FRAMED_LAWS, "framed_structure", seed, samples, cap)


def replay_law(inst, witness: dict) -> dict:
    """Re-evaluate a recorded law failure from its encoded sample."""
    sample = Sample.decode(inst, witness["args"])
    message = evaluate(inst, witness["law"], sample)
    out = dict(witness)
    out["message"] = message
    return out


# framed functors and transformations


@dataclass
class FramedFunctorData:
    """A lax or oplax framed functor given by its action and constraints.

    For ``flavor == "lax"`` the constraints go ``FM ⊙ FN ⇒ F(M ⊙ N)`` and
    ``U_FA ⇒ F(U_A)``; for ``"oplax"`` they go the other way. Whether the
    functor is strong or normal is a property the checker records.
    """

    name: str
    dom: Any
    cod: Any
    on_object: Callable
    on_arrow: Callable
    on_cell: Callable
    on_square: Callable
    compositor: Callable
    unitor: Callable
    flavor: str = "lax"

    def __post_init__(self):
        if self.flavor not in ("lax", "oplax"):
            raise ValueError(f"unknown functor flavor {self.flavor!r}")


@dataclass
class FramedTransformationData:
    """α: F ⇒ G with vertical components α_A and square components α_M."""

    name: str
    source: FramedFunctorData
    target: FramedFunctorData
    on_object: Callable
    on_cell: Callable


def identity_functor(inst, flavor: str = "lax") -> FramedFunctorData:
    return FramedFunctorData(
        f"id({inst.name})", inst, inst, lambda A: A, lambda f: f, lambda M: M, lambda a: a,
        lambda M, N: inst.sq_id(inst.compose(M, N)), lambda A: inst.sq_id(inst.unit(A)),
        flavor)


def compose_functors(F: FramedFunctorData, G: FramedFunctorData) -> FramedFunctorData:
    """G ∘ F (apply F first)."""
    if F.flavor != G.flavor:
        raise ValueError("composite functors must share a flavor")
    E = G.cod

    if F.flavor == "lax":
        def comp(M, N):
            return E.vcomp(G.compositor(F.on_cell(M), F.on_cell(N)),
                           G.on_square(F.compositor(M, N)))

        def unit(A):
            return E.vcomp(G.unitor(F.on_object(A)), G.on_square(F.unitor(A)))
    else:
        def comp(M, N):
            return E.vcomp(G.on_square(F.compositor(M, N)),
                           G.compositor(F.on_cell(M), F.on_cell(N)))

        def unit(A):
            return E.vcomp(G.on_square(F.unitor(A)), G.unitor(F.on_object(A)))
    return FramedFunctorData(
        f"{G.name}.{F.name}", F.dom, E,
        lambda A: G.on_object(F.on_object(A)), lambda f: G.on_arrow(F.on_arrow(f)),
        lambda M: G.on_cell(F.on_cell(M)), lambda a: G.on_square(F.on_square(a)),
        comp, unit, F.flavor)


def _must_invert(inst, a, what):
    inv = inst.invert(a)
    if inv is None:
        raise LawViolation(f"{what} is not invertible")
    return inv


def flip_flavor(F: FramedFunctorData) -> FramedFunctorData:
    """The same functor seen with the opposite flavor; needs invertible constraints."""
    E = F.cod
    return FramedFunctorData(
        F.name, F.dom, E, F.on_object, F.on_arrow, F.on_cell, F.on_square,
        lambda M, N: _must_invert(E, F.compositor(M, N), "compositor"),
        lambda A: _must_invert(E, F.unitor(A), "unitor"),
        "oplax" if F.flavor == "lax" else "lax")


def identity_transformation(F: FramedFunctorData) -> FramedTransformationData:
    E = F.cod
    return FramedTransformationData(
        f"id({F.name})", F, F, lambda A: E.v_id(F.on_object(A)),
        lambda M: E.sq_id(F.on_cell(M)))


# sample generators for maps between instances; sizes stay small because
# functors such as the powerset blow cells up exponentially


def gen_map_square(inst, rng, cap):
    _, _, _, squares = square_chain(inst, rng, 1, min(cap, 3), 2)
    return Sample(squares=squares)


def gen_map_squares_h(inst, rng, cap):
    _, _, _, squares = square_chain(inst, rng, 2, min(cap, 3), 2)
    return Sample(squares=squares)


def gen_map_squares_v(inst, rng, cap):
    _, _, _, (al,) = square_chain(inst, rng, 1, min(cap, 3), 2)
    f = arrow_from(inst, rng, al.tgt.left_frame, min(cap, 3), "v")[1]
    g = arrow_from(inst, rng, al.tgt.right_frame, min(cap, 3), "w")[1]
    return Sample(squares=[al, inst.random_square_from(rng, al.tgt, f, g, 2, "o_")])


def gen_map_pair(inst, rng, cap):
    return Sample(cells=cell_chain(inst, rng, 2, min(cap, 3), 2)[1])


def gen_map_triple(inst, rng, cap):
    return Sample(cells=cell_chain(inst, rng, 3, min(cap, 2), 2)[1])


def gen_map_cell(inst, rng, cap):
    return Sample(cells=cell_chain(inst, rng, 1, min(cap, 3), 3)[1])


def gen_map_object(inst, rng, cap):
    return Sample(objects=[inst.random_object(rng, min(cap, 3), "a")])


def gen_map_arrows(inst, rng, cap):
    return gen_two_arrows(inst, rng, min(cap, 3))


def gen_map_restrict(inst, rng, cap):
    cap = min(cap, 3)
    A = inst.random_object(rng, cap, "a")
    B = inst.random_object(rng, cap, "b")
    _, f = arrow_into(inst, rng, A, cap, "c")
    _, g = arrow_into(inst, rng, B, cap, "d")
    return Sample(cells=[inst.random_cell(rng, A, B, 2)], arrows=[f, g])


def gen_map_extend(inst, rng, cap):
    cap = min(cap, 3)
    A = inst.random_object(rng, cap, "a")
    B = inst.random_object(rng, cap, "b")
    _, f = arrow_from(inst, rng, A, cap, "c")
    _, g = arrow_from(inst, rng, B, cap, "d")
    return Sample(cells=[inst.random_cell(rng, A, B, 2)], arrows=[f, g])


def gen_map_globular(inst, rng, cap):
    A = inst.random_object(rng, min(cap, 3), "a")
    B = inst.random_object(rng, min(cap, 3), "b")
    M = inst.random_cell(rng, A, B, 2)
    theta = inst.random_square_from(rng, M, inst.v_id(A), inst.v_id(B), 2, "n")
    return Sample(squares=[theta])


# functor laws; ``F`` is a FramedFunctorData


def _feq(F, lhs, rhs, what):
    return _eq(F.cod, lhs, rhs, what)


def fun_frames(F, s: Sample):
    E = F.cod
    (a,) = s.squares
    Fa = F.on_square(a)
    check_frames(E, Fa)
    if Fa.src != F.on_cell(a.src) or Fa.tgt != F.on_cell(a.tgt):
        return "image square does not go between the image cells"
    if Fa.left_arrow != F.on_arrow(a.left_arrow) or Fa.right_arrow != F.on_arrow(a.right_arrow):
        return "image square does not lie over the image arrows"
    FM = F.on_cell(a.src)
    if FM.left_frame != F.on_object(a.src.left_frame) or \
            FM.right_frame != F.on_object(a.src.right_frame):
        return "image cell has the wrong frames"
    return None


def fun_vertical(F, s: Sample):
    D, E = F.dom, F.cod
    a, b = s.squares
    bad = _feq(F, F.on_square(D.vcomp(a, b)), E.vcomp(F.on_square(a), F.on_square(b)),
               "F preserves vertical composites")
    bad = bad or _feq(F, F.on_square(D.sq_id(a.src)), E.sq_id(F.on_cell(a.src)),
                      "F preserves identity squares")
    if bad:
        return bad
    f, g = a.left_arrow, b.left_arrow
    if F.on_arrow(D.v_then(f, g)) != E.v_then(F.on_arrow(f), F.on_arrow(g)):
        return "F0 does not preserve composites"
    A = D.arrow_src(f)
    if F.on_arrow(D.v_id(A)) != E.v_id(F.on_object(A)):
        return "F0 does not preserve identities"
    return None


def fun_constraints_globular(F, s: Sample):
    D, E = F.dom, F.cod
    M, N = s.cells
    c = F.compositor(M, N)
    u = F.unitor(M.left_frame)
    check_frames(E, c)
    check_frames(E, u)
    if not (E.is_globular(c) and E.is_globular(u)):
        return "constraint cells must be globular"
    ends = (E.compose(F.on_cell(M), F.on_cell(N)), F.on_cell(D.compose(M, N)))
    uends = (E.unit(F.on_object(M.left_frame)), F.on_cell(D.unit(M.left_frame)))
    if F.flavor == "oplax":
        ends, uends = ends[::-1], uends[::-1]
    if (c.src, c.tgt) != ends:
        return "compositor has the wrong source or target"
    if (u.src, u.tgt) != uends:
        return "unitor has the wrong source or target"
    return None


def fun_compositor_natural(F, s: Sample):
    D, E = F.dom, F.cod
    a, b = s.squares
    Fab = E.hcomp(F.on_square(a), F.on_square(b))
    Fh = F.on_square(D.hcomp(a, b))
    if F.flavor == "lax":
        lhs = E.vcomp(Fab, F.compositor(a.tgt, b.tgt))
        rhs = E.vcomp(F.compositor(a.src, b.src), Fh)
    else:
        lhs = E.vcomp(Fh, F.compositor(a.tgt, b.tgt))
        rhs = E.vcomp(F.compositor(a.src, b.src), Fab)
    return _feq(F, lhs, rhs, "compositor naturality")


def fun_unitor_natural(F, s: Sample):
    D, E = F.dom, F.cod
    (a,) = s.squares
    f = a.left_arrow
    A, B = D.arrow_src(f), D.arrow_tgt(f)
    UF, FU = E.unit_square(F.on_arrow(f)), F.on_square(D.unit_square(f))
    if F.flavor == "lax":
        lhs, rhs = E.vcomp(UF, F.unitor(B)), E.vcomp(F.unitor(A), FU)
    else:
        lhs, rhs = E.vcomp(FU, F.unitor(B)), E.vcomp(F.unitor(A), UF)
    return _feq(F, lhs, rhs, "unitor naturality")


def fun_associativity(F, s: Sample):
    D, E = F.dom, F.cod
    M, N, P = s.cells
    FM, FN, FP = (F.on_cell(X) for X in (M, N, P))
    c = F.compositor
    if F.flavor == "lax":
        lhs = E.vcomp_all(E.hcomp(c(M, N), E.sq_id(FP)), c(D.compose(M, N), P),
                          F.on_square(D.assoc(M, N, P)))
        rhs = E.vcomp_all(E.assoc(FM, FN, FP), E.hcomp(E.sq_id(FM), c(N, P)),
                          c(M, D.compose(N, P)))
    else:
        lhs = E.vcomp_all(F.on_square(D.assoc(M, N, P)), c(M, D.compose(N, P)),
                          E.hcomp(E.sq_id(FM), c(N, P)))
        rhs = E.vcomp_all(c(D.compose(M, N), P), E.hcomp(c(M, N), E.sq_id(FP)),
                          E.assoc(FM, FN, FP))
    return _feq(F, lhs, rhs, "compositor associativity")


def fun_unitality(F, s: Sample):
    D, E = F.dom, F.cod
    (M,) = s.cells
    A, B = M.left_frame, M.right_frame
    FM = F.on_cell(M)
    c, u = F.compositor, F.unitor
    if F.flavor == "lax":
        left = E.vcomp_all(E.hcomp(u(A), E.sq_id(FM)), c(D.unit(A), M),
                           F.on_square(D.lunitor(M)))
        right = E.vcomp_all(E.hcomp(E.sq_id(FM), u(B)), c(M, D.unit(B)),
                            F.on_square(D.runitor(M)))
        bad = _feq(F, left, E.lunitor(FM), "left unit coherence")
        return bad or _feq(F, right, E.runitor(FM), "right unit coherence")
    left = E.vcomp_all(c(D.unit(A), M), E.hcomp(u(A), E.sq_id(FM)), E.lunitor(FM))
    right = E.vcomp_all(c(M, D.unit(B)), E.hcomp(E.sq_id(FM), u(B)), E.runitor(FM))
    bad = _feq(F, left, F.on_square(D.lunitor(M)), "left unit coherence")
    return bad or _feq(F, right, F.on_square(D.runitor(M)), "right unit coherence")


def cartesian_comparison(F: FramedFunctorData, f, M, g) -> dict:
    """Compare F(f*Mg*) with (Ff)*(FM)(Fg)* through the canonical cell."""
    D, E = F.dom, F.cod
    R, w = D.restrict(f, M, g)
    R2, w2 = E.restrict(F.on_arrow(f), F.on_cell(M), F.on_arrow(g))
    c = factor_universal(E, w2, F.on_square(w.square))
    return {"iso": E.invert(c) is not None, "source_size": E.cell_size(F.on_cell(R)),
            "target_size": E.cell_size(R2), "comparison": c}


def opcartesian_comparison(F: FramedFunctorData, f, M, g) -> dict:
    """Compare (Ff)_!(FM)(Fg)_! with F(f_!Mg_!) through the canonical cell."""
    D, E = F.dom, F.cod
    X, w = D.extend(f, M, g)
    X2, w2 = E.extend(F.on_arrow(f), F.on_cell(M), F.on_arrow(g))
    c = factor_universal(E, w2, F.on_square(w.square))
    return {"iso": E.invert(c) is not None, "source_size": E.cell_size(X2),
            "target_size": E.cell_size(F.on_cell(X)), "comparison": c}


def fun_preserves_cartesian(F, s: Sample):
    f, g = s.arrows
    (M,) = s.cells
    cmp = cartesian_comparison(F, f, M, g)
    if cmp["iso"]:
        return None
    return (f"image of a cartesian square is not cartesian: F(f*Mg*) has "
            f"{cmp['source_size']} elements, (Ff)*(FM)(Fg)* has {cmp['target_size']}")


def fun_preserves_opcartesian(F, s: Sample):
    f, g = s.arrows
    (M,) = s.cells
    cmp = opcartesian_comparison(F, f, M, g)
    if cmp["iso"]:
        return None
    return (f"image of an opcartesian square is not opcartesian: (Ff)_!(FM)(Fg)_! has "
            f"{cmp['source_size']} elements, F(f_!Mg_!) has {cmp['target_size']}")


def _base_change_comparisons(F, f, kind):
    """For lax F: _{Ff}(FB) ⇒ F(_fB) ("companion") or (FB)_{Ff} ⇒ F(B_f)."""
    D, E = F.dom, F.cod
    d, e = companion_conjoint(D, f), companion_conjoint(E, F.on_arrow(f))
    A = D.arrow_src(f)
    if kind == "companion":
        cand = E.vcomp(F.unitor(A), F.on_square(d.comp_unit))
        w = CartesianWitness(e.comp_unit, "opcartesian")
    else:
        cand = E.vcomp(F.unitor(A), F.on_square(d.conj_unit))
        w = CartesianWitness(e.conj_unit, "opcartesian")
    return factor_universal(E, w, cand, exhaustive=True)


def explicit_restriction_inverse(F: FramedFunctorData, f, M, g):
    """For lax F, the inverse of F(f*Mg*) ⇒ (Ff)*(FM)(Fg)* built from the
    base-change comparisons and F⊙, with the restriction written through
    companion and conjoint on both sides."""
    D, E = F.dom, F.cod
    cf, cg = companion_conjoint(D, f), companion_conjoint(D, g)
    kf = _base_change_comparisons(F, f, "companion")
    kg = _base_change_comparisons(F, g, "conjoint")
    FM = F.on_cell(M)
    left = D.compose(cf.companion, M)
    R, w = D.restrict(f, M, g)
    via, wv = restrict_via_companions(D, f, M, g)
    iso = factor_universal(D, w, wv.square)
    return E.vcomp_all(
        E.hcomp(E.hcomp(kf, E.sq_id(FM)), kg),
        E.hcomp(F.compositor(cf.companion, M), E.sq_id(F.on_cell(cg.conjoint))),
        F.compositor(left, cg.conjoint),
        F.on_square(iso))


def fun_explicit_inverse(F, s: Sample):
    D, E = F.dom, F.cod
    f, g = s.arrows
    (M,) = s.cells
    R, w = D.restrict(f, M, g)
    target, w2 = restrict_via_companions(E, F.on_arrow(f), F.on_cell(M), F.on_arrow(g))
    found = factor_universal(E, w2, F.on_square(w.square))
    explicit = explicit_restriction_inverse(F, f, M, g)
    bad = _feq(F, E.vcomp(found, explicit), E.sq_id(F.on_cell(R)),
               "explicit inverse after the comparison")
    return bad or _feq(F, E.vcomp(explicit, found), E.sq_id(target),
                       "comparison after the explicit inverse")


FUNCTOR_LAWS: dict[str, tuple[Callable, Callable]] = {
    "functor_frames": (fun_frames, gen_map_square),
    "functor_vertical": (fun_vertical, gen_map_squares_v),
    "constraints_globular": (fun_constraints_globular, gen_map_pair),
    "compositor_naturality": (fun_compositor_natural, gen_map_squares_h),
    "unitor_naturality": (fun_unitor_natural, gen_map_square),
    "compositor_associativity": (fun_associativity, gen_map_triple),
    "unit_coherence": (fun_unitality, gen_map_cell),
}

PRESERVATION_LAWS: dict[str, tuple[Callable, Callable]] = {
    "cartesian_preservation": (fun_preserves_cartesian, gen_map_restrict),
    "opcartesian_preservation": (fun_preserves_opcartesian, gen_map_extend),
}

EXPLICIT_INVERSE_LAW = {"explicit_restriction_inverse": (fun_explicit_inverse, gen_map_restrict)}


def _constraint_facts(F, seed, samples, cap) -> dict:
    E = F.cod
    facts = {"strong": True, "normal": True}
    for i in range(samples):
        rng = sample_rng(seed, "constraint_isos", i)
        # slightly larger cells than the law samples: non-invertible
        # compositors need several elements over one middle point
        M, N = cell_chain(F.dom, rng, 2, min(cap, 3), 3)[1]
        if facts["normal"] and E.invert(F.unitor(M.left_frame)) is None:
            facts["normal"] = False
            facts["unitor_witness"] = {"sample": i, "object": F.dom.encode_object(M.left_frame)}
        if facts["strong"] and E.invert(F.compositor(M, N)) is None:
            facts["strong"] = False
            facts["compositor_witness"] = {
                "sample": i, "cells": [F.dom.encode_cell(M), F.dom.encode_cell(N)],
                "sizes": [E.cell_size(F.on_cell(F.dom.compose(M, N))),
                          E.cell_size(E.compose(F.on_cell(M), F.on_cell(N)))]}
    facts["strong"] = facts["strong"] and facts["normal"]
    if facts["strong"]:
        facts["certified"] = "strong"
    else:
        facts["certified"] = ("normal " if facts["normal"] else "") + F.flavor
    return facts


def check_framed_functor(F: FramedFunctorData, seed: int = 0, samples: int = 50,
                         cap: int = 3) -> LawReport:
    """Coherence of F's constraints for its flavor, plus the preservation
    property the flavor guarantees (cartesian for lax, opcartesian for oplax).

    The other preservation property, and whether the constraints are
    invertible, are recorded in ``facts`` without affecting the verdict.
    """
    tag = {"functor": F.name}
    required = dict(FUNCTOR_LAWS)
    want = "cartesian_preservation" if F.flavor == "lax" else "opcartesian_preservation"
    other = "opcartesian_preservation" if F.flavor == "lax" else "cartesian_preservation"
    required[want] = PRESERVATION_LAWS[want]
    if F.flavor == "lax":
        required.update(EXPLICIT_INVERSE_LAW)
    rep = run_table(F, F.dom, required, f"framed_functor[{F.name}]", seed, samples, cap, tag)
    facts = _constraint_facts(F, seed, samples, cap)
    extra = run_table(F, F.dom, {other: PRESERVATION_LAWS[other]}, other, seed, samples, cap,
                      tag)
    facts[other] = extra.to_json()
    if facts["strong"] and not extra.ok:
        # strong functors must preserve both kinds of lifts
        rep = combine(rep.law, rep.details + [extra.details[0]], seed)
    rep.facts = facts
    return rep


# transformation laws; ``al`` is a FramedTransformationData


def tr_frames(al, s: Sample):
    F, G, E = al.source, al.target, al.source.cod
    (M,) = s.cells
    a = al.on_cell(M)
    check_frames(E, a)
    if a.src != F.on_cell(M) or a.tgt != G.on_cell(M):
        return "component square does not go from FM to GM"
    if a.left_arrow != al.on_object(M.left_frame) or \
            a.right_arrow != al.on_object(M.right_frame):
        return "component square does not lie over the object components"
    return None


def tr_vertical_natural(al, s: Sample):
    F, G, E = al.source, al.target, al.source.cod
    f, _ = s.arrows
    A, B = F.dom.arrow_src(f), F.dom.arrow_tgt(f)
    if E.v_then(F.on_arrow(f), al.on_object(B)) != E.v_then(al.on_object(A), G.on_arrow(f)):
        return "object components are not natural"
    return None


def tr_square_natural(al, s: Sample):
    F, G, E = al.source, al.target, al.source.cod
    (a,) = s.squares
    lhs = E.vcomp(F.on_square(a), al.on_cell(a.tgt))
    rhs = E.vcomp(al.on_cell(a.src), G.on_square(a))
    return _eq(E, lhs, rhs, "square components are not natural")


def tr_compositor(al, s: Sample):
    F, G, E = al.source, al.target, al.source.cod
    M, N = s.cells
    MN = F.dom.compose(M, N)
    both = E.hcomp(al.on_cell(M), al.on_cell(N))
    if F.flavor == "lax":
        lhs = E.vcomp(F.compositor(M, N), al.on_cell(MN))
        rhs = E.vcomp(both, G.compositor(M, N))
    else:
        lhs = E.vcomp(al.on_cell(MN), G.compositor(M, N))
        rhs = E.vcomp(F.compositor(M, N), both)
    return _eq(E, lhs, rhs, "compatibility with the compositors")


def tr_unitor(al, s: Sample):
    F, G, E = al.source, al.target, al.source.cod
    (A,) = s.objects
    UA = F.dom.unit(A)
    Ua = E.unit_square(al.on_object(A))
    if F.flavor == "lax":
        lhs = E.vcomp(F.unitor(A), al.on_cell(UA))
        rhs = E.vcomp(Ua, G.unitor(A))
    else:
        lhs = E.vcomp(al.on_cell(UA), G.unitor(A))
        rhs = E.vcomp(F.unitor(A), Ua)
    return _eq(E, lhs, rhs, "compatibility with the unitors")


@dataclass
class LoweredTransformation:
    """α̃ on horizontal bicategories: α̃_A is the companion of α_A and
    α̃_M: FM ⊙ α̃_B ⇒ α̃_A ⊙ GM is the globular form of α_M."""

    source: FramedTransformationData

    def on_object(self, A):
        E = self.source.source.cod
        return companion_conjoint(E, self.source.on_object(A)).companion

    def on_cell(self, M):
        return globularize(self.source.source.cod, self.source.on_cell(M))


def lower_to_oplax(al: FramedTransformationData) -> LoweredTransformation:
    return LoweredTransformation(al)


def tr_lowered_composition(al, s: Sample):
    F, G, E = al.source, al.target, al.source.cod
    low = lower_to_oplax(al)
    M, N = s.cells
    MN = F.dom.compose(M, N)
    A, B, C = M.left_frame, M.right_frame, N.right_frame
    tA, tB, tC = low.on_object(A), low.on_object(B), low.on_object(C)
    FM, FN, GM, GN = F.on_cell(M), F.on_cell(N), G.on_cell(M), G.on_cell(N)
    middle = [E.assoc(FM, FN, tC), E.hcomp(E.sq_id(FM), low.on_cell(N)),
              E.assoc_inv(FM, tB, GN), E.hcomp(low.on_cell(M), E.sq_id(GN)),
              E.assoc(tA, GM, GN)]
    if F.flavor == "lax":
        lhs = E.vcomp(E.hcomp(F.compositor(M, N), E.sq_id(tC)), low.on_cell(MN))
        rhs = E.vcomp_all(*middle, E.hcomp(E.sq_id(tA), G.compositor(M, N)))
    else:
        lhs = E.vcomp(low.on_cell(MN), E.hcomp(E.sq_id(tA), G.compositor(M, N)))
        rhs = E.vcomp_all(E.hcomp(F.compositor(M, N), E.sq_id(tC)), *middle)
    return _eq(E, lhs, rhs, "lowered components respect composition")


def tr_lowered_unit(al, s: Sample):
    F, G, E = al.source, al.target, al.source.cod
    low = lower_to_oplax(al)
    (A,) = s.objects
    tA = low.on_object(A)
    UA = F.dom.unit(A)
    if F.flavor == "lax":
        lhs = E.vcomp(E.hcomp(F.unitor(A), E.sq_id(tA)), low.on_cell(UA))
        rhs = E.vcomp_all(E.lunitor(tA), E.runitor_inv(tA), E.hcomp(E.sq_id(tA), G.unitor(A)))
    else:
        lhs = E.vcomp(low.on_cell(UA), E.hcomp(E.sq_id(tA), G.unitor(A)))
        rhs = E.vcomp_all(E.hcomp(F.unitor(A), E.sq_id(tA)), E.lunitor(tA), E.runitor_inv(tA))
    return _eq(E, lhs, rhs, "lowered components respect units")


def tr_lowered_natural(al, s: Sample):
    F, G, E = al.source, al.target, al.source.cod
    low = lower_to_oplax(al)
    (th,) = s.squares
    tA, tB = low.on_object(th.src.left_frame), low.on_object(th.src.right_frame)
    lhs = E.vcomp(E.hcomp(F.on_square(th), E.sq_id(tB)), low.on_cell(th.tgt))
    rhs = E.vcomp(low.on_cell(th.src), E.hcomp(E.sq_id(tA), G.on_square(th)))
    return _eq(E, lhs, rhs, "lowered components are natural in globular squares")


TRANSFORMATION_LAWS: dict[str, tuple[Callable, Callable]] = {
    "component_frames": (tr_frames, gen_map_cell),
    "object_naturality": (tr_vertical_natural, gen_map_arrows),
    "square_naturality": (tr_square_natural, gen_map_square),
    "compositor_compatibility": (tr_compositor, gen_map_pair),
    "unitor_compatibility": (tr_unitor, gen_map_object),
}

LOWERING_LAWS: dict[str, tuple[Callable, Callable]] = {
    "lowered_composition": (tr_lowered_composition, gen_map_pair),
    "lowered_unit": (tr_lowered_unit, gen_map_object),
    "lowered_naturality": (tr_lowered_natural, gen_map_globular),
}


def check_framed_transformation(al: FramedTransformationData, seed: int = 0,
                                samples: int = 50, cap: int = 3,
                                lowering: bool = True) -> LawReport:
    F, G = al.source, al.target
    if F.dom is not G.dom or F.cod is not G.cod or F.flavor != G.flavor:
        raise ValueError("a transformation needs parallel functors of one flavor")
    laws = dict(TRANSFORMATION_LAWS)
    if lowering:
        laws.update(LOWERING_LAWS)
    return run_table(al, F.dom, laws, f"framed_transformation[{al.name}]", seed, samples, cap,
                     {"transformation": al.name})


# equivalences


@dataclass
class EquivalenceChoices:
    """For each object C of the codomain an A_C with α_C: F(A_C) ≅ C, and
    for each cell N: C ⇸ D an M_N: A_C ⇸ A_D with α_N: F(M_N) ≅ N."""

    object: Callable
    object_iso: Callable
    cell: Callable
    cell_iso: Callable
    # optional closed form for the preimage of a square, (M, N, f, g, target)
    # ↦ square; its answer is verified, and search is the fallback
    square_preimage: Callable | None = None


def eq_vertical_full_faithful(F, s: Sample):
    D, E = F.dom, F.cod
    A, B = s.objects
    images = [F.on_arrow(f) for f in D.arrows(A, B)]
    if len(set(images)) != len(images):
        return f"not faithful on vertical arrows: {len(images)} arrows have {len(set(images))} images"
    targets = list(E.arrows(F.on_object(A), F.on_object(B)))
    if len(set(images)) != len(targets):
        return f"not full on vertical arrows: {len(set(images))} of {len(targets)} arrows are hit"
    return None


def _squares_image(F, M, N, f, g):
    D, E = F.dom, F.cod
    budget = min(search_budget(), 20000)
    if D.square_count_bound(M, N, f, g) > budget:
        raise BudgetExceeded("too many squares to compare")
    FM, FN, Ff, Fg = F.on_cell(M), F.on_cell(N), F.on_arrow(f), F.on_arrow(g)
    if E.square_count_bound(FM, FN, Ff, Fg) > budget:
        raise BudgetExceeded("too many image squares to compare")
    dom_sq = list(D.squares(M, N, f, g))
    cod_sq = list(E.squares(FM, FN, Ff, Fg))
    hit = [0] * len(cod_sq)
    for a in dom_sq:
        Fa = F.on_square(a)
        for i, b in enumerate(cod_sq):
            if E.same_square(Fa, b):
                hit[i] += 1
                break
    return dom_sq, cod_sq, hit


def eq_squares_faithful(F, s: Sample):
    (a,) = s.squares
    M, N = a.src, a.tgt
    dom_sq, cod_sq, hit = _squares_image(F, M, N, a.left_arrow, a.right_arrow)
    if any(h > 1 for h in hit):
        return (f"not faithful: {len(dom_sq)} squares map onto "
                f"{sum(1 for h in hit if h)} distinct image squares")
    return None


def eq_squares_full(F, s: Sample):
    (a,) = s.squares
    dom_sq, cod_sq, hit = _squares_image(F, a.src, a.tgt, a.left_arrow, a.right_arrow)
    if not all(hit):
        return f"not full: {sum(1 for h in hit if h)} of {len(cod_sq)} squares are hit"
    return None


def gen_eq_objects(inst, rng, cap):
    return Sample(objects=[inst.random_object(rng, min(cap, 3), "a"),
                           inst.random_object(rng, min(cap, 3), "b")])


def gen_eq_square(inst, rng, cap):
    # mostly globular squares between cells with repeated legs, where
    # faithfulness is most likely to break
    cap = min(cap, 3)
    A = inst.random_object(rng, cap, "a")
    B = inst.random_object(rng, cap, "b")
    M = inst.random_cell(rng, A, B, 3)
    if rng.random() < 0.5:
        return Sample(squares=[inst.random_square_from(rng, M, inst.v_id(A), inst.v_id(B), 3)])
    C, f = arrow_from(inst, rng, A, cap, "c")
    D, g = arrow_from(inst, rng, B, cap, "d")
    return Sample(squares=[inst.random_square_from(rng, M, f, g, 3)])


def make_eso_laws(F, choices: EquivalenceChoices):
    E = F.cod

    def eso_objects(_, s: Sample):
        (C,) = s.objects
        A, a = choices.object(C), choices.object_iso(C)
        if E.arrow_src(a) != F.on_object(A) or E.arrow_tgt(a) != C:
            return "chosen object iso has the wrong endpoints"
        if E.arrow_inverse(a) is None:
            return "chosen object comparison is not invertible"
        return None

    def eso_cells(_, s: Sample):
        (N,) = s.cells
        M = choices.cell(N)
        a = choices.cell_iso(N)
        if M.left_frame != choices.object(N.left_frame) or \
                M.right_frame != choices.object(N.right_frame):
            return "chosen cell does not run between the chosen objects"
        check_frames(E, a)
        if a.src != F.on_cell(M) or a.tgt != N:
            return "chosen cell iso has the wrong source or target"
        if a.left_arrow != choices.object_iso(N.left_frame) or \
                a.right_arrow != choices.object_iso(N.right_frame):
            return "chosen cell iso does not lie over the object isos"
        if E.invert(a) is None:
            return "chosen cell comparison is not invertible"
        return None

    return {"eso_objects": (eso_objects, lambda inst, rng, cap: gen_map_object(inst, rng, cap)),
            "eso_cells": (eso_cells, gen_map_cell)}


def check_equivalence(F: FramedFunctorData, choices: EquivalenceChoices | None = None,
                      seed: int = 0, samples: int = 100, cap: int = 3,
                      inverse: bool = True) -> LawReport:
    """Full, faithful and essentially surjective, checked on samples.

    Fullness and faithfulness are tested on squares with arbitrary frames,
    which the restriction bijection reduces to the globular case. With
    ``choices`` the essential surjectivity data are validated and, when
    ``inverse`` is set, the inverse functor and both natural isos are built
    and re-checked.
    """
    tag = {"functor": F.name}
    ff = {"vertical_full_faithful": (eq_vertical_full_faithful, gen_eq_objects),
          "squares_faithful": (eq_squares_faithful, gen_eq_square),
          "squares_full": (eq_squares_full, gen_eq_square)}
    parts = list(run_table(F, F.dom, ff, "fully_faithful", seed, samples, cap, tag).details)
    if choices is None:
        parts.append(LawReport("essentially_surjective", False, 0,
                               {"law": "essentially_surjective",
                                "message": "no essential-surjectivity choices supplied"}, seed))
        return combine(f"equivalence[{F.name}]", parts, seed)
    eso = make_eso_laws(F, choices)
    parts += run_table(F, F.cod, eso, "essentially_surjective", seed, samples, cap,
                       tag).details
    rep = combine(f"equivalence[{F.name}]", parts, seed)
    if rep.ok and inverse:
        inv = build_inverse(F, choices)
        parts.append(check_inverse(F, inv, seed, max(1, samples // 4), cap))
        rep = combine(f"equivalence[{F.name}]", parts, seed)
    return rep


@dataclass
class InverseData:
    functor: FramedFunctorData
    unit: FramedTransformationData   # Id ⇒ GF
    counit: FramedTransformationData  # FG ⇒ Id


def _preimage_arrow(F, A, B, target):
    for f in F.dom.arrows(A, B):
        if F.on_arrow(f) == target:
            return f
    raise LawViolation("no vertical arrow maps onto the requested arrow")


def _preimage_square(F, M, N, f, g, target, hook=None):
    D, E = F.dom, F.cod
    if hook is not None:
        a = hook(M, N, f, g, target)
        if not E.same_square(F.on_square(a), target):
            raise LawViolation("closed-form preimage does not map onto the target square")
        return a
    if D.square_count_bound(M, N, f, g) > search_budget():
        raise BudgetExceeded("too many squares to search for a preimage")
    for a in D.squares(M, N, f, g):
        if E.same_square(F.on_square(a), target):
            return a
    raise LawViolation("no square maps onto the requested square")


def build_inverse(F: FramedFunctorData, choices: EquivalenceChoices) -> InverseData:
    """The inverse lax functor G and the isos Id ≅ GF, FG ≅ Id.

    Every component is the unique preimage under F of a composite of the
    chosen isos with F's (inverted) constraints.
    """
    if F.flavor != "lax":
        raise ValueError("build_inverse expects a lax presentation of a strong functor")
    D, E = F.dom, F.cod
    inv_arrow = E.arrow_inverse
    hook = choices.square_preimage

    def G_arrow(h):
        C, C2 = E.arrow_src(h), E.arrow_tgt(h)
        target = E.v_then(E.v_then(choices.object_iso(C), h), inv_arrow(choices.object_iso(C2)))
        return _preimage_arrow(F, choices.object(C), choices.object(C2), target)

    def G_square(b):
        target = E.vcomp_all(choices.cell_iso(b.src), b, E.invert(choices.cell_iso(b.tgt)))
        return _preimage_square(F, choices.cell(b.src), choices.cell(b.tgt),
                                G_arrow(b.left_arrow), G_arrow(b.right_arrow), target, hook)

    def G_comp(P, Q):
        MP, MQ, MPQ = choices.cell(P), choices.cell(Q), choices.cell(E.compose(P, Q))
        target = E.vcomp_all(_must_invert(E, F.compositor(MP, MQ), "compositor"),
                             E.hcomp(choices.cell_iso(P), choices.cell_iso(Q)),
                             E.invert(choices.cell_iso(E.compose(P, Q))))
        src = D.compose(MP, MQ)
        return _preimage_square(F, src, MPQ, D.v_id(src.left_frame), D.v_id(src.right_frame),
                                target, hook)

    def G_unit(C):
        A = choices.object(C)
        target = E.vcomp_all(_must_invert(E, F.unitor(A), "unitor"),
                             E.unit_square(choices.object_iso(C)),
                             E.invert(choices.cell_iso(E.unit(C))))
        return _preimage_square(F, D.unit(A), choices.cell(E.unit(C)), D.v_id(A), D.v_id(A),
                                target, hook)

    G = FramedFunctorData(f"inverse({F.name})", E, D, choices.object, G_arrow, choices.cell,
                          G_square, G_comp, G_unit, "lax")
    GF, FG = compose_functors(F, G), compose_functors(G, F)

    def eta_object(A):
        return _preimage_arrow(F, A, choices.object(F.on_object(A)),
                               inv_arrow(choices.object_iso(F.on_object(A))))

    def eta_cell(M):
        FM = F.on_cell(M)
        return _preimage_square(F, M, choices.cell(FM), eta_object(M.left_frame),
                                eta_object(M.right_frame), E.invert(choices.cell_iso(FM)), hook)

    unit = FramedTransformationData(f"unit({F.name})", identity_functor(D), GF, eta_object,
                                    eta_cell)
    counit = FramedTransformationData(f"counit({F.name})", FG, identity_functor(E),
                                      choices.object_iso, choices.cell_iso)
    return InverseData(G, unit, counit)


def _iso_components(name, al, objects_inst, invert_arrow, invert_square):
    def law(_, s: Sample):
        if s.objects and invert_arrow(al.on_object(s.objects[0])) is None:
            return f"{name} has a non-invertible object component"
        if s.cells and invert_square(al.on_cell(s.cells[0])) is None:
            return f"{name} has a non-invertible cell component"
        return None
    return law


def check_inverse(F: FramedFunctorData, inv: InverseData, seed: int = 0, samples: int = 25,
                  cap: int = 3) -> LawReport:
    D, E = F.dom, F.cod
    parts = [check_framed_functor(inv.functor, seed, samples, cap),
             check_framed_transformation(inv.unit, seed, samples, cap, lowering=False),
             check_framed_transformation(inv.counit, seed, samples, cap, lowering=False)]

    def gen_obj_cell(inst, rng, cap):
        A = inst.random_object(rng, min(cap, 3), "a")
        B = inst.random_object(rng, min(cap, 3), "b")
        return Sample(objects=[A], cells=[inst.random_cell(rng, A, B, 3)])

    unit_iso = _iso_components("unit", inv.unit, D, D.arrow_inverse, D.invert)
    counit_iso = _iso_components("counit", inv.counit, E, E.arrow_inverse, E.invert)
    parts += run_table(None, D, {"unit_invertible": (unit_iso, gen_obj_cell)}, "unit_invertible",
                       seed, samples, cap).details
    parts += run_table(None, E, {"counit_invertible": (counit_iso, gen_obj_cell)},
                       "counit_invertible", seed, samples, cap).details
    return combine(f"inverse[{F.name}]", parts, seed)


# adjunctions


def check_framed_adjunction(F: FramedFunctorData, G: FramedFunctorData,
                            eta: FramedTransformationData, eps: FramedTransformationData,
                            seed: int = 0, samples: int = 30, cap: int = 3) -> LawReport:
    """Triangle identities, the transformation laws for η and ε, and the
    inverse of F's constraints built from the adjunction data.

    ``eta`` goes Id ⇒ GF and ``eps`` goes FG ⇒ Id; F and G are lax.
    """
    D, E = F.dom, F.cod
    tag = {"adjunction": f"{F.name} -| {G.name}"}

    def triangle_left(_, s: Sample):
        (M,) = s.cells
        A = M.left_frame
        if E.v_then(F.on_arrow(eta.on_object(A)), eps.on_object(F.on_object(A))) != \
                E.v_id(F.on_object(A)):
            return "left triangle fails on objects"
        lhs = E.vcomp(F.on_square(eta.on_cell(M)), eps.on_cell(F.on_cell(M)))
        return _eq(E, lhs, E.sq_id(F.on_cell(M)), "left triangle (eps F . F eta)")

    def triangle_right(_, s: Sample):
        (P,) = s.cells
        C = P.left_frame
        if D.v_then(eta.on_object(G.on_object(C)), G.on_arrow(eps.on_object(C))) != \
                D.v_id(G.on_object(C)):
            return "right triangle fails on objects"
        lhs = D.vcomp(eta.on_cell(G.on_cell(P)), G.on_square(eps.on_cell(P)))
        return _eq(D, lhs, D.sq_id(G.on_cell(P)), "right triangle (G eps . eta G)")

    def strong_compositor(_, s: Sample):
        M, N = s.cells
        cand = left_adjoint_compositor_inverse(F, G, eta, eps, M, N)
        c = F.compositor(M, N)
        bad = _eq(E, E.vcomp(c, cand), E.sq_id(c.src), "F⊙ then its candidate inverse")
        return bad or _eq(E, E.vcomp(cand, c), E.sq_id(c.tgt), "candidate inverse then F⊙")

    def strong_unitor(_, s: Sample):
        (A,) = s.objects
        cand = left_adjoint_unitor_inverse(F, G, eta, eps, A)
        u = F.unitor(A)
        bad = _eq(E, E.vcomp(u, cand), E.sq_id(u.src), "F_U then its candidate inverse")
        return bad or _eq(E, E.vcomp(cand, u), E.sq_id(u.tgt), "candidate inverse then F_U")

    parts = [check_framed_transformation(eta, seed, samples, cap, lowering=False),
             check_framed_transformation(eps, seed, samples, cap, lowering=False)]
    parts += run_table(None, D, {"triangle_left": (triangle_left, gen_map_cell),
                                 "left_adjoint_strong_compositor": (strong_compositor,
                                                                    gen_map_pair),
                                 "left_adjoint_strong_unitor": (strong_unitor, gen_map_object)},
                       "left", seed, samples, cap, tag).details
    parts += run_table(None, E, {"triangle_right": (triangle_right, gen_map_cell)}, "right",
                       seed, samples, cap, tag).details
    return combine(f"adjunction[{F.name} -| {G.name}]", parts, seed)


def left_adjoint_compositor_inverse(F, G, eta, eps, M, N):
    """F(M⊙N) ⇒ F(GFM ⊙ GFN) ⇒ FG(FM ⊙ FN) ⇒ FM ⊙ FN."""
    E = F.cod
    FM, FN = F.on_cell(M), F.on_cell(N)
    return E.vcomp_all(F.on_square(F.dom.hcomp(eta.on_cell(M), eta.on_cell(N))),
                       F.on_square(G.compositor(FM, FN)),
                       eps.on_cell(E.compose(FM, FN)))


def left_adjoint_unitor_inverse(F, G, eta, eps, A):
    """F(U_A) ⇒ F(U_GFA) ⇒ FG(U_FA) ⇒ U_FA."""
    E = F.cod
    return E.vcomp_all(F.on_square(F.dom.unit_square(eta.on_object(A))),
                       F.on_square(G.unitor(F.on_object(A))),
                       eps.on_cell(E.unit(F.on_object(A))))


# monoidal structure


def mon_tensor_functorial(inst, s: Sample):
    a, b = s.squares
    c, d = s.extra
    lhs = inst.tensor_square(inst.vcomp(a, b), inst.vcomp(c, d))
    rhs = inst.vcomp(inst.tensor_square(a, c), inst.tensor_square(b, d))
    bad = _eq(inst, lhs, rhs, "tensor preserves vertical composites")
    return bad or _eq(inst, inst.tensor_square(inst.sq_id(a.src), inst.sq_id(c.src)),
                      inst.sq_id(inst.tensor_cell(a.src, c.src)),
                      "tensor preserves identity squares")


def mon_interchange_natural(inst, s: Sample):
    a, b = s.squares
    c, d = s.extra
    lhs = inst.vcomp(inst.hcomp(inst.tensor_square(a, c), inst.tensor_square(b, d)),
                     inst.interchange(a.tgt, c.tgt, b.tgt, d.tgt))
    rhs = inst.vcomp(inst.interchange(a.src, c.src, b.src, d.src),
                     inst.tensor_square(inst.hcomp(a, b), inst.hcomp(c, d)))
    return _eq(inst, lhs, rhs, "interchange naturality")


def mon_interchange_assoc(inst, s: Sample):
    M, N, R = s.cells
    P, Q, S = s.extra
    x = inst.interchange
    c = inst.compose
    lhs = inst.vcomp_all(inst.hcomp(x(M, P, N, Q), inst.sq_id(inst.tensor_cell(R, S))),
                         x(c(M, N), c(P, Q), R, S),
                         inst.tensor_square(inst.assoc(M, N, R), inst.assoc(P, Q, S)))
    rhs = inst.vcomp_all(inst.assoc(inst.tensor_cell(M, P), inst.tensor_cell(N, Q),
                                    inst.tensor_cell(R, S)),
                         inst.hcomp(inst.sq_id(inst.tensor_cell(M, P)), x(N, Q, R, S)),
                         x(M, P, c(N, R), c(Q, S)))
    return _eq(inst, lhs, rhs, "interchange associativity")


def mon_interchange_unit(inst, s: Sample):
    (M,) = s.cells
    (P,) = s.extra
    A, B = M.left_frame, P.left_frame
    MP = inst.tensor_cell(M, P)
    lhs = inst.vcomp_all(inst.hcomp(inst.unit_interchange(A, B), inst.sq_id(MP)),
                         inst.interchange(inst.unit(A), inst.unit(B), M, P),
                         inst.tensor_square(inst.lunitor(M), inst.lunitor(P)))
    bad = _eq(inst, lhs, inst.lunitor(MP), "left unit coherence of the interchange")
    if bad:
        return bad
    C, D = M.right_frame, P.right_frame
    lhs = inst.vcomp_all(inst.hcomp(inst.sq_id(MP), inst.unit_interchange(C, D)),
                         inst.interchange(M, P, inst.unit(C), inst.unit(D)),
                         inst.tensor_square(inst.runitor(M), inst.runitor(P)))
    return _eq(inst, lhs, inst.runitor(MP), "right unit coherence of the interchange")


def mon_constraints_invertible(inst, s: Sample):
    M, N = s.cells
    P, Q = s.extra
    for name, c in (("interchange", inst.interchange(M, P, N, Q)),
                    ("unit interchange", inst.unit_interchange(M.left_frame, P.left_frame)),
                    ("tensor associator", inst.tensor_assoc(M, N, P)),
                    ("symmetry", inst.tensor_symmetry(M, P))):
        if inst.invert(c) is None:
            return f"{name} is not invertible"
    return None


def mon_assoc_natural(inst, s: Sample):
    (a,) = s.squares
    b, c = s.extra
    t = inst.tensor_square
    lhs = inst.vcomp(inst.tensor_assoc(a.src, b.src, c.src), t(a, t(b, c)))
    rhs = inst.vcomp(t(t(a, b), c), inst.tensor_assoc(a.tgt, b.tgt, c.tgt))
    return _eq(inst, lhs, rhs, "tensor associator naturality")


def mon_assoc_compositor(inst, s: Sample):
    # the associator is a framed transformation between the two bracketings
    M1, M2, M3 = s.cells
    N1, N2, N3 = s.extra
    x, t, c = inst.interchange, inst.tensor_cell, inst.compose
    left_comp = inst.vcomp(x(t(M1, M2), M3, t(N1, N2), N3),
                           inst.tensor_square(x(M1, M2, N1, N2), inst.sq_id(c(M3, N3))))
    right_comp = inst.vcomp(x(M1, t(M2, M3), N1, t(N2, N3)),
                            inst.tensor_square(inst.sq_id(c(M1, N1)), x(M2, M3, N2, N3)))
    lhs = inst.vcomp(left_comp, inst.tensor_assoc(c(M1, N1), c(M2, N2), c(M3, N3)))
    rhs = inst.vcomp(inst.hcomp(inst.tensor_assoc(M1, M2, M3), inst.tensor_assoc(N1, N2, N3)),
                     right_comp)
    return _eq(inst, lhs, rhs, "tensor associator respects the interchange")


def mon_pentagon(inst, s: Sample):
    M, N, P, Q = s.cells
    t, a = inst.tensor_cell, inst.tensor_assoc
    lhs = inst.vcomp(a(t(M, N), P, Q), a(M, N, t(P, Q)))
    rhs = inst.vcomp_all(inst.tensor_square(a(M, N, P), inst.sq_id(Q)), a(M, t(N, P), Q),
                         inst.tensor_square(inst.sq_id(M), a(N, P, Q)))
    return _eq(inst, lhs, rhs, "tensor pentagon")


def mon_symmetry(inst, s: Sample):
    (a,) = s.squares
    (b,) = s.extra
    sym = inst.tensor_symmetry
    bad = _eq(inst, inst.vcomp(sym(a.src, b.src), sym(b.src, a.src)),
              inst.sq_id(inst.tensor_cell(a.src, b.src)), "symmetry is an involution")
    if bad:
        return bad
    lhs = inst.vcomp(sym(a.src, b.src), inst.tensor_square(b, a))
    rhs = inst.vcomp(inst.tensor_square(a, b), sym(a.tgt, b.tgt))
    return _eq(inst, lhs, rhs, "symmetry naturality")


def mon_symmetry_compositor(inst, s: Sample):
    M, N = s.cells
    P, Q = s.extra
    x, t, c = inst.interchange, inst.tensor_cell, inst.compose
    lhs = inst.vcomp(x(M, P, N, Q), inst.tensor_symmetry(c(M, N), c(P, Q)))
    rhs = inst.vcomp(inst.hcomp(inst.tensor_symmetry(M, P), inst.tensor_symmetry(N, Q)),
                     x(P, M, Q, N))
    return _eq(inst, lhs, rhs, "symmetry respects the interchange")


@dataclass
class TwoSample(Sample):
    extra: list = field(default_factory=list)

    def encode(self, inst) -> dict:
        out = super().encode(inst)
        first = self.extra[0] if self.extra else None
        if first is not None and hasattr(first, "src"):
            out["extra_squares"] = [inst.encode_square(x) for x in self.extra]
        else:
            out["extra_cells"] = [inst.encode_cell(x) for x in self.extra]
        return out


def _gen_mon_cells(n):
    def gen(inst, rng, cap):
        _, one = cell_chain(inst, rng, n, min(cap, 2), 2)
        _, two = cell_chain(inst, rng, n, min(cap, 2), 2)
        return TwoSample(cells=one, extra=two)
    return gen


def _gen_mon_squares(n, vertical=False):
    def gen(inst, rng, cap):
        cap = min(cap, 2)
        if vertical:
            out = []
            for _ in range(2):
                sq = gen_map_squares_v(inst, rng, cap).squares
                out.append(sq)
            return TwoSample(squares=out[0], extra=out[1])
        _, _, _, one = square_chain(inst, rng, n, cap, 2)
        _, _, _, two = square_chain(inst, rng, n, cap, 2)
        return TwoSample(squares=one, extra=two)
    return gen


def _gen_mon_assoc(inst, rng, cap):
    squares = [square_chain(inst, rng, 1, min(cap, 2), 2)[3][0] for _ in range(3)]
    return TwoSample(squares=squares[:1], extra=squares[1:])


def _gen_mon_pairs(inst, rng, cap):
    # three independent composable pairs (M_i, N_i)
    chains = [cell_chain(inst, rng, 2, min(cap, 2), 2)[1] for _ in range(3)]
    return TwoSample(cells=[c[0] for c in chains], extra=[c[1] for c in chains])


def _gen_mon_four(inst, rng, cap):
    return Sample(cells=[inst.random_cell(rng, inst.random_object(rng, 2, f"a{i}"),
                                          inst.random_object(rng, 2, f"b{i}"), 2, f"m{i}_")
                         for i in range(4)])


MONOIDAL_LAWS: dict[str, tuple[Callable, Callable]] = {
    "tensor_functorial": (mon_tensor_functorial, _gen_mon_squares(1, vertical=True)),
    "interchange_naturality": (mon_interchange_natural, _gen_mon_squares(2)),
    "interchange_associativity": (mon_interchange_assoc, _gen_mon_cells(3)),
    "interchange_unit": (mon_interchange_unit, _gen_mon_cells(1)),
    "monoidal_constraints_invertible": (mon_constraints_invertible, _gen_mon_cells(2)),
    "tensor_associator_naturality": (mon_assoc_natural, _gen_mon_assoc),
    "tensor_associator_compositor": (mon_assoc_compositor, _gen_mon_pairs),
    "tensor_pentagon": (mon_pentagon, _gen_mon_four),
    "symmetry": (mon_symmetry, _gen_mon_squares(1)),
    "symmetry_compositor": (mon_symmetry_compositor, _gen_mon_cells(2)),
}


def check_monoidal_framed(inst, seed: int = 0, samples: int = 50, cap: int = 3) -> LawReport:
    """The external tensor is a strong framed functor 𝔻×𝔻 → 𝔻 with the
    interchange and unit cells as constraints; its associator and symmetry
    are framed transformations."""
    return run_table(inst, inst, MONOIDAL_LAWS, f"monoidal[{inst.name}]", seed, samples, cap)


# involutions


def _op_object(inst, A):
    return inst.involute_object(A) if hasattr(inst, "involute_object") else A


def _op_arrow(inst, f):
    return inst.involute_arrow(f) if hasattr(inst, "involute_arrow") else f


def inv_functorial(inst, s: Sample):
    a, b = s.squares
    op = inst.involute_square
    bad = _eq(inst, op(inst.vcomp(a, b)), inst.vcomp(op(a), op(b)),
              "involution preserves vertical composites")
    bad = bad or _eq(inst, op(inst.sq_id(a.src)), inst.sq_id(inst.involute(a.src)),
                     "involution preserves identity squares")
    if bad:
        return bad
    oa = op(a)
    if oa.src != inst.involute(a.src) or oa.tgt != inst.involute(a.tgt):
        return "involuted square has the wrong source or target"
    M = inst.involute(a.src)
    if M.left_frame != _op_object(inst, a.src.right_frame) or \
            M.right_frame != _op_object(inst, a.src.left_frame):
        return "involution does not swap the frames"
    return None


def inv_constraint_natural(inst, s: Sample):
    a, b = s.squares
    op, c = inst.involute_square, inst.involution_constraint
    lhs = inst.vcomp(inst.hcomp(op(b), op(a)), c(a.tgt, b.tgt))
    rhs = inst.vcomp(c(a.src, b.src), op(inst.hcomp(a, b)))
    return _eq(inst, lhs, rhs, "involution constraint naturality")


def inv_associativity(inst, s: Sample):
    M, N, P = s.cells
    op, c, iv = inst.involute_square, inst.involution_constraint, inst.involute
    lhs = inst.vcomp_all(inst.hcomp(c(N, P), inst.sq_id(iv(M))), c(M, inst.compose(N, P)),
                         op(inst.assoc_inv(M, N, P)))
    rhs = inst.vcomp_all(inst.assoc(iv(P), iv(N), iv(M)),
                         inst.hcomp(inst.sq_id(iv(P)), c(M, N)), c(inst.compose(M, N), P))
    return _eq(inst, lhs, rhs, "involution constraint associativity")


def inv_unit(inst, s: Sample):
    (M,) = s.cells
    op, c, iv, u = (inst.involute_square, inst.involution_constraint, inst.involute,
                    inst.involution_unit)
    A, B = M.left_frame, M.right_frame
    Mo = iv(M)
    left = inst.vcomp_all(inst.hcomp(u(B), inst.sq_id(Mo)), c(M, inst.unit(B)),
                          op(inst.runitor(M)))
    bad = _eq(inst, left, inst.lunitor(Mo), "involution left unit coherence")
    right = inst.vcomp_all(inst.hcomp(inst.sq_id(Mo), u(A)), c(inst.unit(A), M),
                           op(inst.lunitor(M)))
    return bad or _eq(inst, right, inst.runitor(Mo), "involution right unit coherence")


def involution_xi(inst, M):
    """ξ_M: (M^op)^op ⇒ M; an identity when the involution is strict."""
    if hasattr(inst, "involution_xi"):
        return inst.involution_xi(M)
    return inst.sq_id(M)


def inv_double(inst, s: Sample):
    M, N = s.cells
    (a,) = s.squares
    op, c, iv, u = (inst.involute_square, inst.involution_constraint, inst.involute,
                    inst.involution_unit)
    xi = lambda X: involution_xi(inst, X)
    # ξ is natural and respects the composite functor's constraints
    bad = _eq(inst, inst.vcomp(op(op(a)), xi(a.tgt)), inst.vcomp(xi(a.src), a),
              "xi naturality")
    MN = inst.compose(M, N)
    comp = inst.vcomp(c(iv(N), iv(M)), op(c(M, N)))
    bad = bad or _eq(inst, inst.vcomp(comp, xi(MN)), inst.hcomp(xi(M), xi(N)),
                     "xi respects the compositor of the double involution")
    A = M.left_frame
    A2 = _op_object(inst, _op_object(inst, A))
    unit = inst.vcomp(u(_op_object(inst, A)), op(u(A)))
    if A2 == A:
        bad = bad or _eq(inst, inst.vcomp(unit, xi(inst.unit(A))), inst.sq_id(inst.unit(A)),
                         "xi respects the unit of the double involution")
    # (ξ_M)^op = ξ_{M^op}
    return bad or _eq(inst, op(xi(M)), xi(iv(M)), "(xi_M)^op = xi_(M^op)")


def _gen_inv_squares_h(inst, rng, cap):
    return gen_map_squares_h(inst, rng, cap)


def _gen_inv_double(inst, rng, cap):
    _, cells = cell_chain(inst, rng, 2, min(cap, 3), 2)
    _, _, _, squares = square_chain(inst, rng, 1, min(cap, 3), 2)
    return Sample(cells=cells, squares=squares)


INVOLUTION_LAWS: dict[str, tuple[Callable, Callable]] = {
    "involution_functorial": (inv_functorial, gen_map_squares_v),
    "involution_constraint_naturality": (inv_constraint_natural, _gen_inv_squares_h),
    "involution_associativity": (inv_associativity, gen_map_triple),
    "involution_unit": (inv_unit, gen_map_cell),
    "involution_xi": (inv_double, _gen_inv_double),
}


def check_involution(inst, seed: int = 0, samples: int = 50, cap: int = 3) -> LawReport:
    """(−)^op is a strong framed functor from the horizontal opposite with
    ξ: ((−)^op)^op ≅ Id; records whether every ξ sampled was an identity."""
    rep = run_table(inst, inst, INVOLUTION_LAWS, f"involution[{inst.name}]", seed, samples, cap)
    strict = True
    for i in range(samples):
        M = gen_map_cell(inst, sample_rng(seed, "xi_strict", i), cap).cells[0]
        xi = involution_xi(inst, M)
        if not (inst.is_globular(xi) and xi.src == xi.tgt
                and inst.same_square(xi, inst.sq_id(M))):
            strict = False
            rep.facts["xi_nonidentity_witness"] = {"sample": i, "cell": inst.encode_cell(M)}
            break
    rep.facts["xi_strict"] = strict
    if hasattr(inst, "involution_strict"):
        loose = [i for i in range(samples)
                 if not inst.involution_strict(gen_map_object(
                     inst, sample_rng(seed, "xi_objects", i), cap).objects[0])]
        rep.facts["xi_objects_strict"] = not loose
        if loose:
            rep.facts["xi_nonstrict_samples"] = loose[:10]
    return rep
