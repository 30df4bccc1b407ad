"""The generic double-category contract and the framed constructions that
only use it: companions and conjoints, restriction and extension through
them, universal factorization, and globularization.

Instances (spans, matrices, bimodules, fibration-built cells) subclass
:class:`DoubleInstance`. Horizontal cells expose ``left_frame`` and
``right_frame``; squares expose ``src``, ``tgt``, ``left_arrow`` and
``right_arrow``. Vertical composition is written diagrammatically:
``vcomp(a, b)`` is a then b.

Nothing is strictified. Associators and unitors are explicit squares and
every equation below inserts them where they are needed.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

from .finkit import FinFn, FinSet, all_functions


DEFAULT_BUDGET = 10 ** 6


class LawViolation(Exception):
    """A checked equation or universal property failed."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class BudgetExceeded(RuntimeError):
    """An exhaustive search would exceed the configured candidate budget."""


def search_budget() -> int:
    raw = os.environ.get("FRAMEDKIT_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return max(1, int(raw))
    except ValueError:
        return DEFAULT_BUDGET


@dataclass
class LawReport:
    law: str
    ok: bool
    samples: int = 0
    witness: dict | None = None
    seed: int | None = None
    details: list["LawReport"] = field(default_factory=list)
    skipped: int = 0
    # informational results that do not affect the verdict
    facts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"law": self.law, "verdict": "pass" if self.ok else "fail",
                               "samples": self.samples}
        if self.skipped:
            out["skipped"] = self.skipped
        if self.seed is not None:
            out["seed"] = self.seed
        if self.facts:
            out["facts"] = self.facts
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = [d.to_json() for d in self.details]
        return out

    def first_failure(self) -> "LawReport | None":
        if self.ok:
            return None
        for d in self.details:
            bad = d.first_failure()
            if bad is not None:
                return bad
        return self


def combine(law: str, parts: Iterable[LawReport], seed: int | None = None) -> LawReport:
    parts = list(parts)
    bad = next((p for p in parts if not p.ok), None)
    return LawReport(law, bad is None, sum(p.samples for p in parts),
                     bad.witness if bad else None, seed, parts,
                     sum(p.skipped for p in parts))


@dataclass(frozen=True)
class CartesianWitness:
    square: Any
    direction: str  # "cartesian" or "opcartesian"


@dataclass(frozen=True)
class CompanionData:
    """Companion _fB and conjoint B_f of f: A → B with the four cells.

    ``comp_cart``: _fB ⇒ U_B over (f, 1);  ``conj_cart``: B_f ⇒ U_B over (1, f);
    ``comp_unit``: U_A ⇒ _fB over (1, f);  ``conj_unit``: U_A ⇒ B_f over (f, 1).
    """

    arrow: Any
    companion: Any
    conjoint: Any
    comp_cart: Any
    conj_cart: Any
    comp_unit: Any
    conj_unit: Any


class DoubleInstance:
    """Base class for a (weak) double category with chosen lifts.

    Subclasses provide the primitive operations; everything marked
    optional has a generic fallback here.
    """

    name = "abstract"

    # vertical category
    def arrow_src(self, f):
        raise NotImplementedError

    def arrow_tgt(self, f):
        raise NotImplementedError

    def v_id(self, A):
        raise NotImplementedError

    def v_then(self, f, g):
        raise NotImplementedError

    def arrows(self, A, B) -> Iterator:
        raise NotImplementedError

    def arrow_inverse(self, f):
        return None

    # horizontal cells
    def unit(self, A):
        raise NotImplementedError

    def compose(self, M, N):
        raise NotImplementedError

    # squares
    def sq_id(self, M):
        raise NotImplementedError

    def unit_square(self, f):
        raise NotImplementedError

    def vcomp(self, a, b):
        raise NotImplementedError

    def hcomp(self, a, b):
        raise NotImplementedError

    def assoc(self, M, N, P):
        raise NotImplementedError

    def lunitor(self, M):
        """U_A ⊙ M ⇒ M."""
        raise NotImplementedError

    def runitor(self, M):
        """M ⊙ U_B ⇒ M."""
        raise NotImplementedError

    def invert(self, a):
        """Inverse square, or None when ``a`` is not invertible."""
        raise NotImplementedError

    def squares(self, src, tgt, f, g) -> Iterator:
        raise NotImplementedError

    def square_count_bound(self, src, tgt, f, g) -> int:
        return 0

    # chosen lifts
    def restrict(self, f, M, g):
        raise NotImplementedError

    def extend(self, f, M, g):
        raise NotImplementedError

    def factor_cartesian(self, cart, cand, h, k):
        """Optional closed-form factorization; None means use search."""
        return None

    def factor_opcartesian(self, opcart, cand, h, k):
        return None

    # comparison of cells
    def cell_size(self, M) -> int:
        """Number of elements carried by a horizontal cell (for witnesses)."""
        raise NotImplementedError

    def cell_iso(self, M, N):
        """A globular isomorphism M ⇒ N, or None."""
        if M.left_frame != N.left_frame or M.right_frame != N.right_frame:
            return None
        f, g = self.v_id(M.left_frame), self.v_id(M.right_frame)
        for a in self.squares(M, N, f, g):
            if self.invert(a) is not None:
                return a
        return None

    def same_square(self, a, b) -> bool:
        return a == b

    # derived helpers
    def is_globular(self, a) -> bool:
        return (a.left_arrow == self.v_id(a.src.left_frame)
                and a.right_arrow == self.v_id(a.src.right_frame))

    def lunitor_inv(self, M):
        return self.invert(self.lunitor(M))

    def runitor_inv(self, M):
        return self.invert(self.runitor(M))

    def assoc_inv(self, M, N, P):
        return self.invert(self.assoc(M, N, P))

    def vcomp_all(self, *squares):
        out = squares[0]
        for s in squares[1:]:
            out = self.vcomp(out, s)
        return out


class FinSetVerticals:
    """Vertical category of finite sets and functions."""

    def arrow_src(self, f: FinFn) -> FinSet:
        return f.dom

    def arrow_tgt(self, f: FinFn) -> FinSet:
        return f.cod

    def v_id(self, A: FinSet) -> FinFn:
        return FinFn.identity(A)

    def v_then(self, f: FinFn, g: FinFn) -> FinFn:
        return f.then(g)

    def arrows(self, A, B):
        return all_functions(A, B)

    def arrow_inverse(self, f: FinFn):
        return f.inverse() if f.is_bijective() else None


def check_frames(inst: DoubleInstance, a) -> None:
    if inst.arrow_src(a.left_arrow) != a.src.left_frame or inst.arrow_tgt(a.left_arrow) != a.tgt.left_frame:
        raise LawViolation("left arrow does not match the frames")
    if inst.arrow_src(a.right_arrow) != a.src.right_frame or inst.arrow_tgt(a.right_arrow) != a.tgt.right_frame:
        raise LawViolation("right arrow does not match the frames")


def enumerate_factorizations(inst: DoubleInstance, witness: CartesianWitness, cand, h, k) -> list:
    """All squares χ with χ;φ = ψ (cartesian) or φ;χ = ψ (opcartesian)."""
    phi = witness.square
    budget = search_budget()
    if witness.direction == "cartesian":
        src, tgt = cand.src, phi.src
    else:
        src, tgt = phi.tgt, cand.tgt
    bound = inst.square_count_bound(src, tgt, h, k)
    if bound > budget:
        raise BudgetExceeded(f"{bound} candidate squares exceed budget {budget}")
    found = []
    for chi in inst.squares(src, tgt, h, k):
        pasted = inst.vcomp(chi, phi) if witness.direction == "cartesian" else inst.vcomp(phi, chi)
        if inst.same_square(pasted, cand):
            found.append(chi)
    return found


def factor_universal(inst: DoubleInstance, witness: CartesianWitness, cand, h=None, k=None,
                     exhaustive: bool = False):
    """The unique square through which ``cand`` factors via ``witness``.

    For a cartesian φ: P ⇒ M over (f, g) and ψ: N ⇒ M over (h;f, k;g) this
    returns χ: N ⇒ P over (h, k) with χ;φ = ψ. Opcartesian is dual. When
    h, k are omitted they default to identities.
    """
    phi = witness.square
    if witness.direction == "cartesian":
        h = h if h is not None else inst.v_id(cand.src.left_frame)
        k = k if k is not None else inst.v_id(cand.src.right_frame)
        if (inst.v_then(h, phi.left_arrow) != cand.left_arrow
                or inst.v_then(k, phi.right_arrow) != cand.right_arrow):
            raise LawViolation("candidate frames do not factor through the witness")
        chi = None if exhaustive else inst.factor_cartesian(phi, cand, h, k)
    else:
        h = h if h is not None else inst.v_id(cand.tgt.left_frame)
        k = k if k is not None else inst.v_id(cand.tgt.right_frame)
        if (inst.v_then(phi.left_arrow, h) != cand.left_arrow
                or inst.v_then(phi.right_arrow, k) != cand.right_arrow):
            raise LawViolation("candidate frames do not factor through the witness")
        chi = None if exhaustive else inst.factor_opcartesian(phi, cand, h, k)
    if chi is not None:
        return chi
    found = enumerate_factorizations(inst, witness, cand, h, k)
    if len(found) != 1:
        raise LawViolation(f"{witness.direction} factorization has {len(found)} solutions",
                           {"solutions": len(found)})
    return found[0]


def companion_conjoint(inst: DoubleInstance, f) -> CompanionData:
    A, B = inst.arrow_src(f), inst.arrow_tgt(f)
    UB = inst.unit(B)
    comp, w1 = inst.restrict(f, UB, inst.v_id(B))
    conj, w2 = inst.restrict(inst.v_id(B), UB, f)
    Uf = inst.unit_square(f)
    comp_unit = factor_universal(inst, w1, Uf, inst.v_id(A), f)
    conj_unit = factor_universal(inst, w2, Uf, f, inst.v_id(A))
    return CompanionData(f, comp, conj, w1.square, w2.square, comp_unit, conj_unit)


def companion_equations(inst: DoubleInstance, data: CompanionData) -> list[tuple[str, Any, Any]]:
    """The four defining equations as (name, lhs, rhs) triples."""
    f = data.arrow
    Uf = inst.unit_square(f)
    comp, conj = data.companion, data.conjoint
    comp_h = inst.vcomp_all(inst.lunitor_inv(comp),
                            inst.hcomp(data.comp_unit, data.comp_cart),
                            inst.runitor(comp))
    conj_h = inst.vcomp_all(inst.runitor_inv(conj),
                            inst.hcomp(data.conj_cart, data.conj_unit),
                            inst.lunitor(conj))
    return [
        ("companion_vertical", inst.vcomp(data.comp_unit, data.comp_cart), Uf),
        ("conjoint_vertical", inst.vcomp(data.conj_unit, data.conj_cart), Uf),
        ("companion_horizontal", comp_h, inst.sq_id(comp)),
        ("conjoint_horizontal", conj_h, inst.sq_id(conj)),
    ]


def restrict_via_companions(inst: DoubleInstance, f, M, g):
    """f*Mg* computed as (_fA ⊙ M) ⊙ B_g, with its cartesian square."""
    cf, cg = companion_conjoint(inst, f), companion_conjoint(inst, g)
    cell = inst.compose(inst.compose(cf.companion, M), cg.conjoint)
    UA = inst.unit(M.left_frame)
    sq = inst.vcomp_all(
        inst.hcomp(inst.hcomp(cf.comp_cart, inst.sq_id(M)), cg.conj_cart),
        inst.runitor(inst.compose(UA, M)),
        inst.lunitor(M))
    return cell, CartesianWitness(sq, "cartesian")


def extend_via_companions(inst: DoubleInstance, f, M, g):
    """f_!Mg_! computed as (C_f ⊙ M) ⊙ _gD, with its opcartesian square."""
    cf, cg = companion_conjoint(inst, f), companion_conjoint(inst, g)
    cell = inst.compose(inst.compose(cf.conjoint, M), cg.companion)
    UA = inst.unit(M.left_frame)
    sq = inst.vcomp_all(
        inst.lunitor_inv(M),
        inst.runitor_inv(inst.compose(UA, M)),
        inst.hcomp(inst.hcomp(cf.conj_unit, inst.sq_id(M)), cg.comp_unit))
    return cell, CartesianWitness(sq, "opcartesian")


def factor_through_companions(inst: DoubleInstance, direction: str, f, g, cand, h, k):
    """Closed-form factorization through the squares built by
    :func:`restrict_via_companions` / :func:`extend_via_companions`."""
    cf, cg = companion_conjoint(inst, f), companion_conjoint(inst, g)
    if direction == "cartesian":
        N = cand.src
        left = inst.vcomp(inst.unit_square(h), cf.comp_unit)
        right = inst.vcomp(inst.unit_square(k), cg.conj_unit)
        UX = inst.unit(N.left_frame)
        return inst.vcomp_all(
            inst.lunitor_inv(N),
            inst.runitor_inv(inst.compose(UX, N)),
            inst.hcomp(inst.hcomp(left, cand), right))
    N = cand.tgt
    left = inst.vcomp(cf.conj_cart, inst.unit_square(h))
    right = inst.vcomp(cg.comp_cart, inst.unit_square(k))
    UX = inst.unit(N.left_frame)
    return inst.vcomp_all(
        inst.hcomp(inst.hcomp(left, cand), right),
        inst.runitor(inst.compose(UX, N)),
        inst.lunitor(N))


def bc_objects_represent(inst: DoubleInstance, f, M, g) -> LawReport:
    """Compare the chosen restriction f*Mg* with _fA ⊙ M ⊙ B_g.

    Passes when a globular iso exists that also carries one cartesian
    square onto the other, which makes it the canonical comparison.
    """
    direct, w1 = inst.restrict(f, M, g)
    generic, w2 = restrict_via_companions(inst, f, M, g)
    iso = factor_universal(inst, w1, w2.square)
    ok = inst.invert(iso) is not None
    witness = None if ok else {"reason": "comparison cell is not invertible"}
    return LawReport("bc_objects_represent", ok, 1, witness)


def globularize(inst: DoubleInstance, a):
    """Turn α: M ⇒ P over (f, g) into the globular M ⊙ _gD ⇒ _fC ⊙ P."""
    f, g = a.left_arrow, a.right_arrow
    cf, cg = companion_conjoint(inst, f), companion_conjoint(inst, g)
    M, P = a.src, a.tgt
    return inst.vcomp_all(
        inst.hcomp(inst.lunitor_inv(M), inst.sq_id(cg.companion)),
        inst.hcomp(inst.hcomp(cf.comp_unit, a), cg.comp_cart),
        inst.runitor(inst.compose(cf.companion, P)))



def unglobularize(inst: DoubleInstance, gamma, M, P, f, g):
    """Inverse of :func:`globularize`: a globular M ⊙ _gD ⇒ _fC ⊙ P becomes M ⇒ P over (f, g)."""
    cf, cg = companion_conjoint(inst, f), companion_conjoint(inst, g)
    return inst.vcomp_all(
        inst.runitor_inv(M),
        inst.hcomp(inst.sq_id(M), cg.comp_unit),
        gamma,
        inst.hcomp(cf.comp_cart, inst.sq_id(P)),
        inst.lunitor(P))
