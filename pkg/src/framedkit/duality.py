"""Dual pairs in a framed bicategory, base change of duals, and mates.

A dual pair (M, N) has M: A ⇸ B, N: B ⇸ A and carries its evaluation
N ⊙ M ⇒ U_B and coevaluation U_A ⇒ M ⊙ N as explicit globular squares.
Horizontal composition is written left to right, as everywhere else.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .doublecore import (BudgetExceeded, DoubleInstance, LawReport, LawViolation, combine,
                         companion_conjoint, globularize, search_budget, unglobularize)
from .finkit import FinError, FinFn, FinSet, all_functions, image_factorization
from .lawsuite import Sample, arrow_from, run_table


@dataclass(frozen=True)
class DualPairData:
    M: Any
    N: Any
    ev: Any    # N ⊙ M ⇒ U_B
    coev: Any  # U_A ⇒ M ⊙ N

    @property
    def A(self):
        return self.M.left_frame

    @property
    def B(self):
        return self.M.right_frame


def _check_frames(inst: DoubleInstance, d: DualPairData) -> None:
    A, B = d.A, d.B
    if d.N.left_frame != B or d.N.right_frame != A:
        raise FinError("N must run B ⇸ A for M: A ⇸ B")
    if d.ev.src != inst.compose(d.N, d.M) or d.ev.tgt != inst.unit(B):
        raise FinError("ev must be a square N ⊙ M ⇒ U_B")
    if d.coev.src != inst.unit(A) or d.coev.tgt != inst.compose(d.M, d.N):
        raise FinError("coev must be a square U_A ⇒ M ⊙ N")
    if not (inst.is_globular(d.ev) and inst.is_globular(d.coev)):
        raise FinError("ev and coev must be globular")


def triangle_composites(inst: DoubleInstance, d: DualPairData):
    """The two zig-zag composites M ⇒ M and N ⇒ N, coherence cells included."""
    M, N = d.M, d.N
    zig = inst.vcomp_all(
        inst.lunitor_inv(M),
        inst.hcomp(d.coev, inst.sq_id(M)),
        inst.assoc(M, N, M),
        inst.hcomp(inst.sq_id(M), d.ev),
        inst.runitor(M))
    zag = inst.vcomp_all(
        inst.runitor_inv(N),
        inst.hcomp(inst.sq_id(N), d.coev),
        inst.assoc_inv(N, M, N),
        inst.hcomp(d.ev, inst.sq_id(N)),
        inst.lunitor(N))
    return zig, zag


def check_dual_pair(inst: DoubleInstance, d: DualPairData) -> LawReport:
    """Both triangle identities; the witness names the failing side."""
    _check_frames(inst, d)
    zig, zag = triangle_composites(inst, d)
    parts = []
    for side, lhs, ident in (("triangle_M", zig, inst.sq_id(d.M)),
                             ("triangle_N", zag, inst.sq_id(d.N))):
        ok = inst.same_square(lhs, ident)
        witness = None if ok else {
            "side": side,
            "message": f"{side}: the zig-zag composite is not the identity",
            "composite": inst.encode_square(lhs)}
        parts.append(LawReport(side, ok, 1, witness))
    return combine("dual_pair", parts)


def unit_dual_pair(inst: DoubleInstance, A) -> DualPairData:
    U = inst.unit(A)
    return DualPairData(U, U, inst.lunitor(U), inst.lunitor_inv(U))


def base_change_dual_pair(inst: DoubleInstance, f) -> DualPairData:
    """(_fB, B_f) with unit and counit pasted from the companion and conjoint cells."""
    c = companion_conjoint(inst, f)
    A, B = inst.arrow_src(f), inst.arrow_tgt(f)
    coev = inst.vcomp(inst.runitor_inv(inst.unit(A)), inst.hcomp(c.comp_unit, c.conj_unit))
    ev = inst.vcomp(inst.hcomp(c.conj_cart, c.comp_cart), inst.lunitor(inst.unit(B)))
    return DualPairData(c.companion, c.conjoint, ev, coev)


def compose_dual_pairs(inst: DoubleInstance, d1: DualPairData, d2: DualPairData) -> DualPairData:
    """(M, N) then (P, Q) gives (M ⊙ P, Q ⊙ N), as for a composite of adjunctions."""
    if d1.B != d2.A:
        raise FinError("dual pairs do not compose: frames differ")
    M, N, P, Q = d1.M, d1.N, d2.M, d2.N
    sq = inst.sq_id
    coev = inst.vcomp_all(
        d1.coev,
        inst.hcomp(inst.runitor_inv(M), sq(N)),
        inst.hcomp(inst.hcomp(sq(M), d2.coev), sq(N)),
        inst.hcomp(inst.assoc_inv(M, P, Q), sq(N)),
        inst.assoc(inst.compose(M, P), Q, N))
    ev = inst.vcomp_all(
        inst.assoc(Q, N, inst.compose(M, P)),
        inst.hcomp(sq(Q), inst.assoc_inv(N, M, P)),
        inst.hcomp(sq(Q), inst.hcomp(d1.ev, sq(P))),
        inst.hcomp(sq(Q), inst.lunitor(P)),
        d2.ev)
    return DualPairData(inst.compose(M, P), inst.compose(Q, N), ev, coev)


def shift_dual_pair(inst: DoubleInstance, d: DualPairData, f, side: str) -> DualPairData:
    """Base change of a dual pair along f.

    ``side="right"``, f: B → C gives (M ⊙ _fC, C_f ⊙ N), a model of (Mf_!, f_!N).
    ``side="left"``, f: D → A gives (_fA ⊙ M, N ⊙ A_f), a model of (f*M, Nf*).
    """
    if side == "right":
        if inst.arrow_src(f) != d.B:
            raise FinError("right shift needs an arrow out of B")
        return compose_dual_pairs(inst, d, base_change_dual_pair(inst, f))
    if side == "left":
        if inst.arrow_tgt(f) != d.A:
            raise FinError("left shift needs an arrow into A")
        return compose_dual_pairs(inst, base_change_dual_pair(inst, f), d)
    raise FinError(f"side must be 'left' or 'right', not {side!r}")


def _mate_globular(inst, alpha, left: DualPairData, right: DualPairData):
    # Q ≅ Q⊙U ⇒ Q⊙(M⊙N) ≅ (Q⊙M)⊙N ⇒ (Q⊙P)⊙N ⇒ U⊙N ≅ N
    M, N, Q = left.M, left.N, right.N
    sq = inst.sq_id
    return inst.vcomp_all(
        inst.runitor_inv(Q),
        inst.hcomp(sq(Q), left.coev),
        inst.assoc_inv(Q, M, N),
        inst.hcomp(inst.hcomp(sq(Q), alpha), sq(N)),
        inst.hcomp(right.ev, sq(N)),
        inst.lunitor(N))


def _unmate_globular(inst, beta, left: DualPairData, right: DualPairData):
    # M ≅ U⊙M ⇒ (P⊙Q)⊙M ≅ P⊙(Q⊙M) ⇒ P⊙(N⊙M) ⇒ P⊙U ≅ P
    M, P, Q = left.M, right.M, right.N
    sq = inst.sq_id
    return inst.vcomp_all(
        inst.lunitor_inv(M),
        inst.hcomp(right.coev, sq(M)),
        inst.assoc(P, Q, M),
        inst.hcomp(sq(P), inst.hcomp(beta, sq(M))),
        inst.hcomp(sq(P), left.ev),
        inst.runitor(P))


def mate(inst: DoubleInstance, alpha, left: DualPairData, right: DualPairData):
    """The mate of α: M ⇒ P, where (M, N) = ``left`` and (P, Q) = ``right``.

    A globular α gives the globular Q ⇒ N. A square over (f, g) is first
    made globular, M ⊙ _gD ⇒ _fC ⊙ P, and its mate is taken for the shifted
    pairs, which gives Q ⊙ C_f ⇒ D_g ⊙ N.
    """
    if alpha.src != left.M or alpha.tgt != right.M:
        raise FinError("mate: α must run from the left pair's M to the right pair's M")
    if inst.is_globular(alpha):
        return _mate_globular(inst, alpha, left, right)
    f, g = alpha.left_arrow, alpha.right_arrow
    shifted_left = shift_dual_pair(inst, left, g, "right")
    shifted_right = shift_dual_pair(inst, right, f, "left")
    return _mate_globular(inst, globularize(inst, alpha), shifted_left, shifted_right)


def mate_inverse(inst: DoubleInstance, beta, left: DualPairData, right: DualPairData,
                 f=None, g=None):
    """Undo :func:`mate`. Pass the frame arrows (f, g) to recover a framed square."""
    if f is None and g is None:
        if beta.src != right.N or beta.tgt != left.N:
            raise FinError("mate_inverse: β must run from the right pair's N to the left pair's N")
        return _unmate_globular(inst, beta, left, right)
    shifted_left = shift_dual_pair(inst, left, g, "right")
    shifted_right = shift_dual_pair(inst, right, f, "left")
    if beta.src != shifted_right.N or beta.tgt != shifted_left.N:
        raise FinError("mate_inverse: β does not match the shifted pairs")
    gamma = _unmate_globular(inst, beta, shifted_left, shifted_right)
    return unglobularize(inst, gamma, left.M, right.M, f, g)


def pair_isomorphism(inst: DoubleInstance, d1: DualPairData, d2: DualPairData):
    """Globular isos (M1 ≅ M2, N1 ≅ N2) carrying ev and coev across, or None.

    The N-component is forced: it is the mate of the inverse M-component.
    """
    if d1.M.left_frame != d2.M.left_frame or d1.M.right_frame != d2.M.right_frame:
        return None
    A, B = d1.A, d1.B
    for iM in inst.squares(d1.M, d2.M, inst.v_id(A), inst.v_id(B)):
        back = inst.invert(iM)
        if back is None:
            continue
        iN = _mate_globular(inst, back, d2, d1)
        if inst.invert(iN) is None:
            continue
        if (inst.same_square(inst.vcomp(d1.coev, inst.hcomp(iM, iN)), d2.coev)
                and inst.same_square(d1.ev, inst.vcomp(inst.hcomp(iN, iM), d2.ev))):
            return iM, iN
    return None


def base_change_arrow(inst: DoubleInstance, d: DualPairData):
    """Some f with d isomorphic to the base change pair of f, or None."""
    for f in inst.arrows(d.A, d.B):
        if pair_isomorphism(inst, base_change_dual_pair(inst, f), d) is not None:
            return f
    return None


@dataclass
class DualPairSearch:
    pairs: list[DualPairData] = field(default_factory=list)
    partial: bool = False
    examined: int = 0


def search_dual_pairs(inst: DoubleInstance, A, B, size_cap: int) -> DualPairSearch:
    """Every dual pair A ⇸ B with cells of at most ``size_cap`` elements, up to iso.

    Stops with ``partial=True`` once the candidate count passes the search budget.
    """
    if not hasattr(inst, "enumerate_cells"):
        raise FinError(f"{inst.name} cannot enumerate its horizontal cells")
    budget = search_budget()
    out = DualPairSearch()
    UA, UB = inst.unit(A), inst.unit(B)
    idA, idB = inst.v_id(A), inst.v_id(B)
    Ns = list(inst.enumerate_cells(B, A, size_cap, "n"))
    for M in inst.enumerate_cells(A, B, size_cap, "m"):
        for N in Ns:
            MN, NM = inst.compose(M, N), inst.compose(N, M)
            cost = (inst.square_count_bound(UA, MN, idA, idA)
                    * inst.square_count_bound(NM, UB, idB, idB))
            if out.examined + cost > budget:
                out.partial = True
                return out
            evs = list(inst.squares(NM, UB, idB, idB))
            for coev in inst.squares(UA, MN, idA, idA):
                for ev in evs:
                    out.examined += 1
                    d = DualPairData(M, N, ev, coev)
                    try:
                        found = check_dual_pair(inst, d).ok
                    except (LawViolation, BudgetExceeded):
                        found = False
                    if found and not any(pair_isomorphism(inst, e, d) for e in out.pairs):
                        out.pairs.append(d)
    return out


def check_base_change_pairs(inst: DoubleInstance, max_size: int = 5) -> LawReport:
    """Every base change pair of a function between sets of size ≤ ``max_size``."""
    sets = [FinSet("a", tuple(f"a{i}" for i in range(n))) for n in range(max_size + 1)]
    targets = [FinSet("b", tuple(f"b{i}" for i in range(n))) for n in range(max_size + 1)]
    count, failure = 0, None
    for A in sets:
        for B in targets:
            for f in all_functions(A, B):
                count += 1
                report = check_dual_pair(inst, base_change_dual_pair(inst, f))
                if not report.ok:
                    failure = dict(report.witness, arrow=inst.encode_arrow(f))
                    failure.pop("composite", None)
                    break
            if failure:
                break
        if failure:
            break
    parts = [LawReport("base_change_triangles", failure is None, count, failure)]
    bad_id = next((A for A in sets if pair_isomorphism(
        inst, base_change_dual_pair(inst, inst.v_id(A)), unit_dual_pair(inst, A)) is None), None)
    parts.append(LawReport("identity_gives_unit_pair", bad_id is None, len(sets),
                           None if bad_id is None else {"object": inst.encode_object(bad_id)}))
    return combine("base_change_dual_pairs", parts)


# sampled mate laws; the dual pairs in a sample are composites of base
# change pairs, described by a chain of composable arrows each


@dataclass
class MateSample(Sample):
    plan: list = field(default_factory=list)  # chain lengths, one per dual pair

    def encode(self, inst) -> dict:
        out = super().encode(inst)
        out["plan"] = list(self.plan)
        return out

    @staticmethod
    def decode(inst, data) -> "MateSample":
        base = Sample.decode(inst, data)
        return MateSample(base.cells, base.squares, base.arrows, base.objects,
                          list(data.get("plan", [])))

    def chains(self):
        out, pos = [], 0
        for n in self.plan:
            out.append(self.arrows[pos:pos + n])
            pos += n
        return out, self.arrows[pos:]


def chain_dual_pair(inst: DoubleInstance, chain) -> DualPairData:
    d = base_change_dual_pair(inst, chain[0])
    for f in chain[1:]:
        d = shift_dual_pair(inst, d, f, "right")
    return d


def _random_chain(inst, rng, f):
    A, B = inst.arrow_src(f), inst.arrow_tgt(f)
    options = [[f], [f, inst.v_id(B)], [inst.v_id(A), f]]
    if isinstance(f, FinFn):
        options.append(list(image_factorization(f)))
    return rng.choice(options)


def _pairs(inst, s: MateSample):
    chains, rest = s.chains()
    return [chain_dual_pair(inst, c) for c in chains], rest


def _gen_globular(n):
    def gen(inst, rng, cap):
        A = inst.random_object(rng, cap, "a")
        _, f = arrow_from(inst, rng, A, cap, "b")
        chains = [_random_chain(inst, rng, f) for _ in range(n)]
        ds = [chain_dual_pair(inst, c) for c in chains]
        squares = []
        for d1, d2 in zip(ds, ds[1:]):
            found = list(inst.squares(d1.M, d2.M, inst.v_id(d1.A), inst.v_id(d1.B)))
            squares.append(rng.choice(found))
        return MateSample(squares=squares, arrows=[g for c in chains for g in c],
                          plan=[len(c) for c in chains])
    return gen


def _commuting_square(inst, rng, cap, f):
    A, B = inst.arrow_src(f), inst.arrow_tgt(f)
    if not isinstance(f, FinFn):
        # no generic way to solve h;f' = f;k for f', so take h = 1
        _, k = arrow_from(inst, rng, B, cap, "d")
        return inst.v_id(A), k, inst.v_then(f, k)
    for _ in range(20):
        C, h = arrow_from(inst, rng, A, cap, "c")
        D, k = arrow_from(inst, rng, B, cap, "d")
        forced = {}
        for a in A:
            forced.setdefault(h(a), set()).add(k(f(a)))
        if any(len(v) > 1 for v in forced.values()) or (len(C) and not len(D)):
            continue
        images = tuple(forced[c].pop() if c in forced else rng.choice(D.elements) for c in C)
        return h, k, FinFn(C, D, images)
    return inst.v_id(A), inst.v_id(B), f


def gen_framed_mate(inst, rng, cap):
    A = inst.random_object(rng, cap, "a")
    _, f = arrow_from(inst, rng, A, cap, "b")
    h, k, f2 = _commuting_square(inst, rng, cap, f)
    chains = [_random_chain(inst, rng, f), _random_chain(inst, rng, f2)]
    d1, d2 = (chain_dual_pair(inst, c) for c in chains)
    alpha = rng.choice(list(inst.squares(d1.M, d2.M, h, k)))
    return MateSample(squares=[alpha], arrows=[g for c in chains for g in c] + [h, k],
                      plan=[len(c) for c in chains])


def _same(inst, lhs, rhs, what):
    return None if inst.same_square(lhs, rhs) else f"{what}: the two squares differ"


def law_mate_roundtrip(inst, s: MateSample):
    (d1, d2), _ = _pairs(inst, s)
    (alpha,) = s.squares
    beta = mate(inst, alpha, d1, d2)
    return (_same(inst, mate_inverse(inst, beta, d1, d2), alpha, "mate then inverse")
            or _same(inst, mate(inst, mate_inverse(inst, beta, d1, d2), d1, d2), beta,
                     "inverse then mate"))


def law_mate_identity(inst, s: MateSample):
    (d, _), _ = _pairs(inst, s)
    return _same(inst, mate(inst, inst.sq_id(d.M), d, d), inst.sq_id(d.N), "mate of identity")


def law_mate_iso(inst, s: MateSample):
    (d1, d2), _ = _pairs(inst, s)
    (alpha,) = s.squares
    inv = inst.invert(alpha)
    if inv is None:
        return None
    beta = mate(inst, alpha, d1, d2)
    if inst.invert(beta) is None:
        return "mate of an invertible square is not invertible"
    return _same(inst, inst.vcomp(beta, mate(inst, inv, d2, d1)), inst.sq_id(d2.N),
                 "mate of the inverse")


def law_mate_natural(inst, s: MateSample):
    (d1, d2, d3), _ = _pairs(inst, s)
    alpha, beta = s.squares
    lhs = mate(inst, inst.vcomp(alpha, beta), d1, d3)
    rhs = inst.vcomp(mate(inst, beta, d2, d3), mate(inst, alpha, d1, d2))
    return _same(inst, lhs, rhs, "mate naturality")


def law_framed_mate_roundtrip(inst, s: MateSample):
    (d1, d2), (h, k) = _pairs(inst, s)
    (alpha,) = s.squares
    beta = mate(inst, alpha, d1, d2)
    return _same(inst, mate_inverse(inst, beta, d1, d2, h, k), alpha, "framed mate then inverse")


MATE_LAWS = {
    "mate_roundtrip": (law_mate_roundtrip, _gen_globular(2)),
    "mate_identity": (law_mate_identity, _gen_globular(2)),
    "mate_iso": (law_mate_iso, _gen_globular(2)),
    "mate_natural": (law_mate_natural, _gen_globular(3)),
    "framed_mate_roundtrip": (law_framed_mate_roundtrip, gen_framed_mate),
}


def check_mates(inst: DoubleInstance, seed: int = 0, samples: int = 100, cap: int = 3) -> LawReport:
    return run_table(inst, inst, MATE_LAWS, "mates", seed, samples, cap, {"suite": "mates"})


def replay_mate_law(inst: DoubleInstance, witness: dict) -> str | None:
    fn, _ = MATE_LAWS[witness["law"]]
    sample = MateSample.decode(inst, witness["args"])
    try:
        return fn(inst, sample)
    except (LawViolation, FinError) as exc:
        return f"{witness['law']}: {exc}"


__all__ = ["DualPairData", "DualPairSearch", "MATE_LAWS", "MateSample", "base_change_arrow",
           "base_change_dual_pair", "chain_dual_pair", "check_base_change_pairs", "check_dual_pair",
           "check_mates", "replay_mate_law", "compose_dual_pairs", "mate", "mate_inverse", "pair_isomorphism",
           "search_dual_pairs", "shift_dual_pair", "triangle_composites", "unit_dual_pair"]
