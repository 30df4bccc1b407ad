"""Monoidal bifibrations over finite sets and the framed bicategory they
generate.

Two fibrations are provided: ``Arr`` (maps X → B, reindexing by
pullback) and ``Fam`` (B-indexed families of finite sets). For either,
:class:`FrInstance` builds horizontal cells A ⇸ B as objects over A×B with

    M ⊙ N = (π_B)_! Δ_B^* (M ⊗ N),      U_A = (Δ_A)_! π_A^* I,

and obtains every square, associator and unitor by factoring through
cartesian and opcartesian arrows of the chosen cleavage.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _cartesian

from .doublecore import (CartesianWitness, DoubleInstance, FinSetVerticals, LawReport,
                         LawViolation)
from .finkit import (POINT, FinError, FinFn, FinSet, all_functions, assoc_map, coequalizer,
                     decode_fn, decode_set, encode_fn, encode_set, find_bijection, pair_label,
                     product, product_map, product_set, pullback)


def tagged(i: str, x: str) -> str:
    return f"inl_{i}({x})"


def base_map(dom: FinSet, cod: FinSet, fn) -> FinFn:
    return FinFn(dom, cod, tuple(fn(x) for x in dom))


def _is_identity(u: FinFn) -> bool:
    return u.dom == u.cod and u.images == u.dom.elements


# base-level shapes; all products are nested pairs in a fixed bracketing


def triple(A, B, C):
    """(A×B)×C with its points."""
    return product_set(product_set(A, B), C)


def p2(a, b):
    return pair_label(a, b)


def p3(a, b, c):
    return p2(p2(a, b), c)


def p4(a, b, c, d):
    return p2(p2(p2(a, b), c), d)


# Arr: maps into the base


@dataclass(frozen=True)
class ArrObject:
    total: FinSet
    base: FinSet
    proj: FinFn

    def __post_init__(self):
        if self.proj.dom != self.total or self.proj.cod != self.base:
            raise FinError("projection must go from the total set to the base")


@dataclass(frozen=True)
class ArrArrow:
    src: ArrObject
    tgt: ArrObject
    base: FinFn
    total: FinFn

    def __post_init__(self):
        if self.base.dom != self.src.base or self.base.cod != self.tgt.base:
            raise FinError("base map does not match the objects")
        if self.total.dom != self.src.total or self.total.cod != self.tgt.total:
            raise FinError("total map does not match the objects")
        for x, y in zip(self.src.total.elements, self.total.images):
            if self.tgt.proj(y) != self.base(self.src.proj(x)):
                raise FinError(f"arrow does not lie over its base map at {x}")


class ArrFibration:
    name = "arr"

    def base_of(self, M: ArrObject) -> FinSet:
        return M.base

    def identity(self, M):
        return ArrArrow(M, M, FinFn.identity(M.base), FinFn.identity(M.total))

    def then(self, a: ArrArrow, b: ArrArrow) -> ArrArrow:
        if a.tgt != b.src:
            raise FinError("arrows are not composable")
        return ArrArrow(a.src, b.tgt, a.base.then(b.base), a.total.then(b.total))

    def cart_lift(self, u: FinFn, M: ArrObject):
        if _is_identity(u):
            return M, self.identity(M)
        apex, q1, q2 = pullback(u, M.proj)
        obj = ArrObject(apex, u.dom, q1)
        return obj, ArrArrow(obj, M, u, q2)

    def opcart_lift(self, u: FinFn, M: ArrObject):
        obj = ArrObject(M.total, u.cod, M.proj.then(u))
        return obj, ArrArrow(M, obj, u, FinFn.identity(M.total))

    def factor_cart(self, phi: ArrArrow, psi: ArrArrow, w: FinFn) -> ArrArrow:
        P, N = phi.src, psi.src
        index: dict[tuple[str, str], list[str]] = {}
        for p in P.total:
            index.setdefault((P.proj(p), phi.total(p)), []).append(p)
        images = []
        for n in N.total:
            hits = index.get((w(N.proj(n)), psi.total(n)), [])
            if len(hits) != 1:
                raise LawViolation("arrow is not cartesian", {"element": n, "solutions": len(hits)})
            images.append(hits[0])
        return ArrArrow(N, P, w, FinFn(N.total, P.total, tuple(images)))

    def factor_opcart(self, chi: ArrArrow, psi: ArrArrow, w: FinFn) -> ArrArrow:
        if not chi.total.is_bijective():
            raise LawViolation("arrow is not opcartesian: total map is not a bijection")
        try:
            return ArrArrow(chi.tgt, psi.tgt, w, chi.total.inverse().then(psi.total))
        except FinError as exc:
            raise LawViolation(f"opcartesian factorization does not lie over w: {exc}") from exc

    def is_cartesian(self, a: ArrArrow) -> bool:
        # P → u^*N, p ↦ (proj p, total p), must be a bijection
        keys = {(a.src.proj(p), a.total(p)) for p in a.src.total}
        counts: dict[str, int] = {}
        for n in a.tgt.total:
            counts[a.tgt.proj(n)] = counts.get(a.tgt.proj(n), 0) + 1
        expected = sum(counts.get(a.base(x), 0) for x in a.src.base)
        return len(keys) == len(a.src.total) == expected

    def is_opcartesian(self, a: ArrArrow) -> bool:
        return a.total.is_bijective()

    def tensor(self, M, N):
        return ArrObject(product_set(M.total, N.total), product_set(M.base, N.base),
                         product_map(M.proj, N.proj))

    def tensor_arrows(self, a, b):
        return ArrArrow(self.tensor(a.src, b.src), self.tensor(a.tgt, b.tgt),
                        product_map(a.base, b.base), product_map(a.total, b.total))

    def unit_object(self):
        return ArrObject(POINT, POINT, FinFn.identity(POINT))

    def tensor_assoc(self, M, N, P):
        return ArrArrow(self.tensor(self.tensor(M, N), P), self.tensor(M, self.tensor(N, P)),
                        assoc_map(M.base, N.base, P.base), assoc_map(M.total, N.total, P.total))

    def tensor_lunit(self, M):
        src = self.tensor(self.unit_object(), M)
        return ArrArrow(src, M, product(POINT, M.base)[2], product(POINT, M.total)[2])

    def tensor_runit(self, M):
        src = self.tensor(M, self.unit_object())
        return ArrArrow(src, M, product(M.base, POINT)[1], product(M.total, POINT)[1])

    def split_tensor(self, M, N):
        _, p, q = product(M.total, N.total)
        return lambda z: (p(z), q(z))

    def invert(self, a):
        if not (a.base.is_bijective() and a.total.is_bijective()):
            return None
        return ArrArrow(a.tgt, a.src, a.base.inverse(), a.total.inverse())

    def arrows_over(self, M, N, u):
        by_base: dict[str, list[str]] = {}
        for n in N.total:
            by_base.setdefault(N.proj(n), []).append(n)
        options = [by_base.get(u(M.proj(m)), []) for m in M.total]
        for images in _cartesian(*options):
            yield ArrArrow(M, N, u, FinFn(M.total, N.total, images))

    def arrow_count_bound(self, M, N, u):
        counts: dict[str, int] = {}
        for n in N.total:
            counts[N.proj(n)] = counts.get(N.proj(n), 0) + 1
        total = 1
        for m in M.total:
            total *= counts.get(u(M.proj(m)), 0)
        return total

    def find_iso(self, M, N):
        if M.base != N.base:
            return None
        phi = find_bijection(M.total, N.total, [(M.proj, N.proj)])
        if phi is None:
            return None
        return ArrArrow(M, N, FinFn.identity(M.base), phi)

    def elements(self, M):
        return [(M.proj(x), x) for x in M.total]

    def make_arrow(self, M, N, u, fn):
        return ArrArrow(M, N, u, FinFn(M.total, N.total,
                                       tuple(fn(M.proj(x), x) for x in M.total)))

    def fiber_coequalize(self, s, t):
        """Coequalizer of two arrows X → Y over the identity of the base."""
        q = coequalizer(s.total, t.total).as_fn()
        Y = s.tgt
        proj = {}
        for y, c in zip(Y.total.elements, q.images):
            proj[c] = Y.proj(y)
        obj = ArrObject(q.cod, Y.base, FinFn.from_dict(q.cod, Y.base, proj))
        return obj, ArrArrow(Y, obj, FinFn.identity(Y.base), q)

    def descend(self, epi, cand):
        """The unique χ with epi;χ = cand, for epi surjective over an identity."""
        table: dict[str, str] = {}
        for x, y in zip(epi.src.total.elements, epi.total.images):
            if table.setdefault(y, cand.total(x)) != cand.total(x):
                raise LawViolation("map does not descend to the quotient", {"element": y})
        return ArrArrow(epi.tgt, cand.tgt, cand.base,
                        FinFn.from_dict(epi.tgt.total, cand.tgt.total, table))

    def random_object(self, rng, base: FinSet, cap: int, prefix="m"):
        size = rng.randint(0, cap) if len(base) else 0
        total = FinSet(prefix, tuple(f"{prefix}{i}" for i in range(size)))
        return ArrObject(total, base, FinFn(total, base, tuple(rng.choice(base.elements)
                                                               for _ in total)))

    def random_arrow_from(self, rng, M, u, cap=3, prefix="n"):
        """A random arrow out of M over u into a fresh object."""
        labels, proj, images = [], [], []
        by_key: dict[str, list[str]] = {}
        for m in M.total:
            b = u(M.proj(m))
            seen = by_key.setdefault(b, [])
            if seen and rng.random() < 0.4:
                images.append(rng.choice(seen))
                continue
            label = f"{prefix}{len(labels)}"
            labels.append(label)
            proj.append(b)
            seen.append(label)
            images.append(label)
        if len(u.cod):
            for _ in range(rng.randint(0, 2)):
                labels.append(f"{prefix}{len(labels)}")
                proj.append(rng.choice(u.cod.elements))
        total = FinSet(prefix, tuple(labels))
        tgt = ArrObject(total, u.cod, FinFn(total, u.cod, tuple(proj)))
        return ArrArrow(M, tgt, u, FinFn(M.total, total, tuple(images)))

    def encode_object(self, M):
        return {"base": encode_set(M.base), "proj": {x: M.proj(x) for x in M.total}}

    def decode_object(self, data):
        base = decode_set(data["base"])
        proj = {str(k): str(v) for k, v in data["proj"].items()}
        total = FinSet("X", tuple(proj))
        return ArrObject(total, base, FinFn.from_dict(total, base, proj))

    def encode_arrow(self, a):
        return {"src": self.encode_object(a.src), "tgt": self.encode_object(a.tgt),
                "base": encode_fn(a.base), "map": a.total.as_dict()}

    def decode_arrow(self, data):
        src, tgt = self.decode_object(data["src"]), self.decode_object(data["tgt"])
        return ArrArrow(src, tgt, decode_fn(data["base"]),
                        FinFn.from_dict(src.total, tgt.total, data["map"]))


# Fam: families of finite sets


@dataclass(frozen=True)
class FamObject:
    index: FinSet
    fibers: tuple[FinSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "fibers", tuple(self.fibers))
        if len(self.fibers) != len(self.index):
            raise FinError("a family needs one fiber per index")

    @property
    def base(self):
        return self.index

    def fiber(self, i: str) -> FinSet:
        return self.fibers[self.index.index(i)]

    @staticmethod
    def build(index: FinSet, fn) -> "FamObject":
        return FamObject(index, tuple(fn(i) for i in index))


@dataclass(frozen=True)
class FamArrow:
    src: FamObject
    tgt: FamObject
    base: FinFn
    maps: tuple[FinFn, ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.base.dom != self.src.index or self.base.cod != self.tgt.index:
            raise FinError("base map does not match the families")
        if len(self.maps) != len(self.src.index):
            raise FinError("a family map needs one component per index")
        for i, phi in zip(self.src.index, self.maps):
            if phi.dom != self.src.fiber(i) or phi.cod != self.tgt.fiber(self.base(i)):
                raise FinError(f"component at {i} has the wrong type")

    def at(self, i):
        return self.maps[self.src.index.index(i)]


class FamFibration:
    name = "fam"

    def base_of(self, M):
        return M.index

    def identity(self, M):
        return FamArrow(M, M, FinFn.identity(M.index), tuple(FinFn.identity(F) for F in M.fibers))

    def then(self, a, b):
        if a.tgt != b.src:
            raise FinError("arrows are not composable")
        return FamArrow(a.src, b.tgt, a.base.then(b.base),
                        tuple(phi.then(b.at(a.base(i))) for i, phi in zip(a.src.index, a.maps)))

    def cart_lift(self, u, M):
        if _is_identity(u):
            return M, self.identity(M)
        obj = FamObject.build(u.dom, lambda x: M.fiber(u(x)))
        return obj, FamArrow(obj, M, u, tuple(FinFn.identity(F) for F in obj.fibers))

    def opcart_lift(self, u, M):
        if _is_identity(u):
            return M, self.identity(M)
        fib = u.fibers()
        obj = FamObject.build(u.cod, lambda y: FinSet(
            y, tuple(tagged(b, x) for b in fib[y] for x in M.fiber(b))))
        maps = tuple(FinFn(M.fiber(b), obj.fiber(u(b)), tuple(tagged(b, x) for x in M.fiber(b)))
                     for b in M.index)
        return obj, FamArrow(M, obj, u, maps)

    def factor_cart(self, phi, psi, w):
        maps = []
        for i, comp in zip(psi.src.index, psi.maps):
            c = phi.at(w(i))
            if not c.is_bijective():
                raise LawViolation("arrow is not cartesian", {"index": w(i)})
            maps.append(comp.then(c.inverse()))
        return FamArrow(psi.src, phi.src, w, maps)

    def _fiber_sums(self, chi):
        sums: dict[str, dict[str, tuple[str, str]]] = {j: {} for j in chi.tgt.index}
        for b, c in zip(chi.src.index, chi.maps):
            bucket = sums[chi.base(b)]
            for x, y in zip(c.dom.elements, c.images):
                if y in bucket:
                    return None
                bucket[y] = (b, x)
        for j in chi.tgt.index:
            if len(sums[j]) != len(chi.tgt.fiber(j)):
                return None
        return sums

    def factor_opcart(self, chi, psi, w):
        sums = self._fiber_sums(chi)
        if sums is None:
            raise LawViolation("arrow is not opcartesian: fiber sums are not bijective")
        maps = []
        for j in chi.tgt.index:
            F = chi.tgt.fiber(j)
            maps.append(FinFn(F, psi.tgt.fiber(w(j)),
                              tuple(psi.at(sums[j][y][0])(sums[j][y][1]) for y in F)))
        try:
            return FamArrow(chi.tgt, psi.tgt, w, maps)
        except FinError as exc:
            raise LawViolation(f"opcartesian factorization does not lie over w: {exc}") from exc

    def is_cartesian(self, a):
        return all(c.is_bijective() for c in a.maps)

    def is_opcartesian(self, a):
        return self._fiber_sums(a) is not None

    def tensor(self, M, N):
        return FamObject(product_set(M.index, N.index),
                         tuple(product_set(F, G) for F in M.fibers for G in N.fibers))

    def tensor_arrows(self, a, b):
        return FamArrow(self.tensor(a.src, b.src), self.tensor(a.tgt, b.tgt),
                        product_map(a.base, b.base),
                        tuple(product_map(f, g) for f in a.maps for g in b.maps))

    def unit_object(self):
        return FamObject(POINT, (POINT,))

    def tensor_assoc(self, M, N, P):
        return FamArrow(self.tensor(self.tensor(M, N), P), self.tensor(M, self.tensor(N, P)),
                        assoc_map(M.index, N.index, P.index),
                        tuple(assoc_map(F, G, H) for F in M.fibers for G in N.fibers
                              for H in P.fibers))

    def tensor_lunit(self, M):
        src = self.tensor(self.unit_object(), M)
        return FamArrow(src, M, product(POINT, M.index)[2],
                        tuple(product(POINT, F)[2] for F in M.fibers))

    def tensor_runit(self, M):
        src = self.tensor(M, self.unit_object())
        return FamArrow(src, M, product(M.index, POINT)[1],
                        tuple(product(F, POINT)[1] for F in M.fibers))

    def split_tensor(self, M, N):
        # fiber elements of M ⊗ N are pair(m,n)
        table = {}
        for F in M.fibers:
            for G in N.fibers:
                _, p, q = product(F, G)
                for z in p.dom:
                    table[z] = (p(z), q(z))
        return table.__getitem__

    def invert(self, a):
        if not a.base.is_bijective() or not all(c.is_bijective() for c in a.maps):
            return None
        binv = a.base.inverse()
        return FamArrow(a.tgt, a.src, binv, tuple(a.at(binv(j)).inverse() for j in a.tgt.index))

    def arrows_over(self, M, N, u):
        options = [list(all_functions(M.fiber(i), N.fiber(u(i)))) for i in M.index]
        for maps in _cartesian(*options):
            yield FamArrow(M, N, u, maps)

    def arrow_count_bound(self, M, N, u):
        total = 1
        for i in M.index:
            total *= len(N.fiber(u(i))) ** len(M.fiber(i))
        return total

    def find_iso(self, M, N):
        if M.index != N.index:
            return None
        if any(len(M.fiber(i)) != len(N.fiber(i)) for i in M.index):
            return None
        return FamArrow(M, N, FinFn.identity(M.index),
                        tuple(FinFn(M.fiber(i), N.fiber(i), N.fiber(i).elements) for i in M.index))

    def elements(self, M):
        return [(i, x) for i in M.index for x in M.fiber(i)]

    def make_arrow(self, M, N, u, fn):
        return FamArrow(M, N, u, tuple(FinFn(M.fiber(i), N.fiber(u(i)),
                                             tuple(fn(i, x) for x in M.fiber(i)))
                                       for i in M.index))

    def fiber_coequalize(self, s, t):
        Y = s.tgt
        qs = [coequalizer(p, q).as_fn() for p, q in zip(s.maps, t.maps)]
        obj = FamObject(Y.index, tuple(q.cod for q in qs))
        return obj, FamArrow(Y, obj, FinFn.identity(Y.index), qs)

    def descend(self, epi, cand):
        maps = []
        for i, e in zip(epi.src.index, epi.maps):
            c = cand.at(i)
            table: dict[str, str] = {}
            for x, y in zip(e.dom.elements, e.images):
                if table.setdefault(y, c(x)) != c(x):
                    raise LawViolation("map does not descend to the quotient", {"element": y})
            maps.append(FinFn.from_dict(epi.tgt.fiber(i), cand.tgt.fiber(cand.base(i)), table))
        return FamArrow(epi.tgt, cand.tgt, cand.base, maps)

    def random_object(self, rng, base, cap, prefix="m"):
        table: dict[str, list[str]] = {b: [] for b in base}
        if len(base):
            for i in range(rng.randint(0, cap)):
                table[rng.choice(base.elements)].append(f"{prefix}{i}")
        return FamObject.build(base, lambda b: FinSet(b, tuple(table[b])))

    def random_arrow_from(self, rng, M, u, cap=3, prefix="n"):
        table: dict[str, list[str]] = {y: [] for y in u.cod}
        fresh = 0
        for i in M.index:
            if len(M.fiber(i)):
                for _ in range(1 + rng.randint(0, 1)):
                    table[u(i)].append(f"{prefix}{fresh}")
                    fresh += 1
        if len(u.cod):
            for _ in range(rng.randint(0, 2)):
                table[rng.choice(u.cod.elements)].append(f"{prefix}{fresh}")
                fresh += 1
        tgt = FamObject.build(u.cod, lambda y: FinSet(y, tuple(table[y])))
        maps = tuple(FinFn(M.fiber(i), tgt.fiber(u(i)),
                           tuple(rng.choice(tgt.fiber(u(i)).elements) for _ in M.fiber(i)))
                     for i in M.index)
        return FamArrow(M, tgt, u, maps)

    def encode_object(self, M):
        return {"index": encode_set(M.index),
                "fibers": {i: list(M.fiber(i).elements) for i in M.index}}

    def decode_object(self, data):
        index = decode_set(data["index"])
        fibers = data.get("fibers", {})
        stray = [i for i in fibers if i not in index]
        if stray:
            raise FinError(f"fiber over {stray[0]} is outside the index set")
        return FamObject.build(index, lambda i: FinSet(i, tuple(str(x) for x in fibers.get(i, []))))

    def encode_arrow(self, a):
        return {"src": self.encode_object(a.src), "tgt": self.encode_object(a.tgt),
                "base": encode_fn(a.base),
                "maps": {i: a.at(i).as_dict() for i in a.src.index}}

    def decode_arrow(self, data):
        src, tgt = self.decode_object(data["src"]), self.decode_object(data["tgt"])
        u = decode_fn(data["base"])
        return FamArrow(src, tgt, u, tuple(
            FinFn.from_dict(src.fiber(i), tgt.fiber(u(i)), data["maps"].get(i, {}))
            for i in src.index))


def fiber_tensor(phi, M, N):
    """M ⊠ N = Δ_B^*(M ⊗ N) for M, N over the same B."""
    B = phi.base_of(M)
    if phi.base_of(N) != B:
        raise FinError("fiber tensor needs a common base")
    diag = base_map(B, product_set(B, B), lambda b: p2(b, b))
    return phi.cart_lift(diag, phi.tensor(M, N))[0]


def fiber_unit(phi, B: FinSet):
    """I_B = π_B^* I."""
    return phi.cart_lift(FinFn(B, POINT, tuple("*" for _ in B)), phi.unit_object())[0]


# Beck-Chevalley


@dataclass
class BCVerdict:
    square: tuple
    iso: object | None
    witness: dict | None

    @property
    def ok(self):
        return self.iso is not None


def bc_check(phi, h: FinFn, k: FinFn, g: FinFn, f: FinFn, M) -> BCVerdict:
    """Test the Beck-Chevalley comparison k_! h^* M → f^* g_! M.

    The square is h: A → B, k: A → C, g: B → D, f: C → D with
    h;g = k;f, and M lies over B.
    """
    if h.dom != k.dom or h.cod != g.dom or k.cod != f.dom or g.cod != f.cod:
        raise FinError("the four maps do not form a square")
    if h.then(g) != k.then(f):
        raise FinError("the square does not commute")
    if phi.base_of(M) != h.cod:
        raise FinError("the object must lie over the codomain of h")
    hM, cart_h = phi.cart_lift(h, M)
    gM, op_g = phi.opcart_lift(g, M)
    fgM, cart_f = phi.cart_lift(f, gM)
    khM, op_k = phi.opcart_lift(k, hM)
    rho = phi.factor_cart(cart_f, phi.then(cart_h, op_g), k)
    comparison = phi.factor_opcart(op_k, rho, FinFn.identity(k.cod))
    iso = phi.invert(comparison)
    witness = None
    if iso is None:
        n, m = _size(phi, khM), _size(phi, fgM)
        witness = {"fibration": phi.name, "source_size": n, "target_size": m,
                   "detail": _bc_detail(phi, comparison),
                   "message": f"comparison k_!h*M → f*g_!M is not invertible: "
                              f"{n} elements against {m}"}
    return BCVerdict((h, k, g, f), comparison if iso is not None else None, witness)


def _size(phi, M):
    return len(phi.elements(M))


def _bc_detail(phi, a):
    # first index where the comparison fails to be bijective
    src, tgt = phi.elements(a.src), phi.elements(a.tgt)
    images = {}
    for i, x in src:
        images.setdefault(i, []).append(x)
    if isinstance(a, ArrArrow):
        hit = set(a.total.images)
        for y in a.tgt.total:
            if y not in hit:
                return {"unreached": y}
        seen = {}
        for x, y in zip(a.src.total.elements, a.total.images):
            if y in seen:
                return {"collision": [seen[y], x], "image": y}
            seen[y] = x
        return {}
    for i, c in zip(a.src.index, a.maps):
        if not c.is_bijective():
            return {"index": i, "source": len(c.dom), "target": len(c.cod)}
    return {}


def random_pullback_square(rng, cap: int = 6):
    """(h, k, g, f) with A the pullback of g: B → D and f: C → D, all sets ≤ cap."""
    def rand_set(prefix, low=0):
        n = rng.randint(low, cap)
        return FinSet(prefix, tuple(f"{prefix}{i}" for i in range(n)))
    while True:
        D = rand_set("d", 1)
        B, C = rand_set("b"), rand_set("c")
        g = FinFn(B, D, tuple(rng.choice(D.elements) for _ in B))
        f = FinFn(C, D, tuple(rng.choice(D.elements) for _ in C))
        A, h, k = pullback(g, f)
        if len(A) <= cap:
            return h, k, g, f


def bc_square_json(h, k, g, f) -> dict:
    return {"h": encode_fn(h), "k": encode_fn(k), "g": encode_fn(g), "f": encode_fn(f)}


def check_bc_pullbacks(phi, seed: int = 0, samples: int = 100, cap: int = 6) -> LawReport:
    """bc_check on random pullback squares with a random object over B."""
    for i in range(samples):
        rng = random.Random(f"{seed}:bc:{i}")
        h, k, g, f = random_pullback_square(rng, cap)
        M = phi.random_object(rng, h.cod, cap)
        verdict = bc_check(phi, h, k, g, f, M)
        if not verdict.ok:
            witness = dict(verdict.witness, sample=i, square=bc_square_json(h, k, g, f),
                           object=phi.encode_object(M))
            return LawReport(f"bc_pullbacks[{phi.name}]", False, i + 1, witness, seed)
    return LawReport(f"bc_pullbacks[{phi.name}]", True, samples, None, seed)


# the framed bicategory Fr(Φ)


@dataclass(frozen=True)
class FrCell:
    left_frame: FinSet
    right_frame: FinSet
    obj: object


@dataclass(frozen=True)
class FrSquare:
    src: FrCell
    tgt: FrCell
    left_arrow: FinFn
    right_arrow: FinFn
    arrow: object


class FrInstance(FinSetVerticals, DoubleInstance):
    """Fr(Φ) for a monoidal bifibration Φ over finite sets."""

    def __init__(self, phi):
        self.phi = phi
        self.name = f"fr-{phi.name}"

    # base shapes
    def _cell(self, A, B, obj):
        if self.phi.base_of(obj) != product_set(A, B):
            raise FinError("cell must lie over the product of its frames")
        return FrCell(A, B, obj)

    def _sq(self, src, tgt, f, g, arrow):
        if arrow.src != src.obj or arrow.tgt != tgt.obj or arrow.base != product_map(f, g):
            raise FinError("square does not lie over the product of its frame maps")
        return FrSquare(src, tgt, f, g, arrow)

    def _compose_data(self, M: FrCell, N: FrCell):
        """(T, Y, cart Y → M⊗N, opcart Y → M⊙N) for the chosen cleavage."""
        A, B, C = M.left_frame, M.right_frame, N.right_frame
        if B != N.left_frame:
            raise FinError("cells are not composable: frames differ")
        phi = self.phi
        X = phi.tensor(M.obj, N.obj)
        T = triple(A, B, C)
        delta = base_map(T, phi.base_of(X), _delta_fn(A, B, C))
        proj = base_map(T, product_set(A, C), _outer_fn(A, B, C))
        Y, cart = phi.cart_lift(delta, X)
        Z, opcart = phi.opcart_lift(proj, Y)
        return T, Y, cart, opcart, Z

    def compose(self, M, N):
        Z = self._compose_data(M, N)[4]
        return FrCell(M.left_frame, N.right_frame, Z)

    def _unit_data(self, A):
        phi = self.phi
        I = phi.unit_object()
        to_point = FinFn(A, POINT, tuple("*" for _ in A))
        P, cart = phi.cart_lift(to_point, I)
        diag = base_map(A, product_set(A, A), lambda a: p2(a, a))
        U, opcart = phi.opcart_lift(diag, P)
        return P, cart, opcart, U

    def unit(self, A):
        return FrCell(A, A, self._unit_data(A)[3])

    def sq_id(self, M):
        return FrSquare(M, M, FinFn.identity(M.left_frame), FinFn.identity(M.right_frame),
                        self.phi.identity(M.obj))

    def unit_square(self, f):
        phi = self.phi
        PA, cartA, opA, UA = self._unit_data(f.dom)
        PB, cartB, opB, UB = self._unit_data(f.cod)
        down = phi.factor_cart(cartB, cartA, f)
        across = phi.then(down, opB)
        arrow = phi.factor_opcart(opA, across, product_map(f, f))
        return FrSquare(FrCell(f.dom, f.dom, UA), FrCell(f.cod, f.cod, UB), f, f, arrow)

    def vcomp(self, a, b):
        if a.tgt != b.src:
            raise FinError("vertical composite needs matching cells")
        return FrSquare(a.src, b.tgt, a.left_arrow.then(b.left_arrow),
                        a.right_arrow.then(b.right_arrow), self.phi.then(a.arrow, b.arrow))

    def hcomp(self, a, b):
        if a.right_arrow != b.left_arrow:
            raise FinError("horizontal composite needs a shared middle arrow")
        phi = self.phi
        f, g, k = a.left_arrow, a.right_arrow, b.right_arrow
        T, Y, cart, opcart, Z = self._compose_data(a.src, b.src)
        T2, Y2, cart2, opcart2, Z2 = self._compose_data(a.tgt, b.tgt)
        w = product_map(product_map(f, g), k)
        down = phi.factor_cart(cart2, phi.then(cart, phi.tensor_arrows(a.arrow, b.arrow)), w)
        arrow = phi.factor_opcart(opcart, phi.then(down, opcart2), product_map(f, k))
        return FrSquare(FrCell(f.dom, k.dom, Z), FrCell(f.cod, k.cod, Z2), f, k, arrow)

    def _globular(self, src, tgt, arrow):
        return FrSquare(src, tgt, FinFn.identity(src.left_frame),
                        FinFn.identity(src.right_frame), arrow)

    def _left_span(self, M, N, P):
        """Z = Δ_BC^*((M⊗N)⊗P) with its cartesian arrow and the opcartesian
        arrow to (M⊙N)⊙P, built in the cleavage order."""
        phi = self.phi
        A, B, C, D = M.left_frame, M.right_frame, N.right_frame, P.right_frame
        T1, Y1, cart1, op1, MN = self._compose_data(M, N)
        MNc = FrCell(A, C, MN)
        T2, Y2, cart2, op2, top = self._compose_data(MNc, P)
        W = phi.tensor(phi.tensor(M.obj, N.obj), P.obj)
        T4 = product_set(triple(A, B, C), D)
        dBC = base_map(T4, phi.base_of(W),
                       lambda t: _q4(t, A, B, C, D,
                                     lambda a, b, c, d: p2(p2(p2(a, b), p2(b, c)), p2(c, d))))
        Z, cartZ = phi.cart_lift(dBC, W)
        u = base_map(T4, product_set(T1, product_set(C, D)),
                     lambda t: _q4(t, A, B, C, D, lambda a, b, c, d: p2(p3(a, b, c), p2(c, d))))
        idP = phi.identity(P.obj)
        step = phi.factor_cart(phi.tensor_arrows(cart1, idP), cartZ, u)
        step = phi.then(step, phi.tensor_arrows(op1, idP))
        v = base_map(T4, T2, lambda t: _q4(t, A, B, C, D, lambda a, b, c, d: p3(a, c, d)))
        step = phi.factor_cart(cart2, step, v)
        return Z, cartZ, phi.then(step, op2), top

    def _right_span(self, M, N, P):
        phi = self.phi
        A, B, C, D = M.left_frame, M.right_frame, N.right_frame, P.right_frame
        T3, Y3, cart3, op3, NP = self._compose_data(N, P)
        NPc = FrCell(B, D, NP)
        T4r, Y4, cart4, op4, top = self._compose_data(M, NPc)
        W = phi.tensor(M.obj, phi.tensor(N.obj, P.obj))
        T4 = product_set(A, product_set(B, product_set(C, D)))
        dBC = base_map(T4, phi.base_of(W),
                       lambda t: _q4r(t, A, B, C, D,
                                      lambda a, b, c, d: p2(p2(a, b), p2(p2(b, c), p2(c, d)))))
        Z, cartZ = phi.cart_lift(dBC, W)
        u = base_map(T4, product_set(product_set(A, B), T3),
                     lambda t: _q4r(t, A, B, C, D, lambda a, b, c, d: p2(p2(a, b), p3(b, c, d))))
        idM = phi.identity(M.obj)
        step = phi.factor_cart(phi.tensor_arrows(idM, cart3), cartZ, u)
        step = phi.then(step, phi.tensor_arrows(idM, op3))
        v = base_map(T4, T4r, lambda t: _q4r(t, A, B, C, D, lambda a, b, c, d: p3(a, b, d)))
        step = phi.factor_cart(cart4, step, v)
        return Z, cartZ, phi.then(step, op4), top

    def assoc(self, M, N, P):
        phi = self.phi
        A, B, C, D = M.left_frame, M.right_frame, N.right_frame, P.right_frame
        Z, cartZ, zeta, left = self._left_span(M, N, P)
        Z2, cartZ2, zeta2, right = self._right_span(M, N, P)
        t = phi.tensor_assoc(M.obj, N.obj, P.obj)
        T4, T4r = phi.base_of(Z), phi.base_of(Z2)
        tau = base_map(T4, T4r, lambda x: _q4(x, A, B, C, D,
                                              lambda a, b, c, d: p2(a, p2(b, p2(c, d)))))
        theta = phi.factor_cart(cartZ2, phi.then(cartZ, t), tau)
        arrow = phi.factor_opcart(zeta, phi.then(theta, zeta2),
                                  FinFn.identity(product_set(A, D)))
        return self._globular(FrCell(A, D, left), FrCell(A, D, right), arrow)

    def _lunit_iso(self, M):
        """The isomorphism M → U_A ⊙ M."""
        phi = self.phi
        A, B = M.left_frame, M.right_frame
        PA, cartA, opA, UA = self._unit_data(A)
        T, Y, cart, opcart, Z = self._compose_data(FrCell(A, A, UA), M)
        AB = product_set(A, B)
        rho = phi.then(phi.tensor_arrows(cartA, phi.identity(M.obj)), phi.tensor_lunit(M.obj))
        s = base_map(AB, product_set(A, AB), lambda x: p2(_first(x, A, B), x))
        sigma = phi.factor_cart(rho, phi.identity(M.obj), s)
        step = phi.then(sigma, phi.tensor_arrows(opA, phi.identity(M.obj)))
        e = base_map(AB, T, lambda x: p3(_first(x, A, B), _first(x, A, B), _second(x, A, B)))
        step = phi.factor_cart(cart, step, e)
        return phi.then(step, opcart), Z

    def _runit_iso(self, M):
        """The isomorphism M → M ⊙ U_B."""
        phi = self.phi
        A, B = M.left_frame, M.right_frame
        PB, cartB, opB, UB = self._unit_data(B)
        T, Y, cart, opcart, Z = self._compose_data(M, FrCell(B, B, UB))
        AB = product_set(A, B)
        rho = phi.then(phi.tensor_arrows(phi.identity(M.obj), cartB), phi.tensor_runit(M.obj))
        s = base_map(AB, product_set(AB, B), lambda x: p2(x, _second(x, A, B)))
        sigma = phi.factor_cart(rho, phi.identity(M.obj), s)
        step = phi.then(sigma, phi.tensor_arrows(phi.identity(M.obj), opB))
        e = base_map(AB, T, lambda x: p3(_first(x, A, B), _second(x, A, B), _second(x, A, B)))
        step = phi.factor_cart(cart, step, e)
        return phi.then(step, opcart), Z

    def lunitor(self, M):
        iso, Z = self._lunit_iso(M)
        inv = self.phi.invert(iso)
        if inv is None:
            raise LawViolation("left unit comparison is not invertible")
        return self._globular(FrCell(M.left_frame, M.right_frame, Z), M, inv)

    def runitor(self, M):
        iso, Z = self._runit_iso(M)
        inv = self.phi.invert(iso)
        if inv is None:
            raise LawViolation("right unit comparison is not invertible")
        return self._globular(FrCell(M.left_frame, M.right_frame, Z), M, inv)

    def invert(self, a):
        inv = self.phi.invert(a.arrow)
        if inv is None:
            return None
        return FrSquare(a.tgt, a.src, a.left_arrow.inverse(), a.right_arrow.inverse(), inv)

    def squares(self, src, tgt, f, g):
        for arrow in self.phi.arrows_over(src.obj, tgt.obj, product_map(f, g)):
            yield FrSquare(src, tgt, f, g, arrow)

    def square_count_bound(self, src, tgt, f, g):
        return self.phi.arrow_count_bound(src.obj, tgt.obj, product_map(f, g))

    def restrict(self, f, M, g):
        if f.cod != M.left_frame or g.cod != M.right_frame:
            raise FinError("restriction arrows must land in the frames of the cell")
        obj, cart = self.phi.cart_lift(product_map(f, g), M.obj)
        cell = FrCell(f.dom, g.dom, obj)
        return cell, CartesianWitness(FrSquare(cell, M, f, g, cart), "cartesian")

    def extend(self, f, M, g):
        if f.dom != M.left_frame or g.dom != M.right_frame:
            raise FinError("extension arrows must start at the frames of the cell")
        obj, op = self.phi.opcart_lift(product_map(f, g), M.obj)
        cell = FrCell(f.cod, g.cod, obj)
        return cell, CartesianWitness(FrSquare(M, cell, f, g, op), "opcartesian")

    def factor_cartesian(self, cart, cand, h, k):
        arrow = self.phi.factor_cart(cart.arrow, cand.arrow, product_map(h, k))
        return FrSquare(cand.src, cart.src, h, k, arrow)

    def factor_opcartesian(self, opcart, cand, h, k):
        arrow = self.phi.factor_opcart(opcart.arrow, cand.arrow, product_map(h, k))
        return FrSquare(opcart.tgt, cand.tgt, h, k, arrow)

    def cell_size(self, M) -> int:
        obj = M.obj
        if isinstance(obj, ArrObject):
            return len(obj.total)
        return sum(len(F) for F in obj.fibers)

    def cell_iso(self, M, N):
        if M.left_frame != N.left_frame or M.right_frame != N.right_frame:
            return None
        iso = self.phi.find_iso(M.obj, N.obj)
        return None if iso is None else self._globular(M, N, iso)

    def coequalize(self, s, t):
        obj, q = self.phi.fiber_coequalize(s.arrow, t.arrow)
        Y = s.tgt
        Q = FrCell(Y.left_frame, Y.right_frame, obj)
        return Q, self._globular(Y, Q, q)

    def descend(self, epi, cand):
        return FrSquare(epi.tgt, cand.tgt, cand.left_arrow, cand.right_arrow,
                        self.phi.descend(epi.arrow, cand.arrow))

    # sampling
    def random_object(self, rng, cap, prefix="a"):
        size = rng.choice([0] + [s for s in range(1, cap + 1) for _ in range(3)])
        return FinSet(prefix, tuple(f"{prefix}{i}" for i in range(size)))

    def random_arrow(self, rng, A, B):
        if len(A) and not len(B):
            return None
        return FinFn(A, B, tuple(rng.choice(B.elements) for _ in A))

    def random_cell(self, rng, A, B, cap=4, prefix="m"):
        return FrCell(A, B, self.phi.random_object(rng, product_set(A, B), cap, prefix))

    def random_square_from(self, rng, M, f, g, cap=4, prefix="n"):
        arrow = self.phi.random_arrow_from(rng, M.obj, product_map(f, g), cap, prefix)
        return FrSquare(M, FrCell(f.cod, g.cod, arrow.tgt), f, g, arrow)

    # serialization
    def encode_object(self, A):
        return encode_set(A)

    def decode_object(self, data):
        return decode_set(data)

    def encode_arrow(self, f):
        return encode_fn(f)

    def decode_arrow(self, data):
        return decode_fn(data)

    def encode_cell(self, M):
        return {"left": encode_set(M.left_frame), "right": encode_set(M.right_frame),
                "object": self.phi.encode_object(M.obj)}

    def decode_cell(self, data):
        A, B = decode_set(data["left"]), decode_set(data["right"])
        return self._cell(A, B, self.phi.decode_object(data["object"]))

    def encode_square(self, a):
        return {"src": self.encode_cell(a.src), "tgt": self.encode_cell(a.tgt),
                "left": encode_fn(a.left_arrow), "right": encode_fn(a.right_arrow),
                "arrow": self.phi.encode_arrow(a.arrow)}

    def decode_square(self, data):
        src, tgt = self.decode_cell(data["src"]), self.decode_cell(data["tgt"])
        return self._sq(src, tgt, decode_fn(data["left"]), decode_fn(data["right"]),
                        self.phi.decode_arrow(data["arrow"]))


@lru_cache(maxsize=256)
def _pair_points(A, B):
    return {p2(a, b): (a, b) for a in A for b in B}


def _first(x, A, B):
    return _pair_points(A, B)[x][0]


def _second(x, A, B):
    return _pair_points(A, B)[x][1]


def _delta_fn(A, B, C):
    table = {p3(a, b, c): p2(p2(a, b), p2(b, c)) for a in A for b in B for c in C}
    return table.__getitem__


def _outer_fn(A, B, C):
    table = {p3(a, b, c): p2(a, c) for a in A for b in B for c in C}
    return table.__getitem__


@lru_cache(maxsize=256)
def _quad_points(A, B, C, D, right):
    key = (lambda a, b, c, d: p2(a, p2(b, p2(c, d)))) if right else p4
    return {key(a, b, c, d): (a, b, c, d) for a in A for b in B for c in C for d in D}


def _q4(t, A, B, C, D, fn):
    """Apply fn to the components of a point of ((A×B)×C)×D."""
    return fn(*_quad_points(A, B, C, D, False)[t])


def _q4r(t, A, B, C, D, fn):
    """Apply fn to the components of a point of A×(B×(C×D))."""
    return fn(*_quad_points(A, B, C, D, True)[t])


ARR = ArrFibration()
FAM = FamFibration()


# the free-category morphism X → B  ↦  f_! π_X^* I


def _to_point(X: FinSet) -> FinFn:
    return FinFn(X, POINT, tuple("*" for _ in X))


def free_object(phi, f: FinFn):
    """(f_! π_X^* I, cartesian π_X^* I → I, opcartesian π_X^* I → f_! π_X^* I)."""
    P, cart = phi.cart_lift(_to_point(f.dom), phi.unit_object())
    obj, opcart = phi.opcart_lift(f, P)
    return obj, cart, opcart


def free_map(phi, f: FinFn, f2: FinFn, u: FinFn):
    """The arrow F(f) → F(f2) over the identity induced by u with u;f2 = f."""
    if u.then(f2) != f:
        raise FinError("map does not lie over the common base")
    _, c1, o1 = free_object(phi, f)
    _, c2, o2 = free_object(phi, f2)
    down = phi.factor_cart(c2, c1, u)
    return phi.factor_opcart(o1, phi.then(down, o2), FinFn.identity(f.cod))


def free_compositor(fr: FrInstance, X: FinFn, Y: FinFn, A, B, C):
    """κ: F(X ×_B Y) → F(X) ⊙ F(Y) for spans X → A×B and Y → B×C.

    Returns (composite span P → A×C, κ). κ is invertible when Φ satisfies
    Beck-Chevalley for pullback squares.
    """
    phi = fr.phi
    pts_x = {x: _pair_points(A, B)[X(x)] for x in X.dom}
    pts_y = {y: _pair_points(B, C)[Y(y)] for y in Y.dom}
    labels, legs = [], []
    for x in X.dom:
        for y in Y.dom:
            if pts_x[x][1] == pts_y[y][0]:
                labels.append(p2(x, y))
                legs.append((x, y))
    Pset = FinSet(f"{X.dom.name}x{Y.dom.name}", tuple(labels))
    AC = product_set(A, C)
    Pmap = FinFn(Pset, AC, tuple(p2(pts_x[x][0], pts_y[y][1]) for x, y in legs))
    FX, cX, oX = free_object(phi, X)
    FY, cY, oY = free_object(phi, Y)
    FP, cP, oP = free_object(phi, Pmap)
    unit_split = phi.invert(phi.tensor_lunit(phi.unit_object()))
    psi = phi.then(cP, unit_split)
    w = FinFn(Pset, product_set(X.dom, Y.dom), tuple(p2(x, y) for x, y in legs))
    step = phi.factor_cart(phi.tensor_arrows(cX, cY), psi, w)
    step = phi.then(step, phi.tensor_arrows(oX, oY))
    T, _, cart, opcart, _ = fr._compose_data(FrCell(A, B, FX), FrCell(B, C, FY))
    v = FinFn(Pset, T, tuple(p3(pts_x[x][0], pts_x[x][1], pts_y[y][1]) for x, y in legs))
    step = phi.then(phi.factor_cart(cart, step, v), opcart)
    return Pmap, phi.factor_opcart(oP, step, FinFn.identity(AC))


def free_enriched_category(fr: FrInstance, C):
    """The monoid in Fr(Φ) with hom-objects ⨿_{C(x,y)} I."""
    from .modcon import MonoidData
    phi = fr.phi
    R = C.objects
    RR = product_set(R, R)
    ends = FinFn(C.morphisms, RR, tuple(p2(C.src(f), C.tgt(f)) for f in C.morphisms))
    carrier = FrCell(R, R, free_object(phi, ends)[0])
    diag = FinFn(R, RR, tuple(p2(x, x) for x in R))
    U = fr.unit(R)
    ids = FinFn(R, C.morphisms, C.identities)
    unit = FrSquare(U, carrier, FinFn.identity(R), FinFn.identity(R),
                    free_map(phi, diag, ends, ids))
    pairs, kappa = free_compositor(fr, ends, ends, R, R, R)
    back = phi.invert(kappa)
    if back is None:
        raise LawViolation("free compositor is not invertible; Beck-Chevalley fails")
    table = C.table
    split = {p2(f, g): table[(f, g)] for f, g in C.composable()}
    comp = FinFn(pairs.dom, C.morphisms, tuple(split[p] for p in pairs.dom))
    mult_arrow = phi.then(back, free_map(phi, pairs, ends, comp))
    mult = FrSquare(fr.compose(carrier, carrier), carrier, FinFn.identity(R),
                    FinFn.identity(R), mult_arrow)
    return MonoidData(R, carrier, unit, mult)
