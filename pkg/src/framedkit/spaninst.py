"""Spans of finite sets and their image, relations.

A span A ← X → B is a horizontal cell A ⇸ B; a square is a map of apexes
commuting with both legs over a pair of frame functions. Composition is
by pullback, so composite apex labels are ``pair(m,n)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from itertools import product as _cartesian

from .doublecore import (CartesianWitness, DoubleInstance, FinSetVerticals, LawViolation)
from .finkit import (FinError, FinFn, FinSet, assoc_map, coequalizer, decode_fn, decode_set,
                     encode_fn, encode_set, find_bijection, pair_label, pairing, product,
                     product_map, product_set, pullback, swap_map)


@dataclass(frozen=True)
class Span:
    left_frame: FinSet
    right_frame: FinSet
    apex: FinSet
    l: FinFn
    r: FinFn

    def __post_init__(self):
        if self.l.dom != self.apex or self.r.dom != self.apex:
            raise FinError("span legs must start at the apex")
        if self.l.cod != self.left_frame or self.r.cod != self.right_frame:
            raise FinError("span legs must land in the frames")

    @staticmethod
    def make(A: FinSet, B: FinSet, legs: dict[str, tuple[str, str]], name: str = "X") -> "Span":
        apex = FinSet(name, tuple(legs))
        return Span(A, B, apex,
                    FinFn(apex, A, tuple(legs[x][0] for x in apex)),
                    FinFn(apex, B, tuple(legs[x][1] for x in apex)))

    def legs(self, x: str) -> tuple[str, str]:
        return self.l(x), self.r(x)


@dataclass(frozen=True)
class SpanSquare:
    src: Span
    tgt: Span
    left_arrow: FinFn
    right_arrow: FinFn
    h: FinFn

    def __post_init__(self):
        if self.h.dom != self.src.apex or self.h.cod != self.tgt.apex:
            raise FinError("square map must go between the apexes")
        if self.left_arrow.dom != self.src.left_frame or self.left_arrow.cod != self.tgt.left_frame:
            raise FinError("left frame arrow does not match the cells")
        if self.right_arrow.dom != self.src.right_frame or self.right_arrow.cod != self.tgt.right_frame:
            raise FinError("right frame arrow does not match the cells")
        for x, y in zip(self.src.apex.elements, self.h.images):
            if self.tgt.l(y) != self.left_arrow(self.src.l(x)) or \
                    self.tgt.r(y) != self.right_arrow(self.src.r(x)):
                raise FinError(f"square does not commute with the legs at {x}")


def _composite(M: Span, N: Span) -> tuple[Span, FinFn, FinFn]:
    if M.right_frame != N.left_frame:
        raise FinError("spans are not composable: frames differ")
    apex, p1, p2 = pullback(M.r, N.l)
    return Span(M.left_frame, N.right_frame, apex, p1.then(M.l), p2.then(N.r)), p1, p2


class SpanInstance(FinSetVerticals, DoubleInstance):
    name = "span"

    def unit(self, A: FinSet) -> Span:
        apex = A.renamed(f"U({A.name})")
        return Span(A, A, apex, FinFn(apex, A, A.elements), FinFn(apex, A, A.elements))

    def compose(self, M: Span, N: Span) -> Span:
        return _composite(M, N)[0]

    def sq_id(self, M: Span) -> SpanSquare:
        return SpanSquare(M, M, FinFn.identity(M.left_frame), FinFn.identity(M.right_frame),
                          FinFn.identity(M.apex))

    def unit_square(self, f: FinFn) -> SpanSquare:
        UA, UB = self.unit(f.dom), self.unit(f.cod)
        return SpanSquare(UA, UB, f, f, FinFn(UA.apex, UB.apex, f.images))

    def vcomp(self, a: SpanSquare, b: SpanSquare) -> SpanSquare:
        if a.tgt != b.src:
            raise FinError("vertical composite needs matching cells")
        return SpanSquare(a.src, b.tgt, a.left_arrow.then(b.left_arrow),
                          a.right_arrow.then(b.right_arrow), a.h.then(b.h))

    def hcomp(self, a: SpanSquare, b: SpanSquare) -> SpanSquare:
        if a.right_arrow != b.left_arrow:
            raise FinError("horizontal composite needs a shared middle arrow")
        src, p1, p2 = _composite(a.src, b.src)
        tgt = self.compose(a.tgt, b.tgt)
        images = tuple(pair_label(a.h(m), b.h(n)) for m, n in zip(p1.images, p2.images))
        return SpanSquare(src, tgt, a.left_arrow, b.right_arrow, FinFn(src.apex, tgt.apex, images))

    def assoc(self, M: Span, N: Span, P: Span) -> SpanSquare:
        MN, p1, p2 = _composite(M, N)
        left, q1, q2 = _composite(MN, P)
        right = self.compose(M, self.compose(N, P))
        images = tuple(pair_label(p1(x), pair_label(p2(x), p))
                       for x, p in zip(q1.images, q2.images))
        return SpanSquare(left, right, FinFn.identity(M.left_frame),
                          FinFn.identity(P.right_frame), FinFn(left.apex, right.apex, images))

    def lunitor(self, M: Span) -> SpanSquare:
        src, _, p2 = _composite(self.unit(M.left_frame), M)
        return SpanSquare(src, M, FinFn.identity(M.left_frame), FinFn.identity(M.right_frame),
                          p2)

    def runitor(self, M: Span) -> SpanSquare:
        src, p1, _ = _composite(M, self.unit(M.right_frame))
        return SpanSquare(src, M, FinFn.identity(M.left_frame), FinFn.identity(M.right_frame),
                          p1)

    def invert(self, a: SpanSquare):
        if not (a.h.is_bijective() and a.left_arrow.is_bijective()
                and a.right_arrow.is_bijective()):
            return None
        return SpanSquare(a.tgt, a.src, a.left_arrow.inverse(), a.right_arrow.inverse(),
                          a.h.inverse())

    def _candidates(self, src: Span, tgt: Span, f: FinFn, g: FinFn) -> list[list[str]]:
        by_legs: dict[tuple[str, str], list[str]] = {}
        for y in tgt.apex:
            by_legs.setdefault(tgt.legs(y), []).append(y)
        return [by_legs.get((f(src.l(x)), g(src.r(x))), []) for x in src.apex]

    def square_count_bound(self, src, tgt, f, g) -> int:
        total = 1
        for c in self._candidates(src, tgt, f, g):
            total *= len(c)
        return total

    def squares(self, src: Span, tgt: Span, f: FinFn, g: FinFn):
        for images in _cartesian(*self._candidates(src, tgt, f, g)):
            yield SpanSquare(src, tgt, f, g, FinFn(src.apex, tgt.apex, images))

    def restrict(self, f: FinFn, M: Span, g: FinFn):
        if f.cod != M.left_frame or g.cod != M.right_frame:
            raise FinError("restriction arrows must land in the frames of the cell")
        fg = product_map(f, g)
        apex, p1, p2 = pullback(fg, pairing(M.l, M.r))
        _, pc, pd = product(f.dom, g.dom)
        cell = Span(f.dom, g.dom, apex, p1.then(pc), p1.then(pd))
        return cell, CartesianWitness(SpanSquare(cell, M, f, g, p2), "cartesian")

    def extend(self, f: FinFn, M: Span, g: FinFn):
        if f.dom != M.left_frame or g.dom != M.right_frame:
            raise FinError("extension arrows must start at the frames of the cell")
        cell = Span(f.cod, g.cod, M.apex, M.l.then(f), M.r.then(g))
        return cell, CartesianWitness(
            SpanSquare(M, cell, f, g, FinFn.identity(M.apex)), "opcartesian")

    def factor_cartesian(self, cart: SpanSquare, cand: SpanSquare, h: FinFn, k: FinFn):
        # the apex of a cartesian square is the pullback of M along f×g
        P, N = cart.src, cand.src
        index: dict[tuple[str, str, str], list[str]] = {}
        for p in P.apex:
            index.setdefault((P.l(p), P.r(p), cart.h(p)), []).append(p)
        images = []
        for n in N.apex:
            hits = index.get((h(N.l(n)), k(N.r(n)), cand.h(n)), [])
            if len(hits) != 1:
                raise LawViolation(f"cartesian factorization has {len(hits)} solutions at {n}",
                                   {"element": n, "solutions": len(hits)})
            images.append(hits[0])
        return SpanSquare(N, P, h, k, FinFn(N.apex, P.apex, tuple(images)))

    def factor_opcartesian(self, opcart: SpanSquare, cand: SpanSquare, h: FinFn, k: FinFn):
        if not opcart.h.is_bijective():
            raise LawViolation("square is not opcartesian: apex map is not a bijection")
        chi = opcart.h.inverse().then(cand.h)
        try:
            return SpanSquare(opcart.tgt, cand.tgt, h, k, chi)
        except FinError as exc:
            raise LawViolation(f"opcartesian factorization does not commute: {exc}") from exc

    def cell_size(self, M: Span) -> int:
        return len(M.apex)

    def cell_iso(self, M: Span, N: Span):
        if M.left_frame != N.left_frame or M.right_frame != N.right_frame:
            return None
        phi = find_bijection(M.apex, N.apex, [(M.l, N.l), (M.r, N.r)])
        if phi is None:
            return None
        return SpanSquare(M, N, FinFn.identity(M.left_frame), FinFn.identity(M.right_frame), phi)

    # local coequalizers
    def _globular(self, src: Span, tgt: Span, h: FinFn) -> SpanSquare:
        return SpanSquare(src, tgt, FinFn.identity(src.left_frame),
                          FinFn.identity(src.right_frame), h)

    def coequalize(self, s: SpanSquare, t: SpanSquare):
        """Apexwise coequalizer of parallel globular squares X ⇒ Y."""
        Y = s.tgt
        q = coequalizer(s.h, t.h).as_fn()
        legs = {}
        for y, c in zip(Y.apex.elements, q.images):
            legs.setdefault(c, Y.legs(y))
        Q = Span(Y.left_frame, Y.right_frame, q.cod,
                 FinFn(q.cod, Y.left_frame, tuple(legs[c][0] for c in q.cod)),
                 FinFn(q.cod, Y.right_frame, tuple(legs[c][1] for c in q.cod)))
        return Q, self._globular(Y, Q, q)

    def descend(self, epi: SpanSquare, cand: SpanSquare) -> SpanSquare:
        """The unique χ with epi;χ = cand, for a globular surjective epi.

        χ lies over the frame arrows of ``cand``.
        """
        table: dict[str, str] = {}
        for x, y in zip(epi.src.apex.elements, epi.h.images):
            if table.setdefault(y, cand.h(x)) != cand.h(x):
                raise LawViolation("map does not descend to the quotient", {"element": y})
        if len(table) != len(epi.tgt.apex):
            raise LawViolation("descent needs a surjection")
        return SpanSquare(epi.tgt, cand.tgt, cand.left_arrow, cand.right_arrow,
                          FinFn.from_dict(epi.tgt.apex, cand.tgt.apex, table))

    # involution
    def involute(self, M: Span) -> Span:
        return Span(M.right_frame, M.left_frame, M.apex, M.r, M.l)

    def involute_square(self, a: SpanSquare) -> SpanSquare:
        return SpanSquare(self.involute(a.src), self.involute(a.tgt), a.right_arrow,
                          a.left_arrow, a.h)

    def involution_constraint(self, M: Span, N: Span) -> SpanSquare:
        """N^op ⊙ M^op ⇒ (M ⊙ N)^op, pair(n,m) ↦ pair(m,n)."""
        src, q1, q2 = _composite(self.involute(N), self.involute(M))
        tgt = self.involute(self.compose(M, N))
        images = tuple(pair_label(m, n) for n, m in zip(q1.images, q2.images))
        return SpanSquare(src, tgt, FinFn.identity(src.left_frame),
                          FinFn.identity(src.right_frame), FinFn(src.apex, tgt.apex, images))

    def involution_unit(self, A: FinSet) -> SpanSquare:
        """U_A ⇒ (U_A)^op."""
        U = self.unit(A)
        return SpanSquare(U, self.involute(U), FinFn.identity(A), FinFn.identity(A),
                          FinFn.identity(U.apex))

    # external product
    def tensor_object(self, A: FinSet, B: FinSet) -> FinSet:
        return product_set(A, B)

    def tensor_arrow(self, f: FinFn, g: FinFn) -> FinFn:
        return product_map(f, g)

    def tensor_cell(self, M: Span, N: Span) -> Span:
        apex = product_set(M.apex, N.apex)
        return Span(product_set(M.left_frame, N.left_frame),
                    product_set(M.right_frame, N.right_frame), apex,
                    product_map(M.l, N.l), product_map(M.r, N.r))

    def tensor_square(self, a: SpanSquare, b: SpanSquare) -> SpanSquare:
        return SpanSquare(self.tensor_cell(a.src, b.src), self.tensor_cell(a.tgt, b.tgt),
                          product_map(a.left_arrow, b.left_arrow),
                          product_map(a.right_arrow, b.right_arrow), product_map(a.h, b.h))

    def interchange(self, M: Span, P: Span, N: Span, Q: Span) -> SpanSquare:
        """(M⊗P) ⊙ (N⊗Q) ⇒ (M⊙N) ⊗ (P⊙Q)."""
        src, q1, q2 = _composite(self.tensor_cell(M, P), self.tensor_cell(N, Q))
        tgt = self.tensor_cell(self.compose(M, N), self.compose(P, Q))
        _, pm, pp = product(M.apex, P.apex)
        _, pn, pq = product(N.apex, Q.apex)
        images = tuple(pair_label(pair_label(pm(x), pn(y)), pair_label(pp(x), pq(y)))
                       for x, y in zip(q1.images, q2.images))
        return SpanSquare(src, tgt, FinFn.identity(src.left_frame),
                          FinFn.identity(src.right_frame), FinFn(src.apex, tgt.apex, images))

    def unit_interchange(self, A: FinSet, B: FinSet) -> SpanSquare:
        """U_{A×B} ⇒ U_A ⊗ U_B."""
        src = self.unit(product_set(A, B))
        tgt = self.tensor_cell(self.unit(A), self.unit(B))
        return SpanSquare(src, tgt, FinFn.identity(src.left_frame),
                          FinFn.identity(src.right_frame), FinFn(src.apex, tgt.apex, src.apex.elements))

    def tensor_assoc(self, M: Span, N: Span, P: Span) -> SpanSquare:
        return SpanSquare(self.tensor_cell(self.tensor_cell(M, N), P),
                          self.tensor_cell(M, self.tensor_cell(N, P)),
                          assoc_map(M.left_frame, N.left_frame, P.left_frame),
                          assoc_map(M.right_frame, N.right_frame, P.right_frame),
                          assoc_map(M.apex, N.apex, P.apex))

    def tensor_symmetry(self, M: Span, N: Span) -> SpanSquare:
        return SpanSquare(self.tensor_cell(M, N), self.tensor_cell(N, M),
                          swap_map(M.left_frame, N.left_frame),
                          swap_map(M.right_frame, N.right_frame), swap_map(M.apex, N.apex))

    # sampling
    def random_object(self, rng, cap: int, prefix: str = "a") -> FinSet:
        size = rng.choice([0] + [s for s in range(1, cap + 1) for _ in range(3)])
        return FinSet(prefix, tuple(f"{prefix}{i}" for i in range(size)))

    def random_arrow(self, rng, A: FinSet, B: FinSet):
        if len(A) and not len(B):
            return None
        return FinFn(A, B, tuple(rng.choice(B.elements) for _ in A))

    def random_cell(self, rng, A: FinSet, B: FinSet, cap: int = 4, prefix: str = "m") -> Span:
        size = 0 if not (len(A) and len(B)) else rng.randint(0, cap)
        legs = {f"{prefix}{i}": (rng.choice(A.elements), rng.choice(B.elements))
                for i in range(size)}
        return Span.make(A, B, legs, prefix)

    def enumerate_cells(self, A: FinSet, B: FinSet, cap: int, prefix: str = "m"):
        """One span per iso class with at most ``cap`` apex elements."""
        positions = [(a, b) for a in A for b in B]
        for size in range(cap + 1):
            for combo in combinations_with_replacement(positions, size):
                yield Span.make(A, B, {f"{prefix}{i}": ab for i, ab in enumerate(combo)}, prefix)

    def random_square_from(self, rng, M: Span, f: FinFn, g: FinFn, cap: int = 4,
                           prefix: str = "n") -> SpanSquare:
        """A random square out of M over (f, g): image of M, optionally glued, plus extras."""
        classes = {}
        for x in M.apex:
            key = (f(M.l(x)), g(M.r(x)))
            same = [y for y, k in classes.items() if k == key]
            if same and rng.random() < 0.4:
                classes[x] = None
                classes.setdefault(("glue", x), rng.choice(same))
            else:
                classes[x] = key
        legs, h = {}, {}
        fresh = 0
        for x in M.apex:
            if classes[x] is None:
                h[x] = h[classes[("glue", x)]]
                continue
            label = f"{prefix}{fresh}"
            fresh += 1
            legs[label] = classes[x]
            h[x] = label
        if len(f.cod) and len(g.cod):
            for _ in range(rng.randint(0, max(0, cap - len(legs)))):
                legs[f"{prefix}{fresh}"] = (rng.choice(f.cod.elements), rng.choice(g.cod.elements))
                fresh += 1
        N = Span.make(f.cod, g.cod, legs, prefix)
        return SpanSquare(M, N, f, g, FinFn(M.apex, N.apex, tuple(h[x] for x in M.apex)))

    # serialization
    def encode_object(self, A):
        return encode_set(A)

    def decode_object(self, data):
        return decode_set(data)

    def encode_arrow(self, f):
        return encode_fn(f)

    def decode_arrow(self, data):
        return decode_fn(data)

    def encode_cell(self, M: Span) -> dict:
        return {"left": encode_set(M.left_frame), "right": encode_set(M.right_frame),
                "legs": {x: [M.l(x), M.r(x)] for x in M.apex}}

    def decode_cell(self, data) -> Span:
        try:
            legs = {str(x): (str(v[0]), str(v[1])) for x, v in data["legs"].items()}
            return Span.make(decode_set(data["left"]), decode_set(data["right"]), legs,
                             data.get("name", "X"))
        except (KeyError, TypeError, IndexError, AttributeError) as exc:
            raise FinError(f"malformed span: {exc}") from exc

    def encode_square(self, a: SpanSquare) -> dict:
        return {"src": self.encode_cell(a.src), "tgt": self.encode_cell(a.tgt),
                "left": encode_fn(a.left_arrow), "right": encode_fn(a.right_arrow),
                "map": a.h.as_dict()}

    def decode_square(self, data) -> SpanSquare:
        src, tgt = self.decode_cell(data["src"]), self.decode_cell(data["tgt"])
        return SpanSquare(src, tgt, decode_fn(data["left"]), decode_fn(data["right"]),
                          FinFn.from_dict(src.apex, tgt.apex, data["map"]))


def graph_span(f: FinFn) -> Span:
    """The companion A ← A → B of f."""
    apex = f.dom.renamed(f"graph({f.dom.name})")
    return Span(f.dom, f.cod, apex, FinFn(apex, f.dom, f.dom.elements),
                FinFn(apex, f.cod, f.images))


# relations


@dataclass(frozen=True)
class Relation:
    left_frame: FinSet
    right_frame: FinSet
    pairs: frozenset

    def __post_init__(self):
        for a, b in self.pairs:
            if a not in self.left_frame or b not in self.right_frame:
                raise FinError("relation pairs must lie in the product of the frames")

    def sorted_pairs(self) -> list[tuple[str, str]]:
        return sorted(self.pairs, key=lambda p: (self.left_frame.index(p[0]),
                                                 self.right_frame.index(p[1])))


@dataclass(frozen=True)
class RelSquare:
    """A containment f×g(src) ⊆ tgt; there is at most one per frame."""

    src: Relation
    tgt: Relation
    left_arrow: FinFn
    right_arrow: FinFn

    def __post_init__(self):
        for a, b in self.src.pairs:
            if (self.left_arrow(a), self.right_arrow(b)) not in self.tgt.pairs:
                raise FinError("relation square needs the image inside the target")


class RelInstance(FinSetVerticals, DoubleInstance):
    name = "rel"

    def unit(self, A):
        return Relation(A, A, frozenset((a, a) for a in A))

    def compose(self, M: Relation, N: Relation) -> Relation:
        if M.right_frame != N.left_frame:
            raise FinError("relations are not composable")
        return Relation(M.left_frame, N.right_frame,
                        frozenset((a, c) for a, b in M.pairs for b2, c in N.pairs if b == b2))

    def _square(self, src, tgt, f, g):
        try:
            return RelSquare(src, tgt, f, g)
        except FinError:
            return None

    def _must(self, src, tgt, f, g):
        sq = self._square(src, tgt, f, g)
        if sq is None:
            raise LawViolation("no relation square with these frames")
        return sq

    def sq_id(self, M):
        return RelSquare(M, M, FinFn.identity(M.left_frame), FinFn.identity(M.right_frame))

    def unit_square(self, f):
        return RelSquare(self.unit(f.dom), self.unit(f.cod), f, f)

    def vcomp(self, a, b):
        if a.tgt != b.src:
            raise FinError("vertical composite needs matching cells")
        return RelSquare(a.src, b.tgt, a.left_arrow.then(b.left_arrow),
                         a.right_arrow.then(b.right_arrow))

    def hcomp(self, a, b):
        if a.right_arrow != b.left_arrow:
            raise FinError("horizontal composite needs a shared middle arrow")
        return RelSquare(self.compose(a.src, b.src), self.compose(a.tgt, b.tgt),
                         a.left_arrow, b.right_arrow)

    def _globular(self, src, tgt):
        return RelSquare(src, tgt, FinFn.identity(src.left_frame), FinFn.identity(src.right_frame))

    def assoc(self, M, N, P):
        return self._globular(self.compose(self.compose(M, N), P),
                              self.compose(M, self.compose(N, P)))

    def lunitor(self, M):
        return self._globular(self.compose(self.unit(M.left_frame), M), M)

    def runitor(self, M):
        return self._globular(self.compose(M, self.unit(M.right_frame)), M)

    def invert(self, a):
        if not (a.left_arrow.is_bijective() and a.right_arrow.is_bijective()):
            return None
        return self._square(a.tgt, a.src, a.left_arrow.inverse(), a.right_arrow.inverse())

    def squares(self, src, tgt, f, g):
        sq = self._square(src, tgt, f, g)
        return iter([sq] if sq is not None else [])

    def square_count_bound(self, src, tgt, f, g):
        return 1

    def restrict(self, f, M, g):
        cell = Relation(f.dom, g.dom, frozenset(
            (c, d) for c in f.dom for d in g.dom if (f(c), g(d)) in M.pairs))
        return cell, CartesianWitness(RelSquare(cell, M, f, g), "cartesian")

    def extend(self, f, M, g):
        cell = Relation(f.cod, g.cod, frozenset((f(a), g(b)) for a, b in M.pairs))
        return cell, CartesianWitness(RelSquare(M, cell, f, g), "opcartesian")

    def factor_cartesian(self, cart, cand, h, k):
        return self._must(cand.src, cart.src, h, k)

    def factor_opcartesian(self, opcart, cand, h, k):
        return self._must(opcart.tgt, cand.tgt, h, k)

    def cell_size(self, M: Relation) -> int:
        return len(M.pairs)

    def cell_iso(self, M, N):
        if M != N:
            return None
        return self.sq_id(M)

    def encode_cell(self, M):
        return {"left": encode_set(M.left_frame), "right": encode_set(M.right_frame),
                "pairs": [list(p) for p in M.sorted_pairs()]}

    def encode_square(self, a):
        return {"src": self.encode_cell(a.src), "tgt": self.encode_cell(a.tgt),
                "left": encode_fn(a.left_arrow), "right": encode_fn(a.right_arrow)}


def to_relation(M: Span) -> Relation:
    return Relation(M.left_frame, M.right_frame, frozenset(M.legs(x) for x in M.apex))
