"""Set-valued matrices under matrix multiplication.

A cell A ⇸ B is a matrix of finite sets indexed by A×B. The composite
entry (a, c) is ⊔_b M[a,b] × N[b,c] with labels ``inl_b(pair(m,n))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from itertools import product as _cartesian

from .doublecore import CartesianWitness, DoubleInstance, FinSetVerticals, LawViolation
from .finkit import (FinError, FinFn, FinSet, all_functions, assoc_map, coequalizer,
                     decode_fn, decode_set, encode_fn, encode_set, pair_label, product_map,
                     product_set, swap_map)

STAR = "*"


def tagged(b: str, x: str) -> str:
    return f"inl_{b}({x})"


@dataclass(frozen=True)
class SetMatrix:
    rows: FinSet
    cols: FinSet
    entries: tuple[FinSet, ...]  # row-major

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) != len(self.rows) * len(self.cols):
            raise FinError("matrix entries must cover rows × cols")
        object.__setattr__(self, "_table", dict(zip(self.indices(), self.entries)))

    @property
    def left_frame(self):
        return self.rows

    @property
    def right_frame(self):
        return self.cols

    def entry(self, a: str, b: str) -> FinSet:
        return self._table[(a, b)]

    def indices(self):
        return _cartesian(self.rows.elements, self.cols.elements)

    @staticmethod
    def build(A: FinSet, B: FinSet, fn) -> "SetMatrix":
        return SetMatrix(A, B, tuple(fn(a, b) for a in A for b in B))

    @staticmethod
    def from_table(A: FinSet, B: FinSet, table: dict) -> "SetMatrix":
        return SetMatrix.build(A, B, lambda a, b: FinSet(f"{a},{b}", tuple(table.get((a, b), ()))))

    def size(self) -> int:
        return sum(len(e) for e in self.entries)


@dataclass(frozen=True)
class MatrixSquare:
    src: SetMatrix
    tgt: SetMatrix
    left_arrow: FinFn
    right_arrow: FinFn
    maps: tuple[FinFn, ...]  # aligned with src entries

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        f, g = self.left_arrow, self.right_arrow
        if f.dom != self.src.rows or g.dom != self.src.cols or \
                f.cod != self.tgt.rows or g.cod != self.tgt.cols:
            raise FinError("matrix square frames do not match its cells")
        if len(self.maps) != len(self.src.entries):
            raise FinError("matrix square needs one map per entry")
        for (a, b), phi in zip(self.src.indices(), self.maps):
            if phi.dom != self.src.entry(a, b) or phi.cod != self.tgt.entry(f(a), g(b)):
                raise FinError(f"entry map at ({a},{b}) has the wrong type")

    def at(self, a: str, b: str) -> FinFn:
        return self.maps[self.src.rows.index(a) * len(self.src.cols) + self.src.cols.index(b)]


def _square(src, tgt, f, g, fn) -> MatrixSquare:
    return MatrixSquare(src, tgt, f, g, tuple(fn(a, b) for a, b in src.indices()))


# composites are rebuilt constantly inside pasting checks
@lru_cache(maxsize=4096)
def _compose(M: SetMatrix, N: SetMatrix) -> SetMatrix:
    def entry(a, c):
        labels = [tagged(b, pair_label(m, n))
                  for b in M.cols for m in M.entry(a, b) for n in N.entry(b, c)]
        return FinSet(f"({a},{c})", tuple(labels))
    return SetMatrix.build(M.rows, N.cols, entry)


class MatInstance(FinSetVerticals, DoubleInstance):
    name = "mat"

    def unit(self, A: FinSet) -> SetMatrix:
        one, none = FinSet("1", (STAR,)), FinSet("0", ())
        return SetMatrix.build(A, A, lambda a, b: one if a == b else none)

    def compose(self, M: SetMatrix, N: SetMatrix) -> SetMatrix:
        if M.cols != N.rows:
            raise FinError("matrices are not composable: shapes differ")
        return _compose(M, N)

    def sq_id(self, M):
        return _square(M, M, FinFn.identity(M.rows), FinFn.identity(M.cols),
                       lambda a, b: FinFn.identity(M.entry(a, b)))

    def unit_square(self, f):
        UA, UB = self.unit(f.dom), self.unit(f.cod)
        return _square(UA, UB, f, f, lambda a, b: FinFn(UA.entry(a, b), UB.entry(f(a), f(b)),
                                                        UA.entry(a, b).elements))

    def vcomp(self, a, b):
        if a.tgt != b.src:
            raise FinError("vertical composite needs matching cells")
        f, g = a.left_arrow, a.right_arrow
        return _square(a.src, b.tgt, f.then(b.left_arrow), g.then(b.right_arrow),
                       lambda x, y: a.at(x, y).then(b.at(f(x), g(y))))

    def hcomp(self, a, b):
        if a.right_arrow != b.left_arrow:
            raise FinError("horizontal composite needs a shared middle arrow")
        src, tgt = self.compose(a.src, b.src), self.compose(a.tgt, b.tgt)
        f, g, k = a.left_arrow, a.right_arrow, b.right_arrow
        M, N = a.src, b.src

        def entry(x, z):
            images = tuple(tagged(g(y), pair_label(a.at(x, y)(m), b.at(y, z)(n)))
                           for y in M.cols for m in M.entry(x, y) for n in N.entry(y, z))
            return FinFn(src.entry(x, z), tgt.entry(f(x), k(z)), images)
        return _square(src, tgt, f, k, entry)

    def _globular(self, src, tgt, fn):
        return _square(src, tgt, FinFn.identity(src.rows), FinFn.identity(src.cols),
                       lambda a, b: FinFn(src.entry(a, b), tgt.entry(a, b), fn(a, b)))

    def assoc(self, M, N, P):
        left = self.compose(self.compose(M, N), P)
        right = self.compose(M, self.compose(N, P))

        def images(a, d):
            return tuple(tagged(b, pair_label(m, tagged(c, pair_label(n, p))))
                         for c in N.cols for b in M.cols
                         for m in M.entry(a, b) for n in N.entry(b, c) for p in P.entry(c, d))
        return self._globular(left, right, images)

    def lunitor(self, M):
        src = self.compose(self.unit(M.rows), M)
        return self._globular(src, M, lambda a, b: M.entry(a, b).elements)

    def runitor(self, M):
        src = self.compose(M, self.unit(M.cols))
        return self._globular(src, M, lambda a, b: M.entry(a, b).elements)

    def invert(self, a):
        if not (a.left_arrow.is_bijective() and a.right_arrow.is_bijective()):
            return None
        if not all(phi.is_bijective() for phi in a.maps):
            return None
        f, g = a.left_arrow, a.right_arrow
        fi, gi = f.inverse(), g.inverse()
        return _square(a.tgt, a.src, fi, gi, lambda x, y: a.at(fi(x), gi(y)).inverse())

    def square_count_bound(self, src, tgt, f, g):
        total = 1
        for a, b in src.indices():
            total *= len(tgt.entry(f(a), g(b))) ** len(src.entry(a, b))
        return total

    def squares(self, src, tgt, f, g):
        per_entry = [list(all_functions(src.entry(a, b), tgt.entry(f(a), g(b))))
                     for a, b in src.indices()]
        for maps in _cartesian(*per_entry):
            yield MatrixSquare(src, tgt, f, g, maps)

    def restrict(self, f, M, g):
        if f.cod != M.rows or g.cod != M.cols:
            raise FinError("restriction arrows must land in the frames of the cell")
        cell = SetMatrix.build(f.dom, g.dom, lambda c, d: M.entry(f(c), g(d)))
        sq = _square(cell, M, f, g, lambda c, d: FinFn.identity(cell.entry(c, d)))
        return cell, CartesianWitness(sq, "cartesian")

    def extend(self, f, M, g):
        if f.dom != M.rows or g.dom != M.cols:
            raise FinError("extension arrows must start at the frames of the cell")
        fib_f, fib_g = f.fibers(), g.fibers()

        def entry(b, d):
            return FinSet(f"({b},{d})", tuple(tagged(pair_label(c, e), x)
                                              for c in fib_f[b] for e in fib_g[d]
                                              for x in M.entry(c, e)))
        cell = SetMatrix.build(f.cod, g.cod, entry)
        sq = _square(M, cell, f, g, lambda c, e: FinFn(
            M.entry(c, e), cell.entry(f(c), g(e)),
            tuple(tagged(pair_label(c, e), x) for x in M.entry(c, e))))
        return cell, CartesianWitness(sq, "opcartesian")

    def factor_cartesian(self, cart, cand, h, k):
        # a cartesian square in Mat has bijective entry maps
        P = cart.src
        out = []
        for x, y in cand.src.indices():
            phi = cart.at(h(x), k(y))
            if not phi.is_bijective():
                raise LawViolation("square is not cartesian: an entry map is not a bijection")
            out.append(cand.at(x, y).then(phi.inverse()))
        return MatrixSquare(cand.src, P, h, k, out)

    def factor_opcartesian(self, opcart, cand, h, k):
        M, Q = opcart.src, opcart.tgt
        f, g = opcart.left_arrow, opcart.right_arrow
        # each target entry must be the disjoint union of the images of its fibers
        preimage: dict[tuple[str, str], dict[str, tuple[str, str, str]]] = {}
        for (c, e), phi in zip(M.indices(), opcart.maps):
            bucket = preimage.setdefault((f(c), g(e)), {})
            for x, y in zip(phi.dom.elements, phi.images):
                if y in bucket:
                    raise LawViolation("square is not opcartesian: entry maps overlap")
                bucket[y] = (c, e, x)
        maps = []
        for b, d in Q.indices():
            bucket = preimage.get((b, d), {})
            entry = Q.entry(b, d)
            if len(bucket) != len(entry):
                raise LawViolation("square is not opcartesian: entry maps do not cover")
            maps.append(FinFn(entry, cand.tgt.entry(h(b), k(d)),
                              tuple(cand.at(bucket[y][0], bucket[y][1])(bucket[y][2])
                                    for y in entry)))
        return MatrixSquare(Q, cand.tgt, h, k, maps)

    def cell_size(self, M) -> int:
        return M.size()

    def cell_iso(self, M, N):
        if M.rows != N.rows or M.cols != N.cols:
            return None
        if any(len(M.entry(a, b)) != len(N.entry(a, b)) for a, b in M.indices()):
            return None
        return self._globular(M, N, lambda a, b: N.entry(a, b).elements)

    # local coequalizers, used by the bimodule construction
    def coequalize(self, s, t):
        """Entrywise coequalizer of parallel globular squares X ⇒ Y."""
        Y = s.tgt
        quotients = {}
        for (a, b), p, q in zip(s.src.indices(), s.maps, t.maps):
            quotients[(a, b)] = coequalizer(p, q).as_fn()
        Q = SetMatrix.build(Y.rows, Y.cols, lambda a, b: quotients[(a, b)].cod)
        return Q, self._globular(Y, Q, lambda a, b: quotients[(a, b)].images)

    def descend(self, epi, cand):
        """The unique χ with epi;χ = cand, for a globular entrywise surjective
        epi; χ lies over the frame arrows of ``cand``."""
        f, g = cand.left_arrow, cand.right_arrow
        maps = []
        for (a, b), e in zip(epi.src.indices(), epi.maps):
            c = cand.at(a, b)
            table: dict[str, str] = {}
            for x, y in zip(e.dom.elements, e.images):
                if table.setdefault(y, c(x)) != c(x):
                    raise LawViolation("map does not descend to the quotient",
                                       {"entry": [a, b], "element": y})
            entry = epi.tgt.entry(a, b)
            if len(table) != len(entry):
                raise LawViolation("descent needs an entrywise surjection")
            maps.append(FinFn(entry, cand.tgt.entry(f(a), g(b)), tuple(table[y] for y in entry)))
        return MatrixSquare(epi.tgt, cand.tgt, f, g, maps)

    # involution
    def involute(self, M):
        return SetMatrix.build(M.cols, M.rows, lambda b, a: M.entry(a, b))

    def involute_square(self, a):
        return _square(self.involute(a.src), self.involute(a.tgt), a.right_arrow, a.left_arrow,
                       lambda y, x: a.at(x, y))

    def involution_constraint(self, M, N):
        """N^T ⊙ M^T ⇒ (M ⊙ N)^T, inl_b(pair(n,m)) ↦ inl_b(pair(m,n))."""
        src = self.compose(self.involute(N), self.involute(M))
        tgt = self.involute(self.compose(M, N))
        return self._globular(src, tgt, lambda c, a: tuple(
            tagged(b, pair_label(m, n)) for b in M.cols
            for n in N.entry(b, c) for m in M.entry(a, b)))

    def involution_unit(self, A):
        U = self.unit(A)
        return self._globular(U, self.involute(U), lambda a, b: U.entry(a, b).elements)

    # external product
    def tensor_object(self, A, B):
        return product_set(A, B)

    def tensor_arrow(self, f, g):
        return product_map(f, g)

    def tensor_cell(self, M, N):
        entries = []
        for a in M.rows:
            for c in N.rows:
                for b in M.cols:
                    for d in N.cols:
                        entries.append(product_set(M.entry(a, b), N.entry(c, d)))
        return SetMatrix(product_set(M.rows, N.rows), product_set(M.cols, N.cols), entries)

    def _tensor_maps(self, a, b):
        maps = []
        for x in a.src.rows:
            for z in b.src.rows:
                for y in a.src.cols:
                    for w in b.src.cols:
                        maps.append(product_map(a.at(x, y), b.at(z, w)))
        return maps

    def tensor_square(self, a, b):
        return MatrixSquare(self.tensor_cell(a.src, b.src), self.tensor_cell(a.tgt, b.tgt),
                            product_map(a.left_arrow, b.left_arrow),
                            product_map(a.right_arrow, b.right_arrow), self._tensor_maps(a, b))

    def interchange(self, M, P, N, Q):
        """(M⊗P) ⊙ (N⊗Q) ⇒ (M⊙N) ⊗ (P⊙Q)."""
        src = self.compose(self.tensor_cell(M, P), self.tensor_cell(N, Q))
        tgt = self.tensor_cell(self.compose(M, N), self.compose(P, Q))
        maps = []
        for a in M.rows:
            for c in P.rows:
                for e in N.cols:
                    for g in Q.cols:
                        images = tuple(
                            pair_label(tagged(b, pair_label(m, n)), tagged(d, pair_label(p, q)))
                            for b in M.cols for d in P.cols
                            for m in M.entry(a, b) for p in P.entry(c, d)
                            for n in N.entry(b, e) for q in Q.entry(d, g))
                        maps.append(FinFn(src.entry(pair_label(a, c), pair_label(e, g)),
                                          tgt.entry(pair_label(a, c), pair_label(e, g)), images))
        return MatrixSquare(src, tgt, FinFn.identity(src.rows), FinFn.identity(src.cols), maps)

    def unit_interchange(self, A, B):
        src = self.unit(product_set(A, B))
        tgt = self.tensor_cell(self.unit(A), self.unit(B))
        return self._globular(src, tgt, lambda x, y: tuple(
            pair_label(STAR, STAR) for _ in src.entry(x, y)))

    def tensor_assoc(self, M, N, P):
        src = self.tensor_cell(self.tensor_cell(M, N), P)
        tgt = self.tensor_cell(M, self.tensor_cell(N, P))
        maps = []
        for a in M.rows:
            for c in N.rows:
                for e in P.rows:
                    for b in M.cols:
                        for d in N.cols:
                            for f in P.cols:
                                maps.append(assoc_map(M.entry(a, b), N.entry(c, d),
                                                      P.entry(e, f)))
        return MatrixSquare(src, tgt, assoc_map(M.rows, N.rows, P.rows),
                            assoc_map(M.cols, N.cols, P.cols), maps)

    def tensor_symmetry(self, M, N):
        src, tgt = self.tensor_cell(M, N), self.tensor_cell(N, M)
        fs, gs = swap_map(M.rows, N.rows), swap_map(M.cols, N.cols)
        maps = []
        for a in M.rows:
            for c in N.rows:
                for b in M.cols:
                    for d in N.cols:
                        maps.append(swap_map(M.entry(a, b), N.entry(c, d)))
        return MatrixSquare(src, tgt, fs, gs, maps)

    # sampling
    def random_object(self, rng, cap, prefix="a"):
        size = rng.choice([0] + [s for s in range(1, cap + 1) for _ in range(3)])
        return FinSet(prefix, tuple(f"{prefix}{i}" for i in range(size)))

    def random_arrow(self, rng, A, B):
        if len(A) and not len(B):
            return None
        return FinFn(A, B, tuple(rng.choice(B.elements) for _ in A))

    def random_cell(self, rng, A, B, cap=4, prefix="m"):
        total = rng.randint(0, cap)
        table: dict[tuple[str, str], list[str]] = {}
        if len(A) and len(B):
            for i in range(total):
                key = (rng.choice(A.elements), rng.choice(B.elements))
                table.setdefault(key, []).append(f"{prefix}{i}")
        return SetMatrix.from_table(A, B, table)

    def enumerate_cells(self, A, B, cap, prefix="m"):
        """One matrix per iso class with at most ``cap`` elements in total."""
        positions = [(a, b) for a in A for b in B]
        for size in range(cap + 1):
            for combo in combinations_with_replacement(positions, size):
                table: dict[tuple[str, str], list[str]] = {}
                for i, key in enumerate(combo):
                    table.setdefault(key, []).append(f"{prefix}{i}")
                yield SetMatrix.from_table(A, B, table)

    def random_square_from(self, rng, M, f, g, cap=4, prefix="n"):
        table: dict[tuple[str, str], list[str]] = {}
        fresh = 0
        for a, b in M.indices():
            key = (f(a), g(b))
            for _ in range(rng.randint(0, 1) + (1 if len(M.entry(a, b)) else 0)):
                table.setdefault(key, []).append(f"{prefix}{fresh}")
                fresh += 1
        if len(f.cod) and len(g.cod):
            for _ in range(rng.randint(0, 2)):
                key = (rng.choice(f.cod.elements), rng.choice(g.cod.elements))
                table.setdefault(key, []).append(f"{prefix}{fresh}")
                fresh += 1
        N = SetMatrix.from_table(f.cod, g.cod, table)
        maps = []
        for a, b in M.indices():
            target = N.entry(f(a), g(b))
            maps.append(FinFn(M.entry(a, b), target,
                              tuple(rng.choice(target.elements) for _ in M.entry(a, b))))
        return MatrixSquare(M, N, f, g, maps)

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
        return {"rows": encode_set(M.rows), "cols": encode_set(M.cols),
                "entries": [[a, b, list(M.entry(a, b).elements)]
                            for a, b in M.indices() if len(M.entry(a, b))]}

    def decode_cell(self, data):
        try:
            rows, cols = decode_set(data["rows"]), decode_set(data["cols"])
            table = {}
            for a, b, elems in data["entries"]:
                if a not in rows or b not in cols:
                    raise FinError(f"matrix entry ({a},{b}) outside the frames")
                table[(str(a), str(b))] = [str(x) for x in elems]
            return SetMatrix.from_table(rows, cols, table)
        except (KeyError, TypeError, ValueError) as exc:
            raise FinError(f"malformed matrix: {exc}") from exc

    def encode_square(self, a):
        return {"src": self.encode_cell(a.src), "tgt": self.encode_cell(a.tgt),
                "left": encode_fn(a.left_arrow), "right": encode_fn(a.right_arrow),
                "maps": [[x, y, phi.as_dict()] for (x, y), phi in zip(a.src.indices(), a.maps)
                         if len(phi.dom)]}

    def decode_square(self, data):
        src, tgt = self.decode_cell(data["src"]), self.decode_cell(data["tgt"])
        f, g = decode_fn(data["left"]), decode_fn(data["right"])
        given = {(x, y): m for x, y, m in data["maps"]}
        return _square(src, tgt, f, g, lambda x, y: FinFn.from_dict(
            src.entry(x, y), tgt.entry(f(x), g(y)), given.get((x, y), {})))
