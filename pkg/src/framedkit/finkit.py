"""Finite sets, tabulated functions and the finite limits and colimits
that every instance builds its composition from.

Constructed sets carry structured labels (``pair(a,b)``, ``inl(a)``,
``class(a)``) and a canonical order, so that every construction is
reproducible and canonical isomorphisms can be found by search.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as _cartesian
from typing import Iterable, Mapping, Sequence


class FinError(ValueError):
    """Malformed finite data (an input error, not a law violation)."""


def pair_label(a: str, b: str) -> str:
    return f"pair({a},{b})"


def inl_label(a: str) -> str:
    return f"inl({a})"


def inr_label(b: str) -> str:
    return f"inr({b})"


def class_label(rep: str) -> str:
    return f"class({rep})"


@dataclass(frozen=True)
class FinSet:
    """A finite set with an ordered list of distinct string labels.

    Equality and hashing look at the elements only; the name is a
    display hint.
    """

    name: str = field(compare=False)
    elements: tuple[str, ...]

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        index = {x: i for i, x in enumerate(elements)}
        if len(index) != len(elements):
            raise FinError(f"duplicate labels in set {self.name}")
        object.__setattr__(self, "_index", index)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self._index

    def index(self, x: str) -> int:
        return self._index[x]

    def __repr__(self):
        return f"FinSet({self.name!r}, {list(self.elements)!r})"

    def renamed(self, name: str) -> "FinSet":
        return FinSet(name, self.elements)


def finset(name: str, elements: Iterable) -> FinSet:
    return FinSet(name, tuple(str(x) for x in elements))


EMPTY = FinSet("0", ())
POINT = FinSet("1", ("*",))


@dataclass(frozen=True)
class FinFn:
    """A total function between finite sets, tabulated in domain order."""

    dom: FinSet
    cod: FinSet
    images: tuple[str, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != len(self.dom):
            raise FinError("function table does not cover the domain")
        for y in images:
            if y not in self.cod:
                raise FinError(f"image {y!r} not in codomain {self.cod.name}")

    @staticmethod
    def from_dict(dom: FinSet, cod: FinSet, mapping: Mapping[str, str]) -> "FinFn":
        missing = [x for x in dom if x not in mapping]
        extra = [x for x in mapping if x not in dom]
        if missing or extra:
            raise FinError(f"table keys do not match domain {dom.name}")
        return FinFn(dom, cod, tuple(mapping[x] for x in dom))

    @staticmethod
    def identity(A: FinSet) -> "FinFn":
        return FinFn(A, A, A.elements)

    @staticmethod
    def constant(A: FinSet, B: FinSet, y: str) -> "FinFn":
        return FinFn(A, B, tuple(y for _ in A))

    def __call__(self, x: str) -> str:
        return self.images[self.dom.index(x)]

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.dom.elements, self.images))

    def then(self, other: "FinFn") -> "FinFn":
        """Diagrammatic composite: first self, then other."""
        if self.cod != other.dom:
            raise FinError("composable functions must share the middle set")
        return FinFn(self.dom, other.cod, tuple(other(y) for y in self.images))

    def __rshift__(self, other):
        return self.then(other)

    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def is_surjective(self) -> bool:
        return set(self.images) == set(self.cod.elements)

    def is_bijective(self) -> bool:
        return len(self.dom) == len(self.cod) and self.is_injective()

    def inverse(self) -> "FinFn":
        if not self.is_bijective():
            raise FinError("only bijections have inverses")
        back = {y: x for x, y in zip(self.dom.elements, self.images)}
        return FinFn.from_dict(self.cod, self.dom, back)

    def fibers(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {y: [] for y in self.cod}
        for x, y in zip(self.dom.elements, self.images):
            out[y].append(x)
        return out

    def with_cod(self, cod: FinSet) -> "FinFn":
        return FinFn(self.dom, cod, self.images)

    def __repr__(self):
        body = ", ".join(f"{x}->{y}" for x, y in zip(self.dom.elements, self.images))
        return f"FinFn({self.dom.name} -> {self.cod.name}: {body})"


@dataclass(frozen=True)
class QuotientMap:
    """A partition of ``source`` into classes, each named by its earliest element."""

    source: FinSet
    classes: tuple[tuple[str, ...], ...]

    @property
    def canonical(self) -> dict[tuple[str, ...], str]:
        return {c: c[0] for c in self.classes}

    @property
    def quotient(self) -> FinSet:
        return FinSet(f"{self.source.name}/~", tuple(class_label(c[0]) for c in self.classes))

    def as_fn(self) -> FinFn:
        target = self.quotient
        lookup = {}
        for c in self.classes:
            for x in c:
                lookup[x] = class_label(c[0])
        return FinFn.from_dict(self.source, target, lookup)


class _UnionFind:
    def __init__(self, items: Sequence[str]):
        self.parent = {x: x for x in items}
        self.rank = {x: i for i, x in enumerate(items)}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        # keep the earliest element as root so it becomes the representative
        if self.rank[rx] < self.rank[ry]:
            self.parent[ry] = rx
        else:
            self.parent[rx] = ry


def pullback(f: FinFn, g: FinFn) -> tuple[FinSet, FinFn, FinFn]:
    if f.cod != g.cod:
        raise FinError("pullback needs a cospan with a common codomain")
    by_image = g.fibers()
    labels, left, right = [], [], []
    for a, c in zip(f.dom.elements, f.images):
        for b in by_image[c]:
            labels.append(pair_label(a, b))
            left.append(a)
            right.append(b)
    apex = FinSet(f"{f.dom.name}x{g.dom.name}", tuple(labels))
    return apex, FinFn(apex, f.dom, tuple(left)), FinFn(apex, g.dom, tuple(right))


@lru_cache(maxsize=8192)
def product(A: FinSet, B: FinSet) -> tuple[FinSet, FinFn, FinFn]:
    # memoized: sets compare by elements, so the display name of a cached
    # product may come from an earlier call
    pairs = list(_cartesian(A.elements, B.elements))
    P = FinSet(f"{A.name}x{B.name}", tuple(pair_label(a, b) for a, b in pairs))
    return P, FinFn(P, A, tuple(a for a, _ in pairs)), FinFn(P, B, tuple(b for _, b in pairs))


def product_set(A: FinSet, B: FinSet) -> FinSet:
    return product(A, B)[0]


def pairing(f: FinFn, g: FinFn) -> FinFn:
    """The map x ↦ pair(f x, g x) into the product of the codomains."""
    if f.dom != g.dom:
        raise FinError("pairing needs a common domain")
    P = product_set(f.cod, g.cod)
    return FinFn(f.dom, P, tuple(pair_label(a, b) for a, b in zip(f.images, g.images)))


def product_map(f: FinFn, g: FinFn) -> FinFn:
    src = product_set(f.dom, g.dom)
    tgt = product_set(f.cod, g.cod)
    return FinFn(src, tgt, tuple(pair_label(f(a), g(b)) for a in f.dom for b in g.dom))


def diagonal(A: FinSet) -> FinFn:
    return FinFn(A, product_set(A, A), tuple(pair_label(a, a) for a in A))


def coproduct(A: FinSet, B: FinSet) -> tuple[FinSet, FinFn, FinFn]:
    S = FinSet(f"{A.name}+{B.name}",
               tuple(inl_label(a) for a in A) + tuple(inr_label(b) for b in B))
    return (S, FinFn(A, S, tuple(inl_label(a) for a in A)),
            FinFn(B, S, tuple(inr_label(b) for b in B)))


def coequalizer(f: FinFn, g: FinFn) -> QuotientMap:
    if f.dom != g.dom or f.cod != g.cod:
        raise FinError("coequalizer needs a parallel pair")
    uf = _UnionFind(f.cod.elements)
    for x, y in zip(f.images, g.images):
        uf.union(x, y)
    return quotient_by(f.cod, uf)


def quotient_by(source: FinSet, uf: _UnionFind) -> QuotientMap:
    groups: dict[str, list[str]] = {}
    for x in source:
        groups.setdefault(uf.find(x), []).append(x)
    classes = sorted((tuple(c) for c in groups.values()), key=lambda c: source.index(c[0]))
    return QuotientMap(source, tuple(classes))


def quotient_by_pairs(source: FinSet, pairs: Iterable[tuple[str, str]]) -> QuotientMap:
    """The finest partition of ``source`` identifying each given pair."""
    uf = _UnionFind(source.elements)
    for x, y in pairs:
        uf.union(x, y)
    return quotient_by(source, uf)


def image_factorization(f: FinFn) -> tuple[FinFn, FinFn]:
    hit = set(f.images)
    image = FinSet(f"im({f.dom.name})", tuple(y for y in f.cod if y in hit))
    return FinFn(f.dom, image, f.images), FinFn(image, f.cod, image.elements)


def subset(A: FinSet, keep: Iterable[str], name: str | None = None) -> FinSet:
    keep = set(keep)
    return FinSet(name or A.name, tuple(x for x in A if x in keep))


def all_functions(A: FinSet, B: FinSet) -> Iterable[FinFn]:
    for images in _cartesian(B.elements, repeat=len(A)):
        yield FinFn(A, B, images)


def find_bijection(A: FinSet, B: FinSet,
                   constraints: Sequence[tuple[FinFn, FinFn]] = ()) -> FinFn | None:
    """Search for a bijection φ: A → B compatible with the constraints.

    A constraint ``(p, q)`` is either a pair of maps out of A and B into a
    common set, requiring ``q(φ(a)) = p(a)``, or a pair of maps from a
    common set into A and B, requiring ``φ(p(x)) = q(x)``. Candidates are
    tried in element order, so the answer is deterministic.
    """
    if len(A) != len(B):
        return None
    forced: dict[str, str] = {}
    outgoing = []
    for p, q in constraints:
        if p.dom == A and q.dom == B and p.cod == q.cod:
            outgoing.append((p, q))
        elif p.cod == A and q.cod == B and p.dom == q.dom:
            for x, y in zip(p.images, q.images):
                if forced.setdefault(x, y) != y:
                    return None
        else:
            raise FinError("constraint does not reference A and B")

    def key_of_a(a):
        return tuple(p(a) for p, _ in outgoing)

    def key_of_b(b):
        return tuple(q(b) for _, q in outgoing)

    b_keys = {b: key_of_b(b) for b in B}
    candidates = {}
    for a in A:
        if a in forced:
            b = forced[a]
            candidates[a] = [b] if b_keys[b] == key_of_a(a) else []
        else:
            ka = key_of_a(a)
            candidates[a] = [b for b in B if b_keys[b] == ka]
        if not candidates[a]:
            return None

    order = list(A.elements)
    used: set[str] = set()
    chosen: dict[str, str] = {}
    # iterative backtracking; pos[i] is the next candidate index for order[i]
    pos = [0] * (len(order) + 1)
    i = 0
    while 0 <= i < len(order):
        a = order[i]
        if a in chosen:
            used.discard(chosen.pop(a))
        options = candidates[a]
        while pos[i] < len(options) and options[pos[i]] in used:
            pos[i] += 1
        if pos[i] == len(options):
            pos[i] = 0
            i -= 1
            continue
        b = options[pos[i]]
        pos[i] += 1
        chosen[a] = b
        used.add(b)
        i += 1
    if i < 0:
        return None
    return FinFn.from_dict(A, B, chosen)


def encode_set(A: FinSet) -> dict:
    return {"name": A.name, "elements": list(A.elements)}


def decode_set(data) -> FinSet:
    if isinstance(data, list):
        return finset("_", data)
    if not isinstance(data, dict) or "elements" not in data:
        raise FinError("a set is a list of labels or {name, elements}")
    return finset(str(data.get("name", "_")), data["elements"])


def encode_fn(f: FinFn) -> dict:
    return {"dom": encode_set(f.dom), "cod": encode_set(f.cod), "map": f.as_dict()}


def decode_fn(data) -> FinFn:
    try:
        return FinFn.from_dict(decode_set(data["dom"]), decode_set(data["cod"]),
                               {str(k): str(v) for k, v in data["map"].items()})
    except (KeyError, TypeError, AttributeError) as exc:
        raise FinError(f"malformed function: {exc}") from exc


@lru_cache(maxsize=4096)
def assoc_map(A: FinSet, B: FinSet, C: FinSet) -> FinFn:
    """(A×B)×C → A×(B×C)."""
    src = product_set(product_set(A, B), C)
    tgt = product_set(A, product_set(B, C))
    return FinFn(src, tgt, tuple(pair_label(a, pair_label(b, c))
                                 for a in A for b in B for c in C))


def swap_map(A: FinSet, B: FinSet) -> FinFn:
    src = product_set(A, B)
    tgt = product_set(B, A)
    return FinFn(src, tgt, tuple(pair_label(b, a) for a in A for b in B))
