"""Deliberately broken structures, used to exercise the failure paths.

Each corruption keeps every square well framed, so the checkers have to
catch it through a violated equation rather than a malformed input.
"""
from __future__ import annotations

from .doublecore import CartesianWitness
from .finkit import FinFn, FinSet, product_set
from .functors import (SPAN, _exponential, exp_counit, exponential_adjunction, projection,
                       span_transformation, strong_span_functor, times)
from .lawsuite import FramedTransformationData, identity_functor
from .spaninst import Span, SpanInstance, SpanSquare


def _parallel_pair(M: Span, among) -> tuple[str, str] | None:
    """Two distinct apex elements of M with the same legs, both in ``among``."""
    seen: dict[tuple[str, str], str] = {}
    for y in M.apex:
        if y not in among:
            continue
        legs = M.legs(y)
        if legs in seen:
            return seen[legs], y
        seen[legs] = y
    return None


def swap_parallel(a: SpanSquare) -> SpanSquare:
    """Post-compose a with the automorphism of its target that swaps the
    first parallel pair of apex elements it hits; a itself if none."""
    pair = _parallel_pair(a.tgt, set(a.h.images))
    if pair is None:
        return a
    y1, y2 = pair
    swap = {y1: y2, y2: y1}
    return SpanSquare(a.src, a.tgt, a.left_arrow, a.right_arrow,
                      FinFn(a.h.dom, a.h.cod, tuple(swap.get(y, y) for y in a.h.images)))


class TwistedAssociatorSpan(SpanInstance):
    """Span whose associator is twisted by an automorphism where possible."""

    name = "span+twisted-associator"

    def assoc(self, M, N, P):
        return swap_parallel(super().assoc(M, N, P))


class DuplicatedRestrictionSpan(SpanInstance):
    """Span whose chosen restrictions carry a duplicate of every element,
    so the restriction squares are no longer cartesian."""

    name = "span+duplicated-restriction"

    def restrict(self, f, M, g):
        cell, witness = super().restrict(f, M, g)
        sq = witness.square
        legs = {}
        images = []
        for x in cell.apex:
            legs[x] = cell.legs(x)
            legs[x + "~"] = cell.legs(x)
            images += [sq.h(x), sq.h(x)]
        fat = Span.make(cell.left_frame, cell.right_frame, legs, cell.apex.name)
        fat_sq = SpanSquare(fat, sq.tgt, sq.left_arrow, sq.right_arrow,
                            FinFn(fat.apex, sq.tgt.apex, tuple(images)))
        return fat, CartesianWitness(fat_sq, "cartesian")


def twisted_counit_adjunction(S: FinSet):
    """Span(- × S) ⊣ Span((-)^S) with ε_B(φ, s) = φ(σ s) for a swap σ of S.

    ε stays a framed transformation, but the triangle identities fail.
    """
    F, G, eta, eps = exponential_adjunction(S)
    sigma = dict(zip(S.elements, reversed(S.elements)))

    def component(B):
        E, fns = _exponential(S, B)
        return FinFn(product_set(E, S), B, tuple(g(sigma[s]) for g in fns for s in S))

    def eps_cell(P):
        return SpanSquare(eps.source.on_cell(P), P, component(P.left_frame),
                          component(P.right_frame), component(P.apex))

    bad = FramedTransformationData(f"twisted({exp_counit(S).name})", eps.source, eps.target,
                                   component, eps_cell)
    return F, G, eta, bad


def swapped_projection(S: FinSet) -> FramedTransformationData:
    """Span(proj) whose cell components are post-composed with a swap of
    parallel apex elements: each component is a valid square, naturality is not."""
    F, G = strong_span_functor(times(S)), identity_functor(SPAN)
    good = span_transformation(projection(S), F, G)
    return FramedTransformationData(f"swapped({good.name})", F, G, good.on_object,
                                    lambda M: swap_parallel(good.on_cell(M)))


__all__ = ["DuplicatedRestrictionSpan", "TwistedAssociatorSpan", "swap_parallel",
           "swapped_projection", "twisted_counit_adjunction"]
