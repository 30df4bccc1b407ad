"""Named instances, functors, transformations, adjunctions and equivalences.

The CLI looks subjects up here by name; every entry is a zero-argument
builder so nothing is constructed until it is asked for.
"""
from __future__ import annotations

from .faults import (DuplicatedRestrictionSpan, TwistedAssociatorSpan, swapped_projection,
                     twisted_counit_adjunction)
from .fibcon import ARR, FAM, FrInstance
from .finkit import FinError, FinSet
from .functors import (IDENTITY, INL, PLUS_ONE, POWERSET, SINGLETON, SPAN, comparison_choices,
                       comparison_functor, constants, exponential_adjunction, identity_choices,
                       power, projection, rel_functor, span_functor, span_transformation,
                       strong_span_functor, times)
from .lawsuite import identity_functor, identity_transformation
from .matinst import MatInstance
from .modcon import ModInstance
from .spaninst import SpanInstance

S2 = FinSet("S", ("s1", "s2"))

INSTANCES = {
    "span": SpanInstance,
    "mat": MatInstance,
    "mod-span": lambda: ModInstance(SpanInstance()),
    "mod-mat": lambda: ModInstance(MatInstance()),
    "fr-arr": lambda: FrInstance(ARR),
    "fr-fam": lambda: FrInstance(FAM),
}

# corrupted variants, selected through a workspace's metadata
FAULTY_INSTANCES = {
    "twisted-associator": TwistedAssociatorSpan,
    "duplicated-restriction": DuplicatedRestrictionSpan,
}

FUNCTORS = {
    "span-powerset": lambda: span_functor(POWERSET),
    "span-times": lambda: span_functor(times(S2)),
    "span-times-strong": lambda: strong_span_functor(times(S2)),
    "span-power": lambda: strong_span_functor(power(S2)),
    "span-plus-one": lambda: strong_span_functor(PLUS_ONE),
    "span-identity": lambda: identity_functor(SPAN),
    "rel": rel_functor,
    "compare-arr": lambda: comparison_functor(FrInstance(ARR)),
    "compare-fam": lambda: comparison_functor(FrInstance(FAM)),
}


def _span_trans(alpha, F, G, strong=True):
    make = strong_span_functor if strong else span_functor
    return lambda: span_transformation(alpha(), make(F()), make(G()))


TRANSFORMATIONS = {
    "span-inl": _span_trans(lambda: INL, lambda: IDENTITY, lambda: PLUS_ONE),
    "span-projection": _span_trans(lambda: projection(S2), lambda: times(S2), lambda: IDENTITY),
    "span-constants": _span_trans(lambda: constants(S2), lambda: IDENTITY, lambda: power(S2)),
    "span-singleton": _span_trans(lambda: SINGLETON, lambda: IDENTITY, lambda: POWERSET,
                                  strong=False),
    "rel-identity": lambda: identity_transformation(rel_functor()),
    "corrupt-projection": lambda: swapped_projection(S2),
}


def _identity_adjunction():
    I = identity_functor(SPAN)
    return I, I, identity_transformation(I), identity_transformation(I)


ADJUNCTIONS = {
    "exponential": lambda: exponential_adjunction(S2),
    "identity": _identity_adjunction,
    "corrupt-counit": lambda: twisted_counit_adjunction(S2),
}


def _comparison(phi):
    def build():
        fr = FrInstance(phi)
        return comparison_functor(fr), comparison_choices(fr)
    return build


EQUIVALENCES = {
    "compare-arr": _comparison(ARR),
    "compare-fam": _comparison(FAM),
    "span-identity": lambda: (identity_functor(SPAN), identity_choices(SPAN)),
    "rel": lambda: (rel_functor(), None),
}


def lookup(table: dict, kind: str, name: str | None):
    if name is None:
        raise FinError(f"a {kind} name is required; known: {', '.join(sorted(table))}")
    try:
        return table[name]()
    except KeyError:
        raise FinError(f"unknown {kind} {name!r}; known: {', '.join(sorted(table))}") from None


def instance(name: str, fault: str | None = None):
    if fault is not None:
        if name != "span":
            raise FinError(f"fault {fault!r} is only defined for the span instance")
        return lookup(FAULTY_INSTANCES, "fault", fault)
    return lookup(INSTANCES, "instance", name)
