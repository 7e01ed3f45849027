"""PTS signatures: sorts, axioms, product rules, and the two stock systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .terms import BOX, STAR, TRIANGLE, Sort


@dataclass(frozen=True, eq=False)
class PtsSpec:
    """A pure type system signature.

    ``rules`` maps (s1, s2) to s3; the common binary notation (s1, s2) is the
    triple (s1, s2, s2).  Both stock systems are functional: at most one axiom
    per sort and one rule per pair, which keeps type inference deterministic.
    """

    name: str
    sorts: frozenset[Sort]
    axioms: Mapping[Sort, Sort]
    rules: Mapping[tuple[Sort, Sort], Sort] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for s, s2 in self.axioms.items():
            assert s in self.sorts and s2 in self.sorts
        for (s1, s2), s3 in self.rules.items():
            assert s1 in self.sorts and s2 in self.sorts and s3 in self.sorts


def axiom_of(spec: PtsSpec, s: Sort) -> Optional[Sort]:
    """The unique sort typing ``s``, or None (the top sort has no axiom)."""
    return spec.axioms.get(s)


def rule_of(spec: PtsSpec, s1: Sort, s2: Sort) -> Optional[Sort]:
    """The sort of a product whose domain lives in s1 and codomain in s2."""
    return spec.rules.get((s1, s2))


def _binary(*pairs: tuple[Sort, Sort]) -> dict[tuple[Sort, Sort], Sort]:
    return {(s1, s2): s2 for s1, s2 in pairs}


LAMBDA_HOL = PtsSpec(
    name="lambda-hol",
    sorts=frozenset((STAR, BOX, TRIANGLE)),
    axioms={STAR: BOX, BOX: TRIANGLE},
    rules=_binary((STAR, STAR), (BOX, BOX), (BOX, STAR)),
)

LAMBDA_U_MINUS = PtsSpec(
    name="lambda-u-minus",
    sorts=frozenset((STAR, BOX, TRIANGLE)),
    axioms={STAR: BOX, BOX: TRIANGLE},
    rules=_binary((STAR, STAR), (BOX, BOX), (BOX, STAR), (TRIANGLE, BOX)),
)

PRESETS: dict[str, PtsSpec] = {
    LAMBDA_HOL.name: LAMBDA_HOL,
    LAMBDA_U_MINUS.name: LAMBDA_U_MINUS,
}


def empty_custom(name: str = "custom") -> PtsSpec:
    """Starting point for file-declared systems: all sorts, no axioms/rules."""
    return PtsSpec(name=name, sorts=frozenset((STAR, BOX, TRIANGLE)), axioms={}, rules={})


def with_axiom(spec: PtsSpec, s: Sort, s2: Sort) -> PtsSpec:
    axioms = dict(spec.axioms)
    axioms[s] = s2
    return PtsSpec(spec.name, spec.sorts, axioms, spec.rules)


def with_rule(spec: PtsSpec, s1: Sort, s2: Sort, s3: Sort) -> PtsSpec:
    rules = dict(spec.rules)
    rules[(s1, s2)] = s3
    return PtsSpec(spec.name, spec.sorts, spec.axioms, rules)
