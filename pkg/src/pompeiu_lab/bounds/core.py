"""Bound specifications, reports and the evaluation driver."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..expr import DomainError
from ..functionals import PreconditionError
from ..quad import QuadratureError
from .context import BoundContext, MissingContextError, Quantities

CHECK_RTOL = 1e-7
HOLDS, VIOLATED, PRECONDITION_FAILED = "holds", "violated", "precondition_failed"


class UnknownBoundError(KeyError):
    def __str__(self):
        if len(self.args) > 1:
            return f"bound id {self.args[0]!r}: {self.args[1]}"
        return f"unknown bound id {self.args[0]!r}"


OUT_OF_SCOPE = {
    "pecaric_ungar": "the general-p Pecaric-Ungar bound is out of scope; use "
                     "pecaric_ungar_inf, pecaric_ungar_1 or pecaric_ungar_2",
}


@dataclass(frozen=True)
class Precondition:
    name: str
    satisfied: bool
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "satisfied": self.satisfied, "detail": self.detail}


@dataclass(frozen=True)
class Component:
    """One inequality lhs <= rhs that an entry checks."""
    label: str
    lhs: float
    rhs: float

    @property
    def excess(self) -> float:
        return (self.lhs - self.rhs) / (1.0 + abs(self.rhs))

    def holds(self, rtol: float = CHECK_RTOL) -> bool:
        return self.lhs <= self.rhs + rtol * (1.0 + abs(self.rhs))


@dataclass
class BoundReport:
    id: str
    preconditions: List[Precondition]
    lhs: float
    rhs: float
    slack: float
    ratio: Optional[float]
    status: str
    component: Optional[str] = None
    components: List[Component] = field(default_factory=list)
    details: Dict[str, object] = field(default_factory=dict)

    def to_dict(self):
        return {
            "id": self.id,
            "status": self.status,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "ratio": self.ratio,
            "component": self.component,
            "preconditions": [p.to_dict() for p in self.preconditions],
            "components": [{"label": c.label, "lhs": c.lhs, "rhs": c.rhs}
                           for c in self.components],
            "details": self.details,
        }


Predicate = Callable[[BoundContext, Quantities], Precondition]
Evaluator = Callable[[BoundContext, Quantities, dict], List[Component]]


@dataclass(frozen=True)
class BoundSpec:
    id: str
    theorem: str
    lhs_kind: str
    requires: Tuple[str, ...]
    rhs: Evaluator
    profile: str
    sign_check: bool = False
    errata_of: Optional[str] = None
    note: str = ""

    def summary(self) -> dict:
        return {"id": self.id, "theorem": self.theorem, "lhs": self.lhs_kind,
                "requires": list(self.requires), "profile": self.profile,
                "sign_check": self.sign_check, "errata_of": self.errata_of}


PREDICATES: Dict[str, Predicate] = {}
CATALOG: Dict[str, BoundSpec] = {}
ERRATA: Dict[str, BoundSpec] = {}


def predicate(name: str):
    def deco(fn):
        PREDICATES[name] = fn
        return fn
    return deco


def register(spec: BoundSpec):
    table = ERRATA if spec.errata_of else CATALOG
    if spec.id in CATALOG or spec.id in ERRATA:
        raise ValueError(f"duplicate bound id {spec.id}")
    unknown = [r for r in spec.requires if r not in PREDICATES]
    if unknown:
        raise ValueError(f"{spec.id}: unknown predicates {unknown}")
    table[spec.id] = spec
    return spec


def get_spec(bound_id: str) -> BoundSpec:
    if bound_id in CATALOG:
        return CATALOG[bound_id]
    if bound_id in ERRATA:
        return ERRATA[bound_id]
    if bound_id in OUT_OF_SCOPE:
        raise UnknownBoundError(bound_id, OUT_OF_SCOPE[bound_id])
    raise UnknownBoundError(bound_id)


def list_bounds(include_errata: bool = False) -> List[dict]:
    """Catalog summaries in registration order; as-printed variants on request."""
    out = [s.summary() for s in CATALOG.values()]
    if include_errata:
        out += [s.summary() for s in ERRATA.values()]
    return out


def _finish(spec, pres, comps, details):
    if not comps:
        raise ValueError(f"{spec.id}: evaluator returned no components")
    worst = max(comps, key=lambda c: c.excess)
    ok = all(c.holds() for c in comps)
    lhs, rhs = float(worst.lhs), float(worst.rhs)
    ratio = lhs / rhs if rhs > 0 else None
    return BoundReport(spec.id, pres, lhs, rhs, rhs - lhs, ratio,
                       HOLDS if ok else VIOLATED, worst.label, list(comps), details)


def evaluate_bound(bound_id: str, ctx: BoundContext) -> BoundReport:
    """Check preconditions, then compute every component inequality of an entry.

    Missing context data raises MissingContextError; data that is supplied
    but fails verification yields status precondition_failed.
    """
    spec = get_spec(bound_id)
    q = Quantities(ctx)
    pres = []
    for name in spec.requires:
        try:
            pres.append(PREDICATES[name](ctx, q))
        except (PreconditionError, DomainError) as exc:
            pres.append(Precondition(name, False, str(exc)))
    details: dict = {}
    if not all(p.satisfied for p in pres):
        nan = math.nan
        return BoundReport(spec.id, pres, nan, nan, nan, None, PRECONDITION_FAILED,
                           details=details)
    try:
        comps = spec.rhs(ctx, q, details)
    except PreconditionError as exc:
        pres.append(Precondition("evaluation", False, str(exc)))
        nan = math.nan
        return BoundReport(spec.id, pres, nan, nan, nan, None, PRECONDITION_FAILED,
                           details=details)
    for c in comps:
        if not (math.isfinite(c.lhs) and math.isfinite(c.rhs)):
            raise QuadratureError(f"{spec.id}: non-finite value in component {c.label}")
    return _finish(spec, pres, comps, details)


__all__ = [
    "BoundContext", "BoundReport", "BoundSpec", "Component", "Precondition",
    "MissingContextError", "UnknownBoundError", "OUT_OF_SCOPE", "CATALOG", "ERRATA", "PREDICATES",
    "evaluate_bound", "list_bounds", "get_spec", "register", "predicate",
    "HOLDS", "VIOLATED", "PRECONDITION_FAILED", "CHECK_RTOL",
]
