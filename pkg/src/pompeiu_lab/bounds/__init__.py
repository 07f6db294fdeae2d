"""Catalog of Chebyshev, Gruss and Pompeiu type bounds with precondition checks."""
from __future__ import annotations

from typing import Optional

from ..quad import FunctionLike, Interval
from . import predicates  # noqa: F401  (registers predicates)
from . import catalog  # noqa: F401  (registers entries)
from . import errata  # noqa: F401
from .context import BoundContext, MissingContextError, Quantities
from .core import (CATALOG, CHECK_RTOL, ERRATA, HOLDS, PRECONDITION_FAILED, PREDICATES,
                   VIOLATED, BoundReport, BoundSpec, Component, Precondition,
                   UnknownBoundError, evaluate_bound, get_spec, list_bounds)


def check_positivity(f: FunctionLike, g: FunctionLike, h: Optional[FunctionLike] = None,
                     iv: Interval = Interval(1.0, 2.0), env=None) -> BoundReport:
    """Sign check of P_h(f, g) from the h-monotonicity classes of f and g.

    Same class means P_h(f, g) >= 0, opposite classes mean P_h(f, g) <= 0.
    ``h`` defaults to x.
    """
    return evaluate_bound("positivity", BoundContext(f, g, h, iv, env or {}))


__all__ = [
    "BoundContext", "BoundReport", "BoundSpec", "Component", "Precondition", "Quantities",
    "MissingContextError", "UnknownBoundError", "CATALOG", "ERRATA", "PREDICATES",
    "HOLDS", "VIOLATED", "PRECONDITION_FAILED", "CHECK_RTOL",
    "check_positivity", "evaluate_bound", "get_spec", "list_bounds",
]
