"""Sample-complexity bounds: how far empirical frequencies may drift from
true ones, given a (empirical) VC-dimension bound on the range set."""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

from .errors import ParameterError

DEFAULT_C = 0.5


def _integer(x, name, minimum):
    try:
        value = operator.index(x)
    except TypeError:
        raise ParameterError(f"{name} must be an integer, got {x!r}") from None
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


def _check(ell, delta):
    _integer(ell, "sample size", 1)
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")


def _check_d(d):
    _integer(d, "d", 0)


def epsilon_vc(d: int, ell: int, delta: float, c: float = DEFAULT_C) -> float:
    """sqrt((c / ell) * (d + ln(1 / delta))) for a VC-dimension bound ``d``."""
    _check_d(d)
    _check(ell, delta)
    if not c > 0:
        raise ParameterError(f"c must be positive, got {c}")
    return math.sqrt(c / ell * (d + math.log(1.0 / delta)))


def epsilon_evc(d: int, ell: int, delta: float) -> float:
    """2 sqrt(2 d ln(ell + 1) / ell) + sqrt(2 ln(2 / delta) / ell) for an
    empirical VC-dimension bound ``d`` on the sample itself."""
    _check_d(d)
    _check(ell, delta)
    return 2.0 * math.sqrt(2.0 * d * math.log1p(ell) / ell) + math.sqrt(
        2.0 * math.log(2.0 / delta) / ell
    )


def epsilon_min(eps_candidates) -> float:
    eps = list(eps_candidates)
    if not eps:
        raise ParameterError("no epsilon candidates")
    if any(not e > 0 for e in eps):
        raise ParameterError("epsilon candidates must be positive")
    return min(eps)


def vc_bound_powerset(num_items: int) -> int:
    """VC-dimension bound for the ranges of all itemsets over ``num_items`` items."""
    if num_items < 1:
        raise ParameterError("need at least one item")
    return num_items - 1


@dataclass(frozen=True)
class EpsilonResult:
    eps_vc: float | None
    eps_evc: float | None
    eps: float
    d_vc: int | None
    d_evc: int | None
    ell: int
    delta: float
    c: float

    @property
    def provenance(self) -> str:
        """Which bound attains the minimum: ``vc``, ``evc`` or ``both``."""
        hits = [
            name
            for name, value in (("vc", self.eps_vc), ("evc", self.eps_evc))
            if value is not None and value == self.eps
        ]
        return "both" if len(hits) == 2 else hits[0]

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "eps_vc": self.eps_vc,
            "eps_evc": self.eps_evc,
            "d_vc": self.d_vc,
            "d_evc": self.d_evc,
            "sample_size": self.ell,
            "delta": self.delta,
            "c": self.c,
            "provenance": self.provenance,
        }


def epsilon_from_bounds(d_vc, d_evc, ell: int, delta: float, c: float = DEFAULT_C) -> EpsilonResult:
    """Combine whichever of the two bounds are available (pass ``None`` to skip)."""
    if d_vc is None and d_evc is None:
        raise ParameterError("at least one dimension bound is required")
    e_vc = epsilon_vc(d_vc, ell, delta, c) if d_vc is not None else None
    e_evc = epsilon_evc(d_evc, ell, delta) if d_evc is not None else None
    eps = epsilon_min(e for e in (e_vc, e_evc) if e is not None)
    return EpsilonResult(e_vc, e_evc, eps, d_vc, d_evc, ell, delta, c)
