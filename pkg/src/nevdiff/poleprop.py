"""Pole-order propagation along an integer progression, exactly.

When the benchmark left side equals a plain cubic in w, a pole of order k at
some point forces a pole of order at least (3/2)k one step along the
progression, and so on: pole orders grow geometrically, which pushes the
counting function above K*(3/2)^r and rules the equation out for slowly
growing solutions.  Bounds are kept as exact rationals so the geometric law
is assertable bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from .clunie import DegreeProfile, WrongBenchmark

STEP_RATIO = Fraction(3, 2)  # the quadratic-vs-cubic propagation ratio
MAX_CEILING = 10**400


class Overflow(Exception):
    """The chain outgrew the configured ceiling cap."""


@dataclass(frozen=True)
class PoleChain:
    """Exact lower bounds (3/2)^n * k0 for pole orders along a progression.

    `ceilings` iterates the integer version c_{n+1} = ceil(3 c_n / 2);
    `skipped` lists progression indices where a coefficient degeneracy was
    assumed and the multiplicative step withheld.
    """

    k0: int
    bounds: Tuple[Fraction, ...]
    ceilings: Tuple[int, ...]
    skipped: Tuple[int, ...] = ()

    @property
    def steps(self) -> int:
        return len(self.bounds) - 1


def chain(k0: int, steps: int, *, skip_points: Sequence[int] = (), ratio: Fraction = STEP_RATIO) -> PoleChain:
    """Build the chain of exact bounds and integer ceilings.

    `ratio` other than 3/2 is experimental; the propagation argument holds
    only for the benchmark step ratio.
    """
    if k0 < 1:
        raise ValueError("initial pole order must be at least 1")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    skip = set(skip_points)
    bounds = [Fraction(k0)]
    ceilings = [k0]
    for n in range(1, steps + 1):
        if n in skip:
            bounds.append(bounds[-1])
            ceilings.append(ceilings[-1])
            continue
        bounds.append(bounds[-1] * ratio)
        nxt = -((-ceilings[-1] * ratio.numerator) // ratio.denominator)
        if nxt > MAX_CEILING:
            raise Overflow(f"ceiling exceeds cap at step {n}")
        ceilings.append(nxt)
    return PoleChain(
        k0=k0,
        bounds=tuple(bounds),
        ceilings=tuple(ceilings),
        skipped=tuple(sorted(skip & set(range(1, steps + 1)))),
    )


def counting_lower_bounds(ch: PoleChain, base_radius: float = 1.0) -> Tuple[float, ...]:
    """Lower bounds for the integrated counting function at radius base+n.

    Uses n(t) >= bounds[m] for t >= base+m and integrates dt/t stepwise.
    """
    out = [0.0]
    acc = 0.0
    for m in range(ch.steps):
        step = math.log((base_radius + m + 1) / (base_radius + m))
        acc += float(ch.bounds[m]) * step
        out.append(acc)
    return tuple(out)


def growth_lower_bound(ch: PoleChain, *, base_radius: float = 1.0) -> Tuple[float, float]:
    """Fit (D, K) with the chain's counting bound >= K * D^(base+n) throughout.

    D is the chain's step ratio; K is the largest constant the chain
    supports, so the returned pair re-checks against every chain point.
    """
    if ch.steps < 1:
        n_low = counting_lower_bounds(ch, base_radius)
        d = float(STEP_RATIO)
        k = n_low[-1] / d ** base_radius if n_low[-1] > 0 else 0.0
        return d, k
    d = float(ch.bounds[1] / ch.bounds[0]) if ch.bounds[0] else float(STEP_RATIO)
    if 1 in ch.skipped:
        d = float(STEP_RATIO)
    n_low = counting_lower_bounds(ch, base_radius)
    k = min(
        n_low[n] / d ** (base_radius + n) for n in range(1, ch.steps + 1)
    )
    return d, k


def exclusion_flag(profile: DegreeProfile) -> bool:
    """True when the equation is a plain cubic in w on the right.

    Only meaningful for the benchmark left side: there the chain argument
    applies and forces at least K*(3/2)^r growth, incompatible with the
    slow-growth assumption.
    """
    if (
        profile.lhs_degree != 2
        or profile.lhs_weight != 2
        or profile.lhs_unshifted_degree != 1
        or profile.lhs_valuation != 0
    ):
        raise WrongBenchmark("pole propagation applies only to the benchmark left side")
    return profile.denominator_degree == 0 and profile.numerator_degree == 3


def chain_report_rows(ch: PoleChain, base_radius: float = 1.0) -> Tuple[Tuple[int, str, int, float], ...]:
    """Rows (n, exact bound, ceiling, cumulative counting lower bound)."""
    n_low = counting_lower_bounds(ch, base_radius)
    return tuple(
        (n, str(ch.bounds[n]), ch.ceilings[n], n_low[n]) for n in range(ch.steps + 1)
    )
