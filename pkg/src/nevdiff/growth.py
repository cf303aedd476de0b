"""Growth-lemma engine: shift-stability scans for log-convex growth data.

For a non-decreasing function T, log-convex in log r, the scans here measure
where the displayed shift inequalities fail on a geometric grid, report the
failure set's densities and logarithmic measure, and certify slow-growth
hypotheses by trend.  Limits are not computable, so each report pairs the
horizon value with a doubling-stability surrogate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

E = math.e


class GrowthError(Exception):
    pass


class TooSmall(GrowthError):
    """T(r) <= e, outside the domain of the log-log window."""


class HypothesisViolation(GrowthError):
    """A monotonicity or convexity requirement fails on the grid."""


# ---------------------------------------------------------------------------
# growth functions


class GrowthFunction:
    """Positive growth data; fast-growing cases work through `log_value`."""

    label = "growth"

    def value(self, r: float) -> float:
        raise NotImplementedError

    def log_value(self, r: float) -> float:
        return math.log(self.value(r))


@dataclass(frozen=True)
class PowerGrowth(GrowthFunction):
    rho: float

    def value(self, r: float) -> float:
        return r**self.rho

    def log_value(self, r: float) -> float:
        return self.rho * math.log(r)

    @property
    def label(self) -> str:
        return f"power:{self.rho:g}"


@dataclass(frozen=True)
class ExpRootGrowth(GrowthFunction):
    """T(r) = scale * exp(r^alpha)."""

    alpha: float
    scale: float = 1.0

    def value(self, r: float) -> float:
        return self.scale * math.exp(r**self.alpha)

    def log_value(self, r: float) -> float:
        return math.log(self.scale) + r**self.alpha

    @property
    def label(self) -> str:
        return f"exproot:{self.alpha:g}"


@dataclass(frozen=True)
class PureExpGrowth(GrowthFunction):
    def value(self, r: float) -> float:
        return math.exp(r)

    def log_value(self, r: float) -> float:
        return r

    label = "exp"


@dataclass(frozen=True)
class CompositeGrowth(GrowthFunction):
    mode: str  # "max" or "sum"
    parts: Tuple[GrowthFunction, ...]

    def value(self, r: float) -> float:
        vals = [p.value(r) for p in self.parts]
        return max(vals) if self.mode == "max" else sum(vals)

    def log_value(self, r: float) -> float:
        logs = [p.log_value(r) for p in self.parts]
        top = max(logs)
        if self.mode == "max":
            return top
        return top + math.log(math.fsum(math.exp(v - top) for v in logs))

    @property
    def label(self) -> str:
        return self.mode + "(" + ",".join(p.label for p in self.parts) + ")"


class SampledGrowth(GrowthFunction):
    """Tabulated growth data with log-log interpolation.

    The table is repaired to a non-decreasing envelope; a repair beyond
    1e-9 relative is an error, as is a midpoint convexity defect in log r
    beyond the same tolerance.
    """

    label = "sampled"
    REPAIR_TOL = 1e-9

    def __init__(self, grid: Sequence[float], values: Sequence[float]):
        g = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or len(g) < 2:
            raise ValueError("grid and values must be 1-d and aligned")
        if not np.all(np.diff(g) > 0):
            raise ValueError("grid radii must be strictly increasing")
        if np.any(v <= 0):
            raise ValueError("growth values must be positive")
        envelope = np.maximum.accumulate(v)
        repair = np.max((envelope - v) / np.maximum(v, 1e-300))
        if repair > self.REPAIR_TOL:
            raise HypothesisViolation(
                f"monotone repair of {repair:.3e} exceeds {self.REPAIR_TOL:.0e}"
            )
        self.grid = g
        self.values = envelope
        self._log_r = np.log(g)
        self._check_convexity()

    def _check_convexity(self) -> None:
        s, v = self._log_r, self.values
        if len(s) < 3:
            return
        lam = (s[1:-1] - s[:-2]) / (s[2:] - s[:-2])
        chord = v[:-2] * (1 - lam) + v[2:] * lam
        defect = np.max((v[1:-1] - chord) / np.maximum(np.abs(chord), 1e-300))
        if defect > self.REPAIR_TOL:
            raise HypothesisViolation(
                f"convexity defect {defect:.3e} in log r exceeds tolerance"
            )

    def value(self, r: float) -> float:
        if r <= self.grid[0]:
            return float(self.values[0])
        if r >= self.grid[-1]:
            return float(self.values[-1])
        x = math.log(r)
        k = int(np.searchsorted(self._log_r, x) - 1)
        x0, x1 = self._log_r[k], self._log_r[k + 1]
        t = (x - x0) / (x1 - x0)
        # interpolate the values linearly in log r (convexity-safe)
        return float(self.values[k] * (1 - t) + self.values[k + 1] * t)


def sampled_from_function(
    fn: Callable[[float], float], r_min: float, r_max: float, ratio: float = 1.01
) -> SampledGrowth:
    grid = geometric_grid(r_min, r_max, ratio)
    return SampledGrowth(grid, [fn(r) for r in grid])


def geometric_grid(r_min: float, r_max: float, ratio: float) -> List[float]:
    if ratio <= 1:
        raise ValueError("grid ratio must exceed 1")
    out = []
    r = r_min
    while r < r_max:
        out.append(r)
        r *= ratio
    out.append(r_max)
    return out


# ---------------------------------------------------------------------------
# exception sets and densities


@dataclass(frozen=True)
class ExceptionSet:
    intervals: Tuple[Tuple[float, float], ...]
    horizon: float

    def __post_init__(self):
        prev = 1.0
        for a, b in self.intervals:
            if a < prev - 1e-12 or b < a or b > self.horizon + 1e-9:
                raise ValueError("intervals must be disjoint, ordered, within horizon")
            prev = b

    @property
    def is_empty(self) -> bool:
        return not self.intervals


@dataclass(frozen=True)
class DensityReport:
    lower_density: float
    upper_density: float
    linear_measure: float
    log_measure: float


def exception_set_from_grid(
    grid: Sequence[float], failing: Sequence[bool], horizon: float
) -> ExceptionSet:
    """Failing grid points cover their grid cell; adjacent cells merge."""
    intervals: List[Tuple[float, float]] = []
    for k, bad in enumerate(failing):
        if not bad:
            continue
        a = grid[k]
        b = grid[k + 1] if k + 1 < len(grid) else horizon
        b = min(b, horizon)
        if intervals and a <= intervals[-1][1] + 1e-12:
            intervals[-1] = (intervals[-1][0], max(intervals[-1][1], b))
        else:
            intervals.append((a, b))
    return ExceptionSet(tuple(intervals), horizon)


def linear_measure(es: ExceptionSet) -> float:
    return math.fsum(b - a for a, b in es.intervals)


def log_measure(es: ExceptionSet) -> float:
    return math.fsum(math.log(b / a) for a, b in es.intervals if a > 0)


def _measure_up_to(es: ExceptionSet, r: float) -> float:
    return math.fsum(min(b, r) - a for a, b in es.intervals if a < r)


def densities(es: ExceptionSet) -> DensityReport:
    """Density estimates at the horizon.

    The liminf/limsup surrogates are the extremes of |E ∩ [1,r]| / r over
    the top half [horizon/2, horizon]; the true limits need r -> oo, so
    callers pair this with a doubling-stability check.
    """
    horizon = es.horizon
    window_lo = max(1.0, horizon / 2)
    probes = {window_lo, horizon}
    for a, b in es.intervals:
        for p in (a, b):
            if window_lo <= p <= horizon:
                probes.add(p)
    vals = [( _measure_up_to(es, r) / r) for r in sorted(probes)]
    return DensityReport(
        lower_density=min(vals),
        upper_density=max(vals),
        linear_measure=linear_measure(es),
        log_measure=log_measure(es),
    )


# ---------------------------------------------------------------------------
# shift-window functionals


def phi(T: GrowthFunction, r: float, *, grid_ratio: float = 1.0005) -> float:
    """Running maximum of t / max(1, log T(t)) over [1, r]."""
    if r < 1:
        raise ValueError("phi is defined on [1, oo)")
    best = 0.0
    for t in geometric_grid(1.0, r, grid_ratio):
        v = t / max(1.0, T.log_value(t))
        if v > best:
            best = v
    return best


def phi_eps(T: GrowthFunction, eps: float, r: float) -> float:
    """r / ((log log T(r))^(1+eps) * log T(r)); needs T(r) > e."""
    lt = T.log_value(r)
    if lt <= 1.0:
        raise TooSmall(f"T({r:g}) <= e")
    return r / (math.log(lt) ** (1.0 + eps) * lt)


# ---------------------------------------------------------------------------
# scans


@dataclass(frozen=True)
class ScanRow:
    r: float
    lhs: float
    rhs: float
    ok: bool


@dataclass(frozen=True)
class ScanResult:
    rows: Tuple[ScanRow, ...]
    exceptions: ExceptionSet
    report: DensityReport
    skipped: Tuple[float, ...]  # grid points where a guard failed
    window_divergent: bool  # does the shift window grow along the grid?
    certified: bool

    def as_tuple(self) -> Tuple[ExceptionSet, DensityReport]:
        return self.exceptions, self.report


def scan_additive_shift(
    T: GrowthFunction,
    delta: float,
    horizon: float,
    *,
    grid_ratio: float = 1.01,
    r_min: float = 1.0,
) -> ScanResult:
    """Check T(r + window^delta) <= T(r) + 4*window^(delta-1/2)*T(r).

    The window is the running max of t/max(1, log T(t)).  Certification of a
    vanishing failure density additionally requires the window to diverge
    along the grid, which is the testable face of the slow-growth
    hypothesis; a bounded window (e.g. T = e^r) must not certify.
    """
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    grid = geometric_grid(max(1.0, r_min), horizon, grid_ratio)
    rows: List[ScanRow] = []
    failing: List[bool] = []
    best = 0.0
    window_at: List[float] = []
    for r in grid:
        best = max(best, r / max(1.0, T.log_value(r)))
        window_at.append(best)
        log_lhs = T.log_value(r + best**delta)
        log_rhs = T.log_value(r) + math.log1p(4.0 * best ** (delta - 0.5))
        ok = log_lhs <= log_rhs
        rows.append(ScanRow(r, log_lhs, log_rhs, ok))
        failing.append(not ok)
    es = exception_set_from_grid(grid, failing, horizon)
    rep = densities(es)
    divergent = _window_divergent(grid, window_at)
    return ScanResult(
        rows=tuple(rows),
        exceptions=es,
        report=rep,
        skipped=(),
        window_divergent=divergent,
        certified=divergent and rep.lower_density <= 0.05,
    )


def _window_divergent(grid: Sequence[float], window: Sequence[float]) -> bool:
    # compare the window at the horizon against its value a quarter through
    k = max(0, len(grid) // 4)
    return window[-1] >= 2.0 * window[k] and window[-1] > 4.0


def scan_windowed_shift(
    T: GrowthFunction,
    delta: float,
    eps: float,
    horizon: float,
    *,
    grid_ratio: float = 1.01,
    r_min: float = 1.0,
) -> ScanResult:
    """Check both T(r + window^delta) <= T(r)*(1 + 4e*window^(delta-1)) and
    T(r + window) <= e*T(r) for the log-log window.

    Grid points where T(r) <= e, window <= 2^(1/(1-delta)) or window >= r are
    guard failures of the lemma and recorded as skipped, not failures.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    grid = geometric_grid(max(1.0, r_min), horizon, grid_ratio)
    guard = 2.0 ** (1.0 / (1.0 - delta))
    rows: List[ScanRow] = []
    failing: List[bool] = []
    skipped: List[float] = []
    for r in grid:
        try:
            w = phi_eps(T, eps, r)
        except TooSmall:
            skipped.append(r)
            failing.append(False)
            continue
        if w <= guard or w >= r:
            skipped.append(r)
            failing.append(False)
            continue
        gap1 = T.log_value(r + w**delta) - T.log_value(r) - math.log1p(
            4.0 * E * w ** (delta - 1.0)
        )
        gap2 = T.log_value(r + w) - T.log_value(r) - 1.0
        ok = gap1 <= 0 and gap2 <= 0
        rows.append(ScanRow(r, max(gap1, gap2), 0.0, ok))
        failing.append(not ok)
    es = exception_set_from_grid(grid, failing, horizon)
    rep = densities(es)
    divergent = _loglog_pressure_decays(T, eps, grid)
    return ScanResult(
        rows=tuple(rows),
        exceptions=es,
        report=rep,
        skipped=tuple(skipped),
        window_divergent=divergent,
        certified=divergent and rep.log_measure < math.inf,
    )


def _loglog_pressure_decays(T: GrowthFunction, eps: float, grid: Sequence[float]) -> bool:
    # testable face of the hypothesis (log r)^(1+eps) log T(r) / r -> 0
    def pressure(r: float) -> Optional[float]:
        lt = T.log_value(r)
        if lt <= 1.0:
            return None
        return math.log(r) ** (1.0 + eps) * lt / r

    probes = [pressure(r) for r in grid]
    probes = [p for p in probes if p is not None]
    if len(probes) < 4:
        return False
    quarter = probes[len(probes) // 4]
    return probes[-1] <= 0.5 * quarter


def scan_fixed_shift(
    T: GrowthFunction,
    h: float,
    K: float,
    horizon: float,
    *,
    grid_ratio: float = 1.01,
    r_min: float = 1.0,
) -> ScanResult:
    """Finite-order branch: T(r+h) <= T(r) + 4*h*K*T(r)/r with caller's K."""
    grid = geometric_grid(max(1.0, r_min), horizon, grid_ratio)
    rows = []
    failing = []
    for r in grid:
        log_lhs = T.log_value(r + h)
        log_rhs = T.log_value(r) + math.log1p(4.0 * h * K / r)
        ok = log_lhs <= log_rhs
        rows.append(ScanRow(r, log_lhs, log_rhs, ok))
        failing.append(not ok)
    es = exception_set_from_grid(grid, failing, horizon)
    rep = densities(es)
    return ScanResult(tuple(rows), es, rep, (), True, rep.log_measure < math.inf)


# ---------------------------------------------------------------------------
# covering bound for slow landings (classical Edrei–Fuchs lemma)


@dataclass(frozen=True)
class CoveringBound:
    measured: float
    bound: float
    rows: Tuple[ScanRow, ...]


def edrei_fuchs_bound(
    psi: Callable[[float], float],
    varphi: Callable[[float], float],
    a: float,
    A: float,
    *,
    grid_ratio: float = 1.005,
    quad_rel_tol: float = 1e-6,
) -> CoveringBound:
    """Measure {r in [a, A]: psi(r + varphi(psi(r))) >= psi(r) + 1} and bound
    it by the integral of varphi over [psi(a)-1, psi(A)].

    psi must be non-decreasing and varphi non-increasing on the scanned
    range (checked on the grid).
    """
    if not a < A:
        raise ValueError("need a < A")
    grid = geometric_grid(a, A, grid_ratio)
    psi_vals = [psi(r) for r in grid]
    for x, y in zip(psi_vals, psi_vals[1:]):
        if y < x - 1e-12 * max(1.0, abs(x)):
            raise HypothesisViolation("psi must be non-decreasing")
    phis = [varphi(v) for v in psi_vals]
    for x, y in zip(phis, phis[1:]):
        if y > x + 1e-12 * max(1.0, abs(x)):
            raise HypothesisViolation("varphi must be non-increasing along psi")

    def lands_slow(r: float) -> bool:
        p = psi(r)
        return psi(r + varphi(p)) >= p + 1.0

    flags = [lands_slow(r) for r in grid]
    measured = 0.0
    rows = []
    for k in range(len(grid) - 1):
        lo, hi = grid[k], grid[k + 1]
        fl, fr = flags[k], flags[k + 1]
        if fl and fr:
            measured += hi - lo
        elif fl != fr:
            # refine the transition point by bisection
            x0, x1 = lo, hi
            for _ in range(60):
                mid = 0.5 * (x0 + x1)
                if lands_slow(mid) == fl:
                    x0 = mid
                else:
                    x1 = mid
            measured += (x0 - lo) if fl else (hi - x1)
        rows.append(ScanRow(lo, 1.0 if fl else 0.0, 1.0, True))
    bound = _integrate(varphi, psi_vals[0] - 1.0, psi_vals[-1], quad_rel_tol)
    return CoveringBound(measured=measured, bound=bound, rows=tuple(rows))


def _integrate(f: Callable[[float], float], lo: float, hi: float, rel_tol: float) -> float:
    if hi <= lo:
        return 0.0

    def simpson(x0: float, x2: float, f0: float, f1: float, f2: float) -> float:
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    total = 0.0
    stack = [(lo, hi, f(lo), f(0.5 * (lo + hi)), f(hi), 40)]
    while stack:
        x0, x2, f0, f1, f2, depth = stack.pop()
        xm = 0.5 * (x0 + x2)
        xl, xr = 0.5 * (x0 + xm), 0.5 * (xm + x2)
        fl, fr = f(xl), f(xr)
        whole = simpson(x0, x2, f0, f1, f2)
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * rel_tol * max(
            abs(left + right), 1e-300
        ):
            total += left + right + (left + right - whole) / 15.0
        else:
            stack.append((x0, xm, f0, fl, f1, depth - 1))
            stack.append((xm, x2, f1, fr, f2, depth - 1))
    return total


# ---------------------------------------------------------------------------
# ratio diagnostics for counting data


@dataclass(frozen=True)
class RatioTrend:
    factor: float
    min_ratio: float
    plausible: bool
    boundary: bool
    rows: Tuple[ScanRow, ...]


def scan_shift_ratio(
    N: GrowthFunction, d: float, horizon: float, *, grid_ratio: float = 1.2, r_min: float = 2.0
) -> RatioTrend:
    """Diagnostic: does N(d*r)/N(r) stay >= d on a geometric grid?

    A ratio pinned at d is flagged as a boundary case; a ratio below d means
    the varying-shift hypothesis fails for this data.
    """
    if d <= 1:
        raise ValueError("the ratio factor must exceed 1")
    grid = geometric_grid(r_min, horizon, grid_ratio)
    rows = []
    worst = math.inf
    for r in grid:
        gap = N.log_value(d * r) - N.log_value(r)
        ratio = math.exp(min(gap, 700.0))
        worst = min(worst, ratio)
        rows.append(ScanRow(r, ratio, d, ratio >= d - 1e-12))
    plausible = worst >= d - 1e-9
    boundary = plausible and worst <= d + 1e-9
    return RatioTrend(
        factor=d, min_ratio=worst, plausible=plausible, boundary=boundary, rows=tuple(rows)
    )
