"""Classification of Clunie-type equations by exact degree bookkeeping.

Given `denominator * lhs = numerator` with a homogeneous difference
polynomial on the left and plain polynomials in w on the right, the degree
data of the three parts decides how dense the poles and zeros of any
admissible slowly-growing meromorphic solution must be.  This module
computes that degree data, tests the admissibility inequality, derives the
value-distribution verdict, enumerates all maximal equation families for a
given left side, and applies the three growth-based exclusion rules that cut
the benchmark list from 14 families to 9.

Every quantity here is an exact integer or rational; conclusions are always
modulo small-function error terms, under the slow-growth assumption carried
as an explicit token (never evaluated).
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import diffpoly as dp
from .diffpoly import DiffPolynomial
from .eqparse import ClunieEquation, parse_polynomial, poly_text


class ClunieError(Exception):
    pass


class HypothesesViolated(ClunieError):
    def __init__(self, violations: Sequence[str]):
        super().__init__("hypotheses violated: " + ", ".join(violations))
        self.violations = tuple(violations)


class NotAdmissible(ClunieError):
    pass


class WrongBenchmark(ClunieError):
    """The reduction rules apply only to the benchmark left side."""


class GrowthAssumption(enum.Enum):
    """Assumption token for the solution's growth; never evaluated."""

    MINIMAL_HYPER_TYPE = "minimal-hyper-type"


# Exclusion reason tags.
DEGREE_BOUND = "degree-bound"
CUBIC_RHS_GROWTH = "cubic-rhs-growth"
DENOMINATOR_REWRITE = "denominator-rewrite"
CUBIC_NUMERATOR_PROXIMITY = "cubic-numerator-proximity"


@dataclass(frozen=True)
class DegreeProfile:
    """All degree functionals of one equation.

    `reduced_degree` is the total degree in w of the rational function
    obtained by moving the full lhs power of w to the right side;
    `pole_margin` and `zero_margin` are its excesses over the lhs total
    degree and the lhs weight, and drive the two density conclusions.
    """

    lhs_degree: int
    lhs_weight: int
    lhs_shifted_degree: int
    lhs_unshifted_degree: int
    lhs_valuation: int
    denominator_degree: int
    numerator_degree: int
    numerator_valuation: int
    reduced_degree: int
    pole_margin: int
    zero_margin: int

    @staticmethod
    def from_counts(
        lhs_degree: int,
        lhs_weight: int,
        lhs_shifted_degree: int,
        lhs_unshifted_degree: int,
        lhs_valuation: int,
        denominator_degree: int,
        numerator_degree: int,
        numerator_valuation: int,
    ) -> "DegreeProfile":
        reduced = max(numerator_degree, lhs_degree + denominator_degree) - min(
            lhs_degree, numerator_valuation
        )
        return DegreeProfile(
            lhs_degree=lhs_degree,
            lhs_weight=lhs_weight,
            lhs_shifted_degree=lhs_shifted_degree,
            lhs_unshifted_degree=lhs_unshifted_degree,
            lhs_valuation=lhs_valuation,
            denominator_degree=denominator_degree,
            numerator_degree=numerator_degree,
            numerator_valuation=numerator_valuation,
            reduced_degree=reduced,
            pole_margin=reduced - lhs_degree,
            zero_margin=reduced - lhs_weight,
        )


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    lhs_weight: int
    required: int  # max{deg Q - unshifted deg, deg U - min{unshifted deg, val Q}}
    numerator_requirement: int
    denominator_requirement: int
    valiron_degree: int  # max{deg Q, deg U}, the degree of the rational rhs
    valiron_cap: int  # lhs weight + unshifted degree
    valiron_ok: bool


@dataclass(frozen=True)
class Verdict:
    admissible: bool
    pole_density_bound: Optional[Fraction]  # lower bound for N(r,w)/T(r,w)
    zero_density_bound: Optional[Fraction]  # lower bound for N(r,1/w)/T(r,w)
    forces_identity: bool  # N(r,w) = N(r,1/w) = T(r,w) up to small terms
    ruled_out: Optional[str] = None


@dataclass(frozen=True)
class FamilySpec:
    """A maximal equation family: degree caps plus nonzero side conditions."""

    case: str
    ord0_min: int
    ord0_max: int
    denominator_degree: int
    numerator_degree_min: int
    numerator_degree_max: int
    pole_margin: int
    side_conditions: Tuple[str, ...]

    def triples(self) -> List[Tuple[int, int, int]]:
        """All (ord0 Q, deg Q, deg U) this family covers."""
        out = []
        for q in range(self.numerator_degree_min, self.numerator_degree_max + 1):
            for o in range(self.ord0_min, min(self.ord0_max, q) + 1):
                out.append((o, q, self.denominator_degree))
        return out


@dataclass(frozen=True)
class ReductionOutcome:
    kept: Tuple[FamilySpec, ...]
    removed: Tuple[Tuple[FamilySpec, str], ...]
    truncated: Tuple[Tuple[FamilySpec, FamilySpec], ...]


BENCHMARK_TEXT = "w*w(z+1)+w*w(z-1)+w(z+1)*w(z-1)"


def benchmark_lhs() -> DiffPolynomial:
    """The two-shift quadratic left side the exclusion rules are keyed to."""
    return parse_polynomial(BENCHMARK_TEXT)


def is_benchmark(p: DiffPolynomial) -> bool:
    if len(p.shifts) != 2:
        return False
    values = {s.key for s in p.shifts}
    if values != {(Fraction(1), Fraction(0)), (Fraction(-1), Fraction(0))}:
        return False
    exps = sorted(idx for _, idx in p.terms)
    return exps == [(0, 1, 1), (1, 0, 1), (1, 1, 0)]


def degree_profile(eq: ClunieEquation) -> DegreeProfile:
    return DegreeProfile.from_counts(
        lhs_degree=dp.total_degree(eq.lhs),
        lhs_weight=dp.weight(eq.lhs),
        lhs_shifted_degree=dp.shifted_degree(eq.lhs),
        lhs_unshifted_degree=dp.unshifted_degree(eq.lhs),
        lhs_valuation=dp.order_at_zero(eq.lhs),
        denominator_degree=dp.total_degree(eq.denominator),
        numerator_degree=dp.total_degree(eq.numerator),
        numerator_valuation=dp.order_at_zero(eq.numerator),
    )


def lhs_hypothesis_violations(p: DiffPolynomial) -> Tuple[str, ...]:
    out = []
    if not dp.is_homogeneous(p):
        out.append("not-homogeneous")
    if dp.order_at_zero(p) != 0:
        out.append("unshifted-valuation-nonzero")
    if dp.unshifted_degree(p) >= dp.total_degree(p):
        out.append("unshifted-degree-equals-total")
    return tuple(out)


def check_hypotheses(eq: ClunieEquation) -> Tuple[str, ...]:
    """Violations of the classification hypotheses; empty means applicable."""
    out = list(lhs_hypothesis_violations(eq.lhs))
    if not eq.numerator.is_plain():
        out.append("shift-in-numerator")
    if not eq.denominator.is_plain():
        out.append("shift-in-denominator")
    return tuple(out)


def admissible(eq: ClunieEquation) -> AdmissibilityReport:
    """Test the weight inequality a solvable equation must satisfy.

    Also reports the cruder check that the rational right side has degree at
    most lhs weight + unshifted degree.
    """
    violations = check_hypotheses(eq)
    if violations:
        raise HypothesesViolated(violations)
    prof = degree_profile(eq)
    return _admissibility(prof)


def _admissibility(prof: DegreeProfile) -> AdmissibilityReport:
    num_req = prof.numerator_degree - prof.lhs_unshifted_degree
    den_req = prof.denominator_degree - min(
        prof.lhs_unshifted_degree, prof.numerator_valuation
    )
    required = max(num_req, den_req)
    valiron_degree = max(prof.numerator_degree, prof.denominator_degree)
    valiron_cap = prof.lhs_weight + prof.lhs_unshifted_degree
    return AdmissibilityReport(
        ok=prof.lhs_weight >= required,
        lhs_weight=prof.lhs_weight,
        required=required,
        numerator_requirement=num_req,
        denominator_requirement=den_req,
        valiron_degree=valiron_degree,
        valiron_cap=valiron_cap,
        valiron_ok=valiron_degree <= valiron_cap,
    )


def identity_condition(prof: DegreeProfile) -> bool:
    """Closed form for `pole_margin == lhs_weight` in admissible equations."""
    return (
        prof.numerator_valuation <= prof.lhs_unshifted_degree
        and prof.lhs_weight == prof.denominator_degree - prof.numerator_valuation
        and prof.denominator_degree - prof.numerator_valuation
        >= prof.numerator_degree - prof.lhs_unshifted_degree
    )


def verdict(eq: ClunieEquation) -> Verdict:
    """Value-distribution conclusions for one admissible equation."""
    report = admissible(eq)
    if not report.ok:
        raise NotAdmissible(
            f"lhs weight {report.lhs_weight} below required {report.required}"
        )
    prof = degree_profile(eq)
    return profile_verdict(prof, benchmark=is_benchmark(eq.lhs))


def profile_verdict(prof: DegreeProfile, benchmark: bool = False) -> Verdict:
    report = _admissibility(prof)
    if not report.ok:
        return Verdict(
            admissible=False,
            pole_density_bound=None,
            zero_density_bound=None,
            forces_identity=False,
            ruled_out=DEGREE_BOUND,
        )
    pole = (
        Fraction(prof.pole_margin, prof.lhs_weight) if prof.pole_margin > 0 else None
    )
    zero = (
        Fraction(prof.zero_margin, prof.lhs_degree) if prof.zero_margin > 0 else None
    )
    ruled_out = None
    if benchmark:
        from .poleprop import exclusion_flag

        if exclusion_flag(prof):
            ruled_out = CUBIC_RHS_GROWTH
        elif prof.denominator_degree == 3:
            ruled_out = DENOMINATOR_REWRITE
        elif prof.numerator_degree == 3 and prof.pole_margin > 0:
            ruled_out = CUBIC_NUMERATOR_PROXIMITY
    return Verdict(
        admissible=True,
        pole_density_bound=pole,
        zero_density_bound=zero,
        forces_identity=prof.lhs_weight == prof.pole_margin,
        ruled_out=ruled_out,
    )


# ---------------------------------------------------------------------------
# family enumeration and reduction


_ROMAN = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X"]


def _case_ranges(lam0: int, degp: int, q_cap: int) -> List[Tuple[int, int]]:
    # Group ord0 values with identical saturation behaviour of the two mins.
    ranges: List[Tuple[int, int]] = []
    o = 0
    while o <= q_cap:
        key = (min(lam0, o), min(degp, o))
        hi = o
        while hi + 1 <= q_cap and (min(lam0, hi + 1), min(degp, hi + 1)) == key:
            hi += 1
        ranges.append((o, hi))
        o = hi + 1
    return ranges


def _side_conditions(o_lo: int, o_hi: int, du: int, q_lo: int, q_hi: int) -> Tuple[str, ...]:
    # Keyed to the generic numerator w^o_lo * (a_m w^m + ... + a_0) with
    # m = q_hi - o_lo; for m = 0 the single coefficient is named by its
    # total degree.
    inner = q_hi - o_lo
    out = []
    if inner == 0:
        out.append(f"a{o_lo}!=0")
    else:
        if o_lo == o_hi:
            out.append("a0!=0")
        if q_lo == q_hi:
            out.append(f"a{inner}!=0")
    if du >= 1 and o_lo >= 1:
        out.append("b0!=0")
    return tuple(out)


def enumerate_families(p: DiffPolynomial) -> Tuple[FamilySpec, ...]:
    """Scan all degree triples the admissibility inequality allows, merged
    into maximal families of constant pole margin."""
    violations = lhs_hypothesis_violations(p)
    if violations:
        raise HypothesesViolated(violations)
    kh = dp.weight(p)
    lam0 = dp.unshifted_degree(p)
    degp = dp.total_degree(p)
    q_cap = kh + lam0
    families: List[FamilySpec] = []
    cases = _case_ranges(lam0, degp, q_cap)
    for case_idx, (o_lo, o_hi) in enumerate(cases):
        m_unshift = min(lam0, o_lo)
        m_deg = min(degp, o_lo)
        du_cap = kh + m_unshift
        for du in range(du_cap + 1):
            q = o_lo
            while q <= q_cap:
                margin = max(q - degp, du) - m_deg
                q_hi = q
                while (
                    q_hi + 1 <= q_cap
                    and max(q_hi + 1 - degp, du) - m_deg == margin
                ):
                    q_hi += 1
                label = _ROMAN[case_idx] if case_idx < len(_ROMAN) else f"C{case_idx + 1}"
                families.append(
                    FamilySpec(
                        case=label,
                        ord0_min=o_lo,
                        ord0_max=min(o_hi, q_hi),
                        denominator_degree=du,
                        numerator_degree_min=q,
                        numerator_degree_max=q_hi,
                        pole_margin=margin,
                        side_conditions=_side_conditions(o_lo, o_hi, du, q, q_hi),
                    )
                )
                q = q_hi + 1
    order = {(_ROMAN[i] if i < len(_ROMAN) else f"C{i + 1}"): i for i in range(len(cases))}
    families.sort(
        key=lambda f: (
            order[f.case],
            f.pole_margin,
            f.denominator_degree,
            f.numerator_degree_max,
        )
    )
    return tuple(families)


def reduce_families(
    families: Sequence[FamilySpec],
    growth_assumption: GrowthAssumption,
    p: Optional[DiffPolynomial] = None,
) -> ReductionOutcome:
    """Apply the three benchmark exclusion rules.

    Rule 1 removes denominator degree 3 (rewriting the left side as a product
    of two binomials overshoots the degree cap of that equation class); rule
    2 removes the plain cubic right side (pole orders then grow by the factor
    3/2 along an integer progression, forcing exponential growth); rule 3
    caps the numerator degree at 2 whenever the pole margin is positive (a
    cubic numerator forces the proximity function to dominate, contradicting
    the pole-density conclusion).  All three are specific to the benchmark
    left side.
    """
    if growth_assumption is not GrowthAssumption.MINIMAL_HYPER_TYPE:
        raise ValueError("reduction needs the slow-growth assumption token")
    if p is not None and not is_benchmark(p):
        raise WrongBenchmark(
            "the exclusion rules apply only to the benchmark left side"
        )
    from .poleprop import exclusion_flag

    kept: List[FamilySpec] = []
    removed: List[Tuple[FamilySpec, str]] = []
    truncated: List[Tuple[FamilySpec, FamilySpec]] = []
    for fam in families:
        prof = _benchmark_profile(fam)
        if fam.denominator_degree == 3:
            removed.append((fam, DENOMINATOR_REWRITE))
            continue
        if exclusion_flag(prof):
            removed.append((fam, CUBIC_RHS_GROWTH))
            continue
        if fam.pole_margin > 0 and fam.numerator_degree_max == 3:
            capped = FamilySpec(
                case=fam.case,
                ord0_min=fam.ord0_min,
                ord0_max=min(fam.ord0_max, 2),
                denominator_degree=fam.denominator_degree,
                numerator_degree_min=min(fam.numerator_degree_min, 2),
                numerator_degree_max=2,
                pole_margin=fam.pole_margin,
                side_conditions=_side_conditions(
                    fam.ord0_min,
                    min(fam.ord0_max, 2),
                    fam.denominator_degree,
                    min(fam.numerator_degree_min, 2),
                    2,
                ),
            )
            truncated.append((fam, capped))
            kept.append(capped)
            continue
        kept.append(fam)
    return ReductionOutcome(tuple(kept), tuple(removed), tuple(truncated))


def _benchmark_profile(fam: FamilySpec) -> DegreeProfile:
    return DegreeProfile.from_counts(
        lhs_degree=2,
        lhs_weight=2,
        lhs_shifted_degree=2,
        lhs_unshifted_degree=1,
        lhs_valuation=0,
        denominator_degree=fam.denominator_degree,
        numerator_degree=fam.numerator_degree_max,
        numerator_valuation=fam.ord0_min,
    )


# ---------------------------------------------------------------------------
# rendering and reports


def family_equation_text(fam: FamilySpec, p: DiffPolynomial) -> str:
    """Instantiate the family schema with generic named coefficients."""
    o = fam.ord0_min
    inner_deg = fam.numerator_degree_max - o
    if inner_deg == 0:
        if o == 0:
            q_text = "a0"
        elif o == 1:
            q_text = f"a{o}*w"
        else:
            q_text = f"a{o}*w^{o}"
    else:
        parts = []
        for j in range(inner_deg, -1, -1):
            if j == 0:
                parts.append(f"a{j}")
            elif j == 1:
                parts.append(f"a{j}*w")
            else:
                parts.append(f"a{j}*w^{j}")
        inner = "+".join(parts)
        if o == 0:
            q_text = inner
        elif o == 1:
            q_text = f"w*({inner})"
        else:
            q_text = f"w^{o}*({inner})"
    du = fam.denominator_degree
    if du == 0:
        rhs = q_text
    else:
        dparts = []
        for j in range(du, -1, -1):
            if j == du:
                dparts.append("w" if du == 1 else f"w^{du}")
            elif j == 0:
                dparts.append("b0")
            elif j == 1:
                dparts.append(f"b{j}*w")
            else:
                dparts.append(f"b{j}*w^{j}")
        rhs = f"({q_text})/({'+'.join(dparts)})"
    return f"{poly_text(p)} = {rhs}"


def _deg_q_text(fam: FamilySpec) -> str:
    if fam.numerator_degree_min == fam.numerator_degree_max:
        return f"deg(Q)={fam.numerator_degree_max}"
    return f"deg(Q)<={fam.numerator_degree_max}"


def _ord0_text(fam: FamilySpec) -> str:
    if fam.ord0_min == fam.ord0_max:
        return f"ord0(Q)={fam.ord0_min}"
    return f"ord0(Q)={fam.ord0_min}..{fam.ord0_max}"


def render_families(families: Sequence[FamilySpec], p: DiffPolynomial) -> str:
    lines = []
    for k, fam in enumerate(families, start=1):
        side = ",".join(fam.side_conditions) if fam.side_conditions else "-"
        lines.append(
            f"{k:2d}. case {fam.case:<4} D={fam.pole_margin:+d}  "
            f"{_ord0_text(fam):<14} deg(U)={fam.denominator_degree}  "
            f"{_deg_q_text(fam):<11} side[{side}]"
        )
        lines.append("    " + family_equation_text(fam, p))
    return "\n".join(lines) + "\n"


def _fraction_str(f: Optional[Fraction]) -> Optional[str]:
    return None if f is None else str(f)


def verdict_dict(v: Verdict) -> dict:
    return {
        "admissible": v.admissible,
        "pole_density_bound": _fraction_str(v.pole_density_bound),
        "zero_density_bound": _fraction_str(v.zero_density_bound),
        "forces_identity": v.forces_identity,
        "ruled_out": v.ruled_out,
    }


def report_dict(
    prof: DegreeProfile,
    v: Verdict,
    families: Optional[Sequence[FamilySpec]] = None,
) -> dict:
    out = {"profile": asdict(prof), "verdict": verdict_dict(v)}
    if families is not None:
        out["families"] = [asdict(f) for f in families]
    return out


def report_json(
    prof: DegreeProfile,
    v: Verdict,
    families: Optional[Sequence[FamilySpec]] = None,
) -> str:
    return json.dumps(report_dict(prof, v, families), indent=2, sort_keys=True)
