"""Weight-independent eigenvalue congruences via Newton polygons.

For a Hecke matrix M and a target value c, the minimal Newton-polygon
slope of charpoly(M)(x + c) at p equals the minimum over eigenvalues of
the p-adic valuation of (eigenvalue - c), computed in exact integer
arithmetic: no p-adic field is ever constructed.  A congruence family
is a set of primes ell (constrained to +-1 mod a modulus) together with
a required depth kappa; a report records the observed depth per
(weight, ell) instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactlin import (
    INF,
    IntMatrix,
    IntPolynomial,
    charpoly,
    is_prime,
    newton_polygon,
    valuation,
)
from .modsym import components, h1_dim_y
from .qexp import dim_cusp, hecke_matrices, hecke_matrix


def eigen_kappa(m: IntMatrix, c: int, p: int):
    """min over eigenvalues of v_p(eigenvalue - c); INF iff all equal c."""
    if not m.is_square:
        raise ValueError("need a square matrix")
    shifted = charpoly(m).shift(c)
    return newton_polygon(shifted, p).min_slope


def _fmt_kappa(value) -> str:
    if value is INF:
        return "inf"
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


@dataclass(frozen=True)
class CongruenceReport:
    """Verdict for one (weight, ell) congruence instance.

    The charpoly of the tested operator is embedded so the verdict can
    be recomputed from the report alone.
    """

    weight: int
    p: int
    ell: int
    shift: int
    kappa_observed: object  # Fraction or INF
    kappa_required: Fraction
    passed: bool
    charpoly: IntPolynomial

    def csv_row(self) -> str:
        return (
            f"{self.weight},{self.p},{self.ell},{self.shift},"
            f"{_fmt_kappa(self.kappa_observed)},{_fmt_kappa(self.kappa_required)},"
            f"{'true' if self.passed else 'false'}"
        )

    def to_json_dict(self) -> dict:
        return {
            "weight": self.weight,
            "p": self.p,
            "ell": self.ell,
            "shift": self.shift,
            "kappa_observed": _fmt_kappa(self.kappa_observed),
            "kappa_required": _fmt_kappa(self.kappa_required),
            "pass": self.passed,
            "charpoly": self.charpoly.coeffs_str(),
        }


CSV_HEADER = "k,p,ell,c,kappa_observed,kappa_required,pass"


def _make_report(k, p, ell, poly, kappa_required) -> CongruenceReport:
    c = 1 + ell
    observed = newton_polygon(poly.shift(c), p).min_slope
    return CongruenceReport(
        weight=k,
        p=p,
        ell=ell,
        shift=c,
        kappa_observed=observed,
        kappa_required=Fraction(kappa_required),
        passed=(observed is INF) or observed >= kappa_required,
        charpoly=poly,
    )


def _check_ell_condition(ell: int, modulus: int):
    if not is_prime(ell):
        raise ValueError(f"ell = {ell} is not prime")
    if ell % modulus not in (1 % modulus, (modulus - 1) % modulus):
        raise ValueError(
            f"ell = {ell} violates the congruence condition ell = +-1 mod {modulus}"
        )


def verify_family(p, kappa_required, ell_set, k_range, ell_modulus=None) -> list[CongruenceReport]:
    """One report per (weight, ell): are all T_ell eigenvalues = 1 + ell
    mod p^kappa_required?

    Every ell must satisfy ell = +-1 mod ell_modulus (default: mod p).
    Weights without cusp forms are skipped.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    modulus = p if ell_modulus is None else ell_modulus
    ells = sorted(set(int(e) for e in ell_set))
    for ell in ells:
        _check_ell_condition(ell, modulus)
        if ell == p:
            raise ValueError(f"ell = {ell} must differ from p")
    kappa_required = Fraction(kappa_required)
    reports = []
    for k in k_range:
        if k % 2 != 0:
            raise ValueError(f"weights must be even, got {k}")
        if dim_cusp(k) == 0:
            continue
        mats = hecke_matrices(k, ells)
        for ell in ells:
            poly = charpoly(mats[ell].mat)
            reports.append(_make_report(k, p, ell, poly, kappa_required))
    return reports


@dataclass(frozen=True)
class FamilyRule:
    """A named congruence family: prime, depth, and the ell constraint."""

    rule_id: str
    p: int
    kappa_required: Fraction
    ell_modulus: int
    ells: tuple[int, ...]


def _primes_upto(n):
    return [q for q in range(2, n + 1) if is_prime(q)]


FAMILY_RULES = {
    "hatada-p2": FamilyRule(
        "hatada-p2", 2, Fraction(1), 2, tuple(q for q in _primes_upto(31) if q != 2)
    ),
    "hatada-p3": FamilyRule(
        "hatada-p3", 3, Fraction(1), 3, tuple(q for q in _primes_upto(31) if q != 3)
    ),
    "hatada-p5": FamilyRule(
        "hatada-p5", 5, Fraction(1), 5,
        tuple(q for q in _primes_upto(31) if q % 5 in (1, 4)),
    ),
    "lemma-7-sqrt": FamilyRule("lemma-7-sqrt", 7, Fraction(1, 2), 7, (13, 29, 41, 43)),
    "lemma-mod9": FamilyRule("lemma-mod9", 3, Fraction(2), 9, (17, 19, 37, 53)),
    # classical full-strength mod-8 congruence at p=2; this is the rule
    # that actually excludes 2-adic approximation of the level-32 form
    "hatada-p2-mod8": FamilyRule(
        "hatada-p2-mod8", 2, Fraction(3), 2, tuple(q for q in _primes_upto(31) if q != 2)
    ),
}


def run_family_rule(rule_id: str, k_range) -> list[CongruenceReport]:
    rule = FAMILY_RULES.get(rule_id)
    if rule is None:
        raise ValueError(f"unknown congruence family {rule_id!r}; "
                         f"choose from {sorted(FAMILY_RULES)}")
    return verify_family(rule.p, rule.kappa_required, rule.ells, k_range, rule.ell_modulus)


def kappa_lower_bound(n: int, p: int) -> Fraction:
    """Sufficient (not sharp) depth bound 1 / dim H^1 of the relevant curve.

    Implemented for tame level 1 with p >= 3: the relevant curve is the
    full-level-p open curve with phi(p) components.
    """
    if n != 1:
        raise ValueError("only tame level 1 is supported by this artifact")
    if not is_prime(p) or p < 3:
        raise ValueError("need a prime p >= 3 (the full-level formulas start at 3)")
    return Fraction(1, components(p) * h1_dim_y(p))


def nilpotency_index(k: int) -> int:
    """Smallest n >= 1 with hecke_matrix(k, 2)^n = 0 mod 2."""
    d = dim_cusp(k)
    if d == 0:
        raise ValueError(f"no cusp forms in weight {k}")
    t2 = hecke_matrix(k, 2).mat.mod(2)
    power = t2
    for n in range(1, d + 1):
        if power.is_zero():
            return n
        power = (power @ t2).mod(2)
    if power.is_zero():
        return d
    raise RuntimeError(
        "internal error: T_2 mod 2 is not nilpotent at level one, "
        "which contradicts its action on the cusp space"
    )


# --- ingested external forms ------------------------------------------------


def validate_ingestion(form: dict) -> dict:
    """Validate the ingestion JSON shape {label, weight, level, an}."""
    for key in ("label", "weight", "level", "an"):
        if key not in form:
            raise ValueError(f"ingestion record is missing field {key!r}")
    if not isinstance(form["label"], str) or not form["label"]:
        raise ValueError("label must be a nonempty string")
    if not isinstance(form["weight"], int) or not isinstance(form["level"], int):
        raise ValueError("weight and level must be integers")
    if not isinstance(form["an"], dict):
        raise ValueError("an must be an object mapping n to decimal strings")
    an = {}
    for key, value in form["an"].items():
        try:
            n = int(key)
            a = int(str(value))
        except (TypeError, ValueError):
            raise ValueError(
                f"coefficient a_{key} = {value!r} is not an integer"
            ) from None
        an[n] = a
    return {
        "label": form["label"],
        "weight": form["weight"],
        "level": form["level"],
        "an": an,
    }


def check_ingested(form: dict, p: int, ell_rules) -> list[CongruenceReport]:
    """Per-ell verdicts v_p(a_ell - (1 + ell)) >= kappa for an ingested form.

    A single failure certifies the form cannot be p-adically approximated
    by level-one eigenforms satisfying the family congruence.
    """
    rule = FAMILY_RULES[ell_rules] if isinstance(ell_rules, str) else ell_rules
    if rule.p != p:
        raise ValueError(f"rule {rule.rule_id} is for p = {rule.p}, not p = {p}")
    data = validate_ingestion(form)
    missing = [ell for ell in rule.ells if ell not in data["an"]]
    if missing:
        raise ValueError(
            f"form {data['label']} is missing coefficients for ell in {missing}"
        )
    reports = []
    for ell in rule.ells:
        _check_ell_condition(ell, rule.ell_modulus)
        a = data["an"][ell]
        poly = IntPolynomial([-a, 1])
        reports.append(_make_report(data["weight"], p, ell, poly, rule.kappa_required))
    return reports
