"""Denominator-clearing integers, integrality certificates and size bounds.

Two explicit positive integers D1 (clearing the denominator-polynomial
coefficients) and D2 (clearing the numerator-polynomial coefficients) are
assembled from prime valuations; their product D clears the whole family.
The module also carries the certified constants c1..c8 controlling log D and
the coefficient magnitudes, the scaled integer system at a rational point,
and the p-adic remainder bounds.

Every bound exposed here is re-checkable: the check_* functions compare an
exactly computed left-hand side against a directed-rounded (upper) right-hand
side, and report rather than assume.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import (
    FactoredInteger,
    Interval,
    LogUpperBound,
    epsilon_interval,
    exp_iv,
    floor_log,
    fmt_real,
    legendre_nu,
    log_interval,
    log_iv,
    p_valuation,
    prime_divisors,
    primes_upto,
)
from .errors import BoundViolation, DomainViolation, IntegralityViolation
from .pade import ApproxShape, PadeFamily, _det_exact, _poly_eval
from .params import GParams, padic_domain_check

__all__ = [
    "ThetaMode",
    "SizeConstants",
    "DenominatorCert",
    "ScaledSystem",
    "RemainderBound",
    "compute_d1",
    "compute_d2",
    "make_cert",
    "bound_constants",
    "verify_integrality",
    "check_size_bounds",
    "scaled_integers",
    "check_scaled_bounds",
    "ntilde1_interval",
    "remainder_padic_bound",
    "check_remainder_padic",
    "cert_tsv",
]


# ---------------------------------------------------------------------------
# Prime-count modes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaMode:
    """A constant theta > 1 with a certified threshold c(theta) such that the
    prime count satisfies pi(x) <= theta * x / log x for all x >= c(theta).

    Modes:
      * paper: theta = 8 log 2 with c = 2.
      * sharp: theta = 1.26 with c = 2, backed by the classical explicit
        estimate pi(x) < 1.25506 x / log x valid for all x > 1.
      * custom: any rational theta with a caller-supplied threshold; flagged
        uncertified since no table is consulted.
    """

    label: str
    theta: Interval
    c_theta: int
    certified: bool

    @classmethod
    def paper(cls, prec: int = 128) -> "ThetaMode":
        return cls("paper", log_interval(Fraction(2), prec) * 8, 2, True)

    @classmethod
    def sharp(cls) -> "ThetaMode":
        return cls("sharp", Interval.point(Fraction(63, 50)), 2, True)

    @classmethod
    def custom(cls, theta: Fraction, c_theta: int, label: str = "custom") -> "ThetaMode":
        return cls(label, Interval.point(Fraction(theta)), c_theta, False)

    @classmethod
    def parse(cls, text: str, prec: int = 128) -> "ThetaMode":
        if text == "paper":
            return cls.paper(prec)
        if text == "sharp":
            return cls.sharp()
        if text.startswith("custom:"):
            body = text[len("custom:") :]
            try:
                theta_s, c_s = body.split(",")
                return cls.custom(Fraction(theta_s), int(c_s))
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"bad theta mode {text!r}; want custom:THETA,C") from None
        raise ValueError(f"unknown theta mode {text!r}")


# ---------------------------------------------------------------------------
# The clearing integers
# ---------------------------------------------------------------------------


def compute_d1(gp: GParams, shape: ApproxShape) -> FactoredInteger:
    """First clearing integer: multiplies every denominator-polynomial
    coefficient of the family into an integer."""
    N, n0 = shape.N, shape.n0
    exps: dict[int, int] = {}

    def add(p: int, e: int):
        if e:
            exps[p] = exps.get(p, 0) + e

    for p, e in FactoredInteger.of(gp.s0).factors:
        add(p, e * (2 * N - 1))
    for p in prime_divisors(gp.s0):
        add(p, legendre_nu(p, N - 1))  # value 0 when N = 1
    for j in range(1, gp.m + 1):
        for p in prime_divisors(gp.v[j - 1]):
            add(p, legendre_nu(p, shape.n[j - 1]))
        x = gp.r[j] + (n0 + 1) * gp.s[j]
        for p in primes_upto(x):
            if gp.s[j] % p != 0:
                add(p, floor_log(p, Fraction(x)))
    return FactoredInteger.from_exponents(exps)


def compute_d2(gp: GParams, shape: ApproxShape) -> FactoredInteger:
    """Second clearing integer: together with D1 it clears the numerator
    polynomials (all product-series coefficients up to their degrees)."""
    Nt = shape.Ntilde
    exps: dict[int, int] = {}

    def add(p: int, e: int):
        if e:
            exps[p] = exps.get(p, 0) + e

    base = gp.d_lcm // gcd(gp.d_lcm, gp.s0)
    for p, e in FactoredInteger.of(base).factors:
        add(p, e * Nt)
    for p in prime_divisors(gp.s_lcm):
        add(p, legendre_nu(p, Nt))
    x = gp.U + gp.V * Nt
    for p in primes_upto(x):
        add(p, floor_log(p, Fraction(x)))
    return FactoredInteger.from_exponents(exps)


# ---------------------------------------------------------------------------
# Certified constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SizeConstants:
    """Directed upper enclosures of the eight log-scale size constants."""

    mode: ThetaMode
    precision: int
    iv: tuple[Interval, ...]  # index 0 unused; 1..8 meaningful

    def upper(self, k: int) -> LogUpperBound:
        return LogUpperBound.from_interval(self.iv[k], self.precision)

    def exponent_13(self, shape: ApproxShape) -> Interval:
        return self.iv[1] + self.iv[2] * shape.n0 + self.iv[3] * shape.N + self.iv[4] * shape.Ntilde

    def exponent_14(self, shape: ApproxShape) -> Interval:
        return self.iv[5] + self.iv[6] * shape.N + self.iv[7] * shape.Ntilde


def bound_constants(gp: GParams, mode: ThetaMode, prec: int = 128) -> SizeConstants:
    """The constants c1..c8 as certified enclosures.

    c1 = theta*(m(R+S)+U)            c2 = m*theta*S
    c3 = log(s0^2 eps(s0) eps(v))    c4 = theta*V + log(dtilde*eps(s))
    c5 = theta*(2(r0-s0)+m*U)        c6 = 2*theta*s0 + log(d*eps(s)/s0)
    c7 = m*theta*V                   c8 = c3+c4+c6+c7+3
    """
    th = mode.theta
    m = gp.m
    eps_s0 = epsilon_interval(gp.s0, prec)
    eps_s = epsilon_interval(gp.s_lcm, prec)
    eps_v = epsilon_interval(gp.v_lcm, prec)
    c1 = th * (m * (gp.R + gp.S) + gp.U)
    c2 = th * (m * gp.S)
    c3 = log_iv(Interval.point(gp.s0**2) * eps_s0 * eps_v, prec)
    c4 = th * gp.V + log_iv(Interval.point(gp.dtilde) * eps_s, prec)
    c5 = th * (2 * (gp.r0 - gp.s0) + m * gp.U)
    c6 = th * (2 * gp.s0) + log_iv(Interval.point(Fraction(gp.d_lcm, gp.s0)) * eps_s, prec)
    c7 = th * (m * gp.V)
    c8 = c3 + c4 + c6 + c7 + 3
    dummy = Interval.point(0)
    return SizeConstants(mode=mode, precision=prec, iv=(dummy, c1, c2, c3, c4, c5, c6, c7, c8))


@dataclass(frozen=True)
class DenominatorCert:
    """D1, D2, D = D1*D2 for a concrete (gp, shape), plus size constants."""

    gp: GParams
    shape: ApproxShape
    d1: FactoredInteger
    d2: FactoredInteger
    d: FactoredInteger
    constants: SizeConstants

    @property
    def mode(self) -> ThetaMode:
        return self.constants.mode


def make_cert(gp: GParams, shape: ApproxShape, mode: ThetaMode | None = None, prec: int = 128) -> DenominatorCert:
    mode = mode or ThetaMode.paper(prec)
    d1 = compute_d1(gp, shape)
    d2 = compute_d2(gp, shape)
    return DenominatorCert(
        gp=gp, shape=shape, d1=d1, d2=d2, d=d1 * d2, constants=bound_constants(gp, mode, prec)
    )


# ---------------------------------------------------------------------------
# Integrality
# ---------------------------------------------------------------------------


def verify_integrality(family: PadeFamily, cert: DenominatorCert, strict: bool = False) -> dict:
    """Assert D1*a_ik and D*c_ij_mu are integers for all in-range indices.

    Returns {"passed": bool, "violations": [...]}, listing each failing
    coefficient (empty on success).  With strict=True a violation raises
    IntegralityViolation instead of only being reported.
    """
    gp, shape = family.gp, family.shape
    d1 = cert.d1.value
    d = cert.d.value
    violations = []
    for i in range(gp.m + 1):
        for k, a in enumerate(family.q[i]):
            if (a * d1).denominator != 1:
                violations.append(("q", i, k, str(a)))
    for i in range(gp.m + 1):
        for j in range(1, gp.m + 1):
            for mu, cf in enumerate(family.p_coeffs(i, j)):
                if (cf * d).denominator != 1:
                    violations.append(("p", i, j, mu, str(cf)))
    if strict and violations:
        raise IntegralityViolation(f"first violation: {violations[0]}")
    return {"passed": not violations, "violations": violations}


# ---------------------------------------------------------------------------
# Magnitude bound checks (exact LHS vs upper-rounded RHS)
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return fmt_real(value)
    if isinstance(value, int):
        return fmt_real(Fraction(value)) if abs(value) >= 10**24 else str(value)
    return str(value)


def _entry(name, applicable, passed, lhs="", rhs=""):
    # `passed` is the numeric outcome either way; `applicable` records whether
    # the bound's stated size threshold is met (only then is a FAIL a finding)
    return {
        "name": name,
        "applicable": applicable,
        "passed": passed,
        "lhs": _fmt(lhs),
        "rhs": _fmt(rhs),
    }


def check_size_bounds(
    family: PadeFamily,
    cert: DenominatorCert,
    zs: tuple[Fraction, ...] = (Fraction(2), Fraction(8, 3), Fraction(3)),
    strict: bool = False,
) -> list[dict]:
    """Verify the certified log-size bounds on the concrete family.

    Gated by the mode's threshold: the D-bound needs min(n0, N) >= c(theta),
    the coefficient bound and the |z| >= 2 evaluation bounds need
    N >= c(theta).  LHS values are exact rationals; RHS values are upper
    dyadic bounds, so a PASS certifies the inequality as stated.  With
    strict=True an applicable failing bound raises BoundViolation.
    """
    gp, shape = family.gp, family.shape
    cns = cert.constants
    prec = cns.precision
    c = cns.mode.c_theta
    N, n0, Nt = shape.N, shape.n0, shape.Ntilde
    out = []

    app_d = min(n0, N) >= c
    rhs_d = exp_iv(cns.exponent_13(shape), prec).hi
    out.append(_entry("log_size_D", app_d, Fraction(cert.d.value) <= rhs_d, cert.d.value, rhs_d))

    app_a = N >= c
    amax = max(abs(a) for row in family.q for a in row)
    rhs_a = (N * exp_iv(cns.exponent_14(shape), prec)).hi
    out.append(_entry("coeff_magnitude", app_a, amax <= rhs_a, amax, rhs_a))

    growth = exp_iv(cns.exponent_14(shape), prec)
    for z in zs:
        z = Fraction(z)
        app_z = N >= c and abs(z) >= 2
        qmax_ok = True
        pmax_ok = True
        rhs_q = (2 * N * growth * Interval.point(abs(z)).pow_int(N)).hi
        lhs_q = max(abs(_poly_eval(family.q[i], z)) for i in range(gp.m + 1))
        qmax_ok = lhs_q <= rhs_q
        out.append(_entry(f"denom_poly_at_{z}", app_z, qmax_ok, lhs_q, rhs_q))
        worst = None
        for i in range(gp.m + 1):
            for j in range(1, gp.m + 1):
                lhs_p = abs(_poly_eval(family.p_coeffs(i, j), z))
                rhs_p = (
                    2 * N * (N + 1) * growth * Interval.point(abs(z)).pow_int(Nt - shape.n[j - 1] + 1)
                ).hi
                if lhs_p > rhs_p:
                    pmax_ok = False
                    worst = (i, j, lhs_p, rhs_p)
        out.append(_entry(f"numer_poly_at_{z}", app_z, pmax_ok, "" if pmax_ok else worst, ""))
    if strict:
        bad = next((e for e in out if e["applicable"] and not e["passed"]), None)
        if bad is not None:
            raise BoundViolation(f"{bad['name']}: {bad['lhs']} exceeds {bad['rhs']}")
    return out


# ---------------------------------------------------------------------------
# Scaled integer system at a rational point
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledSystem:
    """The integers D*b^Ntilde*Q_i(beta) and D*b^Ntilde*P_ij(beta), plus the
    (nonzero) determinant of the stacked (m+1) x (m+1) integer matrix."""

    beta: Fraction
    qi: tuple[int, ...]
    pij: tuple[tuple[int, ...], ...]
    det: int


def scaled_integers(
    family: PadeFamily, cert: DenominatorCert, beta: Fraction, p: int | None = None
) -> ScaledSystem:
    """Evaluate and clear the family at beta = a/b (reduced, |beta| >= 2).

    With a prime supplied, the p-adic smallness condition on the numerator is
    enforced as well; DomainViolation reports whichever precondition fails.
    The integer matrix is certified nonsingular by an exact determinant.
    """
    gp, shape = family.gp, family.shape
    beta = Fraction(beta)
    if beta == 0 or abs(beta) < 2:
        raise DomainViolation(f"need |beta| >= 2, got {beta}")
    if p is not None:
        chk = padic_domain_check(gp, p, Fraction(beta.numerator))
        if not chk.ok:
            raise DomainViolation(f"|{beta.numerator}|_{p} does not meet the smallness condition")
    scale = Fraction(cert.d.value) * Fraction(beta.denominator) ** shape.Ntilde
    qi = []
    pij = []
    for i in range(gp.m + 1):
        qv = _poly_eval(family.q[i], beta) * scale
        if qv.denominator != 1:
            raise IntegralityViolation(f"scaled Q_{i}({beta}) is not an integer")
        qi.append(qv.numerator)
        row = []
        for j in range(1, gp.m + 1):
            pv = _poly_eval(family.p_coeffs(i, j), beta) * scale
            if pv.denominator != 1:
                raise IntegralityViolation(f"scaled P_{i}{j}({beta}) is not an integer")
            row.append(pv.numerator)
        pij.append(tuple(row))
    mat = [[Fraction(qi[i])] + [Fraction(x) for x in pij[i]] for i in range(gp.m + 1)]
    det = _det_exact(mat)
    assert det.denominator == 1
    if det == 0:
        raise IntegralityViolation("scaled system matrix is singular")
    return ScaledSystem(beta=beta, qi=tuple(qi), pij=tuple(pij), det=det.numerator)


def ntilde1_interval(gp: GParams, cns: SizeConstants, beta: Fraction, p: int) -> Interval:
    """Threshold on Ntilde past which the clean remainder bound applies:
    max{(m+1)c(theta), c1+c5, log(2*dtilde) + 4*delta(p)*log|a|}."""
    a = abs(Fraction(beta).numerator)
    delta_p = 1 if gp.s_lcm % p == 0 else 0
    t1 = Interval.point((gp.m + 1) * cns.mode.c_theta)
    t2 = cns.iv[1] + cns.iv[5]
    t3 = log_interval(Fraction(2 * gp.dtilde), cns.precision)
    if delta_p:
        t3 = t3 + 4 * log_interval(Fraction(a), cns.precision)
    return t1.max_with(t2).max_with(t3)


@dataclass(frozen=True)
class RemainderBound:
    a14: Fraction
    lemma6_upper: Fraction
    ntilde1: LogUpperBound
    lemma6_applicable: bool
    delta_p: int


def remainder_padic_bound(
    gp: GParams, shape: ApproxShape, beta: Fraction, p: int, cert: DenominatorCert
) -> RemainderBound:
    """The two certified p-adic bounds on the cleared remainder at beta.

    The first (always valid under the domain condition) is
    2*dtilde*|a|^(4 delta(p)) * Ntilde^delta(p) * |a|_p^(Ntilde+1); the second
    is exp(2*Ntilde)*|a|_p^(Ntilde+1), valid once Ntilde >= Ntilde_1.
    """
    beta = Fraction(beta)
    chk = padic_domain_check(gp, p, Fraction(beta.numerator))
    if not chk.ok:
        raise DomainViolation(f"|{beta.numerator}|_{p} does not meet the smallness condition")
    a = beta.numerator
    va = p_valuation(Fraction(a), p)
    Nt = shape.Ntilde
    dp = chk.delta_p
    abs_a_p = Fraction(1, p ** (va * (Nt + 1)))
    a14 = 2 * gp.dtilde * Fraction(abs(a)) ** (4 * dp) * Fraction(Nt) ** dp * abs_a_p
    nt1 = ntilde1_interval(gp, cert.constants, beta, p)
    applicable = Fraction(Nt) >= nt1.hi
    lemma6 = exp_iv(Interval.point(2 * Nt), cert.constants.precision).hi * abs_a_p
    return RemainderBound(
        a14=a14,
        lemma6_upper=lemma6,
        ntilde1=LogUpperBound.from_interval(nt1, cert.constants.precision),
        lemma6_applicable=applicable,
        delta_p=dp,
    )


def check_remainder_padic(family: PadeFamily, cert: DenominatorCert, beta: Fraction, p: int) -> list[dict]:
    """Check the truncated cleared remainders against the p-adic bounds.

    For every (i, j): the exact p-adic absolute value of the truncated
    D * (Q_i*phi_j - P_ij)(beta), and of each of its terms, must respect the
    first bound; and the second bound when its threshold is met.
    """
    gp, shape = family.gp, family.shape
    rb = remainder_padic_bound(gp, shape, beta, p, cert)
    d = cert.d.value
    out = []
    for i in range(gp.m + 1):
        for j in range(1, gp.m + 1):
            start = shape.Nij(i, j) + shape.n[j - 1] + 1
            terms = [
                d * cf * beta**mu
                for mu, cf in enumerate(family.remainder_coeffs(i, j), start=start)
            ]
            total = sum(terms, Fraction(0))
            vals = [Fraction(1, p**p_valuation(t, p)) if t != 0 else Fraction(0) for t in terms]
            vtot = Fraction(1, p**p_valuation(total, p)) if total != 0 else Fraction(0)
            ok_terms = all(v <= rb.a14 for v in vals)
            ok_total = vtot <= rb.a14
            out.append(_entry(f"remainder_first_bound_{i}_{j}", True, ok_terms and ok_total, vtot, rb.a14))
            ok6 = vtot <= rb.lemma6_upper and all(v <= rb.lemma6_upper for v in vals)
            out.append(
                _entry(f"remainder_clean_bound_{i}_{j}", rb.lemma6_applicable, ok6, vtot, rb.lemma6_upper)
            )
    return out


def check_scaled_bounds(
    scaled: ScaledSystem, family: PadeFamily, cert: DenominatorCert, p: int
) -> list[dict]:
    """Magnitude bounds for the scaled integers, gated on Ntilde >= Ntilde_1
    and min(n0, N) >= c(theta)."""
    gp, shape = family.gp, family.shape
    cns = cert.constants
    beta = scaled.beta
    a, b = beta.numerator, beta.denominator
    nt1 = ntilde1_interval(gp, cert.constants, beta, p)
    applicable = (
        Fraction(shape.Ntilde) >= nt1.hi and min(shape.n0, shape.N) >= cns.mode.c_theta
    )
    env = exp_iv(cns.iv[2] * shape.n0 + cns.iv[8] * shape.Ntilde, cns.precision)
    out = []
    rhs_q = (env * Fraction(b) ** shape.n0 * Fraction(abs(a)) ** (shape.Ntilde - shape.n0)).hi
    ok_q = all(abs(q) <= rhs_q for q in scaled.qi)
    out.append(_entry("scaled_denom_magnitude", applicable, ok_q, max(abs(q) for q in scaled.qi), rhs_q))
    ok_p = True
    worst = ""
    for i in range(gp.m + 1):
        for j in range(1, gp.m + 1):
            nj = shape.n[j - 1]
            rhs_p = (env * Fraction(b) ** nj * Fraction(abs(a)) ** (shape.Ntilde - nj + 1)).hi
            if abs(scaled.pij[i][j - 1]) > rhs_p:
                ok_p = False
                worst = f"(i={i}, j={j})"
    out.append(_entry("scaled_numer_magnitude", applicable, ok_p, worst, ""))
    return out


# ---------------------------------------------------------------------------
# Certificate dump
# ---------------------------------------------------------------------------


def cert_tsv(cert: DenominatorCert, checks: list[dict] | None = None) -> str:
    lines = ["quantity\tvalue\tdetail\tstatus"]
    lines.append(f"D1\t{cert.d1.value}\t{cert.d1.format_factors()}\t-")
    lines.append(f"D2\t{cert.d2.value}\t{cert.d2.format_factors()}\t-")
    lines.append(f"D\t{cert.d.value}\t{cert.d.format_factors()}\t-")
    cns = cert.constants
    for k in range(1, 9):
        ub = cns.upper(k)
        lines.append(f"c{k}\t{_dec(ub.value)}\tupper@{ub.precision}b\t-")
    for e in checks or []:
        status = "SKIP" if not e["applicable"] else ("PASS" if e["passed"] else "FAIL")
        lines.append(f"{e['name']}\t{e['lhs']}\t{e['rhs']}\t{status}")
    return "\n".join(lines) + "\n"


def _dec(q: Fraction, digits: int = 24) -> str:
    """Deterministic decimal rendering; see arith.fmt_real."""
    return fmt_real(q, sig=digits)
