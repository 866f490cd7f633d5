"""Restricted rational approximation of the real series value (m = 1).

Audits the explicit lower bound for |phi(a/b) - n/(B*b^M)| over denominators
of the shape B*b^M.  All constants are certified enclosures, the series value
is enclosed with an explicit geometric tail bound, and every inequality in
the chain is either decided exactly or with directed rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    FactoredInteger,
    Interval,
    epsilon_interval,
    exp_iv,
    floor_log,
    legendre_nu,
    log_interval,
    log_iv,
    nth_root_iv,
    prime_divisors,
    primes_upto,
)
from .denom import ThetaMode, _dec, _entry
from .errors import DomainViolation, HypothesisFailure, PrecisionInsufficient
from .pade import ApproxShape, _poly_eval, build_family, phi_coeffs
from .params import GParams

__all__ = [
    "RealEnclosure",
    "RestrictedConstants",
    "RestrictedInstance",
    "eval_phi_real",
    "c_of_vartheta",
    "epsilon_corollary",
    "restricted_constants",
    "restricted_threshold",
    "smallest_admissible_b",
    "make_restricted_instance",
    "audit_restricted",
]


@dataclass(frozen=True)
class RealEnclosure:
    """[lower, upper] containing the true series value; the width equals the
    certified tail bound of the truncation that produced it."""

    lower: Fraction
    upper: Fraction

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, q: Fraction) -> bool:
        return self.lower <= q <= self.upper


def eval_phi_real(gp: GParams, z: Fraction, T: int) -> RealEnclosure:
    """Partial sum of T+1 terms of phi_1 plus the tail bound |z|^(T+1)/(1-|z|).

    Every series coefficient lies in (0, 1] and the coefficients decrease, so
    for z > 0 the tail is a positive amount below the bound, and for z < 0
    the series is alternating and the tail has the sign of the first omitted
    term.  Either way the enclosure has width exactly the tail bound.
    """
    z = Fraction(z)
    if abs(z) >= 1:
        raise DomainViolation("real evaluation needs |z| < 1")
    if z == 0:
        return RealEnclosure(Fraction(1), Fraction(1))
    coeffs = phi_coeffs(gp, 1, T)
    acc = Fraction(0)
    power = Fraction(1)
    for cf in coeffs:
        acc += cf * power
        power *= z
    tail = abs(z) ** (T + 1) / (1 - abs(z))
    if z > 0 or (T + 1) % 2 == 0:
        return RealEnclosure(acc, acc + tail)
    return RealEnclosure(acc - tail, acc)


def c_of_vartheta(vartheta: Fraction, scan_limit: int = 200000) -> int:
    """Smallest n* with (n+1)^2 <= vartheta^n for every n >= n*.

    Found by scanning for the crossover and certified by the ratio test:
    once (n*+2)^2 < (n*+1)^2 * vartheta, the squared-ratio factor only
    shrinks, so induction carries the inequality to every larger n.
    """
    vartheta = Fraction(vartheta)
    if vartheta <= 1:
        raise ValueError("need vartheta > 1")
    power = Fraction(1)
    n = 0
    while n <= scan_limit:
        if (n + 1) ** 2 <= power and (n + 2) ** 2 < (n + 1) ** 2 * vartheta:
            return n
        power *= vartheta
        n += 1
    raise ValueError("crossover not found below the scan limit")


@dataclass(frozen=True)
class RestrictedConstants:
    mode: ThetaMode
    vartheta: Fraction
    c_theta: int
    c_vartheta: int
    a1: Interval
    a1_variant: str
    a1_general: Interval
    a2: Interval
    precision: int


def restricted_constants(
    gp: GParams, mode: ThetaMode, vartheta: Fraction, prec: int = 128
) -> RestrictedConstants:
    """The two envelope constants of the restricted-approximation bound.

    a1 has three forms: general, integer leading parameter, and leading
    parameter equal to 1; the most specific applicable form is selected
    (it is also the smallest).  a2 is the single general form.
    """
    if gp.m != 1:
        raise ValueError("restricted approximation is stated for m = 1")
    vartheta = Fraction(vartheta)
    if vartheta <= 1:
        raise ValueError("need vartheta > 1")
    th = mode.theta
    s0, r0 = gp.s0, gp.r0
    r, s = gp.r[1], gp.s[1]
    u, v = gp.u[0], gp.v[0]
    d = gp.d_lcm
    eps_s0 = epsilon_interval(s0, prec)
    eps_s = epsilon_interval(gp.s_lcm, prec)
    eps_v = epsilon_interval(gp.v_lcm, prec)

    base = Interval.point(vartheta * d * s0) * eps_s0 * eps_v
    a1_general = (
        nth_root_iv(base, 4, prec)
        * gp.dtilde
        * eps_s
        * exp_iv(th * (Fraction(s0, 2) + s + 2 * v), prec)
    )
    if r0 == 1 and s0 == 1:
        a1 = nth_root_iv(Interval.point(Fraction(2)), 4, prec) * exp_iv(th * (3 * s), prec)
        variant = "leading_parameter_one"
    elif s0 == 1:
        a1 = nth_root_iv(Interval.point(4 * vartheta), 4, prec) * exp_iv(th * (3 * s), prec)
        variant = "integer_leading_parameter"
    else:
        a1 = a1_general
        variant = "general"
    a2 = 4 * gp.dtilde * eps_s * exp_iv(th * (r + s + 2 * r0 + 2 * u), prec)
    return RestrictedConstants(
        mode=mode,
        vartheta=vartheta,
        c_theta=mode.c_theta,
        c_vartheta=c_of_vartheta(vartheta),
        a1=a1.rounded(prec),
        a1_variant=variant,
        a1_general=a1_general.rounded(prec),
        a2=a2.rounded(prec),
        precision=prec,
    )


def smallest_admissible_b(gp: GParams, a: int, mode: ThetaMode, vartheta: Fraction, prec: int = 128) -> int:
    """Least integer b certified to satisfy b >= (a1*|a|)^6."""
    rc = restricted_constants(gp, mode, vartheta, prec)
    bound = (rc.a1 * abs(a)).pow_int(6).hi
    return -((-bound.numerator) // bound.denominator)  # ceil


def epsilon_corollary(
    rc: RestrictedConstants, a: int, b: int, B: int, M: int, epsilon: Fraction
) -> dict:
    """The power-saving restatement of the verified lower bound.

    When b^epsilon exceeds a1^18*|a|^17 (certified against the upper a1), the
    audited bound 1/(B b^M (a1^18 |a|^17)^M) is itself at least
    1/(B b^(M(1+epsilon))), so the distance bound transfers; both exact power
    comparisons are reported.
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError("need 0 < epsilon < 1")
    en, ed = epsilon.numerator, epsilon.denominator
    envelope = (rc.a1.pow_int(18) * abs(a) ** 17).hi
    hyp = Fraction(b) ** en > envelope**ed
    implied = Fraction(b) ** (en * M) >= envelope ** (ed * M) if hyp else None
    return {
        "epsilon": str(epsilon),
        "power_hypothesis": bool(hyp),
        "bound_transfers": implied,
        "implied_rhs": f"1/(B * b^(M*(1+{epsilon})))",
    }


def restricted_threshold(
    gp: GParams, rc: RestrictedConstants, a: int, b: int, B: int, t: Fraction
) -> tuple[Interval, dict]:
    """The explicit starting exponent M0, as an enclosure, plus its pieces.

    M0 = (log b / log(a1|a|)) * max{ 6 log(a2|a|)/log b + 1/2, (4t+1)/2,
          (log b / log(a1|a|))/4, (1 + max{c(theta), c(vartheta), 4})/2 }.

    Raises HypothesisFailure if b < (a1|a|)^6 (certified) or B > b^t (exact).
    """
    t = Fraction(t)
    prec = rc.precision
    if a == 0 or b < 1 or B < 1 or t < 0:
        raise HypothesisFailure("need a != 0, b >= 1, B >= 1, t >= 0")
    hyp_b = Fraction(b) >= (rc.a1 * abs(a)).pow_int(6).hi
    hyp_B = B ** t.denominator <= b**t.numerator
    if not hyp_b:
        raise HypothesisFailure(f"b = {b} is not certified >= (a1*|a|)^6")
    if not hyp_B:
        raise HypothesisFailure(f"B = {B} exceeds b^t")
    log_b = log_interval(Fraction(b), prec)
    log_a1a = log_iv(rc.a1 * abs(a), prec)
    ratio = log_b / log_a1a
    log_a2a = log_iv(rc.a2 * abs(a), prec)
    parts = [
        6 * log_a2a / log_b + Fraction(1, 2),
        Interval.point(Fraction(4 * t.numerator + t.denominator, 2 * t.denominator)),
        ratio / 4,
        Interval.point(Fraction(1 + max(rc.c_theta, rc.c_vartheta, 4), 2)),
    ]
    biggest = parts[0]
    for pc in parts[1:]:
        biggest = biggest.max_with(pc)
    m0 = ratio * biggest
    detail = {
        "ratio_log": ratio,
        "entries": parts,
        "m0": m0,
    }
    return m0, detail


@dataclass(frozen=True)
class RestrictedInstance:
    gp: GParams
    constants: RestrictedConstants
    a: int
    b: int
    B: int
    t: Fraction
    M: int
    candidate_n: int | None
    x: Interval
    h: int
    n0: int
    n1: int
    m0: Interval


def make_restricted_instance(
    gp: GParams,
    a: int,
    b: int,
    B: int,
    t: Fraction,
    mode: ThetaMode | None = None,
    vartheta: Fraction = Fraction(2),
    M: int | None = None,
    candidate_n: int | None = None,
    prec: int = 128,
) -> RestrictedInstance:
    """Assemble an instance: derive x = log b / (2 log(a1|a|)), pick the block
    sizes n1 = h = floor(M/(x-2)) and n0 = floor(x*h) from the certified lower
    end of x, and default M to the least certified admissible exponent."""
    mode = mode or ThetaMode.sharp()
    rc = restricted_constants(gp, mode, vartheta, prec)
    m0, _ = restricted_threshold(gp, rc, a, b, B, t)
    if M is None:
        M = -((-m0.hi.numerator) // m0.hi.denominator)  # ceil of the upper bound
    log_b = log_interval(Fraction(b), prec)
    x = log_b / (2 * log_iv(rc.a1 * abs(a), prec))
    if x.lo <= 2:
        raise HypothesisFailure("x = log b / (2 log(a1|a|)) must exceed 2 (expect >= 3)")
    h = int(Fraction(M) / (x.lo - 2))  # floor for positive values
    n0 = int(x.lo * h)
    return RestrictedInstance(
        gp=gp, constants=rc, a=a, b=b, B=B, t=Fraction(t), M=M,
        candidate_n=candidate_n, x=x, h=h, n0=n0, n1=h, m0=m0,
    )


# ---------------------------------------------------------------------------
# Specialized clearing integers (m = 1)
# ---------------------------------------------------------------------------


def restricted_d1(gp: GParams, n1: int, n0: int) -> FactoredInteger:
    exps: dict[int, int] = {}

    def add(p, e):
        if e:
            exps[p] = exps.get(p, 0) + e

    for p, e in FactoredInteger.of(gp.s0).factors:
        add(p, e * (2 * n1 - 1))
    for p in prime_divisors(gp.s0):
        add(p, legendre_nu(p, n1 - 1))
    for p in prime_divisors(gp.v[0]):
        add(p, legendre_nu(p, n1))
    xval = gp.r[1] + gp.s[1] * (n0 + 1)
    for p in primes_upto(xval):
        if gp.s[1] % p != 0:
            add(p, floor_log(p, Fraction(xval)))
    return FactoredInteger.from_exponents(exps)


def restricted_d2(gp: GParams, n0: int) -> FactoredInteger:
    exps: dict[int, int] = {}

    def add(p, e):
        if e:
            exps[p] = exps.get(p, 0) + e

    for p, e in FactoredInteger.of(gp.dtilde).factors:
        add(p, e * (n0 + 1))
    for p in prime_divisors(gp.s_lcm):
        add(p, legendre_nu(p, n0 + 1))
    xval = gp.u[0] + gp.v[0] * n0
    for p in primes_upto(xval):
        if gp.v[0] % p != 0:
            add(p, floor_log(p, Fraction(xval)))
    return FactoredInteger.from_exponents(exps)


# ---------------------------------------------------------------------------
# The end-to-end audit
# ---------------------------------------------------------------------------


_TRUNCATION_CAP = 200_000


def _floor_log2_ratio(q: int, p: int) -> int:
    """floor(log2(q/p)) for integers q > p >= 1, without big powers."""
    e = q.bit_length() - p.bit_length()
    if (p << e) > q:
        e -= 1
    return e


def _phi_enclosure_for_target(gp: GParams, z: Fraction, target: Fraction) -> tuple[RealEnclosure, int]:
    """Enclosure of phi(z) with width <= target.

    The truncation order is read off bit lengths: with |z| <= 2^-L and
    2^-G <= target*(1-|z|), any T >= G/L gives tail |z|^(T+1)/(1-|z|) below
    the target.  Points with |z| > 1/2 fall back to exact stepping.
    """
    az = abs(z)
    goal = target * (1 - az)
    L = _floor_log2_ratio(az.denominator, az.numerator)
    if L >= 1:
        G = max(1, goal.denominator.bit_length() - goal.numerator.bit_length() + 1)
        T = -(-G // L)
        if T > _TRUNCATION_CAP:
            raise PrecisionInsufficient("tail target unreachably small")
        return eval_phi_real(gp, z, T), T
    tail = az / (1 - az)
    T = 0
    while tail > target:
        T += 1
        tail *= az
        if T > _TRUNCATION_CAP:
            raise PrecisionInsufficient("tail target unreachably small")
    return eval_phi_real(gp, z, T), T


def audit_restricted(inst: RestrictedInstance) -> dict:
    """Run the whole restricted-approximation certification chain.

    Produces {"constants": ..., "checks": [...], "final_verdict": ...} where
    every check entry carries the comparison actually made.  Mathematical
    failures are reported (never silently accepted); hypothesis violations
    raise HypothesisFailure before any verdict is attempted.
    """
    gp = inst.gp
    rc = inst.constants
    prec = rc.precision
    a, b, B, M = inst.a, inst.b, inst.B, inst.M
    beta = Fraction(a, b)
    if not 0 < abs(beta) < 1:
        raise DomainViolation("evaluation point must satisfy 0 < |a/b| < 1")
    th = rc.mode.theta
    checks: list[dict] = []

    # hypotheses (certified): b-size, B-size, and M >= M0
    hyp_b = Fraction(b) >= (rc.a1 * abs(a)).pow_int(6).hi
    hyp_B = B ** inst.t.denominator <= b**inst.t.numerator
    if not (hyp_b and hyp_B):
        raise HypothesisFailure("size hypotheses on (b, B) fail")
    if Fraction(M) < inst.m0.hi:
        raise HypothesisFailure(f"M = {M} is below the certified threshold {_dec(inst.m0.hi, 6)}")
    checks.append(_entry("b_at_least_sixth_power", True, True, b, str((rc.a1 * abs(a)).pow_int(6).hi)))
    checks.append(_entry("M_at_least_threshold", True, True, M, _dec(inst.m0.hi, 6)))

    n1, n0 = inst.n1, inst.n0
    Nt = n0 + n1
    checks.append(_entry("x_at_least_3", True, inst.x.lo >= 3, _dec(inst.x.lo, 10), "3"))
    checks.append(_entry("exponent_gap", True, n0 - n1 + 1 >= M, n0 - n1 + 1, M))

    # the block-size constraints behind the choice of h
    log_b = log_interval(Fraction(b), prec)
    log_a2a = log_iv(rc.a2 * abs(a), prec)
    h_req = 12 * log_a2a / log_b
    checks.append(_entry("h_vs_12log", True, Fraction(inst.h) >= h_req.hi, inst.h, _dec(h_req.hi, 6)))
    checks.append(
        _entry("h_vs_4t", True, inst.h * inst.t.denominator >= 4 * inst.t.numerator, inst.h, str(4 * inst.t))
    )
    m_over = Fraction(M) / (inst.x.lo - 1)
    checks.append(_entry("h_vs_M_over_xm1", True, Fraction(inst.h) >= m_over, inst.h, _dec(m_over, 6)))
    checks.append(
        _entry(
            "h_vs_thresholds",
            True,
            inst.h >= max(rc.c_theta, rc.c_vartheta, 4),
            inst.h,
            max(rc.c_theta, rc.c_vartheta, 4),
        )
    )

    # family and specialized clearing integers
    shape = ApproxShape(n=(n1,), n0=n0)
    family = build_family(gp, shape)
    d1 = restricted_d1(gp, n1, n0)
    d2 = restricted_d2(gp, n0)
    ui = []
    vi = []
    for i in (0, 1):
        uval = Fraction(d1.value) * Fraction(b) ** n1 * _poly_eval(family.q[i], beta)
        vval = Fraction(d1.value * d2.value) * Fraction(b) ** (n0 + 1) * _poly_eval(
            family.p_coeffs(i, 1), beta
        )
        ok_u = uval.denominator == 1
        ok_v = vval.denominator == 1
        checks.append(_entry(f"integrality_scaled_q_{i}", True, ok_u, str(uval) if not ok_u else "", ""))
        checks.append(_entry(f"integrality_scaled_p_{i}", True, ok_v, str(vval) if not ok_v else "", ""))
        ui.append(uval)
        vi.append(vval)

    # coefficient envelope and the |z| < 1 evaluation bounds
    e1 = (
        n1
        * exp_iv(th * (2 * gp.r0 + gp.u[0]), prec)
        * (Interval.point(Fraction(gp.d_lcm, gp.s0)) * epsilon_interval(gp.s_lcm, prec)).pow_int(n1)
        * exp_iv(th * (2 * gp.s0 * n1 + gp.v[0] * Nt), prec)
    )
    gate_n1 = n1 >= rc.c_theta
    amax = max(abs(cf) for i in (0, 1) for cf in family.q[i])
    checks.append(_entry("coeff_envelope", gate_n1, amax <= e1.hi, str(amax), _dec(e1.hi, 6)))
    qbound = (e1 / (1 - abs(beta))).hi
    qmax = max(abs(_poly_eval(family.q[i], beta)) for i in (0, 1))
    checks.append(_entry("denom_poly_envelope", gate_n1, qmax <= qbound, str(qmax), _dec(qbound, 6)))

    # (working precision for the series value) target: a tenth of the final RHS
    rhs_iv = (Fraction(B) * Fraction(b) ** M * (rc.a1.pow_int(18) * abs(a) ** 17).pow_int(M)).inv()
    enc, terms_used = _phi_enclosure_for_target(gp, beta, rhs_iv.lo / 10)
    checks.append(_entry("enclosure_width", True, enc.width <= rhs_iv.lo / 10, _dec(enc.width, 40), _dec(rhs_iv.lo / 10, 40)))

    # remainder envelope at the evaluation point
    rbound = ((n1 + 1) * e1 * Interval.point(abs(beta)).pow_int(Nt + 1) / (1 - abs(beta))).hi
    rem_vals = []
    for i in (0, 1):
        qv = _poly_eval(family.q[i], beta)
        pv = _poly_eval(family.p_coeffs(i, 1), beta)
        lo = min(qv * enc.lower, qv * enc.upper) - pv
        hi = max(qv * enc.lower, qv * enc.upper) - pv
        rem_vals.append(max(abs(lo), abs(hi)))
        checks.append(_entry(f"remainder_envelope_{i}", gate_n1, rem_vals[i] <= rbound, _dec(rem_vals[i], 30), _dec(rbound, 30)))

    # the scaled product inequality driving the lower bound
    lhs25 = (
        rc.a2
        * abs(a)
        * (Interval.point(rc.vartheta * gp.d_lcm * gp.s0) * epsilon_interval(gp.s0, prec) * epsilon_interval(gp.v_lcm, prec)).pow_int(n1)
        * Fraction(gp.dtilde) ** n0
        * epsilon_interval(gp.s_lcm, prec).pow_int(Nt)
        * exp_iv(th * (2 * gp.s0 * n1 + (gp.s_lcm + gp.v_lcm) * n0 + gp.v_lcm * Nt), prec)
        * Fraction(abs(a)) ** Nt
        * B
        / Fraction(b) ** n1
    )
    checks.append(_entry("scaled_product_le_1", True, lhs25.hi <= 1, _dec(lhs25.hi, 12), "1"))

    # smallness of B*|R_i| against 1/(2 D1 D2 b^(n0+1))
    half_clear = Fraction(1, 2 * d1.value * d2.value * b ** (n0 + 1))
    for i in (0, 1):
        checks.append(
            _entry(f"remainder_small_{i}", True, B * rem_vals[i] <= half_clear, _dec(B * rem_vals[i], 40), _dec(half_clear, 40))
        )

    # candidate numerator: nearest integer to B*b^M*phi unless overridden
    scale = B * b**M
    lo_s, hi_s = enc.lower * scale, enc.upper * scale
    n_lo = (2 * lo_s.numerator + lo_s.denominator) // (2 * lo_s.denominator)
    n_hi = (2 * hi_s.numerator + hi_s.denominator) // (2 * hi_s.denominator)
    if n_lo != n_hi:
        raise PrecisionInsufficient("nearest integer undecided; raise the truncation")
    nearest = n_lo
    n_used = inst.candidate_n if inst.candidate_n is not None else nearest

    # the cleared combination W_i: nonzero for some row, divisible by b^M
    witness = None
    w_vals = []
    for i in (0, 1):
        w = n_used * d2.value * b ** (n0 - n1 + 1) * int(ui[i]) - B * b**M * int(vi[i])
        w_vals.append(w)
        if w != 0 and witness is None:
            witness = i
    checks.append(_entry("cleared_combination_nonzero", True, witness is not None, str(w_vals[0]), str(w_vals[1])))
    if witness is not None and n0 - n1 + 1 >= M:
        checks.append(
            _entry("cleared_combination_divisible", True, w_vals[witness] % b**M == 0, f"i={witness}", f"b^{M}")
        )

    # scaled distance bound at the witness row:
    # |Q_i(beta)| * |n - B b^M phi| >= b^M / (2 D1 D2 b^(n0+1))
    if witness is not None:
        qv = abs(_poly_eval(family.q[witness], beta))
        dist_abs_lo = max(Fraction(0), n_used - hi_s, lo_s - n_used)
        lhs_lower = qv * dist_abs_lo
        rhs24 = Fraction(b**M, 2 * d1.value * d2.value * b ** (n0 + 1))
        checks.append(_entry("scaled_distance_bound", True, lhs_lower >= rhs24, _dec(lhs_lower, 30), _dec(rhs24, 30)))

    # the final lower bound, decided against the enclosure
    target = Fraction(n_used, scale)
    if target <= enc.lower:
        dist_lo = enc.lower - target
    elif target >= enc.upper:
        dist_lo = target - enc.upper
    else:
        dist_lo = Fraction(0)
    final_ok = dist_lo >= rhs_iv.hi
    checks.append(
        _entry(
            "final_lower_bound",
            True,
            final_ok,
            _dec(dist_lo, 40),
            _dec(rhs_iv.hi, 40),
        )
    )

    failed = [c["name"] for c in checks if c["applicable"] and c["passed"] is False]
    verdict = "all checks passed" if not failed else f"FAILED: {', '.join(failed)}"
    return {
        "constants": {
            "a1": {"value": _dec(rc.a1.hi, 12), "direction": "upper", "precision_bits": prec},
            "a1_variant": rc.a1_variant,
            "a2": {"value": _dec(rc.a2.hi, 12), "direction": "upper", "precision_bits": prec},
            "x": {"value": _dec(inst.x.lo, 10), "direction": "lower", "precision_bits": prec},
            "h": inst.h,
            "n0": n0,
            "n1": n1,
            "M": M,
            "M0": {"value": _dec(inst.m0.hi, 10), "direction": "upper", "precision_bits": prec},
            "D1": str(d1.value),
            "D2": str(d2.value),
            "E1": {"value": _dec(e1.hi, 8), "direction": "upper", "precision_bits": prec},
            "candidate_n_digits": len(str(abs(n_used))),
            "nearest_n_used": inst.candidate_n is None,
            "series_terms": terms_used,
        },
        "checks": checks,
        "final_verdict": verdict,
    }
