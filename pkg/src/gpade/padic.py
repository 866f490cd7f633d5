"""Certified p-adic evaluation of the series and the linear-form audits.

A p-adic value is only ever reported one of two ways: with an exactly known
valuation and a unit residue certified to k digits, or as "below precision"
(absolute value at most p^-E).  Truncation can never prove a series value to
be zero, so zero is never claimed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod

from .arith import (
    Interval,
    LogUpperBound,
    epsilon_interval,
    floor_log,
    log_interval,
    log_iv,
    p_valuation,
    prime_divisors,
)
from .denom import DenominatorCert, ThetaMode, _dec, bound_constants, make_cert, ntilde1_interval, scaled_integers
from .errors import DomainViolation
from .pade import ApproxShape, PadeFamily, build_family, phi_coeffs, series_product_coeffs
from .params import GParams, padic_domain_check

__all__ = [
    "PAdicEnclosure",
    "LinearFormValuation",
    "LinearFormInstance",
    "BlockDegreeSelection",
    "eval_phi_padic",
    "eval_all_phi",
    "linear_form_valuation",
    "select_block_degrees",
    "audit_linear_form",
    "global_relation_constant",
    "probe_global_relation",
]


@dataclass(frozen=True)
class PAdicEnclosure:
    """value = p^valuation_offset * (unit_residue + O(p^k)).

    When k >= 1 the residue is a unit, so |value|_p = p^-valuation_offset is
    exact.  A "below precision" result is encoded as residue 0 with k = 0:
    all that is certified is |value|_p <= p^-valuation_offset.
    """

    p: int
    valuation_offset: int
    unit_residue: int
    k: int

    @property
    def below_precision(self) -> bool:
        return self.k == 0

    @property
    def certified_nonzero(self) -> bool:
        return self.k >= 1 and self.unit_residue % self.p != 0


def _series_tail_start(gp: GParams, p: int, q: Fraction, target: int) -> int:
    """Smallest T >= 3 such that every term of index > T certifiably has
    valuation >= target.

    Uses the per-term floor n*q - log_p(U + V*n), which is increasing in n
    for n >= 3 once q >= 1/2 (guaranteed by the convergence condition).
    """
    if q < Fraction(1, 2):
        raise DomainViolation("term valuations do not grow fast enough (q < 1/2)")
    T = 3
    while True:
        n = T + 1
        if n * q - (floor_log(p, Fraction(gp.U + gp.V * n)) + 1) >= target:
            return T
        T += 1


def _phi_partial(gp: GParams, j: int, beta: Fraction, T: int) -> Fraction:
    acc = Fraction(0)
    power = Fraction(1)
    for cf in phi_coeffs(gp, j, T):
        acc += cf * power
        power *= beta
    return acc


def _enclose(p: int, value: Fraction, tail_exponent: int) -> PAdicEnclosure:
    if value == 0:
        return PAdicEnclosure(p, tail_exponent, 0, 0)
    v0 = p_valuation(value, p)
    if v0 >= tail_exponent:
        return PAdicEnclosure(p, tail_exponent, 0, 0)
    digits = tail_exponent - v0
    num, den = value.numerator, value.denominator
    if v0 >= 0:
        num //= p**v0
    else:
        den //= p ** (-v0)
    mod = p**digits
    residue = num * pow(den, -1, mod) % mod
    return PAdicEnclosure(p, v0, residue, digits)


def eval_phi_padic(gp: GParams, j: int, beta: Fraction, p: int, k: int) -> PAdicEnclosure:
    """Enclosure of phi_j(beta) in the p-adics with k certified digits past
    the leading valuation (or a below-precision report at exponent k)."""
    if k < 1:
        raise ValueError("precision k must be >= 1")
    beta = Fraction(beta)
    if beta == 0:
        return PAdicEnclosure(p, 0, 1 % p**k, k)
    chk = padic_domain_check(gp, p, beta)
    if not chk.ok:
        raise DomainViolation(f"|{beta}|_{p} outside the convergence domain")
    w = p_valuation(beta, p) - p_valuation(Fraction(gp.dtilde), p)
    q = w - Fraction(chk.delta_p, p - 1)
    target = k
    for _ in range(2):
        T = _series_tail_start(gp, p, q, target)
        enc = _enclose(p, _phi_partial(gp, j, beta, T), target)
        if enc.below_precision or enc.k >= k:
            return enc
        target = k + enc.valuation_offset  # positive leading valuation: retry deeper
    return enc


def eval_all_phi(gp: GParams, beta: Fraction, p: int, k: int) -> tuple[PAdicEnclosure, ...]:
    return tuple(eval_phi_padic(gp, j, beta, p, k) for j in range(1, gp.m + 1))


@dataclass(frozen=True)
class LinearFormValuation:
    """|L|_p of an integer combination of enclosed values: either the exact
    valuation, or a certified bound |L|_p <= p^-precision_exponent."""

    p: int
    exact: bool
    valuation: int | None
    precision_exponent: int | None

    def abs_value(self) -> Fraction | None:
        if not self.exact:
            return None
        return Fraction(1, self.p**self.valuation) if self.valuation >= 0 else Fraction(self.p ** (-self.valuation))

    def upper_bound(self) -> Fraction:
        e = self.valuation if self.exact else self.precision_exponent
        return Fraction(1, self.p**e) if e >= 0 else Fraction(self.p ** (-e))


def linear_form_valuation(values: tuple[PAdicEnclosure, ...], ell: tuple[int, ...]) -> LinearFormValuation:
    """Combine enclosures of phi_1..phi_m with integer coefficients
    (ell_0, ..., ell_m) and certify |ell_0 + sum ell_j phi_j|_p."""
    if len(ell) != len(values) + 1:
        raise ValueError("need one coefficient per series plus the constant")
    if all(l == 0 for l in ell):
        raise ValueError("the zero form has no valuation")
    ps = {enc.p for enc in values}
    if len(ps) != 1:
        raise ValueError("need enclosures at exactly one prime")
    p = ps.pop()
    known = Fraction(ell[0])
    err = None
    for lj, enc in zip(ell[1:], values):
        if lj == 0:
            continue
        known += lj * Fraction(p) ** enc.valuation_offset * enc.unit_residue
        term_err = p_valuation(Fraction(lj), p) + enc.valuation_offset + enc.k
        err = term_err if err is None else min(err, term_err)
    if err is None:
        return LinearFormValuation(p, True, p_valuation(Fraction(ell[0]), p), None)
    if known != 0 and p_valuation(known, p) < err:
        return LinearFormValuation(p, True, p_valuation(known, p), None)
    return LinearFormValuation(p, False, None, err)


# ---------------------------------------------------------------------------
# Block-degree selection from a linear form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearFormInstance:
    ell: tuple[int, ...]
    tau: Fraction
    delta: Fraction

    def __post_init__(self):
        if all(l == 0 for l in self.ell):
            raise ValueError("the zero form is excluded")
        if self.tau <= 0 or self.delta < 0:
            raise ValueError("need tau > 0 and delta >= 0")

    @property
    def m(self) -> int:
        return len(self.ell) - 1

    @property
    def h(self) -> tuple[int, ...]:
        h0 = max(abs(l) for l in self.ell)
        return (h0,) + tuple(max(1, abs(l)) for l in self.ell[1:])

    @property
    def htilde(self) -> int:
        return prod(self.h)


@dataclass(frozen=True)
class BlockDegreeSelection:
    shape: ApproxShape
    clamped: tuple[bool, ...]  # index 0 is n0
    checks: dict


def select_block_degrees(inst: LinearFormInstance, a: int) -> BlockDegreeSelection:
    """Degrees n_j = floor(log(h_j * Htilde^tau) / log |a|), clamped to >= 1.

    The floor is decided by exact integer power comparison (tau is rational).
    When nothing was clamped, the two shape inequalities tying Ntilde and n0
    to log Htilde / log |a| are verified exactly and reported.
    """
    if abs(a) < 2:
        raise DomainViolation("block-degree selection needs |a| >= 2")
    A = abs(a)
    tn, td = inst.tau.numerator, inst.tau.denominator
    Ht = inst.htilde
    degrees = []
    for hj in inst.h:
        rhs = hj**td * Ht**tn
        t = 0
        while A ** ((t + 1) * td) <= rhs:
            t += 1
        degrees.append(t)
    clamped = tuple(dg < 1 for dg in degrees)
    n0 = max(1, degrees[0])
    n = tuple(max(1, dg) for dg in degrees[1:])
    n0 = max(n0, max(n))  # h0 >= h_j keeps this a no-op; belt and braces
    shape = ApproxShape(n=n, n0=n0)
    checks: dict = {"clamped_any": any(clamped)}
    if not any(clamped):
        mm = inst.m
        checks["ntilde_within_budget"] = A ** (shape.Ntilde * td) <= Ht ** (td + (mm + 1) * tn)
        checks["n0_within_budget"] = A ** (shape.n0 * td) <= Ht ** (td + tn)
    return BlockDegreeSelection(shape=shape, clamped=clamped, checks=checks)


# ---------------------------------------------------------------------------
# The linear-form audit
# ---------------------------------------------------------------------------


def _dec_iv(iv: Interval, digits: int = 12) -> str:
    return f"[{_dec(iv.lo, digits)}, {_dec(iv.hi, digits)}]"


def _scaled_remainder_partial(
    family: PadeFamily, cert: DenominatorCert, beta: Fraction, i: int, j: int, T: int
) -> Fraction:
    """Sum of D * b^Ntilde * c_ij_mu * beta^mu over the remainder window
    ord..T, exactly.  Extends the family's series if T exceeds its cache."""
    shape = family.shape
    start = shape.Nij(i, j) + shape.n[j - 1] + 1
    coeffs = family.c[i][j - 1]
    if T > family.T:
        coeffs = series_product_coeffs(family.gp, family.q[i], j, T)
    scale = Fraction(cert.d.value) * Fraction(beta.denominator) ** shape.Ntilde
    acc = Fraction(0)
    for mu in range(start, T + 1):
        acc += coeffs[mu] * beta**mu
    return acc * scale


def audit_linear_form(
    gp: GParams,
    beta: Fraction,
    p: int,
    inst: LinearFormInstance,
    mode: ThetaMode | None = None,
    prec: int = 128,
    eval_digits: int = 48,
) -> dict:
    """Audit the full p-adic lower-bound chain at a concrete instance.

    Reports (a) the smallness/largeness hypotheses on the evaluation point,
    (b) the height threshold, (c) the selected shape, (d) a witness row with
    nonzero cleared combination, (e) the exact dominance comparison between
    the combination and the remainder part, and (f) the final height bound
    when its preconditions hold.  Nothing is assumed: every comparison is
    either exact or directed.
    """
    mode = mode or ThetaMode.paper(prec)
    beta = Fraction(beta)
    a, b = beta.numerator, beta.denominator
    m = gp.m
    if len(inst.ell) != m + 1:
        raise ValueError("form length does not match the parameter count")
    report: dict = {
        "p": p,
        "beta": str(beta),
        "ell": list(inst.ell),
        "tau": str(inst.tau),
        "delta": str(inst.delta),
        "theta_mode": mode.label,
    }

    # hypothesis: ratio condition between tau and delta
    hyp_ratio = inst.tau > 4 * inst.delta * (1 + (m + 1) * inst.tau)

    # hypothesis: p-adic smallness of the numerator (non-strict form), plus
    # |a|_p <= |a|^(delta - 1) by exact power comparison
    chk = padic_domain_check(gp, p, Fraction(a))
    v_a = p_valuation(Fraction(a), p)
    v_s = p_valuation(Fraction(gp.s_lcm), p)
    small_nonstrict = v_a >= v_s + chk.delta_2p
    one_minus = 1 - inst.delta
    dn, dd = one_minus.numerator, one_minus.denominator
    small_power = Fraction(p) ** (v_a * dd) >= Fraction(abs(a)) ** dn

    cns = bound_constants(gp, mode, prec)
    log_a = log_interval(Fraction(abs(a)), prec)
    log_b = log_interval(Fraction(b), prec) if b > 1 else Interval.point(0)
    inv_tau = 1 / inst.tau
    rhs_large = 2 * (1 + inv_tau) * log_b + 2 * (
        cns.iv[2] * (1 + inv_tau) + (cns.iv[8] + 2) * (m + 1 + inv_tau)
    )
    large_arch = log_a.lo > rhs_large.hi

    report["hypotheses"] = {
        "ratio_condition": hyp_ratio,
        "point_padic_small": bool(small_nonstrict and small_power),
        "point_padic_small_strict_domain": bool(chk.ok),
        "point_archimedean_large": bool(large_arch),
        "log_rhs_large": _dec_iv(rhs_large),
        "all_met": bool(hyp_ratio and small_nonstrict and small_power and large_arch),
    }

    # height threshold
    nt1 = ntilde1_interval(gp, cns, beta, p)
    log_h0 = ((nt1 + (m + 1)) * log_a / (1 + (m + 1) * inst.tau)).max_with(8 * log_a / inst.tau)
    log_ht = log_interval(Fraction(inst.htilde), prec) if inst.htilde > 1 else Interval.point(0)
    ht_reaches = log_ht.lo >= log_h0.hi
    report["height_threshold"] = {
        "log_h0_upper": _dec_iv(log_h0),
        "log_htilde": _dec_iv(log_ht),
        "htilde_reaches_threshold": bool(ht_reaches),
    }

    # shape and family
    sel = select_block_degrees(inst, a)
    shape = sel.shape
    report["shape"] = {
        "n0": shape.n0,
        "n": list(shape.n),
        "clamped": list(sel.clamped),
        "checks": sel.checks,
    }
    family = build_family(gp, shape)
    cert = make_cert(gp, shape, mode, prec)
    scaled = scaled_integers(family, cert, beta, p=p)

    report["constants"] = {
        "c2_upper": str(cns.upper(2).value),
        "c8_upper": str(cns.upper(8).value),
        "ntilde1_upper": str(nt1.hi),
        "c_theta": mode.c_theta,
    }

    lambdas = []
    for i in range(m + 1):
        lam = scaled.qi[i] * inst.ell[0] + sum(
            scaled.pij[i][j - 1] * inst.ell[j] for j in range(1, m + 1)
        )
        lambdas.append(lam)
    report["lambda_values"] = [str(x) for x in lambdas]
    witnesses = [i for i, lam in enumerate(lambdas) if lam != 0]
    assert witnesses, "nonsingular scaled system must yield a nonzero combination"
    wi = min(witnesses, key=lambda i: p_valuation(Fraction(lambdas[i]), p))
    v_lambda = p_valuation(Fraction(lambdas[wi]), p)
    report["witness_index"] = wi
    report["witness"] = {"index": wi, "lambda": str(lambdas[wi]), "lambda_valuation": v_lambda}

    # remainder side: grow the truncation until the comparison is decided
    w = p_valuation(beta, p) - p_valuation(Fraction(gp.dtilde), p)
    q_rate = w - Fraction(chk.delta_p, p - 1)
    if q_rate < Fraction(1, 2):
        # cannot happen once the smallness condition holds; guards the tail bound
        raise DomainViolation("remainder terms do not gain valuation fast enough")
    dominance = None
    rem_desc = None
    T = family.T
    for _ in range(16):
        tail_exp = (T + 1) * q_rate - (floor_log(p, Fraction(gp.U + gp.V * (T + 1))) + 1)
        partial = Fraction(0)
        for j in range(1, m + 1):
            if inst.ell[j] == 0:
                continue
            partial += inst.ell[j] * _scaled_remainder_partial(family, cert, beta, wi, j, T)
        if partial != 0 and Fraction(p_valuation(partial, p)) < tail_exp:
            v_rem = p_valuation(partial, p)
            dominance = v_lambda < v_rem
            rem_desc = {"kind": "exact", "valuation": v_rem}
            break
        if Fraction(v_lambda) < tail_exp:
            dominance = True
            rem_desc = {"kind": "below", "exponent_at_least": str(tail_exp)}
            break
        T += max(8, shape.Ntilde)
    report["remainder_part"] = rem_desc or {"kind": "undecided"}
    report["dominance_holds"] = dominance

    # explicit lower bound for |Lambda|_p predicted by the chain
    log_p_iv = log_interval(Fraction(p), prec)
    pred = (
        -(cns.iv[2] * shape.n0 + (cns.iv[8] + 1) * shape.Ntilde)
        - (shape.Ntilde + 2) * log_a
        + (Interval.point(inst.tau) - (1 + inst.tau) * log_b / log_a) * log_ht
    )
    lhs_log = -v_lambda * log_p_iv
    report["lambda_lower_bound"] = {
        "log_lambda_abs_p": _dec_iv(lhs_log),
        "log_predicted_lower": _dec_iv(pred),
        "holds": bool(lhs_log.lo > pred.hi),
    }

    # the series-side value of the form, via enclosures
    encs = eval_all_phi(gp, beta, p, eval_digits)
    lf = linear_form_valuation(encs, inst.ell)
    report["linear_form"] = {
        "exact": lf.exact,
        "valuation": lf.valuation,
        "below_precision_exponent": lf.precision_exponent,
    }
    consistency = None
    if dominance and lf.exact:
        v_qi = p_valuation(Fraction(scaled.qi[wi]), p) if scaled.qi[wi] != 0 else None
        if v_qi is not None:
            consistency = v_qi + lf.valuation == v_lambda
    report["chain_consistency"] = consistency

    # final height bound |L|_p > Htilde^-(1+(m+1)tau)
    applicable = report["hypotheses"]["all_met"] and ht_reaches
    holds = None
    if lf.exact:
        c = 1 + (m + 1) * inst.tau
        cn, cd = c.numerator, c.denominator
        holds = Fraction(inst.htilde) ** cn > Fraction(p) ** (lf.valuation * cd)
    report["final_bound"] = {"applicable": bool(applicable), "holds_numerically": holds}

    # specialization tau = eps/(m+1), delta = eps/(8(m+1))
    eps = (m + 1) * inst.tau
    log_ctilde = 2 * cns.iv[2] * (m + 1 + eps) + 2 * (cns.iv[8] + 2) * (m + 1) * (1 + eps)
    spec_hyp = (eps * log_a).lo > (log_ctilde + 2 * (m + 1 + eps) * log_b).hi
    report["specialization"] = {
        "epsilon": str(eps),
        "delta_required": str(eps / (8 * (m + 1))),
        "delta_matches": inst.delta == eps / (8 * (m + 1)),
        "log_ctilde_upper": _dec_iv(log_ctilde),
        "power_hypothesis_met": bool(spec_hyp),
    }

    report["valuations"] = {
        "lambda": v_lambda,
        "remainder_part": rem_desc,
        "linear_form": lf.valuation if lf.exact else None,
    }

    if dominance:
        verdict = "combination dominates remainder part at this instance"
        if not report["hypotheses"]["all_met"] or not ht_reaches:
            verdict += "; asymptotic preconditions unmet, no height bound claimed"
    elif dominance is None:
        verdict = "dominance undecided at the probed truncations"
    else:
        verdict = "combination does not dominate at this instance"
    report["verdict"] = verdict
    return report


# ---------------------------------------------------------------------------
# Global relations over the primes dividing an integer point
# ---------------------------------------------------------------------------


def global_relation_constant(gp: GParams, mode: ThetaMode | None = None, prec: int = 128) -> dict:
    """The no-global-relation threshold log C, plus its cross-check.

    log C is the limiting display (prime-count factor pushed to 1):
      m*S + (m+1)*(3 + log(d*dtilde*s0*eps(s0)*eps(s)^2*eps(v)) + 2*s0 + (m+1)*V)
    and must agree with c2 + (m+1)*c8 evaluated at the same limit.
    """
    mode = mode or ThetaMode.paper(prec)
    m = gp.m
    inner = (
        Interval.point(gp.d_lcm * gp.dtilde * gp.s0)
        * epsilon_interval(gp.s0, prec)
        * epsilon_interval(gp.s_lcm, prec).pow_int(2)
        * epsilon_interval(gp.v_lcm, prec)
    )
    log_c = m * gp.S + (m + 1) * (3 + log_iv(inner, prec) + Interval.point(2 * gp.s0 + (m + 1) * gp.V))
    limit = ThetaMode.custom(Fraction(1), 0, label="limit")
    cns_limit = bound_constants(gp, limit, prec)
    c9_limit = cns_limit.iv[2] + (m + 1) * cns_limit.iv[8]
    cns_mode = bound_constants(gp, mode, prec)
    c9_mode = cns_mode.iv[2] + (m + 1) * cns_mode.iv[8]
    diff = c9_limit - log_c
    return {
        "log_C": LogUpperBound.from_interval(log_c, prec),
        "log_C_interval": log_c,
        "c9": LogUpperBound.from_interval(c9_mode, prec),
        "c9_interval": c9_mode,
        "c9_limit_interval": c9_limit,
        "crosscheck_abs_diff_upper": max(abs(diff.lo), abs(diff.hi)),
    }


def probe_global_relation(gp: GParams, a: int, ell: tuple[int, ...], k: int = 64, prec: int = 128) -> dict:
    """Try to certify, prime by prime over p | a, that the integer form does
    not vanish at the point a.  A single certified-nonzero prime rules out a
    global relation for this form; truncation alone can never confirm one."""
    if abs(a) <= 1:
        raise ValueError("need |a| > 1")
    if gcd(a, gp.s_lcm) != 1:
        raise DomainViolation("the point must be coprime to the parameter denominators")
    results = []
    nonzero_at = []
    for p in prime_divisors(abs(a)):
        encs = eval_all_phi(gp, Fraction(a), p, k)
        lf = linear_form_valuation(encs, tuple(ell))
        if lf.exact:
            nonzero_at.append(p)
            results.append({"p": p, "status": "nonzero", "valuation": lf.valuation})
        else:
            results.append(
                {"p": p, "status": "below_precision", "exponent": lf.precision_exponent}
            )
    verdict = (
        "no global relation for this form (certified nonzero at a dividing prime)"
        if nonzero_at
        else f"inconclusive at precision {k}: the form is below precision at every dividing prime"
    )
    return {"a": a, "ell": list(ell), "per_prime": results, "certified_nonzero_at": nonzero_at, "verdict": verdict}
