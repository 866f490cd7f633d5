"""Parameter validation and the integer data derived from the series inputs.

The toolkit works with m+1 positive rationals alpha_0, ..., alpha_m where the
upper parameters alpha_1, ..., alpha_m must be pairwise non-congruent mod 1.
All the integers the downstream modules need (reduced numerators and
denominators, the pairing integers d_j with s0*s_j = d_j*v_j, their lcms and
maxima) are derived once here and frozen.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple, Sequence

from .errors import IntegerDifference, NonPositiveAlpha
from .arith import p_valuation

__all__ = ["GParams", "derive_params", "padic_domain_check", "parse_params", "load_params", "DomainCheck"]


@dataclass(frozen=True)
class GParams:
    """Immutable bundle of the series parameters and all derived integers.

    Indexing convention: r/s cover j = 0..m (alpha_j = r_j/s_j reduced);
    u/v cover j = 1..m via alpha_j + alpha_0 = u_j/v_j reduced; d_j is the
    positive integer with s0*s_j = d_j*v_j.  s, v, d are lcms over j = 1..m,
    dtilde = d/(d, s0), and R, S, U, V are maxima over j = 1..m.
    """

    m: int
    alpha: tuple[Fraction, ...]
    r: tuple[int, ...]
    s: tuple[int, ...]
    u: tuple[int, ...]
    v: tuple[int, ...]
    d: tuple[int, ...]
    s_lcm: int
    v_lcm: int
    d_lcm: int
    dtilde: int
    R: int
    S: int
    U: int
    V: int

    @property
    def s0(self) -> int:
        return self.s[0]

    @property
    def r0(self) -> int:
        return self.r[0]

    def alpha0(self) -> Fraction:
        return self.alpha[0]


def derive_params(alphas: Sequence[Fraction]) -> GParams:
    """Validate the parameter list and derive every integer the toolkit uses.

    Raises NonPositiveAlpha for nonpositive entries and IntegerDifference(i, j)
    when alpha_i - alpha_j is an integer for some 1 <= i < j <= m.  The
    constraint deliberately does not involve alpha_0.
    """
    alphas = tuple(Fraction(a) for a in alphas)
    if len(alphas) < 2:
        raise ValueError("need alpha_0 and at least one upper parameter")
    m = len(alphas) - 1
    for a in alphas:
        if a <= 0:
            raise NonPositiveAlpha(f"alpha = {a} must be positive")
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            diff = alphas[i] - alphas[j]
            if diff.denominator == 1:
                raise IntegerDifference(i, j, diff)

    r = tuple(a.numerator for a in alphas)
    s = tuple(a.denominator for a in alphas)
    sums = [alphas[j] + alphas[0] for j in range(1, m + 1)]
    u = tuple(q.numerator for q in sums)
    v = tuple(q.denominator for q in sums)
    d = []
    for j in range(1, m + 1):
        prod = s[0] * s[j]
        assert prod % v[j - 1] == 0  # v_j divides s0*s_j by construction
        d.append(prod // v[j - 1])
    d = tuple(d)

    s_lcm = lcm(*s[1:])
    v_lcm = lcm(*v)
    d_lcm = lcm(*d)
    return GParams(
        m=m,
        alpha=alphas,
        r=r,
        s=s,
        u=u,
        v=v,
        d=d,
        s_lcm=s_lcm,
        v_lcm=v_lcm,
        d_lcm=d_lcm,
        dtilde=d_lcm // gcd(d_lcm, s[0]),
        R=max(r[1:]),
        S=max(s[1:]),
        U=max(u),
        V=max(v),
    )


class DomainCheck(NamedTuple):
    ok: bool
    delta_2p: int
    delta_p: int


def padic_domain_check(gp: GParams, p: int, beta: Fraction) -> DomainCheck:
    """Check |beta|_p < 2^(-delta(2,p)) * |s|_p, the p-adic convergence domain.

    delta(2,p) is 1 exactly when p = 2 and the lcm s of the upper-parameter
    denominators is even; delta_p flags whether p divides s at all.
    """
    beta = Fraction(beta)
    if beta == 0:
        raise ValueError("domain check requires beta != 0")
    s = gp.s_lcm
    delta_2p = 1 if (p == 2 and s % 2 == 0) else 0
    delta_p = 1 if s % p == 0 else 0
    # |beta|_p < 2^(-delta) * |s|_p  <=>  v_p(beta) > v_p(s) + delta*(p == 2)
    lhs_v = p_valuation(beta, p)
    rhs_v = p_valuation(Fraction(s), p)
    if delta_2p and p == 2:
        ok = lhs_v > rhs_v + 1
    else:
        ok = lhs_v > rhs_v
    return DomainCheck(ok, delta_2p, delta_p)


# ---------------------------------------------------------------------------
# Parameter files: "m = 2", "alpha0 = 1/2", ..., comments start with '#'.
# ---------------------------------------------------------------------------


def parse_params(text: str, source: str = "<params>") -> GParams:
    entries: dict[str, Fraction] = {}
    m_declared = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().lower()
        val = val.strip()
        try:
            if key == "m":
                m_declared = int(val)
            elif key.startswith("alpha"):
                entries[key] = Fraction(val)
            else:
                raise ValueError(f"unknown key {key!r}")
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from None
    if m_declared is None:
        raise ValueError(f"{source}: missing 'm = <int>' line")
    alphas = []
    for j in range(m_declared + 1):
        key = f"alpha{j}"
        if key not in entries:
            raise ValueError(f"{source}: missing '{key} = <num>/<den>'")
        alphas.append(entries[key])
    extra = set(entries) - {f"alpha{j}" for j in range(m_declared + 1)}
    if extra:
        raise ValueError(f"{source}: unexpected keys {sorted(extra)}")
    return derive_params(alphas)


def load_params(path: str) -> GParams:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_params(fh.read(), source=path)
