"""The regular solution chi_q(u, eps) and its relatives.

chi_q is the unique entire solution of

    f(u/q^2) + q^2 u^2 f(q^2 u) = (1 - eps u + u^2) f(u),    f(0) = 1,

computed from the orthogonal-polynomial series

    chi_q(u, eps) = sum_n chi_{q,n}(eps) / (q^-2; q^-2)_n u^n
                  = sum_n (-1)^n q^{n(n+1)} chi_{q,n}(eps) / (q^2; q^2)_n u^n,

whose second form has super-exponentially decaying terms for |q| < 1.  The
polynomials follow the three-term recursion

    chi_{q,n+1} = eps chi_{q,n} + (q^n - q^-n)^2 chi_{q,n-1},

with eps-derivatives propagated through the same recursion (forward mode).

Also here: the involution partner chi-check(u) = u^-1 chi(1/u), the dual
solution chi_{q^-1} = chi-check / W, the ratio G = chi / chi-check, and the
multiplication-rule checker for the polynomial family.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple

from mpmath import mp

from .precision import (
    ModularParam,
    PoleSignal,
    PrecCtx,
    PrecisionExceeded,
    pochhammer_q,
)

# denominators this close to zero (relative to the local scale) are poles
ZERO_FLOOR = 1e3


@dataclass(frozen=True)
class ChiPolySeq:
    """chi_{q,0..N}(eps) and their eps-derivatives."""

    eps: object
    q: object
    N: int
    values: tuple
    dvalues: tuple


def _poly_pairs(eps, q) -> Iterator[Tuple[object, object]]:
    """Yield (chi_n, dchi_n/deps) for n = 0, 1, 2, ... by the recursion."""
    chi_prev, dchi_prev = mp.mpf(1), mp.mpf(0)
    yield chi_prev, dchi_prev
    chi_cur, dchi_cur = eps, mp.mpf(1)
    yield chi_cur, dchi_cur
    n = 1
    while True:
        cn = (q ** n - q ** -n) ** 2
        chi_next = eps * chi_cur + cn * chi_prev
        dchi_next = chi_cur + eps * dchi_cur + cn * dchi_prev
        yield chi_next, dchi_next
        chi_prev, chi_cur = chi_cur, chi_next
        dchi_prev, dchi_cur = dchi_cur, dchi_next
        n += 1


def chi_poly_seq(eps, mpar: ModularParam, N: int, ctx: PrecCtx) -> ChiPolySeq:
    """Evaluate chi_{q,0..N}(eps) and derivatives at a numeric eps."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    with ctx.workprec():
        eps = mp.mpmathify(eps)
        gen = _poly_pairs(eps, mpar.q)
        values = []
        dvalues = []
        for _ in range(N + 1):
            v, dv = next(gen)
            if not mp.isfinite(v):
                raise PrecisionExceeded(
                    "chi polynomial overflow; raise the working precision"
                )
            values.append(v)
            dvalues.append(dv)
    return ChiPolySeq(eps=eps, q=mpar.q, N=N,
                      values=tuple(values), dvalues=tuple(dvalues))


def chi_eval(u, eps, mpar: ModularParam, ctx: PrecCtx):
    """chi_q(u, eps) and d chi / d eps, adaptively truncated.

    Uses the second series form: term_n = f_n chi_n(eps) u^n with
    f_{n+1} = f_n (-q^{2(n+1)}) / (1 - q^{2(n+1)}), f_0 = 1.  Stops when the
    last three term magnitudes sum below tol relative to the running scale
    (partial sum or largest term, whichever is bigger -- the sum itself can
    cross zero).
    """
    with ctx.workprec():
        u = mp.mpmathify(u)
        eps = mp.mpmathify(eps)
        q = mpar.q
        if not abs(q) < 1:
            raise ValueError(f"chi series needs |q| < 1, got |q| = {abs(q)}")
        if u == 0:
            return mp.mpf(1), mp.mpf(0)
        tol = mp.mpf(ctx.tol)
        q2 = q * q
        gen = _poly_pairs(eps, q)
        s = mp.mpc(0)
        ds = mp.mpc(0)
        f = mp.mpf(1)
        up = mp.mpf(1)
        q2p = mp.mpf(1)
        tmax = mp.mpf(0)
        w0 = w1 = w2 = mp.mpf(0)  # last three |term|
        for n in range(ctx.max_terms):
            chi_n, dchi_n = next(gen)
            if not mp.isfinite(chi_n):
                raise PrecisionExceeded(
                    "chi polynomial overflow; raise the working precision"
                )
            coeff = f * up
            t = coeff * chi_n
            s += t
            ds += coeff * dchi_n
            at = abs(t)
            if at > tmax:
                tmax = at
            w0, w1, w2 = w1, w2, at
            if n >= 2 and w0 + w1 + w2 < tol * max(abs(s), tmax):
                return s, ds
            up *= u
            q2p *= q2
            f *= -q2p / (1 - q2p)
        raise PrecisionExceeded(
            f"chi series did not reach tol within {ctx.max_terms} terms "
            f"(|u| = {abs(u)}); raise max_terms or precision"
        )


def chi_check_eval(u, eps, mpar: ModularParam, ctx: PrecCtx):
    """chi-check(u, eps) = u^-1 chi(1/u, eps), the second solution."""
    with ctx.workprec():
        u = mp.mpmathify(u)
        if u == 0:
            raise ValueError("chi-check is defined on u != 0")
        v, _ = chi_eval(1 / u, eps, mpar, ctx)
        return v / u


def _chi_check_with_d(u, eps, mpar: ModularParam, ctx: PrecCtx):
    """(chi-check(u), d chi-check / d eps); internal, for Wronskian columns."""
    with ctx.workprec():
        u = mp.mpmathify(u)
        if u == 0:
            raise ValueError("chi-check is defined on u != 0")
        v, dv = chi_eval(1 / u, eps, mpar, ctx)
        return v / u, dv / u


def _wronskian_value(u, eps, mpar: ModularParam, ctx: PrecCtx):
    """(W(u), local scale): W = chi(u/q^2) chk(u) - chk(u/q^2) chi(u)."""
    with ctx.workprec():
        q2 = mpar.q * mpar.q
        a, _ = chi_eval(u / q2, eps, mpar, ctx)
        b = chi_check_eval(u, eps, mpar, ctx)
        c = chi_check_eval(u / q2, eps, mpar, ctx)
        d, _ = chi_eval(u, eps, mpar, ctx)
        t1 = a * b
        t2 = c * d
        return t1 - t2, max(abs(t1), abs(t2))


def chi_dual_eval(u, eps, mpar: ModularParam, ctx: PrecCtx):
    """The dual solution chi_{q^-1}(u, eps) = chi-check(u) / W(u).

    Raises PoleSignal when u sits within the zero floor of a Wronskian zero
    (the dual solution has poles exactly there).
    """
    with ctx.workprec():
        u = mp.mpmathify(u)
        if u == 0:
            raise ValueError("chi_dual is defined on u != 0")
        w, scale = _wronskian_value(u, eps, mpar, ctx)
        if abs(w) < ZERO_FLOOR * mp.mpf(ctx.tol) * max(scale, mp.mpf(1)):
            raise PoleSignal(
                f"Wronskian zero at u = {mp.nstr(u, 8)}: dual solution pole"
            )
        return chi_check_eval(u, eps, mpar, ctx) / w


def G_eval(u, eps, mpar: ModularParam, ctx: PrecCtx):
    """G_q(u, eps) = chi(u) / chi-check(u); PoleSignal at chi-check zeros."""
    with ctx.workprec():
        u = mp.mpmathify(u)
        num, _ = chi_eval(u, eps, mpar, ctx)
        den = chi_check_eval(u, eps, mpar, ctx)
        if abs(den) < ZERO_FLOOR * mp.mpf(ctx.tol) * max(abs(num), abs(den), mp.mpf(1)):
            raise PoleSignal(
                f"chi-check zero at u = {mp.nstr(u, 8)}: G has a pole"
            )
        return num / den


def _mult_residual(m: int, n: int, eps, mpar: ModularParam, ctx: PrecCtx):
    """(residual, |lhs|, largest |term|) of the multiplication rule at ctx."""
    with ctx.workprec():
        eps = mp.mpmathify(eps)
        q = mpar.q
        seq = chi_poly_seq(eps, mpar, max(m + n, 2), ctx)
        chi = seq.values
        lhs = chi[m] * chi[n]
        rhs = mp.mpc(0)
        q2 = q * q
        qm2 = 1 / q2
        tmax = abs(lhs)
        for k in range(min(m, n) + 1):
            coeff = (
                pochhammer_q(q ** (2 * m), qm2, k, ctx)
                * pochhammer_q(q ** (2 * n), qm2, k, ctx)
                * pochhammer_q(q ** (2 * (k - m - n)), q2, k, ctx)
                / pochhammer_q(q2, q2, k, ctx)
            )
            term = coeff * chi[m + n - 2 * k]
            rhs += term
            if abs(term) > tmax:
                tmax = abs(term)
        return abs(lhs - rhs), abs(lhs), tmax


def chi_mult_check(m: int, n: int, eps, mpar: ModularParam, ctx: PrecCtx):
    """Absolute residual of the multiplication rule

    chi_m chi_n = sum_{k=0}^{min(m,n)} (q^{2m};q^-2)_k (q^{2n};q^-2)_k
                  (q^{2(k-m-n)};q^2)_k / (q^2;q^2)_k  chi_{m+n-2k}.

    The right side cancels massively (individual terms reach |q|^{-(m+n)^2/2}
    against a product of size |q|^{-(m^2+n^2)/2}), so after a first pass the
    measurement is repeated with enough guard bits to cover the observed
    amplification; the returned residual is then meaningful at ctx.tol.
    """
    if not (0 <= m <= 12 and 0 <= n <= 12):
        raise ValueError(f"multiplication check is desk-scale: 0 <= m,n <= 12, got {(m, n)}")
    res, lhs_mag, tmax = _mult_residual(m, n, eps, mpar, ctx)
    if tmax > lhs_mag > 0:
        lost_bits = int(mp.log(tmax / lhs_mag, 2)) + 32
        boosted = PrecCtx(
            precision_bits=min(ctx.precision_bits + lost_bits, 8192),
            tol=ctx.tol,
            max_terms=ctx.max_terms,
        )
        res, _, _ = _mult_residual(m, n, eps, mpar, boosted)
    return res
