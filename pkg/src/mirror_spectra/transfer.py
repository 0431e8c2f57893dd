"""Transfer-matrix oracle for chi_q, plus the R-iteration dynamics.

The functional equation rewrites as a 2x2 linear cocycle with

    L(u) = ( 1 - eps u + u^2   -q^2 u^2 )
           ( 1                  0       )

and M_n(u) = L(u) L(q^2 u) ... L(q^{2(n-1)} u).  As n grows the second
column dies off like q^{4n} and

    M_inf(u) = ( chi(u/q^2)  0 )
               ( chi(u)      0 ),

which gives a computation of chi that shares no code with the series in
chi.py -- that is the point: the two routes cross-check each other.

The scalar Riccati form R(q^2 u) = q^2 u^2 / ((1 - eps u + u^2) - R(u))
separates the regular solution from all others: iterating from z towards 0,
R(q^{2n} z) -> 1 exactly on the trajectory R(z) = chi(q^{-2} z)/chi(z) and
-> 0 everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .chi import ZERO_FLOOR, chi_eval
from .precision import (
    ModularParam,
    PoleSignal,
    PrecCtx,
    PrecisionExceeded,
)


@dataclass(frozen=True)
class TransferMatrix:
    a: object  # (1,1)
    b: object  # (1,2)
    c: object  # (2,1)
    d: object  # (2,2)

    def mul(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
        )

    def det(self):
        return self.a * self.d - self.b * self.c


def L_eval(u, eps, mpar: ModularParam) -> TransferMatrix:
    """The one-step transfer matrix; L(0) is the projection ((1,0),(1,0))."""
    with mp.workprec(mpar.precision_bits):
        u = mp.mpmathify(u)
        eps = mp.mpmathify(eps)
        q2 = mpar.q * mpar.q
        return TransferMatrix(
            a=1 - eps * u + u * u,
            b=-q2 * u * u,
            c=mp.mpf(1),
            d=mp.mpf(0),
        )


def M_n_eval(u, n: int, eps, mpar: ModularParam, ctx: PrecCtx) -> TransferMatrix:
    """M_n(u) = L(u) L(q^2 u) ... L(q^{2(n-1)} u) (ordered product)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    with ctx.workprec():
        u = mp.mpmathify(u)
        q2 = mpar.q * mpar.q
        m = L_eval(u, eps, mpar)
        uk = u
        for _ in range(n - 1):
            uk = uk * q2
            m = m.mul(L_eval(uk, eps, mpar))
        return m


def chi_via_Minf(u, eps, mpar: ModularParam, ctx: PrecCtx):
    """(chi(u), chi(u/q^2)) from the infinite matrix product.

    Stops once the a-priori q^{4n} decay of the discarded column is below
    tol relative to the first column, and the first column has stabilised.
    """
    with ctx.workprec():
        u = mp.mpmathify(u)
        if u == 0:
            return mp.mpf(1), mp.mpf(1)
        q2 = mpar.q * mpar.q
        aq = abs(mpar.q)
        tol = mp.mpf(ctx.tol)
        m = L_eval(u, eps, mpar)
        uk = u
        rate = mp.mpf(1)
        prev = None
        for n in range(1, ctx.max_terms):
            uk = uk * q2
            m = m.mul(L_eval(uk, eps, mpar))
            rate *= aq ** 4
            scale = max(abs(m.a), abs(m.c), mp.mpf(1))
            settled = (
                prev is not None
                and abs(m.a - prev.a) <= tol * scale
                and abs(m.c - prev.c) <= tol * scale
            )
            if settled and rate * max(abs(u) ** 2, mp.mpf(1)) < tol:
                return m.c, m.a
            prev = m
        raise PrecisionExceeded(
            f"matrix product did not settle within {ctx.max_terms} factors"
        )


def R_orbit(z, R0, steps: int, eps, mpar: ModularParam, ctx: PrecCtx):
    """The forward R-iteration [R(z), R(q^2 z), ..., R(q^{2*steps} z)].

    Requires chi(z) != 0 so the reference trajectory R_chi(z) is defined.
    A blow-up of the iteration (denominator inside the zero floor) raises
    PoleSignal rather than silently returning huge numbers.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    with ctx.workprec():
        z = mp.mpmathify(z)
        r = mp.mpmathify(R0)
        chi_z, _ = chi_eval(z, eps, mpar, ctx)
        if abs(chi_z) < ZERO_FLOOR * mp.mpf(ctx.tol):
            raise ValueError(f"chi(z) vanishes at z = {mp.nstr(z, 8)}")
        q2 = mpar.q * mpar.q
        out = [r]
        uk = z
        for k in range(steps):
            den = (1 - eps * uk + uk * uk) - r
            scale = max(abs(1 - eps * uk + uk * uk), abs(r), mp.mpf(1))
            if abs(den) < mp.mpf(ctx.tol) * scale:
                raise PoleSignal(
                    f"R iteration hit a pole at step {k + 1} (u = {mp.nstr(uk, 8)})"
                )
            r = q2 * uk * uk / den
            out.append(r)
            uk = uk * q2
        return out


def classify_r_orbit(seq, ctx: PrecCtx) -> str:
    """'one' / 'zero' / 'critical' for a finished R-orbit.

    The exceptional trajectory is repelling, and the repulsion accelerates
    (the step-k amplification is ~ |q|^{-2(2k+1)}), so finite-precision
    seeds only track it for a handful of steps; classification reads the
    last element against a coarse margin and anything in between is
    'critical' -- undecided, not an error.
    """
    last = abs(mp.mpmathify(seq[-1]))
    margin = 1e-6
    if abs(last - 1) < margin:
        return "one"
    if last < margin:
        return "zero"
    return "critical"
