"""Precision context, modular parameters, q-Pochhammer symbols and theta1.

Foundation layer for everything else in the package:

  * ``PrecCtx``        -- working precision + tolerance + series caps;
  * ``ModularParam``   -- the coupling data (theta, b, q, qbar) with exact
                          logarithms of the nomes;
  * ``pochhammer_q``   -- finite and infinite q-Pochhammer products;
  * ``theta1``         -- Jacobi theta_1 in logarithmic coordinates.

All functions are pure: they take immutable inputs, enter an mpmath
``workprec`` block sized by the context, and return mpmath scalars.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from mpmath import mp


# ── errors ──────────────────────────────────────────────────────────────────

class SolverError(Exception):
    """Base class for numerical failures in this package."""


class PrecisionExceeded(SolverError):
    """A series or iteration hit its hard cap before reaching tolerance."""


class ConvergenceError(SolverError):
    """An iterative solve (Newton, continuation, bracketing) did not converge."""


class PoleSignal(SolverError):
    """A denominator fell below the zero floor: the requested value sits on
    (or too close to) a pole and must be handled by the caller."""


# ── precision context ───────────────────────────────────────────────────────

@dataclass(frozen=True)
class PrecCtx:
    """Working precision in bits, target tolerance, and series term cap."""

    precision_bits: int
    tol: float
    max_terms: int = 4096

    def __post_init__(self) -> None:
        if self.precision_bits < 64:
            raise ValueError(f"precision_bits must be >= 64, got {self.precision_bits}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        # tolerance must be achievable at the working precision
        if math.log2(self.tol) < -self.precision_bits + 16:
            raise ValueError(
                f"tol={self.tol} is unreachable at {self.precision_bits} bits "
                f"(need tol >= 2^{-self.precision_bits + 16})"
            )
        if self.max_terms < 16:
            raise ValueError(f"max_terms must be >= 16, got {self.max_terms}")

    def workprec(self):
        """mpmath precision guard for this context."""
        return mp.workprec(self.precision_bits)


def make_context(precision_bits: int = 192, tol: float = 1e-40,
                 max_terms: int = 4096) -> PrecCtx:
    """Build a precision context; all downstream operations carry it."""
    return PrecCtx(precision_bits=int(precision_bits), tol=float(tol),
                   max_terms=int(max_terms))


# ── modular parameters ──────────────────────────────────────────────────────

_PI_FRACTION = re.compile(
    r"^\s*(?:(?P<num>\d+)\s*\*\s*)?pi\s*(?:/\s*(?P<den>\d+))?\s*$", re.IGNORECASE
)


def _parse_pi_fraction(theta) -> "object | None":
    """Return num/den as an exact mpf ratio for strings like 'pi/4', else None."""
    if not isinstance(theta, str):
        return None
    m = _PI_FRACTION.match(theta)
    if m is None:
        return None
    num = int(m.group("num") or 1)
    den = int(m.group("den") or 1)
    return mp.mpf(num) / den

@dataclass(frozen=True)
class ModularParam:
    """Coupling data b = e^{i theta} on the unit circle and both nomes.

    ``log_q`` and ``log_qbar`` are stored explicitly:  q = e^{i pi b^2} and
    qbar = e^{-i pi b^{-2}}, so the logarithms are exact data, and powers
    such as q^{2n} u stay on one branch when taken in log coordinates.
    ``conjugate`` swaps the two nomes (and b with 1/b); it must NOT be
    rebuilt through the theta formula, because the swapped problem has
    log q = -i pi b^2 rather than +i pi b^2.
    """

    theta: object   # mpf
    b: object       # mpc
    q: object       # mpc
    qbar: object    # mpc
    log_q: object   # mpc
    log_qbar: object  # mpc
    precision_bits: int = 192  # precision the fields were computed at

    def __post_init__(self) -> None:
        # strict |q| < 1, with a double-ulp margin so the degenerate angles
        # theta = 0, pi/2 are rejected even when rounding lands just inside
        if not abs(self.q) < 1 - 1e-15:
            raise ValueError(f"|q| must be < 1, got |q| = {abs(self.q)}")
        if not abs(self.qbar) < 1 - 1e-15:
            raise ValueError(f"|qbar| must be < 1, got |qbar| = {abs(self.qbar)}")

    @classmethod
    def from_theta(cls, theta, ctx: PrecCtx) -> "ModularParam":
        """Construct from the coupling angle theta in (0, pi/2).

        ``theta`` may be a number (radians) or a string such as ``"pi/4"`` or
        ``"3*pi/8"``; the string form keeps pi-fractions exact at working
        precision, which the reference tables require.
        """
        with ctx.workprec():
            frac = _parse_pi_fraction(theta)
            if frac is not None:
                th = mp.pi * frac
                b = mp.expjpi(frac)            # e^{i pi frac}, exact arg
            else:
                th = mp.mpf(theta)
                b = mp.exp(mp.mpc(0, 1) * th)
            log_q = mp.mpc(0, 1) * mp.pi * b * b
            log_qbar = -mp.mpc(0, 1) * mp.pi / (b * b)
            q = mp.exp(log_q)
            qbar = mp.exp(log_qbar)
        return cls(theta=th, b=b, q=q, qbar=qbar, log_q=log_q,
                   log_qbar=log_qbar, precision_bits=ctx.precision_bits)

    def conjugate(self) -> "ModularParam":
        """The modular-dual problem: b -> 1/b, q <-> qbar (field swap).

        On |b| = 1 the inverse is the literal conjugate, which is exact."""
        with mp.workprec(self.precision_bits):
            b_inv = mp.conj(self.b)
        return ModularParam(theta=self.theta, b=b_inv,
                            q=self.qbar, qbar=self.q,
                            log_q=self.log_qbar, log_qbar=self.log_q,
                            precision_bits=self.precision_bits)

    @property
    def in_supported_range(self) -> bool:
        """Desk-scale coupling window: series slow down as theta -> 0."""
        return mp.pi / 8 <= self.theta < mp.pi / 2


# ── q-Pochhammer ────────────────────────────────────────────────────────────

def pochhammer_q(x, q, n: Union[int, float], ctx: PrecCtx):
    """(x; q)_n = prod_{i=0}^{n-1} (1 - x q^i), with n a non-negative integer
    or infinity (requires |q| < 1)."""
    infinite = n == mp.inf or (isinstance(n, float) and math.isinf(n))
    with ctx.workprec():
        x = mp.mpmathify(x)
        q = mp.mpmathify(q)
        if not infinite:
            n = int(n)
            if n < 0:
                raise ValueError(f"n must be >= 0 or infinite, got {n}")
            prod = mp.mpf(1)
            qk = mp.mpf(1)
            for _ in range(n):
                prod *= 1 - x * qk
                qk *= q
            return prod
        # infinite product
        if not abs(q) < 1:
            raise ValueError(f"infinite product needs |q| < 1, got |q| = {abs(q)}")
        prod = mp.mpf(1)
        qk = mp.mpf(1)
        tol = mp.mpf(ctx.tol)
        small = 0
        for _ in range(ctx.max_terms):
            factor_dev = x * qk
            prod *= 1 - factor_dev
            qk *= q
            if abs(factor_dev) < tol:
                small += 1
                if small >= 3:
                    return prod
            else:
                small = 0
        raise PrecisionExceeded(
            f"(x;q)_inf did not stabilize within {ctx.max_terms} factors "
            f"(|q| = {abs(q)})"
        )


# ── Jacobi theta_1 in log coordinates ───────────────────────────────────────

def theta1(x_log, q, ctx: PrecCtx):
    """theta_1(u, q) = (1/i) sum_{n in Z} (-1)^n q^{(n+1/2)^2} u^{n+1/2},
    with u = e^{x_log} and u^{n+1/2} := e^{x_log (n+1/2)}.

    The caller supplies the exponent ``x_log``, never u itself: that pins the
    half-integer powers to one branch.  Pairing n with -n-1 gives the real
    form -2i sum_{n>=0} (-1)^n q^{(n+1/2)^2} sinh((n+1/2) x_log).
    """
    with ctx.workprec():
        w = mp.mpmathify(x_log)
        q = mp.mpmathify(q)
        if not abs(q) < 1:
            raise ValueError(f"theta1 needs |q| < 1, got |q| = {abs(q)}")
        lq = mp.log(q)
        aq = abs(q)
        arew = abs(mp.re(w))
        tol = mp.mpf(ctx.tol)
        s = mp.mpc(0)
        tmax = mp.mpf(0)
        small = 0
        for n in range(ctx.max_terms):
            h = mp.mpf(2 * n + 1) / 2          # n + 1/2
            term = mp.exp(lq * h * h) * mp.sinh(h * w)
            if n % 2:
                term = -term
            s += term
            # bound >= |term|; it also bounds every later term's growth factor
            bound = aq ** (h * h) * mp.exp(h * arew)
            if bound > tmax:
                tmax = bound
            at = abs(term)
            if at > tmax:
                tmax = at
            scale = max(abs(s), tmax)
            if bound < tol * scale:
                small += 1
                if small >= 3:
                    return mp.mpc(0, -2) * s
            else:
                small = 0
        raise PrecisionExceeded(
            f"theta1 series did not reach tol within {ctx.max_terms} terms"
        )
