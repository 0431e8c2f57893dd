"""Closed-form eigenfunction evaluation.

For a quantized state (sigma, eps, xi) the wave function is

    psi(x) = b^-1 e^{pi i sigma^2 - xi pi i/4} e^{2 pi eta x + i pi x^2}
             (chk(u) barchi(ubar) + xi chi(u) barchk(ubar))
             / (theta1(s u, q) theta1(u/s, q)),

with u = e^{2 pi b x}, ubar = e^{2 pi x / b}, s = e^{2 pi b sigma}, and every
barred factor evaluated with conjugated data (ubar, conj eps, conj q) -- the
analytic continuation of complex conjugation off the real axis.  The decay
rate eta = (b + 1/b)/2 = cos(theta) is the unique value compatible with both
asymptotic shift equations at once.

On the real axis the theta denominator vanishes at x in +-sigma + 2 sin(theta) Z;
at a quantized point the numerator cancels these zeros (that is the
quantization condition), and evaluation there goes through small offsets and
a Richardson limit rather than 0/0.
"""

from dataclasses import dataclass
from typing import Optional

from mpmath import mp

from .chi import chi_check_eval, chi_eval
from .precision import ModularParam, PoleSignal, PrecCtx, theta1
from .spectral import SpectralPoint, factorize

_NEAR_ZERO = 1e-6          # lattice distance (in log-u units) triggering care
_RICHARDSON_H = ("1e-8", "1e-9")


@dataclass(frozen=True)
class EigenfunctionParams:
    point: SpectralPoint
    eta: object            # (b + 1/b)/2, real on |b| = 1
    rho: object            # theta-factorization prefactor; None if unquantized
    mpar: ModularParam
    mpar_conj: ModularParam


@dataclass(frozen=True)
class PoleCancellationReport:
    at_s: object
    at_q2s: object
    at_inv_s: object
    max_normalized: object


def make_params(point: SpectralPoint, mpar: ModularParam, ctx: PrecCtx) -> EigenfunctionParams:
    if point.parity not in (+1, -1, None):
        raise ValueError(f"parity must be +1, -1 or None, got {point.parity}")
    with ctx.workprec():
        eta = (mpar.b + 1 / mpar.b) / 2
        # rounding of b = e^{i theta} leaves Im eta ~ 2^-prec; scale the guard
        slack = max(mp.mpf("1e-30"), mp.mpf(2) ** (-(ctx.precision_bits - 12)))
        if abs(eta.imag) > slack * max(abs(eta), 1):
            raise ValueError("eta = (b + 1/b)/2 must be real on |b| = 1")
        rho = None
        if point.parity in (+1, -1):
            rho = factorize(point.sigma, point.eps, mpar, ctx).rho
    return EigenfunctionParams(
        point=point, eta=eta, rho=rho, mpar=mpar, mpar_conj=mpar.conjugate()
    )


def _lattice_distance(w, lq):
    """Distance from w to the theta1 zero lattice {2k log q + 2 pi i m}."""
    a = w.real / (2 * lq.real)
    best = None
    for k in (mp.floor(a), mp.ceil(a)):
        c = (w.imag - 2 * k * lq.imag) / (2 * mp.pi)
        for m in (mp.floor(c), mp.ceil(c)):
            d = abs(w - 2 * k * lq - 2j * mp.pi * m)
            if best is None or d < best:
                best = d
    return best


def _psi_raw(x, p: EigenfunctionParams, ctx: PrecCtx):
    """The ansatz at a point where the denominator is comfortably nonzero."""
    mpar, mpar_c = p.mpar, p.mpar_conj
    pt = p.point
    xi = pt.parity if pt.parity in (+1, -1) else 1
    b = mpar.b
    sigma = mp.mpmathify(pt.sigma)
    eps = pt.eps
    u = mp.exp(2 * mp.pi * b * x)
    ubar = mp.exp(2 * mp.pi * x / b)
    num = (
        chi_check_eval(u, eps, mpar, ctx)
        * chi_eval(ubar, mp.conj(eps), mpar_c, ctx)[0]
        + xi
        * chi_eval(u, eps, mpar, ctx)[0]
        * chi_check_eval(ubar, mp.conj(eps), mpar_c, ctx)
    )
    den = theta1(2 * mp.pi * b * (x + sigma), mpar.q, ctx) * theta1(
        2 * mp.pi * b * (x - sigma), mpar.q, ctx
    )
    pref = (
        (1 / b)
        * mp.exp(mp.pi * 1j * sigma ** 2 - xi * mp.pi * 1j / 4)
        * mp.exp(2 * mp.pi * p.eta * x + 1j * mp.pi * x * x)
    )
    return pref * num / den


def psi_eval(x, p: EigenfunctionParams, ctx: PrecCtx):
    """psi(x); Richardson offsets across removable denominator zeros.

    Unquantized parameter sets (parity None) have genuine poles there and
    raise PoleSignal instead.
    """
    with ctx.workprec():
        x = mp.mpmathify(x)
        b = p.mpar.b
        sigma = mp.mpmathify(p.point.sigma)
        lq = p.mpar.log_q
        d = min(
            _lattice_distance(2 * mp.pi * b * (x + sigma), lq),
            _lattice_distance(2 * mp.pi * b * (x - sigma), lq),
        )
        if d >= mp.mpf(_NEAR_ZERO):
            return _psi_raw(x, p, ctx)
        if p.point.parity not in (+1, -1):
            raise PoleSignal(
                f"theta denominator zero near x = {mp.nstr(x, 8)} and the "
                "point is not quantized"
            )
        # removable singularity: evaluate at u (1 + h) for two offsets and
        # extrapolate the O(h) error away
        h1, h2 = (mp.mpf(h) for h in _RICHARDSON_H)
        x1 = x + mp.log(1 + h1) / (2 * mp.pi * b)
        x2 = x + mp.log(1 + h2) / (2 * mp.pi * b)
        v1 = _psi_raw(x1, p, ctx)
        v2 = _psi_raw(x2, p, ctx)
        return (h1 * v2 - h2 * v1) / (h1 - h2)


def psi_residual(x, p: EigenfunctionParams, ctx: PrecCtx, *, eps_in_equation=None):
    """(r1, r2): relative residuals of the pair of difference equations

        psi(x + i b)   + psi(x - i b)   = (eps      - 2 cosh(2 pi b x)) psi(x)
        psi(x + i/b)   + psi(x - i/b)   = (conj eps - 2 cosh(2 pi x/b)) psi(x)

    The ansatz solves both identically in eps, so detuning sensitivity is
    probed through eps_in_equation (replacing eps in the right-hand side
    only), not by rebuilding the state.
    """
    with ctx.workprec():
        x = mp.mpmathify(x)
        b = p.mpar.b
        eps = p.point.eps if eps_in_equation is None else mp.mpmathify(eps_in_equation)
        out = []
        for shift, coeff in (
            (1j * b, eps - 2 * mp.cosh(2 * mp.pi * b * x)),
            (1j / b, mp.conj(eps) - 2 * mp.cosh(2 * mp.pi * x / b)),
        ):
            up = psi_eval(x + shift, p, ctx)
            dn = psi_eval(x - shift, p, ctx)
            rhs = coeff * psi_eval(x, p, ctx)
            scale = max(abs(up), abs(dn), abs(rhs), mp.mpf(1))
            out.append(abs(up + dn - rhs) / scale)
        return out[0], out[1]


def pole_cancellation_check(p: EigenfunctionParams, ctx: PrecCtx) -> PoleCancellationReport:
    """Normalized numerator of the ansatz at the would-be poles u = s, q^2 s, 1/s.

    At a quantized point all three vanish (the spectral condition at u = s,
    propagated along the lattice by the G-periodicity); the report carries
    the numerator magnitudes relative to the size of its two products.
    """
    with ctx.workprec():
        pt = p.point
        xi = pt.parity if pt.parity in (+1, -1) else 1
        mpar, mpar_c = p.mpar, p.mpar_conj
        b = mpar.b
        sigma = mp.mpmathify(pt.sigma)
        eps = pt.eps
        q2 = mpar.q * mpar.q
        s = mp.exp(2 * mp.pi * b * sigma)
        sbar = mp.exp(2 * mp.pi * sigma / b)
        vals = []
        for u, ubar in ((s, sbar), (q2 * s, sbar), (1 / s, 1 / sbar)):
            t1 = chi_check_eval(u, eps, mpar, ctx) * chi_eval(
                ubar, mp.conj(eps), mpar_c, ctx
            )[0]
            t2 = chi_eval(u, eps, mpar, ctx)[0] * chi_check_eval(
                ubar, mp.conj(eps), mpar_c, ctx
            )
            vals.append(abs(t1 + xi * t2) / max(abs(t1), abs(t2), mp.mpf(1)))
        return PoleCancellationReport(
            at_s=vals[0],
            at_q2s=vals[1],
            at_inv_s=vals[2],
            max_normalized=max(vals),
        )
