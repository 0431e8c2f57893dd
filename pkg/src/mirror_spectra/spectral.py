"""Wronskian spectral solver.

The two solutions chi(u) and chk(u) = u^-1 chi(1/u) of the chi-equation pair
into the Wronskian

    W(u, eps) = chi(u/q^2) chk(u) - chk(u/q^2) chi(u),

which obeys W(q^2 u) = W(u)/(q^2 u^2) and factorises as
rho(eps) theta1(s u) theta1(u/s) with s = e^{2 pi b sigma}.  A spectral sheet
is the root curve eps_k(sigma) of W(e^{2 pi b sigma}, eps) = 0 continued over
sigma in [0, sin theta]; eigenvalues are the points on a sheet where the
ratio G = chi(s)/chk(s) is purely imaginary (even states) or purely real
(odd states).  Endpoints sigma = 0 and sigma = sin theta carry double poles
and are excluded from the spectrum.
"""

from dataclasses import dataclass
from typing import Optional

from mpmath import mp

from .chi import _chi_check_with_d, chi_eval, G_eval
from .precision import (
    ModularParam,
    PrecCtx,
    SolverError,
    pochhammer_q,
    theta1,
)

ZERO_FLOOR = 1e3  # |W| below ZERO_FLOOR * tol * scale counts as a zero

_MAX_NEWTON = 80
_MAX_HALVINGS = 24
_FAST_NEWTON = 5          # continuation halves its step above this
_BISECT_FRAC = 1e-6       # bisection width target, relative to sin(theta)


# ── containers ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class WronskianFactorization:
    """A (sigma, eps) pair on the zero set of W, with the theta prefactor."""

    sigma: object
    s: object
    rho: object  # None until extracted
    eps: object


@dataclass(frozen=True)
class SpectralPoint:
    sheet: int
    sigma: object
    eps: object
    parity: Optional[int]  # +1 even, -1 odd, None undetermined


@dataclass(frozen=True)
class Orbit:
    sheet: int
    samples: tuple  # ordered ((sigma, eps), ...) with sigma increasing
    step: object


# ── Wronskian ─────────────────────────────────────────────────────────────


def _wronskian_parts(u, eps, mpar: ModularParam, ctx: PrecCtx):
    """(W, dW/deps, scale) with the scale set by the two products."""
    with ctx.workprec():
        u = mp.mpmathify(u)
        if u == 0:
            raise ValueError("Wronskian is defined on u != 0")
        q2 = mpar.q * mpar.q
        a, da = chi_eval(u / q2, eps, mpar, ctx)
        b, db = _chi_check_with_d(u, eps, mpar, ctx)
        c, dc = _chi_check_with_d(u / q2, eps, mpar, ctx)
        d, dd = chi_eval(u, eps, mpar, ctx)
        t1 = a * b
        t2 = c * d
        w = t1 - t2
        dw = da * b + a * db - dc * d - c * dd
        return w, dw, max(abs(t1), abs(t2))


def wronskian_eval(u, eps, mpar: ModularParam, ctx: PrecCtx):
    """(W(u, eps), dW/deps); u = 0 is rejected."""
    w, dw, _ = _wronskian_parts(u, eps, mpar, ctx)
    return w, dw


def wronskian_residue(eps, mpar: ModularParam, ctx: PrecCtx):
    """The u^-1 Laurent coefficient of W, by its explicit series

    sum_m (chi_m(eps)/(q^-2;q^-2)_m)^2 (q^{-2m} - q^{2m+2}).

    For real eps and 0 < q < 1 this is >= 1 - q^2 > 0: the two solutions
    never degenerate on the real axis.
    """
    from .chi import chi_poly_seq

    with ctx.workprec():
        q = mpar.q
        qm2 = 1 / (q * q)
        tol = mp.mpf(ctx.tol)
        s = mp.mpc(0)
        m = 0
        seq = chi_poly_seq(eps, mpar, 16, ctx)
        values = list(seq.values)
        gen = None
        small = 0
        while m < ctx.max_terms:
            if m >= len(values):
                seq = chi_poly_seq(eps, mpar, 2 * len(values), ctx)
                values = list(seq.values)
            term = (values[m] / pochhammer_q(qm2, qm2, m, ctx)) ** 2 * (
                q ** (-2 * m) - q ** (2 * m + 2)
            )
            s += term
            small = small + 1 if abs(term) <= tol * max(abs(s), 1) else 0
            if small >= 3:
                return s
            m += 1
        raise SolverError("residue series did not converge")


# ── Newton in eps at fixed sigma ──────────────────────────────────────────


def _sigma_to_s(sigma, mpar: ModularParam):
    return mp.exp(2 * mp.pi * mpar.b * mp.mpmathify(sigma))


def _solve_eps_counted(sigma, eps0, mpar: ModularParam, ctx: PrecCtx):
    """Newton for W(e^{2 pi b sigma}, eps) = 0; returns (eps, iterations)."""
    with ctx.workprec():
        s = _sigma_to_s(sigma, mpar)
        eps = mp.mpmathify(eps0)
        tol = mp.mpf(ctx.tol)
        w, dw, scale = _wronskian_parts(s, eps, mpar, ctx)
        for it in range(_MAX_NEWTON):
            if abs(w) <= tol * max(scale, 1):
                return eps, it
            if abs(dw) <= tol * max(abs(w), 1):
                raise SolverError(
                    f"dW/deps underflow at sigma = {mp.nstr(mp.mpmathify(sigma), 8)}: "
                    "near branch point"
                )
            step = w / dw
            lam = mp.mpf(1)
            for _ in range(_MAX_HALVINGS):
                trial = eps - lam * step
                wt, dwt, st = _wronskian_parts(s, trial, mpar, ctx)
                if abs(wt) < abs(w):
                    eps, w, dw, scale = trial, wt, dwt, st
                    break
                lam /= 2
            else:
                raise SolverError(
                    f"Newton stalled at sigma = {mp.nstr(mp.mpmathify(sigma), 8)}"
                )
        raise SolverError(
            f"Newton did not converge in {_MAX_NEWTON} steps "
            f"at sigma = {mp.nstr(mp.mpmathify(sigma), 8)}"
        )


def solve_eps(sigma, eps0, mpar: ModularParam, ctx: PrecCtx):
    """eps with |W(e^{2 pi b sigma}, eps)| < tol * scale, seeded at eps0."""
    eps, _ = _solve_eps_counted(sigma, eps0, mpar, ctx)
    return eps


# ── sheet seeds ───────────────────────────────────────────────────────────

# Truncated eps_k expansions in q at the two real endpoints, written as
# (leading power p, coefficient table {power: coeff}) for q^p * sum c_j q^j.
_SEEDS_AT_ZERO = {
    1: (0, {0: 2, 2: -2, 4: -4, 6: -2, 8: 14, 10: 50, 12: 40, 14: -268, 16: -1136}),
    2: (-2, {0: 1, 4: 1, 6: -1, 8: -1, 10: -1, 12: -2, 14: -1, 18: 1, 20: 6, 22: 11}),
    3: (-2, {0: 1, 4: 3, 6: 3, 8: 1, 10: -15, 12: -52, 14: -43, 16: 264, 18: 1127}),
    4: (-4, {0: 1, 8: 2, 14: 1, 18: -1, 20: -3, 22: -8, 24: -13}),
    6: (-6, {0: 1, 12: 2, 22: 1, 24: 1, 26: 1, 32: 2, 34: 2}),
}
_SEEDS_AT_SIN = {
    1: {0: 1, 1: -1, 2: 1, 4: -1, 6: -1, 7: 1, 8: -2, 9: 2, 10: -2, 11: 5, 12: -4},
    2: {0: 1, 1: 1, 2: 1, 4: -1, 6: -1, 7: -1, 8: -2, 9: -2, 10: -2, 11: -5, 12: -4},
}


def sin_theta(mpar: ModularParam):
    with mp.workprec(mpar.precision_bits):
        return mp.sin(mpar.theta)


def sheet_seed(k: int, endpoint, mpar: ModularParam, ctx: PrecCtx):
    """Newton seed for sheet k at sigma = 0 or sigma = sin(theta).

    Uses the truncated endpoint expansions in q where tabulated; other
    sheets fall back to the leading spiral power e^{2 pi b sigma} scaled to
    the sheet: q^{-2 floor(k/2)} at 0 and -q^{-(2 ceil(k/2) - 1)} at
    sin(theta).
    """
    if k < 1:
        raise ValueError(f"sheet index must be >= 1, got {k}")
    with ctx.workprec():
        q = mpar.q
        sth = sin_theta(mpar)
        at_zero = endpoint == 0
        if not at_zero and abs(mp.mpmathify(endpoint) - sth) > mp.mpf("1e-12"):
            raise ValueError("endpoint must be 0 or sin(theta)")
        if at_zero:
            if k in _SEEDS_AT_ZERO:
                p, table = _SEEDS_AT_ZERO[k]
                return q ** p * mp.fsum(c * q ** j for j, c in table.items())
            return q ** (-2 * (k // 2))
        if k in _SEEDS_AT_SIN:
            table = _SEEDS_AT_SIN[k]
            return -(1 / q) * mp.fsum(c * q ** j for j, c in table.items())
        return -(q ** (-(2 * ((k + 1) // 2) - 1)))


# ── sigma-continuation ────────────────────────────────────────────────────


def _advance(sigma, target, eps, sheet: int, mpar: ModularParam, ctx: PrecCtx):
    """Continue eps from sigma to target with adaptive sub-stepping.

    Slow Newton (more than _FAST_NEWTON iterations) halves the sub-step;
    once the halving floor is reached a converged-but-slow step is accepted
    (near-degenerate sheet pairs keep Newton slow at any step size).  Only
    an actual Newton failure at the floor aborts the continuation.
    """
    floor = (target - sigma) / 4096
    while sigma < target:
        h = target - sigma
        while True:
            try:
                cand, iters = _solve_eps_counted(sigma + h, eps, mpar, ctx)
            except SolverError:
                cand, iters = None, None
            if cand is not None and (iters <= _FAST_NEWTON or h <= floor):
                break
            h /= 2
            if h < floor and cand is None:
                raise SolverError(
                    f"continuation failed on sheet {sheet} at sigma = "
                    f"{mp.nstr(sigma + h, 8)}"
                )
        if abs(cand - eps) > mp.mpf("0.5") * (1 + max(abs(cand), abs(eps))):
            raise SolverError(
                f"continuation jump on sheet {sheet} at sigma = "
                f"{mp.nstr(sigma + h, 8)}: |d eps| = {mp.nstr(abs(cand - eps), 4)}"
            )
        sigma = sigma + h
        eps = cand
    return eps


def trace_orbit(k: int, npoints: int, mpar: ModularParam, ctx: PrecCtx) -> Orbit:
    """Continue eps_k(sigma) from sigma = 0 to sin(theta) on a uniform grid.

    Each grid node is Newton-polished with the previous eps as seed;
    between nodes _advance sub-steps adaptively, so branch-point slowdowns
    never knock the samples off the uniform grid.
    """
    if npoints < 16:
        raise ValueError(f"npoints must be >= 16, got {npoints}")
    with ctx.workprec():
        sth = sin_theta(mpar)
        step = sth / (npoints - 1)
        eps = solve_eps(0, sheet_seed(k, 0, mpar, ctx), mpar, ctx)
        samples = [(mp.mpf(0), eps)]
        for i in range(1, npoints):
            target = sth if i == npoints - 1 else i * step
            eps = _advance(samples[-1][0], target, eps, k, mpar, ctx)
            samples.append((target, eps))
        return Orbit(sheet=k, samples=tuple(samples), step=step)


# ── quantization along an orbit ───────────────────────────────────────────


def _parity_indicator(sigma, eps, parity: int, mpar: ModularParam, ctx: PrecCtx):
    """Re or Im of G/|G| at s(sigma): the scale-free quantization function."""
    g = G_eval(_sigma_to_s(sigma, mpar), eps, mpar, ctx)
    g = g / abs(g)
    return g.real if parity == 1 else g.imag


def quantize(orbit: Orbit, parity: int, mpar: ModularParam, ctx: PrecCtx):
    """All interior quantized states of the given parity along the orbit.

    Even states (parity +1) are the interior zeros of Re G/|G|, odd states
    (parity -1) those of Im G/|G|.  The endpoints are never eligible: G is
    exactly +-1 there (double-pole cases, excluded from the spectrum), which
    also makes the odd indicator vanish identically at both ends.
    """
    if parity not in (+1, -1):
        raise ValueError(f"parity must be +1 or -1, got {parity}")
    with ctx.workprec():
        sth = sin_theta(mpar)
        inner = orbit.samples[1:-1]
        vals = [
            _parity_indicator(sig, eps, parity, mpar, ctx) for sig, eps in inner
        ]
        points = []
        for i in range(len(inner) - 1):
            if vals[i] == 0 or mp.sign(vals[i]) == mp.sign(vals[i + 1]):
                continue
            (a, ea), (b, eb) = inner[i], inner[i + 1]
            fa = vals[i]
            eps = ea
            # bisection down to a narrow bracket
            while b - a > _BISECT_FRAC * sth:
                mid = (a + b) / 2
                eps = solve_eps(mid, eps, mpar, ctx)
                fm = _parity_indicator(mid, eps, parity, mpar, ctx)
                if fm == 0:
                    a = b = mid
                    break
                if mp.sign(fm) == mp.sign(fa):
                    a, fa = mid, fm
                else:
                    b = mid
            # secant polish on sigma (eps re-solved at every trial sigma)
            s0, s1 = a, b if b != a else a + _BISECT_FRAC * sth / 2
            f0 = _parity_indicator(s0, solve_eps(s0, eps, mpar, ctx), parity, mpar, ctx)
            eps1 = solve_eps(s1, eps, mpar, ctx)
            f1 = _parity_indicator(s1, eps1, parity, mpar, ctx)
            for _ in range(64):
                if f1 == f0:
                    break
                s2 = s1 - f1 * (s1 - s0) / (f1 - f0)
                if not (0 < s2 < sth):
                    s2 = (s0 + s1) / 2
                eps1 = solve_eps(s2, eps1, mpar, ctx)
                f2 = _parity_indicator(s2, eps1, parity, mpar, ctx)
                s0, f0, s1, f1 = s1, f1, s2, f2
                if abs(s1 - s0) <= mp.mpf("1e-34") * max(sth, 1):
                    break
            sigma_star = s1
            # simplicity guard: on real sigma the lattice +-q^Z meets the
            # ray s(sigma) only at integer multiples of sin(theta)
            if abs(sigma_star / sth - mp.nint(sigma_star / sth)) < mp.mpf("1e-10"):
                raise SolverError(
                    f"quantized point at sigma = {mp.nstr(sigma_star, 10)} "
                    "collides with the lattice +-q^Z"
                )
            points.append(
                SpectralPoint(
                    sheet=orbit.sheet, sigma=sigma_star, eps=eps1, parity=parity
                )
            )
        return points


# ── theta factorization ───────────────────────────────────────────────────

_RHO_TEST_OFFSETS = ("0.1", "0.23", "0.37")


def rho_extract(fact: WronskianFactorization, mpar: ModularParam, ctx: PrecCtx):
    """rho = W(u0) / (theta1(s u0) theta1(u0/s)) at three test points.

    The three values must agree to 10^3 tol relatively (u0-independence is
    what the factorization claims); their mean is returned.
    """
    with ctx.workprec():
        tol = mp.mpf(ctx.tol)
        two_pi_b = 2 * mp.pi * mpar.b
        sigma = mp.mpmathify(fact.sigma)
        rhos = []
        for x0s in _RHO_TEST_OFFSETS:
            x0 = mp.mpf(x0s)
            u0 = mp.exp(two_pi_b * x0)
            th_plus = theta1(two_pi_b * (x0 + sigma), mpar.q, ctx)
            th_minus = theta1(two_pi_b * (x0 - sigma), mpar.q, ctx)
            den = th_plus * th_minus
            if abs(den) < ZERO_FLOOR * tol:
                raise SolverError(
                    f"rho test point x0 = {x0s} too close to a theta zero"
                )
            w, _, _ = _wronskian_parts(u0, fact.eps, mpar, ctx)
            rhos.append(w / den)
        mean = mp.fsum(rhos) / len(rhos)
        spread = max(abs(r - mean) for r in rhos)
        if spread > mp.mpf(1e3) * tol * max(abs(mean), 1):
            raise SolverError(
                f"rho is not u0-independent (spread {mp.nstr(spread, 3)}): "
                "the factorization premise W(s) = 0 is violated"
            )
        if mean == 0:
            raise SolverError("rho extracted as zero")
        return mean


def factorize(sigma, eps, mpar: ModularParam, ctx: PrecCtx) -> WronskianFactorization:
    """Validated factorization record at a root (sigma, eps) of W."""
    with ctx.workprec():
        s = _sigma_to_s(sigma, mpar)
        w, _, scale = _wronskian_parts(s, eps, mpar, ctx)
        if abs(w) > ZERO_FLOOR * mp.mpf(ctx.tol) * max(scale, 1):
            raise SolverError(
                f"(sigma, eps) is not on the Wronskian zero set: |W| = "
                f"{mp.nstr(abs(w), 3)}"
            )
        fact = WronskianFactorization(sigma=mp.mpmathify(sigma), s=s, rho=None, eps=eps)
        rho = rho_extract(fact, mpar, ctx)
        return WronskianFactorization(sigma=fact.sigma, s=s, rho=rho, eps=eps)
