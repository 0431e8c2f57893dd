"""Self-dual Harper problem (b = 1): curve geometry, period integrals,
quantization, and Bloch-path eigenfunction evaluation.

The spectral curve cos(2 pi y) = eps/2 - cos(2 pi x) carries the deformed
potential theta_lambda = (x + lambda/sin(2 pi x)) dy.  For eps > 4 write
eps = 4 cosh^2(pi alpha); the imaginary-axis turning points are i alpha and
i beta with sinh(pi beta) = cosh(pi alpha).  Two independent cycles give the
period integrals

    A  = 4 I[0,1/2] s'(t)/sinh(2 pi s(t+1/2)) dt
    At = 4 I[0,1/2] s(t+1/2) s'(t) dt
    B  = I[0,1]   dt/sinh(2 pi r(t))
    Bt = I[0,1]   r(t) dt

over the path functions cosh(2 pi r(t)) = 1 - cos(pi t) + cosh(2 pi alpha)
and sinh(pi s(t)) = sinh(pi alpha) sin(pi t).  Single-valuedness of the
Bloch function e^{2 pi i I theta_lambda} forces lambda = Bt/B and quantizes
A lambda - At = n + 1.  The eigenfunction is phi(x) = sin(2 pi I)/sin(2 pi y)
accumulated along canonical paths from the base point P0 = (i alpha, 0):
both coordinates imaginary up to i alpha (xi-type), y real in [0, 1/2] up
to i beta (zeta-type), then y = 1/2 + i c beyond; off-axis arguments are
reached by a horizontal leg with y continued branch-by-branch.
"""

from dataclasses import dataclass

from mpmath import mp

from .precision import ConvergenceError, PrecCtx, SolverError, make_context

_GL_ORDER = 32
_GL_CACHE = {}
_LEG_STEPS = 192           # y-continuation march resolution per unit length
_NEAR_ZERO = 1e-6          # |sin(2 pi y)| below this: removable endpoint
_RICHARDSON_H = ("1e-8", "1e-9")
_SCAN_LO = "4.01"
_SCAN_HI = "1e6"
_SCAN_RATIO = "1.35"


@dataclass(frozen=True)
class SelfDualSpectrum:
    n: int                 # level
    eps: object            # real > 4
    alpha: object
    beta: object
    lam: object            # lambda = Btilde/B
    A: object
    Atilde: object
    B: object
    Btilde: object


# ── quadrature ────────────────────────────────────────────────────────────


def gauss_legendre_nodes(order: int, ctx: PrecCtx):
    """(node, weight) pairs of the Gauss-Legendre rule on [-1, 1].

    Nodes are Newton-refined Legendre roots from Chebyshev initial guesses,
    cached per (order, precision).
    """
    if order < 2 or order % 2:
        raise ValueError(f"order must be even and >= 2, got {order}")
    key = (order, ctx.precision_bits)
    got = _GL_CACHE.get(key)
    if got is not None:
        return got
    with ctx.workprec():
        floor = mp.mpf(2) ** (8 - mp.prec)
        half = []
        for i in range(order // 2):
            x = mp.cos(mp.pi * (i + mp.mpf(3) / 4) / (order + mp.mpf(1) / 2))
            for _ in range(64):
                p0, p1 = mp.mpf(1), x
                for k in range(2, order + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = order * (x * p1 - p0) / (x * x - 1)
                step = p1 / dp
                x -= step
                if abs(step) < floor:
                    break
            else:
                raise ConvergenceError(f"Legendre root {i} of {order} stalled")
            half.append((x, 2 / ((1 - x * x) * dp * dp)))
        nodes = tuple((-x, w) for x, w in half) + tuple(reversed(half))
    _GL_CACHE[key] = nodes
    return nodes


def composite_gl(f, a, b, ctx: PrecCtx, tol=None, max_depth=28):
    """Adaptive composite Gauss-Legendre quadrature of f over [a, b].

    Panels are bisected until refining moves a panel by less than its share
    of the absolute budget; a panel still moving at max_depth raises
    SolverError naming the subinterval.  The rule is open: f is never
    evaluated at panel endpoints.
    """
    with ctx.workprec():
        a, b = mp.mpmathify(a), mp.mpmathify(b)
        if a == b:
            return mp.mpf(0)
        budget = mp.mpf(ctx.tol if tol is None else tol)
        nodes = gauss_legendre_nodes(_GL_ORDER, ctx)

        def panel(x0, x1):
            h = (x1 - x0) / 2
            c = (x0 + x1) / 2
            return h * mp.fsum(w * f(c + h * x) for x, w in nodes)

        total = mp.mpf(0)
        stack = [(a, b, panel(a, b), 0)]
        while stack:
            x0, x1, coarse, depth = stack.pop()
            m = (x0 + x1) / 2
            left, right = panel(x0, m), panel(m, x1)
            fine = left + right
            if abs(fine - coarse) <= budget * abs((x1 - x0) / (b - a)) / 2:
                total += fine
            elif depth >= max_depth:
                raise SolverError(
                    "quadrature did not converge on subinterval "
                    f"[{mp.nstr(x0, 10)}, {mp.nstr(x1, 10)}]"
                )
            else:
                stack.append((x0, m, left, depth + 1))
                stack.append((m, x1, right, depth + 1))
        return total


# ── curve geometry ────────────────────────────────────────────────────────


def alpha_beta(eps, ctx: PrecCtx):
    """Turning-point parameters: eps = 4 cosh^2(pi alpha), sinh(pi beta) =
    cosh(pi alpha), both positive roots."""
    with ctx.workprec():
        eps = mp.mpmathify(eps)
        if mp.im(eps) != 0:
            raise ValueError("eps must be real")
        e = mp.re(eps)
        if e <= 4:
            raise ValueError(f"eps must exceed 4, got {mp.nstr(e, 12)}")
        ch = mp.sqrt(e) / 2   # cosh(pi alpha)
        return mp.acosh(ch) / mp.pi, mp.asinh(ch) / mp.pi


def path_funcs(eps, t, ctx: PrecCtx):
    """(r, s, s', r') at parameter t, by analytic differentiation of
    cosh(2 pi r) = 1 - cos(pi t) + cosh(2 pi alpha) and
    sinh(pi s) = sinh(pi alpha) sin(pi t)."""
    with ctx.workprec():
        t = mp.mpmathify(t)
        alpha, _ = alpha_beta(eps, ctx)
        sa = mp.sinh(mp.pi * alpha)
        ca2 = mp.cosh(2 * mp.pi * alpha)
        r = mp.acosh(1 - mp.cos(mp.pi * t) + ca2) / (2 * mp.pi)
        s = mp.asinh(sa * mp.sin(mp.pi * t)) / mp.pi
        sprime = sa * mp.cos(mp.pi * t) / mp.cosh(mp.pi * s)
        rprime = mp.sin(mp.pi * t) / (2 * mp.sinh(2 * mp.pi * r))
        return r, s, sprime, rprime


def period_integrals(eps, ctx: PrecCtx):
    """(A, Atilde, B, Btilde) to ctx.tol absolute error.

    The 0/0 of the A-integrand at t = 1/2 is removed exactly: the defining
    relations give s'(t)/sinh(2 pi s(t+1/2)) =
    1/(2 cosh(pi s(t)) cosh(pi s(t+1/2))) identically, so no vanishing sinh
    is ever divided by.
    """
    with ctx.workprec():
        alpha, _ = alpha_beta(eps, ctx)
        sa = mp.sinh(mp.pi * alpha)
        ca2 = mp.cosh(2 * mp.pi * alpha)
        half = mp.mpf(1) / 2

        def s_of(t):
            return mp.asinh(sa * mp.sin(mp.pi * t)) / mp.pi

        def r_of(t):
            return mp.acosh(1 - mp.cos(mp.pi * t) + ca2) / (2 * mp.pi)

        def a_int(t):
            return 2 / (mp.cosh(mp.pi * s_of(t)) * mp.cosh(mp.pi * s_of(t + half)))

        def at_int(t):
            sp = sa * mp.cos(mp.pi * t) / mp.cosh(mp.pi * s_of(t))
            return 4 * s_of(t + half) * sp

        A = composite_gl(a_int, 0, half, ctx)
        Atilde = composite_gl(at_int, 0, half, ctx)
        B = composite_gl(lambda t: 1 / mp.sinh(2 * mp.pi * r_of(t)), 0, 1, ctx)
        Btilde = composite_gl(r_of, 0, 1, ctx)
        return A, Atilde, B, Btilde


# ── quantization ──────────────────────────────────────────────────────────


def _level_value(eps, ctx):
    """A lambda - Atilde = (A Btilde - B Atilde)/B, the level function."""
    A, At, B, Bt = period_integrals(eps, ctx)
    with ctx.workprec():
        return (A * Bt - B * At) / B


def quantize_selfdual(n: int, ctx: PrecCtx) -> SelfDualSpectrum:
    """Level-n self-dual state: the root of A lambda - Atilde = n + 1.

    Brackets on a geometric eps scan at reduced precision, then polishes
    with a full-precision secant iteration.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"level must be a non-negative integer, got {n}")
    n = int(n)
    target = n + 1
    scan_ctx = make_context(96, 1e-18)

    with scan_ctx.workprec():
        lo = mp.mpf(_SCAN_LO)
        hi = mp.mpf(_SCAN_HI)
        ratio = mp.mpf(_SCAN_RATIO)
        prev_e, prev_f = None, None
        bracket = None
        e = lo
        while e <= hi:
            fe = _level_value(e, scan_ctx) - target
            if prev_f is not None and mp.sign(prev_f) != mp.sign(fe):
                bracket = (prev_e, prev_f, e, fe)
                break
            prev_e, prev_f = e, fe
            e *= ratio
        if bracket is None:
            raise SolverError(
                f"no sign change of the level function for n = {n} with eps "
                f"scanned over [{_SCAN_LO}, {_SCAN_HI}]"
            )
        # cheap bisection before switching to full precision
        e0, f0, e1, f1 = bracket
        for _ in range(40):
            m = (e0 + e1) / 2
            fm = _level_value(m, scan_ctx) - target
            if mp.sign(fm) == mp.sign(f0):
                e0, f0 = m, fm
            else:
                e1, f1 = m, fm

    with ctx.workprec():
        e0, e1 = mp.mpf(e0), mp.mpf(e1)
        f0 = _level_value(e0, ctx) - target
        f1 = _level_value(e1, ctx) - target
        eps_star, f_star = e1, f1
        for _ in range(64):
            if f1 == f0:
                break
            e2 = e1 - f1 * (e1 - e0) / (f1 - f0)
            f2 = _level_value(e2, ctx) - target
            e0, f0, e1, f1 = e1, f1, e2, f2
            eps_star, f_star = e2, f2
            if abs(f2) <= ctx.tol * target or abs(e1 - e0) <= ctx.tol * abs(e1):
                break
        else:
            raise SolverError(f"secant polish for level {n} did not settle")
        if abs(f_star) > 1000 * ctx.tol * target:
            raise SolverError(
                f"level-{n} root residual {mp.nstr(abs(f_star), 5)} above tolerance"
            )

        A, At, B, Bt = period_integrals(eps_star, ctx)
        lam = Bt / B
        alpha, beta = alpha_beta(eps_star, ctx)
        if not (0 < alpha < beta):
            raise SolverError("turning points out of order")
        if not (A > 0 and At > 0 and B > 0 and Bt > 0 and A * Bt - B * At > 0):
            raise SolverError("period integrals lost positivity")
        return SelfDualSpectrum(
            n=n, eps=eps_star, alpha=alpha, beta=beta, lam=lam,
            A=A, Atilde=At, B=B, Btilde=Bt,
        )


# ── eigenfunction paths ───────────────────────────────────────────────────


def canonical_integral(T, spec: SelfDualSpectrum, ctx: PrecCtx):
    """(I, y): integral of theta_lambda along the canonical path from
    P0 = (i alpha, 0) to x = iT, T >= 0, and the endpoint y-coordinate.

    Regimes: T <= alpha both coordinates imaginary; alpha <= T <= beta
    y real in [0, 1/2]; T >= beta y = 1/2 + i c.
    """
    with ctx.workprec():
        T = mp.mpmathify(T)
        if mp.im(T) != 0 or mp.re(T) < 0:
            raise ValueError("T must be real and non-negative")
        T = mp.re(T)
        eps, lam = spec.eps, spec.lam
        alpha = spec.alpha
        sa = mp.sinh(mp.pi * alpha)
        half = mp.mpf(1) / 2

        def s_of(t):
            return mp.asinh(sa * mp.sin(mp.pi * t)) / mp.pi

        # xi-type: x = i s(t+1/2), y = i s(t), t in [0, t*]
        sT = mp.sinh(mp.pi * T)
        if sT <= sa:
            tstar = mp.acos(sT / sa) / mp.pi

            def xi_int(t):
                st = s_of(t)
                sp = sa * mp.cos(mp.pi * t) / mp.cosh(mp.pi * st)
                s2 = s_of(t + half)
                return lam / (2 * mp.cosh(mp.pi * st) * mp.cosh(mp.pi * s2)) - s2 * sp

            return composite_gl(xi_int, 0, tstar, ctx), 1j * s_of(tstar)

        # zeta-type: x = i r(t), y = t/2, t in [0, t*]
        def zeta_int(t):
            r = mp.acosh(1 - mp.cos(mp.pi * t) + eps / 2 - 1) / (2 * mp.pi)
            return r - lam / mp.sinh(2 * mp.pi * r)

        cosarg = eps / 2 - mp.cosh(2 * mp.pi * T)
        if cosarg >= -1:
            tstar = mp.acos(cosarg) / mp.pi
            return 0.5j * composite_gl(zeta_int, 0, tstar, ctx), tstar / 2

        # beyond i beta: x = i h(c), y = 1/2 + i c, c in [0, cT]
        I = 0.5j * composite_gl(zeta_int, 0, 1, ctx)
        cT = mp.acosh(-cosarg) / (2 * mp.pi)

        def third_int(c):
            h = mp.acosh(eps / 2 + mp.cosh(2 * mp.pi * c)) / (2 * mp.pi)
            return lam / mp.sinh(2 * mp.pi * h) - h

        return I + composite_gl(third_int, 0, cT, ctx), half + 1j * cT


def _nearest_y(x, guess, eps):
    """The y-branch of cos(2 pi y) = eps/2 - cos(2 pi x) closest to guess."""
    w = eps / 2 - mp.cos(2 * mp.pi * x)
    y0 = mp.acos(w) / (2 * mp.pi)
    best = None
    for k in range(-2, 3):
        for cand in (y0 + k, -y0 + k):
            if best is None or abs(cand - guess) < abs(best - guess):
                best = cand
    return best


def leg_integral(T, tau, spec: SelfDualSpectrum, ctx: PrecCtx, y_sign=1,
                 y_start=None):
    """(I, y_end): integral of theta_lambda along the horizontal leg from
    (iT, y_sign * y(iT)) to x = iT + tau, with y continued by nearest-branch
    marching (never a fixed principal branch).  y_start overrides the
    canonical starting branch (it must still lie on the curve).

    On the leg theta_lambda pulls back to -(x sin(2 pi x) + lambda) /
    sin(2 pi y) dx using dy/dx = -sin(2 pi x)/sin(2 pi y) on the curve.
    """
    with ctx.workprec():
        tau = mp.mpmathify(tau)
        if mp.im(tau) != 0:
            raise ValueError("leg length must be real")
        tau = mp.re(tau)
        if y_start is None:
            _, y0 = canonical_integral(T, spec, ctx)
            y0 = y_sign * y0
        else:
            y0 = mp.mpmathify(y_start)
        eps, lam = spec.eps, spec.lam
        T = mp.re(mp.mpmathify(T))
        x0 = 1j * T
        w0 = eps / 2 - mp.cos(2 * mp.pi * x0)
        if abs(mp.cos(2 * mp.pi * y0) - w0) > mp.mpf("1e-20") * max(1, abs(w0)):
            raise SolverError("leg start is off the spectral curve")
        if tau == 0:
            return mp.mpf(0), y0

        sign = 1 if tau > 0 else -1
        L = abs(tau)
        steps = int(_LEG_STEPS * mp.ceil(L))
        h = L / steps
        anchors = [y0]
        y_prev = y0
        for k in range(1, steps + 1):
            y_prev = _nearest_y(x0 + sign * k * h, y_prev, eps)
            anchors.append(y_prev)

        def f(u):
            k = min(int(u / h), steps - 1)
            frac = u / h - k
            guess = anchors[k] + (anchors[k + 1] - anchors[k]) * frac
            x = x0 + sign * u
            y = _nearest_y(x, guess, eps)
            return -sign * (x * mp.sin(2 * mp.pi * x) + lam) / mp.sin(2 * mp.pi * y)

        return composite_gl(f, 0, L, ctx), anchors[-1]


# ── eigenfunction ─────────────────────────────────────────────────────────


def _check_quantized(spec: SelfDualSpectrum, ctx: PrecCtx):
    with ctx.workprec():
        target = spec.n + 1
        f = spec.A * spec.lam - spec.Atilde - target
        g = spec.lam * spec.B - spec.Btilde
        # eps must be the eps the record was quantized at, not a detuning
        h = 4 * mp.cosh(mp.pi * spec.alpha) ** 2 - spec.eps
        if (abs(f) > 1000 * ctx.tol * target or abs(g) > 1000 * ctx.tol
                or abs(h) > 1000 * ctx.tol * abs(spec.eps)):
            raise SolverError(
                "eigenfunction is multivalued: quantization conditions do "
                "not hold for this record"
            )


def _accumulate(T, tau, spec, ctx):
    I, y = canonical_integral(T, spec, ctx)
    if tau != 0:
        I_leg, y = leg_integral(T, tau, spec, ctx)
        I = I + I_leg
    return I, y


def phi_eval(x, spec: SelfDualSpectrum, ctx: PrecCtx):
    """phi(x) = sin(2 pi I)/sin(2 pi y) along the canonical path to x.

    x must have the form iT + tau (tau real, reached by a horizontal leg).
    Removable sin(2 pi y) = 0 endpoints (x at the turning points) are
    evaluated at offset T and Richardson-extrapolated, never 0/0.
    """
    _check_quantized(spec, ctx)
    with ctx.workprec():
        x = mp.mpmathify(x)
        T, tau = mp.im(x), mp.re(x)
        if T < 0:
            v = phi_eval(-x, spec, ctx)   # phi(-x) = (-1)^n phi(x)
            return v if spec.n % 2 == 0 else -v
        I, y = _accumulate(T, tau, spec, ctx)
        s2y = mp.sin(2 * mp.pi * y)
        if abs(s2y) >= mp.mpf(_NEAR_ZERO):
            return mp.sin(2 * mp.pi * I) / s2y
        h1, h2 = (mp.mpf(s) for s in _RICHARDSON_H)
        vals = []
        for hh in (h1, h2):
            Ih, yh = _accumulate(T + hh, tau, spec, ctx)
            vals.append(mp.sin(2 * mp.pi * Ih) / mp.sin(2 * mp.pi * yh))
        return (h1 * vals[1] - h2 * vals[0]) / (h1 - h2)


def psi_selfdual(x, spec: SelfDualSpectrum, ctx: PrecCtx):
    """psi(x) = phi(ix) for real x, cross-checked against the parity image
    (-1)^n phi(-ix) before reporting."""
    with ctx.workprec():
        x = mp.mpmathify(x)
        v = phi_eval(1j * x, spec, ctx)
        w = phi_eval(-1j * x, spec, ctx)
        if spec.n % 2:
            w = -w
        scale = max(abs(v), abs(w), mp.mpf(1))
        if abs(v - w) > 1000 * ctx.tol * scale:
            raise SolverError("phi(ix) and its parity image disagree")
        return (v + w) / 2
