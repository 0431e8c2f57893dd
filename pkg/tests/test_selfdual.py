"""Self-dual solver: geometry, quadrature, quantization, Bloch paths.

Oracles: closed forms for the turning points, central finite differences
for the path derivatives, mpmath.quad for the home-grown composite
Gauss-Legendre rule, and the 45-digit ground-state level constant for the
quantization root.  Path invariants (cycle integrality, Bloch closure,
branch-product unity, reflection bookkeeping) are checked on explicit
parameterizations.
"""

import dataclasses

import pytest
from mpmath import mp

from mirror_spectra.precision import SolverError, make_context
from mirror_spectra.selfdual import (
    alpha_beta,
    canonical_integral,
    composite_gl,
    gauss_legendre_nodes,
    leg_integral,
    path_funcs,
    period_integrals,
    phi_eval,
    psi_selfdual,
    quantize_selfdual,
)

LOG_EPS0 = "2.88181542992629678247713987172363292221616219"


@pytest.fixture(scope="module")
def spec0(ctx192):
    return quantize_selfdual(0, ctx192)


@pytest.fixture(scope="module")
def spec1(ctx192):
    return quantize_selfdual(1, ctx192)


# ── geometry ──────────────────────────────────────────────────────────────


def test_alpha_beta_examples(ctx192):
    ctx = ctx192
    with ctx.workprec():
        a, b = alpha_beta(8, ctx)
        assert abs(a - mp.acosh(3) / (2 * mp.pi)) <= mp.mpf("1e-50")
        assert abs(mp.sinh(mp.pi * b) - mp.cosh(mp.pi * a)) <= mp.mpf("1e-50")

        eps = 4 + mp.mpf("1e-30")
        a, b = alpha_beta(eps, ctx)
        assert 0 < a < mp.mpf("1e-10")
        assert b >= mp.asinh(mp.mpf(1)) / mp.pi
        assert abs(4 * mp.cosh(mp.pi * a) ** 2 - eps) <= mp.mpf("1e-55")


def test_alpha_beta_rejects_bad_eps(ctx192):
    for bad in (4, mp.mpf("3.5"), -10):
        with pytest.raises(ValueError):
            alpha_beta(bad, ctx192)
    with pytest.raises(ValueError):
        alpha_beta(mp.mpc(8, 1), ctx192)


def test_path_funcs_endpoints(spec0, ctx192):
    ctx = ctx192
    with ctx.workprec():
        tol = mp.mpf("1e-50")
        r0, s0, _, _ = path_funcs(spec0.eps, 0, ctx)
        assert abs(r0 - spec0.alpha) <= tol and abs(s0) <= tol
        r1, _, _, _ = path_funcs(spec0.eps, 1, ctx)
        assert abs(r1 - spec0.beta) <= tol
        _, sh, _, _ = path_funcs(spec0.eps, mp.mpf(1) / 2, ctx)
        assert abs(sh - spec0.alpha) <= tol


def test_path_derivatives_match_finite_differences(spec0, ctx192):
    # central FD with h = 1e-25; analytic derivatives must agree to 1e-20
    ctx = ctx192
    with ctx.workprec():
        t, h = mp.mpf("0.3"), mp.mpf("1e-25")
        _, _, sp, rp = path_funcs(spec0.eps, t, ctx)
        rp_, sp_ = [
            (path_funcs(spec0.eps, t + h, ctx)[i]
             - path_funcs(spec0.eps, t - h, ctx)[i]) / (2 * h)
            for i in (0, 1)
        ]
        assert abs(sp - sp_) <= mp.mpf("1e-20")
        assert abs(rp - rp_) <= mp.mpf("1e-20")


# ── quadrature ────────────────────────────────────────────────────────────


def test_gauss_nodes_weights(ctx192):
    ctx = ctx192
    with ctx.workprec():
        nodes = gauss_legendre_nodes(32, ctx)
        assert len(nodes) == 32
        assert abs(mp.fsum(w for _, w in nodes) - 2) <= mp.mpf("1e-55")
        # order-32 rule is exact through degree 63
        v = mp.fsum(w * x ** 62 for x, w in nodes)
        assert abs(v - mp.mpf(2) / 63) <= mp.mpf("1e-55")
    assert gauss_legendre_nodes(32, ctx) is nodes  # cached
    with pytest.raises(ValueError):
        gauss_legendre_nodes(31, ctx)


def test_composite_gl_matches_mpmath_quad(spec0, ctx192):
    ctx = ctx192
    with ctx.workprec():
        ca2 = mp.cosh(2 * mp.pi * spec0.alpha)

        def f(t):
            return 1 / mp.sinh(mp.acosh(1 - mp.cos(mp.pi * t) + ca2))

        v = composite_gl(f, 0, 1, ctx)
        q = mp.quad(f, [0, 1])
        assert abs(v - q) <= mp.mpf("1e-45")
        # loose-vs-tight self-convergence
        v1 = composite_gl(f, 0, 1, ctx, tol=mp.mpf("1e-30"))
        v2 = composite_gl(f, 0, 1, ctx, tol=mp.mpf("1e-44"))
        assert abs(v1 - v2) <= mp.mpf("1e-30")


def test_composite_gl_failure_names_subinterval(ctx192):
    ctx = ctx192
    with ctx.workprec():
        third = mp.mpf(1) / 3
        with pytest.raises(SolverError, match=r"subinterval \["):
            composite_gl(lambda t: mp.sqrt(abs(t - third)), 0, 1, ctx,
                         tol=mp.mpf("1e-60"), max_depth=6)


# ── period integrals ──────────────────────────────────────────────────────


def test_period_integrals_positive(ctx192):
    ctx = ctx192
    with ctx.workprec():
        A, At, B, Bt = period_integrals(20, ctx)
        assert A > 0 and At > 0 and B > 0 and Bt > 0
        for e in (10, 100, 1000):
            A, At, B, Bt = period_integrals(e, ctx)
            assert A * Bt - B * At > 0


def test_period_integrals_against_mpmath_quad(spec0, ctx192):
    ctx = ctx192
    with ctx.workprec():
        A, At, B, Bt = period_integrals(spec0.eps, ctx)
        sa = mp.sinh(mp.pi * spec0.alpha)
        ca2 = mp.cosh(2 * mp.pi * spec0.alpha)
        half = mp.mpf(1) / 2

        def s_of(t):
            return mp.asinh(sa * mp.sin(mp.pi * t)) / mp.pi

        def r_of(t):
            return mp.acosh(1 - mp.cos(mp.pi * t) + ca2) / (2 * mp.pi)

        qA = mp.quad(lambda t: 2 / (mp.cosh(mp.pi * s_of(t))
                                    * mp.cosh(mp.pi * s_of(t + half))), [0, half])
        qAt = mp.quad(lambda t: 4 * s_of(t + half) * sa * mp.cos(mp.pi * t)
                      / mp.cosh(mp.pi * s_of(t)), [0, half])
        qB = mp.quad(lambda t: 1 / mp.sinh(2 * mp.pi * r_of(t)), [0, 1])
        qBt = mp.quad(r_of, [0, 1])
        tol = mp.mpf("1e-45")
        assert abs(A - qA) <= tol and abs(At - qAt) <= tol
        assert abs(B - qB) <= tol and abs(Bt - qBt) <= tol


# ── quantization ──────────────────────────────────────────────────────────


def test_ground_state_level_constant():
    # 256-bit run must reproduce the pinned constant well past 30 digits
    ctx = make_context(256, 1e-35)
    spec = quantize_selfdual(0, ctx)
    with ctx.workprec():
        assert abs(mp.log(spec.eps) - mp.mpf(LOG_EPS0)) <= mp.mpf("1e-37")


def test_quantized_record_invariants(spec0, spec1, ctx192):
    ctx = ctx192
    with ctx.workprec():
        for spec in (spec0, spec1):
            target = spec.n + 1
            assert 0 < spec.alpha < spec.beta
            assert abs(4 * mp.cosh(mp.pi * spec.alpha) ** 2 - spec.eps) <= mp.mpf("1e-50")
            assert abs(mp.sinh(mp.pi * spec.beta) - mp.cosh(mp.pi * spec.alpha)) <= mp.mpf("1e-50")
            assert spec.A > 0 and spec.Atilde > 0 and spec.B > 0 and spec.Btilde > 0
            assert spec.A * spec.Btilde - spec.B * spec.Atilde > 0
            assert abs(spec.lam - spec.Btilde / spec.B) <= mp.mpf("1e-50")
            assert abs(spec.A * spec.lam - spec.Atilde - target) <= 1000 * ctx.tol * target
        assert spec1.eps > spec0.eps


def test_quantize_rejects_bad_level(ctx192):
    with pytest.raises(ValueError):
        quantize_selfdual(-1, ctx192)
    with pytest.raises(ValueError):
        quantize_selfdual(0.5, ctx192)


def test_level_function_single_sign_change():
    # empirical root-counting on the bracketing grid, reported not assumed
    from mirror_spectra.selfdual import _level_value

    ctx = make_context(64, 1e-10)
    with ctx.workprec():
        vals = []
        e = mp.mpf("4.01")
        while e <= mp.mpf("1e6"):
            vals.append(_level_value(e, ctx))
            e *= mp.mpf("1.35")
        for n in (0, 1):
            signs = [mp.sign(v - (n + 1)) for v in vals]
            changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
            assert changes == 1


# ── canonical paths ───────────────────────────────────────────────────────


def test_canonical_regimes(spec0, ctx192):
    ctx = ctx192
    with ctx.workprec():
        I, y = canonical_integral(mp.mpf("0.2"), spec0, ctx)
        assert abs(mp.re(y)) <= mp.mpf("1e-50") and mp.im(y) > 0
        I, y = canonical_integral(mp.mpf("0.45"), spec0, ctx)
        assert abs(mp.im(y)) <= mp.mpf("1e-50") and 0 < mp.re(y) < mp.mpf("0.5")
        I, y = canonical_integral(mp.mpf("0.9"), spec0, ctx)
        assert abs(mp.re(y) - mp.mpf("0.5")) <= mp.mpf("1e-50") and mp.im(y) > 0
        # base point: empty path
        I, y = canonical_integral(spec0.alpha, spec0, ctx)
        assert abs(I) <= mp.mpf("1e-50") and abs(y) <= mp.mpf("1e-50")
    with pytest.raises(ValueError):
        canonical_integral(-1, spec0, ctx)


def test_turning_point_cancellation(spec0, ctx192):
    # f(i beta, 1/2)^2 = 1: the accumulated integral vanishes there
    ctx = ctx192
    with ctx.workprec():
        I, y = canonical_integral(spec0.beta, spec0, ctx)
        assert abs(I) <= mp.mpf("1e-25")
        assert abs(mp.expj(2 * mp.pi * I) ** 2 - 1) <= mp.mpf("1e-24")


def test_cycle_integrality(spec0, spec1, ctx192):
    # closed xi cycle carries A lam - At = n + 1; closed zeta cycle vanishes
    ctx = ctx192
    with ctx.workprec():
        half = mp.mpf(1) / 2
        for spec in (spec0, spec1):
            sa = mp.sinh(mp.pi * spec.alpha)

            def s_of(t):
                return mp.asinh(sa * mp.sin(mp.pi * t)) / mp.pi

            def xi_int(t):
                st = s_of(t)
                sp = sa * mp.cos(mp.pi * t) / mp.cosh(mp.pi * st)
                s2 = s_of(t + half)
                return (spec.lam / (2 * mp.cosh(mp.pi * st) * mp.cosh(mp.pi * s2))
                        - s2 * sp)

            def zeta_int(t):
                r = mp.acosh(1 - mp.cos(mp.pi * t) + spec.eps / 2 - 1) / (2 * mp.pi)
                return r - spec.lam / mp.sinh(2 * mp.pi * r)

            assert abs(2 * composite_gl(xi_int, 0, 1, ctx) - (spec.n + 1)) <= mp.mpf("1e-37")
            assert abs(composite_gl(zeta_int, 0, 1, ctx)) <= mp.mpf("1e-37")


def test_reflection_and_swap_bookkeeping(spec0, ctx192):
    # rho: x -> -x negates the integral; sigma: (x,y) -> (y,x) gives
    # d(xy) - theta_lambda, so the swapped zeta path integrates to
    # i beta/2 - I_zeta(1) = i beta/2.
    ctx = ctx192
    with ctx.workprec():
        lam, eps = spec0.lam, spec0.eps

        def r_of(t):
            return mp.acosh(1 - mp.cos(mp.pi * t) + eps / 2 - 1) / (2 * mp.pi)

        def g(t):  # theta_lambda on the zeta path (x, y) = (i r(t), t/2)
            x = 1j * r_of(t)
            return (x + lam / mp.sin(2 * mp.pi * x)) / 2

        def g_rho(t):  # same path reflected through x -> -x
            x = -1j * r_of(t)
            return (x + lam / mp.sin(2 * mp.pi * x)) / 2

        end = mp.mpf("0.7")
        I = composite_gl(g, 0, end, ctx)
        I_rho = composite_gl(g_rho, 0, end, ctx)
        assert abs(I + I_rho) <= mp.mpf("1e-37")

        def g_sigma(t):  # swapped path (t/2, i r(t)); dy = i r'(t) dt
            rp = mp.sin(mp.pi * t) / (2 * mp.sinh(2 * mp.pi * r_of(t)))
            return (t / 2 + lam / mp.sin(mp.pi * t)) * 1j * rp

        I_sigma = composite_gl(g_sigma, 0, 1, ctx)
        assert abs(I_sigma - 1j * spec0.beta / 2) <= mp.mpf("1e-35")


# ── Bloch continuation ────────────────────────────────────────────────────


def test_bloch_cycle_factor(spec0, ctx192):
    # f(x+1, y) = e^{2 pi i y} f(x, y) once the continued branch closes:
    # after one x-period in the xi and third regimes, after two in the
    # zeta regime (the first period lands on the -y sheet).
    ctx = ctx192
    with ctx.workprec():
        tol = mp.mpf("1e-45")
        for Ts, periods in (("0.2", 1), ("0.9", 1), ("0.45", 2)):
            T = mp.mpf(Ts)
            _, y0 = canonical_integral(T, spec0, ctx)
            I, y_end = leg_integral(T, periods, spec0, ctx)
            assert abs(mp.expj(2 * mp.pi * (I - periods * y0)) - 1) <= tol
            k = y_end - y0 if periods == 1 else y_end - y0
            assert abs(k - mp.nint(mp.re(k))) <= tol  # same branch mod 1


def test_branch_shift_invariance(spec0, ctx192):
    # f(x, y+1) = f(x, y): starting the continuation one sheet up changes
    # nothing but the endpoint label
    ctx = ctx192
    with ctx.workprec():
        T, tau = mp.mpf("0.45"), mp.mpf("0.7")
        _, y0 = canonical_integral(T, spec0, ctx)
        Ia, ya = leg_integral(T, tau, spec0, ctx)
        Ib, yb = leg_integral(T, tau, spec0, ctx, y_start=y0 + 1)
        assert abs(Ia - Ib) <= mp.mpf("1e-45")
        assert abs(yb - ya - 1) <= mp.mpf("1e-45")


def test_branch_product_unity(spec0, ctx192):
    # f(x, y) f(x, -y) = 1 from the base point: the two continuations sum
    # to an integer
    ctx = ctx192
    with ctx.workprec():
        T, tau = mp.mpf("0.45"), mp.mpf("0.7")
        Ip, _ = leg_integral(T, tau, spec0, ctx)
        Im_, _ = leg_integral(T, tau, spec0, ctx, y_sign=-1)
        assert abs(mp.expj(2 * mp.pi * (Ip + Im_)) - 1) <= mp.mpf("1e-45")


def test_leg_start_must_be_on_curve(spec0, ctx192):
    with pytest.raises(SolverError, match="off the spectral curve"):
        leg_integral(mp.mpf("0.45"), 1, spec0, ctx192, y_start=mp.mpf("0.123"))


# ── eigenfunction ─────────────────────────────────────────────────────────


def test_phi_finite_at_base_and_turning_points(spec0, ctx192):
    ctx = ctx192
    with ctx.workprec():
        va = phi_eval(1j * spec0.alpha, spec0, ctx)
        vb = phi_eval(1j * spec0.beta, spec0, ctx)
        assert mp.isfinite(va) and abs(va) > mp.mpf("1e-4")
        assert mp.isfinite(vb) and abs(vb) > mp.mpf("1e-4")
        # extrapolated turning-point value continues the nearby profile
        v1 = phi_eval(1j * (spec0.alpha + mp.mpf("1e-4")), spec0, ctx)
        v2 = phi_eval(1j * (spec0.alpha + mp.mpf("2e-4")), spec0, ctx)
        assert abs(va - (2 * v1 - v2)) <= mp.mpf("1e-5") * abs(va)


def test_phi_parity(spec0, spec1, ctx192):
    ctx = ctx192
    with ctx.workprec():
        x = mp.mpc("0.3", "0.6")
        for spec in (spec0, spec1):
            sign = 1 if spec.n % 2 == 0 else -1
            v = phi_eval(x, spec, ctx)
            w = phi_eval(-x, spec, ctx)
            assert abs(w - sign * v) <= mp.mpf("1e-40") * abs(v)
        assert abs(phi_eval(0, spec1, ctx)) <= mp.mpf("1e-50")


def test_phi_rejects_detuned_record(spec0, ctx192):
    ctx = ctx192
    with ctx.workprec():
        bad = dataclasses.replace(spec0, eps=spec0.eps + mp.mpf("0.1"))
    with pytest.raises(SolverError, match="multivalued"):
        phi_eval(1j * mp.mpf("0.3"), bad, ctx)


def test_harper_residual_on_imaginary_axis(spec0, ctx192):
    # phi(x-1) + phi(x+1) + (2 cos(2 pi x) - eps) phi(x) at twenty points
    # spread over all three path regimes, relative residual below 1e-20
    ctx = ctx192
    with ctx.workprec():
        points = ["0.05", "0.10", "0.15", "0.20", "0.25", "0.30", "0.35",
                  "0.41", "0.445", "0.455", "0.462", "0.470", "0.50", "0.56",
                  "0.65", "0.80", "1.00", "1.30", "1.70", "2.10"]
        assert len(points) == 20
        worst = mp.mpf(0)
        for Ts in points:
            x = 1j * mp.mpf(Ts)
            up = phi_eval(x + 1, spec0, ctx)
            dn = phi_eval(x - 1, spec0, ctx)
            mid = (2 * mp.cos(2 * mp.pi * x) - spec0.eps) * phi_eval(x, spec0, ctx)
            rel = abs(up + dn + mid) / max(abs(up), abs(dn), abs(mid))
            worst = max(worst, rel)
        assert worst <= mp.mpf("1e-20")


def test_psi_selfdual_cross_checked(spec0, ctx192):
    ctx = ctx192
    with ctx.workprec():
        x = mp.mpf("0.37")
        v = psi_selfdual(x, spec0, ctx)
        assert abs(v - phi_eval(1j * x, spec0, ctx)) <= mp.mpf("1e-40") * abs(v)
