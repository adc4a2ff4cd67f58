#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdv5/composition.hpp"
#include "test_util.hpp"

using namespace kdv5;
using namespace kdv5::test;

namespace {

TorusIndex tix(int a, int b) {
    TorusIndex l;
    l.v = 2;
    l.c[0] = a;
    l.c[1] = b;
    return l;
}

// random displacement scaled to |beta|_{0,1} <= 1/100, with spectral content
// confined to low modes so that the inverse's harmonics stay inside the box
FourierField small_displacement(std::uint64_t seed, int kphi = 5, int kx = 8, int cphi = 1,
                                int cx = 1, double amp = 0.005) {
    FourierField b = retruncate(random_field(2, cphi, cx, seed, 0.0), kphi, kx);
    double m = norm_max(b, NormParams(0.0, 1.0));
    return b * Complex(amp / m, 0.0);
}

// random field with content confined to (cphi, cx) inside a larger box
FourierField compact_field(std::uint64_t seed, int kphi, int kx, int cphi, int cx,
                           bool zero_avg = false) {
    FourierField u = retruncate(random_field(2, cphi, cx, seed, 0.0, true, zero_avg), kphi, kx);
    u.zero_avg_x = zero_avg;
    return u;
}

// bisection oracle: solve q + beta_eval(y + q) = 0 for q at fixed (phi, y)
double bisect_inverse(const FourierField& beta, const std::vector<double>& phi, double y) {
    auto g = [&](double q) { return q + eval_at(beta, phi, y + q).real(); };
    double lo = -0.5, hi = 0.5;
    REQUIRE(g(lo) < 0.0);
    REQUIRE(g(hi) > 0.0);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("invert_displacement: zero and analytic oracle") {
    FourierField zero(2, 3, 4);
    zero.real_flag = true;
    CHECK(invert_displacement(zero).max_abs_coeff() < 1e-15);

    // beta = 0.01 sin x, phi-independent
    FourierField beta(2, 3, 8);
    beta.set_coeff(tix(0, 0), 1, Complex(0.0, -0.005));
    beta.set_coeff(tix(0, 0), -1, Complex(0.0, 0.005));
    beta.enforce_reality();
    FourierField bh = invert_displacement(beta);

    std::vector<double> phi = {0.0, 0.0};
    for (double y : {0.0, 0.7, 2.2, 4.9}) {
        double q = bisect_inverse(beta, phi, y);
        CHECK(std::abs(eval_at(bh, phi, y).real() - q) < 1e-12);
    }
}

TEST_CASE("diffeo round trip") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        SpaceDiffeo d(small_displacement(seed));
        const FourierField& beta = d.beta();
        const FourierField& bh = d.beta_hat();
        // (x + beta) then (y + beta_hat) returns x on a probe grid
        for (double p0 : {0.0, 1.1})
            for (double p1 : {0.3, 4.0})
                for (double x : {0.0, 0.9, 2.5, 5.1}) {
                    std::vector<double> phi = {p0, p1};
                    double y = x + eval_at(beta, phi, x).real();
                    double back = y + eval_at(bh, phi, y).real();
                    CHECK(std::abs(back - x) < 1e-11);
                }
    }
}

TEST_CASE("compose: trivial cases and grid oracle") {
    FourierField u = random_field(2, 5, 8, 17, 0.8);

    // beta = 0: u unchanged
    FourierField z(2, 5, 8);
    z.real_flag = true;
    SpaceDiffeo ident(z);
    CHECK(max_coeff_diff(compose(u, ident, Direction::Forward), u) < 1e-13);

    // u = e^{ix}, beta = c constant: phase shift e^{ic} e^{ix}
    FourierField eix = FourierField::mode(2, 3, 4, tix(0, 0), 1, 1.0);
    FourierField cbeta = FourierField::constant(2, 3, 4, 0.009);
    SpaceDiffeo shift(cbeta);
    FourierField shifted = compose(eix, shift, Direction::Forward);
    CHECK(std::abs(shifted.coeff(tix(0, 0), 1) - std::polar(1.0, 0.009)) < 1e-13);

    // generic case vs pointwise evaluation oracle
    for (std::uint64_t seed = 2; seed <= 5; ++seed) {
        SpaceDiffeo d(small_displacement(seed));
        FourierField v = compact_field(seed + 40, 5, 8, 1, 2);
        FourierField comp = compose(v, d, Direction::Forward);
        for (double p0 : {0.4, 3.0})
            for (double x : {0.0, 1.3, 4.4}) {
                std::vector<double> phi = {p0, 2.0};
                double y = x + eval_at(d.beta(), phi, x).real();
                Complex direct = eval_at(v, phi, y);
                CHECK(std::abs(eval_at(comp, phi, x) - direct) < 1e-11);
            }
    }
}

TEST_CASE("compose: norm bound with measured constant") {
    // |T u|_{(100/101)s, p} <= C |u|_{s,p}; C measured over these seeds: <= 1.03
    const double frozen_C = 1.1;
    NormParams src(0.3, 2.0);
    NormParams dst(0.3 * kForwardShrink, 2.0);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        SpaceDiffeo d(small_displacement(seed));
        FourierField u = random_field(2, 5, 8, seed + 60, 0.9);
        double ratio = norm_max(compose(u, d, Direction::Forward), dst) / norm_max(u, src);
        CHECK(ratio <= frozen_C);
    }
}

TEST_CASE("apply_A: identity, inverse pair, zero-average, symplecticity") {
    FourierField h = compact_field(70, 5, 8, 1, 2, true);

    FourierField z(2, 5, 8);
    z.real_flag = true;
    SpaceDiffeo ident(z);
    CHECK(max_coeff_diff(apply_A(ident, h, false), h) < 1e-13);

    for (std::uint64_t seed = 3; seed <= 8; ++seed) {
        SpaceDiffeo d(small_displacement(seed));
        FourierField ah = apply_A(d, h, false);
        CHECK(ah.zero_avg_x);
        FourierField back = apply_A(d, ah, true);
        // A^{-1} A = id to 1e-10 sup
        CHECK(sup_grid(back - h) < 1e-10);

        // symplecticity: Omega(Au, Av) = Omega(u, v) per phi node, where
        // Omega(u,v) = avg_x (dx^{-1} u) v  (grid quadrature oracle)
        FourierField u = compact_field(seed + 10, 5, 8, 1, 2, true);
        FourierField v = compact_field(seed + 20, 5, 8, 1, 2, true);
        FourierField w_before = x_average_part(mul(dx_inv(u), v));
        FourierField w_after =
            x_average_part(mul(dx_inv(apply_A(d, u, false)), apply_A(d, v, false)));
        CHECK(sup_grid(w_after - w_before) < 1e-10);
    }
}

TEST_CASE("symplectic form: spectral sum equals grid quadrature") {
    FourierField u = random_field(2, 3, 6, 91, 0.5, true, true);
    FourierField v = random_field(2, 3, 6, 92, 0.5, true, true);
    // spectral: sum_k (u_k /(ik)) v_{-k} per phi; compare the (l=0) modes
    Complex spectral = x_average_part(mul(dx_inv(u), v)).mean();
    // quadrature over the full grid
    GridSpec g = padded_grid(2, 3, 6);
    auto gu = to_grid(dx_inv(u), g);
    auto gv = to_grid(v, g);
    Complex quad(0.0, 0.0);
    for (std::size_t i = 0; i < gu.size(); ++i) quad += gu[i] * gv[i];
    quad /= static_cast<double>(gu.size());
    CHECK(std::abs(spectral - quad) < 1e-12);
}

TEST_CASE("apply_B: identity, inverse pair, grid oracle") {
    FourierField h = compact_field(110, 6, 3, 2, 2);
    std::vector<double> omega = {1.0, 0.5 * (1.0 + std::sqrt(5.0))};

    FourierField za(2, 6, 0);
    za.real_flag = true;
    TimeShift ident(za, omega);
    CHECK(max_coeff_diff(apply_B(ident, h, false), h) < 1e-13);

    for (std::uint64_t seed = 5; seed <= 9; ++seed) {
        FourierField alpha = retruncate(random_torus_series(2, 1, seed, 0.0, true, true), 6, 0);
        double m = norm_max(alpha, NormParams(0.0, 1.0));
        alpha = alpha * Complex(0.005 / m, 0.0);
        TimeShift t(alpha, omega);

        FourierField bh = apply_B(t, h, false);
        // pointwise oracle: (B h)(phi, y) = h(phi + omega alpha(phi), y)
        for (double p0 : {0.2, 2.8})
            for (double x : {0.5, 3.1}) {
                std::vector<double> phi = {p0, 1.7};
                double a = eval_at(alpha, phi, 0.0).real();
                std::vector<double> shifted = {phi[0] + omega[0] * a, phi[1] + omega[1] * a};
                CHECK(std::abs(eval_at(bh, phi, x) - eval_at(h, shifted, x)) < 1e-10);
            }

        FourierField back = apply_B(t, bh, true);
        CHECK(sup_grid(back - h) < 1e-10);
    }
}

TEST_CASE("width metadata factors") {
    FourierField u = random_field(2, 3, 4, 130, 0.8);
    u.width = 0.5;
    SpaceDiffeo d(small_displacement(2));
    CHECK(compose(u, d, Direction::Forward).width ==
          doctest::Approx(0.5 * kForwardShrink).epsilon(1e-15));
    CHECK(compose(u, d, Direction::Inverse).width ==
          doctest::Approx(0.5 * kInverseShrink).epsilon(1e-15));

    FourierField beta = small_displacement(3);
    beta.width = 0.5;
    CHECK(invert_displacement(beta).width == doctest::Approx(0.5 * kInverseShrink));
}

TEST_CASE("diffeo validation rejects large displacements") {
    FourierField big(2, 3, 4);
    big.set_coeff(tix(0, 0), 1, Complex(0.05, 0.0));
    big.set_coeff(tix(0, 0), -1, Complex(0.05, 0.0));
    big.enforce_reality();
    CHECK_THROWS_AS(SpaceDiffeo{big}, DomainError);
}
