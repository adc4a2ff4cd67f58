#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdv5/field.hpp"
#include "kdv5/lambda.hpp"
#include "kdv5/serialize.hpp"
#include "test_util.hpp"

using namespace kdv5;
using namespace kdv5::test;

namespace {

// Independent direct-summation oracle for norm_sp (no shared code path).
double norm_sp_oracle(const FourierField& u, double s, double p) {
    double sum = 0.0;
    u.for_each([&](const TorusIndex& l, int k, Complex c) {
        double al = std::abs(c);
        if (al == 0.0) return;
        int labs = l.l1();
        int lb = std::max(labs, 1);
        int kb = std::max(std::abs(k), 1);
        sum += al * al * std::exp(2.0 * (labs + std::abs(k)) * s) *
               std::pow(double(lb + kb), 2.0 * p);
    });
    return std::sqrt(sum);
}

// Dense convolution oracle for mul: w_{l,k} = sum u_{l',k'} v_{l-l',k-k'}.
FourierField mul_oracle(const FourierField& u, const FourierField& v) {
    FourierField w(u.v(), u.kphi(), u.kx());
    u.for_each([&](const TorusIndex& lu, int ku, Complex cu) {
        if (cu == Complex(0.0, 0.0)) return;
        v.for_each([&](const TorusIndex& lv, int kv, Complex cv) {
            if (cv == Complex(0.0, 0.0)) return;
            TorusIndex lw;
            lw.v = lu.v;
            for (int d = 0; d < lu.v; ++d) lw.c[d] = lu.c[d] + lv.c[d];
            int kw = ku + kv;
            if (lw.l1() <= w.kphi() && std::abs(kw) <= w.kx()) w.add_coeff(lw, kw, cu * cv);
        });
    });
    return w;
}

TorusIndex tix(int a, int b) {
    TorusIndex l;
    l.v = 2;
    l.c[0] = a;
    l.c[1] = b;
    return l;
}

}  // namespace

TEST_CASE("norm_sp definition examples") {
    // constant field 1 with p = 2: single (0,0) coefficient, ([0]+[0])^{2p} = 2^{2p}
    FourierField one = FourierField::constant(2, 4, 4, 1.0);
    CHECK(norm_sp(one, NormParams(0.7, 2.0)) == doctest::Approx(4.0).epsilon(1e-14));

    // u = e^{ix}, s = 0, p = 0
    FourierField eix = FourierField::mode(2, 4, 4, tix(0, 0), 1, 1.0);
    CHECK(norm_sp(eix, NormParams(0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));

    // random 5-mode field vs direct summation oracle
    FourierField u(2, 6, 8);
    u.set_coeff(tix(1, 2), 3, Complex(0.3, -0.1));
    u.set_coeff(tix(-2, 0), -5, Complex(-1.2, 0.4));
    u.set_coeff(tix(0, 0), 1, Complex(0.0, 2.0));
    u.set_coeff(tix(3, -3), 0, Complex(0.7, 0.7));
    u.set_coeff(tix(0, -1), -8, Complex(-0.25, 0.05));
    for (double s : {0.0, 0.2, 0.5})
        for (double p : {0.0, 1.0, 2.5}) {
            double a = norm_sp(u, NormParams(s, p));
            double b = norm_sp_oracle(u, s, p);
            CHECK(rel_diff(a, b) < 1e-12);
        }
}

TEST_CASE("norm_frak definition examples") {
    FourierField one = FourierField::constant(2, 4, 4, 1.0);
    CHECK(norm_frak(one, NormParams(0.3, 1.5)) == doctest::Approx(1.0).epsilon(1e-14));

    // single torus mode with |l| = 3, s = 0.1, p = 1 -> e^{0.3} * 3
    FourierField g = FourierField::mode(2, 4, 4, tix(2, 1), 0, 1.0);
    CHECK(norm_frak(g, NormParams(0.1, 1.0)) ==
          doctest::Approx(std::exp(0.3) * 3.0).epsilon(1e-14));
}

TEST_CASE("norm sandwich (frak vs sp)") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        FourierField u = random_field(2, 8, 16, seed, 0.1 * (seed % 4));
        for (double s : {0.0, 0.25})
            for (double p : {0.5, 1.0, 2.0}) {
                double frak_p = norm_frak(u, NormParams(s, p));
                double sp_2p = norm_sp(u, NormParams(s, 2 * p));
                double frak_2p = norm_frak(u, NormParams(s, 2 * p));
                CHECK(frak_p <= sp_2p * (1.0 + 1e-12));
                CHECK(sp_2p <= std::pow(2.0, p) * frak_2p * (1.0 + 1e-12));
                // the constant the proof itself yields (4^p) holds per-mode, always
                CHECK(sp_2p <= std::pow(4.0, p) * frak_2p * (1.0 + 1e-12));
            }
    }
}

TEST_CASE("norm_max examples and estimation bounds") {
    FourierField zero(2, 4, 4);
    CHECK(norm_max(zero, NormParams(0.0, 0.0)) == 0.0);

    FourierField eix = FourierField::mode(2, 4, 4, tix(0, 0), 1, 1.0);
    CHECK(norm_max(eix, NormParams(0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));

    // |u|_{s,p-s0} <= C1 ||u||_{s,p} and ||u||_{s,p} <= C2 |u|_{s,p+s0}
    // with constants measured once on this configuration (v=2 -> s0=2 here).
    const int s0 = 2;
    double worst_lo = 0.0, worst_hi = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        FourierField u = random_field(2, 5, 6, seed, 0.4);
        NormParams np(0.2, double(s0 + 1));
        double sp = norm_sp(u, np);
        double lo = norm_max(u, NormParams(0.2, np.p - s0));
        double hi = norm_max(u, NormParams(0.2, np.p + s0));
        worst_lo = std::max(worst_lo, lo / sp);
        worst_hi = std::max(worst_hi, sp / hi);
    }
    // measured on seeds 1..10: lo/sp <= ~3.1, sp/hi <= ~0.9; frozen with margin
    CHECK(worst_lo < 8.0);
    CHECK(worst_hi < 2.0);
}

TEST_CASE("smoothing estimate") {
    // ||u||_{s-sigma, p+nu} <= (nu/e)^nu sigma^{-nu} ||u||_{s,p} on random fields
    const double s = 0.5, nu = 2.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        FourierField u = random_field(2, 8, 12, seed, 0.05);
        for (double sigma : {0.1, 0.25, 0.5}) {
            double c = std::pow(nu / M_E, nu) / std::pow(sigma, nu);
            double lhs = norm_sp(u, NormParams(s - sigma, 3.0 + nu));
            double rhs = c * norm_sp(u, NormParams(s, 3.0));
            CHECK(lhs <= rhs * (1.0 + 1e-12));
            // the frak norm carries the p-weight on [k] and [l] separately,
            // so gaining nu regularity costs the constant twice
            double lhs_f = norm_frak(u, NormParams(s - sigma, 3.0 + nu));
            double rhs_f = c * c * norm_frak(u, NormParams(s, 3.0));
            CHECK(lhs_f <= rhs_f * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("lip norms") {
    FourierField u0 = random_field(2, 4, 4, 99, 0.0);
    auto n = [](const FourierField& f) { return norm_sp(f, NormParams(0.1, 1.0)); };

    // lambda-independent payload: lip part 0
    LambdaFamily<FourierField> fam;
    fam.lambdas = {0.5, 1.0, 1.5};
    fam.payloads = {u0, u0, u0};
    CHECK(lip_seminorm(fam, n) == 0.0);
    CHECK(lip_norm(fam, n) == doctest::Approx(n(u0)));

    // payload lambda * u0 with ||u0|| = 1 over {0.5, 1.5}: sup 1.5, lip 1
    FourierField unit = u0 * Complex(1.0 / n(u0), 0.0);
    LambdaFamily<FourierField> lin;
    lin.lambdas = {0.5, 1.5};
    lin.payloads = {unit * Complex(0.5, 0.0), unit * Complex(1.5, 0.0)};
    CHECK(lip_norm(lin, n) == doctest::Approx(2.5).epsilon(1e-12));

    // random affine family matches the two-point oracle exactly
    FourierField a = random_field(2, 4, 4, 7), b = random_field(2, 4, 4, 8);
    LambdaFamily<FourierField> aff;
    aff.lambdas = lambda_samples(5);
    for (double l : aff.lambdas) aff.payloads.push_back(a + b * Complex(l, 0.0));
    double expect_sup = 0.0;
    for (double l : aff.lambdas) expect_sup = std::max(expect_sup, n(a + b * Complex(l, 0.0)));
    CHECK(lip_norm(aff, n) == doctest::Approx(expect_sup + n(b)).epsilon(1e-12));

    LambdaFamily<FourierField> single;
    single.lambdas = {1.0};
    single.payloads = {u0};
    CHECK_THROWS_AS(lip_seminorm(single, n), ConfigError);
}

TEST_CASE("mul: trivial identities and convolution oracle") {
    FourierField eix = FourierField::mode(2, 3, 4, tix(0, 0), 1, 1.0);
    FourierField emix = FourierField::mode(2, 3, 4, tix(0, 0), -1, 1.0);
    FourierField prod = mul(eix, emix);
    FourierField one = FourierField::constant(2, 3, 4, 1.0);
    CHECK(max_coeff_diff(prod, one) < 1e-14);

    FourierField u = random_field(2, 3, 4, 5);
    FourierField zero(2, 3, 4);
    CHECK(mul(u, zero).max_abs_coeff() < 1e-16);

    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        FourierField a = random_field(2, 3, 4, seed);
        FourierField b = random_field(2, 3, 4, seed + 100);
        FourierField fast = mul(a, b);
        FourierField slow = mul_oracle(a, b);
        double scale = std::max(1.0, slow.max_abs_coeff());
        CHECK(max_coeff_diff(fast, slow) / scale < 1e-12);
    }
}

TEST_CASE("mul: algebra constant measured and frozen") {
    // c(p) from the dense-oracle run (worst ratio over these seeds): 0.01544
    // at p=2, s=0.2.  Frozen with the spec's tolerance factor.
    const double frozen_cp = 0.01544;
    NormParams np(0.2, 2.0);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        FourierField a = random_field(2, 4, 6, seed, 0.3);
        FourierField b = random_field(2, 4, 6, seed + 500, 0.3);
        double ratio = norm_sp(mul(a, b), np) / (norm_sp(a, np) * norm_sp(b, np));
        worst = std::max(worst, ratio);
        CHECK(ratio < frozen_cp * (1.0 + 1e-9));
    }
    CHECK(worst > frozen_cp / 10.0);  // the frozen constant is not vacuous
}

TEST_CASE("derivatives and inverses") {
    FourierField u = FourierField::mode(2, 3, 5, tix(1, 0), 3, Complex(2.0, 1.0));
    FourierField du = dx(u, 1);
    CHECK(std::abs(du.coeff(tix(1, 0), 3) - Complex(2.0, 1.0) * Complex(0.0, 3.0)) < 1e-15);

    FourierField one = FourierField::constant(2, 3, 5, 1.0);
    CHECK(dphi_omega(one, {1.0, 0.5}).max_abs_coeff() == 0.0);

    // dx(dx_inv(u), 1) == u for zero-average u
    FourierField w = random_field(2, 3, 5, 11, 0.0, true, true);
    CHECK(max_coeff_diff(dx(dx_inv(w), 1), w) < 1e-14);

    // dx_inv(e^{ikx}) = e^{ikx}/(ik)
    FourierField m2 = FourierField::mode(2, 3, 5, tix(0, 0), 2, 1.0);
    CHECK(std::abs(dx_inv(m2).coeff(tix(0, 0), 2) - Complex(1.0, 0.0) / Complex(0.0, 2.0)) <
          1e-15);

    CHECK_THROWS_AS(dx_inv(one), DomainError);

    // sin x -> -cos x
    FourierField sinx(2, 3, 5);
    sinx.set_coeff(tix(0, 0), 1, Complex(0.0, -0.5));
    sinx.set_coeff(tix(0, 0), -1, Complex(0.0, 0.5));
    FourierField mc = dx_inv(sinx);
    CHECK(std::abs(mc.coeff(tix(0, 0), 1) - Complex(-0.5, 0.0)) < 1e-15);
    CHECK(std::abs(mc.coeff(tix(0, 0), -1) - Complex(-0.5, 0.0)) < 1e-15);
}

TEST_CASE("omega_dphi_inv: division, floor error with brute-force witness") {
    std::vector<double> omega = {1.0, 0.5 * (1.0 + std::sqrt(5.0))};

    FourierField g = FourierField::mode(2, 6, 0, tix(2, -1), 0, 1.0);
    FourierField sol = omega_dphi_inv(g, omega);
    double div = 2.0 * omega[0] - omega[1];
    CHECK(std::abs(sol.coeff(tix(2, -1), 0) - Complex(1.0, 0.0) / Complex(0.0, div)) < 1e-15);

    FourierField c = FourierField::constant(2, 6, 0, 1.0);
    CHECK_THROWS_AS(omega_dphi_inv(c, omega), DomainError);

    // brute-force the l minimizing |omega.l| |l|^tau over the retained ball,
    // then set the floor just above it so that exact mode must fail
    double tau0 = 1.2;
    double best = 1e300;
    TorusIndex worst = tix(0, 0);
    for (int a = -6; a <= 6; ++a)
        for (int b = -6 + std::abs(a); b <= 6 - std::abs(a); ++b) {
            if (a == 0 && b == 0) continue;
            TorusIndex l = tix(a, b);
            double val = std::abs(dot(omega, l)) * std::pow(double(l.bracket()), tau0);
            if (val < best) {
                best = val;
                worst = l;
            }
        }
    FourierField bad = FourierField::mode(2, 6, 0, worst, 0, 1.0);
    DivisorFloor floor{best * 1.01, tau0};
    CHECK_THROWS_AS(omega_dphi_inv(bad, omega, floor), SmallDivisorError);
    try {
        omega_dphi_inv(bad, omega, floor);
    } catch (const SmallDivisorError& e) {
        CHECK(e.ell == worst.to_vector());
    }
    // just below the worst value everything passes
    DivisorFloor ok{best * 0.99, tau0};
    CHECK_NOTHROW(omega_dphi_inv(bad, omega, ok));
}

TEST_CASE("flag preservation") {
    FourierField u = random_field(2, 3, 4, 21, 0.0, true, true);
    FourierField v = random_field(2, 3, 4, 22, 0.0, true, false);
    CHECK(u.real_flag);
    CHECK(u.zero_avg_x);

    FourierField p = mul(u, v);
    CHECK(p.real_flag);
    CHECK(p.reality_defect() == 0.0);

    CHECK(dx(v, 1).zero_avg_x);
    CHECK(dx(u, 2).real_flag);
    CHECK(dx_inv(u).real_flag);
    CHECK(dx_inv(u).zero_avg_x);
    CHECK((u + v).real_flag);
    FourierField w = u * Complex(0.0, 1.0);
    CHECK_FALSE(w.real_flag);
}

TEST_CASE("field JSON round trip is exact") {
    FourierField u = random_field(2, 4, 5, 33, 0.2, true, true);
    u.width = 0.5;
    auto j = field_to_json(u);
    std::string text = j.dump();
    FourierField back = field_from_json(nlohmann::json::parse(text));
    CHECK(back.v() == u.v());
    CHECK(back.kphi() == u.kphi());
    CHECK(back.kx() == u.kx());
    CHECK(back.real_flag == u.real_flag);
    CHECK(back.zero_avg_x == u.zero_avg_x);
    CHECK(max_coeff_diff(back, u) == 0.0);  // bit-exact
}

TEST_CASE("grid evaluation matches direct summation") {
    FourierField u = random_field(2, 3, 4, 44, 0.3);
    GridSpec g = padded_grid(2, 3, 4);
    auto vals = to_grid(u, g);
    // check a few nodes against eval_at
    std::vector<std::size_t> picks = {0, 7, 101, 999 % vals.size()};
    for (std::size_t flat : picks) {
        std::size_t rem = flat;
        int gx = g.dims[2];
        int ix = static_cast<int>(rem % gx);
        rem /= gx;
        int i1 = static_cast<int>(rem % g.dims[1]);
        rem /= g.dims[1];
        int i0 = static_cast<int>(rem % g.dims[0]);
        std::vector<double> phi = {2 * M_PI * i0 / g.dims[0], 2 * M_PI * i1 / g.dims[1]};
        double x = 2 * M_PI * ix / gx;
        CHECK(std::abs(vals[flat] - eval_at(u, phi, x)) < 1e-12);
    }
    // round trip grid -> modes
    FourierField back = from_grid(vals, g, 2, 3, 4);
    CHECK(max_coeff_diff(back, u) < 1e-13);
}
