#include "kdv5/regularize.hpp"

#include <algorithm>
#include <cmath>

namespace kdv5 {

namespace {

// per-phi-node x-average of grid values
std::vector<Complex> x_mean_per_phi(const std::vector<Complex>& vals, const GridSpec& g) {
    int gx = g.dims.back();
    std::size_t nodes = vals.size() / static_cast<std::size_t>(gx);
    std::vector<Complex> mean(nodes, Complex(0.0, 0.0));
    for (std::size_t j = 0; j < nodes; ++j) {
        Complex s(0.0, 0.0);
        for (int i = 0; i < gx; ++i) s += vals[j * gx + i];
        mean[j] = s / static_cast<double>(gx);
    }
    return mean;
}

}  // namespace

SpaceStep space_step(const FourierField& u, const std::vector<double>& omega) {
    const int v = u.v(), kphi = u.kphi(), kx = u.kx();
    FourierField one = FourierField::constant(v, kphi, kx, 1.0);

    CoeffsA co = coeffs_a(u);
    FourierField a = Complex(-6.0, 0.0) * dx(u, 2);  // a2 = 1 + a

    GridSpec g = padded_grid(v, kphi, kx);
    auto a_vals = to_grid(a, g);
    for (const auto& c : a_vals)
        if (1.0 + c.real() <= 0.0)
            throw DomainError("space_step: 1 + a vanishes, fifth root undefined");

    // q = (1+a)^{-1/5} on the grid; 1+b(phi) = (avg_x q)^{-5}
    std::vector<Complex> q(a_vals.size());
    for (std::size_t i = 0; i < a_vals.size(); ++i)
        q[i] = std::exp(-std::log1p(a_vals[i].real()) / 5.0);
    auto qmean = x_mean_per_phi(q, g);

    // p0 = (1+b)^{1/5} q - 1, with (1+b)^{1/5} = (avg_x q)^{-1}
    int gx = g.dims.back();
    std::vector<Complex> p0(q.size());
    for (std::size_t j = 0; j < qmean.size(); ++j)
        for (int i = 0; i < gx; ++i)
            p0[j * gx + i] = q[j * gx + i] / qmean[j] - 1.0;

    FourierField p0f = from_grid(p0, g, v, kphi, kx);
    p0f.enforce_reality();
    // zero x-average by construction; drop roundoff content on the column
    p0f.project_zero_avg_x();
    FourierField beta = dx_inv(p0f);
    beta.width = u.width;

    // b as a phi-only field from the per-node means
    GridSpec gphi;
    gphi.v = v;
    gphi.dims.assign(g.dims.begin(), g.dims.end() - 1);
    std::vector<Complex> bvals(qmean.size());
    for (std::size_t j = 0; j < qmean.size(); ++j)
        bvals[j] = std::pow(qmean[j].real(), -5.0) - 1.0;
    FourierField b = from_grid(bvals, gphi, v, kphi, 0);
    b.enforce_reality();

    SpaceStep out;
    out.b = b;
    out.beta = beta;

    SpaceDiffeo diffeo(beta);
    FourierField onepbx = one + dx(beta, 1);
    FourierField pow5 = mul(mul(onepbx, onepbx), mul(mul(onepbx, onepbx), onepbx));

    out.b2 = compose(mul(co.a2, pow5), diffeo, Direction::Inverse);
    double flat = sup_grid(out.b2 - broadcast_x(b, kx) - one);
    out.flatness = flat;
    if (flat > 1e-9)
        throw NumericalError("space_step: transformed leading coefficient is not x-independent");

    // b1* = a1 (1+bx)^3 + 3 (1+bx)^2 bxx dx a2 + 5 a2 (1+bx)^2 dx^3 beta
    FourierField pow2 = mul(onepbx, onepbx);
    FourierField pow3 = mul(pow2, onepbx);
    FourierField b1s = mul(co.a1, pow3);
    b1s += Complex(3.0, 0.0) * mul(mul(pow2, dx(beta, 2)), dx(co.a2, 1));
    b1s += Complex(5.0, 0.0) * mul(mul(co.a2, pow2), dx(beta, 3));
    out.b1 = compose(b1s, diffeo, Direction::Inverse);

    // b0* = dx a1 dx^2 beta + a1 dx^3 beta + dx^2 a2 dx^3 beta
    //       + 2 dx a2 dx^4 beta + a2 dx^5 beta + omega.dphi beta + a0 (1+bx)
    FourierField b0s = mul(dx(co.a1, 1), dx(beta, 2));
    b0s += mul(co.a1, dx(beta, 3));
    b0s += mul(dx(co.a2, 2), dx(beta, 3));
    b0s += Complex(2.0, 0.0) * mul(dx(co.a2, 1), dx(beta, 4));
    b0s += mul(co.a2, dx(beta, 5));
    b0s += dphi_omega(beta, omega);
    b0s += mul(co.a0, onepbx);
    out.b0 = compose(b0s, diffeo, Direction::Inverse);
    return out;
}

TimeStep time_step(const FourierField& b, const FourierField& b1, const FourierField& b0,
                   const std::vector<double>& omega, const DivisorFloor& floor) {
    if (b.kx() != 0) throw ConfigError("time_step: b must be phi-only");
    TimeStep out;
    out.m = 1.0 + b.mean().real();

    // alpha = (1/m) (omega.dphi)^{-1} (1 + b - m), zero mean by construction
    FourierField rhs = b;
    TorusIndex l0;
    l0.v = b.v();
    rhs.set_coeff(l0, 0, Complex(0.0, 0.0));
    out.alpha = omega_dphi_inv(rhs, omega, floor) * Complex(1.0 / out.m, 0.0);
    out.alpha.enforce_reality();

    TimeShift shift(out.alpha, omega);
    FourierField one_phi = FourierField::constant(b.v(), b.kphi(), 0, 1.0);
    out.xi = apply_B(shift, one_phi + dphi_omega(out.alpha, omega), true);
    out.xi.enforce_reality();

    GridSpec gphi = padded_grid(b.v(), b.kphi(), 0);
    auto xi_vals = to_grid(out.xi, gphi);
    for (const auto& c : xi_vals)
        if (c.real() <= 0.0) throw DomainError("time_step: xi is not positive");

    // consistency: B^{-1}(1 + b) = m xi pointwise
    FourierField lhs = apply_B(shift, one_phi + b, true);
    double defect = sup_grid(lhs - Complex(out.m, 0.0) * out.xi);
    if (defect > 1e-10)
        throw NumericalError("time_step: B^{-1}(1+b) != m xi beyond tolerance");

    // c_i = B^{-1}(b_i) / xi via grid division
    auto divide_by_xi = [&](const FourierField& f) {
        FourierField shifted = apply_B(shift, f, true);
        GridSpec g = padded_grid(f.v(), f.kphi(), f.kx());
        auto vals = to_grid(shifted, g);
        auto xig = to_grid(broadcast_x(out.xi, f.kx()), g);
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] /= xig[i].real();
        FourierField r = from_grid(vals, g, f.v(), f.kphi(), f.kx());
        if (f.real_flag) r.enforce_reality();
        r.width = shifted.width;
        return r;
    };
    out.c1 = divide_by_xi(b1);
    out.c0 = divide_by_xi(b0);
    return out;
}

RegularizedOperator::RegularizedOperator(double m, FourierField c1, FourierField c0,
                                         FourierField xi, FourierField b, FourierField alpha,
                                         SpaceDiffeo diffeo, TimeShift shift,
                                         std::vector<double> omega)
    : m_(m), c1_(std::move(c1)), c0_(std::move(c0)), xi_(std::move(xi)), b_(std::move(b)),
      alpha_(std::move(alpha)), diffeo_(std::move(diffeo)), shift_(std::move(shift)),
      omega_(std::move(omega)), inv_xi_(xi_.v(), xi_.kphi(), 0) {
    GridSpec g = padded_grid(xi_.v(), xi_.kphi(), 0);
    auto vals = to_grid(xi_, g);
    for (auto& c : vals) c = 1.0 / c.real();
    inv_xi_ = from_grid(vals, g, xi_.v(), xi_.kphi(), 0);
    inv_xi_.enforce_reality();
}

FourierField RegularizedOperator::apply_U(int which, const FourierField& h, bool inverse) const {
    if (which != 1 && which != 2) throw ConfigError("apply_U: which must be 1 or 2");
    if (!inverse) {
        FourierField t = h;
        if (which == 1) t = mul(broadcast_x(xi_, h.kx()), t);
        t = apply_B(shift_, t, false);
        return apply_A(diffeo_, t, false);
    }
    FourierField t = apply_A(diffeo_, h, true);
    t = apply_B(shift_, t, true);
    if (which == 1) t = mul(broadcast_x(inv_xi_, h.kx()), t);
    return t;
}

FourierField RegularizedOperator::apply_Lfrak(const FourierField& h) const {
    FourierField out = dphi_omega(h, omega_);
    out += Complex(m_, 0.0) * dx(h, 5);
    FourierField inner = dx(mul(c1_, dx(h, 1)), 1) + mul(c0_, h);
    out += dx(inner, 1);
    return out;
}

VarCoeffOperator RegularizedOperator::remainder_operator() const {
    auto ik = [](int k) { return Complex(0.0, k); };
    VarCoeffOperator t1 = from_multiplier(c1_, true);
    VarCoeffOperator t0 = from_multiplier(c0_, true);
    VarCoeffOperator inner = op_mul_diag_left(ik, op_mul_diag_right(t1, ik)) + t0;
    return op_mul_diag_left(ik, inner);
}

RegularizedOperator assemble(const FourierField& u, const std::vector<double>& omega,
                             const DivisorFloor& floor) {
    SpaceStep sp = space_step(u, omega);
    TimeStep ts = time_step(sp.b, sp.b1, sp.b0, omega, floor);
    return RegularizedOperator(ts.m, ts.c1, ts.c0, ts.xi, sp.b, ts.alpha, SpaceDiffeo(sp.beta),
                               TimeShift(ts.alpha, omega), omega);
}

double conjugation_oracle(const FourierField& u, const RegularizedOperator& reg, int lmax,
                          int kmax) {
    const int v = u.v(), kphi = u.kphi(), kx = u.kx();
    LinearizedL L = build_L(u, reg.omega());

    double worst = 0.0;
    FourierField probe(v, lmax, 0);
    probe.for_each([&](const TorusIndex& l, int, Complex) {
        for (int k = -kmax; k <= kmax; ++k) {
            if (k == 0) continue;
            FourierField h = FourierField::mode(v, kphi, kx, l, k, 1.0);
            h.zero_avg_x = true;
            FourierField lhs = reg.apply_U(1, reg.apply_Lfrak(h), false);
            FourierField rhs = L.apply(reg.apply_U(2, h, false));
            double scale = std::max(1.0, norm_sp(rhs, NormParams(0.0, 0.0)));
            worst = std::max(worst, norm_sp(lhs - rhs, NormParams(0.0, 0.0)) / scale);
        }
    });
    return worst;
}

}  // namespace kdv5
