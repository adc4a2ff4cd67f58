#include "kdv5/linearized.hpp"

namespace kdv5 {

void KdVProblem::validate() const {
    if (!dxf.real_flag || dxf.x_average_magnitude() > 1e-12 * std::max(1.0, dxf.max_abs_coeff()))
        throw ConfigError("KdVProblem: forcing must be real with zero x-average");
    if (static_cast<int>(omega_bar.size()) != dxf.v())
        throw ConfigError("KdVProblem: omega_bar dimension mismatch");
    if (eps > eps0) throw ConfigError("KdVProblem: forcing magnitude exceeds eps0");
}

FourierField forcing_from_triples(
    int v, int kphi, int kx, const std::vector<std::pair<std::vector<int>, double>>& modes) {
    FourierField f(v, kphi, kx);
    for (const auto& [idx, amp] : modes) {
        if (static_cast<int>(idx.size()) != v + 1)
            throw ConfigError("forcing_from_triples: index must have v+1 entries");
        TorusIndex l;
        l.v = v;
        for (int d = 0; d < v; ++d) l.c[d] = idx[d];
        int k = idx[v];
        if (k == 0) throw ConfigError("forcing_from_triples: space mode 0 not allowed");
        f.add_coeff(l, k, Complex(0.5 * amp, 0.0));
        f.add_coeff(-l, -k, Complex(0.5 * amp, 0.0));
    }
    f.enforce_reality();
    f.zero_avg_x = true;
    return f;
}

FourierField residual_F(const FourierField& u, const FourierField& dxf,
                        const std::vector<double>& omega) {
    FourierField u1 = dx(u, 1);
    FourierField u2 = dx(u, 2);
    FourierField u3 = dx(u, 3);
    FourierField u4 = dx(u, 4);
    FourierField u5 = dx(u, 5);

    FourierField out = dphi_omega(u, omega);
    out += u5;
    out += Complex(10.0, 0.0) * mul(u, u3);
    out += Complex(20.0, 0.0) * mul(u1, u2);
    out += Complex(30.0, 0.0) * mul(mul(u, u), u1);
    out -= Complex(6.0, 0.0) * mul(u2, u5);
    out -= Complex(18.0, 0.0) * mul(u3, u4);
    out -= dxf;
    if (u.real_flag && dxf.real_flag) out.enforce_reality();
    return out;
}

CoeffsA coeffs_a(const FourierField& u) {
    FourierField one = FourierField::constant(u.v(), u.kphi(), u.kx(), 1.0);
    FourierField uxx = dx(u, 2);
    CoeffsA c{one - Complex(6.0, 0.0) * uxx, Complex(10.0, 0.0) * u,
              Complex(10.0, 0.0) * uxx + Complex(30.0, 0.0) * mul(u, u)};
    return c;
}

StarCoeffs star_coeffs(const FourierField& u) {
    FourierField one = FourierField::constant(u.v(), u.kphi(), u.kx(), 1.0);
    FourierField u1 = dx(u, 1);
    FourierField u2 = dx(u, 2);
    FourierField u3 = dx(u, 3);
    FourierField u4 = dx(u, 4);
    FourierField u5 = dx(u, 5);
    StarCoeffs s;
    s.a5 = one - Complex(6.0, 0.0) * u2;
    s.a4 = Complex(-18.0, 0.0) * u3;
    s.a3 = Complex(10.0, 0.0) * u - Complex(18.0, 0.0) * u4;
    s.a2 = Complex(20.0, 0.0) * u1 - Complex(6.0, 0.0) * u5;
    s.a1 = Complex(20.0, 0.0) * u2 + Complex(30.0, 0.0) * mul(u, u);
    s.a0 = Complex(10.0, 0.0) * u3 + Complex(60.0, 0.0) * mul(u, u1);
    return s;
}

LinearizedL build_L(const FourierField& u, const std::vector<double>& omega) {
    CoeffsA c = coeffs_a(u);
    auto ik = [](int k) { return Complex(0.0, k); };
    auto ik2 = [](int k) { return Complex(-static_cast<double>(k) * k, 0.0); };

    // M = Dx ( Dx^2 T_{a2} Dx^2 + Dx T_{a1} Dx + T_{a0} ), H^1_0 rows/cols
    VarCoeffOperator t2 = from_multiplier(c.a2, true);
    VarCoeffOperator t1 = from_multiplier(c.a1, true);
    VarCoeffOperator t0 = from_multiplier(c.a0, true);

    VarCoeffOperator part2 = op_mul_diag_left(ik2, op_mul_diag_right(t2, ik2));
    VarCoeffOperator part1 = op_mul_diag_left(ik, op_mul_diag_right(t1, ik));
    VarCoeffOperator inner = part2 + part1 + t0;
    LinearizedL L;
    L.omega = omega;
    L.M = op_mul_diag_left(ik, inner);
    return L;
}

}  // namespace kdv5
