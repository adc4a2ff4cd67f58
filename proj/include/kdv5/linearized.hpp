#ifndef KDV5_LINEARIZED_HPP
#define KDV5_LINEARIZED_HPP

#include "kdv5/lambda.hpp"
#include "kdv5/operator.hpp"

namespace kdv5 {

/// The forced quasi-linear fifth-order KdV problem.  `dxf` is the forcing
/// term d/dx f(omega t, x): real, zero x-average.
struct KdVProblem {
    FourierField dxf;
    std::vector<double> omega_bar;
    double eps = 0.0;   // ||dxf||_{s,q}
    double eps0 = 1e-2;  // admissible bound on eps

    void validate() const;
};

/// Builds a forcing field from (l..., k, amplitude) triples; the result is
/// symmetrized to a real field with zero x-average.
FourierField forcing_from_triples(int v, int kphi, int kx,
                                  const std::vector<std::pair<std::vector<int>, double>>& modes);

/// Nonlinear residual
///   F(u) = omega.dphi u + dx^5 u + 10 u dx^3 u + 20 dx u dx^2 u
///          + 30 u^2 dx u - 6 dx^2 u dx^5 u - 18 dx^3 u dx^4 u - dxf.
FourierField residual_F(const FourierField& u, const FourierField& dxf,
                        const std::vector<double>& omega);

/// Coefficients of the Hamiltonian (divergence) form of the linearization.
struct CoeffsA {
    FourierField a2;  // 1 - 6 u_xx
    FourierField a1;  // 10 u
    FourierField a0;  // 10 u_xx + 30 u^2
};
CoeffsA coeffs_a(const FourierField& u);

/// Coefficients of the expanded (non-divergence) form.
struct StarCoeffs {
    FourierField a5, a4, a3, a2, a1, a0;
};
StarCoeffs star_coeffs(const FourierField& u);

/// The linearized operator L(u) h = omega.dphi h + M h with
///   M = dx { dx^2 [ a2 dx^2 h ] + dx [ a1 dx h ] + a0 h }.
struct LinearizedL {
    std::vector<double> omega;
    VarCoeffOperator M;

    FourierField apply(const FourierField& h) const {
        return dphi_omega(h, omega) + op_apply(M, h);
    }
};

LinearizedL build_L(const FourierField& u, const std::vector<double>& omega);

}  // namespace kdv5

#endif
