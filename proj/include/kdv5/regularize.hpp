#ifndef KDV5_REGULARIZE_HPP
#define KDV5_REGULARIZE_HPP

#include <memory>

#include "kdv5/composition.hpp"
#include "kdv5/linearized.hpp"

namespace kdv5 {

/// Result of the space-variable change: the phi-dependent constant b with
/// (1+a)(1+beta_x)^5 = 1+b(phi), the displacement beta, and the transformed
/// coefficients b2 (== 1+b up to the flatness defect), b1, b0.
struct SpaceStep {
    FourierField b;     // phi-only
    FourierField beta;  // (phi, x)
    FourierField b2, b1, b0;
    double flatness = 0.0;  // sup_y |b2(phi,y) - (1+b(phi))|
};

SpaceStep space_step(const FourierField& u, const std::vector<double>& omega);

/// Result of the time reparametrization: constant m, the shift alpha,
/// xi(theta) = B^{-1}(1 + omega.dphi alpha), and c_i = B^{-1}(b_i)/xi.
struct TimeStep {
    double m = 1.0;
    FourierField alpha;  // phi-only, zero mean
    FourierField xi;     // phi-only
    FourierField c1, c0;
};

TimeStep time_step(const FourierField& b, const FourierField& b1, const FourierField& b0,
                   const std::vector<double>& omega, const DivisorFloor& floor = {});

/// The fully regularized operator
///   Lfrak = omega.dtheta + m dy^5 + dy { dy [ c1 dy ] + c0 },
/// together with the conjugating maps U1 = A B xi and U2 = A B so that
/// U1 Lfrak = L U2 at truncation.
class RegularizedOperator {
  public:
    RegularizedOperator(double m, FourierField c1, FourierField c0, FourierField xi,
                        FourierField b, FourierField alpha, SpaceDiffeo diffeo, TimeShift shift,
                        std::vector<double> omega);

    double m() const { return m_; }
    const FourierField& c1() const { return c1_; }
    const FourierField& c0() const { return c0_; }
    const FourierField& xi() const { return xi_; }
    const FourierField& b() const { return b_; }
    const FourierField& alpha() const { return alpha_; }
    const SpaceDiffeo& diffeo() const { return diffeo_; }
    const TimeShift& shift() const { return shift_; }
    const std::vector<double>& omega() const { return omega_; }

    /// Width constants of the conjugating maps (Eq. widths of the chain).
    static constexpr double k1 = 99.0 / 101.0;
    static constexpr double k2 = 10000.0 / 10201.0;

    /// Apply U1 = A B xi or U2 = A B (or their inverses) to a field.
    FourierField apply_U(int which, const FourierField& h, bool inverse) const;

    /// Apply Lfrak = omega.dtheta + m dy^5 + dy{dy[c1 dy] + c0}.
    FourierField apply_Lfrak(const FourierField& h) const;

    /// The non-transport remainder R = dy{dy[c1 dy] + c0} as an operator
    /// on H^1_0 (the perturbation the KAM step reduces).
    VarCoeffOperator remainder_operator() const;

  private:
    double m_;
    FourierField c1_, c0_, xi_, b_, alpha_;
    SpaceDiffeo diffeo_;
    TimeShift shift_;
    std::vector<double> omega_;
    FourierField inv_xi_;  // 1/xi, precomputed on the grid
};

/// Full regularization pipeline at the approximate solution u.
RegularizedOperator assemble(const FourierField& u, const std::vector<double>& omega,
                             const DivisorFloor& floor = {});

/// Conjugation defect: applies U1 Lfrak and L U2 to a basis of test modes
/// e^{i(l.phi + k x)} with |l|_1 <= lmax, 0 < |k| <= kmax and returns the
/// largest relative discrepancy.
double conjugation_oracle(const FourierField& u, const RegularizedOperator& reg, int lmax = 1,
                          int kmax = 3);

}  // namespace kdv5

#endif
