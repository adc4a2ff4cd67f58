#ifndef KDV5_COMPOSITION_HPP
#define KDV5_COMPOSITION_HPP

#include <optional>

#include "kdv5/field.hpp"

namespace kdv5 {

/// Width shrink factors of forward / inverse compositions.
constexpr double kForwardShrink = 100.0 / 101.0;
constexpr double kInverseShrink = 99.0 / 100.0;

/// Smallness threshold for displacements: |f|_{0,1} <= 1/100.
constexpr double kDiffeoSmallness = 1.0 / 100.0;

enum class Direction { Forward, Inverse };

/// Fixed-point inverse displacement: returns beta_hat with
///   x = y + beta_hat(phi,y)  <=>  y = x + beta(phi,x),
/// computed by iterating beta_hat <- -beta(phi, y + beta_hat) on the
/// collocation grid until the sup change drops below tol.
FourierField invert_displacement(const FourierField& beta, double tol = 1e-13,
                                 int max_iter = 200);

/// phi-dependent circle diffeomorphism y = x + beta(phi, x).
/// Requires |beta|_{0,1} <= 1/100 and strict monotonicity in x.
class SpaceDiffeo {
  public:
    explicit SpaceDiffeo(FourierField beta);

    const FourierField& beta() const { return beta_; }
    /// Inverse displacement, computed on first use.
    const FourierField& beta_hat() const;

  private:
    FourierField beta_;
    mutable std::optional<FourierField> beta_hat_;
};

/// (T u)(phi,x) = u(phi, x + beta(phi,x)); Inverse uses beta_hat.
FourierField compose(const FourierField& u, const SpaceDiffeo& d, Direction dir);

/// Symplectic variant: (A h)(phi,x) = (1 + beta_x) h(phi, x + beta);
/// inverse (A^{-1} h)(phi,y) = (1 + beta_hat_y) h(phi, y + beta_hat).
/// Maps zero-x-average fields to zero-x-average fields.
FourierField apply_A(const SpaceDiffeo& d, const FourierField& h, bool inverse);

/// Quasi-periodic time reparametrization theta = phi + omega alpha(phi).
/// alpha is a phi-only field with zero torus average, |alpha|_{0,1} <= 1/100.
class TimeShift {
  public:
    TimeShift(FourierField alpha, std::vector<double> omega);

    const FourierField& alpha() const { return alpha_; }
    const FourierField& alpha_hat() const;
    const std::vector<double>& omega() const { return omega_; }

  private:
    FourierField alpha_;  // kx == 0
    std::vector<double> omega_;
    mutable std::optional<FourierField> alpha_hat_;
};

/// (B h)(phi,y) = h(phi + omega alpha(phi), y); inverse via alpha_hat.
FourierField apply_B(const TimeShift& t, const FourierField& h, bool inverse);

}  // namespace kdv5

#endif
