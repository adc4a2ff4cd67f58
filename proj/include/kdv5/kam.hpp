#ifndef KDV5_KAM_HPP
#define KDV5_KAM_HPP

#include <json.hpp>

#include "kdv5/regularize.hpp"

namespace kdv5 {

/// Small-divisor floor for the first-order solves:
/// |omega.l + d| >= alpha * gamma / [l]^tau for every retained l
/// (the l = 0 case is |d| >= alpha * gamma since [0] = 1).
struct KuksinFloor {
    double alpha = 0.0;  // 0 disables the check
    double gamma = 1.0;
    double tau = 4.0;
};

/// Solve  -i omega.dtheta u + d u + mu(theta) u = p(theta)  at truncation.
/// mu must have zero mean.  The truncated operator is a bordered-diagonal
/// matrix over the torus modes and is solved densely (with one step of
/// iterative refinement); the solve residual must reach 1e-10 ||p||.
FourierField kuksin_solve(double d, const FourierField& mu, const FourierField& rhs,
                          const std::vector<double>& omega, const KuksinFloor& floor = {});

/// Diagonal model D = diag_k i( d_k + mu_k(theta) ) with d_k ~ m k^5 + r_k k^3.
struct DiagonalModel {
    int v = 0, kphi = 0, kx = 0;
    double m_const = 1.0;
    std::vector<double> d;            // slot k + kx; k = 0 unused
    std::vector<FourierField> mu;     // phi-only, zero mean; slot k + kx

    static DiagonalModel unperturbed(int v, int kphi, int kx, double m);

    double d_at(int k) const { return d[static_cast<std::size_t>(k + kx)]; }
    const FourierField& mu_at(int k) const { return mu[static_cast<std::size_t>(k + kx)]; }
    double r_at(int k) const;

    /// Ordering ... < d_{-1} < 0 < d_1 < ... and pairwise separation
    /// |d_i - d_j| >= c_sep |i^5 - j^5|; throws DomainError on failure.
    void validate(double c_sep) const;

    /// As an operator (offset-0 blocks i(d_k + mu_k)).
    VarCoeffOperator as_operator() const;
};

/// State of the iterative reducibility scheme for one outer Newton iterate.
struct ReductionState {
    DiagonalModel D;
    VarCoeffOperator R;                // current remainder
    VarCoeffOperator Q;                // deferred corrections
    std::vector<VarCoeffOperator> K;   // correction sources K^1..K^n
    VarCoeffOperator Omega, OmegaInv;  // accumulated transforms Psi_1...Psi_m
    std::vector<VarCoeffOperator> Phis;
    int step_m = 1;   // next KAM step (1-based)
    int n_outer = 1;  // number of K sources
    double s_prime = 0.0, sigma = 0.0;
};

/// R_1 = K^1, Q_1 = sum_{i >= 2} K^i, identity transforms.
ReductionState init_reduction(DiagonalModel D0, std::vector<VarCoeffOperator> K,
                              double s_prime, double sigma);

/// Solve the homological equation  omega.dtheta Phi + [D, Phi] + R = diag R:
/// Phi_ii = 0 and, for i != j, blockwise Kuksin solves of
///   -i omega.dtheta Phi_ij + (d_i - d_j + mu_i - mu_j) Phi_ij = i R_ij.
/// A floor violation becomes ParameterExcludedError with witness (i, j, l).
VarCoeffOperator homological_solve(const DiagonalModel& D, const VarCoeffOperator& R,
                                   double alpha_mn, double tau,
                                   const std::vector<double>& omega);

/// Residual of the homological equation (diagnostic for the solve).
double homological_residual(const DiagonalModel& D, const VarCoeffOperator& R,
                            const VarCoeffOperator& phi, const std::vector<double>& omega,
                            const NormParams& np);

struct ReduceInfo {
    double r_before = 0.0, r_after = 0.0;  // varsigma norms
    double phi_rho = 0.0;
    double hom_residual = 0.0;  // relative to |R|
    double diag_drift = 0.0;    // largest |Re(mean R_kk)|
    int exp_terms = 0;
    bool contracted = true;
    double kuksin_beta = 0.0;   // exponent diagnostic from Assumption C
};

/// One KAM step: exponential conjugation by e^Phi, diagonal update
/// d_k += Im(mean R_kk), mu_k += -i (R_kk - mean R_kk), dense recomputation
/// of the new remainder, and conjugation of the deferred corrections.
ReductionState reduce_step(ReductionState state, double alpha_mn, double tau,
                           const std::vector<double>& omega, int s0,
                           ReduceInfo* info = nullptr);

/// Solve J v = g with J = omega.dtheta + D on zero-x-average fields,
/// one Kuksin solve per space mode (first Melnikov floor alpha |k|^5/[l]^tau).
FourierField invert_J(const DiagonalModel& D, const FourierField& g, double alpha_nn,
                      double tau, const std::vector<double>& omega);

/// Approximate right inverse of L(u):  v = W2 J^{-1} W1^{-1} F with
/// W2 = A B Omega_n and W1^{-1} = Omega_n^{-1} (1/xi) B^{-1} A^{-1}.
FourierField approx_inverse(const RegularizedOperator& reg, const ReductionState& state,
                            const FourierField& F, double alpha_nn, double tau);

/// Checkpoint round trip for long reductions.
nlohmann::json reduction_state_to_json(const ReductionState& s);
ReductionState reduction_state_from_json(const nlohmann::json& j);

}  // namespace kdv5

#endif
