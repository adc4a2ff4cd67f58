#ifndef KDV5_OPERATOR_HPP
#define KDV5_OPERATOR_HPP

#include <functional>
#include <map>

#include "kdv5/field.hpp"

namespace kdv5 {

/// The four decay weightings of operator norms; Rho is the max of
/// Plain/Tilde/Hat.  Weights act on a block A(phi)^{i2}_{i1} as
///   Plain: 1,  Varsigma: 1/(|i1|^2 |i2|),  Tilde: i2^2/i1^2,  Hat: |i1|/|i2|.
enum class DecayKind { Plain, Varsigma, Tilde, Hat, Rho };

/// phi-dependent operator matrix acting on space modes: block (i1, i2)
/// is a torus Fourier series, stored sparsely by diagonal offset
/// i = i1 - i2.  With h10 set, rows and columns are restricted to
/// Z \ {0} (the operator acts on zero-x-average functions).
class VarCoeffOperator {
  public:
    VarCoeffOperator() = default;
    VarCoeffOperator(int v, int kphi, int kx, bool h10);

    int v() const { return v_; }
    int kphi() const { return kphi_; }
    int kx() const { return kx_; }
    bool h10() const { return h10_; }
    int nx() const { return 2 * kx_ + 1; }
    std::size_t lsize() const { return lsize_; }
    bool compatible(const VarCoeffOperator& o) const {
        return v_ == o.v_ && kphi_ == o.kphi_ && kx_ == o.kx_;
    }

    bool row_valid(int i1) const { return std::abs(i1) <= kx_ && !(h10_ && i1 == 0); }
    bool block_valid(int i1, int i2) const { return row_valid(i1) && row_valid(i2); }

    /// Block as a phi-only field (zero if absent).
    FourierField block(int i1, int i2) const;
    void set_block(int i1, int i2, const FourierField& series);
    void add_to_block(int i1, int i2, const FourierField& series);

    Complex block_coeff(int i1, int i2, const TorusIndex& l) const;

    const std::map<int, std::vector<Complex>>& lines() const { return lines_; }
    std::map<int, std::vector<Complex>>& lines() { return lines_; }

    /// Raw pointer to the series of block (i1, i2), or nullptr if the
    /// line is absent.  Layout matches FourierField(v, kphi, 0).raw().
    const Complex* series_ptr(int i1, int i2) const;
    Complex* ensure_series(int i1, int i2);

    void drop_zero_lines(double threshold = 0.0);
    double max_abs_entry() const;

    VarCoeffOperator& operator+=(const VarCoeffOperator& o);
    VarCoeffOperator& operator-=(const VarCoeffOperator& o);
    VarCoeffOperator& operator*=(Complex a);
    friend VarCoeffOperator operator+(VarCoeffOperator a, const VarCoeffOperator& b) {
        return a += b;
    }
    friend VarCoeffOperator operator-(VarCoeffOperator a, const VarCoeffOperator& b) {
        return a -= b;
    }
    friend VarCoeffOperator operator*(Complex s, VarCoeffOperator a) { return a *= s; }

  private:
    int v_ = 0, kphi_ = 0, kx_ = 0;
    bool h10_ = false;
    std::size_t lsize_ = 0;  // dense l-box size per series
    // line offset -> (2kx+1) row series, invalid rows stay zero
    std::map<int, std::vector<Complex>> lines_;
};

VarCoeffOperator op_identity(int v, int kphi, int kx, bool h10);

/// Multiplication operator h -> g h; Toeplitz blocks T^{i2}_{i1} = g_{i1-i2}(phi).
VarCoeffOperator from_multiplier(const FourierField& g, bool h10 = false);

/// Diagonal operator with constant-in-phi entries fn(k).
VarCoeffOperator op_diag_fn(int v, int kphi, int kx, bool h10,
                            const std::function<Complex(int)>& fn);

/// Operator product (blockwise torus-series convolution), via collocation
/// in phi and dense per-node matrix products.
VarCoeffOperator op_mul(const VarCoeffOperator& a, const VarCoeffOperator& b);

/// Fast paths: diagonal (constant-in-phi) factors applied exactly.
VarCoeffOperator op_mul_diag_left(const std::function<Complex(int)>& fn,
                                  const VarCoeffOperator& a);
VarCoeffOperator op_mul_diag_right(const VarCoeffOperator& a,
                                   const std::function<Complex(int)>& fn);

/// Apply to a field: (A h)(phi, x), torus convolution blockwise.
FourierField op_apply(const VarCoeffOperator& a, const FourierField& h);

/// Blockwise omega . d/dtheta (scales block coefficients by i(omega.l)).
VarCoeffOperator op_dtheta(const VarCoeffOperator& a, const std::vector<double>& omega);

double decay_norm(const VarCoeffOperator& a, DecayKind kind, const NormParams& np);

struct ExpResult {
    VarCoeffOperator value;
    int terms = 0;
    double dist_identity = 0.0;  // |e^Phi - I| in the plain decay norm
};

/// Truncated exponential series sum Phi^n / n! until the term decay norm
/// falls below tol.  Requires |Phi|_{s,p} <= 1/2 (checked with np).
ExpResult op_exp(const VarCoeffOperator& phi, const NormParams& np, double tol = 1e-14,
                 int max_terms = 60);

/// Defect of the Hamiltonian structure A = dx (self-adjoint): the largest
/// coefficient mismatch of G = dx^{-1} A against G^{i2}_{i1} = G^{-i1}_{-i2},
/// normalized by the largest entry of G.  Requires h10.
double hamiltonian_defect(const VarCoeffOperator& a);

}  // namespace kdv5

#endif
