#ifndef KDV5_CORE_HPP
#define KDV5_CORE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdv5 {

using Complex = std::complex<double>;

/// Maximum number of torus (time) frequencies supported.
constexpr int kMaxTorusDim = 4;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad inputs or violated configuration invariants.
struct ConfigError : Error {
    using Error::Error;
};

/// Mathematical precondition violated (nonzero average, non-contraction, ...).
struct DomainError : Error {
    using Error::Error;
};

/// An algorithm failed to reach its stated accuracy (no convergence,
/// ill-conditioned solve, broken internal assertion).
struct NumericalError : Error {
    using Error::Error;
};

/// A divisor |omega.l| or |omega.l + d| fell below the configured floor.
/// Carries the offending torus index.
struct SmallDivisorError : DomainError {
    SmallDivisorError(std::string msg, std::vector<int> ell_, double divisor_, double floor_)
        : DomainError(std::move(msg)), ell(std::move(ell_)), divisor(divisor_), floor(floor_) {}
    std::vector<int> ell;
    double divisor = 0.0;
    double floor = 0.0;
};

/// A Melnikov non-resonance check failed: the current lambda must be
/// excluded from the parameter set.  Carries the witness (i, j, ell).
struct ParameterExcludedError : Error {
    ParameterExcludedError(std::string msg, int i_, int j_, std::vector<int> ell_,
                           double divisor_, double threshold_)
        : Error(std::move(msg)), i(i_), j(j_), ell(std::move(ell_)),
          divisor(divisor_), threshold(threshold_) {}
    int i = 0;
    int j = 0;
    std::vector<int> ell;
    double divisor = 0.0;
    double threshold = 0.0;
};

/// Multi-index of torus Fourier modes, |l| below means the l^1 norm
/// |l_1| + ... + |l_v|, and [l] = max(|l|, 1).
struct TorusIndex {
    int v = 0;
    std::array<int, kMaxTorusDim> c{};

    int l1() const {
        int s = 0;
        for (int d = 0; d < v; ++d) s += std::abs(c[d]);
        return s;
    }
    int bracket() const { return std::max(l1(), 1); }
    bool is_zero() const {
        for (int d = 0; d < v; ++d)
            if (c[d] != 0) return false;
        return true;
    }
    TorusIndex operator-() const {
        TorusIndex r = *this;
        for (int d = 0; d < v; ++d) r.c[d] = -c[d];
        return r;
    }
    bool operator==(const TorusIndex& o) const {
        if (v != o.v) return false;
        for (int d = 0; d < v; ++d)
            if (c[d] != o.c[d]) return false;
        return true;
    }
    std::vector<int> to_vector() const { return std::vector<int>(c.begin(), c.begin() + v); }
};

inline double dot(const std::vector<double>& omega, const TorusIndex& l) {
    double s = 0.0;
    for (int d = 0; d < l.v; ++d) s += omega[d] * l.c[d];
    return s;
}

/// Parameters of the analytic norms: width s > 0 (s = 0 allowed for the
/// plain Sobolev-type weight), regularity weight p >= 0, and the fixed
/// integer s0 > (v+1)/2 used by the algebra estimates.
struct NormParams {
    double s = 0.0;
    double p = 0.0;
    int s0 = 3;

    NormParams() = default;
    NormParams(double s_, double p_, int s0_ = 3) : s(s_), p(p_), s0(s0_) {
        if (s < 0.0 || p < 0.0) throw ConfigError("NormParams: s and p must be nonnegative");
    }
};

/// Floor for the truncated Diophantine check used by (omega.dphi)^{-1}:
/// |omega.l| >= alpha0 / [l]^tau0 for all retained l != 0.
/// alpha0 == 0 disables the check.
struct DivisorFloor {
    double alpha0 = 0.0;
    double tau0 = 0.0;
};

inline double sq(double x) { return x * x; }

/// pow for small nonnegative integer exponents of an int index.
inline double ipow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace kdv5

#endif
