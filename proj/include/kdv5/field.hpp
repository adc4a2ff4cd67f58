#ifndef KDV5_FIELD_HPP
#define KDV5_FIELD_HPP

#include <functional>
#include <limits>
#include <vector>

#include "kdv5/core.hpp"

namespace kdv5 {

/// Truncated Fourier series on T^v x T:
///   u(phi, x) = sum_{|l|_1 <= Kphi, |k| <= Kx} c_{l,k} e^{i l.phi} e^{i k x}.
/// Coefficients are stored on the dense index box with the l^1-ball
/// constraint enforced (entries outside the ball are structurally zero).
/// A field with kx() == 0 represents a function of phi only.
///
/// Values are immutable in spirit: all operations return new fields.
/// `width` is analyticity-width bookkeeping carried through compositions;
/// it never affects numerics (NaN = untracked).
class FourierField {
  public:
    FourierField() = default;
    FourierField(int v, int kphi, int kx);

    static FourierField constant(int v, int kphi, int kx, Complex value);
    /// Single mode value * e^{i(l.phi + k x)}.
    static FourierField mode(int v, int kphi, int kx, const TorusIndex& l, int k, Complex value);

    int v() const { return v_; }
    int kphi() const { return kphi_; }
    int kx() const { return kx_; }
    int nphi() const { return 2 * kphi_ + 1; }
    int nx() const { return 2 * kx_ + 1; }
    std::size_t size() const { return data_.size(); }
    bool compatible(const FourierField& o) const {
        return v_ == o.v_ && kphi_ == o.kphi_ && kx_ == o.kx_;
    }

    Complex coeff(const TorusIndex& l, int k) const;
    void set_coeff(const TorusIndex& l, int k, Complex val);
    void add_coeff(const TorusIndex& l, int k, Complex val);

    const std::vector<Complex>& raw() const { return data_; }
    std::vector<Complex>& raw() { return data_; }

    /// Flat index helpers (space axis fastest).
    std::size_t encode(const TorusIndex& l, int k) const;
    void decode(std::size_t flat, TorusIndex& l, int& k) const;
    bool in_ball(const TorusIndex& l) const { return l.l1() <= kphi_; }

    template <class F>
    void for_each(F&& f) const {
        TorusIndex l;
        int k;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            decode(i, l, k);
            if (l.l1() <= kphi_) f(l, k, data_[i]);
        }
    }

    // -- flags ------------------------------------------------------------
    bool real_flag = false;    // represents a real-valued function
    bool zero_avg_x = false;   // all (l, k=0) coefficients vanish
    double width = std::numeric_limits<double>::quiet_NaN();

    /// Symmetrize to exact Hermitian coefficients and set real_flag.
    void enforce_reality();
    /// Zero the k = 0 column and set zero_avg_x.
    void project_zero_avg_x();
    /// Largest |c(-l,-k) - conj(c(l,k))|.
    double reality_defect() const;
    /// Largest |c(l, 0)|.
    double x_average_magnitude() const;
    /// Coefficient of the (l = 0, k = 0) mode (the T^{v+1} average).
    Complex mean() const;

    // -- arithmetic --------------------------------------------------------
    FourierField& operator+=(const FourierField& o);
    FourierField& operator-=(const FourierField& o);
    FourierField& operator*=(Complex a);
    friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
    friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
    friend FourierField operator*(FourierField a, Complex s) { return a *= s; }
    friend FourierField operator*(Complex s, FourierField a) { return a *= s; }

    double max_abs_coeff() const;

  private:
    int v_ = 0, kphi_ = 0, kx_ = 0;
    std::vector<Complex> data_;
};

// ---- norms ---------------------------------------------------------------

/// ( sum |u_{l,k}|^2 e^{2(|l|+|k|)s} ([l]+[k])^{2p} )^{1/2}
double norm_sp(const FourierField& u, const NormParams& np);

/// ( sum |u_{l,k}|^2 e^{2(|l|+|k|)s} [k]^{2p} [l]^{2p} )^{1/2}
double norm_frak(const FourierField& u, const NormParams& np);

/// Max norm |u|_{s,p} = sum_{|alpha| <= p} max |D^alpha u|.  For s = 0 the
/// max is taken over the real collocation grid; for s > 0 the strip bound
/// sum |c| e^{(|l|+|k|)s} per derivative is used.  p must be integral.
double norm_max(const FourierField& u, const NormParams& np);

/// Norm of a phi-only series: ( sum |a_l|^2 e^{2|l|s} [l]^{2p} )^{1/2}.
/// Requires kx() == 0.
double norm_torus(const FourierField& u, const NormParams& np);

/// Kuksin's weighted l^1 norm of a phi-only series: sum |a_l| [l]^tau e^{|l|s}.
double norm_l1_torus(const FourierField& u, double s, double tau);

/// L^2 pairing without conjugation, (u,v) = sum u_{l,k} v_{-l,-k}.
Complex l2_pairing(const FourierField& u, const FourierField& v);

// ---- calculus --------------------------------------------------------------

/// Product via padded collocation (exact convolution re-truncated to the box).
FourierField mul(const FourierField& u, const FourierField& v);

/// d^order/dx^order: coefficients scaled by (ik)^order.
FourierField dx(const FourierField& u, int order);

/// Primitive in x with zero average; input must have zero x-average.
FourierField dx_inv(const FourierField& u);

/// omega . d/dphi: coefficients scaled by i(omega.l).
FourierField dphi_omega(const FourierField& u, const std::vector<double>& omega);

/// Inverse of omega.d/dphi on zero-phi-average fields; l = 0 forced to 0.
/// With floor.alpha0 > 0, throws SmallDivisorError when |omega.l| drops
/// below alpha0/[l]^tau0 for a retained mode.
FourierField omega_dphi_inv(const FourierField& u, const std::vector<double>& omega,
                            const DivisorFloor& floor = {});

/// Re-truncate (or zero-pad) to a new box; modes outside are dropped.
FourierField retruncate(const FourierField& u, int kphi, int kx);

// ---- grid bridge -----------------------------------------------------------

/// Padded collocation grid for dealiased quadratic products:
/// per-axis size >= 3K+1 rounded to an FFT-friendly length.
struct GridSpec {
    int v = 0;
    std::vector<int> dims;  // v torus axes then the space axis
    std::size_t total() const {
        std::size_t t = 1;
        for (int d : dims) t *= static_cast<std::size_t>(d);
        return t;
    }
};

GridSpec padded_grid(int v, int kphi, int kx);

/// Evaluate on the grid (synthesis).
std::vector<Complex> to_grid(const FourierField& u, const GridSpec& g);

/// Expand grid values and truncate to the (kphi, kx) box (analysis).
FourierField from_grid(const std::vector<Complex>& values, const GridSpec& g, int v, int kphi,
                       int kx);

/// Direct evaluation at one point (test/diagnostic helper, O(#modes)).
Complex eval_at(const FourierField& u, const std::vector<double>& phi, double x);

/// Largest |u| over the padded collocation grid.
double sup_grid(const FourierField& u);

/// Broadcast a phi-only field to the (kphi, kx) box (content at k = 0).
FourierField broadcast_x(const FourierField& u, int kx);

/// Restriction of a field to its k = 0 column as a phi-only field.
FourierField x_average_part(const FourierField& u);

}  // namespace kdv5

#endif
