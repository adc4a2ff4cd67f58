#include "kdv5/field.hpp"

#include <algorithm>
#include <cmath>

#include "kdv5/transform.hpp"

namespace kdv5 {

FourierField::FourierField(int v, int kphi, int kx) : v_(v), kphi_(kphi), kx_(kx) {
    if (v < 1 || v > kMaxTorusDim) throw ConfigError("FourierField: v out of range");
    if (kphi < 0 || kx < 0) throw ConfigError("FourierField: negative truncation");
    std::size_t n = 1;
    for (int d = 0; d < v; ++d) n *= static_cast<std::size_t>(2 * kphi + 1);
    n *= static_cast<std::size_t>(2 * kx + 1);
    data_.assign(n, Complex(0.0, 0.0));
}

FourierField FourierField::constant(int v, int kphi, int kx, Complex value) {
    FourierField f(v, kphi, kx);
    TorusIndex l;
    l.v = v;
    f.set_coeff(l, 0, value);
    f.real_flag = (value.imag() == 0.0);
    return f;
}

FourierField FourierField::mode(int v, int kphi, int kx, const TorusIndex& l, int k,
                                Complex value) {
    FourierField f(v, kphi, kx);
    f.set_coeff(l, k, value);
    f.zero_avg_x = (k != 0);
    return f;
}

std::size_t FourierField::encode(const TorusIndex& l, int k) const {
    std::size_t idx = 0;
    for (int d = 0; d < v_; ++d) {
        int c = l.c[d];
        if (std::abs(c) > kphi_) throw DomainError("FourierField: torus index out of box");
        idx = idx * static_cast<std::size_t>(nphi()) + static_cast<std::size_t>(c + kphi_);
    }
    if (std::abs(k) > kx_) throw DomainError("FourierField: space index out of box");
    return idx * static_cast<std::size_t>(nx()) + static_cast<std::size_t>(k + kx_);
}

void FourierField::decode(std::size_t flat, TorusIndex& l, int& k) const {
    l.v = v_;
    k = static_cast<int>(flat % static_cast<std::size_t>(nx())) - kx_;
    flat /= static_cast<std::size_t>(nx());
    for (int d = v_ - 1; d >= 0; --d) {
        l.c[d] = static_cast<int>(flat % static_cast<std::size_t>(nphi())) - kphi_;
        flat /= static_cast<std::size_t>(nphi());
    }
}

Complex FourierField::coeff(const TorusIndex& l, int k) const {
    if (l.l1() > kphi_ || std::abs(k) > kx_) return Complex(0.0, 0.0);
    return data_[encode(l, k)];
}

void FourierField::set_coeff(const TorusIndex& l, int k, Complex val) {
    if (!in_ball(l)) throw DomainError("FourierField: torus index outside the l1 ball");
    data_[encode(l, k)] = val;
}

void FourierField::add_coeff(const TorusIndex& l, int k, Complex val) {
    if (!in_ball(l)) throw DomainError("FourierField: torus index outside the l1 ball");
    data_[encode(l, k)] += val;
}

void FourierField::enforce_reality() {
    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        decode(i, l, k);
        std::size_t j = encode(-l, -k);
        if (j < i) continue;
        Complex a = data_[i], b = data_[j];
        Complex half = 0.5 * (a + std::conj(b));
        data_[i] = half;
        data_[j] = std::conj(half);
    }
    real_flag = true;
}

void FourierField::project_zero_avg_x() {
    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        decode(i, l, k);
        if (k == 0) data_[i] = Complex(0.0, 0.0);
    }
    zero_avg_x = true;
}

double FourierField::reality_defect() const {
    double worst = 0.0;
    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        decode(i, l, k);
        if (l.l1() > kphi_) continue;
        worst = std::max(worst, std::abs(data_[i] - std::conj(data_[encode(-l, -k)])));
    }
    return worst;
}

double FourierField::x_average_magnitude() const {
    double worst = 0.0;
    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        decode(i, l, k);
        if (k == 0) worst = std::max(worst, std::abs(data_[i]));
    }
    return worst;
}

Complex FourierField::mean() const {
    TorusIndex l;
    l.v = v_;
    return coeff(l, 0);
}

FourierField& FourierField::operator+=(const FourierField& o) {
    if (!compatible(o)) throw ConfigError("field +: incompatible truncations");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    real_flag = real_flag && o.real_flag;
    zero_avg_x = zero_avg_x && o.zero_avg_x;
    width = std::fmin(width, o.width);
    return *this;
}

FourierField& FourierField::operator-=(const FourierField& o) {
    if (!compatible(o)) throw ConfigError("field -: incompatible truncations");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    real_flag = real_flag && o.real_flag;
    zero_avg_x = zero_avg_x && o.zero_avg_x;
    width = std::fmin(width, o.width);
    return *this;
}

FourierField& FourierField::operator*=(Complex a) {
    for (auto& c : data_) c *= a;
    real_flag = real_flag && (a.imag() == 0.0);
    return *this;
}

double FourierField::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : data_) m = std::max(m, std::abs(c));
    return m;
}

// ---- norms -----------------------------------------------------------------

namespace {

// accumulate |c|^2 * w with extended precision
struct Accumulator {
    long double sum = 0.0L;
    void add(double term) { sum += static_cast<long double>(term); }
    double value() const { return static_cast<double>(sum); }
};

}  // namespace

double norm_sp(const FourierField& u, const NormParams& np) {
    Accumulator acc;
    u.for_each([&](const TorusIndex& l, int k, Complex c) {
        if (c == Complex(0.0, 0.0)) return;
        double w = std::exp(2.0 * (l.l1() + std::abs(k)) * np.s) *
                   std::pow(static_cast<double>(l.bracket() + std::max(std::abs(k), 1)),
                            2.0 * np.p);
        acc.add(std::norm(c) * w);
    });
    return std::sqrt(acc.value());
}

double norm_frak(const FourierField& u, const NormParams& np) {
    Accumulator acc;
    u.for_each([&](const TorusIndex& l, int k, Complex c) {
        if (c == Complex(0.0, 0.0)) return;
        double w = std::exp(2.0 * (l.l1() + std::abs(k)) * np.s) *
                   std::pow(static_cast<double>(std::max(std::abs(k), 1)), 2.0 * np.p) *
                   std::pow(static_cast<double>(l.bracket()), 2.0 * np.p);
        acc.add(std::norm(c) * w);
    });
    return std::sqrt(acc.value());
}

double norm_torus(const FourierField& u, const NormParams& np) {
    if (u.kx() != 0) throw ConfigError("norm_torus: field must be phi-only (kx == 0)");
    Accumulator acc;
    u.for_each([&](const TorusIndex& l, int, Complex c) {
        if (c == Complex(0.0, 0.0)) return;
        double w = std::exp(2.0 * l.l1() * np.s) *
                   std::pow(static_cast<double>(l.bracket()), 2.0 * np.p);
        acc.add(std::norm(c) * w);
    });
    return std::sqrt(acc.value());
}

double norm_l1_torus(const FourierField& u, double s, double tau) {
    if (u.kx() != 0) throw ConfigError("norm_l1_torus: field must be phi-only");
    long double sum = 0.0L;
    u.for_each([&](const TorusIndex& l, int, Complex c) {
        if (c == Complex(0.0, 0.0)) return;
        sum += static_cast<long double>(
            std::abs(c) * std::pow(static_cast<double>(l.bracket()), tau) *
            std::exp(l.l1() * s));
    });
    return static_cast<double>(sum);
}

double norm_max(const FourierField& u, const NormParams& np) {
    int p = static_cast<int>(np.p);
    if (std::abs(np.p - p) > 1e-12) throw ConfigError("norm_max: p must be an integer");

    // enumerate derivative multi-indices alpha over (phi_1..phi_v, x), |alpha| <= p
    int dims = u.v() + 1;
    std::vector<int> alpha(dims, 0);
    double total = 0.0;
    std::function<void(int, int)> walk = [&](int pos, int remaining) {
        if (pos == dims) {
            FourierField d = u;
            TorusIndex l;
            int k;
            for (std::size_t i = 0; i < d.raw().size(); ++i) {
                d.decode(i, l, k);
                Complex fac(1.0, 0.0);
                for (int a = 0; a < u.v(); ++a)
                    for (int r = 0; r < alpha[a]; ++r) fac *= Complex(0.0, l.c[a]);
                for (int r = 0; r < alpha[u.v()]; ++r) fac *= Complex(0.0, k);
                d.raw()[i] *= fac;
            }
            if (np.s == 0.0) {
                total += sup_grid(d);
            } else {
                // strip bound: sum of coefficient magnitudes weighted by e^{(|l|+|k|)s}
                long double sum = 0.0L;
                d.for_each([&](const TorusIndex& li, int ki, Complex c) {
                    sum += static_cast<long double>(std::abs(c) *
                                                    std::exp((li.l1() + std::abs(ki)) * np.s));
                });
                total += static_cast<double>(sum);
            }
            return;
        }
        for (int a = 0; a <= remaining; ++a) {
            alpha[pos] = a;
            walk(pos + 1, remaining - a);
        }
        alpha[pos] = 0;
    };
    walk(0, p);
    return total;
}

Complex l2_pairing(const FourierField& u, const FourierField& v) {
    if (!u.compatible(v)) throw ConfigError("l2_pairing: incompatible truncations");
    Complex sum(0.0, 0.0);
    u.for_each([&](const TorusIndex& l, int k, Complex c) {
        if (c == Complex(0.0, 0.0)) return;
        sum += c * v.coeff(-l, -k);
    });
    return sum;
}

// ---- grid bridge -------------------------------------------------------------

GridSpec padded_grid(int v, int kphi, int kx) {
    GridSpec g;
    g.v = v;
    for (int d = 0; d < v; ++d) g.dims.push_back(fft_friendly(3 * kphi + 1));
    g.dims.push_back(fft_friendly(3 * kx + 1));
    return g;
}

std::vector<Complex> to_grid(const FourierField& u, const GridSpec& g) {
    std::vector<Complex> data(g.total(), Complex(0.0, 0.0));
    int na = static_cast<int>(g.dims.size());
    std::vector<std::size_t> stride(na, 1);
    for (int a = na - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * static_cast<std::size_t>(g.dims[a + 1]);

    u.for_each([&](const TorusIndex& l, int k, Complex c) {
        if (c == Complex(0.0, 0.0)) return;
        std::size_t idx = 0;
        for (int d = 0; d < u.v(); ++d) {
            int m = l.c[d];
            int wrapped = m >= 0 ? m : g.dims[d] + m;
            idx += stride[d] * static_cast<std::size_t>(wrapped);
        }
        int wk = k >= 0 ? k : g.dims[na - 1] + k;
        idx += static_cast<std::size_t>(wk);
        data[idx] = c;
    });
    dft(data, g.dims, +1);
    return data;
}

FourierField from_grid(const std::vector<Complex>& values, const GridSpec& g, int v, int kphi,
                       int kx) {
    std::vector<Complex> data = values;
    dft(data, g.dims, -1);
    double scale = 1.0 / static_cast<double>(g.total());

    FourierField out(v, kphi, kx);
    int na = static_cast<int>(g.dims.size());
    std::vector<std::size_t> stride(na, 1);
    for (int a = na - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * static_cast<std::size_t>(g.dims[a + 1]);

    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < out.raw().size(); ++i) {
        out.decode(i, l, k);
        if (l.l1() > kphi) continue;
        std::size_t idx = 0;
        for (int d = 0; d < v; ++d) {
            int m = l.c[d];
            int wrapped = m >= 0 ? m : g.dims[d] + m;
            idx += stride[d] * static_cast<std::size_t>(wrapped);
        }
        int wk = k >= 0 ? k : g.dims[na - 1] + k;
        idx += static_cast<std::size_t>(wk);
        out.raw()[i] = data[idx] * scale;
    }
    return out;
}

Complex eval_at(const FourierField& u, const std::vector<double>& phi, double x) {
    if (static_cast<int>(phi.size()) != u.v()) throw ConfigError("eval_at: phi dimension");
    Complex sum(0.0, 0.0);
    u.for_each([&](const TorusIndex& l, int k, Complex c) {
        if (c == Complex(0.0, 0.0)) return;
        double arg = k * x;
        for (int d = 0; d < u.v(); ++d) arg += l.c[d] * phi[d];
        sum += c * std::polar(1.0, arg);
    });
    return sum;
}

double sup_grid(const FourierField& u) {
    GridSpec g = padded_grid(u.v(), u.kphi(), u.kx());
    auto vals = to_grid(u, g);
    double m = 0.0;
    for (const auto& c : vals) m = std::max(m, std::abs(c));
    return m;
}

// ---- calculus ---------------------------------------------------------------

namespace {

// a field whose only nonzero coefficient is the mean acts by scaling
bool constant_only(const FourierField& f, Complex& value) {
    value = f.mean();
    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < f.raw().size(); ++i) {
        if (f.raw()[i] == Complex(0.0, 0.0)) continue;
        f.decode(i, l, k);
        if (k != 0 || !l.is_zero()) return false;
    }
    return true;
}

}  // namespace

FourierField mul(const FourierField& u, const FourierField& v) {
    if (!u.compatible(v)) throw ConfigError("mul: incompatible truncations");
    Complex cval;
    if (constant_only(u, cval)) {
        FourierField out = v * cval;
        out.width = std::fmin(u.width, v.width);
        return out;
    }
    if (constant_only(v, cval)) {
        FourierField out = u * cval;
        out.width = std::fmin(u.width, v.width);
        return out;
    }
    GridSpec g = padded_grid(u.v(), u.kphi(), u.kx());
    auto gu = to_grid(u, g);
    auto gv = to_grid(v, g);
    for (std::size_t i = 0; i < gu.size(); ++i) gu[i] *= gv[i];
    FourierField out = from_grid(gu, g, u.v(), u.kphi(), u.kx());
    out.real_flag = u.real_flag && v.real_flag;
    if (out.real_flag) out.enforce_reality();
    out.width = std::fmin(u.width, v.width);
    return out;
}

FourierField dx(const FourierField& u, int order) {
    FourierField out = u;
    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < out.raw().size(); ++i) {
        out.decode(i, l, k);
        Complex fac(1.0, 0.0);
        for (int r = 0; r < order; ++r) fac *= Complex(0.0, k);
        out.raw()[i] *= fac;
    }
    if (order > 0) out.zero_avg_x = true;
    out.real_flag = u.real_flag;
    out.width = u.width;
    return out;
}

FourierField dx_inv(const FourierField& u) {
    if (u.x_average_magnitude() > 1e-12 * std::max(1.0, u.max_abs_coeff()) && !u.zero_avg_x)
        throw DomainError("dx_inv: input has nonzero x-average");
    FourierField out = u;
    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < out.raw().size(); ++i) {
        out.decode(i, l, k);
        if (k == 0)
            out.raw()[i] = Complex(0.0, 0.0);
        else
            out.raw()[i] /= Complex(0.0, k);
    }
    out.zero_avg_x = true;
    out.real_flag = u.real_flag;
    out.width = u.width;
    return out;
}

FourierField dphi_omega(const FourierField& u, const std::vector<double>& omega) {
    if (static_cast<int>(omega.size()) != u.v()) throw ConfigError("dphi_omega: omega size");
    FourierField out = u;
    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < out.raw().size(); ++i) {
        out.decode(i, l, k);
        out.raw()[i] *= Complex(0.0, dot(omega, l));
    }
    out.real_flag = u.real_flag;
    out.zero_avg_x = u.zero_avg_x;
    out.width = u.width;
    return out;
}

FourierField omega_dphi_inv(const FourierField& u, const std::vector<double>& omega,
                            const DivisorFloor& floor) {
    if (static_cast<int>(omega.size()) != u.v()) throw ConfigError("omega_dphi_inv: omega size");
    double scale = std::max(1.0, u.max_abs_coeff());
    FourierField out = u;
    TorusIndex l;
    int k;
    for (std::size_t i = 0; i < out.raw().size(); ++i) {
        out.decode(i, l, k);
        if (l.l1() > u.kphi()) continue;
        if (l.is_zero()) {
            if (std::abs(out.raw()[i]) > 1e-12 * scale)
                throw DomainError("omega_dphi_inv: input has nonzero torus average");
            out.raw()[i] = Complex(0.0, 0.0);
            continue;
        }
        double div = dot(omega, l);
        if (floor.alpha0 > 0.0) {
            double bound = floor.alpha0 / std::pow(static_cast<double>(l.bracket()), floor.tau0);
            if (std::abs(div) < bound)
                throw SmallDivisorError("omega_dphi_inv: divisor below floor", l.to_vector(),
                                        std::abs(div), bound);
        }
        out.raw()[i] /= Complex(0.0, div);
    }
    out.real_flag = u.real_flag;
    out.zero_avg_x = u.zero_avg_x;
    out.width = u.width;
    return out;
}

FourierField retruncate(const FourierField& u, int kphi, int kx) {
    FourierField out(u.v(), kphi, kx);
    u.for_each([&](const TorusIndex& l, int k, Complex c) {
        if (c == Complex(0.0, 0.0)) return;
        if (l.l1() <= kphi && std::abs(k) <= kx) out.set_coeff(l, k, c);
    });
    out.real_flag = u.real_flag;
    out.zero_avg_x = u.zero_avg_x;
    out.width = u.width;
    return out;
}

FourierField broadcast_x(const FourierField& u, int kx) {
    if (u.kx() != 0) throw ConfigError("broadcast_x: source must be phi-only");
    FourierField out(u.v(), u.kphi(), kx);
    u.for_each([&](const TorusIndex& l, int, Complex c) {
        if (c != Complex(0.0, 0.0)) out.set_coeff(l, 0, c);
    });
    out.real_flag = u.real_flag;
    out.width = u.width;
    return out;
}

FourierField x_average_part(const FourierField& u) {
    FourierField out(u.v(), u.kphi(), 0);
    u.for_each([&](const TorusIndex& l, int k, Complex c) {
        if (k == 0 && c != Complex(0.0, 0.0)) out.set_coeff(l, 0, c);
    });
    out.real_flag = u.real_flag;
    out.width = u.width;
    return out;
}

}  // namespace kdv5
