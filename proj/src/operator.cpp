#include "kdv5/operator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "kdv5/transform.hpp"

namespace kdv5 {

namespace {

// dense l-box helpers shared by the series <-> phi-grid bridge
struct LBox {
    int v, kphi, nphi;
    std::size_t size;
    LBox(int v_, int kphi_) : v(v_), kphi(kphi_), nphi(2 * kphi_ + 1) {
        size = 1;
        for (int d = 0; d < v; ++d) size *= static_cast<std::size_t>(nphi);
    }
    void decode(std::size_t flat, TorusIndex& l) const {
        l.v = v;
        for (int d = v - 1; d >= 0; --d) {
            l.c[d] = static_cast<int>(flat % static_cast<std::size_t>(nphi)) - kphi;
            flat /= static_cast<std::size_t>(nphi);
        }
    }
};

std::vector<int> phi_grid_dims(int v, int kphi) {
    std::vector<int> dims;
    for (int d = 0; d < v; ++d) dims.push_back(fft_friendly(3 * kphi + 1));
    return dims;
}

std::size_t grid_total(const std::vector<int>& dims) {
    std::size_t n = 1;
    for (int d : dims) n *= static_cast<std::size_t>(d);
    return n;
}

// series (l-box layout) -> collocation values on the phi grid
void series_to_grid(const Complex* series, const LBox& box, const std::vector<int>& dims,
                    std::vector<Complex>& out) {
    out.assign(grid_total(dims), Complex(0.0, 0.0));
    std::vector<std::size_t> stride(dims.size(), 1);
    for (int a = static_cast<int>(dims.size()) - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * static_cast<std::size_t>(dims[a + 1]);
    TorusIndex l;
    for (std::size_t f = 0; f < box.size; ++f) {
        Complex c = series[f];
        if (c == Complex(0.0, 0.0)) continue;
        box.decode(f, l);
        if (l.l1() > box.kphi) continue;
        std::size_t idx = 0;
        for (int d = 0; d < box.v; ++d) {
            int m = l.c[d];
            idx += stride[d] * static_cast<std::size_t>(m >= 0 ? m : dims[d] + m);
        }
        out[idx] = c;
    }
    dft(out, dims, +1);
}

// collocation values -> series, truncated to the l1 ball
void grid_to_series(std::vector<Complex> vals, const LBox& box, const std::vector<int>& dims,
                    Complex* series) {
    dft(vals, dims, -1);
    double scale = 1.0 / static_cast<double>(grid_total(dims));
    std::vector<std::size_t> stride(dims.size(), 1);
    for (int a = static_cast<int>(dims.size()) - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * static_cast<std::size_t>(dims[a + 1]);
    TorusIndex l;
    for (std::size_t f = 0; f < box.size; ++f) {
        box.decode(f, l);
        if (l.l1() > box.kphi) {
            series[f] = Complex(0.0, 0.0);
            continue;
        }
        std::size_t idx = 0;
        for (int d = 0; d < box.v; ++d) {
            int m = l.c[d];
            idx += stride[d] * static_cast<std::size_t>(m >= 0 ? m : dims[d] + m);
        }
        series[f] = vals[idx] * scale;
    }
}

double series_norm_sq(const Complex* series, const LBox& box, const NormParams& np) {
    long double sum = 0.0L;
    TorusIndex l;
    for (std::size_t f = 0; f < box.size; ++f) {
        Complex c = series[f];
        if (c == Complex(0.0, 0.0)) continue;
        box.decode(f, l);
        if (l.l1() > box.kphi) continue;
        double w = std::exp(2.0 * l.l1() * np.s) *
                   std::pow(static_cast<double>(l.bracket()), 2.0 * np.p);
        sum += static_cast<long double>(std::norm(c) * w);
    }
    return static_cast<double>(sum);
}

}  // namespace

VarCoeffOperator::VarCoeffOperator(int v, int kphi, int kx, bool h10)
    : v_(v), kphi_(kphi), kx_(kx), h10_(h10) {
    if (v < 1 || v > kMaxTorusDim) throw ConfigError("VarCoeffOperator: v out of range");
    lsize_ = 1;
    for (int d = 0; d < v; ++d) lsize_ *= static_cast<std::size_t>(2 * kphi + 1);
}

const Complex* VarCoeffOperator::series_ptr(int i1, int i2) const {
    if (!block_valid(i1, i2)) return nullptr;
    auto it = lines_.find(i1 - i2);
    if (it == lines_.end()) return nullptr;
    return &it->second[static_cast<std::size_t>(i1 + kx_) * lsize_];
}

Complex* VarCoeffOperator::ensure_series(int i1, int i2) {
    if (!block_valid(i1, i2)) throw DomainError("VarCoeffOperator: invalid block index");
    auto& line = lines_[i1 - i2];
    if (line.empty()) line.assign(static_cast<std::size_t>(nx()) * lsize_, Complex(0.0, 0.0));
    return &line[static_cast<std::size_t>(i1 + kx_) * lsize_];
}

FourierField VarCoeffOperator::block(int i1, int i2) const {
    FourierField out(v_, kphi_, 0);
    const Complex* s = series_ptr(i1, i2);
    if (s) std::copy(s, s + lsize_, out.raw().begin());
    return out;
}

void VarCoeffOperator::set_block(int i1, int i2, const FourierField& series) {
    if (series.v() != v_ || series.kphi() != kphi_ || series.kx() != 0)
        throw ConfigError("set_block: series truncation mismatch");
    Complex* dst = ensure_series(i1, i2);
    std::copy(series.raw().begin(), series.raw().end(), dst);
}

void VarCoeffOperator::add_to_block(int i1, int i2, const FourierField& series) {
    if (series.v() != v_ || series.kphi() != kphi_ || series.kx() != 0)
        throw ConfigError("add_to_block: series truncation mismatch");
    Complex* dst = ensure_series(i1, i2);
    for (std::size_t f = 0; f < lsize_; ++f) dst[f] += series.raw()[f];
}

Complex VarCoeffOperator::block_coeff(int i1, int i2, const TorusIndex& l) const {
    const Complex* s = series_ptr(i1, i2);
    if (!s) return Complex(0.0, 0.0);
    FourierField probe(v_, kphi_, 0);
    return s[probe.encode(l, 0)];
}

void VarCoeffOperator::drop_zero_lines(double threshold) {
    for (auto it = lines_.begin(); it != lines_.end();) {
        double m = 0.0;
        for (const auto& c : it->second) m = std::max(m, std::abs(c));
        if (m <= threshold)
            it = lines_.erase(it);
        else
            ++it;
    }
}

double VarCoeffOperator::max_abs_entry() const {
    double m = 0.0;
    for (const auto& [d, line] : lines_)
        for (const auto& c : line) m = std::max(m, std::abs(c));
    return m;
}

VarCoeffOperator& VarCoeffOperator::operator+=(const VarCoeffOperator& o) {
    if (!compatible(o)) throw ConfigError("operator +=: incompatible truncations");
    h10_ = h10_ && o.h10_;
    for (const auto& [d, line] : o.lines_) {
        auto& mine = lines_[d];
        if (mine.empty()) mine.assign(line.size(), Complex(0.0, 0.0));
        for (std::size_t i = 0; i < line.size(); ++i) mine[i] += line[i];
    }
    return *this;
}

VarCoeffOperator& VarCoeffOperator::operator-=(const VarCoeffOperator& o) {
    if (!compatible(o)) throw ConfigError("operator -=: incompatible truncations");
    h10_ = h10_ && o.h10_;
    for (const auto& [d, line] : o.lines_) {
        auto& mine = lines_[d];
        if (mine.empty()) mine.assign(line.size(), Complex(0.0, 0.0));
        for (std::size_t i = 0; i < line.size(); ++i) mine[i] -= line[i];
    }
    return *this;
}

VarCoeffOperator& VarCoeffOperator::operator*=(Complex a) {
    for (auto& [d, line] : lines_)
        for (auto& c : line) c *= a;
    return *this;
}

VarCoeffOperator op_identity(int v, int kphi, int kx, bool h10) {
    VarCoeffOperator out(v, kphi, kx, h10);
    FourierField one = FourierField::constant(v, kphi, 0, 1.0);
    for (int i = -kx; i <= kx; ++i)
        if (out.row_valid(i)) out.set_block(i, i, one);
    return out;
}

VarCoeffOperator from_multiplier(const FourierField& g, bool h10) {
    VarCoeffOperator out(g.v(), g.kphi(), g.kx(), h10);
    for (int d = -g.kx(); d <= g.kx(); ++d) {
        // g's space mode d populates the whole diagonal i1 - i2 = d
        FourierField series(g.v(), g.kphi(), 0);
        bool nonzero = false;
        g.for_each([&](const TorusIndex& l, int k, Complex c) {
            if (k != d || c == Complex(0.0, 0.0)) return;
            series.set_coeff(l, 0, c);
            nonzero = true;
        });
        if (!nonzero) continue;
        for (int i1 = -g.kx(); i1 <= g.kx(); ++i1) {
            int i2 = i1 - d;
            if (out.block_valid(i1, i2)) out.set_block(i1, i2, series);
        }
    }
    return out;
}

VarCoeffOperator op_diag_fn(int v, int kphi, int kx, bool h10,
                            const std::function<Complex(int)>& fn) {
    VarCoeffOperator out(v, kphi, kx, h10);
    for (int i = -kx; i <= kx; ++i) {
        if (!out.row_valid(i)) continue;
        Complex val = fn(i);
        if (val == Complex(0.0, 0.0)) continue;
        out.set_block(i, i, FourierField::constant(v, kphi, 0, val));
    }
    return out;
}

VarCoeffOperator op_mul(const VarCoeffOperator& a, const VarCoeffOperator& b) {
    if (!a.compatible(b)) throw ConfigError("op_mul: incompatible truncations");
    int v = a.v(), kphi = a.kphi(), kx = a.kx();
    int n = 2 * kx + 1;
    LBox box(v, kphi);
    auto dims = phi_grid_dims(v, kphi);
    std::size_t nodes = grid_total(dims);

    // evaluate all present blocks of a and b on the phi grid
    auto gridify = [&](const VarCoeffOperator& op) {
        std::map<int, std::vector<Complex>> g;  // line -> rows x nodes
        std::vector<Complex> tmp;
        for (const auto& [d, line] : op.lines()) {
            auto& dst = g[d];
            dst.assign(static_cast<std::size_t>(n) * nodes, Complex(0.0, 0.0));
            for (int i1 = -kx; i1 <= kx; ++i1) {
                const Complex* s = op.series_ptr(i1, i1 - d);
                if (!s) continue;
                series_to_grid(s, box, dims, tmp);
                std::copy(tmp.begin(), tmp.end(),
                          dst.begin() + static_cast<std::size_t>(i1 + kx) * nodes);
            }
        }
        return g;
    };
    auto ga = gridify(a);
    auto gb = gridify(b);

    bool h10 = a.h10() && b.h10();
    VarCoeffOperator out(v, kphi, kx, h10);

    Eigen::MatrixXcd ma(n, n), mb(n, n), mc(n, n);
    std::vector<std::vector<Complex>> cgrid(
        static_cast<std::size_t>(n) * static_cast<std::size_t>(n));

    for (std::size_t node = 0; node < nodes; ++node) {
        ma.setZero();
        mb.setZero();
        for (const auto& [d, rows] : ga)
            for (int i1 = -kx; i1 <= kx; ++i1) {
                int i2 = i1 - d;
                if (std::abs(i2) > kx) continue;
                ma(i1 + kx, i2 + kx) = rows[static_cast<std::size_t>(i1 + kx) * nodes + node];
            }
        for (const auto& [d, rows] : gb)
            for (int i1 = -kx; i1 <= kx; ++i1) {
                int i2 = i1 - d;
                if (std::abs(i2) > kx) continue;
                mb(i1 + kx, i2 + kx) = rows[static_cast<std::size_t>(i1 + kx) * nodes + node];
            }
        mc.noalias() = ma * mb;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                Complex val = mc(r, c);
                if (val == Complex(0.0, 0.0) && cgrid[r * n + c].empty()) continue;
                auto& slot = cgrid[r * n + c];
                if (slot.empty()) slot.assign(nodes, Complex(0.0, 0.0));
                slot[node] = val;
            }
    }

    std::vector<Complex> series(box.size);
    for (int i1 = -kx; i1 <= kx; ++i1)
        for (int i2 = -kx; i2 <= kx; ++i2) {
            auto& slot = cgrid[(i1 + kx) * n + (i2 + kx)];
            if (slot.empty() || !out.block_valid(i1, i2)) continue;
            grid_to_series(slot, box, dims, series.data());
            double m = 0.0;
            for (const auto& c : series) m = std::max(m, std::abs(c));
            if (m == 0.0) continue;
            Complex* dst = out.ensure_series(i1, i2);
            std::copy(series.begin(), series.end(), dst);
        }
    return out;
}

VarCoeffOperator op_mul_diag_left(const std::function<Complex(int)>& fn,
                                  const VarCoeffOperator& a) {
    VarCoeffOperator out = a;
    int kx = a.kx();
    for (auto& [d, line] : out.lines())
        for (int i1 = -kx; i1 <= kx; ++i1) {
            Complex f = fn(i1);
            Complex* s = &line[static_cast<std::size_t>(i1 + kx) * a.lsize()];
            for (std::size_t j = 0; j < a.lsize(); ++j) s[j] *= f;
        }
    return out;
}

VarCoeffOperator op_mul_diag_right(const VarCoeffOperator& a,
                                   const std::function<Complex(int)>& fn) {
    VarCoeffOperator out = a;
    int kx = a.kx();
    for (auto& [d, line] : out.lines())
        for (int i1 = -kx; i1 <= kx; ++i1) {
            int i2 = i1 - d;
            Complex f = (std::abs(i2) <= kx) ? fn(i2) : Complex(0.0, 0.0);
            Complex* s = &line[static_cast<std::size_t>(i1 + kx) * a.lsize()];
            for (std::size_t j = 0; j < a.lsize(); ++j) s[j] *= f;
        }
    return out;
}

FourierField op_apply(const VarCoeffOperator& a, const FourierField& h) {
    if (h.v() != a.v() || h.kphi() != a.kphi() || h.kx() != a.kx())
        throw ConfigError("op_apply: field/operator truncation mismatch");
    int v = a.v(), kphi = a.kphi(), kx = a.kx();
    int n = 2 * kx + 1;
    LBox box(v, kphi);
    auto dims = phi_grid_dims(v, kphi);
    std::size_t nodes = grid_total(dims);

    // h columns on the phi grid
    std::vector<std::vector<Complex>> hcols(static_cast<std::size_t>(n));
    std::vector<Complex> series(box.size);
    FourierField probe(v, kphi, 0);
    for (int k = -kx; k <= kx; ++k) {
        if (a.h10() && k == 0) continue;
        std::fill(series.begin(), series.end(), Complex(0.0, 0.0));
        bool nonzero = false;
        h.for_each([&](const TorusIndex& l, int kk, Complex c) {
            if (kk != k || c == Complex(0.0, 0.0)) return;
            series[probe.encode(l, 0)] = c;
            nonzero = true;
        });
        if (!nonzero) continue;
        series_to_grid(series.data(), box, dims, hcols[k + kx]);
    }

    std::vector<std::vector<Complex>> outcols(static_cast<std::size_t>(n));
    std::vector<Complex> tmp;
    for (const auto& [d, line] : a.lines()) {
        for (int i1 = -kx; i1 <= kx; ++i1) {
            int i2 = i1 - d;
            if (std::abs(i2) > kx || hcols[i2 + kx].empty()) continue;
            const Complex* s = a.series_ptr(i1, i2);
            if (!s) continue;
            series_to_grid(s, box, dims, tmp);
            auto& dst = outcols[i1 + kx];
            if (dst.empty()) dst.assign(nodes, Complex(0.0, 0.0));
            const auto& hc = hcols[i2 + kx];
            for (std::size_t nd = 0; nd < nodes; ++nd) dst[nd] += tmp[nd] * hc[nd];
        }
    }

    FourierField out(v, kphi, kx);
    for (int k = -kx; k <= kx; ++k) {
        if (outcols[k + kx].empty()) continue;
        grid_to_series(outcols[k + kx], box, dims, series.data());
        TorusIndex l;
        for (std::size_t f = 0; f < box.size; ++f) {
            if (series[f] == Complex(0.0, 0.0)) continue;
            box.decode(f, l);
            out.set_coeff(l, k, series[f]);
        }
    }
    if (a.h10()) out.zero_avg_x = true;
    return out;
}

VarCoeffOperator op_dtheta(const VarCoeffOperator& a, const std::vector<double>& omega) {
    if (static_cast<int>(omega.size()) != a.v()) throw ConfigError("op_dtheta: omega size");
    VarCoeffOperator out = a;
    LBox box(a.v(), a.kphi());
    TorusIndex l;
    for (auto& [d, line] : out.lines()) {
        std::size_t rows = line.size() / box.size;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t f = 0; f < box.size; ++f) {
                box.decode(f, l);
                line[r * box.size + f] *= Complex(0.0, dot(omega, l));
            }
    }
    return out;
}

double decay_norm(const VarCoeffOperator& a, DecayKind kind, const NormParams& np) {
    if (kind == DecayKind::Rho)
        return std::max({decay_norm(a, DecayKind::Plain, np), decay_norm(a, DecayKind::Tilde, np),
                         decay_norm(a, DecayKind::Hat, np)});
    if (kind != DecayKind::Plain && !a.h10())
        throw ConfigError("decay_norm: weighted kinds require an operator on H^1_0");

    LBox box(a.v(), a.kphi());
    long double total = 0.0L;
    for (const auto& [d, line] : a.lines()) {
        (void)line;
        double supsq = 0.0;
        for (int i1 = -a.kx(); i1 <= a.kx(); ++i1) {
            int i2 = i1 - d;
            const Complex* s = a.series_ptr(i1, i2);
            if (!s) continue;
            double w = 1.0;
            switch (kind) {
                case DecayKind::Plain:
                    w = 1.0;
                    break;
                case DecayKind::Varsigma:
                    w = 1.0 / (sq(static_cast<double>(std::abs(i1))) * std::abs(i2));
                    break;
                case DecayKind::Tilde:
                    w = sq(static_cast<double>(i2)) / sq(static_cast<double>(i1));
                    break;
                case DecayKind::Hat:
                    w = std::abs(static_cast<double>(i1)) / std::abs(static_cast<double>(i2));
                    break;
                default:
                    break;
            }
            supsq = std::max(supsq, w * w * series_norm_sq(s, box, np));
        }
        double di = std::abs(d);
        double weight = std::exp(2.0 * di * np.s) *
                        std::pow(std::max(di, 1.0), 2.0 * np.p);
        total += static_cast<long double>(weight * supsq);
    }
    return std::sqrt(static_cast<double>(total));
}

ExpResult op_exp(const VarCoeffOperator& phi, const NormParams& np, double tol, int max_terms) {
    double size = decay_norm(phi, DecayKind::Plain, np);
    if (size > 0.5)
        throw DomainError("op_exp: |Phi|_{s,p} exceeds 1/2, exponential hypothesis violated");

    ExpResult res;
    res.value = op_identity(phi.v(), phi.kphi(), phi.kx(), phi.h10());
    VarCoeffOperator term = op_identity(phi.v(), phi.kphi(), phi.kx(), phi.h10());
    int n = 0;
    while (n < max_terms) {
        ++n;
        term = op_mul(term, phi);
        term *= Complex(1.0 / n, 0.0);
        res.value += term;
        double tn = decay_norm(term, DecayKind::Plain, np);
        if (tn < tol) {
            res.terms = n;
            VarCoeffOperator dist = res.value - op_identity(phi.v(), phi.kphi(), phi.kx(), phi.h10());
            res.dist_identity = decay_norm(dist, DecayKind::Plain, np);
            return res;
        }
    }
    throw NumericalError("op_exp: series did not converge within the term cap");
}

double hamiltonian_defect(const VarCoeffOperator& a) {
    if (!a.h10()) throw ConfigError("hamiltonian_defect: requires an H^1_0 operator");
    LBox box(a.v(), a.kphi());
    double scale = 0.0, worst = 0.0;
    std::vector<Complex> g1(box.size), g2(box.size);
    for (int i1 = -a.kx(); i1 <= a.kx(); ++i1) {
        if (i1 == 0) continue;
        for (int i2 = -a.kx(); i2 <= a.kx(); ++i2) {
            if (i2 == 0) continue;
            const Complex* s = a.series_ptr(i1, i2);
            const Complex* t = a.series_ptr(-i2, -i1);
            Complex fi1(0.0, i1), fi2(0.0, -i2);
            for (std::size_t f = 0; f < box.size; ++f) {
                Complex G1 = s ? s[f] / fi1 : Complex(0.0, 0.0);
                Complex G2 = t ? t[f] / fi2 : Complex(0.0, 0.0);
                scale = std::max(scale, std::abs(G1));
                worst = std::max(worst, std::abs(G1 - G2));
            }
        }
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace kdv5
