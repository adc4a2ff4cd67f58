#include "kdv5/composition.hpp"

#include <algorithm>
#include <cmath>

#include "kdv5/transform.hpp"

namespace kdv5 {

namespace {

std::vector<int> phi_dims(const GridSpec& g) {
    return std::vector<int>(g.dims.begin(), g.dims.end() - 1);
}

std::size_t phi_node_count(const GridSpec& g) {
    std::size_t n = 1;
    for (std::size_t a = 0; a + 1 < g.dims.size(); ++a)
        n *= static_cast<std::size_t>(g.dims[a]);
    return n;
}

// Partial synthesis: torus axes to the collocation grid, space axis kept
// modal.  Layout: out[node * nx + (k + kx)].
std::vector<Complex> phi_synthesis(const FourierField& u, const GridSpec& g) {
    auto pd = phi_dims(g);
    std::size_t nodes = phi_node_count(g);
    int nx = u.nx();
    std::vector<Complex> out(nodes * static_cast<std::size_t>(nx));
    std::vector<Complex> buf(nodes);

    std::vector<std::size_t> stride(pd.size(), 1);
    for (int a = static_cast<int>(pd.size()) - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * static_cast<std::size_t>(pd[a + 1]);

    for (int k = -u.kx(); k <= u.kx(); ++k) {
        std::fill(buf.begin(), buf.end(), Complex(0.0, 0.0));
        u.for_each([&](const TorusIndex& l, int kk, Complex c) {
            if (kk != k || c == Complex(0.0, 0.0)) return;
            std::size_t idx = 0;
            for (int d = 0; d < u.v(); ++d) {
                int m = l.c[d];
                idx += stride[d] * static_cast<std::size_t>(m >= 0 ? m : pd[d] + m);
            }
            buf[idx] = c;
        });
        dft(buf, pd, +1);
        for (std::size_t j = 0; j < nodes; ++j)
            out[j * static_cast<std::size_t>(nx) + static_cast<std::size_t>(k + u.kx())] =
                buf[j];
    }
    return out;
}

// Partial analysis back to modes (inverse of phi_synthesis).
FourierField phi_analysis(const std::vector<Complex>& slices, const GridSpec& g, int v,
                          int kphi, int kx) {
    auto pd = phi_dims(g);
    std::size_t nodes = phi_node_count(g);
    int nx = 2 * kx + 1;
    std::vector<Complex> buf(nodes);
    FourierField out(v, kphi, kx);

    std::vector<std::size_t> stride(pd.size(), 1);
    for (int a = static_cast<int>(pd.size()) - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * static_cast<std::size_t>(pd[a + 1]);

    double scale = 1.0 / static_cast<double>(nodes);
    for (int k = -kx; k <= kx; ++k) {
        for (std::size_t j = 0; j < nodes; ++j)
            buf[j] = slices[j * static_cast<std::size_t>(nx) + static_cast<std::size_t>(k + kx)];
        dft(buf, pd, -1);
        TorusIndex l;
        l.v = v;
        // walk the coefficient box of this column
        std::vector<int> idx(v, -kphi);
        while (true) {
            for (int d = 0; d < v; ++d) l.c[d] = idx[d];
            if (l.l1() <= kphi) {
                std::size_t src = 0;
                for (int d = 0; d < v; ++d) {
                    int m = idx[d];
                    src += stride[d] * static_cast<std::size_t>(m >= 0 ? m : pd[d] + m);
                }
                out.set_coeff(l, k, buf[src] * scale);
            }
            int d = v - 1;
            while (d >= 0 && ++idx[d] > kphi) idx[d--] = -kphi;
            if (d < 0) break;
        }
    }
    return out;
}

// Evaluate sum_k slice[k] e^{iky} by two Horner passes.
Complex eval_x(const Complex* slice, int kx, double y) {
    Complex z = std::polar(1.0, y);
    Complex zc = std::conj(z);
    Complex pos(0.0, 0.0);
    for (int k = kx; k >= 1; --k) pos = (pos + slice[k + kx]) * z;
    Complex neg(0.0, 0.0);
    for (int k = -kx; k <= -1; ++k) neg = (neg + slice[k + kx]) * zc;
    return pos + slice[kx] + neg;
}

// phi coordinates of node j on the padded grid
void node_phi(std::size_t j, const std::vector<int>& pd, std::vector<double>& phi) {
    for (int d = static_cast<int>(pd.size()) - 1; d >= 0; --d) {
        std::size_t g = static_cast<std::size_t>(pd[d]);
        phi[d] = 2.0 * M_PI * static_cast<double>(j % g) / static_cast<double>(g);
        j /= g;
    }
}

double validate_displacement(const FourierField& f, const char* what) {
    NormParams np01(0.0, 1.0);
    double m = norm_max(f, np01);
    if (m > kDiffeoSmallness * (1.0 + 1e-9))
        throw DomainError(std::string(what) + ": displacement exceeds the 1/100 smallness bound");
    return m;
}

}  // namespace

FourierField invert_displacement(const FourierField& beta, double tol, int max_iter) {
    // contraction requires sup |beta_x| < 1
    double slope = sup_grid(dx(beta, 1));
    if (slope >= 0.5)
        throw DomainError("invert_displacement: derivative bound violated (no contraction)");

    GridSpec g = padded_grid(beta.v(), beta.kphi(), beta.kx());
    auto pd = phi_dims(g);
    std::size_t nodes = phi_node_count(g);
    int gx = g.dims.back();
    auto slices = phi_synthesis(beta, g);
    int nx = beta.nx();

    std::vector<Complex> bh(nodes * static_cast<std::size_t>(gx), Complex(0.0, 0.0));
    double change = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        change = 0.0;
        for (std::size_t j = 0; j < nodes; ++j) {
            const Complex* slice = &slices[j * static_cast<std::size_t>(nx)];
            for (int i = 0; i < gx; ++i) {
                double y = 2.0 * M_PI * i / gx;
                Complex cur = bh[j * gx + i];
                Complex next = -eval_x(slice, beta.kx(), y + cur.real());
                change = std::max(change, std::abs(next - cur));
                bh[j * gx + i] = next;
            }
        }
        if (change < tol) break;
    }
    if (change >= tol)
        throw NumericalError("invert_displacement: fixed point did not converge");

    FourierField out = from_grid(bh, g, beta.v(), beta.kphi(), beta.kx());
    if (beta.real_flag) out.enforce_reality();
    out.width = beta.width * kInverseShrink;
    return out;
}

SpaceDiffeo::SpaceDiffeo(FourierField beta) : beta_(std::move(beta)) {
    validate_displacement(beta_, "SpaceDiffeo");
    // strict monotonicity of x + beta(phi, x)
    if (sup_grid(dx(beta_, 1)) >= 1.0)
        throw DomainError("SpaceDiffeo: x + beta is not strictly increasing");
}

const FourierField& SpaceDiffeo::beta_hat() const {
    if (!beta_hat_) beta_hat_ = invert_displacement(beta_);
    return *beta_hat_;
}

namespace {

// Shared engine for T / A: evaluate w(phi,x) * u(phi, x + disp(phi,x)) on
// the padded grid and re-expand.  `weight` may be empty (treated as 1).
FourierField composed_eval(const FourierField& u, const FourierField& disp,
                           const std::vector<Complex>& weight_grid, double width_factor) {
    GridSpec g = padded_grid(u.v(), u.kphi(), u.kx());
    std::size_t nodes = phi_node_count(g);
    int gx = g.dims.back();
    int nx = u.nx();

    auto uslices = phi_synthesis(u, g);
    auto disp_grid = to_grid(disp, g);

    std::vector<Complex> vals(nodes * static_cast<std::size_t>(gx));
    for (std::size_t j = 0; j < nodes; ++j) {
        const Complex* slice = &uslices[j * static_cast<std::size_t>(nx)];
        for (int i = 0; i < gx; ++i) {
            double x = 2.0 * M_PI * i / gx;
            double y = x + disp_grid[j * gx + i].real();
            Complex val = eval_x(slice, u.kx(), y);
            if (!weight_grid.empty()) val *= weight_grid[j * gx + i];
            vals[j * gx + i] = val;
        }
    }
    FourierField out = from_grid(vals, g, u.v(), u.kphi(), u.kx());
    if (u.real_flag && disp.real_flag) out.enforce_reality();
    out.width = u.width * width_factor;
    return out;
}

}  // namespace

FourierField compose(const FourierField& u, const SpaceDiffeo& d, Direction dir) {
    const FourierField& disp = (dir == Direction::Forward) ? d.beta() : d.beta_hat();
    double factor = (dir == Direction::Forward) ? kForwardShrink : kInverseShrink;
    if (disp.max_abs_coeff() == 0.0) {  // identity map, exact
        FourierField out = u;
        out.width = u.width * factor;
        return out;
    }
    return composed_eval(u, disp, {}, factor);
}

FourierField apply_A(const SpaceDiffeo& d, const FourierField& h, bool inverse) {
    const FourierField& disp = inverse ? d.beta_hat() : d.beta();
    double factor = inverse ? kInverseShrink : kForwardShrink;
    if (disp.max_abs_coeff() == 0.0) {
        FourierField out = h;
        out.width = h.width * factor;
        return out;
    }
    GridSpec g = padded_grid(h.v(), h.kphi(), h.kx());
    FourierField one = FourierField::constant(h.v(), h.kphi(), h.kx(), 1.0);
    auto weight = to_grid(one + dx(disp, 1), g);
    FourierField out = composed_eval(h, disp, weight, factor);
    if (h.zero_avg_x) out.project_zero_avg_x();
    return out;
}

TimeShift::TimeShift(FourierField alpha, std::vector<double> omega)
    : alpha_(std::move(alpha)), omega_(std::move(omega)) {
    if (alpha_.kx() != 0) throw ConfigError("TimeShift: alpha must be phi-only");
    if (static_cast<int>(omega_.size()) != alpha_.v())
        throw ConfigError("TimeShift: omega dimension mismatch");
    if (std::abs(alpha_.mean()) > 1e-12 * std::max(1.0, alpha_.max_abs_coeff()))
        throw DomainError("TimeShift: alpha must have zero torus average");
    validate_displacement(alpha_, "TimeShift");
}

const FourierField& TimeShift::alpha_hat() const {
    if (alpha_hat_) return *alpha_hat_;

    // fixed point a(theta) = -alpha(theta + omega a(theta)) on the phi grid
    GridSpec g = padded_grid(alpha_.v(), alpha_.kphi(), 0);
    auto pd = phi_dims(g);
    std::size_t nodes = phi_node_count(g);

    std::vector<double> a(nodes, 0.0);
    std::vector<double> phi(alpha_.v());
    std::vector<double> shifted(alpha_.v());
    double change = 0.0;
    for (int it = 0; it < 200; ++it) {
        change = 0.0;
        for (std::size_t j = 0; j < nodes; ++j) {
            node_phi(j, pd, phi);
            for (int d = 0; d < alpha_.v(); ++d) shifted[d] = phi[d] + omega_[d] * a[j];
            double next = -eval_at(alpha_, shifted, 0.0).real();
            change = std::max(change, std::abs(next - a[j]));
            a[j] = next;
        }
        if (change < 1e-13) break;
    }
    if (change >= 1e-13)
        throw NumericalError("TimeShift: alpha_hat fixed point did not converge");

    std::vector<Complex> vals(nodes);
    for (std::size_t j = 0; j < nodes; ++j) vals[j] = Complex(a[j], 0.0);
    FourierField ah = from_grid(vals, g, alpha_.v(), alpha_.kphi(), 0);
    if (alpha_.real_flag) ah.enforce_reality();
    ah.width = alpha_.width * kInverseShrink;
    alpha_hat_ = std::move(ah);
    return *alpha_hat_;
}

FourierField apply_B(const TimeShift& t, const FourierField& h, bool inverse) {
    const FourierField& disp = inverse ? t.alpha_hat() : t.alpha();
    double factor = inverse ? kInverseShrink : kForwardShrink;
    if (disp.max_abs_coeff() == 0.0) {
        FourierField out = h;
        out.width = h.width * factor;
        return out;
    }

    GridSpec g = padded_grid(h.v(), h.kphi(), h.kx());
    auto pd = phi_dims(g);
    std::size_t nodes = phi_node_count(g);
    int nx = h.nx();
    int v = h.v();

    // displacement values on the phi grid
    GridSpec gphi;
    gphi.v = v;
    gphi.dims = pd;
    auto disp_grid = to_grid(retruncate(disp, h.kphi(), 0), gphi);

    // phase table per node: e^{i l . theta'} built from per-axis powers
    int np = h.nphi();
    std::vector<Complex> axis_pow(static_cast<std::size_t>(v) * np);
    std::vector<Complex> out(nodes * static_cast<std::size_t>(nx), Complex(0.0, 0.0));
    std::vector<double> phi(v);

    for (std::size_t j = 0; j < nodes; ++j) {
        node_phi(j, pd, phi);
        double shift = disp_grid[j].real();
        for (int d = 0; d < v; ++d) {
            double theta = phi[d] + t.omega()[d] * shift;
            Complex w = std::polar(1.0, theta);
            Complex cur(1.0, 0.0);
            axis_pow[d * np + h.kphi()] = cur;
            for (int m = 1; m <= h.kphi(); ++m) {
                cur *= w;
                axis_pow[d * np + h.kphi() + m] = cur;
                axis_pow[d * np + h.kphi() - m] = std::conj(cur);
            }
        }
        Complex* slot = &out[j * static_cast<std::size_t>(nx)];
        h.for_each([&](const TorusIndex& l, int k, Complex c) {
            if (c == Complex(0.0, 0.0)) return;
            Complex phase(1.0, 0.0);
            for (int d = 0; d < v; ++d) phase *= axis_pow[d * np + h.kphi() + l.c[d]];
            slot[k + h.kx()] += c * phase;
        });
    }

    FourierField res = phi_analysis(out, g, v, h.kphi(), h.kx());
    if (h.real_flag && disp.real_flag) res.enforce_reality();
    if (h.zero_avg_x) res.project_zero_avg_x();
    res.width = h.width * factor;
    return res;
}

}  // namespace kdv5
