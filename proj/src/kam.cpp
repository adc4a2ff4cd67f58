#include "kdv5/kam.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "kdv5/serialize.hpp"

namespace kdv5 {

namespace {

// enumeration of the retained torus ball
struct Ball {
    int v, kphi;
    std::vector<TorusIndex> modes;
    Ball(int v_, int kphi_) : v(v_), kphi(kphi_) {
        FourierField probe(v, kphi, 0);
        probe.for_each([&](const TorusIndex& l, int, Complex) { modes.push_back(l); });
    }
    int size() const { return static_cast<int>(modes.size()); }
};

void check_floor(double d, const Ball& ball, const std::vector<double>& omega,
                 const KuksinFloor& floor) {
    if (floor.alpha <= 0.0) return;
    for (const auto& l : ball.modes) {
        double div = std::abs(dot(omega, l) + d);
        double bound =
            floor.alpha * floor.gamma / std::pow(static_cast<double>(l.bracket()), floor.tau);
        if (div < bound)
            throw SmallDivisorError("kuksin_solve: divisor below the Melnikov floor",
                                    l.to_vector(), div, bound);
    }
}

}  // namespace

FourierField kuksin_solve(double d, const FourierField& mu, const FourierField& rhs,
                          const std::vector<double>& omega, const KuksinFloor& floor) {
    if (mu.kx() != 0 || rhs.kx() != 0)
        throw ConfigError("kuksin_solve: mu and rhs must be phi-only");
    if (std::abs(mu.mean()) > 1e-12 * std::max(1.0, mu.max_abs_coeff()))
        throw DomainError("kuksin_solve: mu must have zero mean");

    Ball ball(rhs.v(), rhs.kphi());
    check_floor(d, ball, omega, floor);

    FourierField out(rhs.v(), rhs.kphi(), 0);

    if (mu.max_abs_coeff() == 0.0) {  // the bordered matrix is diagonal
        for (const auto& l : ball.modes) {
            Complex p = rhs.coeff(l, 0);
            if (p == Complex(0.0, 0.0)) continue;
            out.set_coeff(l, 0, p / (dot(omega, l) + d));
        }
        return out;
    }

    const int n = ball.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd p(n);
    for (int r = 0; r < n; ++r) {
        p(r) = rhs.coeff(ball.modes[r], 0);
        for (int c = 0; c < n; ++c) {
            TorusIndex diff = ball.modes[r];
            for (int dd = 0; dd < ball.v; ++dd) diff.c[dd] -= ball.modes[c].c[dd];
            Complex val = (diff.l1() <= ball.kphi) ? mu.coeff(diff, 0) : Complex(0.0, 0.0);
            if (r == c) val += dot(omega, ball.modes[r]) + d;
            m(r, c) = val;
        }
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    if (lu.rcond() < 1e-12)
        throw NumericalError("kuksin_solve: bordered-diagonal matrix is ill-conditioned");
    Eigen::VectorXcd u = lu.solve(p);
    u += lu.solve(p - m * u);  // one refinement step

    double pn = p.norm();
    double res = (m * u - p).norm();
    if (pn > 0.0 && res > 1e-10 * pn)
        throw NumericalError("kuksin_solve: solve residual above 1e-10");

    for (int r = 0; r < n; ++r) out.set_coeff(ball.modes[r], 0, u(r));
    return out;
}

DiagonalModel DiagonalModel::unperturbed(int v, int kphi, int kx, double m) {
    DiagonalModel out;
    out.v = v;
    out.kphi = kphi;
    out.kx = kx;
    out.m_const = m;
    out.d.assign(static_cast<std::size_t>(2 * kx + 1), 0.0);
    out.mu.assign(static_cast<std::size_t>(2 * kx + 1), FourierField(v, kphi, 0));
    for (int k = -kx; k <= kx; ++k)
        out.d[static_cast<std::size_t>(k + kx)] = m * std::pow(static_cast<double>(k), 5.0);
    return out;
}

double DiagonalModel::r_at(int k) const {
    if (k == 0) return 0.0;
    double k3 = ipow(static_cast<double>(k), 3);
    return (d_at(k) - m_const * ipow(static_cast<double>(k), 5)) / k3;
}

void DiagonalModel::validate(double c_sep) const {
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = -kx; k <= kx; ++k) {
        if (k == 0) {
            if (prev >= 0.0) throw DomainError("DiagonalModel: ordering broken at k = 0");
            prev = 0.0;
            continue;
        }
        if (d_at(k) <= prev) throw DomainError("DiagonalModel: eigenvalues not increasing");
        prev = d_at(k);
    }
    for (int i = -kx; i <= kx; ++i) {
        if (i == 0) continue;
        for (int j = i + 1; j <= kx; ++j) {
            if (j == 0) continue;
            double gap = std::abs(d_at(i) - d_at(j));
            double sep = c_sep * std::abs(ipow(double(i), 5) - ipow(double(j), 5));
            if (gap < sep) throw DomainError("DiagonalModel: separation bound violated");
        }
    }
}

VarCoeffOperator DiagonalModel::as_operator() const {
    VarCoeffOperator op(v, kphi, kx, true);
    for (int k = -kx; k <= kx; ++k) {
        if (k == 0) continue;
        FourierField series = mu_at(k);
        TorusIndex l0;
        l0.v = v;
        series.add_coeff(l0, 0, Complex(d_at(k), 0.0));
        op.set_block(k, k, series * Complex(0.0, 1.0));
    }
    return op;
}

ReductionState init_reduction(DiagonalModel D0, std::vector<VarCoeffOperator> K,
                              double s_prime, double sigma) {
    if (K.empty()) throw ConfigError("init_reduction: at least one correction source required");
    ReductionState st;
    st.D = std::move(D0);
    st.R = K[0];
    st.Q = VarCoeffOperator(st.D.v, st.D.kphi, st.D.kx, true);
    for (std::size_t i = 1; i < K.size(); ++i) st.Q += K[i];
    st.K = std::move(K);
    st.Omega = op_identity(st.D.v, st.D.kphi, st.D.kx, true);
    st.OmegaInv = st.Omega;
    st.step_m = 1;
    st.n_outer = static_cast<int>(st.K.size());
    st.s_prime = s_prime;
    st.sigma = sigma;
    return st;
}

VarCoeffOperator homological_solve(const DiagonalModel& D, const VarCoeffOperator& R,
                                   double alpha_mn, double tau,
                                   const std::vector<double>& omega) {
    const int kx = D.kx;
    VarCoeffOperator phi(D.v, D.kphi, kx, true);
    Ball ball(D.v, D.kphi);

    for (int i = -kx; i <= kx; ++i) {
        if (i == 0) continue;
        for (int j = -kx; j <= kx; ++j) {
            if (j == 0 || j == i) continue;
            double dij = D.d_at(i) - D.d_at(j);
            double gamma = std::abs(ipow(double(i), 5) - ipow(double(j), 5));
            KuksinFloor floor{alpha_mn, gamma, tau};

            try {
                if (const Complex* rs = R.series_ptr(i, j); rs != nullptr) {
                    FourierField mu_ij = D.mu_at(i) - D.mu_at(j);
                    FourierField rhs = R.block(i, j) * Complex(0.0, 1.0);
                    phi.set_block(i, j, kuksin_solve(dij, mu_ij, rhs, omega, floor));
                } else {
                    // no right-hand side: Phi_ij = 0, but membership in the
                    // non-resonant set is still required for the step
                    check_floor(dij, ball, omega, floor);
                }
            } catch (const SmallDivisorError& e) {
                throw ParameterExcludedError("homological_solve: Melnikov floor failed", i, j,
                                             e.ell, e.divisor, e.floor);
            }
        }
    }
    return phi;
}

double homological_residual(const DiagonalModel& D, const VarCoeffOperator& R,
                            const VarCoeffOperator& phi, const std::vector<double>& omega,
                            const NormParams& np) {
    // residual of omega.dtheta Phi + [D, Phi] + R - diag R, blockwise:
    // dtheta Phi_ij + i (d_ij + mu_ij) Phi_ij + R_ij for i != j
    VarCoeffOperator res(D.v, D.kphi, D.kx, true);
    for (int i = -D.kx; i <= D.kx; ++i) {
        if (i == 0) continue;
        for (int j = -D.kx; j <= D.kx; ++j) {
            if (j == 0 || j == i) continue;
            FourierField pij = phi.block(i, j);
            FourierField rij = R.block(i, j);
            if (pij.max_abs_coeff() == 0.0 && rij.max_abs_coeff() == 0.0) continue;
            FourierField term = dphi_omega(pij, omega);
            FourierField coef = D.mu_at(i) - D.mu_at(j);
            TorusIndex l0;
            l0.v = D.v;
            coef.add_coeff(l0, 0, Complex(D.d_at(i) - D.d_at(j), 0.0));
            term += mul(coef, pij) * Complex(0.0, 1.0);
            term += rij;
            if (term.max_abs_coeff() > 0.0) res.set_block(i, j, term);
        }
    }
    double rn = decay_norm(R, DecayKind::Varsigma, np);
    return rn > 0.0 ? decay_norm(res, DecayKind::Varsigma, np) / rn : 0.0;
}

ReductionState reduce_step(ReductionState state, double alpha_mn, double tau,
                           const std::vector<double>& omega, int s0, ReduceInfo* info) {
    NormParams np(state.s_prime, static_cast<double>(s0), s0);
    const int m = state.step_m;

    double r_before = decay_norm(state.R, DecayKind::Varsigma, np);

    VarCoeffOperator phi = homological_solve(state.D, state.R, alpha_mn, tau, omega);
    double hom_res = homological_residual(state.D, state.R, phi, omega, np);

    ExpResult psi = op_exp(phi, np);
    ExpResult psi_inv = op_exp(Complex(-1.0, 0.0) * phi, np);

    // G = Psi^{-1} ( (omega.dtheta Psi) + (D + R) Psi )
    VarCoeffOperator inner = op_dtheta(psi.value, omega);
    inner += op_mul(state.D.as_operator() + state.R, psi.value);
    VarCoeffOperator g = op_mul(psi_inv.value, inner);

    // new diagonal model from the current remainder's diagonal
    DiagonalModel dnew = state.D;
    double drift = 0.0;
    TorusIndex l0;
    l0.v = state.D.v;
    for (int k = -state.D.kx; k <= state.D.kx; ++k) {
        if (k == 0) continue;
        FourierField rkk = state.R.block(k, k);
        Complex mean = rkk.coeff(l0, 0);
        drift = std::max(drift, std::abs(mean.real()));
        dnew.d[static_cast<std::size_t>(k + state.D.kx)] += mean.imag();
        FourierField osc = rkk;
        osc.set_coeff(l0, 0, Complex(0.0, 0.0));
        dnew.mu[static_cast<std::size_t>(k + state.D.kx)] += osc * Complex(0.0, -1.0);
    }

    VarCoeffOperator r_plus = g - dnew.as_operator();
    r_plus.drop_zero_lines(0.0);

    // accumulate the transforms
    state.Omega = op_mul(state.Omega, psi.value);
    state.OmegaInv = op_mul(psi_inv.value, state.OmegaInv);
    state.Phis.push_back(phi);

    // corrections maturing into the remainder / staying deferred
    if (m + 1 <= state.n_outer) {
        r_plus += op_mul(state.OmegaInv, op_mul(state.K[static_cast<std::size_t>(m)],
                                                state.Omega));
    }
    VarCoeffOperator qnew(state.D.v, state.D.kphi, state.D.kx, true);
    for (int i = m + 2; i <= state.n_outer; ++i)
        qnew += state.K[static_cast<std::size_t>(i - 1)];
    if (qnew.lines().empty())
        state.Q = qnew;
    else
        state.Q = op_mul(state.OmegaInv, op_mul(qnew, state.Omega));

    state.D = std::move(dnew);
    state.R = std::move(r_plus);
    state.step_m = m + 1;
    state.s_prime -= 2.0 * state.sigma;

    if (info) {
        info->r_before = r_before;
        info->r_after = decay_norm(state.R, DecayKind::Varsigma, np);
        info->phi_rho = decay_norm(phi, DecayKind::Rho, np);
        info->hom_residual = hom_res;
        info->diag_drift = drift;
        info->exp_terms = psi.terms;
        info->contracted = info->r_after <= r_before;
        // Assumption C diagnostic: smallest log|d_ij| / log(gamma_ij) - 1
        double beta = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= state.D.kx; ++i)
            for (int j = -state.D.kx; j < i; ++j) {
                if (j == 0 || i == j) continue;
                double gt = norm_l1_torus(state.D.mu_at(i) - state.D.mu_at(j), 0.0, tau);
                if (gt <= 1.0) continue;
                double dij = std::abs(state.D.d_at(i) - state.D.d_at(j));
                if (dij > 1.0) beta = std::min(beta, std::log(dij) / std::log(gt) - 1.0);
            }
        info->kuksin_beta = std::isfinite(beta) ? beta : 0.0;
    }
    return state;
}

FourierField invert_J(const DiagonalModel& D, const FourierField& g, double alpha_nn,
                      double tau, const std::vector<double>& omega) {
    if (g.v() != D.v || g.kphi() != D.kphi || g.kx() != D.kx)
        throw ConfigError("invert_J: truncation mismatch");
    if (!g.zero_avg_x && g.x_average_magnitude() > 1e-12 * std::max(1.0, g.max_abs_coeff()))
        throw DomainError("invert_J: g must have zero space average");

    FourierField out(g.v(), g.kphi(), g.kx());
    FourierField probe(g.v(), g.kphi(), 0);
    for (int k = -g.kx(); k <= g.kx(); ++k) {
        if (k == 0) continue;
        // column of g at this space mode
        FourierField gk(g.v(), g.kphi(), 0);
        bool nonzero = false;
        g.for_each([&](const TorusIndex& l, int kk, Complex c) {
            if (kk != k || c == Complex(0.0, 0.0)) return;
            gk.set_coeff(l, 0, c);
            nonzero = true;
        });
        if (!nonzero) continue;
        KuksinFloor floor{alpha_nn, std::abs(ipow(double(k), 5)), tau};
        FourierField vk;
        try {
            vk = kuksin_solve(D.d_at(k), D.mu_at(k), gk * Complex(0.0, -1.0), omega, floor);
        } catch (const SmallDivisorError& e) {
            throw ParameterExcludedError("invert_J: first Melnikov floor failed", k, 0, e.ell,
                                         e.divisor, e.floor);
        }
        vk.for_each([&](const TorusIndex& l, int, Complex c) {
            if (c != Complex(0.0, 0.0)) out.set_coeff(l, k, c);
        });
    }
    out.zero_avg_x = true;
    return out;
}

FourierField approx_inverse(const RegularizedOperator& reg, const ReductionState& state,
                            const FourierField& F, double alpha_nn, double tau) {
    FourierField t = reg.apply_U(1, F, true);           // (1/xi) B^{-1} A^{-1} F
    t = op_apply(state.OmegaInv, t);                    // Omega_n^{-1}
    FourierField w = invert_J(state.D, t, alpha_nn, tau, reg.omega());
    w = op_apply(state.Omega, w);                       // Omega_n
    return reg.apply_U(2, w, false);                    // A B
}

// ---- checkpointing -----------------------------------------------------------

nlohmann::json reduction_state_to_json(const ReductionState& s) {
    nlohmann::json j;
    j["v"] = s.D.v;
    j["kphi"] = s.D.kphi;
    j["kx"] = s.D.kx;
    j["m_const"] = s.D.m_const;
    j["d"] = s.D.d;
    nlohmann::json mus = nlohmann::json::array();
    for (const auto& m : s.D.mu) mus.push_back(field_to_json(m));
    j["mu"] = std::move(mus);
    j["R"] = operator_to_json(s.R);
    j["Q"] = operator_to_json(s.Q);
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& k : s.K) ks.push_back(operator_to_json(k));
    j["K"] = std::move(ks);
    j["Omega"] = operator_to_json(s.Omega);
    j["OmegaInv"] = operator_to_json(s.OmegaInv);
    nlohmann::json ph = nlohmann::json::array();
    for (const auto& p : s.Phis) ph.push_back(operator_to_json(p));
    j["Phis"] = std::move(ph);
    j["step_m"] = s.step_m;
    j["n_outer"] = s.n_outer;
    j["s_prime"] = s.s_prime;
    j["sigma"] = s.sigma;
    return j;
}

ReductionState reduction_state_from_json(const nlohmann::json& j) {
    ReductionState s;
    s.D.v = j.at("v").get<int>();
    s.D.kphi = j.at("kphi").get<int>();
    s.D.kx = j.at("kx").get<int>();
    s.D.m_const = j.at("m_const").get<double>();
    s.D.d = j.at("d").get<std::vector<double>>();
    for (const auto& m : j.at("mu")) s.D.mu.push_back(field_from_json(m));
    s.R = operator_from_json(j.at("R"));
    s.Q = operator_from_json(j.at("Q"));
    for (const auto& k : j.at("K")) s.K.push_back(operator_from_json(k));
    s.Omega = operator_from_json(j.at("Omega"));
    s.OmegaInv = operator_from_json(j.at("OmegaInv"));
    for (const auto& p : j.at("Phis")) s.Phis.push_back(operator_from_json(p));
    s.step_m = j.at("step_m").get<int>();
    s.n_outer = j.at("n_outer").get<int>();
    s.s_prime = j.at("s_prime").get<double>();
    s.sigma = j.at("sigma").get<double>();
    return s;
}

}  // namespace kdv5
