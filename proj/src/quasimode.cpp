#include "scarforge/quasimode.hpp"

#include "scarforge/analytic.hpp"
#include "scarforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

namespace scarforge::quasimode {

namespace {

struct TimeGrid {
    int n = 0;       // nodes t_j = j h, |j| <= n
    double h = 0.0;
    double extent = 0.0;

    double weight(int j) const { return std::abs(j) == n ? 0.5 * h : h; }
};

TimeGrid time_grid(const CutoffFunction& chi, double T, double theta) {
    if (!(T > 0.0)) throw DomainError("quasimode time T must be positive");
    TimeGrid g;
    g.extent = (chi.sharp() ? chi.jump_position() : 1.0) * T;
    g.n = std::max(1, static_cast<int>(std::ceil(g.extent / time_step(theta, chi, T))));
    g.h = g.extent / g.n;
    return g;
}

double cutoff_at(const CutoffFunction& chi, double t, double T) { return chi.value(t / T); }

double cutoff_deriv_at(const CutoffFunction& chi, double t, double T) {
    return chi.derivative(t / T);
}

void accumulate(Eigen::VectorXcd& acc, const Eigen::VectorXcd& v, cplx c) {
    if (acc.size() < v.size()) {
        const Eigen::Index old = acc.size();
        acc.conservativeResize(v.size());
        acc.tail(v.size() - old).setZero();
    }
    acc.head(v.size()) += c * v;
}

Eigen::VectorXcd padded(const Eigen::VectorXcd& v, Eigen::Index n) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    out.head(v.size()) = v;
    return out;
}

double sharp_boundary_sq(double q1, double a_T, double theta) {
    const double k = 1.0 / std::sqrt(std::cosh(2.0 * q1 * a_T));
    return std::max(0.0, 2.0 - 2.0 * std::cos(2.0 * a_T * theta) * k);
}

void fill_prediction(QuasimodeReport& rep, const CutoffFunction& chi, double q1) {
    const double s1 = analytic::s1(q1, rep.theta);
    rep.predicted_norm_sq = rep.T * s1 * chi.norm_sq();
    if (chi.sharp()) {
        const double a_T = chi.jump_position() * rep.T;
        rep.predicted_width =
            rep.hbar * std::sqrt(sharp_boundary_sq(q1, a_T, rep.theta) / rep.predicted_norm_sq);
    } else {
        rep.predicted_width = rep.hbar / rep.T * chi.rayleigh_quotient();
    }
}

}  // namespace

double time_step(double theta, const CutoffFunction& chi, double T) {
    double dt = std::min(0.05, 1.0 / (10.0 * (1.0 + std::abs(theta))));
    if (chi.mollifier_radius > 0.0) dt = std::min(dt, T * chi.mollifier_radius / kNodesPerMollifier);
    return dt;
}

Quasimode build_quasimode(const qnf::NormalFormCoefficients& coeffs, const CutoffFunction& chi,
                          double T, double hbar, const QuasimodeOptions& options) {
    coeffs.validate(hbar);
    const double q0 = coeffs.longitudinal.q0;
    QuasimodeReport rep;
    rep.route = "fock";
    rep.hbar = hbar;
    rep.T = T;
    rep.E_center = options.has_energy ? options.E_center : q0;
    rep.theta = (rep.E_center - q0) / hbar;
    const TimeGrid g = time_grid(chi, T, rep.theta);
    rep.time_nodes = 2 * g.n + 1;

    qnf::GrowingPropagator prop(coeffs, hbar, options.min_dim, options.dim_cap);
    fock::FockState psi = fock::FockState::basis(0, prop.dim_for(0.0), hbar);
    Eigen::VectorXcd acc, acc_prime;
    const cplx i_theta(0.0, rep.theta);

    for (int j = 0; j <= g.n; ++j) {
        const double t = j * g.h;
        if (j > 0) psi = prop.step(psi, t - g.h, g.h);
        const double w = g.weight(j);
        const cplx fwd = std::exp(i_theta * t);
        accumulate(acc, psi.coeffs, w * cutoff_at(chi, t, T) * fwd);
        if (!chi.sharp()) accumulate(acc_prime, psi.coeffs, w * cutoff_deriv_at(chi, t, T) * fwd);
        if (j == 0) continue;
        const fock::FockState rev = fock::parity_conjugate(psi);
        const cplx bwd = std::conj(fwd);
        accumulate(acc, rev.coeffs, w * cutoff_at(chi, -t, T) * bwd);
        if (!chi.sharp()) accumulate(acc_prime, rev.coeffs, w * cutoff_deriv_at(chi, -t, T) * bwd);
        if (chi.sharp() && j == g.n) {
            acc_prime = T * (bwd * rev.coeffs - fwd * psi.coeffs);
        }
    }
    const Eigen::Index dim = acc.size();
    acc_prime = padded(acc_prime, dim);

    const BandedOperator q = qnf::build_q_operator(coeffs, hbar, static_cast<int>(dim));
    const Eigen::VectorXcd residual = q.apply(acc) - (hbar * rep.theta) * acc;

    rep.dim = static_cast<int>(dim);
    rep.norm_sq = acc.squaredNorm();
    rep.width = residual.norm() / std::sqrt(rep.norm_sq);
    rep.ibp_width = hbar / T * acc_prime.norm() / std::sqrt(rep.norm_sq);
    fill_prediction(rep, chi, coeffs.q_at(1, hbar));

    Quasimode out{fock::FockState{std::move(acc), hbar}, rep};
    if (options.compute_localization) {
        fock::FockState unit = out.state;
        unit.coeffs /= unit.norm();
        out.report.localization = qnf::localization_mass(unit, options.epsilon_prime, hbar);
        out.report.localization_computed = true;
    }
    return out;
}

QuasimodeReport quasimode_gram(double q1, const CutoffFunction& chi, double T, double theta,
                               double hbar) {
    if (!(q1 > 0.0)) throw DomainError("q1 must be positive");
    QuasimodeReport rep;
    rep.route = "gram";
    rep.hbar = hbar;
    rep.T = T;
    rep.theta = theta;
    rep.E_center = hbar * theta;
    const TimeGrid g = time_grid(chi, T, theta);
    const int m = 2 * g.n + 1;
    rep.time_nodes = m;

    std::vector<double> a(m), b(m), kernel(m);
    for (int i = 0; i < m; ++i) {
        const int j = i - g.n;
        const double t = j * g.h;
        a[i] = g.weight(j) * cutoff_at(chi, t, T);
        b[i] = g.weight(j) * cutoff_deriv_at(chi, t, T);
        kernel[i] = std::cos(i * g.h * theta) / std::sqrt(std::cosh(q1 * i * g.h));
    }
    double norm_sq = 0.0, prime_sq = 0.0;
    for (int i = 0; i < m; ++i) {
        double ra = 0.0, rb = 0.0;
        for (int k = 0; k < m; ++k) {
            const double kk = kernel[std::abs(i - k)];
            ra += a[k] * kk;
            rb += b[k] * kk;
        }
        norm_sq += a[i] * ra;
        prime_sq += b[i] * rb;
    }
    if (chi.sharp())
        prime_sq = T * T * sharp_boundary_sq(q1, chi.jump_position() * T, theta);
    rep.norm_sq = norm_sq;
    rep.ibp_width = hbar / T * std::sqrt(prime_sq / norm_sq);
    rep.width = rep.ibp_width;
    fill_prediction(rep, chi, q1);
    return rep;
}

std::vector<WidthScanRow> width_scan(const qnf::NormalFormCoefficients& coeffs,
                                     double epsilon_prime, const std::vector<double>& hbar_list,
                                     const CutoffFunction& chi, bool compute_localization) {
    if (hbar_list.size() < 3) throw DomainError("width_scan needs at least three hbar values");
    for (std::size_t i = 1; i < hbar_list.size(); ++i)
        if (!(hbar_list[i] < hbar_list[i - 1])) throw DomainError("hbar_list must be decreasing");

    auto run = [&](double hbar) {
        const double T = qnf::ehrenfest_time(epsilon_prime, coeffs.lambda0, hbar);
        QuasimodeOptions opt;
        opt.epsilon_prime = epsilon_prime;
        opt.compute_localization = compute_localization;
        const Quasimode qm = build_quasimode(coeffs, chi, T, hbar, opt);
        WidthScanRow row;
        row.hbar = hbar;
        row.T = T;
        row.norm_sq = qm.report.norm_sq;
        row.predicted_norm_sq = qm.report.predicted_norm_sq;
        row.width = qm.report.width;
        row.predicted_width = qm.report.predicted_width;
        const double lg = std::abs(std::log(hbar));
        row.width_normalized = qm.report.width / hbar * (chi.sharp() ? std::sqrt(lg) : lg);
        row.outside_mass = compute_localization ? qm.report.localization.outside_mass : 0.0;
        row.dim = qm.report.dim;
        return row;
    };
    std::vector<std::future<WidthScanRow>> jobs;
    for (double hbar : hbar_list) jobs.push_back(std::async(std::launch::async, run, hbar));
    std::vector<WidthScanRow> rows;
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

double width_law_limit(double lambda, double epsilon_prime) {
    return std::numbers::pi * lambda * (1.0 + 2.0 * epsilon_prime);
}

}  // namespace scarforge::quasimode
