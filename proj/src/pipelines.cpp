#include "pipeline_registry.hpp"

#include "scarforge/analytic.hpp"
#include "scarforge/cutoff.hpp"
#include "scarforge/errors.hpp"
#include "scarforge/fock.hpp"
#include "scarforge/qnf.hpp"
#include "scarforge/quasimode.hpp"
#include "scarforge/scarscan.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

namespace scarforge::experiment::detail {

ParamValue number(double v) {
    ParamValue p;
    p.numbers = {v};
    p.text = format_number(v);
    return p;
}

ParamValue numbers(std::vector<double> v) {
    ParamValue p;
    p.numbers = std::move(v);
    p.is_list = true;
    return p;
}

ParamValue text(std::string v) {
    ParamValue p;
    p.text = std::move(v);
    p.is_text = true;
    return p;
}

ParamValue flag(bool v) {
    ParamValue p;
    p.numbers = {v ? 1.0 : 0.0};
    p.text = v ? "true" : "false";
    return p;
}

namespace {

double scalar(const ExperimentConfig& c, const std::string& name) {
    return c.params.at(name).scalar();
}

int integer(const ExperimentConfig& c, const std::string& name) {
    return static_cast<int>(c.params.at(name).scalar());
}

const std::vector<double>& list(const ExperimentConfig& c, const std::string& name) {
    return c.params.at(name).numbers;
}

double tol_for(const ExperimentConfig& c, const std::string& family, double fallback) {
    auto it = c.checks.find(family);
    return it != c.checks.end() && it->second.tol ? *it->second.tol : fallback;
}

Check make_check(const ExperimentConfig& cfg, std::string family, std::string name, double value,
                 double expected, double tol, std::string relation) {
    Check c;
    c.family = family;
    c.name = std::move(name);
    c.value = value;
    c.expected = expected;
    c.tol = tol_for(cfg, family, tol);
    c.relation = std::move(relation);
    return c;
}

void require_hbar(const std::vector<double>& hbars) {
    for (std::size_t i = 0; i < hbars.size(); ++i)
        if (!(hbars[i] > 0.0 && hbars[i] < 1.0))
            throw ConfigError(fmt::format("params.hbar[{}]: must lie in (0, 1)", i));
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

std::vector<double> descending(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

// overlap-table

PipelineResult run_overlap_table(const ExperimentConfig& cfg) {
    const double b0 = scalar(cfg, "beta_min"), b1 = scalar(cfg, "beta_max");
    const double step = scalar(cfg, "beta_step");
    const int dim = integer(cfg, "dim");
    const int m_max = integer(cfg, "m_max");
    if (!(step > 0.0) || b1 < b0) throw ConfigError("params.beta_step: empty beta range");
    if (m_max < 0 || m_max > analytic::kMaxOverlapIndex)
        throw ConfigError(fmt::format("params.m_max: must lie in [0, {}]", analytic::kMaxOverlapIndex));
    const int nb = static_cast<int>(std::floor((b1 - b0) / step + 1e-9)) + 1;

    std::vector<analytic::OverlapKernel> kernels;
    for (int m1 = 0; m1 <= m_max; ++m1)
        for (int m2 = 0; m2 <= m_max; ++m2)
            if (m1 % 2 == 0 && m2 % 2 == 0) kernels.push_back(analytic::overlap_kernel(m1, m2));

    PipelineResult res;
    Table t;
    t.name = "overlap_table";
    t.columns = {"beta", "m1", "m2", "fock", "analytic", "abs_error", "top_quarter_mass"};
    t.key_columns = 3;
    std::vector<double> ground_err(nb, 0.0), all_err(nb, 0.0);
    std::mutex mu;
    parallel_for(
        nb, cfg.workers,
        [&](int i) {
            const double beta = b0 + i * step;
            std::map<int, fock::FockState> cols;
            for (int m2 = 0; m2 <= m_max; m2 += 2)
                cols.emplace(m2, fock::dilate(beta, fock::FockState::basis(m2, dim, 1.0)));
            std::vector<std::vector<Cell>> rows;
            for (const auto& k : kernels) {
                const fock::FockState& col = cols.at(k.m2);
                const double f = col.coeffs[k.m1].real();
                const double a = k(beta);
                const double err = std::abs(f - a);
                if (k.m1 == 0 && k.m2 == 0) ground_err[i] = err;
                all_err[i] = std::max(all_err[i], err);
                rows.push_back({beta, std::int64_t{k.m1}, std::int64_t{k.m2}, f, a, err,
                                col.top_quarter_mass()});
            }
            std::lock_guard<std::mutex> lock(mu);
            for (auto& r : rows) t.rows.push_back(std::move(r));
        },
        &res.failures);
    res.tables.push_back(std::move(t));
    res.checks.push_back(make_check(cfg, "overlap_law", "overlap_law_max_error",
                                    *std::max_element(ground_err.begin(), ground_err.end()), 0.0,
                                    1e-8, "le"));
    res.checks.push_back(make_check(cfg, "overlap_kernels", "overlap_kernels_max_error",
                                    *std::max_element(all_err.begin(), all_err.end()), 0.0, 1e-8,
                                    "le"));
    return res;
}

// dyson-order

PipelineResult run_dyson_order(const ExperimentConfig& cfg) {
    const auto& q = list(cfg, "q");
    const double t = scalar(cfg, "t");
    const auto hbars = descending(list(cfg, "hbar"));
    const auto& orders = list(cfg, "order");
    const int dim = integer(cfg, "dim");
    const int dim_nq = integer(cfg, "factorized_dim");
    require_hbar(hbars);
    if (hbars.size() < 2) throw ConfigError("params.hbar: the slope needs at least two values");
    const auto coeffs = qnf::NormalFormCoefficients::constant(q);

    struct Point {
        int order;
        double hbar;
        double error = std::nan(""), factorized = std::nan(""), estimate = 0.0;
        int dim = 0;
    };
    std::vector<Point> pts;
    for (double l : orders)
        for (double h : hbars) pts.push_back({static_cast<int>(l), h});

    PipelineResult res;
    parallel_for(
        static_cast<int>(pts.size()), cfg.workers,
        [&](int i) {
            Point& p = pts[i];
            const qnf::DysonExpansion e = qnf::dyson_expand(coeffs, p.hbar, p.order);
            const fock::FockState phi0 = fock::FockState::basis(0, dim > 0 ? dim : 64, p.hbar);
            const fock::FockState exact =
                dim > 0 ? qnf::propagate_exact(qnf::build_q_operator(coeffs, p.hbar, dim), phi0, t)
                        : qnf::propagate_auto(coeffs, phi0, t);
            p.dim = exact.dim();
            p.error = (exact.coeffs - e.reconstruct(t, p.dim).coeffs).norm();
            p.estimate = e.remainder_bound * std::pow(std::abs(t) * p.hbar, p.order + 1);
            // The non-quadratic part commutes with the quadratic flow, so the same error is
            // the distance between exp(-i t Q_nq / hbar) phi_0 and the inner state.
            const auto nq = qnf::build_q_operator(coeffs.nonquadratic_part(), p.hbar, dim_nq);
            const fock::FockState u_nq =
                qnf::propagate_exact(nq, fock::FockState::basis(0, dim_nq, p.hbar), t);
            p.factorized = (u_nq.coeffs - e.inner_state(t, dim_nq).coeffs).norm();
        },
        &res.failures);

    Table tab;
    tab.name = "dyson_order";
    tab.columns = {"order", "hbar", "error", "factorized_error", "remainder_estimate", "dim"};
    tab.key_columns = 2;
    for (const auto& p : pts)
        if (p.dim > 0)
            tab.rows.push_back({std::int64_t{p.order}, p.hbar, p.error, p.factorized, p.estimate,
                                std::int64_t{p.dim}});
    res.tables.push_back(std::move(tab));

    for (double lv : orders) {
        const int l = static_cast<int>(lv);
        std::vector<double> x, y;
        double worst = 0.0;
        for (const auto& p : pts) {
            if (p.order != l || p.dim == 0) continue;
            x.push_back(std::log(p.hbar));
            y.push_back(std::log(p.error));
            worst = std::max(worst, std::abs(p.error - p.factorized) / p.error);
        }
        const double slope = x.size() >= 2 ? fit_slope(x, y) : std::nan("");
        res.checks.push_back(make_check(cfg, "dyson_slope", fmt::format("dyson_slope_l{}", l),
                                        slope, l + 1.0, 0.1, "ge"));
        res.checks.push_back(make_check(cfg, "dyson_routes",
                                        fmt::format("dyson_route_agreement_l{}", l), worst, 0.0,
                                        1e-2, "le"));
    }
    return res;
}

// width-scan

quasimode::CutoffFunction make_cutoff(const ExperimentConfig& cfg) {
    const std::string kind = cfg.params.at("cutoff").text;
    const double eps = scalar(cfg, "epsilon_prime");
    if (kind == "optimized") return quasimode::optimize_cutoff(eps);
    if (kind == "arch") return quasimode::cosine_arch(4097);
    if (kind == "sharp") return quasimode::CutoffFunction::indicator_of(4097, 1.0);
    throw ConfigError("params.cutoff: expected optimized, arch or sharp");
}

PipelineResult run_width_scan(const ExperimentConfig& cfg) {
    const double lambda = scalar(cfg, "lambda");
    const double eps = scalar(cfg, "epsilon_prime");
    const auto hbars = descending(list(cfg, "hbar"));
    require_hbar(hbars);
    if (hbars.size() < 3) throw ConfigError("params.hbar: width-scan needs at least three values");
    if (!(lambda > 0.0)) throw ConfigError("params.lambda: must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("params.epsilon_prime: must lie in (0, 1)");
    const auto chi = make_cutoff(cfg);
    const auto coeffs = qnf::NormalFormCoefficients::quadratic(lambda);
    const double limit = quasimode::width_law_limit(lambda, eps);

    std::vector<quasimode::WidthScanRow> rows(hbars.size());
    std::vector<char> done(hbars.size(), 0);
    PipelineResult res;
    parallel_for(
        static_cast<int>(hbars.size()), cfg.workers,
        [&](int i) {
            const double h = hbars[i];
            const double T = qnf::ehrenfest_time(eps, lambda, h);
            quasimode::QuasimodeOptions opt;
            opt.epsilon_prime = eps;
            opt.compute_localization = false;
            const auto qm = quasimode::build_quasimode(coeffs, chi, T, h, opt);
            auto& r = rows[i];
            r.hbar = h;
            r.T = T;
            r.norm_sq = qm.report.norm_sq;
            r.predicted_norm_sq = qm.report.predicted_norm_sq;
            r.width = qm.report.width;
            const double lg = std::abs(std::log(h));
            r.width_normalized = r.width / h * (chi.sharp() ? std::sqrt(lg) : lg);
            done[i] = 1;
        },
        &res.failures);

    const double width_tol = tol_for(cfg, "width_law", 0.2);
    Table tab;
    tab.name = "width_scan";
    tab.columns = {"hbar", "T", "norm_sq", "predicted_norm_sq", "width", "width_normalized", "pass"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!done[i]) continue;
        const auto& r = rows[i];
        const double norm_dev = std::abs(r.norm_sq / r.predicted_norm_sq - 1.0);
        const double norm_tol = tol_for(cfg, "norm_law", 3.0) / r.T;
        const bool pass = norm_dev <= norm_tol && std::abs(r.width_normalized / limit - 1.0) <= width_tol;
        tab.rows.push_back({r.hbar, r.T, r.norm_sq, r.predicted_norm_sq, r.width,
                            r.width_normalized, pass});
        Check c = make_check(cfg, "norm_law", fmt::format("norm_law_hbar_{:g}", r.hbar), norm_dev,
                             0.0, 3.0, "le");
        c.tol /= r.T;
        c.note = "tolerance 3 / T";
        res.checks.push_back(c);
    }
    res.tables.push_back(std::move(tab));

    if (done.back()) {
        res.checks.push_back(make_check(cfg, "width_law",
                                        fmt::format("width_law_ratio_hbar_{:g}", hbars.back()),
                                        rows.back().width_normalized / limit, 1.0, 0.2, "abs"));
    }
    // Distance to the limit must shrink at every step towards smaller hbar.
    int violations = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!done[i] || !done[i - 1]) continue;
        if (std::abs(rows[i].width_normalized - limit) >= std::abs(rows[i - 1].width_normalized - limit))
            ++violations;
    }
    res.checks.push_back(make_check(cfg, "width_monotone", "width_monotone_violations",
                                    violations, 0.0, 0.0, "le"));
    return res;
}

// cdvp-scan

PipelineResult run_cdvp_scan(const ExperimentConfig& cfg) {
    const double theta = scalar(cfg, "theta");
    const double radius = scalar(cfg, "radius");
    const double q1 = scalar(cfg, "q1");
    const int grid = integer(cfg, "grid_size");
    const auto hbars = descending(list(cfg, "hbar"));
    require_hbar(hbars);
    if (hbars.size() < 2) throw ConfigError("params.hbar: the fit needs at least two values");

    std::vector<quasimode::CdvpState> states(hbars.size());
    std::vector<char> done(hbars.size(), 0);
    PipelineResult res;
    parallel_for(
        static_cast<int>(hbars.size()), cfg.workers,
        [&](int i) {
            auto s = quasimode::cdvp_state(theta, hbars[i], radius, grid, q1);
            s.x.resize(0);
            s.values.resize(0);
            s.weights.resize(0);
            states[i] = std::move(s);
            done[i] = 1;
        },
        &res.failures);

    Table tab;
    tab.name = "cdvp_scan";
    tab.columns = {"hbar", "log_hbar_abs", "norm_sq", "width", "width_normalized"};
    std::vector<double> x, y, wn;
    for (std::size_t i = 0; i < hbars.size(); ++i) {
        if (!done[i]) continue;
        const double lg = std::abs(std::log(hbars[i]));
        const double w = states[i].width * std::sqrt(lg) / hbars[i];
        tab.rows.push_back({hbars[i], lg, states[i].norm_sq, states[i].width, w});
        x.push_back(lg);
        y.push_back(states[i].norm_sq);
        wn.push_back(w);
    }
    res.tables.push_back(std::move(tab));
    if (x.size() >= 2) {
        res.checks.push_back(make_check(cfg, "cdvp_norm_slope", "cdvp_norm_slope", fit_slope(x, y),
                                        2.0, 0.1, "abs"));
        res.checks.push_back(make_check(cfg, "cdvp_width_trend", "cdvp_width_ratio_last_first",
                                        wn.back() / wn.front(), 1.3, 0.0, "le"));
    }
    return res;
}

// scar-weight

PipelineResult run_scar_weight(const ExperimentConfig& cfg) {
    const auto hbars = descending(list(cfg, "hbar"));
    const double eps_prime = scalar(cfg, "epsilon_prime");
    const double eps = scalar(cfg, "epsilon");
    const int n_grid = integer(cfg, "n_grid");
    require_hbar(hbars);

    std::vector<scarscan::PendulumScarReport> reps(hbars.size());
    std::vector<char> done(hbars.size(), 0);
    PipelineResult res;
    parallel_for(
        static_cast<int>(hbars.size()), cfg.workers,
        [&](int i) {
            reps[i] = scarscan::pendulum_scar(hbars[i], eps_prime, eps, n_grid);
            reps[i].weight.projected_state.resize(0);
            done[i] = 1;
        },
        &res.failures);

    Table tab;
    tab.name = "scar_weight";
    tab.columns = {"hbar", "c2", "K", "chosen_k", "projected_mass", "mass_bound", "scar_mass",
                   "width_achieved", "width_limit", "interval_mass", "complement_mass",
                   "quasimode_width_normalized", "quasimode_box_mass", "E_center", "T"};
    for (std::size_t i = 0; i < hbars.size(); ++i) {
        if (!done[i]) continue;
        const auto& r = reps[i];
        const auto& w = r.weight;
        const double h = r.hbar, lg = std::abs(std::log(h));
        const double eps_limit = eps * h / lg;
        tab.rows.push_back({h, w.c2, std::int64_t{w.K}, std::int64_t{w.chosen_k}, w.projected_mass,
                            w.mass_bound, w.scar_mass, w.width_achieved, eps_limit,
                            w.interval_mass, w.complement_mass, r.quasimode_width_normalized,
                            r.quasimode_box_mass, r.E_center, r.T});
        const std::string tag = fmt::format("hbar_{:g}", h);
        Check wc = make_check(cfg, "scar_width", "scar_width_" + tag, w.width_achieved / eps_limit,
                              1.0, 1e-9, "le");
        wc.note = "width_achieved / (epsilon hbar / |log hbar|)";
        res.checks.push_back(wc);
        Check pm = make_check(cfg, "projected_mass", "projected_mass_" + tag, w.projected_mass,
                              w.mass_bound, 0.05, "ge");
        pm.note = "absolute tolerance 0.05 is an engineering choice";
        res.checks.push_back(pm);
        res.checks.push_back(make_check(cfg, "scar_mass", "scar_mass_" + tag, w.scar_mass,
                                        0.5 * w.projected_mass, 0.0, "ge"));
        const double r2 = (w.C_gamma / w.c2) * (w.C_gamma / w.c2);
        if (r.quasimode_width_normalized <= w.C_gamma)
            res.checks.push_back(make_check(cfg, "tail_bound", "tail_bound_" + tag,
                                            w.complement_mass, r2, 1e-9, "le"));
    }
    res.tables.push_back(std::move(tab));
    return res;
}

// optimize-cutoff

PipelineResult run_optimize_cutoff(const ExperimentConfig& cfg) {
    const auto& eps_list = list(cfg, "epsilon_prime");
    const int grid = integer(cfg, "grid_size");
    for (std::size_t i = 0; i < eps_list.size(); ++i)
        if (!(eps_list[i] > 0.0))
            throw ConfigError(fmt::format("params.epsilon_prime[{}]: must be positive", i));

    std::vector<quasimode::CutoffFunction> out(eps_list.size());
    std::vector<char> done(eps_list.size(), 0);
    PipelineResult res;
    parallel_for(
        static_cast<int>(eps_list.size()), cfg.workers,
        [&](int i) {
            out[i] = quasimode::optimize_cutoff(eps_list[i], grid);
            done[i] = 1;
        },
        &res.failures);

    const double half_pi = std::numbers::pi / 2.0;
    Table tab;
    tab.name = "optimize_cutoff";
    tab.columns = {"epsilon_prime", "shrink", "mollifier_radius", "rayleigh_quotient", "target",
                   "norm_sq"};
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!done[i]) continue;
        const double rq = out[i].rayleigh_quotient();
        const double target = half_pi * (1.0 + eps_list[i]);
        tab.rows.push_back({eps_list[i], out[i].shrink, out[i].mollifier_radius, rq, target,
                            out[i].norm_sq()});
        res.checks.push_back(make_check(cfg, "cutoff_quotient",
                                        fmt::format("cutoff_quotient_eps_{:g}", eps_list[i]), rq,
                                        target, 0.0, "le"));
    }
    res.tables.push_back(std::move(tab));
    res.checks.push_back(make_check(cfg, "arch_quotient", "arch_quotient",
                                    quasimode::cosine_arch(grid).rayleigh_quotient(), half_pi,
                                    1e-6, "abs"));
    return res;
}

}  // namespace

const std::vector<PipelineDef>& registry() {
    using K = ParamKind;
    static const std::vector<PipelineDef> defs = {
        {"overlap-table",
         {{"beta_min", K::Number, number(-4.0)},
          {"beta_max", K::Number, number(4.0)},
          {"beta_step", K::Number, number(0.1)},
          {"dim", K::Integer, number(1024)},
          {"m_max", K::Integer, number(4)}},
         run_overlap_table},
        {"dyson-order",
         {{"q", K::NumberList, numbers({1.0, 1.0})},
          {"t", K::Number, number(1.0)},
          {"hbar", K::NumberList, numbers({1e-2, 1e-3, 1e-4, 1e-5})},
          {"order", K::IntegerList, numbers({1.0, 2.0})},
          {"dim", K::Integer, number(0)},
          {"factorized_dim", K::Integer, number(512)}},
         run_dyson_order},
        {"width-scan",
         {{"lambda", K::Number, number(1.0)},
          {"epsilon_prime", K::Number, number(0.1)},
          {"hbar", K::NumberList, numbers({1e-2, 1e-3, 1e-4})},
          {"cutoff", K::Text, text("optimized")}},
         run_width_scan},
        {"cdvp-scan",
         {{"theta", K::Number, number(0.0)},
          {"radius", K::Number, number(1.0)},
          {"q1", K::Number, number(1.0)},
          {"grid_size", K::Integer, number(0)},
          {"hbar", K::NumberList, numbers({1e-2, 1e-3, 1e-4, 1e-5})}},
         run_cdvp_scan},
        {"scar-weight",
         {{"hbar", K::NumberList, numbers({1.0 / 200.0})},
          {"epsilon_prime", K::Number, number(0.1)},
          {"epsilon", K::Number, number(0.5)},
          {"n_grid", K::Integer, number(0)}},
         run_scar_weight},
        {"optimize-cutoff",
         {{"epsilon_prime", K::NumberList, numbers({0.05, 0.1, 0.3})},
          {"grid_size", K::Integer, number(4097)}},
         run_optimize_cutoff},
    };
    return defs;
}

const PipelineDef& find_pipeline(const std::string& name) {
    for (const auto& d : registry())
        if (d.name == name) return d;
    throw DomainError("unknown pipeline '" + name + "'");
}

}  // namespace scarforge::experiment::detail
