#include "scarforge/qnf.hpp"

#include "scarforge/errors.hpp"
#include "scarforge/husimi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scarforge::qnf {

using fock::FockState;

double NormalFormCoefficients::q_at(int alpha, double hbar) const {
    if (alpha < 1 || alpha > N()) return 0.0;
    double v = 0.0, p = 1.0;
    for (double c : q[alpha - 1]) {
        v += c * p;
        p *= hbar;
    }
    return v;
}

void NormalFormCoefficients::validate(double hbar) const {
    if (N() < 1 || N() > fock::kMaxWeylPower)
        throw ValidityError("normal form order must lie in [1, 6]");
    if (q[0].empty() || std::abs(q[0][0] - lambda0) > 1e-12 * std::max(1.0, lambda0))
        throw ValidityError("q^1 at hbar = 0 must equal lambda0");
    if (!(lambda0 > 0.0)) throw ValidityError("lambda0 must be positive");
    if (std::abs(longitudinal.q0 - E0) > q0_constant * hbar + 1e-15)
        throw ValidityError("|q0 - E0| exceeds the recorded O(hbar) constant");
}

NormalFormCoefficients NormalFormCoefficients::nonquadratic_part() const {
    NormalFormCoefficients out = *this;
    if (!out.q.empty()) out.q[0].assign(1, 0.0);
    return out;
}

NormalFormCoefficients NormalFormCoefficients::quadratic(double lambda) {
    return constant({lambda});
}

NormalFormCoefficients NormalFormCoefficients::constant(const std::vector<double>& values) {
    NormalFormCoefficients c;
    for (double v : values) c.q.push_back({v});
    c.lambda0 = values.empty() ? 0.0 : values[0];
    return c;
}

BandedOperator build_q_operator(const NormalFormCoefficients& coeffs, double hbar, int dim) {
    const int n = coeffs.N();
    if (n < 1 || n > fock::kMaxWeylPower) throw UnsupportedOrder("normal form order outside [1, 6]");
    if (dim < 2 * n + 16)
        throw TruncationError("dimension " + std::to_string(dim) + " too small for order " +
                              std::to_string(n));
    BandedOperator q(dim);
    for (int alpha = 1; alpha <= n; ++alpha) {
        const double qa = coeffs.q_at(alpha, hbar);
        if (qa == 0.0) continue;
        q += cplx(qa) * fock::weyl_power_xxi(alpha, hbar, dim).first;
    }
    q.prune(0.0);
    q.set_hermitian(true);
    return q;
}

int auto_dim(double lambda, double t, int min_dim, int cap) {
    const double need = 16.0 * std::exp(2.0 * std::abs(lambda * t)) + 256.0;
    double bucket = 256.0;
    while (bucket < need) bucket *= std::pow(2.0, 0.25);
    int dim = static_cast<int>(std::ceil(bucket / 16.0)) * 16;
    return std::clamp(std::max(dim, min_dim), min_dim, cap);
}

FockState propagate_exact(const BandedOperator& q_op, const FockState& psi0, double t) {
    if (q_op.dim() != psi0.dim()) throw InvalidDimension("operator and state dimensions differ");
    if (psi0.top_quarter_mass() > kOverflowMass)
        throw EhrenfestOverflow("initial state already reaches the truncation boundary", 0.0);
    if (t == 0.0) return psi0;
    BandedOperator h = q_op;
    h *= cplx(1.0 / psi0.hbar);
    const ChebyshevPropagator prop(h);
    const double phase = std::abs(t) * prop.half_width();
    const int chunks = std::max(1, static_cast<int>(std::ceil(phase / 1000.0)));
    const double dt = t / chunks;
    FockState psi = psi0;
    for (int c = 0; c < chunks; ++c) {
        FockState next{prop.apply(psi.coeffs, dt), psi.hbar};
        if (next.top_quarter_mass() > kOverflowMass) {
            // Bisect inside the chunk for the last admissible time.
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 30; ++it) {
                const double mid = 0.5 * (lo + hi);
                const FockState probe{prop.apply(psi.coeffs, mid * dt), psi.hbar};
                (probe.top_quarter_mass() > kOverflowMass ? hi : lo) = mid;
            }
            throw EhrenfestOverflow("state reached the top quarter of the number basis",
                                    std::abs((c + lo) * dt));
        }
        psi = std::move(next);
    }
    return psi;
}

GrowingPropagator::GrowingPropagator(NormalFormCoefficients coeffs, double hbar, int min_dim,
                                     int cap)
    : coeffs_(std::move(coeffs)), hbar_(hbar), min_dim_(min_dim), cap_(cap) {
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    min_dim_ = std::max(min_dim_, 2 * coeffs_.N() + 16);
}

int GrowingPropagator::dim_for(double t) const {
    const double rate = std::max(std::abs(coeffs_.q_at(1, hbar_)), coeffs_.lambda0);
    return auto_dim(rate, t, min_dim_, cap_);
}

const BandedOperator& GrowingPropagator::q_operator(int dim) {
    return propagator(dim).op();
}

const ChebyshevPropagator& GrowingPropagator::propagator(int dim) {
    auto it = cache_.find(dim);
    if (it != cache_.end()) return *it->second;
    BandedOperator h = build_q_operator(coeffs_, hbar_, dim);
    h *= cplx(1.0 / hbar_);
    h.set_hermitian(true);
    // Keep at most two cached dimensions; evolution only grows.
    while (cache_.size() >= 2) cache_.erase(cache_.begin());
    return *cache_.emplace(dim, std::make_unique<ChebyshevPropagator>(h, 1000.0)).first->second;
}

FockState GrowingPropagator::step(const FockState& psi, double t_now, double dt) {
    int dim = std::max(psi.dim(), dim_for(std::max(std::abs(t_now), std::abs(t_now + dt))));
    dim = std::min(std::max(dim, psi.dim()), std::max(cap_, psi.dim()));
    for (;;) {
        const FockState start = psi.padded(dim);
        FockState next{propagator(dim).apply(start.coeffs, dt), hbar_};
        if (next.top_quarter_mass() <= kOverflowMass) return next;
        if (dim >= cap_)
            throw EhrenfestOverflow("state reached the top quarter of the capped number basis",
                                    t_now);
        dim = std::min(cap_, 2 * dim);
    }
}

FockState GrowingPropagator::evolve(const FockState& psi0, double t, double max_dt) {
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / max_dt)));
    FockState psi = psi0;
    for (int s = 0; s < steps; ++s) psi = step(psi, t * s / steps, t / steps);
    return psi;
}

FockState propagate_auto(const NormalFormCoefficients& coeffs, const FockState& psi0, double t,
                         int min_dim, int cap) {
    GrowingPropagator prop(coeffs, psi0.hbar, min_dim, cap);
    return prop.evolve(psi0, t);
}

cplx BivariatePoly::operator()(double t, double hbar) const {
    cplx sum(0.0, 0.0);
    for (const auto& [pq, c] : terms) sum += c * std::pow(t, pq.first) * std::pow(hbar, pq.second);
    return sum;
}

int BivariatePoly::t_degree() const {
    int d = 0;
    for (const auto& kv : terms) d = std::max(d, kv.first.first);
    return d;
}

int BivariatePoly::lowest_hbar_power(double tol) const {
    int best = -1;
    for (const auto& [pq, c] : terms)
        if (std::abs(c) > tol && (best < 0 || pq.second < best)) best = pq.second;
    return best;
}

std::map<int, int> DysonExpansion::hbar_orders() const {
    std::map<int, int> out;
    for (const auto& [m, poly] : coefficients) {
        const int p = poly.lowest_hbar_power();
        if (p >= 0) out[m] = p;
    }
    return out;
}

FockState DysonExpansion::inner_state(double t, int dim) const {
    FockState s = FockState::basis(0, dim, hbar);
    for (const auto& [m, poly] : coefficients) {
        if (2 * m >= dim) throw InvalidDimension("dimension too small for the Dyson coefficients");
        s.coeffs[2 * m] += poly(t, hbar);
    }
    return s;
}

FockState DysonExpansion::reconstruct(double t, int dim) const {
    return fock::dilate(t * coeffs.q_at(1, hbar), inner_state(t, dim));
}

DysonExpansion dyson_expand(const NormalFormCoefficients& coeffs, double hbar, int l) {
    if (l < 1 || l > kMaxDysonOrder) throw UnsupportedOrder("Dyson order must lie in [1, 4]");
    if (coeffs.N() > 4) throw UnsupportedOrder("Dyson expansion supports N <= 4");
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    DysonExpansion out;
    out.l = l;
    out.hbar = hbar;
    out.coeffs = coeffs;

    const int n = coeffs.N();
    const int dim = 2 * n * (l + 2) + 8;
    std::vector<BandedOperator> w;  // hbar-free Op((x xi)^alpha)
    for (int alpha = 1; alpha <= n; ++alpha) w.push_back(fock::weyl_power_xxi(alpha, 1.0, dim).first);

    // (hbar^{-1} Q_nq)^j phi_0 as a polynomial in hbar with vector coefficients.
    std::map<int, Eigen::VectorXcd> vec;
    vec[0] = Eigen::VectorXcd::Zero(dim);
    vec[0][0] = 1.0;
    auto apply_qnq = [&](const std::map<int, Eigen::VectorXcd>& in) {
        std::map<int, Eigen::VectorXcd> next;
        for (const auto& [h, v] : in) {
            for (int alpha = 2; alpha <= n; ++alpha) {
                const auto& qa = coeffs.q[alpha - 1];
                Eigen::VectorXcd wv;
                for (std::size_t i = 0; i < qa.size(); ++i) {
                    if (qa[i] == 0.0) continue;
                    if (wv.size() == 0) wv = w[alpha - 1].apply(v);
                    const int power = h + alpha + static_cast<int>(i) - 1;
                    auto it = next.find(power);
                    if (it == next.end()) it = next.emplace(power, Eigen::VectorXcd::Zero(dim)).first;
                    it->second += qa[i] * wv;
                }
            }
        }
        return next;
    };

    double factorial = 1.0;
    cplx minus_i_pow(1.0, 0.0);
    for (int j = 1; j <= l; ++j) {
        vec = apply_qnq(vec);
        factorial *= j;
        minus_i_pow *= cplx(0.0, -1.0);
        for (const auto& [h, v] : vec) {
            for (int idx = 0; idx < dim; idx += 2) {
                if (std::abs(v[idx]) < 1e-300) continue;
                auto& poly = out.coefficients[idx / 2];
                poly.terms[{j, h}] += minus_i_pow * v[idx] / factorial;
            }
        }
    }
    for (auto it = out.coefficients.begin(); it != out.coefficients.end();) {
        auto& terms = it->second.terms;
        for (auto t = terms.begin(); t != terms.end();) {
            if (std::abs(t->second) < 1e-15)
                t = terms.erase(t);
            else
                ++t;
        }
        it = terms.empty() ? out.coefficients.erase(it) : std::next(it);
    }

    // C_l = || (hbar^{-1} Q_nq)^{l+1} phi_0 || / ((l+1)! hbar^{l+1}) at this hbar
    const auto next = apply_qnq(vec);
    Eigen::VectorXcd total = Eigen::VectorXcd::Zero(dim);
    for (const auto& [h, v] : next) total += std::pow(hbar, h) * v;
    out.remainder_bound = total.norm() / (factorial * (l + 1) * std::pow(hbar, l + 1));
    return out;
}

LocalizationReport localization_mass(const FockState& state, double epsilon_prime, double hbar,
                                     double t) {
    LocalizationReport rep;
    rep.epsilon_prime = epsilon_prime;
    rep.t = t;
    rep.box_halfwidth = std::pow(hbar, epsilon_prime / 3.0);
    FockState s = state;
    s.hbar = hbar;
    const double inside = husimi::fock_box_mass(s, rep.box_halfwidth) / s.norm_sq();
    rep.outside_mass = std::clamp(1.0 - inside, 0.0, 1.0);
    return rep;
}

double ehrenfest_time(double epsilon_prime, double lambda, double hbar) {
    if (!(epsilon_prime >= 0.0 && epsilon_prime < 1.0))
        throw DomainError("epsilon_prime must lie in [0, 1)");
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    if (!(hbar > 0.0 && hbar < 1.0)) throw DomainError("hbar must lie in (0, 1)");
    return (1.0 - epsilon_prime) * std::abs(std::log(hbar)) / (2.0 * lambda);
}

}  // namespace scarforge::qnf
