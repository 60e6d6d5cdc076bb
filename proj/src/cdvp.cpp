#include "scarforge/errors.hpp"
#include "scarforge/quasimode.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

namespace scarforge::quasimode {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// |y|^mu sum_k binom(mu, 2k) (2k - 1)!! y^{-2k}
cplx smoothed_power_asymptotic(double y, cplx mu) {
    const double inv2 = 1.0 / (y * y);
    cplx binom = 1.0;  // binom(mu, j)
    double dfact = 1.0;  // (2k - 1)!!
    double ypow = 1.0;
    cplx sum = 1.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        const int j = 2 * k - 2;
        binom *= (mu - static_cast<double>(j)) / static_cast<double>(j + 1);
        binom *= (mu - static_cast<double>(j + 1)) / static_cast<double>(j + 2);
        dfact *= 2 * k - 1;
        ypow *= inv2;
        const cplx term = binom * dfact * ypow;
        const double mag = std::abs(term);
        if (mag > last) break;
        sum += term;
        last = mag;
        if (mag < 1e-18 * std::abs(sum)) break;
    }
    return std::exp(mu * std::log(std::abs(y))) * sum;
}

}  // namespace

cplx smoothed_power(double y, double theta) {
    const cplx mu(-0.5, theta);
    if (std::abs(y) >= 12.0) return smoothed_power_asymptotic(y, mu);
    // int_0^inf u^mu [pdf(y - u) + pdf(y + u)] du in s = log u
    using GL = boost::math::quadrature::gauss<double, 10>;
    const auto& nodes = GL::abscissa();
    const auto& weights = GL::weights();
    const double s_lo = -40.0, s_hi = std::log(std::abs(y) + 10.0);
    const cplx mu1 = mu + 1.0;
    cplx sum = 2.0 * normal_pdf(y) * std::exp(mu1 * s_lo) / mu1;
    const int panels = static_cast<int>(std::ceil((s_hi - s_lo) / 0.05));
    const double w = (s_hi - s_lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = s_lo + (p + 0.5) * w;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            for (int sgn : {-1, 1}) {
                if (nodes[i] == 0.0 && sgn == 1) continue;
                const double s = mid + sgn * 0.5 * w * nodes[i];
                const double u = std::exp(s);
                sum += 0.5 * w * weights[i] * std::exp(mu1 * s) * (normal_pdf(y - u) + normal_pdf(y + u));
            }
        }
    }
    return sum;
}

CdvpState cdvp_state(double theta, double hbar, double cutoff_radius, int grid_size, double q1) {
    if (std::abs(theta) > 5.0) throw DomainError("cdvp_state supports |theta| <= 5");
    if (!(hbar > 0.0 && hbar < 1.0)) throw DomainError("hbar must lie in (0, 1)");
    if (!(cutoff_radius > 0.0)) throw DomainError("cutoff radius must be positive");
    const double sigma = hbar / cutoff_radius;
    const double x_c = 0.25 * sigma;
    const double x_max = 8.0 * cutoff_radius;
    const double u_max = std::asinh(x_max / x_c);
    const double du_target = 0.01;
    if (grid_size == 0) grid_size = 2 * static_cast<int>(std::ceil(u_max / du_target)) + 1;
    const double du = 2.0 * u_max / (grid_size - 1);
    if (grid_size < 65 || du * (1.0 + std::abs(theta)) > 0.1)
        throw ResolutionError("grid cannot resolve the log-scale oscillation of |x|^{i theta}",
                              2 * static_cast<long>(std::ceil(u_max * (1.0 + std::abs(theta)) / 0.1)) + 1);

    CdvpState st;
    st.theta = theta;
    st.hbar = hbar;
    st.radius = cutoff_radius;
    st.q1 = q1;
    const int n = grid_size;
    st.x.resize(n);
    st.values.resize(n);
    st.weights.resize(n);
    const cplx mu(-0.5, theta);
    const cplx sigma_mu = std::exp(mu * std::log(sigma));
    Eigen::VectorXd u(n), jac(n);
    for (int i = 0; i < n; ++i) {
        u[i] = -u_max + i * du;
        st.x[i] = x_c * std::sinh(u[i]);
        jac[i] = x_c * std::cosh(u[i]);
        st.weights[i] = du * jac[i] * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
        const double s = st.x[i] / cutoff_radius;
        st.values[i] = std::exp(-0.5 * s * s) * sigma_mu * smoothed_power(st.x[i] / sigma, theta);
    }

    // x d/dx = tanh(u) d/du, eighth-order central differences
    static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    auto at = [&](int i) { return (i < 0 || i >= n) ? cplx(0.0) : st.values[i]; };
    double res_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        cplx d(0.0);
        for (int k = 1; k <= 4; ++k) d += c[k - 1] * (at(i + k) - at(i - k));
        d /= du;
        const cplx r = std::tanh(u[i]) * d + cplx(0.5, -theta) * st.values[i];
        res_sq += st.weights[i] * std::norm(r);
    }
    st.norm_sq = (st.weights.array() * st.values.array().abs2()).sum();
    st.width = hbar * q1 * std::sqrt(res_sq / st.norm_sq);
    return st;
}

}  // namespace scarforge::quasimode
