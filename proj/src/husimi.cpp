#include "scarforge/husimi.hpp"

#include "fftw_plan.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

namespace scarforge::husimi {

namespace {

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Integral of |F|^2 over the four corner arcs, F(phi) = sum_m a_m e^{-i m phi}.
class ArcIntegrator {
public:
    explicit ArcIntegrator(int p) : fft_(p, FFTW_FORWARD) {}

    int size() const { return fft_.size(); }

    // a: (m, a_m) pairs; arcs centred at odd multiples of pi/4 with half-length h.
    double integrate(const std::vector<std::pair<int, double>>& a, const std::vector<std::complex<double>>& phase,
                     double half) {
        auto& buf = fft_.buffer();
        const int p = fft_.size();
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t i = 0; i < a.size(); ++i) buf[a[i].first % p] += a[i].second * phase[i];
        fft_.execute();
        for (auto& v : buf) v = std::norm(v);
        fft_.execute();
        // buf[r] = P g_r with |F|^2 = sum_k g_k e^{i k phi}, k taken mod P.
        double total = 0.0;
        for (int r = 0; r < p; ++r) {
            const int k = r <= p / 2 ? r : r - p;
            const std::complex<double> g = buf[r] / static_cast<double>(p);
            if (k == 0) {
                total += g.real() * 8.0 * half;
                continue;
            }
            // int over the four arcs of e^{i k phi}
            std::complex<double> centres(0.0, 0.0);
            for (int q = 0; q < 4; ++q)
                centres += std::polar(1.0, k * (2 * q + 1) * std::numbers::pi / 4.0);
            total += (g * centres).real() * 2.0 * std::sin(k * half) / k;
        }
        return total;
    }

private:
    detail::FftPlan fft_;
};

}  // namespace

double fock_box_mass(const fock::FockState& state, double halfwidth) {
    const int dim = state.dim();
    const double big_b = halfwidth / std::sqrt(2.0 * state.hbar);
    const double b2 = big_b * big_b;

    // Indices beyond rho_max^2 + 40 rho_max carry Husimi weight below e^{-400} in the box.
    const double rho_max = std::sqrt(2.0) * big_b;
    const int m_relevant = static_cast<int>(std::min<double>(
        dim - 1, rho_max * rho_max + 40.0 * rho_max + 100.0));

    std::vector<int> support;
    std::vector<double> log_abs;
    std::vector<std::complex<double>> phase;
    for (int m = 0; m <= m_relevant; ++m) {
        const double a = std::abs(state.coeffs[m]);
        if (a == 0.0) continue;
        support.push_back(m);
        log_abs.push_back(std::log(a) - 0.5 * std::lgamma(m + 1.0));
        phase.push_back(state.coeffs[m] / a);
    }

    double disk = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i)
        disk += std::norm(state.coeffs[support[i]]) * boost::math::gamma_p(support[i] + 1.0, b2);

    // Corner region B < rho < sqrt(2) B, rho = B + (sqrt2 - 1) B u^2.
    const double span = (std::sqrt(2.0) - 1.0) * big_b;
    const int panels = std::max(4, static_cast<int>(std::ceil(8.0 * span)));
    using GL = boost::math::quadrature::gauss<double, 10>;
    const auto& nodes = GL::abscissa();
    const auto& weights = GL::weights();

    std::vector<double> rhos, rho_w;
    for (int p = 0; p < panels; ++p) {
        const double u0 = static_cast<double>(p) / panels, u1 = static_cast<double>(p + 1) / panels;
        const double mid = 0.5 * (u0 + u1), half = 0.5 * (u1 - u0);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            for (int sgn : {-1, 1}) {
                if (nodes[i] == 0.0 && sgn == 1) continue;
                const double u = mid + sgn * half * nodes[i];
                rhos.push_back(big_b + span * u * u);
                rho_w.push_back(weights[i] * half * 2.0 * span * u);
            }
        }
    }

    double corners = 0.0;
    std::vector<std::pair<int, double>> amps;
    std::vector<std::complex<double>> amp_phase;
    std::unique_ptr<ArcIntegrator> arc;
    for (std::size_t r = 0; r < rhos.size(); ++r) {
        const double rho = rhos[r];
        const double c = big_b / rho;
        if (c >= 1.0) continue;
        const double half = 0.5 * (std::asin(std::min(c, 1.0)) - std::acos(std::min(c, 1.0)));
        if (half <= 0.0) continue;
        const double lr = std::log(rho), base = -0.5 * rho * rho;
        double lmax = -1e300;
        for (std::size_t i = 0; i < support.size(); ++i)
            lmax = std::max(lmax, log_abs[i] + support[i] * lr + base);
        if (lmax < -400.0) continue;
        amps.clear();
        amp_phase.clear();
        int m_lo = dim, m_hi = 0;
        for (std::size_t i = 0; i < support.size(); ++i) {
            const double l = log_abs[i] + support[i] * lr + base;
            if (l < lmax - 45.0) continue;
            amps.emplace_back(support[i], std::exp(l));
            amp_phase.push_back(phase[i]);
            m_lo = std::min(m_lo, support[i]);
            m_hi = std::max(m_hi, support[i]);
        }
        const int p = next_pow2(std::max(64, 2 * (m_hi - m_lo) + 64));
        if (!arc || arc->size() != p) arc = std::make_unique<ArcIntegrator>(p);
        for (auto& am : amps) am.first -= m_lo;
        corners += rho_w[r] * rho * arc->integrate(amps, amp_phase, half);
    }
    return disk + corners / std::numbers::pi;
}

}  // namespace scarforge::husimi
