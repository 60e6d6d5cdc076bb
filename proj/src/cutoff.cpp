#include "scarforge/cutoff.hpp"

#include "scarforge/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace scarforge::quasimode {

namespace {

using GL = boost::math::quadrature::gauss<double, 20>;

void require_grid(int n) {
    if (n < 9) throw InvalidDimension("cutoff grid needs at least 9 nodes");
}

double bump(double s, double eta) {
    const double r = s / eta;
    if (std::abs(r) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r * r));
}

double trapezoid_sq(const Eigen::VectorXd& f, double h) {
    const Eigen::Index n = f.size();
    double sum = f.squaredNorm() - 0.5 * (f[0] * f[0] + f[n - 1] * f[n - 1]);
    return sum * h;
}

// integral of fn over [a, b] split into `panels` Gauss-Legendre panels
template <class F>
double gl_panels(F&& fn, double a, double b, int panels) {
    if (b <= a) return 0.0;
    double sum = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        sum += GL::integrate(fn, lo, lo + w);
    }
    return sum;
}

// 1 for |u| <= a, 0 for |u| >= b, C^inf in between.
double smooth_step(double u, double a, double b, double* deriv) {
    const double x = std::abs(u);
    if (x <= a) {
        *deriv = 0.0;
        return 1.0;
    }
    if (x >= b) {
        *deriv = 0.0;
        return 0.0;
    }
    const double s = (x - a) / (b - a);
    const double f = std::exp(-1.0 / (1.0 - s));
    const double g = std::exp(-1.0 / s);
    const double df = -f / ((1.0 - s) * (1.0 - s));
    const double dg = g / (s * s);
    const double v = f / (f + g);
    const double dv = (df * (f + g) - f * (df + dg)) / ((f + g) * (f + g)) / (b - a);
    *deriv = u < 0 ? -dv : dv;
    return v;
}

}  // namespace

CutoffFunction::CutoffFunction(Eigen::VectorXd values, Eigen::VectorXd derivatives, std::string kind)
    : values_(std::move(values)), derivatives_(std::move(derivatives)), kind_(std::move(kind)) {
    require_grid(size());
    if (derivatives_.size() != values_.size())
        throw InvalidDimension("cutoff value and derivative grids differ");
    if (values_.minCoeff() < -1e-12 || values_.maxCoeff() > 1.0 + 1e-12)
        throw DomainError("cutoff values must lie in [0, 1]");
}

CutoffFunction CutoffFunction::indicator_of(int grid_size, double a) {
    require_grid(grid_size);
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("indicator half-length must lie in (0, 1]");
    Eigen::VectorXd v(grid_size);
    const double h = 2.0 / (grid_size - 1);
    for (int i = 0; i < grid_size; ++i) v[i] = std::abs(-1.0 + i * h) <= a ? 1.0 : 0.0;
    CutoffFunction c(v, Eigen::VectorXd::Zero(grid_size), "indicator");
    c.sharp_ = true;
    c.jump_ = a;
    return c;
}

double CutoffFunction::value(double t) const {
    if (sharp_) return std::abs(t) <= jump_ ? 1.0 : 0.0;
    if (t <= -1.0 || t >= 1.0) return (t == -1.0 || t == 1.0) ? values_[t < 0 ? 0 : size() - 1] : 0.0;
    const double h = step();
    const double pos = (t + 1.0) / h;
    const int i = std::min(static_cast<int>(pos), size() - 2);
    const double s = pos - i;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * values_[i] + h10 * h * derivatives_[i] + h01 * values_[i + 1] +
           h11 * h * derivatives_[i + 1];
}

double CutoffFunction::derivative(double t) const {
    if (sharp_ || t < -1.0 || t > 1.0) return 0.0;
    const double h = step();
    const double pos = (t + 1.0) / h;
    const int i = std::clamp(static_cast<int>(pos), 0, size() - 2);
    const double s = pos - i;
    const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -d00, d11 = 3 * s * s - 2 * s;
    return (d00 * values_[i] + d01 * values_[i + 1]) / h + d10 * derivatives_[i] +
           d11 * derivatives_[i + 1];
}

double CutoffFunction::norm_sq() const {
    if (sharp_) return 2.0 * jump_;
    return trapezoid_sq(values_, step());
}

double CutoffFunction::derivative_norm_sq() const {
    if (sharp_) return std::numeric_limits<double>::infinity();
    return trapezoid_sq(derivatives_, step());
}

double CutoffFunction::rayleigh_quotient() const {
    return std::sqrt(derivative_norm_sq() / norm_sq());
}

bool CutoffFunction::compactly_supported(double tol) const {
    const int n = size();
    return std::abs(values_[0]) <= tol && std::abs(values_[n - 1]) <= tol &&
           std::abs(derivatives_[0]) <= tol && std::abs(derivatives_[n - 1]) <= tol;
}

CutoffFunction cosine_arch(int grid_size) {
    require_grid(grid_size);
    Eigen::VectorXd v(grid_size), d(grid_size);
    const double h = 2.0 / (grid_size - 1);
    const double k = std::numbers::pi / 2.0;
    for (int i = 0; i < grid_size; ++i) {
        const double t = -1.0 + i * h;
        v[i] = std::max(0.0, std::cos(k * t));
        d[i] = -k * std::sin(k * t);
    }
    v[0] = v[grid_size - 1] = 0.0;
    return {v, d, "cosine_arch"};
}

CutoffFunction steep_cutoff(int grid_size, double ramp) {
    require_grid(grid_size);
    if (!(ramp > 0.0 && ramp < 1.0)) throw DomainError("ramp width must lie in (0, 1)");
    Eigen::VectorXd v(grid_size), d(grid_size);
    const double h = 2.0 / (grid_size - 1);
    for (int i = 0; i < grid_size; ++i) {
        const double t = -1.0 + i * h;
        const double x = 1.0 - std::abs(t);
        if (x >= ramp) {
            v[i] = 1.0;
            d[i] = 0.0;
        } else {
            v[i] = x / ramp;
            d[i] = (t > 0 ? -1.0 : 1.0) / ramp;
        }
    }
    return {v, d, "steep"};
}

CutoffFunction smooth_plateau(int grid_size, double a, double b) {
    require_grid(grid_size);
    if (!(a >= 0.0 && a < b && b <= 1.0)) throw DomainError("plateau requires 0 <= a < b <= 1");
    Eigen::VectorXd v(grid_size), d(grid_size);
    const double h = 2.0 / (grid_size - 1);
    for (int i = 0; i < grid_size; ++i) v[i] = smooth_step(-1.0 + i * h, a, b, &d[i]);
    return {v, d, "smooth_plateau"};
}

CutoffFunction mollified_arch(int grid_size, double delta) {
    require_grid(grid_size);
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("shrink must lie in (0, 1)");
    const double h = 2.0 / (grid_size - 1);
    const double eta = 0.5 * delta;
    if (eta < 8.0 * h)
        throw ResolutionError("mollifier radius below 8 grid steps",
                              static_cast<long>(std::ceil(32.0 / delta)) + 1);
    const double L = 1.0 - delta;
    const double k = std::numbers::pi / (2.0 * L);
    const double z = gl_panels([&](double s) { return bump(s, eta); }, -eta, eta, 8);

    Eigen::VectorXd v = Eigen::VectorXd::Zero(grid_size), d = Eigen::VectorXd::Zero(grid_size);
    const int half = (grid_size - 1) / 2;
    for (int i = 0; i <= half; ++i) {
        const double t = -1.0 + i * h;
        if (t <= -L - eta) continue;
        // pieces of [-eta, eta] on which g(t - s) is smooth
        double cuts[4] = {-eta, std::clamp(t - L, -eta, eta), std::clamp(t + L, -eta, eta), eta};
        double val = 0.0, der = 0.0;
        for (int p = 0; p < 3; ++p) {
            const double lo = cuts[p], hi = cuts[p + 1];
            if (hi <= lo) continue;
            const double mid = 0.5 * (lo + hi);
            if (std::abs(t - mid) >= L) continue;
            val += gl_panels([&](double s) { return std::cos(k * (t - s)) * bump(s, eta); }, lo, hi, 3);
            der += gl_panels([&](double s) { return -k * std::sin(k * (t - s)) * bump(s, eta); }, lo,
                             hi, 3);
        }
        v[i] = std::clamp(val / z, 0.0, 1.0);
        d[i] = der / z;
    }
    for (int i = 0; i < grid_size - 1 - i; ++i) {
        v[grid_size - 1 - i] = v[i];
        d[grid_size - 1 - i] = -d[i];
    }
    if (grid_size % 2) d[half] = 0.0;
    CutoffFunction c(v, d, "mollified_arch");
    c.shrink = delta;
    c.mollifier_radius = eta;
    return c;
}

CutoffFunction optimize_cutoff(double epsilon_prime, int grid_size) {
    if (!(epsilon_prime > 0.0)) throw DomainError("epsilon_prime must be positive");
    require_grid(grid_size);
    const double target = 0.5 * std::numbers::pi * (1.0 + epsilon_prime);
    const double h = 2.0 / (grid_size - 1);
    const double delta_min = 16.0 * h * 1.0000001;
    const double delta_max = 0.9;
    // shrink from the unmollified arch; the mollifier only lowers the quotient further
    const double delta_guess = std::min(delta_max, epsilon_prime / (1.0 + epsilon_prime));
    auto quotient = [&](double delta) { return mollified_arch(grid_size, delta).rayleigh_quotient(); };

    if (delta_min >= delta_max || quotient(delta_min) > target)
        throw ResolutionError("cutoff grid too coarse for the requested epsilon_prime",
                              static_cast<long>(std::ceil(32.0 / delta_guess)) + 1);
    if (quotient(delta_max) <= target) return mollified_arch(grid_size, delta_max);

    double lo = delta_min, hi = delta_max;
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (quotient(mid) <= target ? lo : hi) = mid;
    }
    return mollified_arch(grid_size, lo);
}

}  // namespace scarforge::quasimode
