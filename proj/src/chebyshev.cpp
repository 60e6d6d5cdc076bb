#include "scarforge/chebyshev.hpp"

#include "scarforge/errors.hpp"

#include <cmath>

namespace scarforge {

std::vector<double> bessel_j_sequence(double z, int kmax) {
    std::vector<double> j(kmax + 1, 0.0);
    if (z < 0.0) throw DomainError("bessel_j_sequence expects z >= 0");
    if (z < 1e-300) {
        j[0] = 1.0;
        return j;
    }
    int start = static_cast<int>(std::max<double>(kmax, z) + 30.0 + 10.0 * std::cbrt(z));
    if (start % 2) ++start;
    std::vector<double> tmp(start + 2, 0.0);
    tmp[start + 1] = 0.0;
    tmp[start] = 1e-300;
    for (int k = start; k >= 1; --k) {
        tmp[k - 1] = (2.0 * k / z) * tmp[k] - tmp[k + 1];
        if (std::abs(tmp[k - 1]) > 1e250) {
            for (int m = k - 1; m <= start; ++m) tmp[m] *= 1e-250;
        }
    }
    double norm = tmp[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * tmp[k];
    for (int k = 0; k <= kmax; ++k) j[k] = tmp[k] / norm;
    return j;
}

ChebyshevPropagator::ChebyshevPropagator(const BandedOperator& h, double max_phase_per_step)
    : h_(h), max_phase_(max_phase_per_step) {
    auto [lo, hi] = h_.gershgorin_bounds();
    centre_ = 0.5 * (lo + hi);
    half_width_ = 0.5 * (hi - lo) * 1.01 + 1e-300;
}

Eigen::VectorXcd ChebyshevPropagator::apply(const Eigen::VectorXcd& v, double tau) const {
    if (tau == 0.0) return v;
    const double phase = std::abs(tau) * half_width_;
    const int pieces = std::max(1, static_cast<int>(std::ceil(phase / max_phase_)));
    Eigen::VectorXcd out = v;
    for (int p = 0; p < pieces; ++p) out = single_step(out, tau / pieces);
    return out;
}

Eigen::VectorXcd ChebyshevPropagator::single_step(const Eigen::VectorXcd& v, double tau) const {
    const int n = static_cast<int>(v.size());
    const double z = std::abs(tau) * half_width_;
    const int kmax = static_cast<int>(z + 20.0 * std::cbrt(z) + 40.0);
    const std::vector<double> jz = bessel_j_sequence(z, kmax);
    // (-i sign(tau))^k
    const cplx unit = tau >= 0.0 ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
    const double inv_r = 1.0 / half_width_;

    Eigen::VectorXcd t0 = v, t1(n), t2(n), hv(n);
    Eigen::VectorXcd acc = jz[0] * v;

    h_.apply(t0, hv);
    t1 = (hv - centre_ * t0) * inv_r;
    cplx coef = unit;
    acc += 2.0 * jz[1] * coef * t1;

    for (int k = 2; k <= kmax; ++k) {
        h_.apply(t1, hv);
        t2 = 2.0 * inv_r * (hv - centre_ * t1) - t0;
        coef *= unit;
        acc += (2.0 * jz[k]) * coef * t2;
        std::swap(t0, t1);
        std::swap(t1, t2);
        if (k > z && std::abs(jz[k]) < 1e-18) break;
    }
    return std::exp(cplx(0.0, -tau * centre_)) * acc;
}

}  // namespace scarforge
