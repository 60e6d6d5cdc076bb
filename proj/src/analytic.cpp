#include "scarforge/analytic.hpp"

#include "scarforge/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace scarforge::analytic {

namespace {

using boost::multiprecision::cpp_rational;
// (sinh power, cosh^{-1/2} power) -> coefficient
using Poly = std::map<std::pair<int, int>, cpp_rational>;

void add_term(Poly& p, int j, int k, const cpp_rational& c) {
    if (c == 0) return;
    auto& slot = p[{j, k}];
    slot += c;
    if (slot == 0) p.erase({j, k});
}

Poly derivative(const Poly& p) {
    Poly out;
    for (const auto& [jk, c] : p) {
        const auto [j, k] = jk;
        if (j > 0) add_term(out, j - 1, k - 2, c * j);
        add_term(out, j + 1, k + 2, -c * cpp_rational(k, 2));
    }
    return out;
}

Poly reflect(const Poly& p) {
    Poly out;
    for (const auto& [jk, c] : p) out[jk] = (jk.first % 2) ? cpp_rational(-c) : c;
    return out;
}

// P_{a,b} for fixed a, b = 0, 2, ..., b_max given P_{a,0}.
std::vector<Poly> ladder_in_b(const Poly& p_a0, int b_max) {
    std::vector<Poly> chain{p_a0};
    for (int b = 0; b + 2 <= b_max; b += 2) {
        Poly next = derivative(chain.back());
        for (auto& kv : next) kv.second *= 2;
        if (b >= 2)
            for (const auto& [jk, c] : chain[chain.size() - 2])
                add_term(next, jk.first, jk.second, c * b * (b - 1));
        chain.push_back(std::move(next));
    }
    return chain;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

double OverlapKernel::operator()(double beta) const {
    if (parity_zero) return 0.0;
    const double ch = std::cosh(beta);
    const double th = std::tanh(beta);
    double sum = 0.0;
    for (const auto& t : terms)
        sum += t.coeff * std::pow(th, t.sinh_power) *
               std::pow(ch, 0.5 * (2 * t.sinh_power - t.cosh_half_power));
    return sum;
}

std::string OverlapKernel::expression() const {
    if (parity_zero) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& t : terms) {
        os << (first ? "" : " + ") << t.coeff;
        if (t.sinh_power) os << "*sinh^" << t.sinh_power;
        os << "*cosh^(-" << t.cosh_half_power << "/2)";
        first = false;
    }
    return os.str();
}

OverlapKernel overlap_kernel(int m1, int m2) {
    if (m1 < 0 || m2 < 0 || m1 > kMaxOverlapIndex || m2 > kMaxOverlapIndex)
        throw DomainError("overlap indices must lie in [0, 12]");
    OverlapKernel kernel;
    kernel.m1 = m1;
    kernel.m2 = m2;
    if (m1 % 2 || m2 % 2) {
        kernel.parity_zero = true;
        return kernel;
    }
    Poly p00;
    p00[{0, 1}] = 1;
    const Poly p0a = ladder_in_b(p00, m1).back();
    const Poly pb = ladder_in_b(reflect(p0a), m2).back();
    const double norm = 1.0 / std::sqrt(factorial(m1) * factorial(m2));
    for (const auto& [jk, c] : pb)
        kernel.terms.push_back({static_cast<double>(c) * norm, jk.first, jk.second});
    return kernel;
}

std::complex<double> log_gamma(std::complex<double> z) {
    // Godfrey's coefficients, g = 607/128, 15 terms.
    static const double g = 607.0 / 128.0;
    static const double c[15] = {
        0.99999999999999709182,   57.156235665862923517,    -59.597960355475491248,
        14.136097974741747174,    -0.49191381609762019978,  .33994649984811888699e-4,
        .46523628927048575665e-4, -.98374475304879564677e-4, .15808870322491248884e-3,
        -.21026444172410488319e-3, .21743961811521264320e-3, -.16431810653676389022e-3,
        .84418223983852743293e-4, -.26190838401581408670e-4, .36899182659531622704e-5};
    std::complex<double> shift(0.0, 0.0);
    while (z.real() < 0.5) {
        shift -= std::log(z);
        z += 1.0;
    }
    z -= 1.0;
    std::complex<double> x = c[0];
    for (int i = 1; i < 15; ++i) x += c[i] / (z + static_cast<double>(i));
    const std::complex<double> t = z + g + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x) +
           shift;
}

double s1(double q1, double theta) {
    if (!(q1 > 0.0)) throw DomainError("s1 requires q1 > 0");
    const double lg = log_gamma({0.25, theta / (2.0 * q1)}).real();
    return std::exp(2.0 * lg) / (q1 * std::sqrt(2.0 * std::numbers::pi));
}

double s1_quadrature(double q1, double theta, double tol) {
    if (!(q1 > 0.0)) throw DomainError("s1 requires q1 > 0");
    const double r_max = 2.0 * std::log(1.0 / tol) / q1 + 10.0;
    auto f = [&](double r) { return std::cos(r * theta) / std::sqrt(std::cosh(q1 * r)); };
    // Panels of roughly one oscillation keep the adaptive rule well conditioned.
    const int panels = std::max(8, static_cast<int>(std::ceil(r_max * (1.0 + std::abs(theta)))));
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = r_max * i / panels, b = r_max * (i + 1) / panels;
        sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 5, tol);
    }
    return 2.0 * sum;
}

S2S3 s2_s3(double q1) {
    if (!(q1 > 0.0)) throw DomainError("s2_s3 requires q1 > 0");
    const double r_max = 2.0 * std::log(1e15) / q1 + 10.0;
    auto w = [&](double r) { return 1.0 / std::sqrt(std::cosh(q1 * r)); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double i1 = GK::integrate([&](double r) { return r * w(r); }, 0.0, r_max, 15, 1e-14);
    const double i2 = GK::integrate([&](double r) { return r * r * w(r); }, 0.0, r_max, 15, 1e-14);
    return {4.0 * i1, i2};
}

S2S3 s2_s3_alternate(double q1) {
    if (!(q1 > 0.0)) throw DomainError("s2_s3 requires q1 > 0");
    // cosh^{-1/2} written in overflow-free form for the infinite range
    auto w = [&](double r) {
        const double a = q1 * r;
        return std::sqrt(2.0) * std::exp(-0.5 * a) / std::sqrt(1.0 + std::exp(-2.0 * a));
    };
    boost::math::quadrature::exp_sinh<double> rule;
    const double i1 = rule.integrate([&](double r) { return r * w(r); }, 1e-14);
    const double i2 = rule.integrate([&](double r) { return r * r * w(r); }, 1e-14);
    return {4.0 * i1, i2};
}

Eigen::VectorXd hermite_position(int m, double hbar, const Eigen::VectorXd& x) {
    if (m < 0 || m > 64) throw DomainError("hermite_position supports 0 <= m <= 64");
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    Eigen::VectorXd out(x.size());
    const double pref = std::pow(std::numbers::pi * hbar, -0.25);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double y = x[i] / std::sqrt(hbar);
        double prev = 0.0;
        double cur = pref * std::exp(-0.5 * y * y);
        for (int n = 0; n < m; ++n) {
            const double next = std::sqrt(2.0 / (n + 1.0)) * y * cur - std::sqrt(n / (n + 1.0)) * prev;
            prev = cur;
            cur = next;
        }
        out[i] = cur;
    }
    return out;
}

}  // namespace scarforge::analytic
