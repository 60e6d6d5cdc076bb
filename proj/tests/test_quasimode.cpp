#include "doctest.h"

#include "scarforge/analytic.hpp"
#include "scarforge/cutoff.hpp"
#include "scarforge/errors.hpp"
#include "scarforge/qnf.hpp"
#include "scarforge/quasimode.hpp"

#include <cmath>
#include <numbers>

using namespace scarforge;
using namespace scarforge::quasimode;
using qnf::NormalFormCoefficients;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Composite Simpson on the interpolant, independent of the trapezoid sums in CutoffFunction.
double simpson_quotient(const CutoffFunction& chi, int n = 40000) {
    double a = 0.0, b = 0.0;
    const double h = 2.0 / n;
    for (int i = 0; i <= n; ++i) {
        const double t = -1.0 + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        a += w * chi.value(t) * chi.value(t);
        b += w * chi.derivative(t) * chi.derivative(t);
    }
    return std::sqrt(b / a);
}

}  // namespace

TEST_CASE("cutoff Rayleigh quotients") {
    CHECK(std::abs(cosine_arch(4097).rayleigh_quotient() - kHalfPi) < 1e-6);
    CHECK(steep_cutoff(4097, 0.02).rayleigh_quotient() > 5.0);
    for (double eps : {0.05, 0.1, 0.3}) {
        const auto chi = optimize_cutoff(eps);
        CHECK(chi.rayleigh_quotient() <= kHalfPi * (1.0 + eps));
        CHECK(simpson_quotient(chi) <= kHalfPi * (1.0 + eps) * (1.0 + 1e-6));
        CHECK(chi.compactly_supported());
        CHECK(chi.values().minCoeff() >= 0.0);
        CHECK(chi.values().maxCoeff() <= 1.0 + 1e-15);
        CHECK(chi.rayleigh_quotient() > kHalfPi);
    }
}

TEST_CASE("cutoff resolution error names the required grid") {
    try {
        optimize_cutoff(1e-4, 257);
        FAIL("expected a resolution error");
    } catch (const ResolutionError& e) {
        CHECK(e.required_size() > 257);
    }
    CHECK_THROWS_AS(optimize_cutoff(0.0), DomainError);
}

TEST_CASE("quasimode norm and width on the quadratic model") {
    const auto chi = optimize_cutoff(0.1);
    for (double T : {10.0, 40.0}) {
        const auto rep = quasimode_gram(1.0, chi, T, 0.0, 1e-3);
        const double ratio = rep.norm_sq / (T * chi.norm_sq());
        CHECK(std::abs(ratio / analytic::s1(1.0, 0.0) - 1.0) < 3.0 / T);
        CHECK(std::abs(rep.width * T / 1e-3 / chi.rayleigh_quotient() - 1.0) < 1.5 / T);
    }
}

TEST_CASE("Fock route agrees with the Gram route and the IBP identity") {
    const auto chi = optimize_cutoff(0.1);
    const double h = 1e-3, T = 2.5;
    QuasimodeOptions opt;
    opt.compute_localization = false;
    const auto qm = build_quasimode(NormalFormCoefficients::quadratic(1.0), chi, T, h, opt);
    const auto g = quasimode_gram(1.0, chi, T, 0.0, h);
    CHECK(std::abs(qm.report.norm_sq / g.norm_sq - 1.0) < 1e-8);
    CHECK(std::abs(qm.report.width / g.width - 1.0) < 1e-8);
    CHECK(std::abs(qm.report.width / qm.report.ibp_width - 1.0) < 1e-6);
    CHECK(qm.state.even_supported());
}

TEST_CASE("short averaging window returns the ground state") {
    QuasimodeOptions opt;
    opt.compute_localization = false;
    const auto qm = build_quasimode(NormalFormCoefficients::quadratic(1.0), cosine_arch(513), 0.01, 1e-3, opt);
    const double overlap = std::norm(qm.state.coeffs[0]) / qm.state.norm_sq();
    CHECK(overlap > 1.0 - 1e-6);
}

TEST_CASE("detuning symmetry") {
    const auto chi = optimize_cutoff(0.1);
    const double w0 = quasimode_gram(1.0, chi, 8.0, 0.0, 1e-3).width;
    for (double th : {0.5, 1.5}) {
        const double wp = quasimode_gram(1.0, chi, 8.0, th, 1e-3).width;
        const double wm = quasimode_gram(1.0, chi, 8.0, -th, 1e-3).width;
        CHECK(std::abs(wp / wm - 1.0) < 0.01);
        CHECK(w0 <= wp);
    }
}

TEST_CASE("norm law over T") {
    const auto chi = optimize_cutoff(0.1);
    for (double T : {5.0, 10.0, 20.0, 40.0}) {
        const auto rep = quasimode_gram(1.0, chi, T, 0.0, 1e-3);
        const double dev = std::abs(rep.norm_sq / (T * analytic::s1(1.0, 0.0) * chi.norm_sq()) - 1.0);
        CHECK(dev * T <= 3.0);
    }
}

TEST_CASE("localized quasimode") {
    const double h = 1e-3, eps = 0.3;
    QuasimodeOptions opt;
    opt.epsilon_prime = eps;
    const auto qm = build_quasimode(NormalFormCoefficients::quadratic(1.0), optimize_cutoff(eps),
                                    2.0, h, opt);
    REQUIRE(qm.report.localization_computed);
    CHECK(qm.report.localization.outside_mass <= 1e-4);
}

TEST_CASE("width scan contracts") {
    const auto chi = optimize_cutoff(0.1);
    const auto c = NormalFormCoefficients::quadratic(1.0);
    CHECK_THROWS_AS(width_scan(c, 0.1, {1e-2, 1e-3}, chi), DomainError);
    CHECK_THROWS_AS(width_scan(c, 0.1, {1e-3, 1e-2, 1e-4}, chi), DomainError);
    const auto r1 = width_scan(c, 0.1, {0.1, 0.05, 0.02}, chi);
    const auto r2 = width_scan(NormalFormCoefficients::quadratic(2.0), 0.1, {0.1, 0.05, 0.02}, chi);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(r2[i].width_normalized / r1[i].width_normalized - 2.0) < 1e-4);
    CHECK(width_law_limit(1.0, 0.1) == doctest::Approx(std::numbers::pi * 1.2));
}

TEST_CASE("sharp cutoff has log^{1/2} width") {
    const auto chi = CutoffFunction::indicator_of(4097, 1.0);
    std::vector<double> w;
    for (double h : {1e-2, 1e-4, 1e-6, 1e-8}) {
        const double T = qnf::ehrenfest_time(0.1, 1.0, h);
        const auto rep = quasimode_gram(1.0, chi, T, 0.0, h);
        w.push_back(rep.width * std::sqrt(std::abs(std::log(h))) / h);
    }
    CHECK(w.back() / w.front() < 1.3);
    CHECK(w.back() / w.front() > 1.0 / 1.3);
}

TEST_CASE("smoothed power") {
    // mpmath: E|Z|^mu and a direct quadrature at y = 2.5
    CHECK(std::abs(smoothed_power(0.0, 0.0) - 1.7200799746490391) < 1e-9);
    CHECK(std::abs(smoothed_power(0.0, 1.0) - std::complex<double>(0.44071292787329242, -0.50027319125748038)) < 1e-9);
    CHECK(std::abs(smoothed_power(2.5, 0.0) - 0.70907439872290770) < 1e-9);
    CHECK(std::abs(smoothed_power(2.5, 1.0) - std::complex<double>(0.41818592058701874, 0.38187798061214659)) < 1e-9);
    for (double y : {11.9, 12.1, 30.0}) {
        const auto a = smoothed_power(y, 0.7), b = smoothed_power(-y, 0.7);
        CHECK(std::abs(a - b) < 1e-12);
    }
    CHECK(std::abs(smoothed_power(12.0 - 1e-9, 0.3) - smoothed_power(12.0, 0.3)) < 1e-9);
}

TEST_CASE("truncated homogeneous state") {
    const auto s = cdvp_state(0.0, 1e-3);
    double odd = 0.0, total = 0.0;
    for (int i = 0; i < s.x.size(); ++i) {
        odd += s.weights[i] * s.x[i] * std::norm(s.values[i]);
        total += s.weights[i] * std::norm(s.values[i]);
    }
    CHECK(std::abs(odd) < 1e-10 * total);
    CHECK(std::abs(total - s.norm_sq) < 1e-10 * total);
    const auto a = cdvp_state(0.0, 1e-2), b = cdvp_state(0.0, 1e-4);
    const double slope = (b.norm_sq - a.norm_sq) / (std::abs(std::log(1e-4)) - std::abs(std::log(1e-2)));
    CHECK(std::abs(slope - 2.0) < 0.1);
    CHECK_THROWS_AS(cdvp_state(0.0, 1e-3, 1.0, 32), ResolutionError);
    CHECK_THROWS_AS(cdvp_state(6.0, 1e-3), DomainError);
}
