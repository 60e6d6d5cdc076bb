#include "doctest.h"

#include "scarforge/analytic.hpp"
#include "scarforge/errors.hpp"
#include "scarforge/fock.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace scarforge;

TEST_CASE("overlap kernels: closed forms and normalization") {
    const auto k00 = analytic::overlap_kernel(0, 0);
    // 1 / sqrt(cosh 2)
    CHECK(std::abs(k00(2.0) - 0.51556011175621383) < 1e-12);
    // Position-space quadrature values at beta = 1.
    CHECK(std::abs(analytic::overlap_kernel(0, 2)(1.0) - (-0.43352514733965506)) < 1e-12);
    CHECK(std::abs(analytic::overlap_kernel(2, 2)(1.0) - 0.10462138048444480) < 1e-12);
    for (int m1 = 0; m1 <= 12; m1 += 2)
        for (int m2 = 0; m2 <= 12; m2 += 2)
            CHECK(std::abs(analytic::overlap_kernel(m1, m2)(0.0) - (m1 == m2 ? 1.0 : 0.0)) < 1e-12);
    const auto odd = analytic::overlap_kernel(1, 3);
    CHECK(odd.parity_zero);
    CHECK(odd(0.7) == 0.0);
    CHECK_THROWS_AS(analytic::overlap_kernel(14, 0), DomainError);
    CHECK(k00.expression().find("cosh") != std::string::npos);
}

TEST_CASE("overlap kernels agree with number-basis dilation") {
    const int dim = 2048;
    for (double beta : {-4.0, -1.3, 0.4, 1.0, 3.0, 4.0}) {
        for (int m2 = 0; m2 <= 6; m2 += 2) {
            const auto col = fock::dilate(beta, fock::FockState::basis(m2, dim, 1.0));
            for (int m1 = 0; m1 <= 6; m1 += 2)
                CHECK(std::abs(col.coeffs[m1].real() - analytic::overlap_kernel(m1, m2)(beta)) < 1e-9);
        }
    }
}

TEST_CASE("overlaps decay like the ground overlap") {
    for (int m1 = 0; m1 <= 6; m1 += 2) {
        for (int m2 = 0; m2 <= 6; m2 += 2) {
            const auto k = analytic::overlap_kernel(m1, m2);
            double sup = 0.0;
            for (int i = -1000; i <= 1000; ++i) {
                const double b = 0.01 * i;
                sup = std::max(sup, std::abs(k(b)) * std::sqrt(std::cosh(b)));
            }
            CHECK(sup < 50.0);
        }
    }
}

TEST_CASE("log-gamma") {
    for (double x : {0.3, 1.0, 2.5, 7.25, 30.0})
        CHECK(std::abs(analytic::log_gamma({x, 0.0}).real() - std::lgamma(x)) < 1e-13 * std::max(1.0, std::lgamma(x)));
    // mpmath loggamma
    struct Ref { std::complex<double> z, v; };
    const Ref refs[] = {{{0.25, 1.5}, {-1.534822507512049175, -1.277469867236724975}},
                        {{0.2, 0.1}, {1.406168624364340666, -0.4923061063214894747}},
                        {{0.3, -4.0}, {-5.641063534820528730, -1.236449121549806625}},
                        {{5.5, 2.0}, {3.568987975160887517, 3.272687285741914825}}};
    for (const auto& r : refs) {
        const auto g = std::exp(analytic::log_gamma(r.z)), e = std::exp(r.v);
        CHECK(std::abs(g - e) < 1e-12 * std::abs(e));
    }
}

TEST_CASE("S1 closed form") {
    // |Gamma(1/4)|^2 / sqrt(2 pi)
    CHECK(std::abs(analytic::s1(1.0, 0.0) - 5.2441151085842396) < 1e-12);
    CHECK(std::abs(analytic::s1(2.0, 0.0) - analytic::s1(1.0, 0.0) / 2.0) < 1e-13);
    const double s13 = analytic::s1(1.0, 3.0);
    CHECK(std::abs(s13 - 0.018525936639734617) < 1e-13);
    CHECK(std::abs(s13 - analytic::s1_quadrature(1.0, 3.0)) < 1e-8);
    CHECK(std::abs(analytic::s1(1.3, 2.2) - analytic::s1(1.3, -2.2)) < 1e-14);
    double prev = analytic::s1(1.0, 0.0);
    for (double th = 0.25; th <= 5.0; th += 0.25) {
        const double v = analytic::s1(1.0, th);
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
    CHECK_THROWS_AS(analytic::s1(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(analytic::s1_quadrature(-1.0, 1.0), DomainError);
}

TEST_CASE("S1 closed form agrees with quadrature at random points") {
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> uq(0.5, 3.0), ut(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const double q = uq(rng), th = ut(rng);
        CHECK(std::abs(analytic::s1(q, th) - analytic::s1_quadrature(q, th)) <= 1e-8);
    }
}

TEST_CASE("S2 and S3") {
    const auto s = analytic::s2_s3(1.0);
    // mpmath quadrature
    CHECK(std::abs(s.s2 - 22.251441370222699) < 1e-8);
    CHECK(std::abs(s.s3 - 22.546193411611742) < 1e-8);
    const auto alt = analytic::s2_s3_alternate(1.0);
    CHECK(std::abs(s.s2 - alt.s2) < 1e-8);
    CHECK(std::abs(s.s3 - alt.s3) < 1e-8);
    const auto s2 = analytic::s2_s3(2.0);
    CHECK(std::abs(s2.s2 - s.s2 / 4.0) < 1e-9);
    CHECK(std::abs(s2.s3 - s.s3 / 8.0) < 1e-9);
}

TEST_CASE("Hermite functions in position space") {
    Eigen::VectorXd x0(1);
    x0 << 0.0;
    CHECK(std::abs(analytic::hermite_position(0, 1.0, x0)[0] - std::pow(std::numbers::pi, -0.25)) < 1e-15);
    CHECK(std::abs(analytic::hermite_position(1, 1.0, x0)[0]) < 1e-15);
    const int n = 8001;
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, -20.0, 20.0);
    const double dx = 40.0 / (n - 1);
    const Eigen::VectorXd p2 = analytic::hermite_position(2, 1.0, x);
    const Eigen::VectorXd p4 = analytic::hermite_position(4, 1.0, x);
    CHECK(std::abs(p2.dot(p4) * dx) < 1e-9);
    for (int m : {0, 7, 64}) {
        const Eigen::VectorXd p = analytic::hermite_position(m, 1.0, x);
        CHECK(std::abs(p.squaredNorm() * dx - 1.0) < 1e-8);
    }
}
