#include "doctest.h"

#include "scarforge/errors.hpp"
#include "scarforge/fock.hpp"
#include "scarforge/qnf.hpp"

#include <cmath>
#include <random>

using namespace scarforge;
using fock::FockState;
using qnf::NormalFormCoefficients;

TEST_CASE("coefficient validation") {
    auto c = NormalFormCoefficients::quadratic(1.5);
    CHECK_NOTHROW(c.validate(1e-3));
    CHECK(c.q_at(1, 0.0) == 1.5);
    c.q[0] = {1.4};
    CHECK_THROWS_AS(c.validate(1e-3), ValidityError);
    auto d = NormalFormCoefficients::constant({1.0, 0.3});
    d.longitudinal.q0 = 1.5;
    d.E0 = 1.0;
    d.q0_constant = 1.0;
    CHECK_THROWS_AS(d.validate(0.01), ValidityError);
}

TEST_CASE("quadratic Q is hermitian with symmetric spectrum") {
    const auto Q = qnf::build_q_operator(NormalFormCoefficients::quadratic(1.0), 0.01, 64);
    CHECK(Q.hermiticity_defect() < 1e-14);
    CHECK(Q.bandwidth() == 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Q.to_dense());
    const Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < 32; ++i) CHECK(std::abs(ev[i] + ev[63 - i]) < 1e-12);
}

TEST_CASE("quartic term shifts the ground-state energy by q2 hbar^2 / 4") {
    for (double h : {0.1, 0.01}) {
        const auto Q = qnf::build_q_operator(NormalFormCoefficients::constant({1.0, 0.7}), h, 64);
        const Eigen::VectorXcd phi0 = FockState::basis(0, 64, h).coeffs;
        CHECK(std::abs(phi0.dot(Q.apply(phi0)) - 0.7 * h * h / 4.0) < 1e-15);
    }
    const auto a = qnf::build_q_operator(NormalFormCoefficients::constant({1.0, 0.0}), 0.1, 40);
    const auto b = qnf::build_q_operator(NormalFormCoefficients::quadratic(1.0), 0.1, 40);
    CHECK((a.to_dense() - b.to_dense()).norm() == 0.0);
    CHECK_THROWS_AS(qnf::build_q_operator(NormalFormCoefficients::constant({1.0, 1.0, 1.0}), 0.1, 12),
                    TruncationError);
}

TEST_CASE("quadratic evolution is a dilation") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ut(-1.0, 1.0), uh(-4.0, -1.0);
    for (int i = 0; i < 20; ++i) {
        const double t = ut(rng), h = std::pow(10.0, uh(rng));
        const auto coeffs = NormalFormCoefficients::quadratic(1.3);
        const auto psi = qnf::propagate_exact(qnf::build_q_operator(coeffs, h, 512),
                                              FockState::basis(0, 512, h), t);
        CHECK((psi.coeffs - fock::squeezed_vacuum(1.3 * t, 512, h).coeffs).norm() < 1e-8);
    }
    const auto Q = qnf::build_q_operator(NormalFormCoefficients::quadratic(1.0), 0.1, 64);
    const auto phi0 = FockState::basis(0, 64, 0.1);
    CHECK(qnf::propagate_exact(Q, phi0, 0.0).coeffs == phi0.coeffs);
}

TEST_CASE("Ehrenfest overflow reports the admissible time") {
    const auto Q = qnf::build_q_operator(NormalFormCoefficients::quadratic(1.0), 0.01, 64);
    try {
        qnf::propagate_exact(Q, FockState::basis(0, 64, 0.01), 5.0);
        FAIL("expected overflow");
    } catch (const EhrenfestOverflow& e) {
        CHECK(e.max_admissible_t() > 0.0);
        CHECK(e.max_admissible_t() < 5.0);
    }
}

TEST_CASE("auto-grown propagation preserves norm and energy") {
    const double h = 1e-3, eps = 0.2;
    const double t = 0.9 * qnf::ehrenfest_time(eps, 1.0, h);
    const auto coeffs = NormalFormCoefficients::constant({1.0, 0.5});
    const auto psi = qnf::propagate_auto(coeffs, FockState::basis(0, 64, h), t);
    CHECK(std::abs(psi.norm_sq() - 1.0) < 1e-10);
    const auto Q = qnf::build_q_operator(coeffs, h, psi.dim());
    const auto phi0 = FockState::basis(0, psi.dim(), h);
    const double e0 = phi0.coeffs.dot(Q.apply(phi0.coeffs)).real();
    const double e1 = psi.coeffs.dot(Q.apply(psi.coeffs)).real();
    CHECK(std::abs(e1 - e0) < 1e-9 * std::abs(e0));
}

TEST_CASE("initial width slope") {
    const auto coeffs = NormalFormCoefficients::constant({1.4, 0.8});
    auto width = [&](double h) {
        const auto Q = qnf::build_q_operator(coeffs, h, 64);
        return Q.apply(FockState::basis(0, 64, h).coeffs).norm();
    };
    const double h1 = 1e-4, h2 = 2e-4;
    CHECK(std::abs((width(h2) - width(h1)) / (h2 - h1) - 1.4 / std::sqrt(2.0)) < 1e-3);
}

TEST_CASE("Dyson expansion structure") {
    const auto quad = qnf::dyson_expand(NormalFormCoefficients::quadratic(1.0), 0.01, 2);
    for (const auto& [m, p] : quad.coefficients) CHECK(std::abs(p(0.7, 0.01)) == 0.0);

    const auto e = qnf::dyson_expand(NormalFormCoefficients::constant({1.0, 1.0}), 0.01, 1);
    for (const auto& [m, p] : e.coefficients) {
        CHECK(std::abs(p(0.0, 0.01)) == 0.0);
        CHECK(p.t_degree() <= 1);
    }
    // Order l = 1 with a quartic term touches phi_0 and phi_4 only, at order hbar.
    const auto orders = e.hbar_orders();
    CHECK(orders.size() == 2);
    CHECK(orders.count(0) == 1);
    CHECK(orders.count(2) == 1);
    CHECK(orders.at(0) == 1);
    CHECK(orders.at(2) == 1);

    const auto e3 = qnf::dyson_expand(NormalFormCoefficients::constant({1.0, 0.5, 0.2}), 0.01, 3);
    for (const auto& [m, p] : e3.coefficients) CHECK(p.t_degree() <= 3);
    CHECK_THROWS_AS(qnf::dyson_expand(NormalFormCoefficients::quadratic(1.0), 0.01, 5), UnsupportedOrder);
}

TEST_CASE("Dyson remainder scales as hbar^{l+1}") {
    const auto coeffs = NormalFormCoefficients::constant({1.0, 1.0});
    for (int l : {1, 2}) {
        std::vector<double> lx, ly;
        for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
            const auto e = qnf::dyson_expand(coeffs, h, l);
            const auto exact = qnf::propagate_auto(coeffs, FockState::basis(0, 64, h), 1.0);
            const double err = (exact.coeffs - e.reconstruct(1.0, exact.dim()).coeffs).norm();
            CHECK(err <= 1.5 * e.remainder_bound * std::pow(h, l + 1));
            lx.push_back(std::log(h));
            ly.push_back(std::log(err));
        }
        const double slope = (ly.front() - ly.back()) / (lx.front() - lx.back());
        CHECK(slope >= l + 1 - 0.1);
    }
}

TEST_CASE("Dyson remainder constant holds across times") {
    const auto coeffs = NormalFormCoefficients::constant({1.0, 1.0});
    const double h = 1e-3;
    const auto e = qnf::dyson_expand(coeffs, h, 1);
    const double T = qnf::ehrenfest_time(0.1, 1.0, h);
    double worst = 0.0;
    for (int i = 1; i <= 30; ++i) {
        const double t = T * i / 30.0;
        const auto nq = qnf::build_q_operator(coeffs.nonquadratic_part(), h, 256);
        const auto u = qnf::propagate_exact(nq, FockState::basis(0, 256, h), t);
        const double err = (u.coeffs - e.inner_state(t, 256).coeffs).norm();
        worst = std::max(worst, err / std::pow(t * h, 2));
    }
    CHECK(worst <= 1.5 * e.remainder_bound);
}

TEST_CASE("localization of squeezed states") {
    const double h = 1e-4, eps = 0.3;
    CHECK(qnf::localization_mass(FockState::basis(0, 64, h), eps, h).outside_mass <= 1e-6);
    // The Husimi density of D_beta phi_0 is Gaussian with variances (hbar / 2)(e^{+-2 beta} + 1).
    auto gaussian_outside = [&](double beta, double b) {
        const double vx = 0.5 * h * (std::exp(2.0 * beta) + 1.0);
        const double vp = 0.5 * h * (std::exp(-2.0 * beta) + 1.0);
        return 1.0 - std::erf(b / std::sqrt(2.0 * vx)) * std::erf(b / std::sqrt(2.0 * vp));
    };
    const double lg = std::abs(std::log(h));
    for (double beta : {(1.0 - eps) * lg / 2.0, (1.0 + eps) * lg / 2.0}) {
        const auto rep = qnf::localization_mass(fock::squeezed_vacuum(beta, 1 << 21, h), eps, h);
        CHECK(rep.box_halfwidth == doctest::Approx(std::pow(h, eps / 3.0)));
        CHECK(rep.outside_mass == doctest::Approx(gaussian_outside(beta, rep.box_halfwidth)).epsilon(1e-6));
    }
    const auto beyond = qnf::localization_mass(fock::squeezed_vacuum((1.0 + eps) * lg / 2.0, 1 << 21, h), eps, h);
    CHECK(beyond.outside_mass >= 0.1);
}

TEST_CASE("Ehrenfest time") {
    CHECK(qnf::ehrenfest_time(0.0, 1.0, std::exp(-2.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(qnf::ehrenfest_time(0.5, 1.0, 0.01) == doctest::Approx(qnf::ehrenfest_time(0.0, 1.0, 0.01) / 2));
    CHECK(qnf::ehrenfest_time(0.2, 2.0, 0.01) == doctest::Approx(qnf::ehrenfest_time(0.2, 1.0, 0.01) / 2));
    CHECK_THROWS_AS(qnf::ehrenfest_time(0.1, 1.0, 2.0), DomainError);
}
