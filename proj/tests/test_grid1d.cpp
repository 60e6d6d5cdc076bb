#include "doctest.h"

#include "scarforge/cutoff.hpp"
#include "scarforge/errors.hpp"
#include "scarforge/fock.hpp"
#include "scarforge/grid1d.hpp"
#include "scarforge/husimi.hpp"
#include "scarforge/qnf.hpp"
#include "scarforge/quasimode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace scarforge;
using namespace scarforge::grid1d;

TEST_CASE("construction checks") {
    CHECK_THROWS_AS(GridOperator(0.01, 512, 1.0), ResolutionError);
    CHECK_THROWS_AS(GridOperator(0.01, 1000, 1.0), InvalidDimension);
    CHECK(default_grid_size(0.01) == 1024);
    const auto H = build_pendulum(0.01);
    CHECK(H.k_max() * H.hbar() >= 3.0);
}

TEST_CASE("free spectrum is hbar^2 k^2 / 2") {
    const double h = 0.1;
    const GridOperator H(h, 64, 0.0);
    std::vector<double> expect;
    for (int k = -32; k < 32; ++k) expect.push_back(0.5 * h * h * k * k);
    std::sort(expect.begin(), expect.end());
    const auto& ev = H.spectrum().eigenvalues;
    for (int i = 0; i < 64; ++i) CHECK(std::abs(ev[i] - expect[i]) < 1e-12);
}

TEST_CASE("pendulum spectrum bottom") {
    const auto H = build_pendulum(0.01);
    const double e0 = H.spectrum().eigenvalues[0];
    CHECK(e0 >= -1.0);
    CHECK(std::abs(e0 - (-1.0 + 0.005)) < 5e-4);
}

TEST_CASE("hamiltonian is hermitian") {
    const auto H = build_pendulum(0.02);
    std::mt19937 rng(11);
    std::normal_distribution<double> g;
    Eigen::VectorXcd u(H.size()), v(H.size());
    for (int i = 0; i < H.size(); ++i) {
        u[i] = cplx(g(rng), g(rng));
        v[i] = cplx(g(rng), g(rng));
    }
    const cplx a = H.inner(H.apply(u), v), b = H.inner(u, H.apply(v));
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
}

TEST_CASE("Gaussian at the fixed point") {
    for (double h : {0.05, 0.01}) {
        const auto H = build_pendulum(h);
        const auto psi = grid_gaussian(H);
        CHECK(std::abs(H.inner_norm_sq(psi) - 1.0) < 1e-10);
        // <xi^2 / 2> = hbar / 4 and <cos x> = e^{-hbar / 4}
        CHECK(std::abs(H.energy(psi) - (h / 4.0 + std::exp(-h / 4.0))) < 1e-10);
    }
    const auto H1 = build_pendulum(0.01), H2 = build_pendulum(0.005);
    const double v1 = H1.energy_variance(grid_gaussian(H1)), v2 = H2.energy_variance(grid_gaussian(H2));
    CHECK(std::abs(std::log(v1 / v2) / std::log(2.0) - 2.0) < 0.1);
}

TEST_CASE("split-step evolution") {
    const auto H = build_pendulum(0.01);
    const auto psi = grid_gaussian(H);
    CHECK((grid_evolve(H, psi, 0.0) - psi).norm() == 0.0);
    const double T = qnf::ehrenfest_time(0.1, 1.0, 0.01);
    EvolveInfo info;
    const auto out = grid_evolve(H, psi, T, &info);
    CHECK(info.step_change < 1e-9);
    CHECK(std::abs(H.inner_norm_sq(out) - 1.0) < 1e-10);
    CHECK(std::abs(H.energy(out) - H.energy(psi)) < 1e-9);
}

TEST_CASE("hyperbolic spreading rate") {
    const auto H = build_pendulum(1e-3);
    CHECK(std::abs(variance_growth_rate(H, grid_gaussian(H)) - 2.0) < 0.15);
}

TEST_CASE("spectral window") {
    const double h = 0.01;
    const auto H = build_pendulum(h);
    const auto w = eig_window(H, 1.0, 10 * h);
    CHECK(w.count() >= 1);
    CHECK(w.max_residual <= 1e-9);
    CHECK_FALSE(w.beyond_resolution);
    for (int j = 0; j < w.count(); ++j) {
        const Eigen::VectorXd v = w.vectors.col(j);
        const double n = v.norm();
        double refl = 0.0;
        for (int i = 0; i < H.size(); ++i) refl += v[i] * v[(H.size() - i) % H.size()];
        CHECK(std::abs(std::abs(refl) / (n * n) - 1.0) < 1e-9);
        CHECK(refl * w.parity[j] > 0.0);
    }
    const auto psi = grid_gaussian(H);
    const auto all = eig_window(H, 0.0, 1e6);
    CHECK(all.beyond_resolution);
    CHECK(std::abs(all.masses(psi).sum() - 1.0) < 1e-10);
    CHECK(w.masses(psi).sum() <= 1.0 + 1e-10);
}

TEST_CASE("Weyl matrix elements by quadrature") {
    const double h = 0.3;
    CHECK(std::abs(grid_weyl_matrix_element(1, 2, 0, h) - cplx(0.0, h / std::sqrt(2.0))) < 1e-10);
    CHECK(std::abs(grid_weyl_matrix_element(1, 0, 2, h) - cplx(0.0, -h / std::sqrt(2.0))) < 1e-10);
    CHECK(std::abs(grid_weyl_matrix_element(1, 0, 0, h)) < 1e-12);
    CHECK(std::abs(grid_weyl_matrix_element(2, 0, 0, h) - h * h / 4.0) < 1e-10);
    for (int alpha = 1; alpha <= 3; ++alpha) {
        const auto [op, dec] = fock::weyl_power_xxi(alpha, h, 32);
        for (int m1 = 0; m1 <= 10; m1 += 3)
            for (int m2 = m1 % 2; m2 <= 10; m2 += 2)
                CHECK(std::abs(grid_weyl_matrix_element(alpha, m1, m2, h) - op(m1, m2)) < 1e-8);
    }
    CHECK(grid_weyl_element(3, 9, 9, h).converged);
}

TEST_CASE("grid Husimi box mass matches the number-basis value") {
    const double h = 0.01;
    const auto H = build_pendulum(h);
    const double b = 0.15;
    const double grid = grid_box_mass(H, grid_gaussian(H), b);
    const double fock_val = husimi::fock_box_mass(fock::FockState::basis(0, 64, h), b);
    CHECK(std::abs(grid - fock_val) < 1e-9);
    // Husimi of phi_0 is a Gaussian of variance hbar in each direction
    CHECK(std::abs(grid - std::pow(std::erf(b / std::sqrt(2.0 * h)), 2)) < 1e-9);
    const auto shifted = grid_gaussian(H, 0.4, -0.2);
    CHECK(std::abs(grid_box_mass(H, shifted, b, 0.4, -0.2) - grid) < 1e-9);
}

TEST_CASE("cutoff transform") {
    const auto arch = quasimode::cosine_arch(4097);
    CHECK(std::abs(cutoff_transform(arch, 0.0) - 4.0 / std::numbers::pi) < 1e-6);
    // int cos(pi t / 2) cos(w t) dt = pi cos(w) / (pi^2 / 4 - w^2)
    const double w = 3.0;
    const double expect = std::numbers::pi * std::cos(w) / (std::numbers::pi * std::numbers::pi / 4.0 - w * w);
    CHECK(std::abs(cutoff_transform(arch, w) - expect) < 1e-6);
}

TEST_CASE("grid quasimode reproduces the quadratic-model width") {
    const double eps = 0.1;
    const auto chi = quasimode::optimize_cutoff(eps);
    for (double h : {1.0 / 50, 1.0 / 100, 1.0 / 200}) {
        const auto H = build_pendulum(h);
        const double T = qnf::ehrenfest_time(eps, 1.0, h);
        const auto psi0 = grid_gaussian(H);
        const auto gq = grid_quasimode(H, chi, T, H.energy(psi0), psi0);
        quasimode::QuasimodeOptions opt;
        opt.compute_localization = false;
        const auto fq = quasimode::build_quasimode(qnf::NormalFormCoefficients::quadratic(1.0), chi, T, h, opt);
        CHECK(std::abs(gq.width / fq.report.width - 1.0) < 0.25);
    }
}

TEST_CASE("grid quasimode is localized in the Ehrenfest box") {
    const double h = 0.01, eps = 0.3;
    const auto H = build_pendulum(h);
    const auto psi0 = grid_gaussian(H);
    const auto gq = grid_quasimode(H, quasimode::optimize_cutoff(eps), qnf::ehrenfest_time(eps, 1.0, h),
                                   H.energy(psi0), psi0);
    const Eigen::VectorXcd psi = gq.state / std::sqrt(H.inner_norm_sq(gq.state));
    CHECK(grid_box_mass(H, psi, std::pow(h, eps / 3.0)) >= 0.99);
}
