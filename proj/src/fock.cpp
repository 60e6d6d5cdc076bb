#include "scarforge/fock.hpp"

#include "scarforge/chebyshev.hpp"
#include "scarforge/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

namespace scarforge::fock {

namespace {

void require_dim(int dim, int minimum = 4) {
    if (dim < minimum)
        throw InvalidDimension("Fock dimension " + std::to_string(dim) + " below minimum " +
                               std::to_string(minimum));
}

// (i/2)((a*)^2 - a^2) without the hbar factor.
BandedOperator unit_xxi(int dim) {
    BandedOperator x(dim);
    Eigen::VectorXcd up(dim - 2);
    for (int m = 0; m < dim - 2; ++m) up[m] = cplx(0.0, 0.5 * std::sqrt((m + 1.0) * (m + 2.0)));
    x.set_band(-2, up);
    x.set_band(2, up.conjugate());
    x.set_hermitian(true);
    return x;
}

}  // namespace

bool FockState::even_supported() const {
    for (int m = 1; m < dim(); m += 2)
        if (coeffs[m] != cplx(0.0, 0.0)) return false;
    return true;
}

double FockState::top_quarter_mass() const {
    const int start = (3 * dim()) / 4;
    return coeffs.tail(dim() - start).squaredNorm();
}

FockState FockState::padded(int new_dim) const {
    if (new_dim < dim()) throw InvalidDimension("cannot pad to a smaller dimension");
    FockState out{Eigen::VectorXcd::Zero(new_dim), hbar};
    out.coeffs.head(dim()) = coeffs;
    return out;
}

FockState FockState::basis(int m, int dim, double hbar) {
    if (m < 0 || m >= dim) throw InvalidDimension("basis index outside the truncation");
    FockState s{Eigen::VectorXcd::Zero(dim), hbar};
    s.coeffs[m] = 1.0;
    return s;
}

LadderPair ladder_matrices(double hbar, int dim) {
    require_dim(dim);
    if (hbar <= 0.0) throw DomainError("hbar must be positive");
    Eigen::VectorXcd s(dim - 1);
    for (int m = 0; m < dim - 1; ++m) s[m] = std::sqrt(m + 1.0);
    LadderPair out{BandedOperator(dim), BandedOperator(dim)};
    out.a.set_band(1, s);
    out.a_star.set_band(-1, s);
    return out;
}

BandedOperator op_xxi(double hbar, int dim) {
    require_dim(dim);
    if (hbar <= 0.0) throw DomainError("hbar must be positive");
    BandedOperator x = unit_xxi(dim);
    x *= hbar;
    x.set_hermitian(true);
    return x;
}

std::vector<double> moyal_power_polynomial(int alpha) {
    if (alpha < 0 || alpha > kMaxWeylPower)
        throw UnsupportedOrder("Weyl power " + std::to_string(alpha) + " outside [1, 6]");
    std::vector<double> prev{1.0}, cur{0.0, 1.0};
    if (alpha == 0) return prev;
    for (int a = 1; a < alpha; ++a) {
        std::vector<double> next(a + 2, 0.0);
        for (int j = 0; j <= a; ++j) next[j + 1] += cur[j];
        for (int j = 0; j < static_cast<int>(prev.size()); ++j) next[j] -= 0.25 * a * a * prev[j];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

XXiPowerDecomposition xxi_power_decomposition(int alpha) {
    if (alpha < 1 || alpha > kMaxWeylPower)
        throw UnsupportedOrder("Weyl power " + std::to_string(alpha) + " outside [1, 6]");
    XXiPowerDecomposition dec;
    dec.alpha = alpha;
    const auto poly = moyal_power_polynomial(alpha);
    for (int k = 1; 2 * k <= alpha; ++k) dec.c_coeffs.push_back(poly[alpha - 2 * k]);

    const int dim = 2 * alpha + 4;
    const BandedOperator x = unit_xxi(dim);
    Eigen::VectorXcd power = Eigen::VectorXcd::Zero(dim);
    power[0] = 1.0;
    Eigen::VectorXcd result = poly[0] * power;
    for (int j = 1; j <= alpha; ++j) {
        power = x.apply(power);
        result += poly[j] * power;
    }
    for (int k = 0; 2 * k <= alpha; ++k) dec.d_coeffs.push_back(result[2 * alpha - 4 * k]);
    return dec;
}

std::pair<BandedOperator, XXiPowerDecomposition> weyl_power_xxi(int alpha, double hbar, int dim) {
    if (alpha < 1 || alpha > kMaxWeylPower)
        throw UnsupportedOrder("Weyl power " + std::to_string(alpha) + " outside [1, 6]");
    require_dim(dim, 2 * alpha + 8);
    if (hbar <= 0.0) throw DomainError("hbar must be positive");
    const auto poly = moyal_power_polynomial(alpha);
    const int ext = dim + 2 * alpha;
    const BandedOperator x = op_xxi(hbar, ext);
    BandedOperator power = BandedOperator::identity(ext);
    BandedOperator acc(ext);
    if (poly[0] != 0.0) acc += cplx(poly[0] * std::pow(hbar, alpha)) * power;
    for (int j = 1; j <= alpha; ++j) {
        power = power * x;
        if (poly[j] != 0.0) acc += cplx(poly[j] * std::pow(hbar, alpha - j)) * power;
    }
    BandedOperator out = acc.crop(dim);
    out.prune(0.0);
    out.set_hermitian(true);
    return {std::move(out), xxi_power_decomposition(alpha)};
}

FockState xxi_power_on_ground(int alpha, double hbar, int dim) {
    if (alpha < 1 || alpha > kMaxWeylPower)
        throw UnsupportedOrder("Weyl power " + std::to_string(alpha) + " outside [1, 6]");
    const int work = std::max(dim, 2 * alpha + 8);
    auto apply_at = [&](double h) {
        const auto op = weyl_power_xxi(alpha, h, work).first;
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(work);
        v[0] = 1.0;
        return Eigen::VectorXcd(op.apply(v).head(dim));
    };
    Eigen::VectorXcd at_h = apply_at(hbar);
    const Eigen::VectorXcd at_one = apply_at(1.0);
    const double scale = std::pow(hbar, alpha);
    if ((at_h - scale * at_one).norm() > 1e-12 * scale * std::max(1.0, at_one.norm()))
        throw ValidityError("hbar^alpha scaling of Op((x xi)^alpha) phi_0 violated");
    return {at_h, hbar};
}

int default_dilation_dim(double beta_max) {
    const double grow = 4.0 * std::ceil(std::exp(2.0 * std::abs(beta_max)));
    return static_cast<int>(std::max(400.0, grow));
}

DilationMatrix dilation(double beta, double hbar, int dim) {
    require_dim(dim);
    if (hbar <= 0.0) throw DomainError("hbar must be positive");
    if (std::abs(beta) > 12.0) throw DomainError("|beta| > 12 is outside the supported range");
    DilationMatrix out;
    if (dim <= 1024) {
        Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
        for (int m = 0; m + 2 < dim; ++m) {
            const double s = 0.5 * beta * std::sqrt((m + 1.0) * (m + 2.0));
            gen(m + 2, m) = s;
            gen(m, m + 2) = -s;
        }
        out.matrix = gen.exp().cast<cplx>();
    } else {
        const ChebyshevPropagator prop(unit_xxi(dim));
        out.matrix.resize(dim, dim);
        for (int m = 0; m < dim; ++m) {
            Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
            e[m] = 1.0;
            out.matrix.col(m) = prop.apply(e, beta);
        }
    }
    const int top = (3 * dim) / 4;
    for (int m = 0; m <= std::min(12, dim / 8); ++m) {
        const double leak = out.matrix.col(m).tail(dim - top).squaredNorm();
        out.unitarity_defect = std::max(out.unitarity_defect, leak);
    }
    out.truncation_warning = out.unitarity_defect > 1e-10;
    return out;
}

FockState dilate(double beta, const FockState& state) {
    require_dim(state.dim());
    if (beta == 0.0) return state;
    const ChebyshevPropagator prop(unit_xxi(state.dim()));
    return {prop.apply(state.coeffs, beta), state.hbar};
}

FockState squeezed_vacuum(double beta, int dim, double hbar) {
    require_dim(dim, 1);
    FockState s{Eigen::VectorXcd::Zero(dim), hbar};
    const double th = std::tanh(beta);
    double c = 1.0 / std::sqrt(std::cosh(beta));
    for (int n = 0; 2 * n < dim; ++n) {
        s.coeffs[2 * n] = c;
        c *= th * std::sqrt((2.0 * n + 1.0) / (2.0 * n + 2.0));
    }
    return s;
}

Eigen::MatrixXcd weyl_oracle(int alpha, double hbar, int dim) {
    if (alpha < 1 || alpha > 4) throw UnsupportedOrder("weyl_oracle supports alpha <= 4");
    require_dim(dim);
    const int ext = dim + 2 * alpha + 2;
    const double s = std::sqrt(hbar / 2.0);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(ext, ext);
    for (int m = 0; m + 1 < ext; ++m) a(m, m + 1) = std::sqrt(m + 1.0);
    const Eigen::MatrixXcd ad = a.adjoint();
    const Eigen::MatrixXcd xh = s * (a + ad);
    const Eigen::MatrixXcd ph = cplx(0.0, s) * (ad - a);

    // sums[i][j]: sum over all words with i copies of x and j copies of p.
    std::vector<std::vector<Eigen::MatrixXcd>> sums(alpha + 1,
                                                    std::vector<Eigen::MatrixXcd>(alpha + 1));
    sums[0][0] = Eigen::MatrixXcd::Identity(ext, ext);
    for (int i = 0; i <= alpha; ++i) {
        for (int j = 0; j <= alpha; ++j) {
            if (i == 0 && j == 0) continue;
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(ext, ext);
            if (i > 0) acc += xh * sums[i - 1][j];
            if (j > 0) acc += ph * sums[i][j - 1];
            sums[i][j] = std::move(acc);
        }
    }
    double words = 1.0;
    for (int k = 1; k <= alpha; ++k) words = words * (alpha + k) / k;
    return sums[alpha][alpha].topLeftCorner(dim, dim) / words;
}

FockState parity_conjugate(const FockState& state) {
    FockState out{state.coeffs.conjugate(), state.hbar};
    for (int m = 0; m < out.dim(); ++m)
        if ((m / 2) % 2) out.coeffs[m] = -out.coeffs[m];
    return out;
}

}  // namespace scarforge::fock
