#pragma once

#include "scarforge/banded.hpp"

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace scarforge::fock {

struct FockState {
    Eigen::VectorXcd coeffs;
    double hbar = 1.0;

    int dim() const { return static_cast<int>(coeffs.size()); }
    double norm_sq() const { return coeffs.squaredNorm(); }
    double norm() const { return coeffs.norm(); }
    bool is_normalized(double tol = 1e-12) const { return std::abs(norm_sq() - 1.0) <= tol; }
    // Odd-index coefficients are exactly zero.
    bool even_supported() const;
    // Mass carried by indices m >= 3 dim / 4.
    double top_quarter_mass() const;
    FockState padded(int new_dim) const;

    static FockState basis(int m, int dim, double hbar);
};

struct LadderPair {
    BandedOperator a;
    BandedOperator a_star;
};

LadderPair ladder_matrices(double hbar, int dim);

// Op^w(x xi) = (i hbar / 2)((a*)^2 - a^2).
BandedOperator op_xxi(double hbar, int dim);

// Op^w((x xi)^alpha) = X^alpha + sum_k c_{alpha,k} hbar^{2k} X^{alpha-2k},  X = Op^w(x xi);
// Op^w((x xi)^alpha) phi_0 = hbar^alpha sum_k d_{alpha,k} phi_{2 alpha - 4k}.
struct XXiPowerDecomposition {
    int alpha = 1;
    std::vector<double> c_coeffs;  // c_coeffs[k-1] = c_{alpha,k}, 1 <= k <= alpha/2
    std::vector<cplx> d_coeffs;    // d_coeffs[k] = d_{alpha,k},   0 <= k <= alpha/2

    double c(int k) const { return c_coeffs.at(k - 1); }
    cplx d(int k) const { return d_coeffs.at(k); }
};

constexpr int kMaxWeylPower = 6;

// Coefficients of the monomials of (x xi)^{#alpha} as a polynomial in X with hbar = 1:
// result[j] multiplies X^j.
std::vector<double> moyal_power_polynomial(int alpha);

XXiPowerDecomposition xxi_power_decomposition(int alpha);

std::pair<BandedOperator, XXiPowerDecomposition> weyl_power_xxi(int alpha, double hbar, int dim);

FockState xxi_power_on_ground(int alpha, double hbar, int dim);

struct DilationMatrix {
    Eigen::MatrixXcd matrix;
    // Largest mass pushed into rows m >= 3 dim / 4 from a column m <= min(12, dim / 8).
    double unitarity_defect = 0.0;
    bool truncation_warning = false;
};

int default_dilation_dim(double beta_max);

DilationMatrix dilation(double beta, double hbar, int dim);

// D_beta applied to a state through the Chebyshev action of the same truncated generator.
FockState dilate(double beta, const FockState& state);

// D_beta phi_0 from the closed-form coefficients
// c_{2n} = cosh(beta)^{-1/2} tanh(beta)^n sqrt((2n)!) / (2^n n!).
FockState squeezed_vacuum(double beta, int dim, double hbar);

// Brute-force Weyl quantization of x^alpha xi^alpha by full symmetrization of x, p.
Eigen::MatrixXcd weyl_oracle(int alpha, double hbar, int dim);

// Time-reversal partner: (P conj(psi))_m = (-1)^{floor(m/2)} conj(psi_m).
FockState parity_conjugate(const FockState& state);

}  // namespace scarforge::fock
