#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace scarforge::analytic {

// <phi_m1, D_beta phi_m2> as a finite sum of c * sinh^j(beta) * cosh^{-k/2}(beta).
struct OverlapTerm {
    double coeff = 0.0;
    int sinh_power = 0;
    int cosh_half_power = 0;
};

struct OverlapKernel {
    int m1 = 0;
    int m2 = 0;
    // Odd total parity: the overlap vanishes identically.
    bool parity_zero = false;
    std::vector<OverlapTerm> terms;

    double operator()(double beta) const;
    std::string expression() const;
};

constexpr int kMaxOverlapIndex = 12;

OverlapKernel overlap_kernel(int m1, int m2);

std::complex<double> log_gamma(std::complex<double> z);

double s1(double q1, double theta);
// Adaptive Gauss-Kronrod evaluation of the defining cosh integral.
double s1_quadrature(double q1, double theta, double tol = 1e-13);

struct S2S3 {
    double s2 = 0.0;
    double s3 = 0.0;
};

// S2 = 2 int |r| cosh(q1 r)^{-1/2} dr,  S3 = (1/2) int r^2 cosh(q1 r)^{-1/2} dr.
S2S3 s2_s3(double q1);
// Same integrals by a double-exponential rule on [0, inf).
S2S3 s2_s3_alternate(double q1);

Eigen::VectorXd hermite_position(int m, double hbar, const Eigen::VectorXd& x);

}  // namespace scarforge::analytic
