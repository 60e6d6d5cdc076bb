#pragma once

#include <Eigen/Dense>
#include <string>

namespace scarforge::quasimode {

// Cutoff chi on [-1, 1], sampled on a uniform grid together with chi'.
// Values between nodes use the cubic Hermite interpolant of (chi, chi').
class CutoffFunction {
public:
    CutoffFunction() = default;
    CutoffFunction(Eigen::VectorXd values, Eigen::VectorXd derivatives, std::string kind);

    int size() const { return static_cast<int>(values_.size()); }
    double step() const { return 2.0 / (size() - 1); }
    double node(int i) const { return -1.0 + i * step(); }
    const Eigen::VectorXd& values() const { return values_; }
    const Eigen::VectorXd& derivatives() const { return derivatives_; }

    double value(double t) const;
    double derivative(double t) const;

    // Trapezoid integrals of chi^2 and chi'^2 over [-1, 1].
    double norm_sq() const;
    double derivative_norm_sq() const;
    double rayleigh_quotient() const;

    const std::string& kind() const { return kind_; }
    // Vanishes (with its derivative) at both endpoints.
    bool compactly_supported(double tol = 1e-14) const;
    // Discontinuous indicator of [-a, a]; derivative samples are zero and the jumps sit at +-a.
    bool sharp() const { return sharp_; }
    double jump_position() const { return jump_; }

    // Shrink and mollification parameters of optimize_cutoff output.
    double shrink = 0.0;
    double mollifier_radius = 0.0;

    static CutoffFunction indicator_of(int grid_size, double a);

private:
    Eigen::VectorXd values_;
    Eigen::VectorXd derivatives_;
    std::string kind_;
    bool sharp_ = false;
    double jump_ = 1.0;
};

// cos(pi t / 2): the minimizer of ||chi'|| / ||chi|| over H^1_0(-1, 1).
CutoffFunction cosine_arch(int grid_size);

// Continuous ramps of width `ramp` down to zero at +-1.
CutoffFunction steep_cutoff(int grid_size, double ramp);

// 1 on [-a, a], smooth C^inf transition to 0 at +-b.
CutoffFunction smooth_plateau(int grid_size, double a, double b);

// Arch cos(pi t / (2L)) on [-L, L], L = 1 - delta, convolved with a C^inf bump of radius delta / 2.
CutoffFunction mollified_arch(int grid_size, double delta);

// Largest shrink delta with quotient <= (pi / 2)(1 + epsilon_prime).
CutoffFunction optimize_cutoff(double epsilon_prime, int grid_size = 4097);

}  // namespace scarforge::quasimode
