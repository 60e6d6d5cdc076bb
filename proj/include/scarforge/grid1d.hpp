#pragma once

#include "scarforge/cutoff.hpp"

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <mutex>
#include <vector>

namespace scarforge::grid1d {

using cplx = std::complex<double>;

// Full eigendecomposition, eigenvectors L^2-normalized on the grid (sum |u|^2 dx = 1).
struct Spectrum {
    Eigen::VectorXd eigenvalues;  // increasing
    Eigen::MatrixXd vectors;      // columns
    Eigen::VectorXi parity;       // +1 even, -1 odd under x -> -x
};

// H = -hbar^2/2 d^2/dx^2 + s cos(x) on the circle [0, 2 pi), spectral kinetic term.
// The separatrix top (0, 0) sits at energy E0 = s with expansion rate sqrt(s).
class GridOperator {
public:
    GridOperator(double hbar, int n_grid, double potential_strength);

    int size() const { return n_; }
    double hbar() const { return hbar_; }
    double potential_strength() const { return strength_; }
    double dx() const;
    // Nodes x_j = j dx mapped to [-pi, pi).
    const Eigen::VectorXd& x() const { return x_; }
    const Eigen::VectorXd& potential() const { return potential_; }
    // hbar^2 k^2 / 2 in FFT order
    const Eigen::VectorXd& kinetic() const { return kinetic_; }
    double k_max() const { return n_ / 2; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;
    double inner_norm_sq(const Eigen::VectorXcd& psi) const;
    cplx inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const;
    double energy(const Eigen::VectorXcd& psi) const;
    double energy_variance(const Eigen::VectorXcd& psi) const;

    // Dense diagonalization of both parity sectors, computed once and cached.
    const Spectrum& spectrum() const;

private:
    double hbar_;
    int n_;
    double strength_;
    Eigen::VectorXd x_;
    Eigen::VectorXd potential_;
    Eigen::VectorXd kinetic_;
    mutable std::once_flag spectrum_once_;
    mutable std::shared_ptr<Spectrum> spectrum_;
};

// Smallest power of two >= 6 / hbar.
int default_grid_size(double hbar);

GridOperator build_pendulum(double hbar, int n_grid = 0, double potential_strength = 1.0);

// Normalized Gaussian (pi hbar)^{-1/4} e^{-(x - x0)^2 / 2 hbar + i xi0 (x - x0) / hbar},
// periodized with three images on each side.
Eigen::VectorXcd grid_gaussian(const GridOperator& H, double x0 = 0.0, double xi0 = 0.0);

struct EvolveInfo {
    int steps = 0;
    double step_change = 0.0;  // ||psi_n - psi_{n/2}|| at the accepted step count
};

// Fourth-order (Yoshida) split-step propagation; the step count doubles until the state
// changes by less than 1e-9.
Eigen::VectorXcd grid_evolve(const GridOperator& H, const Eigen::VectorXcd& psi, double t,
                             EvolveInfo* info = nullptr);

// <x^2> - <x>^2 with x taken in [-pi, pi).
double position_variance(const GridOperator& H, const Eigen::VectorXcd& psi);

// Least-squares slope of log Var(x) over t in [t0, t1] for the evolved state.
double variance_growth_rate(const GridOperator& H, const Eigen::VectorXcd& psi0, double t0 = 1.0,
                            double t1 = 2.0, int samples = 11);

struct SpectralData {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd vectors;
    Eigen::VectorXi parity;
    double lower = 0.0;
    double upper = 0.0;
    // An eigenvalue lies within 1e-9 of a window edge.
    bool boundary_flag = false;
    // Window reaches energies where the grid spectrum is no longer semiclassically accurate.
    bool beyond_resolution = false;
    double max_residual = 0.0;
    double dx = 0.0;

    int count() const { return static_cast<int>(eigenvalues.size()); }
    Eigen::VectorXcd coefficients(const Eigen::VectorXcd& psi) const;
    Eigen::VectorXd masses(const Eigen::VectorXcd& psi) const;
};

SpectralData eig_window(const GridOperator& H, double E0, double halfwidth);

// <phi_m1, Op^w((x xi)^alpha) phi_m2> by quadrature of
// int X^alpha (i hbar d/ds)^alpha [phi_m1(X + s/2) phi_m2(X - s/2)]_{s=0} dX.
struct WeylElement {
    cplx value;
    double convergence = 0.0;  // |N-point - 2N-point|
    bool converged = false;
};

WeylElement grid_weyl_element(int alpha, int m1, int m2, double hbar);
cplx grid_weyl_matrix_element(int alpha, int m1, int m2, double hbar);

// Husimi mass of the box |x - x0| <= b, |xi - xi0| <= b, from the Gabor transform on the grid.
double grid_box_mass(const GridOperator& H, const Eigen::VectorXcd& psi, double halfwidth,
                     double x0 = 0.0, double xi0 = 0.0);

struct GridQuasimode {
    Eigen::VectorXcd state;  // unnormalized
    double E_center = 0.0;
    double T = 0.0;
    double norm_sq = 0.0;
    double width = 0.0;  // ||(H - E) Psi|| / ||Psi||, from the spectral decomposition
};

// int chi(t / T) e^{i t E / hbar} e^{-i t H / hbar} psi0 dt through the eigenbasis.
GridQuasimode grid_quasimode(const GridOperator& H, const quasimode::CutoffFunction& chi,
                             double T, double E_center, const Eigen::VectorXcd& psi0);

// int_{-1}^{1} chi(s) cos(omega s) ds by the trapezoid rule on the cutoff samples.
double cutoff_transform(const quasimode::CutoffFunction& chi, double omega);

}  // namespace scarforge::grid1d
