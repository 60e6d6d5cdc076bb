#pragma once

#include "scarforge/grid1d.hpp"

#include <Eigen/Dense>
#include <vector>

namespace scarforge::scarscan {

// I = [E0 - c2 hbar / |log hbar|, E0 + c2 hbar / |log hbar|] cut into K equal pieces I_k, k = 1..K.
struct IntervalPartition {
    double E0 = 0.0;
    double c2 = 0.0;
    int K = 1;
    double hbar = 0.0;
    double C_gamma = 0.0;

    double half_length() const;
    double lower() const { return E0 - half_length(); }
    double upper() const { return E0 + half_length(); }
    double sub_width() const { return 2.0 * half_length() / K; }
    // e_k = E0 + (c2 hbar / |log hbar|)(-1 + (2k - 1) / K)
    double center(int k) const;
    double sub_lower(int k) const;
    double sub_upper(int k) const;
    // 1..K, or 0 outside I; interior endpoints belong to the lower piece.
    int index_of(double E) const;
};

IntervalPartition make_partition(double E0, double c2, int K, double hbar, double C_gamma = 0.0);

// (1 / K)(1 - (C_gamma / c2)^2)
double mass_bound(double c2, int K, double C_gamma);

struct WeightOptimum {
    double c2 = 0.0;
    int K = 1;
    double bound = 0.0;
    // continuous relaxation K = c2 / epsilon: c2 = sqrt(3) C_gamma, bound = 2 eps / (3 sqrt(3) C_gamma)
    double continuous_c2 = 0.0;
    double continuous_bound = 0.0;
};

// Maximizes mass_bound over c2 in [C_gamma (1 + 1e-6), 10 C_gamma] with K = floor(c2 / eps) + 1.
WeightOptimum optimize_weight(double epsilon, double C_gamma);

// C_gamma = pi (1 + 3 epsilon'), the width constant of the optimized quasimode with margin.
double default_C_gamma(double epsilon_prime);

struct ScarWeightResult {
    int chosen_k = 0;
    double projected_mass = 0.0;
    std::vector<double> interval_masses;  // k = 1..K
    double interval_mass = 0.0;           // ||Pi_I psi||^2
    double complement_mass = 0.0;         // ||Pi_{I^c} psi||^2
    double mass_bound = 0.0;
    double scar_mass = 0.0;               // Husimi box mass of the normalized projection
    bool scar_mass_computed = false;
    double width_achieved = 0.0;          // ||(H - e_k) psi~||
    double width_limit = 0.0;             // (c2 / K) hbar / |log hbar|
    double epsilon = 0.0;
    double c2 = 0.0;
    int K = 0;
    double C_gamma = 0.0;
    Eigen::VectorXcd projected_state;     // normalized
};

struct ProjectOptions {
    double epsilon = 0.0;
    double scar_box = 0.3;
    // Husimi mass of the projection is computed on this grid when set.
    const grid1d::GridOperator* grid = nullptr;
};

// The spectral data must cover I. Throws ValidityError when I contains no spectrum.
ScarWeightResult project_and_select(const grid1d::SpectralData& spectral,
                                    const IntervalPartition& partition, const Eigen::VectorXcd& psi,
                                    const ProjectOptions& options = {});

// End-to-end pendulum run: optimized cutoff, Ehrenfest-time quasimode at the separatrix top,
// partition with (c2, K) from optimize_weight, projection.
struct PendulumScarReport {
    double hbar = 0.0;
    double epsilon_prime = 0.0;
    double T = 0.0;
    double E_center = 0.0;
    double quasimode_width = 0.0;             // ||(H - E) psi|| for the normalized quasimode
    double quasimode_width_normalized = 0.0;  // width |log hbar| / hbar
    double quasimode_box_mass = 0.0;          // Husimi mass in the hbar^{epsilon'/3} box
    ScarWeightResult weight;
};

PendulumScarReport pendulum_scar(double hbar, double epsilon_prime, double epsilon,
                                 int n_grid = 0);

}  // namespace scarforge::scarscan
