#pragma once

#include "scarforge/cutoff.hpp"
#include "scarforge/fock.hpp"
#include "scarforge/qnf.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace scarforge::quasimode {

struct QuasimodeReport {
    std::string route;  // "fock" or "gram"
    double E_center = 0.0;
    double theta = 0.0;  // (E_center - q0) / hbar
    double hbar = 0.0;
    double T = 0.0;
    double norm_sq = 0.0;
    double predicted_norm_sq = 0.0;  // T S1(q1, theta) ||chi||^2
    double width = 0.0;              // ||(Q - E) Psi|| / ||Psi||
    double ibp_width = 0.0;          // (hbar / T) ||Psi_{chi'}|| / ||Psi||
    double predicted_width = 0.0;    // (hbar / T) ||chi'|| / ||chi||
    int dim = 0;
    int time_nodes = 0;
    bool localization_computed = false;
    qnf::LocalizationReport localization;
};

struct Quasimode {
    fock::FockState state;  // unnormalized Psi
    QuasimodeReport report;
};

struct QuasimodeOptions {
    // E_center defaults to q0 when unset.
    bool has_energy = false;
    double E_center = 0.0;
    double epsilon_prime = 0.1;  // box scale for the localization diagnostic
    bool compute_localization = true;
    int min_dim = 64;
    int dim_cap = 65536;
};

constexpr double kNodesPerMollifier = 16.0;

// min(0.05, 1 / (10 (1 + |theta|))), refined so the mollifier of chi spans
// kNodesPerMollifier time nodes.
double time_step(double theta, const CutoffFunction& chi, double T);

// Psi = int chi(t / T) e^{i t theta} psi_t dt with psi_t = exp(-i t Q / hbar) phi_0, by the
// trapezoid rule; psi_{-t} is the time-reversal partner of psi_t.
Quasimode build_quasimode(const qnf::NormalFormCoefficients& coeffs, const CutoffFunction& chi,
                          double T, double hbar, const QuasimodeOptions& options = {});

// Quadratic model Q = q1 Op(x xi) through the Gram matrix <psi_s, psi_t> = cosh(q1 (t - s))^{-1/2}.
// Valid for any T; the width follows from the integration-by-parts identity.
QuasimodeReport quasimode_gram(double q1, const CutoffFunction& chi, double T, double theta,
                               double hbar);

struct WidthScanRow {
    double hbar = 0.0;
    double T = 0.0;
    double norm_sq = 0.0;
    double predicted_norm_sq = 0.0;
    double width = 0.0;
    double predicted_width = 0.0;
    // width |log hbar| / hbar for smooth cutoffs, width |log hbar|^{1/2} / hbar for sharp ones
    double width_normalized = 0.0;
    double outside_mass = 0.0;
    int dim = 0;
};

// T = T_{epsilon'} at each hbar; parallel over hbar.
std::vector<WidthScanRow> width_scan(const qnf::NormalFormCoefficients& coeffs,
                                     double epsilon_prime, const std::vector<double>& hbar_list,
                                     const CutoffFunction& chi, bool compute_localization = false);

// pi lambda (1 + 2 epsilon')
double width_law_limit(double lambda, double epsilon_prime);

// Truncated homogeneous state Phi = w(x / R) (g_sigma * |x|^{-1/2 + i theta}), with w Gaussian and
// g_sigma the Gaussian momentum window of scale R (position kernel width sigma = hbar / R).
struct CdvpState {
    Eigen::VectorXd x;
    Eigen::VectorXcd values;
    Eigen::VectorXd weights;  // trapezoid weights in x
    double theta = 0.0;
    double hbar = 0.0;
    double radius = 1.0;
    double q1 = 1.0;
    double norm_sq = 0.0;
    double width = 0.0;  // ||(Q - hbar q1 theta) Phi|| / ||Phi||, Q = q1 Op(x xi)
};

// grid_size = 0 picks the default resolution.
CdvpState cdvp_state(double theta, double hbar, double cutoff_radius = 1.0, int grid_size = 0,
                     double q1 = 1.0);

// E |y - Z|^{-1/2 + i theta}, Z standard normal.
std::complex<double> smoothed_power(double y, double theta);

}  // namespace scarforge::quasimode
