#pragma once

#include "scarforge/banded.hpp"
#include "scarforge/chebyshev.hpp"
#include "scarforge/fock.hpp"

#include <map>
#include <memory>
#include <vector>

namespace scarforge::qnf {

struct Longitudinal {
    int n = 0;
    double q0 = 1.0;
    double action_phase = 0.0;
};

struct NormalFormCoefficients {
    // q[alpha - 1][i] is the coefficient of hbar^i in q^alpha.
    std::vector<std::vector<double>> q;
    double lambda0 = 1.0;
    double E0 = 1.0;
    // |q0 - E0| <= q0_constant * hbar
    double q0_constant = 1.0;
    Longitudinal longitudinal;

    int N() const { return static_cast<int>(q.size()); }
    double q_at(int alpha, double hbar) const;
    // Throws ValidityError when an invariant fails at this hbar.
    void validate(double hbar) const;
    NormalFormCoefficients nonquadratic_part() const;

    static NormalFormCoefficients quadratic(double lambda);
    // Constant (hbar-independent) q^alpha, q^1 = values[0].
    static NormalFormCoefficients constant(const std::vector<double>& values);
};

BandedOperator build_q_operator(const NormalFormCoefficients& coeffs, double hbar, int dim);

// Number-basis dimension used for evolution up to |t|.
int auto_dim(double lambda, double t, int min_dim = 64, int cap = 65536);

constexpr double kOverflowMass = 1e-8;

// exp(-i t Q / hbar) psi0 at fixed dimension; hbar is taken from psi0.
fock::FockState propagate_exact(const BandedOperator& q_op, const fock::FockState& psi0, double t);

// Evolution under Q^(N) with the dimension grown as the state squeezes.
class GrowingPropagator {
public:
    GrowingPropagator(NormalFormCoefficients coeffs, double hbar, int min_dim = 64,
                      int cap = 65536);

    // Advances psi (currently at time t_now) by dt; returns the new state.
    fock::FockState step(const fock::FockState& psi, double t_now, double dt);
    fock::FockState evolve(const fock::FockState& psi0, double t, double max_dt = 0.25);

    const BandedOperator& q_operator(int dim);
    int dim_for(double t) const;

private:
    const ChebyshevPropagator& propagator(int dim);

    NormalFormCoefficients coeffs_;
    double hbar_;
    int min_dim_;
    int cap_;
    std::map<int, std::unique_ptr<ChebyshevPropagator>> cache_;
};

fock::FockState propagate_auto(const NormalFormCoefficients& coeffs, const fock::FockState& psi0,
                               double t, int min_dim = 64, int cap = 65536);

// Polynomial in (t, hbar): terms[{p, q}] multiplies t^p hbar^q.
struct BivariatePoly {
    std::map<std::pair<int, int>, cplx> terms;

    cplx operator()(double t, double hbar) const;
    int t_degree() const;
    // Lowest hbar power with a coefficient above tol; -1 when identically zero.
    int lowest_hbar_power(double tol = 1e-14) const;
};

struct DysonExpansion {
    int l = 1;
    double hbar = 0.0;
    NormalFormCoefficients coeffs;
    // m -> c_m(t, hbar), the coefficient of phi_{2m}
    std::map<int, BivariatePoly> coefficients;
    // Leading-remainder constant: error ~ C_l (|t| hbar)^{l+1}
    double remainder_bound = 0.0;

    std::map<int, int> hbar_orders() const;
    // phi_0 + sum_m c_m(t) phi_{2m}
    fock::FockState inner_state(double t, int dim) const;
    // U_q(t) applied to inner_state
    fock::FockState reconstruct(double t, int dim) const;
};

constexpr int kMaxDysonOrder = 4;

DysonExpansion dyson_expand(const NormalFormCoefficients& coeffs, double hbar, int l);

struct LocalizationReport {
    double epsilon_prime = 0.0;
    double box_halfwidth = 0.0;
    double outside_mass = 0.0;
    double t = 0.0;
};

LocalizationReport localization_mass(const fock::FockState& state, double epsilon_prime,
                                     double hbar, double t = 0.0);

double ehrenfest_time(double epsilon_prime, double lambda, double hbar);

}  // namespace scarforge::qnf
