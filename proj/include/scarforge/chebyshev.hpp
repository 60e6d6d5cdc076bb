#pragma once

#include "scarforge/banded.hpp"

#include <vector>

namespace scarforge {

// J_0(z) .. J_kmax(z) by Miller's backward recurrence.
std::vector<double> bessel_j_sequence(double z, int kmax);

// Action of exp(-i tau H) for hermitian banded H via a Chebyshev expansion.
class ChebyshevPropagator {
public:
    explicit ChebyshevPropagator(const BandedOperator& h, double max_phase_per_step = 400.0);

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v, double tau) const;

    const BandedOperator& op() const { return h_; }
    double centre() const { return centre_; }
    double half_width() const { return half_width_; }

private:
    Eigen::VectorXcd single_step(const Eigen::VectorXcd& v, double tau) const;

    BandedOperator h_;
    double centre_ = 0.0;
    double half_width_ = 0.0;
    double max_phase_;
};

}  // namespace scarforge
