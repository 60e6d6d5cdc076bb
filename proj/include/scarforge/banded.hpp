#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

namespace scarforge {

using cplx = std::complex<double>;

// Band matrix in the number basis. Band k stores A(r, r+k) for k >= 0 and
// A(r+|k|, r) for k < 0, indexed by r = min(row, col).
class BandedOperator {
public:
    explicit BandedOperator(int dim = 0);

    static BandedOperator identity(int dim);

    int dim() const { return dim_; }
    bool hermitian() const { return hermitian_; }
    void set_hermitian(bool flag) { hermitian_ = flag; }

    void set_band(int k, Eigen::VectorXcd values);
    void add_to_band(int k, const Eigen::VectorXcd& values);
    bool has_band(int k) const { return bands_.count(k) != 0; }
    const Eigen::VectorXcd& band(int k) const;
    std::vector<int> offsets() const;
    int bandwidth() const;

    cplx operator()(int row, int col) const;

    // True when every stored offset is even.
    bool parity_preserving() const;
    // max |band(-k) - conj(band(k))| relative to the largest entry.
    double hermiticity_defect() const;

    void apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

    BandedOperator crop(int new_dim) const;
    BandedOperator adjoint() const;
    Eigen::MatrixXcd to_dense() const;
    void prune(double tol = 0.0);

    // Gershgorin enclosure of the real spectrum (hermitian operators).
    std::pair<double, double> gershgorin_bounds() const;

    BandedOperator& operator+=(const BandedOperator& other);
    BandedOperator& operator*=(cplx s);

    friend BandedOperator operator*(const BandedOperator& lhs, const BandedOperator& rhs);
    friend BandedOperator operator+(BandedOperator lhs, const BandedOperator& rhs);
    friend BandedOperator operator*(cplx s, BandedOperator op);

private:
    int dim_;
    bool hermitian_ = false;
    std::map<int, Eigen::VectorXcd> bands_;
};

}  // namespace scarforge
