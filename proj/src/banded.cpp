#include "scarforge/banded.hpp"

#include "scarforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scarforge {

BandedOperator::BandedOperator(int dim) : dim_(dim) {
    if (dim < 0) throw InvalidDimension("negative dimension");
}

BandedOperator BandedOperator::identity(int dim) {
    BandedOperator id(dim);
    id.set_band(0, Eigen::VectorXcd::Ones(dim));
    id.set_hermitian(true);
    return id;
}

void BandedOperator::set_band(int k, Eigen::VectorXcd values) {
    if (std::abs(k) >= dim_ || values.size() != dim_ - std::abs(k))
        throw InvalidDimension("band " + std::to_string(k) + " has wrong length");
    bands_[k] = std::move(values);
}

void BandedOperator::add_to_band(int k, const Eigen::VectorXcd& values) {
    auto it = bands_.find(k);
    if (it == bands_.end())
        set_band(k, values);
    else
        it->second += values;
}

const Eigen::VectorXcd& BandedOperator::band(int k) const {
    auto it = bands_.find(k);
    if (it == bands_.end()) throw std::out_of_range("no band at offset " + std::to_string(k));
    return it->second;
}

std::vector<int> BandedOperator::offsets() const {
    std::vector<int> out;
    for (const auto& kv : bands_) out.push_back(kv.first);
    return out;
}

int BandedOperator::bandwidth() const {
    int w = 0;
    for (const auto& kv : bands_) w = std::max(w, std::abs(kv.first));
    return w;
}

cplx BandedOperator::operator()(int row, int col) const {
    auto it = bands_.find(col - row);
    if (it == bands_.end()) return {0.0, 0.0};
    return it->second[std::min(row, col)];
}

bool BandedOperator::parity_preserving() const {
    return std::all_of(bands_.begin(), bands_.end(),
                       [](const auto& kv) { return kv.first % 2 == 0; });
}

double BandedOperator::hermiticity_defect() const {
    double scale = 0.0, defect = 0.0;
    for (const auto& [k, b] : bands_) {
        scale = std::max(scale, b.cwiseAbs().maxCoeff());
        auto it = bands_.find(-k);
        if (it == bands_.end()) {
            defect = std::max(defect, b.cwiseAbs().maxCoeff());
            continue;
        }
        defect = std::max(defect, (it->second - b.conjugate()).cwiseAbs().maxCoeff());
    }
    return scale > 0.0 ? defect / scale : 0.0;
}

void BandedOperator::apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
    if (v.size() != dim_) throw InvalidDimension("vector size does not match operator");
    out.setZero(dim_);
    const cplx* in = v.data();
    cplx* o = out.data();
    for (const auto& [k, b] : bands_) {
        const cplx* bb = b.data();
        const int len = dim_ - std::abs(k);
        if (k >= 0) {
            for (int r = 0; r < len; ++r) o[r] += bb[r] * in[r + k];
        } else {
            const int s = -k;
            for (int r = 0; r < len; ++r) o[r + s] += bb[r] * in[r];
        }
    }
}

Eigen::VectorXcd BandedOperator::apply(const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out;
    apply(v, out);
    return out;
}

BandedOperator BandedOperator::crop(int new_dim) const {
    if (new_dim > dim_) throw InvalidDimension("crop cannot enlarge an operator");
    BandedOperator out(new_dim);
    out.hermitian_ = hermitian_;
    for (const auto& [k, b] : bands_) {
        if (std::abs(k) >= new_dim) continue;
        out.bands_[k] = b.head(new_dim - std::abs(k));
    }
    return out;
}

BandedOperator BandedOperator::adjoint() const {
    BandedOperator out(dim_);
    out.hermitian_ = hermitian_;
    for (const auto& [k, b] : bands_) out.bands_[-k] = b.conjugate();
    return out;
}

Eigen::MatrixXcd BandedOperator::to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (const auto& [k, b] : bands_) {
        const int len = dim_ - std::abs(k);
        for (int r = 0; r < len; ++r) {
            if (k >= 0)
                m(r, r + k) = b[r];
            else
                m(r - k, r) = b[r];
        }
    }
    return m;
}

void BandedOperator::prune(double tol) {
    for (auto it = bands_.begin(); it != bands_.end();) {
        if (it->second.size() == 0 || it->second.cwiseAbs().maxCoeff() <= tol)
            it = bands_.erase(it);
        else
            ++it;
    }
}

std::pair<double, double> BandedOperator::gershgorin_bounds() const {
    Eigen::VectorXd centre = Eigen::VectorXd::Zero(dim_);
    Eigen::VectorXd radius = Eigen::VectorXd::Zero(dim_);
    for (const auto& [k, b] : bands_) {
        const int len = dim_ - std::abs(k);
        for (int r = 0; r < len; ++r) {
            if (k == 0) {
                centre[r] = b[r].real();
                radius[r] += std::abs(b[r].imag());
            } else {
                radius[k > 0 ? r : r - k] += std::abs(b[r]);
            }
        }
    }
    if (dim_ == 0) return {0.0, 0.0};
    return {(centre - radius).minCoeff(), (centre + radius).maxCoeff()};
}

BandedOperator& BandedOperator::operator+=(const BandedOperator& other) {
    if (other.dim_ != dim_) throw InvalidDimension("operator dimensions differ");
    for (const auto& [k, b] : other.bands_) add_to_band(k, b);
    hermitian_ = hermitian_ && other.hermitian_;
    return *this;
}

BandedOperator& BandedOperator::operator*=(cplx s) {
    for (auto& kv : bands_) kv.second *= s;
    if (s.imag() != 0.0) hermitian_ = false;
    return *this;
}

BandedOperator operator*(const BandedOperator& lhs, const BandedOperator& rhs) {
    if (lhs.dim_ != rhs.dim_) throw InvalidDimension("operator dimensions differ");
    const int n = lhs.dim_;
    BandedOperator out(n);
    for (const auto& [ka, a] : lhs.bands_) {
        for (const auto& [kb, b] : rhs.bands_) {
            const int kc = ka + kb;
            if (std::abs(kc) >= n) continue;
            auto it = out.bands_.find(kc);
            if (it == out.bands_.end())
                it = out.bands_.emplace(kc, Eigen::VectorXcd::Zero(n - std::abs(kc))).first;
            Eigen::VectorXcd& c = it->second;
            const int i_lo = std::max({0, -ka, -kc});
            const int i_hi = std::min({n, n - ka, n - kc});
            for (int i = i_lo; i < i_hi; ++i) {
                const int l = i + ka;
                const int j = l + kb;
                c[std::min(i, j)] += a[std::min(i, l)] * b[std::min(l, j)];
            }
        }
    }
    return out;
}

BandedOperator operator+(BandedOperator lhs, const BandedOperator& rhs) {
    lhs += rhs;
    return lhs;
}

BandedOperator operator*(cplx s, BandedOperator op) {
    op *= s;
    return op;
}

}  // namespace scarforge
