#include "scarforge/grid1d.hpp"

#include "fftw_plan.hpp"
#include "scarforge/analytic.hpp"
#include "scarforge/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace scarforge::grid1d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_pow2(double v) {
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

// Kinetic action through one forward/backward transform pair.
class KineticApplier {
public:
    explicit KineticApplier(int n) : fwd_(n, FFTW_FORWARD), bwd_(n, FFTW_BACKWARD) {}

    // out = F^{-1} diag(mult) F psi
    template <class Mult>
    void apply(const cplx* psi, cplx* out, const Mult& mult) {
        const int n = fwd_.size();
        std::copy(psi, psi + n, fwd_.data());
        fwd_.execute();
        cplx* f = fwd_.data();
        cplx* b = bwd_.data();
        for (int k = 0; k < n; ++k) b[k] = f[k] * mult[k] / static_cast<double>(n);
        bwd_.execute();
        std::copy(b, b + n, out);
    }

private:
    detail::FftPlan fwd_;
    detail::FftPlan bwd_;
};

double periodic_offset(double x, double x0) {
    double d = std::fmod(x - x0 + std::numbers::pi, kTwoPi);
    if (d < 0) d += kTwoPi;
    return d - std::numbers::pi;
}

}  // namespace

GridOperator::GridOperator(double hbar, int n_grid, double potential_strength)
    : hbar_(hbar), n_(n_grid), strength_(potential_strength) {
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    if (!is_pow2(n_grid)) throw InvalidDimension("grid size must be a power of two");
    if (n_grid < 6.0 / hbar)
        throw ResolutionError("grid does not resolve momenta |xi| <= 3 (need n >= 6 / hbar)",
                              next_pow2(6.0 / hbar));
    x_.resize(n_);
    potential_.resize(n_);
    kinetic_.resize(n_);
    const double h = kTwoPi / n_;
    for (int j = 0; j < n_; ++j) {
        x_[j] = (j < n_ / 2 ? j : j - n_) * h;
        potential_[j] = strength_ * std::cos(x_[j]);
        const double k = j <= n_ / 2 ? j : j - n_;
        kinetic_[j] = 0.5 * hbar_ * hbar_ * k * k;
    }
}

double GridOperator::dx() const { return kTwoPi / n_; }

Eigen::VectorXcd GridOperator::apply(const Eigen::VectorXcd& psi) const {
    if (psi.size() != n_) throw InvalidDimension("state size differs from the grid");
    Eigen::VectorXcd out(n_);
    KineticApplier kin(n_);
    kin.apply(psi.data(), out.data(), kinetic_);
    out += (potential_.array() * psi.array()).matrix();
    return out;
}

double GridOperator::inner_norm_sq(const Eigen::VectorXcd& psi) const {
    return psi.squaredNorm() * dx();
}

cplx GridOperator::inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const {
    return a.dot(b) * dx();
}

double GridOperator::energy(const Eigen::VectorXcd& psi) const {
    return inner(psi, apply(psi)).real() / inner_norm_sq(psi);
}

double GridOperator::energy_variance(const Eigen::VectorXcd& psi) const {
    const double e = energy(psi);
    const Eigen::VectorXcd r = apply(psi) - e * psi;
    return inner_norm_sq(r) / inner_norm_sq(psi);
}

const Spectrum& GridOperator::spectrum() const {
    std::call_once(spectrum_once_, [this] {
        const int n = n_;
        // circulant kinetic kernel c(d) = (1/n) sum_k T_k e^{2 pi i k d / n}
        Eigen::VectorXd c(n);
        {
            detail::FftPlan bwd(n, FFTW_BACKWARD);
            for (int k = 0; k < n; ++k) bwd.data()[k] = kinetic_[k];
            bwd.execute();
            for (int d = 0; d < n; ++d) c[d] = bwd.data()[d].real() / n;
        }
        auto cc = [&](int d) { return c[((d % n) + n) % n]; };
        const int half = n / 2;

        auto sector = [&](int sign) {
            // even: a = 0..half, odd: a = 1..half-1
            const int first = sign > 0 ? 0 : 1;
            const int last = sign > 0 ? half : half - 1;
            const int m = last - first + 1;
            Eigen::MatrixXd h(m, m);
            auto scale = [&](int a) { return (a == 0 || a == half) ? 1.0 : std::sqrt(0.5); };
            for (int i = 0; i < m; ++i) {
                const int a = first + i;
                for (int j = 0; j < m; ++j) {
                    const int b = first + j;
                    double v;
                    if (sign > 0) {
                        // sum over the reflection orbits {a, -a} x {b, -b}
                        v = 0.0;
                        for (int sa : {1, -1}) {
                            if (sa < 0 && (a == 0 || a == half)) continue;
                            for (int sb : {1, -1}) {
                                if (sb < 0 && (b == 0 || b == half)) continue;
                                v += cc(sa * a - sb * b);
                            }
                        }
                        v *= scale(a) * scale(b);
                    } else {
                        v = cc(a - b) - cc(a + b);
                    }
                    h(i, j) = v;
                }
                h(i, i) += potential_[a];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
            if (es.info() != Eigen::Success) throw Error("sector eigensolver failed");
            Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, m);
            const double norm = 1.0 / std::sqrt(dx());
            for (int i = 0; i < m; ++i) {
                const int a = first + i;
                const double s = scale(a) * norm;
                for (int col = 0; col < m; ++col) {
                    const double v = es.eigenvectors()(i, col) * s;
                    full(a, col) += v;
                    if (a != 0 && a != half) full(n - a, col) += sign * v;
                }
            }
            return std::make_pair(Eigen::VectorXd(es.eigenvalues()), full);
        };

        const auto even = sector(+1);
        const auto odd = sector(-1);
        const int total = static_cast<int>(even.first.size() + odd.first.size());
        std::vector<std::pair<double, int>> order;
        for (int i = 0; i < even.first.size(); ++i) order.emplace_back(even.first[i], i);
        for (int i = 0; i < odd.first.size(); ++i)
            order.emplace_back(odd.first[i], static_cast<int>(even.first.size()) + i);
        std::sort(order.begin(), order.end());
        auto sp = std::make_shared<Spectrum>();
        sp->eigenvalues.resize(total);
        sp->vectors.resize(n, total);
        sp->parity.resize(total);
        for (int i = 0; i < total; ++i) {
            const int idx = order[i].second;
            sp->eigenvalues[i] = order[i].first;
            if (idx < even.first.size()) {
                sp->vectors.col(i) = even.second.col(idx);
                sp->parity[i] = 1;
            } else {
                sp->vectors.col(i) = odd.second.col(idx - even.first.size());
                sp->parity[i] = -1;
            }
        }
        spectrum_ = std::move(sp);
    });
    return *spectrum_;
}

int default_grid_size(double hbar) {
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    return next_pow2(6.0 / hbar);
}

GridOperator build_pendulum(double hbar, int n_grid, double potential_strength) {
    if (n_grid == 0) n_grid = default_grid_size(hbar);
    return GridOperator(hbar, n_grid, potential_strength);
}

Eigen::VectorXcd grid_gaussian(const GridOperator& H, double x0, double xi0) {
    const double hbar = H.hbar();
    const double pref = std::pow(std::numbers::pi * hbar, -0.25);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(H.size());
    for (int j = 0; j < H.size(); ++j) {
        const double d0 = periodic_offset(H.x()[j], x0);
        for (int img = -3; img <= 3; ++img) {
            const double d = d0 + img * kTwoPi;
            psi[j] += pref * std::exp(cplx(-0.5 * d * d / hbar, xi0 * d / hbar));
        }
    }
    return psi;
}

Eigen::VectorXcd grid_evolve(const GridOperator& H, const Eigen::VectorXcd& psi, double t,
                             EvolveInfo* info) {
    if (psi.size() != H.size()) throw InvalidDimension("state size differs from the grid");
    if (t == 0.0) {
        if (info) *info = {};
        return psi;
    }
    const int n = H.size();
    const double hbar = H.hbar();
    const double cbrt2 = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - cbrt2), w0 = -cbrt2 / (2.0 - cbrt2);
    KineticApplier kin(n);

    auto run = [&](int steps) {
        const double h = t / steps;
        auto pot_phase = [&](double tau) {
            Eigen::VectorXcd p(n);
            for (int j = 0; j < n; ++j) p[j] = std::exp(cplx(0.0, -tau * H.potential()[j] / hbar));
            return p;
        };
        auto kin_phase = [&](double tau) {
            Eigen::VectorXcd p(n);
            for (int j = 0; j < n; ++j) p[j] = std::exp(cplx(0.0, -tau * H.kinetic()[j] / hbar));
            return p;
        };
        const Eigen::VectorXcd v_edge = pot_phase(0.5 * w1 * h);
        const Eigen::VectorXcd v_mid = pot_phase(0.5 * (w1 + w0) * h);
        const Eigen::VectorXcd v_join = pot_phase(w1 * h);
        const Eigen::VectorXcd k1 = kin_phase(w1 * h), k0 = kin_phase(w0 * h);
        Eigen::VectorXcd s = psi;
        s.array() *= v_edge.array();
        for (int step = 0; step < steps; ++step) {
            kin.apply(s.data(), s.data(), k1);
            s.array() *= v_mid.array();
            kin.apply(s.data(), s.data(), k0);
            s.array() *= v_mid.array();
            kin.apply(s.data(), s.data(), k1);
            s.array() *= (step + 1 == steps ? v_edge : v_join).array();
        }
        return s;
    };

    int steps = std::max(4, static_cast<int>(std::ceil(std::abs(t) / 0.05)));
    Eigen::VectorXcd prev = run(steps);
    for (int it = 0; it < 14; ++it) {
        steps *= 2;
        Eigen::VectorXcd next = run(steps);
        const double change = std::sqrt(H.inner_norm_sq(next - prev));
        prev = std::move(next);
        if (change < 1e-9) {
            if (info) *info = {steps, change};
            return prev;
        }
        if (info) *info = {steps, change};
    }
    return prev;
}

double position_variance(const GridOperator& H, const Eigen::VectorXcd& psi) {
    const Eigen::VectorXd rho = psi.cwiseAbs2();
    const double total = rho.sum();
    const double mean = rho.dot(H.x()) / total;
    return rho.dot(H.x().cwiseAbs2()) / total - mean * mean;
}

double variance_growth_rate(const GridOperator& H, const Eigen::VectorXcd& psi0, double t0,
                            double t1, int samples) {
    if (samples < 2 || !(t1 > t0)) throw DomainError("need t1 > t0 and at least two samples");
    Eigen::VectorXcd psi = grid_evolve(H, psi0, t0);
    std::vector<double> ts, ls;
    const double dt = (t1 - t0) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        if (i > 0) psi = grid_evolve(H, psi, dt);
        ts.push_back(t0 + i * dt);
        ls.push_back(std::log(position_variance(H, psi)));
    }
    double mt = 0, ml = 0;
    for (int i = 0; i < samples; ++i) {
        mt += ts[i];
        ml += ls[i];
    }
    mt /= samples;
    ml /= samples;
    double num = 0, den = 0;
    for (int i = 0; i < samples; ++i) {
        num += (ts[i] - mt) * (ls[i] - ml);
        den += (ts[i] - mt) * (ts[i] - mt);
    }
    return num / den;
}

Eigen::VectorXcd SpectralData::coefficients(const Eigen::VectorXcd& psi) const {
    return vectors.transpose().cast<cplx>() * psi * dx;
}

Eigen::VectorXd SpectralData::masses(const Eigen::VectorXcd& psi) const {
    return coefficients(psi).cwiseAbs2();
}

SpectralData eig_window(const GridOperator& H, double E0, double halfwidth) {
    if (!(halfwidth > 0.0)) throw DomainError("window halfwidth must be positive");
    const Spectrum& sp = H.spectrum();
    SpectralData out;
    out.lower = E0 - halfwidth;
    out.upper = E0 + halfwidth;
    out.dx = H.dx();
    // resolved range: kinetic energies up to half the grid cutoff
    const double resolved = H.potential_strength() + 0.5 * H.kinetic()[H.size() / 4];
    out.beyond_resolution = out.upper > resolved;
    std::vector<int> idx;
    for (int i = 0; i < sp.eigenvalues.size(); ++i) {
        const double e = sp.eigenvalues[i];
        if (std::abs(e - out.lower) < 1e-9 || std::abs(e - out.upper) < 1e-9) out.boundary_flag = true;
        if (e >= out.lower && e <= out.upper) idx.push_back(i);
    }
    const int m = static_cast<int>(idx.size());
    out.eigenvalues.resize(m);
    out.vectors.resize(H.size(), m);
    out.parity.resize(m);
    for (int i = 0; i < m; ++i) {
        out.eigenvalues[i] = sp.eigenvalues[idx[i]];
        out.vectors.col(i) = sp.vectors.col(idx[i]);
        out.parity[i] = sp.parity[idx[i]];
        const Eigen::VectorXcd v = out.vectors.col(i).cast<cplx>();
        const Eigen::VectorXcd r = H.apply(v) - out.eigenvalues[i] * v;
        out.max_residual = std::max(out.max_residual, std::sqrt(H.inner_norm_sq(r)));
    }
    return out;
}

WeylElement grid_weyl_element(int alpha, int m1, int m2, double hbar) {
    if (alpha < 1 || alpha > 3) throw UnsupportedOrder("grid_weyl_matrix_element supports alpha <= 3");
    if (m1 < 0 || m2 < 0 || m1 > 10 || m2 > 10) throw DomainError("indices must lie in [0, 10]");
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    const int top = std::max(m1, m2) + alpha;
    const double sq = std::sqrt(hbar);

    // k-th derivative of phi_m as coefficients over phi_0..phi_top
    auto derivative = [&](int m, int k) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(top + 1);
        c[m] = 1.0;
        for (int r = 0; r < k; ++r) {
            Eigen::VectorXd d = Eigen::VectorXd::Zero(top + 1);
            for (int j = 0; j <= top; ++j) {
                if (c[j] == 0.0) continue;
                if (j > 0) d[j - 1] += std::sqrt(static_cast<double>(j)) * c[j];
                if (j < top) d[j + 1] -= std::sqrt(j + 1.0) * c[j];
            }
            c = d / std::sqrt(2.0 * hbar);
        }
        return c;
    };

    auto integrate = [&](int points) {
        const double L = sq * (std::sqrt(2.0 * top + 1.0) + 9.0);
        const double h = 2.0 * L / (points - 1);
        Eigen::VectorXd x(points);
        for (int i = 0; i < points; ++i) x[i] = -L + i * h;
        Eigen::MatrixXd phi(points, top + 1);
        for (int j = 0; j <= top; ++j) phi.col(j) = analytic::hermite_position(j, hbar, x);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(points);
        double binom = 1.0;
        for (int k = 0; k <= alpha; ++k) {
            const double coef = binom * std::pow(0.5, k) * std::pow(-0.5, alpha - k);
            const Eigen::VectorXd f = phi * derivative(m1, k);
            const Eigen::VectorXd g = phi * derivative(m2, alpha - k);
            acc += coef * f.cwiseProduct(g);
            binom = binom * (alpha - k) / (k + 1);
        }
        double sum = 0.0;
        for (int i = 0; i < points; ++i) {
            const double w = (i == 0 || i == points - 1) ? 0.5 * h : h;
            sum += w * std::pow(x[i], alpha) * acc[i];
        }
        return std::pow(cplx(0.0, hbar), alpha) * sum;
    };
    WeylElement out;
    const cplx coarse = integrate(401);
    out.value = integrate(801);
    out.convergence = std::abs(out.value - coarse);
    out.converged = out.convergence <= 1e-12 * std::pow(hbar, alpha) * (1.0 + std::abs(out.value) / std::pow(hbar, alpha));
    return out;
}

cplx grid_weyl_matrix_element(int alpha, int m1, int m2, double hbar) {
    const WeylElement e = grid_weyl_element(alpha, m1, m2, hbar);
    if (!e.converged)
        throw ValidityError("Weyl quadrature did not converge (difference " +
                            std::to_string(e.convergence) + ")");
    return e.value;
}

double grid_box_mass(const GridOperator& H, const Eigen::VectorXcd& psi, double halfwidth,
                     double x0, double xi0) {
    const int n = H.size();
    const double hbar = H.hbar();
    const double dx = H.dx();
    const double pref = std::pow(std::numbers::pi * hbar, -0.25);
    // Window support where the Gaussian exceeds 1e-18 of its peak.
    const int W = std::min(n / 2 - 1, static_cast<int>(std::ceil(std::sqrt(2.0 * hbar * 41.5) / dx)) + 1);

    // int_{xi0-b}^{xi0+b} e^{-i xi s / hbar} d xi as a function of s = m dx
    Eigen::VectorXcd kernel(4 * W + 1);
    for (int m = -2 * W; m <= 2 * W; ++m) {
        const double s = m * dx;
        const double re = m == 0 ? 2.0 * halfwidth : 2.0 * hbar * std::sin(halfwidth * s / hbar) / s;
        kernel[m + 2 * W] = re * std::exp(cplx(0.0, -xi0 * s / hbar));
    }

    Eigen::VectorXcd g(2 * W + 1);
    // Husimi density integrated over the xi-window at the centre c.
    auto slice = [&](double c) {
        const long j0 = std::lround(c / dx);
        for (int m = -W; m <= W; ++m) {
            const double d = (j0 + m) * dx - c;
            const long j = ((j0 + m) % n + n) % n;
            g[m + W] = pref * std::exp(-0.5 * d * d / hbar) * psi[j];
        }
        double total = 0.0;
        for (int a = 0; a <= 2 * W; ++a) {
            if (g[a] == 0.0) continue;
            cplx acc = 0.0;
            for (int b = 0; b <= 2 * W; ++b) acc += std::conj(g[b]) * kernel[a - b + 2 * W];
            total += std::real(g[a] * acc);
        }
        return total * dx * dx / (kTwoPi * hbar);
    };

    const double bx = std::min(halfwidth, std::numbers::pi);
    const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * bx / (0.5 * std::sqrt(hbar)))));
    const double pw = 2.0 * bx / panels;
    double mass = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = x0 - bx + p * pw;
        mass += boost::math::quadrature::gauss<double, 10>::integrate(slice, a, a + pw);
    }
    return mass / H.inner_norm_sq(psi);
}

double cutoff_transform(const quasimode::CutoffFunction& chi, double omega) {
    if (chi.sharp()) {
        const double a = chi.jump_position();
        return omega == 0.0 ? 2.0 * a : 2.0 * std::sin(a * omega) / omega;
    }
    const double h = chi.step();
    // beyond the sampling resolution the transform of a smooth cutoff is negligible
    if (std::abs(omega) * h > 0.5 * std::numbers::pi) return 0.0;
    double sum = 0.0;
    const auto& v = chi.values();
    for (int i = 0; i < chi.size(); ++i) {
        const double w = (i == 0 || i == chi.size() - 1) ? 0.5 : 1.0;
        sum += w * v[i] * std::cos(omega * chi.node(i));
    }
    return sum * h;
}

GridQuasimode grid_quasimode(const GridOperator& H, const quasimode::CutoffFunction& chi,
                             double T, double E_center, const Eigen::VectorXcd& psi0) {
    if (!(T > 0.0)) throw DomainError("quasimode time T must be positive");
    const Spectrum& sp = H.spectrum();
    const Eigen::VectorXcd c = sp.vectors.transpose().cast<cplx>() * psi0 * H.dx();
    Eigen::VectorXcd a(c.size());
    double norm_sq = 0.0, res_sq = 0.0;
    for (int j = 0; j < c.size(); ++j) {
        const double de = sp.eigenvalues[j] - E_center;
        a[j] = c[j] * T * cutoff_transform(chi, T * de / H.hbar());
        norm_sq += std::norm(a[j]);
        res_sq += std::norm(a[j]) * de * de;
    }
    GridQuasimode out;
    out.state = sp.vectors.cast<cplx>() * a;
    out.E_center = E_center;
    out.T = T;
    out.norm_sq = norm_sq;
    out.width = std::sqrt(res_sq / norm_sq);
    return out;
}

}  // namespace scarforge::grid1d
