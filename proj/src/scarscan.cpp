#include "scarforge/scarscan.hpp"

#include "scarforge/cutoff.hpp"
#include "scarforge/errors.hpp"
#include "scarforge/qnf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scarforge::scarscan {

double IntervalPartition::half_length() const {
    return c2 * hbar / std::abs(std::log(hbar));
}

double IntervalPartition::center(int k) const {
    return E0 + half_length() * (-1.0 + (2.0 * k - 1.0) / K);
}

double IntervalPartition::sub_lower(int k) const { return lower() + (k - 1) * sub_width(); }

double IntervalPartition::sub_upper(int k) const {
    return k == K ? upper() : lower() + k * sub_width();
}

int IntervalPartition::index_of(double E) const {
    if (E < lower() || E > upper()) return 0;
    int k = std::clamp(static_cast<int>(std::ceil((E - lower()) / sub_width())), 1, K);
    while (k > 1 && E <= sub_upper(k - 1)) --k;
    while (k < K && E > sub_upper(k)) ++k;
    return k;
}

IntervalPartition make_partition(double E0, double c2, int K, double hbar, double C_gamma) {
    if (!(c2 > 0.0)) throw DomainError("c2 must be positive");
    if (K < 1) throw DomainError("K must be at least 1");
    if (!(hbar > 0.0 && hbar < 1.0)) throw DomainError("hbar must lie in (0, 1)");
    return {E0, c2, K, hbar, C_gamma};
}

double mass_bound(double c2, int K, double C_gamma) {
    const double r = C_gamma / c2;
    return (1.0 - r * r) / K;
}

WeightOptimum optimize_weight(double epsilon, double C_gamma) {
    if (!(C_gamma > 0.0)) throw DomainError("C_gamma must be positive");
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    if (epsilon >= C_gamma) throw DomainError("epsilon >= C_gamma: no width improvement possible");
    const double lo = C_gamma * (1.0 + 1e-6), hi = 10.0 * C_gamma;
    // On each plateau K = floor(c2 / eps) + 1 the bound increases with c2, so the
    // maximum over the plateau sits at its right end c2 -> K eps.
    WeightOptimum best;
    best.bound = -1.0;
    const int k_lo = static_cast<int>(std::floor(lo / epsilon)) + 1;
    const int k_hi = static_cast<int>(std::floor(hi / epsilon)) + 1;
    for (int K = k_lo; K <= k_hi; ++K) {
        double c2 = std::min(hi, std::nextafter(K * epsilon, 0.0));
        if (c2 < lo) continue;
        while (static_cast<int>(std::floor(c2 / epsilon)) + 1 != K) c2 = std::nextafter(c2, 0.0);
        const double b = mass_bound(c2, K, C_gamma);
        if (b > best.bound) {
            best.bound = b;
            best.c2 = c2;
            best.K = K;
        }
    }
    best.continuous_c2 = std::sqrt(3.0) * C_gamma;
    best.continuous_bound = 2.0 * epsilon / (3.0 * std::sqrt(3.0) * C_gamma);
    return best;
}

double default_C_gamma(double epsilon_prime) {
    return std::numbers::pi * (1.0 + 3.0 * epsilon_prime);
}

ScarWeightResult project_and_select(const grid1d::SpectralData& spectral,
                                    const IntervalPartition& partition, const Eigen::VectorXcd& psi,
                                    const ProjectOptions& options) {
    if (spectral.lower > partition.lower() || spectral.upper < partition.upper())
        throw DomainError("spectral window does not cover the interval I");
    const Eigen::VectorXcd coeff = spectral.coefficients(psi);
    const double total = (psi.squaredNorm() * spectral.dx);

    ScarWeightResult r;
    r.K = partition.K;
    r.c2 = partition.c2;
    r.C_gamma = partition.C_gamma;
    r.epsilon = options.epsilon;
    r.interval_masses.assign(partition.K, 0.0);
    std::vector<int> piece(spectral.count(), 0);
    for (int j = 0; j < spectral.count(); ++j) {
        piece[j] = partition.index_of(spectral.eigenvalues[j]);
        if (piece[j] > 0) r.interval_masses[piece[j] - 1] += std::norm(coeff[j]) / total;
    }
    for (double m : r.interval_masses) r.interval_mass += m;
    r.complement_mass = std::max(0.0, 1.0 - r.interval_mass);
    if (r.interval_mass <= 0.0)
        throw ValidityError("no spectrum inside I: the input is not a C_gamma quasimode");

    r.chosen_k = 1;
    for (int k = 2; k <= partition.K; ++k)
        if (r.interval_masses[k - 1] > r.interval_masses[r.chosen_k - 1]) r.chosen_k = k;
    r.projected_mass = r.interval_masses[r.chosen_k - 1];
    r.mass_bound = mass_bound(partition.c2, partition.K, partition.C_gamma);
    r.width_limit = 0.5 * partition.sub_width();

    const double e_k = partition.center(r.chosen_k);
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(spectral.count());
    double res = 0.0, mass = 0.0;
    for (int j = 0; j < spectral.count(); ++j) {
        if (piece[j] != r.chosen_k) continue;
        a[j] = coeff[j];
        const double de = spectral.eigenvalues[j] - e_k;
        res += std::norm(coeff[j]) * de * de;
        mass += std::norm(coeff[j]);
    }
    r.width_achieved = std::sqrt(res / mass);
    r.projected_state = spectral.vectors.cast<cplx>() * a;
    r.projected_state /= std::sqrt(mass);

    if (options.grid) {
        r.scar_mass = grid1d::grid_box_mass(*options.grid, r.projected_state, options.scar_box);
        r.scar_mass_computed = true;
    }
    return r;
}

PendulumScarReport pendulum_scar(double hbar, double epsilon_prime, double epsilon, int n_grid) {
    PendulumScarReport rep;
    rep.hbar = hbar;
    rep.epsilon_prime = epsilon_prime;
    const grid1d::GridOperator H = grid1d::build_pendulum(hbar, n_grid);
    const quasimode::CutoffFunction chi = quasimode::optimize_cutoff(epsilon_prime);
    rep.T = qnf::ehrenfest_time(epsilon_prime, 1.0, hbar);
    const Eigen::VectorXcd psi0 = grid1d::grid_gaussian(H);
    rep.E_center = H.energy(psi0);
    const grid1d::GridQuasimode qm = grid1d::grid_quasimode(H, chi, rep.T, rep.E_center, psi0);
    Eigen::VectorXcd psi = qm.state / std::sqrt(H.inner_norm_sq(qm.state));
    rep.quasimode_width = qm.width;
    rep.quasimode_width_normalized = qm.width * std::abs(std::log(hbar)) / hbar;
    rep.quasimode_box_mass = grid1d::grid_box_mass(H, psi, std::pow(hbar, epsilon_prime / 3.0));

    const double C_gamma = default_C_gamma(epsilon_prime);
    const double c2 = std::sqrt(3.0) * C_gamma;
    const int K = static_cast<int>(std::floor(c2 / epsilon)) + 1;
    const IntervalPartition part = make_partition(rep.E_center, c2, K, hbar, C_gamma);
    const grid1d::SpectralData spec = grid1d::eig_window(H, rep.E_center, 2.0 * part.half_length());
    ProjectOptions opt;
    opt.epsilon = epsilon;
    opt.grid = &H;
    rep.weight = project_and_select(spec, part, psi, opt);
    return rep;
}

}  // namespace scarforge::scarscan
