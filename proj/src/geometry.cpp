#include "rydsim/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rydsim/units.hpp"

namespace rydsim {

double AtomEnsemble::density() const {
    return units::density_from_radius(static_cast<double>(n_atoms()), sample_radius);
}

AtomEnsemble sample_positions(int n, double radius, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_positions: n must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("sample_positions: radius must be > 0");

    AtomEnsemble ens;
    ens.sample_radius = radius;
    ens.positions.resize(3, n);
    for (int p = 0; p < n; ++p) {
        // exact uniform-in-ball draw: r = R u^{1/3}, isotropic direction
        const double r = radius * std::cbrt(rng.uniform());
        const double cos_theta = 1.0 - 2.0 * rng.uniform();
        const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
        const double phi = 2.0 * units::pi * rng.uniform();
        ens.positions.col(p) = Eigen::Vector3d(r * sin_theta * std::cos(phi),
                                               r * sin_theta * std::sin(phi),
                                               r * cos_theta);
    }
    return ens;
}

long sample_atom_count(double mean, Rng& rng) {
    if (!(mean > 0.0)) throw std::invalid_argument("sample_atom_count: mean must be > 0");
    return rng.poisson(mean);
}

PairCouplings pair_couplings(const AtomEnsemble& ensemble, double c6_eff,
                             double min_distance) {
    const int n = ensemble.n_atoms();
    PairCouplings out;
    out.c6_eff = c6_eff;
    out.kappa = Eigen::MatrixXd::Zero(n, n);
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const double r = (ensemble.positions.col(p) - ensemble.positions.col(q)).norm();
            if (r < min_distance) {
                throw std::runtime_error("pair_couplings: atoms " + std::to_string(p) +
                                         " and " + std::to_string(q) + " are " +
                                         std::to_string(r) + " um apart (min " +
                                         std::to_string(min_distance) + " um)");
            }
            const double r2 = r * r;
            const double k = c6_eff / (r2 * r2 * r2);
            out.kappa(p, q) = k;
            out.kappa(q, p) = k;
        }
    }
    return out;
}

int central_atom(const AtomEnsemble& ensemble) {
    if (ensemble.n_atoms() < 1) throw std::invalid_argument("central_atom: empty ensemble");
    int best = 0;
    double best_r2 = ensemble.positions.col(0).squaredNorm();
    for (int p = 1; p < ensemble.n_atoms(); ++p) {
        const double r2 = ensemble.positions.col(p).squaredNorm();
        if (r2 < best_r2) {
            best = p;
            best_r2 = r2;
        }
    }
    return best;
}

}  // namespace rydsim
