#pragma once

#include <Eigen/Dense>

#include "rydsim/rng.hpp"

namespace rydsim {

// Random atomic arrangement inside a spherical sample. Positions are columns,
// in micrometers.
struct AtomEnsemble {
    Eigen::Matrix3Xd positions;
    double sample_radius = 0.0;  // um

    int n_atoms() const { return static_cast<int>(positions.cols()); }
    double density() const;  // um^-3
};

// Pairwise van der Waals couplings kappa_pq = c6_eff / r_pq^6 (rad/tau).
// c6_eff carries the sign convention (negative for attractive interactions).
struct PairCouplings {
    Eigen::MatrixXd kappa;
    double c6_eff = 0.0;  // rad/tau * um^6
};

// n points drawn independently and uniformly from the ball of given radius.
AtomEnsemble sample_positions(int n, double radius, Rng& rng);

// Poisson-distributed atom count for density-fluctuation runs.
long sample_atom_count(double mean, Rng& rng);

// Full symmetric coupling matrix. Pairs closer than min_distance (um) are an
// error: the R^-6 law diverges and the caller should know.
PairCouplings pair_couplings(const AtomEnsemble& ensemble, double c6_eff,
                             double min_distance = 1e-3);

// Index of the atom closest to the sample center; ties go to the lowest index.
int central_atom(const AtomEnsemble& ensemble);

}  // namespace rydsim
