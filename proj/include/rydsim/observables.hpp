#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "rydsim/basis.hpp"
#include "rydsim/coarse.hpp"
#include "rydsim/geometry.hpp"
#include "rydsim/hamiltonian.hpp"

namespace rydsim {

// Excitation statistics of one many-body state. n counts excited superatoms,
// which equals the number of excited atoms (each excited superatom holds
// exactly one shared excitation).
struct ObservableRecord {
    double pulse_area = 0.0;
    double p_exc = 0.0;   // <n> / N
    double n_exc = 0.0;   // <n>
    double n_mean = 0.0;  // <n>
    double n2_mean = 0.0; // <n^2>
    std::optional<double> variance_ratio;  // absent when p_exc is 0 or 1
    Eigen::VectorXd p_super;  // P(i), probability superatom i is excited
};

struct CorrelationSample {
    double distance = 0.0;  // um, atom-pair distance
    double c_value = 0.0;
    int atom_p = 0, atom_q = 0;
    int super_p = 0, super_q = 0;
    bool same_superatom = false;
    bool valid = true;  // false when a marginal is below threshold
};

// Peak parameters of a many-body Rabi curve and the collective-oscillation
// scaling extracted from them.
struct CollectiveFit {
    double f1 = 0.0;  // pulse area of the first maximum
    double p1 = 0.0;  // P_exc there
    double n_exc_1 = 0.0;
    std::optional<double> f2;  // second maximum, when present
    double alpha = 0.0;        // pi / f1
    std::optional<double> beta;  // f2 / f1
    double n_domain = 0.0;  // atoms per blockade domain, N / N_exc^(1max)
    double gamma = 0.0;     // alpha / sqrt(n_domain)
    double gamma_half_area = 0.0;  // same under the halved area reading
};

ObservableRecord excitation_observables(const ManyBodyState& state,
                                        const TruncatedBasis& basis,
                                        const SuperatomPartition& partition, int n_atoms);

// Delta_n / Delta_n' with Delta_n'^2 = N P (1 - P); absent for P in {0, 1}.
std::optional<double> variance_ratio(const ObservableRecord& record, int n_atoms);

// Correlation c(p,q) = P(p,q) / (P(p) P(q)) between the central atom and every
// other atom; pairs inside the central superatom are zero by construction.
std::vector<CorrelationSample> pair_correlation(const ManyBodyState& state,
                                                const TruncatedBasis& basis,
                                                const SuperatomPartition& partition,
                                                const AtomEnsemble& ensemble,
                                                int central,
                                                double marginal_floor = 1e-12);

// Peaks located by three-point quadratic interpolation; maxima with
// prominence below prominence_frac * max(curve) are ignored as ripple.
std::optional<CollectiveFit> extract_collective_params(
    const std::vector<std::pair<double, double>>& area_nexc_curve, int n_atoms,
    double prominence_frac = 0.02, bool invert_n_domain = false);

Eigen::VectorXd bernoulli_distribution(int n_atoms, double p);

}  // namespace rydsim
