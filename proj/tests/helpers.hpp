#pragma once

#include <memory>
#include <vector>

#include "rydsim/coarse.hpp"
#include "rydsim/geometry.hpp"
#include "rydsim/observables.hpp"
#include "rydsim/propagate.hpp"

namespace rydsim::test {

inline PairCouplings couplings_from_matrix(Eigen::MatrixXd kappa) {
    PairCouplings pc;
    pc.kappa = std::move(kappa);
    pc.c6_eff = 0.0;
    return pc;
}

// all pair couplings equal
inline PairCouplings uniform_couplings(int n, double kappa) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Constant(n, n, kappa);
    k.diagonal().setZero();
    return couplings_from_matrix(std::move(k));
}

struct SuperatomSystem {
    SuperatomPartition partition;
    std::shared_ptr<const TruncatedBasis> basis;
    int n_atoms = 0;
};

inline SuperatomSystem singleton_system(const PairCouplings& pc, int m_max = 0) {
    SuperatomSystem sys;
    const int n = static_cast<int>(pc.kappa.rows());
    sys.n_atoms = n;
    sys.partition = build_partition(pc, n);
    sys.basis = std::make_shared<const TruncatedBasis>(n, m_max > 0 ? m_max : n);
    return sys;
}

inline double p_exc_of(const ManyBodyState& state, const SuperatomSystem& sys) {
    return excitation_observables(state, *sys.basis, sys.partition, sys.n_atoms).p_exc;
}

// end-of-pulse state for a given system and pulse
inline ManyBodyState evolve_to_end(const SuperatomSystem& sys, const PulseSpec& pulse,
                                   const PropagateOptions& opts = {},
                                   Frame frame = Frame::lab, double k_scale = 1.0) {
    HamiltonianAction action(sys.basis, sys.partition, pulse, k_scale, frame);
    const double t_end = pulse.t_end();
    auto traj = propagate(action, ground_state(sys.basis->dimension()).amplitudes, 0.0,
                          t_end, {t_end}, opts);
    return traj.samples.back();
}

}  // namespace rydsim::test
