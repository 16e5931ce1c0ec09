#pragma once

#include <Eigen/Dense>
#include <string>

#include "rydsim/coarse.hpp"
#include "rydsim/geometry.hpp"
#include "rydsim/propagate.hpp"

namespace rydsim {
namespace oracle {

// Exact solver over the full 2^N atomic product basis. Deliberately a second
// code path: plain bitmask indexing, its own Hamiltonian streaming, nothing
// shared with the superatom route except the integrator.
class ExactAction {
  public:
    ExactAction(const PairCouplings& couplings, const PulseSpec& pulse, int n_cap = 14,
                Frame frame = Frame::lab);

    int n_atoms() const { return n_; }
    std::size_t size() const { return std::size_t{1} << n_; }
    const Eigen::VectorXd& diagonal() const { return diag_; }

    double envelope_at(double t) const { return envelope(pulse_, t); }
    std::complex<double> drive(double t, double envelope_value) const;
    std::vector<double> time_breakpoints() const { return envelope_breakpoints(pulse_); }
    double suggested_max_step() const {
        return pulse_.shape == PulseShape::gaussian ? 0.25 * pulse_.duration : 1e30;
    }
    void apply_offdiagonal(std::complex<double> drive_value, const Eigen::VectorXcd& phases,
                           const Eigen::VectorXcd& a, Eigen::VectorXcd& da) const;

  private:
    int n_;
    PulseSpec pulse_;
    Frame frame_;
    Eigen::VectorXd diag_;
};

// amplitudes indexed by excitation bitmask
using ExactState = ManyBodyState;

Trajectory exact_evolve(const PairCouplings& couplings, const PulseSpec& pulse, double t0,
                        double t1, std::vector<double> sample_times,
                        const PropagateOptions& opts = {}, int n_cap = 14);

struct ExactObservables {
    double p_exc = 0.0;
    double n_mean = 0.0;
    double n2_mean = 0.0;
    Eigen::VectorXd p_atom;  // per-atom excitation probability
};

ExactObservables exact_observables(const ExactState& state, int n_atoms);

// exact per-superatom excitation: sum of member-atom probabilities
Eigen::VectorXd exact_p_super(const Eigen::VectorXd& p_atom,
                              const SuperatomPartition& partition);

struct DeviationReport {
    double max_dev_p_exc = 0.0;
    double max_dev_n_mean = 0.0;
    double max_dev_n2_mean = 0.0;
    double max_dev_p_super = 0.0;
    bool resampled = false;  // time grids differed; superatom data interpolated
    std::string to_json() const;
};

DeviationReport compare_superatom(const Trajectory& exact_traj, int n_atoms,
                                  const Trajectory& super_traj, const TruncatedBasis& basis,
                                  const SuperatomPartition& partition);

}  // namespace oracle
}  // namespace rydsim
