#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>

#include "rydsim/basis.hpp"
#include "rydsim/coarse.hpp"
#include "rydsim/pulse.hpp"

namespace rydsim {

// Complex amplitude vector over a truncated superatom basis.
struct ManyBodyState {
    Eigen::VectorXcd amplitudes;
    double time = 0.0;

    double norm_sq() const { return amplitudes.squaredNorm(); }
};

ManyBodyState ground_state(std::size_t dimension);

// Sum of k(i,j) over unordered pairs {i,j} inside the excited subset.
double diagonal_energy(std::uint32_t subset_mask, const Eigen::MatrixXd& k);

// Fully blockaded two-level solution, P = sin^2(sqrt(N) A / 2) / N; the phase
// convention reduces to the standard resonant sin^2(A/2) at N = 1.
double blockaded_reference(int n_atoms, double area);

enum class Frame { lab, rotating };

// Matrix-free Hamiltonian action over a truncated basis: static diagonal from
// pairwise superatom couplings, off-diagonal promotion links weighted by
// sqrt(N_i) Omega f(t) / 2. Promotions out of the top excitation shell are
// dropped (that is the truncation).
class HamiltonianAction {
  public:
    HamiltonianAction(std::shared_ptr<const TruncatedBasis> basis,
                      const SuperatomPartition& partition, const PulseSpec& pulse,
                      double k_scale = 1.0, Frame frame = Frame::lab);

    std::size_t size() const { return basis_->dimension(); }
    const Eigen::VectorXd& diagonal() const { return diag_; }
    const TruncatedBasis& basis() const { return *basis_; }
    const PulseSpec& pulse() const { return pulse_; }

    std::complex<double> drive(double t, double envelope_value) const;
    double envelope_at(double t) const { return envelope(pulse_, t); }
    std::vector<double> time_breakpoints() const { return envelope_breakpoints(pulse_); }
    double suggested_max_step() const {
        return pulse_.shape == PulseShape::gaussian ? 0.25 * pulse_.duration : 1e30;
    }

    // da = -i * (interaction-picture coupling term); phases[s] = exp(i E_s (t - t0))
    void apply_offdiagonal(std::complex<double> drive_value, const Eigen::VectorXcd& phases,
                           const Eigen::VectorXcd& a, Eigen::VectorXcd& da) const;

    // Schrodinger-picture derivative -i H(t) c, for direct inspection
    Eigen::VectorXcd derivative(double t, const Eigen::VectorXcd& c) const;

  private:
    std::shared_ptr<const TruncatedBasis> basis_;
    PulseSpec pulse_;
    Frame frame_;
    Eigen::VectorXd diag_;
    Eigen::VectorXd half_weight_;  // sqrt(N_i) / 2 per superatom
};

}  // namespace rydsim
