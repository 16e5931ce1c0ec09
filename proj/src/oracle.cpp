#include "rydsim/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "rydsim/observables.hpp"

namespace rydsim {
namespace oracle {

ExactAction::ExactAction(const PairCouplings& couplings, const PulseSpec& pulse, int n_cap,
                         Frame frame)
    : n_(static_cast<int>(couplings.kappa.rows())), pulse_(pulse), frame_(frame) {
    if (n_ > n_cap)
        throw std::invalid_argument("ExactAction: N = " + std::to_string(n_) +
                                    " exceeds cap " + std::to_string(n_cap));
    if (n_ < 1) throw std::invalid_argument("ExactAction: empty system");

    const std::size_t dim = size();
    diag_.resize(static_cast<Eigen::Index>(dim));
    const double delta = (frame_ == Frame::lab) ? pulse_.detuning : 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
        double e = 0.0;
        for (int p = 0; p < n_; ++p) {
            if (!(b & (std::size_t{1} << p))) continue;
            for (int q = p + 1; q < n_; ++q)
                if (b & (std::size_t{1} << q)) e += couplings.kappa(p, q);
        }
        diag_(static_cast<Eigen::Index>(b)) =
            e + delta * std::popcount(static_cast<std::uint64_t>(b));
    }
}

std::complex<double> ExactAction::drive(double t, double envelope_value) const {
    if (frame_ == Frame::rotating && pulse_.detuning != 0.0)
        return pulse_.rabi * envelope_value * std::polar(1.0, pulse_.detuning * t);
    return {pulse_.rabi * envelope_value, 0.0};
}

void ExactAction::apply_offdiagonal(std::complex<double> drive_value,
                                    const Eigen::VectorXcd& phases,
                                    const Eigen::VectorXcd& a, Eigen::VectorXcd& da) const {
    const std::size_t dim = size();
    static thread_local Eigen::VectorXcd v;
    v = phases.conjugate().cwiseProduct(a);
    const std::complex<double>* vp = v.data();

    const std::complex<double> dn = 0.5 * drive_value;
    const std::complex<double> up = 0.5 * std::conj(drive_value);

    for (std::size_t b = 0; b < dim; ++b) {
        std::complex<double> acc_up{0.0, 0.0};
        std::complex<double> acc_dn{0.0, 0.0};
        for (int p = 0; p < n_; ++p) {
            const std::size_t t = b ^ (std::size_t{1} << p);
            if (b & (std::size_t{1} << p))
                acc_dn += vp[t];
            else
                acc_up += vp[t];
        }
        da(static_cast<Eigen::Index>(b)) = std::complex<double>(0.0, -1.0) *
                                           phases(static_cast<Eigen::Index>(b)) *
                                           (up * acc_up + dn * acc_dn);
    }
}

Trajectory exact_evolve(const PairCouplings& couplings, const PulseSpec& pulse, double t0,
                        double t1, std::vector<double> sample_times,
                        const PropagateOptions& opts, int n_cap) {
    ExactAction action(couplings, pulse, n_cap);
    ExactState psi0 = ground_state(action.size());
    return propagate(action, psi0.amplitudes, t0, t1, std::move(sample_times), opts);
}

ExactObservables exact_observables(const ExactState& state, int n_atoms) {
    ExactObservables obs;
    obs.p_atom = Eigen::VectorXd::Zero(n_atoms);
    const std::size_t dim = static_cast<std::size_t>(state.amplitudes.size());
    double n1 = 0.0, n2 = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
        const double w = std::norm(state.amplitudes(static_cast<Eigen::Index>(b)));
        if (w == 0.0) continue;
        const int m = std::popcount(static_cast<std::uint64_t>(b));
        n1 += w * m;
        n2 += w * static_cast<double>(m) * static_cast<double>(m);
        std::uint64_t rest = b;
        while (rest) {
            obs.p_atom(std::countr_zero(rest)) += w;
            rest &= rest - 1;
        }
    }
    obs.n_mean = n1;
    obs.n2_mean = n2;
    obs.p_exc = n1 / static_cast<double>(n_atoms);
    return obs;
}

Eigen::VectorXd exact_p_super(const Eigen::VectorXd& p_atom,
                              const SuperatomPartition& partition) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(partition.n_superatoms());
    for (int i = 0; i < partition.n_superatoms(); ++i)
        for (int p : partition.groups[i]) out(i) += p_atom(p);
    return out;
}

std::string DeviationReport::to_json() const {
    nlohmann::json j;
    j["max_dev_p_exc"] = max_dev_p_exc;
    j["max_dev_n_mean"] = max_dev_n_mean;
    j["max_dev_n2_mean"] = max_dev_n2_mean;
    j["max_dev_p_super"] = max_dev_p_super;
    j["resampled"] = resampled;
    return j.dump(2);
}

namespace {

struct SuperPoint {
    double n_mean, n2_mean;
    Eigen::VectorXd p_super;
};

SuperPoint interpolate(const SuperPoint& a, const SuperPoint& b, double w) {
    SuperPoint out;
    out.n_mean = (1.0 - w) * a.n_mean + w * b.n_mean;
    out.n2_mean = (1.0 - w) * a.n2_mean + w * b.n2_mean;
    out.p_super = (1.0 - w) * a.p_super + w * b.p_super;
    return out;
}

}  // namespace

DeviationReport compare_superatom(const Trajectory& exact_traj, int n_atoms,
                                  const Trajectory& super_traj, const TruncatedBasis& basis,
                                  const SuperatomPartition& partition) {
    if (exact_traj.samples.empty() || super_traj.samples.empty())
        throw std::invalid_argument("compare_superatom: empty trajectory");

    std::vector<SuperPoint> super_points;
    std::vector<double> super_times;
    for (const auto& st : super_traj.samples) {
        const auto rec = excitation_observables(st, basis, partition, n_atoms);
        super_points.push_back({rec.n_mean, rec.n2_mean, rec.p_super});
        super_times.push_back(st.time);
    }

    DeviationReport rep;
    for (const auto& st : exact_traj.samples) {
        const auto eo = exact_observables(st, n_atoms);
        const Eigen::VectorXd eps = exact_p_super(eo.p_atom, partition);

        // find the matching (or bracketing) superatom sample
        SuperPoint sp = super_points.front();
        const double t = st.time;
        auto it = std::lower_bound(super_times.begin(), super_times.end(), t - 1e-12);
        if (it != super_times.end() && std::abs(*it - t) <= 1e-12) {
            sp = super_points[static_cast<std::size_t>(it - super_times.begin())];
        } else {
            rep.resampled = true;
            if (it == super_times.begin()) {
                sp = super_points.front();
            } else if (it == super_times.end()) {
                sp = super_points.back();
            } else {
                const std::size_t hi = static_cast<std::size_t>(it - super_times.begin());
                const double w =
                    (t - super_times[hi - 1]) / (super_times[hi] - super_times[hi - 1]);
                sp = interpolate(super_points[hi - 1], super_points[hi], w);
            }
        }

        rep.max_dev_p_exc = std::max(
            rep.max_dev_p_exc, std::abs(eo.n_mean - sp.n_mean) / n_atoms);
        rep.max_dev_n_mean = std::max(rep.max_dev_n_mean, std::abs(eo.n_mean - sp.n_mean));
        rep.max_dev_n2_mean =
            std::max(rep.max_dev_n2_mean, std::abs(eo.n2_mean - sp.n2_mean));
        rep.max_dev_p_super =
            std::max(rep.max_dev_p_super, (eps - sp.p_super).cwiseAbs().maxCoeff());
    }
    return rep;
}

}  // namespace oracle
}  // namespace rydsim
