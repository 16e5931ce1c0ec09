#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rydsim/hamiltonian.hpp"

namespace rydsim {

struct PropagateOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 0.0;       // 0 -> heuristic
    double max_step = 0.0;           // 0 -> take the system's suggestion
    long long max_steps = 400000000;
    // when set, samples are streamed here instead of being stored in the
    // trajectory (saves memory for large bases)
    std::function<void(const ManyBodyState&)> on_sample;
};

struct Trajectory {
    std::vector<ManyBodyState> samples;  // Schrodinger-picture amplitudes
    double max_norm_drift = 0.0;         // max | ||psi||^2 - 1 | seen during the run
    long long accepted_steps = 0;
    long long rejected_steps = 0;
};

class PropagationError : public std::runtime_error {
  public:
    PropagationError(const std::string& what, double t)
        : std::runtime_error(what + " at t = " + std::to_string(t)), time_(t) {}
    double time() const { return time_; }

  private:
    double time_;
};

// Adaptive Dormand-Prince 5(4) in the interaction picture of the static
// diagonal: the (possibly huge) blockade shifts are handled exactly through
// per-state phases, the integrator only resolves the laser coupling. Error
// control is per-component max-norm with weights atol + rtol*|a|; square-pulse
// edges arrive as breakpoints and are never stepped across.
//
// System requirements:
//   std::size_t size() const
//   const Eigen::VectorXd& diagonal() const
//   double envelope_at(double t) const
//   std::complex<double> drive(double t, double envelope_value) const
//   void apply_offdiagonal(drive, phases, a, da) const   // da = -i * coupling
//   std::vector<double> time_breakpoints() const
//   double suggested_max_step() const
template <class System>
Trajectory propagate(const System& sys, const Eigen::VectorXcd& psi0, double t0, double t1,
                     std::vector<double> sample_times, const PropagateOptions& opts = {}) {
    using Vec = Eigen::VectorXcd;
    const auto dim = static_cast<Eigen::Index>(sys.size());
    if (psi0.size() != dim) throw std::invalid_argument("propagate: state size mismatch");
    if (!(t1 > t0)) throw std::invalid_argument("propagate: empty time span");

    // event times: samples and envelope breakpoints, deduplicated
    std::sort(sample_times.begin(), sample_times.end());
    std::vector<double> events = sample_times;
    for (double b : sys.time_breakpoints())
        if (b > t0 && b < t1) events.push_back(b);
    events.push_back(t1);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    for (double s : sample_times)
        if (s < t0 || s > t1)
            throw std::invalid_argument("propagate: sample time outside span");

    std::vector<double> breakpoints = sys.time_breakpoints();
    auto is_breakpoint = [&](double t) {
        for (double b : breakpoints)
            if (b == t) return true;
        return false;
    };
    auto segment_end = [&](double t) {
        double e = t1;
        for (double b : breakpoints)
            if (b > t) e = std::min(e, b);
        return e;
    };

    const Eigen::VectorXd& diag = sys.diagonal();
    auto phases_at = [&](double t, Vec& u) {
        const double dt = t - t0;
        for (Eigen::Index i = 0; i < dim; ++i)
            u(i) = std::polar(1.0, diag(i) * dt);
    };

    // derivative in the interaction picture; the envelope is evaluated one ulp
    // inside the current segment so square edges keep their left/right limits
    Vec u(dim);
    double seg_lo = t0, seg_hi = segment_end(t0);
    auto deriv = [&](double t, const Vec& a, Vec& da) {
        double te = t;
        if (te <= seg_lo) te = std::nextafter(seg_lo, seg_hi);
        if (te >= seg_hi) te = std::nextafter(seg_hi, seg_lo);
        phases_at(t, u);
        sys.apply_offdiagonal(sys.drive(te, sys.envelope_at(te)), u, a, da);
    };

    Trajectory out;
    Vec a = psi0;  // interaction-picture amplitudes; equal to psi at t0
    double t = t0;

    auto record_sample = [&](double ts) {
        ManyBodyState s;
        s.time = ts;
        phases_at(ts, u);
        s.amplitudes = u.conjugate().cwiseProduct(a);
        if (opts.on_sample)
            opts.on_sample(s);
        else
            out.samples.push_back(std::move(s));
    };

    std::size_t next_event = 0;
    std::size_t next_sample = 0;
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t0) {
        record_sample(t0);
        ++next_sample;
    }
    while (next_event < events.size() && events[next_event] <= t0) ++next_event;

    const double max_step_cap =
        opts.max_step > 0.0 ? opts.max_step : sys.suggested_max_step();
    double h = opts.initial_step > 0.0 ? opts.initial_step
                                       : std::min({t1 - t0, max_step_cap, 1e-4});

    // Dormand-Prince 5(4) tableau
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Vec k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
    Vec ytmp(dim), ynew(dim), err(dim);
    bool fsal_valid = false;

    while (t < t1) {
        if (out.accepted_steps + out.rejected_steps >= opts.max_steps)
            throw PropagationError("propagate: step budget exhausted", t);

        const double target = events[next_event];
        seg_hi = segment_end(t);
        seg_lo = t0;
        for (double b : breakpoints)
            if (b <= t && b > seg_lo) seg_lo = b;

        h = std::min({h, max_step_cap, target - t});
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw PropagationError("propagate: step size underflow", t);

        if (!fsal_valid) deriv(t, a, k1);
        ytmp = a + h * (a21 * k1);
        deriv(t + c2 * h, ytmp, k2);
        ytmp = a + h * (a31 * k1 + a32 * k2);
        deriv(t + c3 * h, ytmp, k3);
        ytmp = a + h * (a41 * k1 + a42 * k2 + a43 * k3);
        deriv(t + c4 * h, ytmp, k4);
        ytmp = a + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        deriv(t + c5 * h, ytmp, k5);
        ytmp = a + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        deriv(t + h, ytmp, k6);
        ynew = a + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        deriv(t + h, ynew, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double ratio = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double w =
                opts.atol + opts.rtol * std::max(std::abs(a(i)), std::abs(ynew(i)));
            ratio = std::max(ratio, std::abs(err(i)) / w);
        }

        if (ratio <= 1.0) {
            const double t_new = t + h;
            t = t_new;
            a.swap(ynew);
            k1.swap(k7);  // FSAL
            fsal_valid = true;
            ++out.accepted_steps;
            out.max_norm_drift =
                std::max(out.max_norm_drift, std::abs(a.squaredNorm() - 1.0));

            if (t >= target) {
                t = target;  // guard against roundoff past the event
                while (next_sample < sample_times.size() &&
                       sample_times[next_sample] <= t) {
                    record_sample(sample_times[next_sample]);
                    ++next_sample;
                }
                if (is_breakpoint(t)) fsal_valid = false;
                while (next_event < events.size() && events[next_event] <= t) ++next_event;
                if (next_event >= events.size()) break;
            }
            const double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            ++out.rejected_steps;
            h *= std::max(0.2, 0.9 * std::pow(ratio, -0.2));
        }
    }

    return out;
}

}  // namespace rydsim
