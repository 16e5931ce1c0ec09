#include "rydsim/pulse.hpp"

#include <algorithm>

#include "rydsim/units.hpp"

namespace rydsim {

namespace {
constexpr double four_ln2 = 2.77258872223978124;  // 4 ln 2
}

PulseSpec square_pulse(double rabi, double duration) {
    PulseSpec p;
    p.shape = PulseShape::square;
    p.rabi = rabi;
    p.duration = duration;
    return p;
}

PulseSpec gaussian_pulse(double rabi, double duration, double window_halfwidth) {
    PulseSpec p;
    p.shape = PulseShape::gaussian;
    p.rabi = rabi;
    p.duration = duration;
    p.window_halfwidth = window_halfwidth;
    p.center = window_halfwidth * duration;  // window starts at t = 0
    return p;
}

double envelope(const PulseSpec& pulse, double t) {
    if (pulse.shape == PulseShape::square) {
        return (t >= 0.0 && t < pulse.duration) ? 1.0 : 0.0;
    }
    const double x = (t - pulse.center) / pulse.duration;
    return std::exp(-four_ln2 * x * x);  // f at center +- duration/2 is exactly 1/2
}

double pulse_area(const PulseSpec& pulse, double t) {
    if (pulse.shape == PulseShape::square) {
        return pulse.rabi * std::clamp(t, 0.0, pulse.duration);
    }
    // integral of exp(-4 ln2 x^2) dx = sqrt(pi/(4 ln2))/2 * erf(2 sqrt(ln2) x)
    const double a = std::sqrt(four_ln2);
    const double scale = pulse.duration * std::sqrt(units::pi) / (2.0 * a);
    const double u0 = -pulse.center / pulse.duration;
    const double u1 = (t - pulse.center) / pulse.duration;
    return pulse.rabi * scale * (std::erf(a * u1) - std::erf(a * u0));
}

double total_area(const PulseSpec& pulse) { return pulse_area(pulse, pulse.t_end()); }

double shape_area_factor(PulseShape shape) {
    if (shape == PulseShape::square) return 1.0;
    return std::sqrt(units::pi / four_ln2);
}

std::vector<double> envelope_breakpoints(const PulseSpec& pulse) {
    if (pulse.shape == PulseShape::square) return {0.0, pulse.duration};
    return {};
}

}  // namespace rydsim
