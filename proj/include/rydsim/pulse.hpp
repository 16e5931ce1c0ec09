#pragma once

#include <cmath>
#include <vector>

namespace rydsim {

enum class PulseShape { square, gaussian };

// Laser pulse in internal units (duration tau == 1 unless stated otherwise).
// The envelope satisfies 0 <= f(t) <= 1; a Gaussian has FWHM equal to the
// duration and is integrated over center +- window_halfwidth * duration.
struct PulseSpec {
    PulseShape shape = PulseShape::square;
    double rabi = 0.0;      // Omega, rad/tau
    double duration = 1.0;  // tau
    double center = 3.0;    // Gaussian center time; ignored for square
    double window_halfwidth = 3.0;  // Gaussian window, in units of duration
    double detuning = 0.0;  // Delta, rad/tau; 0 in production runs

    double t_start() const { return 0.0; }
    double t_end() const {
        return shape == PulseShape::square ? duration
                                           : center + window_halfwidth * duration;
    }
};

PulseSpec square_pulse(double rabi, double duration = 1.0);
PulseSpec gaussian_pulse(double rabi, double duration = 1.0, double window_halfwidth = 3.0);

// envelope f(t)
double envelope(const PulseSpec& pulse, double t);

// accumulated area A(t) = Omega * integral_0^t f
double pulse_area(const PulseSpec& pulse, double t);

// total area over the full window; for Gaussians within 1e-12 of
// Omega * tau * sqrt(pi / (4 ln 2))
double total_area(const PulseSpec& pulse);

// ratio total_area / (Omega * tau) for a given shape (1 for square)
double shape_area_factor(PulseShape shape);

// envelope discontinuities the integrator must not step across
std::vector<double> envelope_breakpoints(const PulseSpec& pulse);

}  // namespace rydsim
