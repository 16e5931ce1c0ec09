#pragma once

#include <set>
#include <string>
#include <vector>

namespace rydsim {

// Flat key-value run configuration. Keys mirror the file format one to one;
// `given` tracks which keys were set explicitly so exactly-one-of constraints
// can be validated.
struct RunConfig {
    long n_atoms = 70;          // mean count in poisson mode
    bool poisson = false;
    double density = 0.0;       // cm^-3; exactly one of density/radius
    double radius = 0.0;        // um
    double scaled_strength = 0.0;  // |kappa_nn| tau; exactly one of this/c6_eff
    double c6_eff = 0.0;        // MHz um^6, signed
    double tau_ns = 10.0;       // pulse duration for physical-unit conversion
    double interaction_multiplier = 1.0;
    bool attractive = true;
    std::string pulse_shape = "square";  // square | gaussian
    std::string scan = "tau";            // tau | omega
    double area_min = 0.25;
    double area_max = 12.0;
    long area_points = 48;
    double area_at_reference = 0.0;  // 0 = area_max
    long superatom_count = 0;        // 0 = round(23 N / 70)
    long m_max = 7;
    long realizations = 100;
    unsigned long long seed = 1;
    double rtol = 1e-9;
    double atol = 1e-12;
    long workers = 0;  // 0 = hardware concurrency
    bool correlation = false;
    double correlation_area = 0.0;  // 0 = last scan point
    double min_pair_distance = 1e-3;
    double bin_width = 0.5;  // um, correlation report binning
    bool nd_inverted = false;
    unsigned long dimension_cap = 1ul << 22;
    double gaussian_window = 3.0;

    std::set<std::string> given;

    void set(const std::string& key, const std::string& value);
    std::string to_json() const;
};

RunConfig default_config();
RunConfig load_config_file(const std::string& path);
void apply_figure_preset(RunConfig& config, const std::string& figure);
std::vector<std::string> known_figures();

// Derived quantities every realization shares.
struct ResolvedRun {
    long n_mean = 0;
    double radius = 0.0;        // um
    double density_um3 = 0.0;   // um^-3
    double c6_internal = 0.0;   // rad/tau * um^6, sign and multiplier folded in
    double reference_nn = 0.0;  // um, calibration anchor
    long target_count_base = 0;
    std::vector<double> area_grid;
    double area_reference = 0.0;
    std::size_t correlation_index = 0;  // grid index correlation is sampled at
    int workers = 1;
};

ResolvedRun resolve(const RunConfig& config);

// Estimated median nearest-neighbour distance for n uniform points in a ball.
double reference_nn_distance(long n, double radius);

// c6 (internal units) such that |kappa| tau at the reference nearest-neighbour
// distance equals the requested scaled strength.
double calibrate_interaction(double scaled_strength, long n, double radius,
                             bool attractive);

}  // namespace rydsim
