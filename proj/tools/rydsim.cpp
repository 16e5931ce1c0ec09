#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rydsim/config.hpp"
#include "rydsim/oracle.hpp"
#include "rydsim/propagate.hpp"
#include "rydsim/runner.hpp"
#include "rydsim/units.hpp"
#include "rydsim/version.hpp"

namespace {

int run_simulate(const std::string& config_path, const std::string& figure,
                 const std::vector<std::string>& overrides, long workers,
                 long long seed, const std::string& out_dir) {
    rydsim::RunConfig config;
    if (!config_path.empty()) config = rydsim::load_config_file(config_path);
    if (!figure.empty()) rydsim::apply_figure_preset(config, figure);
    if (config_path.empty() && figure.empty())
        throw std::invalid_argument("simulate needs --config and/or --figure");
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (workers >= 0) config.set("workers", std::to_string(workers));
    if (seed >= 0) config.set("seed", std::to_string(seed));

    const rydsim::ResolvedRun resolved = rydsim::resolve(config);
    const rydsim::EnsembleResult result = rydsim::run_ensemble(config);
    rydsim::emit_results(result, config, resolved, out_dir);

    std::printf("wrote %s/curves.csv (%zu scan points, %ld/%ld realizations ok)\n",
                out_dir.c_str(), result.areas.size(), result.n_ok,
                result.n_ok + result.n_failed);
    if (result.fit) {
        std::printf("first maximum: area %.4f, N_exc %.4f", result.fit->f1,
                    result.fit->n_exc_1);
        if (result.fit->beta) std::printf(", beta %.3f", *result.fit->beta);
        std::printf(", gamma %.3f\n", result.fit->gamma);
    }
    std::printf("max norm drift %.3e\n", result.max_norm_drift);
    return 0;
}

int run_validate(int n_atoms, unsigned long long seed, double strength, double area,
                 const std::string& shape, long superatoms, long m_max, long samples,
                 const std::string& out_path) {
    using namespace rydsim;
    if (n_atoms < 1 || n_atoms > 14)
        throw std::invalid_argument("validate: --n must be in [1, 14]");

    Rng rng(derive_seed(seed, 0));
    const double radius =
        units::radius_from_density(static_cast<double>(n_atoms), units::density_um3(1e11));
    const AtomEnsemble ensemble = sample_positions(n_atoms, radius, rng);
    const double c6 = calibrate_interaction(strength, n_atoms, radius, true);
    const PairCouplings couplings = pair_couplings(ensemble, c6);

    const int target = superatoms > 0 ? static_cast<int>(superatoms) : n_atoms;
    const SuperatomPartition partition = build_partition(couplings, target);
    const int m_eff = m_max > 0 ? static_cast<int>(std::min<long>(m_max, target))
                                : partition.n_superatoms();
    auto basis = std::make_shared<const TruncatedBasis>(partition.n_superatoms(), m_eff);

    const PulseSpec pulse = shape == "gaussian"
                                ? gaussian_pulse(area / shape_area_factor(PulseShape::gaussian))
                                : square_pulse(area);
    const double t_end = pulse.t_end();
    std::vector<double> times;
    for (long i = 1; i <= samples; ++i)
        times.push_back(t_end * static_cast<double>(i) / static_cast<double>(samples));

    PropagateOptions opts;
    const Trajectory exact = oracle::exact_evolve(couplings, pulse, 0.0, t_end, times, opts);
    HamiltonianAction action(basis, partition, pulse);
    const Trajectory super = propagate(action, ground_state(basis->dimension()).amplitudes,
                                       0.0, t_end, times, opts);
    const oracle::DeviationReport report =
        oracle::compare_superatom(exact, n_atoms, super, *basis, partition);

    nlohmann::json j = nlohmann::json::parse(report.to_json());
    j["n_atoms"] = n_atoms;
    j["n_superatoms"] = partition.n_superatoms();
    j["m_max"] = m_eff;
    j["scaled_strength"] = strength;
    j["pulse_shape"] = shape;
    j["pulse_area"] = area;
    j["exact_norm_drift"] = exact.max_norm_drift;
    j["superatom_norm_drift"] = super.max_norm_drift;
    const std::string text = j.dump(2);
    std::printf("%s\n", text.c_str());
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write '" + out_path + "'");
        f << text << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collective Rydberg excitation simulator"};
    app.set_version_flag("--version", RYDSIM_VERSION);
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "run a configured ensemble scan");
    std::string config_path, figure, out_dir = "out";
    std::vector<std::string> overrides;
    long workers = -1;
    long long seed = -1;
    sim->add_option("--config", config_path, "key=value configuration file");
    sim->add_option("--figure", figure, "figure preset: 1a 1b 2a 2b 3a 3b 4 5");
    sim->add_option("--set", overrides, "override a configuration key (key=value)");
    sim->add_option("--workers", workers, "worker threads (0 = hardware)");
    sim->add_option("--seed", seed, "master seed");
    sim->add_option("--out", out_dir, "output directory");

    auto* val = app.add_subcommand("validate", "compare against the exact 2^N solver");
    bool against_oracle = false;
    int v_n = 8;
    unsigned long long v_seed = 1;
    double v_strength = 20.0, v_area = 3.14159265358979324;
    std::string v_shape = "square", v_out;
    long v_superatoms = 0, v_mmax = 0, v_samples = 41;
    val->add_flag("--against-oracle", against_oracle, "run the oracle comparison");
    val->add_option("--n", v_n, "atom count (<= 14)");
    val->add_option("--seed", v_seed, "seed");
    val->add_option("--strength", v_strength, "scaled interaction strength |kappa_nn| tau");
    val->add_option("--area", v_area, "total pulse area");
    val->add_option("--shape", v_shape, "square | gaussian");
    val->add_option("--superatoms", v_superatoms, "superatom count (0 = singletons)");
    val->add_option("--m-max", v_mmax, "excitation cutoff (0 = untruncated)");
    val->add_option("--samples", v_samples, "trajectory sample count");
    val->add_option("--out", v_out, "also write the report to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_simulate(config_path, figure, overrides, workers, seed, out_dir);
        if (val->parsed()) {
            if (!against_oracle)
                throw std::invalid_argument("validate currently requires --against-oracle");
            return run_validate(v_n, v_seed, v_strength, v_area, v_shape, v_superatoms,
                                v_mmax, v_samples, v_out);
        }
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 1;
    }
    return 0;
}
