#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rydsim/config.hpp"
#include "rydsim/observables.hpp"

namespace rydsim {

struct RealizationResult {
    bool ok = false;
    std::string error;
    long n_atoms = 0;
    int n_superatoms = 0;
    std::size_t basis_dimension = 0;
    std::vector<ObservableRecord> records;  // one per scan grid point
    std::vector<CorrelationSample> correlation;
    double max_norm_drift = 0.0;
    long long accepted_steps = 0;
    int blockade_flags = 0;
};

struct EnsembleResult {
    std::vector<double> areas;
    std::vector<double> n_exc_mean;
    std::vector<double> n_exc_stderr;
    std::vector<double> variance_ratio_mean;  // NaN where undefined everywhere
    std::vector<long> variance_ratio_count;
    std::vector<RealizationResult> realizations;
    std::optional<CollectiveFit> fit;
    long n_ok = 0;
    long n_failed = 0;
    double max_norm_drift = 0.0;
    // peak n_exc of the first-half versus second-half realization averages
    double stability_first_half_peak = 0.0;
    double stability_second_half_peak = 0.0;
    long blockade_flags_total = 0;
    long correlation_invalid = 0;
};

// One seeded arrangement: sample N and positions, couple, partition, then
// propagate the scan and record observables at each grid point.
RealizationResult run_realization(const RunConfig& config, const ResolvedRun& resolved,
                                  std::uint64_t realization_seed);

// Fan realizations over a worker pool and average; realization k's stream
// depends only on (seed, k), so results do not depend on scheduling.
EnsembleResult run_ensemble(const RunConfig& config);

// curves.csv, correlation.csv (when samples exist) and summary.json
void emit_results(const EnsembleResult& result, const RunConfig& config,
                  const ResolvedRun& resolved, const std::string& out_dir);

}  // namespace rydsim
