#include "rydsim/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rydsim/oracle.hpp"
#include "rydsim/propagate.hpp"
#include "rydsim/rng.hpp"
#include "rydsim/version.hpp"

namespace rydsim {

namespace {

// bases depend only on (n_superatoms, m_max); share them across realizations
std::shared_ptr<const TruncatedBasis> get_basis(int n_sa, int m_max, std::size_t cap) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::weak_ptr<const TruncatedBasis>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{n_sa, m_max}];
    if (auto b = slot.lock()) {
        if (b->dimension() > cap)
            throw std::length_error("basis dimension " + std::to_string(b->dimension()) +
                                    " exceeds cap " + std::to_string(cap));
        return b;
    }
    auto b = std::make_shared<const TruncatedBasis>(n_sa, m_max, cap);
    slot = b;
    return b;
}

// Non-interacting evolution factorizes: each superatom is an independent
// resonant two-level system, P_i(A) = sin^2(sqrt(N_i) A / 2) for any envelope.
// With every coupling exactly zero this closed form is the model, not an
// approximation of it, and it keeps kappa = 0 scans instant at any N.
ObservableRecord analytic_record(double area, const SuperatomPartition& partition,
                                 int n_atoms) {
    ObservableRecord rec;
    rec.pulse_area = area;
    const int n_sa = partition.n_superatoms();
    rec.p_super.resize(n_sa);
    double n1 = 0.0, var = 0.0;
    for (int i = 0; i < n_sa; ++i) {
        const double s =
            std::sin(0.5 * std::sqrt(static_cast<double>(partition.member_counts(i))) * area);
        const double p = s * s;
        rec.p_super(i) = p;
        n1 += p;
        var += p * (1.0 - p);
    }
    rec.n_mean = n1;
    rec.n_exc = n1;
    rec.n2_mean = var + n1 * n1;
    rec.p_exc = n1 / static_cast<double>(n_atoms);
    rec.variance_ratio = variance_ratio(rec, n_atoms);
    return rec;
}

std::vector<CorrelationSample> analytic_correlation(const ObservableRecord& rec,
                                                    const SuperatomPartition& partition,
                                                    const AtomEnsemble& ensemble,
                                                    int central, double floor) {
    std::vector<CorrelationSample> out;
    const int ci = partition.group_of(central);
    for (int q = 0; q < ensemble.n_atoms(); ++q) {
        if (q == central) continue;
        CorrelationSample smp;
        smp.atom_p = central;
        smp.atom_q = q;
        smp.super_p = ci;
        smp.super_q = partition.group_of(q);
        smp.distance = (ensemble.positions.col(central) - ensemble.positions.col(q)).norm();
        if (smp.super_q == ci) {
            smp.same_superatom = true;
            smp.c_value = 0.0;
        } else if (rec.p_super(ci) < floor || rec.p_super(smp.super_q) < floor) {
            smp.valid = false;
        } else {
            smp.c_value = 1.0;  // product state: P(i,j) factorizes exactly
        }
        out.push_back(smp);
    }
    return out;
}

void format_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

RealizationResult run_realization(const RunConfig& config, const ResolvedRun& resolved,
                                  std::uint64_t realization_seed) {
    RealizationResult res;
    try {
        Rng rng(realization_seed);
        long n_k = resolved.n_mean;
        if (config.poisson) {
            do {
                n_k = sample_atom_count(static_cast<double>(resolved.n_mean), rng);
            } while (n_k < 1);
        }
        res.n_atoms = n_k;

        const AtomEnsemble ensemble =
            sample_positions(static_cast<int>(n_k), resolved.radius, rng);
        const PairCouplings couplings =
            pair_couplings(ensemble, resolved.c6_internal, config.min_pair_distance);

        long target = std::lround(static_cast<double>(resolved.target_count_base) *
                                  static_cast<double>(n_k) /
                                  static_cast<double>(resolved.n_mean));
        target = std::max(1l, std::min(target, n_k));

        const SuperatomPartition partition =
            build_partition(couplings, static_cast<int>(target));
        res.n_superatoms = partition.n_superatoms();

        // validity check against the pulse bandwidth (1 in internal units)
        const BlockadeReport blockade = blockade_diagnostic(partition, couplings, 1.0);
        res.blockade_flags = static_cast<int>(blockade.flagged_groups.size());

        const auto& grid = resolved.area_grid;
        res.records.resize(grid.size());
        const int central = central_atom(ensemble);
        const bool want_correlation = config.correlation && n_k > 1;

        if (resolved.c6_internal == 0.0) {
            for (std::size_t i = 0; i < grid.size(); ++i)
                res.records[i] =
                    analytic_record(grid[i], partition, static_cast<int>(n_k));
            if (want_correlation)
                res.correlation =
                    analytic_correlation(res.records[resolved.correlation_index],
                                         partition, ensemble, central, 1e-12);
            res.ok = true;
            return res;
        }

        const int m_eff =
            static_cast<int>(std::min<long>(config.m_max, partition.n_superatoms()));
        auto basis = get_basis(partition.n_superatoms(), m_eff, config.dimension_cap);
        res.basis_dimension = basis->dimension();

        PropagateOptions popts;
        popts.rtol = config.rtol;
        popts.atol = config.atol;

        const bool gaussian = config.pulse_shape == "gaussian";
        const bool tau_scan = config.scan == "tau";
        const double cf = shape_area_factor(gaussian ? PulseShape::gaussian
                                                     : PulseShape::square);

        if (!gaussian && tau_scan) {
            // one constant-envelope propagation covers the whole area scan:
            // truncating a square pulse at t is the same as sampling at t
            const double a_ref = resolved.area_reference;
            const double t_total = grid.back() / a_ref;
            PulseSpec pulse = square_pulse(a_ref, t_total);
            HamiltonianAction action(basis, partition, pulse);
            std::vector<double> times(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) times[i] = grid[i] / a_ref;

            std::size_t idx = 0;
            popts.on_sample = [&](const ManyBodyState& st) {
                res.records[idx] = excitation_observables(st, *basis, partition,
                                                          static_cast<int>(n_k));
                res.records[idx].pulse_area = grid[idx];
                if (want_correlation && idx == resolved.correlation_index)
                    res.correlation =
                        pair_correlation(st, *basis, partition, ensemble, central);
                ++idx;
            };
            const Trajectory traj = propagate(action, ground_state(basis->dimension()).amplitudes,
                                              0.0, t_total, times, popts);
            res.max_norm_drift = traj.max_norm_drift;
            res.accepted_steps = traj.accepted_steps;
        } else {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double area = grid[i];
                const double k_scale = tau_scan ? area / resolved.area_reference : 1.0;
                PulseSpec pulse = gaussian
                                      ? gaussian_pulse(area / cf, 1.0, config.gaussian_window)
                                      : square_pulse(area, 1.0);
                HamiltonianAction action(basis, partition, pulse, k_scale);
                const double t_end = pulse.t_end();

                popts.on_sample = [&](const ManyBodyState& st) {
                    res.records[i] = excitation_observables(st, *basis, partition,
                                                            static_cast<int>(n_k));
                    res.records[i].pulse_area = area;
                    if (want_correlation && i == resolved.correlation_index)
                        res.correlation =
                            pair_correlation(st, *basis, partition, ensemble, central);
                };
                const Trajectory traj =
                    propagate(action, ground_state(basis->dimension()).amplitudes, 0.0,
                              t_end, {t_end}, popts);
                res.max_norm_drift = std::max(res.max_norm_drift, traj.max_norm_drift);
                res.accepted_steps += traj.accepted_steps;
            }
        }
        res.ok = true;
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
    }
    return res;
}

EnsembleResult run_ensemble(const RunConfig& config) {
    const ResolvedRun resolved = resolve(config);
    const long n_real = config.realizations;

    EnsembleResult out;
    out.areas = resolved.area_grid;
    out.realizations.resize(static_cast<std::size_t>(n_real));

    std::atomic<long> next{0};
    auto worker = [&]() {
        while (true) {
            const long k = next.fetch_add(1);
            if (k >= n_real) break;
            out.realizations[static_cast<std::size_t>(k)] = run_realization(
                config, resolved, derive_seed(config.seed, static_cast<std::uint64_t>(k)));
        }
    };
    const int n_threads = std::max(1, std::min<int>(resolved.workers,
                                                    static_cast<int>(n_real)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (const auto& r : out.realizations) {
        if (r.ok) {
            ++out.n_ok;
            out.max_norm_drift = std::max(out.max_norm_drift, r.max_norm_drift);
            out.blockade_flags_total += r.blockade_flags;
            for (const auto& s : r.correlation)
                if (!s.valid) ++out.correlation_invalid;
        } else {
            ++out.n_failed;
        }
    }
    if (out.n_failed * 10 > n_real) {
        std::string first;
        for (const auto& r : out.realizations)
            if (!r.ok) {
                first = r.error;
                break;
            }
        throw std::runtime_error("run_ensemble: " + std::to_string(out.n_failed) + "/" +
                                 std::to_string(n_real) +
                                 " realizations failed (first error: " + first + ")");
    }
    if (out.n_ok == 0) throw std::runtime_error("run_ensemble: no successful realizations");

    const std::size_t n_pts = out.areas.size();
    out.n_exc_mean.assign(n_pts, 0.0);
    out.n_exc_stderr.assign(n_pts, 0.0);
    out.variance_ratio_mean.assign(n_pts, std::nan(""));
    out.variance_ratio_count.assign(n_pts, 0);

    for (std::size_t i = 0; i < n_pts; ++i) {
        double sum = 0.0, sum2 = 0.0, vr_sum = 0.0;
        long vr_n = 0;
        for (const auto& r : out.realizations) {
            if (!r.ok) continue;
            const double x = r.records[i].n_exc;
            sum += x;
            sum2 += x * x;
            if (r.records[i].variance_ratio) {
                vr_sum += *r.records[i].variance_ratio;
                ++vr_n;
            }
        }
        const double n = static_cast<double>(out.n_ok);
        const double mean = sum / n;
        out.n_exc_mean[i] = mean;
        if (out.n_ok > 1) {
            const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
            out.n_exc_stderr[i] = std::sqrt(var / n);
        }
        if (vr_n > 0) out.variance_ratio_mean[i] = vr_sum / static_cast<double>(vr_n);
        out.variance_ratio_count[i] = vr_n;
    }

    std::vector<std::pair<double, double>> curve(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) curve[i] = {out.areas[i], out.n_exc_mean[i]};
    out.fit = extract_collective_params(curve, static_cast<int>(resolved.n_mean), 0.02,
                                        config.nd_inverted);

    // convergence diagnostic: first versus second half of the realizations
    auto half_peak = [&](bool second) {
        double peak = 0.0;
        for (std::size_t i = 0; i < n_pts; ++i) {
            double sum = 0.0;
            long cnt = 0;
            long idx = 0;
            for (const auto& r : out.realizations) {
                const bool in_second = idx >= n_real / 2;
                ++idx;
                if (!r.ok || in_second != second) continue;
                sum += r.records[i].n_exc;
                ++cnt;
            }
            if (cnt > 0) peak = std::max(peak, sum / static_cast<double>(cnt));
        }
        return peak;
    };
    out.stability_first_half_peak = half_peak(false);
    out.stability_second_half_peak = half_peak(true);

    return out;
}

void emit_results(const EnsembleResult& result, const RunConfig& config,
                  const ResolvedRun& resolved, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec && !fs::is_directory(out_dir))
        throw std::runtime_error("emit_results: cannot create '" + out_dir +
                                 "': " + ec.message());

    {
        const std::string path = out_dir + "/curves.csv";
        std::ofstream f(path);
        if (!f) throw std::runtime_error("emit_results: cannot write '" + path + "'");
        f << "pulse_area,n_exc_mean,n_exc_stderr,variance_ratio_mean\n";
        for (std::size_t i = 0; i < result.areas.size(); ++i) {
            std::string line;
            format_double(line, result.areas[i]);
            line += ',';
            format_double(line, result.n_exc_mean[i]);
            line += ',';
            format_double(line, result.n_exc_stderr[i]);
            line += ',';
            if (result.variance_ratio_count[i] > 0)
                format_double(line, result.variance_ratio_mean[i]);
            f << line << '\n';
        }
    }

    // distance-binned correlation; every recorded sample counts, pairs inside
    // the central superatom enter as exact zeros
    std::size_t n_corr = 0;
    for (const auto& r : result.realizations)
        if (r.ok) n_corr += r.correlation.size();
    if (n_corr > 0) {
        const std::string path = out_dir + "/correlation.csv";
        std::ofstream f(path);
        if (!f) throw std::runtime_error("emit_results: cannot write '" + path + "'");
        f << "distance_um,c_mean,c_stderr,n_pairs\n";
        const double w = config.bin_width;
        std::map<long, std::vector<double>> bins;
        for (const auto& r : result.realizations) {
            if (!r.ok) continue;
            for (const auto& s : r.correlation) {
                if (!s.valid) continue;
                bins[static_cast<long>(std::floor(s.distance / w))].push_back(s.c_value);
            }
        }
        for (const auto& [bin, values] : bins) {
            double sum = 0.0, sum2 = 0.0;
            for (double v : values) {
                sum += v;
                sum2 += v * v;
            }
            const double n = static_cast<double>(values.size());
            const double mean = sum / n;
            double stderr_ = 0.0;
            if (values.size() > 1) {
                const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
                stderr_ = std::sqrt(var / n);
            }
            std::string line;
            format_double(line, (static_cast<double>(bin) + 0.5) * w);
            line += ',';
            format_double(line, mean);
            line += ',';
            format_double(line, stderr_);
            line += ',';
            line += std::to_string(values.size());
            f << line << '\n';
        }
    }

    {
        nlohmann::json j;
        j["version"] = RYDSIM_VERSION;
        j["seed"] = config.seed;
        j["config"] = nlohmann::json::parse(config.to_json());
        j["resolved"] = {{"radius_um", resolved.radius},
                         {"density_um3", resolved.density_um3},
                         {"c6_internal", resolved.c6_internal},
                         {"reference_nn_um", resolved.reference_nn},
                         {"area_reference", resolved.area_reference}};
        j["realizations_ok"] = result.n_ok;
        j["realizations_failed"] = result.n_failed;
        if (result.fit) {
            const auto& fit = *result.fit;
            nlohmann::json jf;
            jf["f1"] = fit.f1;
            jf["p1"] = fit.p1;
            jf["n_exc_1"] = fit.n_exc_1;
            if (fit.f2) jf["f2"] = *fit.f2;
            jf["alpha"] = fit.alpha;
            if (fit.beta) jf["beta"] = *fit.beta;
            jf["n_domain"] = fit.n_domain;
            jf["gamma"] = fit.gamma;
            jf["gamma_half_area"] = fit.gamma_half_area;
            j["collective_fit"] = jf;
        } else {
            j["collective_fit"] = nullptr;
        }
        j["stability"] = {{"first_half_peak", result.stability_first_half_peak},
                          {"second_half_peak", result.stability_second_half_peak}};
        j["norm_drift_max"] = result.max_norm_drift;
        j["blockade_flags_total"] = result.blockade_flags_total;
        j["correlation_invalid"] = result.correlation_invalid;
        const std::string path = out_dir + "/summary.json";
        std::ofstream f(path);
        if (!f) throw std::runtime_error("emit_results: cannot write '" + path + "'");
        f << j.dump(2) << '\n';
    }
}

}  // namespace rydsim
