#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rydsim/runner.hpp"
#include "rydsim/units.hpp"

using namespace rydsim;

namespace {

RunConfig small_config() {
    RunConfig cfg;
    cfg.set("n_atoms", "6");
    cfg.set("density", "1e11");
    cfg.set("scaled_strength", "30");
    cfg.set("superatom_count", "4");
    cfg.set("m_max", "3");
    cfg.set("realizations", "4");
    cfg.set("area_min", "0.5");
    cfg.set("area_max", "6");
    cfg.set("area_points", "8");
    cfg.set("seed", "99");
    cfg.set("workers", "1");
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("config file parsing with comments and overrides") {
    const std::string path = "/tmp/rydsim_test_config.txt";
    {
        std::ofstream f(path);
        f << "# comment line\n"
          << "n_atoms = 12\n"
          << "radius = 3.5   # trailing comment\n"
          << "scaled_strength = 10\n"
          << "\n"
          << "pulse_shape = gaussian\n";
    }
    auto cfg = load_config_file(path);
    CHECK(cfg.n_atoms == 12);
    CHECK(cfg.radius == 3.5);
    CHECK(cfg.pulse_shape == "gaussian");
    CHECK(cfg.given.count("radius") == 1);
    CHECK(cfg.given.count("density") == 0);
    cfg.set("n_atoms", "9");
    CHECK(cfg.n_atoms == 9);
    CHECK_THROWS(cfg.set("no_such_key", "1"));
    CHECK_THROWS(cfg.set("n_atoms", "abc"));
    std::remove(path.c_str());
}

TEST_CASE("validation rejects inconsistent configurations") {
    SUBCASE("needs exactly one of density/radius") {
        RunConfig c = small_config();
        c.set("radius", "2.0");  // now both given
        CHECK_THROWS(resolve(c));
        RunConfig c2;
        c2.set("scaled_strength", "1");
        CHECK_THROWS(resolve(c2));  // neither given
    }
    SUBCASE("needs exactly one of scaled_strength/c6_eff") {
        RunConfig c = small_config();
        c.set("c6_eff", "100");
        CHECK_THROWS(resolve(c));
    }
    SUBCASE("grid must be nonempty and increasing") {
        RunConfig c = small_config();
        c.set("area_points", "0");
        CHECK_THROWS(resolve(c));
        RunConfig c2 = small_config();
        c2.set("area_min", "7");  // above area_max
        CHECK_THROWS(resolve(c2));
    }
    SUBCASE("shape and scan are checked") {
        RunConfig c = small_config();
        c.set("pulse_shape", "triangle");
        CHECK_THROWS(resolve(c));
        RunConfig c2 = small_config();
        c2.set("scan", "sideways");
        CHECK_THROWS(resolve(c2));
    }
}

TEST_CASE("figure presets resolve") {
    for (const auto& fig : known_figures()) {
        RunConfig cfg;
        apply_figure_preset(cfg, fig);
        const auto r = resolve(cfg);
        CHECK(r.n_mean == 70);
        CHECK(r.radius == doctest::Approx(5.5).epsilon(0.01));
        CHECK(r.target_count_base == 23);
    }
    RunConfig cfg;
    CHECK_THROWS(apply_figure_preset(cfg, "9z"));
}

TEST_CASE("interaction calibration") {
    CHECK(calibrate_interaction(0.0, 70, 5.5, true) == 0.0);
    const double one = calibrate_interaction(10.0, 70, 5.5, true);
    const double two = calibrate_interaction(20.0, 70, 5.5, true);
    CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-14));
    CHECK(one < 0.0);  // attractive
    CHECK(calibrate_interaction(10.0, 70, 5.5, false) == doctest::Approx(-one));

    // same strength at doubled density: radius scales by 2^(-1/3) at fixed N,
    // the reference nn distance likewise, so c6 scales by (rho1/rho2)^2 = 1/4
    const double rho = units::density_um3(1e11);
    const double r1 = units::radius_from_density(70.0, rho);
    const double r2 = units::radius_from_density(70.0, 2.0 * rho);
    const double c1 = calibrate_interaction(5.0, 70, r1, true);
    const double c2 = calibrate_interaction(5.0, 70, r2, true);
    CHECK(c2 / c1 == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("interactions off: curve equals N sin^2(A/2) for any seed") {
    RunConfig cfg = small_config();
    cfg.set("scaled_strength", "0");
    cfg.set("superatom_count", "6");  // singletons
    for (const char* seed : {"1", "777"}) {
        cfg.set("seed", seed);
        const auto res = run_ensemble(cfg);
        for (std::size_t i = 0; i < res.areas.size(); ++i) {
            const double expect = 6.0 * std::pow(std::sin(res.areas[i] / 2.0), 2);
            CHECK(res.n_exc_mean[i] == doctest::Approx(expect).epsilon(1e-12));
            CHECK(res.n_exc_stderr[i] == 0.0);
            if (res.variance_ratio_count[i] > 0)
                CHECK(res.variance_ratio_mean[i] == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("a single realization averages to itself") {
    RunConfig cfg = small_config();
    cfg.set("realizations", "1");
    const auto res = run_ensemble(cfg);
    REQUIRE(res.realizations.size() == 1);
    for (std::size_t i = 0; i < res.areas.size(); ++i)
        CHECK(res.n_exc_mean[i] == res.realizations[0].records[i].n_exc);
}

TEST_CASE("ensemble mean is the arithmetic mean of realization curves") {
    const auto res = run_ensemble(small_config());
    for (std::size_t i = 0; i < res.areas.size(); ++i) {
        double sum = 0.0;
        for (const auto& r : res.realizations) sum += r.records[i].n_exc;
        CHECK(res.n_exc_mean[i] == doctest::Approx(sum / 4.0).epsilon(1e-15));
    }
}

TEST_CASE("worker count does not change the results") {
    RunConfig cfg = small_config();
    const auto serial = run_ensemble(cfg);
    cfg.set("workers", "3");
    const auto parallel = run_ensemble(cfg);
    for (std::size_t i = 0; i < serial.areas.size(); ++i)
        CHECK(serial.n_exc_mean[i] == parallel.n_exc_mean[i]);  // bitwise
}

TEST_CASE("realization streams depend only on (seed, index)") {
    RunConfig cfg = small_config();
    const auto resolved = resolve(cfg);
    const auto r2a = run_realization(cfg, resolved, derive_seed(99, 2));
    const auto r2b = run_realization(cfg, resolved, derive_seed(99, 2));
    REQUIRE(r2a.ok);
    for (std::size_t i = 0; i < r2a.records.size(); ++i)
        CHECK(r2a.records[i].n_exc == r2b.records[i].n_exc);
}

TEST_CASE("poisson mode draws a fluctuating atom number") {
    RunConfig cfg = small_config();
    cfg.set("poisson", "true");
    cfg.set("n_atoms", "8");
    cfg.set("realizations", "12");
    const auto res = run_ensemble(cfg);
    bool varies = false;
    for (const auto& r : res.realizations)
        if (r.ok && r.n_atoms != 8) varies = true;
    CHECK(varies);
}

TEST_CASE("gaussian and omega scans run through the generic path") {
    RunConfig cfg = small_config();
    cfg.set("realizations", "2");
    cfg.set("area_points", "4");
    cfg.set("pulse_shape", "gaussian");
    cfg.set("scan", "tau");
    const auto g = run_ensemble(cfg);
    CHECK(g.n_ok == 2);
    cfg.set("pulse_shape", "square");
    cfg.set("scan", "omega");
    const auto o = run_ensemble(cfg);
    CHECK(o.n_ok == 2);
    // scans differ away from the full-blockade limit
    bool differ = false;
    for (std::size_t i = 0; i < g.areas.size(); ++i)
        if (std::abs(g.n_exc_mean[i] - o.n_exc_mean[i]) > 1e-6) differ = true;
    CHECK(differ);
}

TEST_CASE("emitted files are schema-correct and byte-identical across reruns") {
    namespace fs = std::filesystem;
    RunConfig cfg = small_config();
    cfg.set("correlation", "true");
    const auto resolved = resolve(cfg);
    const auto res = run_ensemble(cfg);

    const std::string dir1 = "/tmp/rydsim_out_a", dir2 = "/tmp/rydsim_out_b";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    emit_results(res, cfg, resolved, dir1);
    const auto res2 = run_ensemble(cfg);
    emit_results(res2, cfg, resolved, dir2);

    for (const char* name : {"curves.csv", "correlation.csv", "summary.json"}) {
        const std::string a = slurp(dir1 + "/" + std::string(name));
        const std::string b = slurp(dir2 + "/" + std::string(name));
        CHECK(a == b);
    }

    const std::string curves = slurp(dir1 + "/curves.csv");
    CHECK(curves.rfind("pulse_area,n_exc_mean,n_exc_stderr,variance_ratio_mean\n", 0) == 0);
    CHECK(curves.find("\r") == std::string::npos);  // LF endings

    // 17-significant-digit round trip: re-parse and compare exactly
    std::istringstream in(curves);
    std::string line;
    std::getline(in, line);  // header
    std::size_t row = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
        CHECK(std::stod(line.substr(0, c1)) == res.areas[row]);
        CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == res.n_exc_mean[row]);
        ++row;
    }
    CHECK(row == res.areas.size());

    const std::string corr = slurp(dir1 + "/correlation.csv");
    CHECK(corr.rfind("distance_um,c_mean,c_stderr,n_pairs\n", 0) == 0);

    const std::string summary = slurp(dir1 + "/summary.json");
    CHECK(summary.find("\"version\"") != std::string::npos);
    CHECK(summary.find("\"seed\"") != std::string::npos);
    CHECK(summary.find("\"config\"") != std::string::npos);
    CHECK(summary.find("\"collective_fit\"") != std::string::npos);

    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("correlation pair bookkeeping matches realizations x partners") {
    RunConfig cfg = small_config();
    cfg.set("correlation", "true");
    const auto res = run_ensemble(cfg);
    std::size_t pairs = 0;
    for (const auto& r : res.realizations) pairs += r.correlation.size();
    CHECK(pairs == 4u * 5u);  // 4 realizations x (N-1) partners
}

TEST_CASE("empty grid is rejected before any file is written") {
    RunConfig cfg = small_config();
    cfg.set("area_points", "0");
    CHECK_THROWS(resolve(cfg));
}

TEST_CASE("stability halves are populated") {
    const auto res = run_ensemble(small_config());
    CHECK(res.stability_first_half_peak > 0.0);
    CHECK(res.stability_second_half_peak > 0.0);
}

}  // TEST_SUITE
