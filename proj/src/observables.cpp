#include "rydsim/observables.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "rydsim/units.hpp"

namespace rydsim {

ObservableRecord excitation_observables(const ManyBodyState& state,
                                        const TruncatedBasis& basis,
                                        const SuperatomPartition& partition, int n_atoms) {
    const std::size_t dim = basis.dimension();
    if (static_cast<std::size_t>(state.amplitudes.size()) != dim)
        throw std::invalid_argument("excitation_observables: state/basis mismatch");

    ObservableRecord rec;
    rec.p_super = Eigen::VectorXd::Zero(basis.n_superatoms());
    double n1 = 0.0, n2 = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        const double w = std::norm(state.amplitudes(static_cast<Eigen::Index>(s)));
        if (w == 0.0) continue;
        std::uint32_t mk = basis.mask(s);
        const int m = std::popcount(mk);
        n1 += w * m;
        n2 += w * static_cast<double>(m) * static_cast<double>(m);
        while (mk) {
            rec.p_super(std::countr_zero(mk)) += w;
            mk &= mk - 1;
        }
    }
    rec.n_mean = n1;
    rec.n2_mean = n2;
    rec.n_exc = n1;
    rec.p_exc = n1 / static_cast<double>(n_atoms);
    rec.variance_ratio = variance_ratio(rec, n_atoms);
    (void)partition;
    return rec;
}

std::optional<double> variance_ratio(const ObservableRecord& record, int n_atoms) {
    const double p = record.p_exc;
    if (!(p > 0.0) || !(p < 1.0)) return std::nullopt;
    const double var = std::max(0.0, record.n2_mean - record.n_mean * record.n_mean);
    const double var_bernoulli = static_cast<double>(n_atoms) * p * (1.0 - p);
    return std::sqrt(var) / std::sqrt(var_bernoulli);
}

std::vector<CorrelationSample> pair_correlation(const ManyBodyState& state,
                                                const TruncatedBasis& basis,
                                                const SuperatomPartition& partition,
                                                const AtomEnsemble& ensemble, int central,
                                                double marginal_floor) {
    const int n = ensemble.n_atoms();
    if (central < 0 || central >= n)
        throw std::invalid_argument("pair_correlation: central atom out of range");
    const int ci = partition.group_of(central);

    // marginals P(i) and joints P(ci, j) in one sweep over the state
    const int n_sa = basis.n_superatoms();
    Eigen::VectorXd p_single = Eigen::VectorXd::Zero(n_sa);
    Eigen::VectorXd p_joint = Eigen::VectorXd::Zero(n_sa);
    const std::uint32_t central_bit = 1u << ci;
    for (std::size_t s = 0; s < basis.dimension(); ++s) {
        const double w = std::norm(state.amplitudes(static_cast<Eigen::Index>(s)));
        if (w == 0.0) continue;
        std::uint32_t mk = basis.mask(s);
        const bool has_central = (mk & central_bit) != 0;
        while (mk) {
            const int i = std::countr_zero(mk);
            mk &= mk - 1;
            p_single(i) += w;
            if (has_central && i != ci) p_joint(i) += w;
        }
    }

    std::vector<CorrelationSample> out;
    out.reserve(static_cast<std::size_t>(n) - 1);
    for (int q = 0; q < n; ++q) {
        if (q == central) continue;
        CorrelationSample smp;
        smp.atom_p = central;
        smp.atom_q = q;
        smp.super_p = ci;
        smp.super_q = partition.group_of(q);
        smp.distance = (ensemble.positions.col(central) - ensemble.positions.col(q)).norm();
        if (smp.super_q == ci) {
            smp.same_superatom = true;
            smp.c_value = 0.0;  // one excitation per superatom, never two
        } else if (p_single(ci) < marginal_floor || p_single(smp.super_q) < marginal_floor) {
            smp.valid = false;
        } else {
            smp.c_value = p_joint(smp.super_q) / (p_single(ci) * p_single(smp.super_q));
        }
        out.push_back(smp);
    }
    return out;
}

namespace {

// peak position/height by fitting a parabola through (i-1, i, i+1)
std::pair<double, double> quadratic_peak(const std::vector<std::pair<double, double>>& c,
                                         std::size_t i) {
    if (i == 0 || i + 1 >= c.size()) return {c[i].first, c[i].second};
    const double x0 = c[i - 1].first, x1 = c[i].first, x2 = c[i + 1].first;
    const double y0 = c[i - 1].second, y1 = c[i].second, y2 = c[i + 1].second;
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (x2 - x0);  // second divided difference
    if (curv >= 0.0) return {x1, y1};
    const double xm = std::clamp(0.5 * (x0 + x1) - d1 / (2.0 * curv), x0, x2);
    const double ym = y0 + d1 * (xm - x0) + curv * (xm - x0) * (xm - x1);
    return {xm, ym};
}

}  // namespace

std::optional<CollectiveFit> extract_collective_params(
    const std::vector<std::pair<double, double>>& curve, int n_atoms,
    double prominence_frac, bool invert_n_domain) {
    if (curve.size() < 3) return std::nullopt;
    double global_max = 0.0;
    for (const auto& [a, v] : curve) global_max = std::max(global_max, v);
    const double prominence = prominence_frac * global_max;

    std::vector<std::size_t> peaks;
    double valley = curve.front().second;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        const double y = curve[i].second;
        if (y > curve[i - 1].second && y >= curve[i + 1].second) {
            if (y - valley >= prominence) {
                peaks.push_back(i);
                valley = y;
            }
        }
        valley = std::min(valley, y);
    }
    if (peaks.empty()) return std::nullopt;

    CollectiveFit fit;
    auto [f1, y1] = quadratic_peak(curve, peaks[0]);
    fit.f1 = f1;
    fit.n_exc_1 = y1;
    fit.p1 = y1 / static_cast<double>(n_atoms);
    fit.alpha = units::pi / fit.f1;
    if (peaks.size() > 1) {
        auto [f2, y2] = quadratic_peak(curve, peaks[1]);
        (void)y2;
        fit.f2 = f2;
        fit.beta = f2 / f1;
    }
    fit.n_domain = invert_n_domain ? fit.p1 : 1.0 / fit.p1;
    fit.gamma = fit.alpha / std::sqrt(fit.n_domain);
    fit.gamma_half_area = 0.5 * fit.gamma;
    return fit;
}

Eigen::VectorXd bernoulli_distribution(int n_atoms, double p) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("bernoulli_distribution: p outside [0, 1]");
    Eigen::VectorXd dist(n_atoms + 1);
    // C(N,n) p^n (1-p)^(N-n) built by recurrence to avoid overflow
    double log_p = p > 0.0 ? std::log(p) : 0.0;
    double log_q = p < 1.0 ? std::log(1.0 - p) : 0.0;
    double log_choose = 0.0;
    for (int k = 0; k <= n_atoms; ++k) {
        if ((p == 0.0 && k > 0) || (p == 1.0 && k < n_atoms)) {
            dist(k) = 0.0;
        } else {
            dist(k) = std::exp(log_choose + k * log_p + (n_atoms - k) * log_q);
        }
        if (k < n_atoms)
            log_choose += std::log(static_cast<double>(n_atoms - k)) -
                          std::log(static_cast<double>(k + 1));
    }
    return dist;
}

}  // namespace rydsim
