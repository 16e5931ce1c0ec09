#include "rydsim/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace rydsim {

int SuperatomPartition::group_of(int atom) const {
    for (int i = 0; i < n_superatoms(); ++i) {
        if (std::binary_search(groups[i].begin(), groups[i].end(), atom)) return i;
    }
    throw std::out_of_range("group_of: atom not in partition");
}

double superatom_coupling(const std::vector<int>& group_a, const std::vector<int>& group_b,
                          const PairCouplings& couplings) {
    if (group_a.empty() || group_b.empty())
        throw std::invalid_argument("superatom_coupling: empty group");
    for (int p : group_a) {
        if (std::find(group_b.begin(), group_b.end(), p) != group_b.end())
            throw std::invalid_argument("superatom_coupling: groups overlap");
    }
    double sum = 0.0;
    for (int p : group_a)
        for (int q : group_b) sum += couplings.kappa(p, q);
    return sum / (static_cast<double>(group_a.size()) * static_cast<double>(group_b.size()));
}

SuperatomPartition build_partition(const PairCouplings& couplings, int target_count) {
    const int n = static_cast<int>(couplings.kappa.rows());
    if (target_count < 1 || target_count > n)
        throw std::invalid_argument("build_partition: target_count out of range [1, N]");

    std::vector<std::vector<int>> groups(n);
    for (int p = 0; p < n; ++p) groups[p] = {p};
    Eigen::MatrixXd k = couplings.kappa;  // singleton k equals kappa
    k.diagonal().setZero();
    std::vector<double> counts(n, 1.0);

    while (static_cast<int>(groups.size()) > target_count) {
        // pair with the largest |k|; ties to lexicographically smallest (i,j)
        int bi = 0, bj = 1;
        double best = -1.0;
        const int m = static_cast<int>(groups.size());
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                const double a = std::abs(k(i, j));
                if (a > best) {
                    best = a;
                    bi = i;
                    bj = j;
                }
            }
        }
        // merge bj into bi; every other row updates by the weighted mean,
        // which reproduces the exact cross-pair average
        const double ni = counts[bi], nj = counts[bj];
        for (int m2 = 0; m2 < m; ++m2) {
            if (m2 == bi || m2 == bj) continue;
            const double merged = (ni * k(bi, m2) + nj * k(bj, m2)) / (ni + nj);
            k(bi, m2) = merged;
            k(m2, bi) = merged;
        }
        k(bi, bi) = 0.0;
        counts[bi] = ni + nj;
        groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
        std::sort(groups[bi].begin(), groups[bi].end());

        groups.erase(groups.begin() + bj);
        counts.erase(counts.begin() + bj);
        // drop row/column bj
        const int mm = m - 1;
        Eigen::MatrixXd knew(mm, mm);
        for (int a = 0, ra = 0; a < m; ++a) {
            if (a == bj) continue;
            for (int b = 0, rb = 0; b < m; ++b) {
                if (b == bj) continue;
                knew(ra, rb) = k(a, b);
                ++rb;
            }
            ++ra;
        }
        k = std::move(knew);
    }

    SuperatomPartition part;
    part.groups = std::move(groups);
    part.k = std::move(k);
    part.member_counts.resize(static_cast<int>(part.groups.size()));
    for (int i = 0; i < part.n_superatoms(); ++i)
        part.member_counts(i) = static_cast<int>(part.groups[i].size());
    return part;
}

BlockadeReport blockade_diagnostic(const SuperatomPartition& partition,
                                   const PairCouplings& couplings, double bandwidth,
                                   double safety_factor) {
    BlockadeReport report;
    for (int i = 0; i < partition.n_superatoms(); ++i) {
        const auto& g = partition.groups[i];
        double min_abs = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = a + 1; b < g.size(); ++b)
                min_abs = std::min(min_abs, std::abs(couplings.kappa(g[a], g[b])));
        const bool flagged = g.size() > 1 && min_abs < safety_factor * bandwidth;
        report.entries.push_back({i, min_abs, flagged});
        if (flagged) report.flagged_groups.push_back(i);
    }
    return report;
}

std::string partition_to_json(const SuperatomPartition& partition) {
    nlohmann::json j;
    j["n_superatoms"] = partition.n_superatoms();
    j["groups"] = partition.groups;
    j["member_counts"] = std::vector<int>(
        partition.member_counts.data(),
        partition.member_counts.data() + partition.member_counts.size());
    std::vector<std::vector<double>> k(partition.n_superatoms());
    for (int i = 0; i < partition.n_superatoms(); ++i)
        for (int jj = 0; jj < partition.n_superatoms(); ++jj)
            k[i].push_back(partition.k(i, jj));
    j["k"] = k;
    return j.dump(2);
}

}  // namespace rydsim
