#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rydsim/geometry.hpp"

namespace rydsim {

// Disjoint grouping of atoms into superatoms. k(i,j) is the arithmetic mean
// of the atomic couplings over all cross pairs of groups i and j; diagonal
// entries are unused and kept at zero.
struct SuperatomPartition {
    std::vector<std::vector<int>> groups;  // sorted atom indices per group
    Eigen::VectorXi member_counts;
    Eigen::MatrixXd k;

    int n_superatoms() const { return static_cast<int>(groups.size()); }
    int group_of(int atom) const;  // linear scan; fine for reporting paths
};

// Mean coupling between two disjoint, nonempty atom-index sets.
double superatom_coupling(const std::vector<int>& group_a, const std::vector<int>& group_b,
                          const PairCouplings& couplings);

// Agglomerative merge: start from singletons, repeatedly join the pair with
// the largest |k_ij| (ties to the lexicographically smallest (i,j)) until
// target_count groups remain.
SuperatomPartition build_partition(const PairCouplings& couplings, int target_count);

// Validity check for the one-excitation-per-group assumption: groups whose
// weakest internal coupling is not well above the pulse bandwidth get flagged.
struct BlockadeReport {
    struct GroupEntry {
        int group;
        double min_intra_abs_kappa;  // +inf for singletons
        bool flagged;
    };
    std::vector<GroupEntry> entries;
    std::vector<int> flagged_groups;
};

BlockadeReport blockade_diagnostic(const SuperatomPartition& partition,
                                   const PairCouplings& couplings, double bandwidth,
                                   double safety_factor = 10.0);

// Group membership lists and the k matrix, for inspection.
std::string partition_to_json(const SuperatomPartition& partition);

}  // namespace rydsim
