#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace rydsim {

// Truncated many-body basis: all subsets S of {0..n_superatoms-1} with
// |S| <= max_excited, as bitmasks with a bijective combinatorial ranking
// (colexicographic within each excitation shell). Promotion/demotion
// neighbors are precomputed as a CSR adjacency so the Hamiltonian action
// needs no search and stores no matrix elements.
class TruncatedBasis {
  public:
    TruncatedBasis(int n_superatoms, int max_excited,
                   std::size_t dimension_cap = (std::size_t{1} << 22));

    int n_superatoms() const { return n_sa_; }
    int max_excited() const { return m_max_; }
    std::size_t dimension() const { return masks_.size(); }

    std::uint32_t mask(std::size_t ordinal) const { return masks_[ordinal]; }
    std::size_t rank(std::uint32_t mask) const;  // inverse of mask()

    // CSR links; code = superatom index, bit 7 set when the neighbor has one
    // excitation more than the row state
    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::uint32_t>& link_target() const { return link_target_; }
    const std::vector<std::uint8_t>& link_code() const { return link_code_; }

    static constexpr std::uint8_t kUpFlag = 0x80;

    // Sum over m <= max_excited of C(n, m); throws (reporting the computed
    // value) if it exceeds the cap.
    static std::size_t dimension_for(int n_superatoms, int max_excited);

  private:
    int n_sa_;
    int m_max_;
    std::vector<std::uint32_t> masks_;
    std::vector<std::uint64_t> offsets_;  // ordinal offset of each shell
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> link_target_;
    std::vector<std::uint8_t> link_code_;
};

}  // namespace rydsim
