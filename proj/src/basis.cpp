#include "rydsim/basis.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace rydsim {

namespace {

constexpr int kMaxN = 33;

// binomial table; C(n,k) for n <= 32 fits comfortably in 64 bits
struct BinomialTable {
    std::uint64_t c[kMaxN][kMaxN] = {};
    constexpr BinomialTable() {
        for (int n = 0; n < kMaxN; ++n) {
            c[n][0] = 1;
            for (int k = 1; k <= n; ++k)
                c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
        }
    }
};

constexpr BinomialTable kBinom;

inline std::uint64_t binom(int n, int k) {
    return (k < 0 || k > n || n < 0) ? 0 : kBinom.c[n][k];
}

}  // namespace

std::size_t TruncatedBasis::dimension_for(int n_superatoms, int max_excited) {
    std::uint64_t dim = 0;
    for (int m = 0; m <= max_excited; ++m) dim += binom(n_superatoms, m);
    return static_cast<std::size_t>(dim);
}

TruncatedBasis::TruncatedBasis(int n_superatoms, int max_excited, std::size_t dimension_cap)
    : n_sa_(n_superatoms), m_max_(max_excited) {
    if (n_superatoms < 1 || n_superatoms > 32)
        throw std::invalid_argument("TruncatedBasis: n_superatoms must be in [1, 32]");
    if (max_excited < 1 || max_excited > n_superatoms)
        throw std::invalid_argument("TruncatedBasis: max_excited must be in [1, n_superatoms]");

    const std::size_t dim = dimension_for(n_superatoms, max_excited);
    if (dim > dimension_cap)
        throw std::length_error("TruncatedBasis: dimension " + std::to_string(dim) +
                                " exceeds cap " + std::to_string(dimension_cap));

    offsets_.assign(static_cast<std::size_t>(max_excited) + 2, 0);
    for (int m = 0; m <= max_excited; ++m)
        offsets_[static_cast<std::size_t>(m) + 1] =
            offsets_[static_cast<std::size_t>(m)] + binom(n_superatoms, m);

    // enumerate each shell in colexicographic order so ordinal == offset + rank
    masks_.assign(dim, 0);
    masks_[0] = 0;
    std::vector<int> elems;
    for (int m = 1; m <= max_excited; ++m) {
        elems.resize(static_cast<std::size_t>(m));
        for (int t = 0; t < m; ++t) elems[static_cast<std::size_t>(t)] = t;
        std::size_t ord = offsets_[static_cast<std::size_t>(m)];
        while (true) {
            std::uint32_t mk = 0;
            for (int t = 0; t < m; ++t) mk |= (1u << elems[static_cast<std::size_t>(t)]);
            masks_[ord++] = mk;
            // next combination in colex order: bump the lowest element that
            // can move without colliding with its successor
            int t = 0;
            while (t + 1 < m && elems[static_cast<std::size_t>(t)] + 1 ==
                                    elems[static_cast<std::size_t>(t) + 1])
                ++t;
            if (elems[static_cast<std::size_t>(t)] + 1 >= n_superatoms &&
                t + 1 >= m)
                break;
            ++elems[static_cast<std::size_t>(t)];
            if (elems[static_cast<std::size_t>(t)] >= n_superatoms) break;
            for (int s = 0; s < t; ++s) elems[static_cast<std::size_t>(s)] = s;
        }
    }

    // adjacency: one prefix/suffix sweep per state gives the ranks of every
    // single-flip neighbor without search
    row_ptr_.assign(dim + 1, 0);
    std::vector<int> el(static_cast<std::size_t>(max_excited));
    std::vector<std::uint64_t> pref(static_cast<std::size_t>(max_excited) + 1);
    std::vector<std::uint64_t> suf_down(static_cast<std::size_t>(max_excited) + 1);
    std::vector<std::uint64_t> suf_up(static_cast<std::size_t>(max_excited) + 1);

    for (int pass = 0; pass < 2; ++pass) {
        std::size_t cursor = 0;
        for (std::size_t ord = 0; ord < dim; ++ord) {
            const std::uint32_t mk = masks_[ord];
            const int m = std::popcount(mk);
            int cnt = 0;
            {
                std::uint32_t rest = mk;
                while (rest) {
                    el[static_cast<std::size_t>(cnt++)] = std::countr_zero(rest);
                    rest &= rest - 1;
                }
            }
            // pref[j]  = sum_{t<j}  C(e_t, t+1)
            // suf_down[j] = sum_{t>=j} C(e_t, t)    (element t shifted down)
            // suf_up[j]   = sum_{t>=j} C(e_t, t+2)  (element t shifted up)
            pref[0] = 0;
            for (int t = 0; t < m; ++t)
                pref[static_cast<std::size_t>(t) + 1] =
                    pref[static_cast<std::size_t>(t)] +
                    binom(el[static_cast<std::size_t>(t)], t + 1);
            suf_down[static_cast<std::size_t>(m)] = 0;
            suf_up[static_cast<std::size_t>(m)] = 0;
            for (int t = m - 1; t >= 0; --t) {
                suf_down[static_cast<std::size_t>(t)] =
                    suf_down[static_cast<std::size_t>(t) + 1] +
                    binom(el[static_cast<std::size_t>(t)], t);
                suf_up[static_cast<std::size_t>(t)] =
                    suf_up[static_cast<std::size_t>(t) + 1] +
                    binom(el[static_cast<std::size_t>(t)], t + 2);
            }

            std::size_t links = 0;
            int pos = 0;  // elements of S below superatom i
            for (int i = 0; i < n_superatoms; ++i) {
                if (mk & (1u << i)) {
                    // demotion S -> S \ {i}, i is element number `pos`
                    if (pass == 1) {
                        const std::uint64_t r =
                            pref[static_cast<std::size_t>(pos)] +
                            suf_down[static_cast<std::size_t>(pos) + 1];
                        link_target_[cursor + links] = static_cast<std::uint32_t>(
                            offsets_[static_cast<std::size_t>(m - 1)] + r);
                        link_code_[cursor + links] = static_cast<std::uint8_t>(i);
                    }
                    ++links;
                    ++pos;
                } else if (m < max_excited) {
                    // promotion S -> S u {i}, inserted at position `pos`
                    if (pass == 1) {
                        const std::uint64_t r = pref[static_cast<std::size_t>(pos)] +
                                                binom(i, pos + 1) +
                                                suf_up[static_cast<std::size_t>(pos)];
                        link_target_[cursor + links] = static_cast<std::uint32_t>(
                            offsets_[static_cast<std::size_t>(m + 1)] + r);
                        link_code_[cursor + links] =
                            static_cast<std::uint8_t>(i) | kUpFlag;
                    }
                    ++links;
                }
            }
            if (pass == 0) row_ptr_[ord + 1] = links;
            cursor += links;
        }
        if (pass == 0) {
            for (std::size_t ord = 0; ord < dim; ++ord) row_ptr_[ord + 1] += row_ptr_[ord];
            link_target_.assign(row_ptr_[dim], 0);
            link_code_.assign(row_ptr_[dim], 0);
        }
    }
}

std::size_t TruncatedBasis::rank(std::uint32_t mask) const {
    const int m = std::popcount(mask);
    if (m > m_max_ || (mask >> n_sa_) != 0)
        throw std::out_of_range("TruncatedBasis::rank: mask outside basis");
    std::uint64_t r = 0;
    int t = 0;
    std::uint32_t rest = mask;
    while (rest) {
        const int e = std::countr_zero(rest);
        rest &= rest - 1;
        r += binom(e, ++t);
    }
    return static_cast<std::size_t>(offsets_[static_cast<std::size_t>(m)] + r);
}

}  // namespace rydsim
