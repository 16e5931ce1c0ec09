#include "rydsim/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace rydsim {

ManyBodyState ground_state(std::size_t dimension) {
    ManyBodyState s;
    s.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension));
    s.amplitudes(0) = 1.0;
    return s;
}

double diagonal_energy(std::uint32_t subset_mask, const Eigen::MatrixXd& k) {
    double e = 0.0;
    std::uint32_t rest = subset_mask;
    while (rest) {
        const int i = std::countr_zero(rest);
        rest &= rest - 1;
        std::uint32_t rest2 = rest;
        while (rest2) {
            const int j = std::countr_zero(rest2);
            rest2 &= rest2 - 1;
            e += k(i, j);
        }
    }
    return e;
}

double blockaded_reference(int n_atoms, double area) {
    if (n_atoms < 1) throw std::invalid_argument("blockaded_reference: n_atoms must be >= 1");
    const double n = static_cast<double>(n_atoms);
    const double s = std::sin(std::sqrt(n) * area / 2.0);
    return s * s / n;
}

HamiltonianAction::HamiltonianAction(std::shared_ptr<const TruncatedBasis> basis,
                                     const SuperatomPartition& partition,
                                     const PulseSpec& pulse, double k_scale, Frame frame)
    : basis_(std::move(basis)), pulse_(pulse), frame_(frame) {
    const int n_sa = basis_->n_superatoms();
    if (n_sa != partition.n_superatoms())
        throw std::invalid_argument("HamiltonianAction: basis/partition size mismatch");

    half_weight_.resize(n_sa);
    for (int i = 0; i < n_sa; ++i)
        half_weight_(i) = 0.5 * std::sqrt(static_cast<double>(partition.member_counts(i)));

    const Eigen::MatrixXd k = k_scale * partition.k;
    const std::size_t dim = basis_->dimension();
    diag_.resize(static_cast<Eigen::Index>(dim));
    const double delta = (frame_ == Frame::lab) ? pulse_.detuning : 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        const std::uint32_t mk = basis_->mask(s);
        diag_(static_cast<Eigen::Index>(s)) =
            diagonal_energy(mk, k) + delta * std::popcount(mk);
    }
}

std::complex<double> HamiltonianAction::drive(double t, double envelope_value) const {
    if (frame_ == Frame::rotating && pulse_.detuning != 0.0) {
        return pulse_.rabi * envelope_value *
               std::polar(1.0, pulse_.detuning * t);
    }
    return {pulse_.rabi * envelope_value, 0.0};
}

void HamiltonianAction::apply_offdiagonal(std::complex<double> drive_value,
                                          const Eigen::VectorXcd& phases,
                                          const Eigen::VectorXcd& a,
                                          Eigen::VectorXcd& da) const {
    const std::size_t dim = basis_->dimension();
    // v = conj(phase) * a, shared by every link touching that state
    static thread_local Eigen::VectorXcd v;
    v = phases.conjugate().cwiseProduct(a);

    const auto& row_ptr = basis_->row_ptr();
    const auto& target = basis_->link_target();
    const auto& code = basis_->link_code();
    const double* w = half_weight_.data();
    const std::complex<double>* vp = v.data();

    const std::complex<double> dn = drive_value;           // neighbor below: f
    const std::complex<double> up = std::conj(drive_value);  // neighbor above: conj f

    for (std::size_t s = 0; s < dim; ++s) {
        std::complex<double> acc_up{0.0, 0.0};
        std::complex<double> acc_dn{0.0, 0.0};
        for (std::size_t l = row_ptr[s]; l < row_ptr[s + 1]; ++l) {
            const std::uint8_t c = code[l];
            const double wl = w[c & 0x7f];
            if (c & TruncatedBasis::kUpFlag)
                acc_up += wl * vp[target[l]];
            else
                acc_dn += wl * vp[target[l]];
        }
        const std::complex<double> sum = up * acc_up + dn * acc_dn;
        // da = -i * phase_s * sum
        da(static_cast<Eigen::Index>(s)) =
            std::complex<double>(0.0, -1.0) * phases(static_cast<Eigen::Index>(s)) * sum;
    }
}

Eigen::VectorXcd HamiltonianAction::derivative(double t, const Eigen::VectorXcd& c) const {
    const std::size_t dim = basis_->dimension();
    Eigen::VectorXcd out(static_cast<Eigen::Index>(dim));
    const std::complex<double> d = drive(t, envelope_at(t));
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(dim));
    apply_offdiagonal(d, ones, c, out);  // unit phases: plain Schrodinger picture
    out.array() += std::complex<double>(0.0, -1.0) * diag_.array() * c.array();
    return out;
}

}  // namespace rydsim
