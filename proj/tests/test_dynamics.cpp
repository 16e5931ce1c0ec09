#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "rydsim/oracle.hpp"
#include "rydsim/units.hpp"

using namespace rydsim;
using rydsim::test::couplings_from_matrix;
using rydsim::test::evolve_to_end;
using rydsim::test::p_exc_of;
using rydsim::test::singleton_system;
using rydsim::test::uniform_couplings;

namespace {

// exact two-atom reference: diagonalize the constant 4x4 Hamiltonian
// {|gg>, |ge>, |eg>, |ee>} under a square pulse
std::vector<double> two_atom_exact_p_exc(double omega, double kappa,
                                         const std::vector<double>& times) {
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    h(0, 1) = h(0, 2) = h(1, 3) = h(2, 3) = omega / 2.0;
    h += h.transpose().eval();
    h(3, 3) = kappa;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
    const Eigen::Matrix4d v = es.eigenvectors();
    const Eigen::Vector4d lam = es.eigenvalues();
    std::vector<double> out;
    for (double t : times) {
        // psi(t) = sum_i exp(-i lam_i t) <v_i|gg> |v_i>
        Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
        for (int i = 0; i < 4; ++i)
            psi += std::polar(1.0, -lam(i) * t) * v(0, i) *
                   v.col(i).cast<std::complex<double>>();
        out.push_back((std::norm(psi(1)) + std::norm(psi(2)) + 2.0 * std::norm(psi(3))) / 2.0);
    }
    return out;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("diagonal energy over excited pairs") {
    Eigen::MatrixXd k(3, 3);
    k << 0, 1, 2, 1, 0, 4, 2, 4, 0;
    CHECK(diagonal_energy(0b000, k) == 0.0);
    CHECK(diagonal_energy(0b010, k) == 0.0);
    CHECK(diagonal_energy(0b011, k) == 1.0);
    CHECK(diagonal_energy(0b101, k) == 2.0);
    CHECK(diagonal_energy(0b111, k) == 7.0);
}

TEST_CASE("blockaded reference curve") {
    CHECK(blockaded_reference(1, units::pi) == doctest::Approx(1.0));
    CHECK(blockaded_reference(4, units::pi / 2) == doctest::Approx(0.25));
    // first maximum sits at A = pi / sqrt(N)
    const int n = 9;
    const double a_max = units::pi / 3.0;
    CHECK(blockaded_reference(n, a_max) == doctest::Approx(1.0 / n));
    CHECK(blockaded_reference(n, a_max * 0.9) < blockaded_reference(n, a_max));
    CHECK(blockaded_reference(n, a_max * 1.1) < blockaded_reference(n, a_max));
}

TEST_CASE("laser matrix element carries sqrt(N_i) Omega / 2") {
    // one superatom of four atoms: derivative of |G> has amplitude -i Omega on |E>
    const double omega = 1.7;
    auto pc = uniform_couplings(4, -50.0);
    SuperatomPartition part = build_partition(pc, 1);
    auto basis = std::make_shared<const TruncatedBasis>(1, 1);
    HamiltonianAction action(basis, part, square_pulse(omega));
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2);
    c(0) = 1.0;
    const Eigen::VectorXcd dc = action.derivative(0.5, c);
    CHECK(std::abs(dc(1) - std::complex<double>(0.0, -2.0 * omega / 2.0)) < 1e-14);
}

TEST_CASE("outside a square pulse only the diagonal acts") {
    Rng rng(3);
    auto ens = sample_positions(5, 2.0, rng);
    auto pc = pair_couplings(ens, -10.0);
    auto sys = singleton_system(pc);
    HamiltonianAction action(sys.basis, sys.partition, square_pulse(2.0));
    Eigen::VectorXcd c(sys.basis->dimension());
    for (Eigen::Index i = 0; i < c.size(); ++i)
        c(i) = std::complex<double>(rng.uniform(-1, 1), rng.uniform(-1, 1));
    c /= c.norm();
    const Eigen::VectorXcd dc = action.derivative(1.5, c);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const std::complex<double> expect =
            std::complex<double>(0.0, -action.diagonal()(i)) * c(i);
        CHECK(std::abs(dc(i) - expect) < 1e-14);
    }
}

TEST_CASE("the Hamiltonian action is Hermitian") {
    Rng rng(17);
    auto ens = sample_positions(7, 2.0, rng);
    auto pc = pair_couplings(ens, -3.0);
    auto part = build_partition(pc, 4);
    auto basis = std::make_shared<const TruncatedBasis>(4, 3);
    HamiltonianAction action(basis, part, square_pulse(1.3));

    const auto dim = static_cast<Eigen::Index>(basis->dimension());
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXcd phi(dim), psi(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            phi(i) = std::complex<double>(rng.uniform(-1, 1), rng.uniform(-1, 1));
            psi(i) = std::complex<double>(rng.uniform(-1, 1), rng.uniform(-1, 1));
        }
        // H x = i * derivative(x)
        const Eigen::VectorXcd h_psi = std::complex<double>(0, 1) * action.derivative(0.4, psi);
        const Eigen::VectorXcd h_phi = std::complex<double>(0, 1) * action.derivative(0.4, phi);
        const std::complex<double> lhs = phi.dot(h_psi);  // <phi|H psi>
        const std::complex<double> rhs = std::conj(psi.dot(h_phi));
        CHECK(std::abs(lhs - rhs) < 1e-12 * phi.norm() * psi.norm());
    }
}

TEST_CASE("resonant pi pulse inverts a single atom") {
    auto sys = singleton_system(uniform_couplings(1, 0.0));
    const auto end = evolve_to_end(sys, square_pulse(units::pi));
    CHECK(p_exc_of(end, sys) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("kappa = 0 evolution is an exact product state") {
    const int n = 5;
    const double area = 1.9;
    auto sys = singleton_system(uniform_couplings(n, 0.0));
    for (const auto& pulse : {square_pulse(area), gaussian_pulse(area / 1.06446701943)}) {
        const auto end = evolve_to_end(sys, pulse);
        const auto rec = excitation_observables(end, *sys.basis, sys.partition, n);
        const double p1 = std::pow(std::sin(area / 2.0), 2);
        for (int i = 0; i < n; ++i) CHECK(rec.p_super(i) == doctest::Approx(p1).epsilon(1e-8));
        CHECK(rec.p_exc == doctest::Approx(p1).epsilon(1e-8));
        // amplitudes factorize: |c_S| = prod sin/cos
        const double s = std::abs(std::sin(area / 2.0)), c = std::abs(std::cos(area / 2.0));
        for (std::size_t ord = 0; ord < sys.basis->dimension(); ++ord) {
            const int m = std::popcount(sys.basis->mask(ord));
            const double expect = std::pow(s, m) * std::pow(c, n - m);
            CHECK(std::abs(std::abs(end.amplitudes(static_cast<Eigen::Index>(ord))) -
                           expect) < 1e-8);
        }
    }
}

TEST_CASE("strong-blockade pair follows the collective two-level curve") {
    const double kappa = -1e4;  // attractive, |kappa| tau = 1e4
    const double area = 2.0 * units::pi / std::sqrt(2.0);  // one collective period
    auto sys = singleton_system(uniform_couplings(2, kappa));
    PulseSpec pulse = square_pulse(area);
    HamiltonianAction action(sys.basis, sys.partition, pulse);

    std::vector<double> times;
    for (int i = 1; i <= 40; ++i) times.push_back(i / 40.0);
    PropagateOptions opts;
    opts.rtol = 1e-10;
    auto traj = propagate(action, ground_state(4).amplitudes, 0.0, 1.0, times, opts);

    const auto exact = two_atom_exact_p_exc(area, kappa, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double p = p_exc_of(traj.samples[i], sys);
        // integrator against the 4-state diagonalization oracle
        CHECK(p == doctest::Approx(exact[i]).epsilon(1e-7));
        // physics against the fully blockaded analytic limit
        CHECK(std::abs(p - blockaded_reference(2, area * times[i])) < 2e-3);
    }
}

TEST_CASE("norm is conserved and the pulse is reversible") {
    Rng rng(23);
    auto ens = sample_positions(8, 2.0, rng);
    auto pc = pair_couplings(ens, -30.0);
    auto sys = singleton_system(pc, 4);
    PulseSpec pulse = square_pulse(5.0);
    HamiltonianAction action(sys.basis, sys.partition, pulse);

    auto fwd = propagate(action, ground_state(sys.basis->dimension()).amplitudes, 0.0, 1.0,
                         {1.0});
    CHECK(fwd.max_norm_drift < 1e-8);

    // conjugate, run the same (time-symmetric) pulse, conjugate again
    auto back = propagate(action, fwd.samples.back().amplitudes.conjugate(), 0.0, 1.0, {1.0});
    const Eigen::VectorXcd recovered = back.samples.back().amplitudes.conjugate();
    Eigen::VectorXcd initial = ground_state(sys.basis->dimension()).amplitudes;
    CHECK((recovered - initial).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("scaling invariance: (Omega, tau, k) -> (s Omega, tau/s, s k)") {
    Rng rng(29);
    auto ens = sample_positions(6, 2.0, rng);
    auto pc = pair_couplings(ens, -8.0);
    auto sys = singleton_system(pc, 4);
    const double area = 4.0;

    const auto base = evolve_to_end(sys, square_pulse(area, 1.0));
    const double p_base = p_exc_of(base, sys);

    const double s = 2.0;
    const auto scaled = evolve_to_end(sys, square_pulse(s * area, 1.0 / s), {}, Frame::lab, s);
    CHECK(p_exc_of(scaled, sys) == doctest::Approx(p_base).epsilon(1e-6));
}

TEST_CASE("truncation error shrinks as the cutoff rises and vanishes at M = N") {
    auto pc = uniform_couplings(8, -40.0);
    std::vector<double> p_end;
    for (int m = 2; m <= 8; ++m) {
        auto sys = singleton_system(pc, m);
        p_end.push_back(p_exc_of(evolve_to_end(sys, square_pulse(6.0)), sys));
    }
    const double reference = p_end.back();  // M = N is untruncated
    double prev_err = 1e9;
    for (std::size_t i = 0; i + 1 < p_end.size(); ++i) {
        const double err = std::abs(p_end[i] - reference);
        CHECK(err < prev_err + 1e-12);
        prev_err = err;
    }
    const double second_to_last = std::abs(p_end[p_end.size() - 2] - reference);
    CHECK(second_to_last < 1e-4);
}

TEST_CASE("constant detuning: lab frame equals the rotating-frame envelope") {
    Rng rng(31);
    auto ens = sample_positions(4, 1.5, rng);
    auto pc = pair_couplings(ens, -5.0);
    auto sys = singleton_system(pc);

    PulseSpec pulse = gaussian_pulse(2.0);
    pulse.detuning = 3.0;

    const auto lab = evolve_to_end(sys, pulse, {}, Frame::lab);
    const auto rot = evolve_to_end(sys, pulse, {}, Frame::rotating);
    for (Eigen::Index i = 0; i < lab.amplitudes.size(); ++i)
        CHECK(std::abs(std::abs(lab.amplitudes(i)) - std::abs(rot.amplitudes(i))) < 1e-8);
    CHECK(p_exc_of(lab, sys) == doctest::Approx(p_exc_of(rot, sys)).epsilon(1e-8));

    // and both agree with the exact solver run in the lab frame
    const auto exact =
        oracle::exact_evolve(pc, pulse, 0.0, pulse.t_end(), {pulse.t_end()});
    const auto eo = oracle::exact_observables(exact.samples.back(), 4);
    CHECK(p_exc_of(lab, sys) == doctest::Approx(eo.p_exc).epsilon(1e-8));
}

TEST_CASE("step underflow reports the failing time") {
    auto sys = singleton_system(uniform_couplings(2, -5.0));
    HamiltonianAction action(sys.basis, sys.partition, square_pulse(2.0));
    PropagateOptions opts;
    opts.max_steps = 3;  // starve the integrator
    CHECK_THROWS_AS(propagate(action, ground_state(4).amplitudes, 0.0, 1.0, {1.0}, opts),
                    PropagationError);
}

TEST_CASE("sample times outside the span are rejected") {
    auto sys = singleton_system(uniform_couplings(2, 0.0));
    HamiltonianAction action(sys.basis, sys.partition, square_pulse(1.0));
    CHECK_THROWS(propagate(action, ground_state(4).amplitudes, 0.0, 1.0, {1.5}));
}

}  // TEST_SUITE
