// Copyright 2026 The spinent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spinent/effective.hpp"
#include "spinent/lindblad.hpp"
#include "spinent/protocol.hpp"

using namespace spinent;

namespace {

SparseComplex dense_to_sparse(const Eigen::MatrixXcd& m) { return m.sparseView(); }

OpenSystemSpec single_qubit(double omega, double gamma) {
    const auto s = spin_matrices(SpinValue::from_twice(1));
    OpenSystemSpec spec;
    spec.hamiltonian = dense_to_sparse(omega * s.sz);
    spec.collapse_ops.push_back({dense_to_sparse(s.sz), gamma, "sz"});
    spec.dims = {2};
    return spec;
}

// rho_01(t) = rho_01(0) exp(-gamma t / 2) under gamma (S rho S - {S^2, rho}/2), S = sigma_z / 2.
TEST(Dephasing, SingleQubitCoherenceDecay) {
    const double gamma = 0.8;
    Eigen::Vector2cd plus(1.0, 1.0);
    plus /= std::sqrt(2.0);
    const TimeGrid grid{0.0, 5.0 / gamma, 51};
    const OpenTrajectory tr = evolve_lindblad(single_qubit(0.0, gamma), pure_density(plus), grid, {},
                                              nullptr);
    ASSERT_EQ(tr.states.size(), 0u);
    IntegratorOptions keep;
    keep.keep_states = true;
    const OpenTrajectory kept = evolve_lindblad(single_qubit(0.0, gamma), pure_density(plus), grid, keep, nullptr);
    for (std::size_t i = 0; i < kept.times.size(); ++i) {
        const double want = 0.5 * std::exp(-gamma * kept.times[i] / 2.0);
        const cplx got = kept.states[i](0, 1);
        EXPECT_LT(std::abs(got - want) / want, 1e-6) << "t=" << kept.times[i];
        EXPECT_NEAR(kept.states[i](0, 0).real(), 0.5, 1e-12);
    }
}

TEST(Dephasing, SingleQubitWithPrecession) {
    const double gamma = 0.3, omega = 2.0;
    Eigen::Vector2cd plus(1.0, 1.0);
    plus /= std::sqrt(2.0);
    IntegratorOptions keep;
    keep.keep_states = true;
    const OpenTrajectory tr = evolve_lindblad(single_qubit(omega, gamma), pure_density(plus), {0.0, 10.0, 21}, keep);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double t = tr.times[i];
        // Basis order (m=-1/2, m=+1/2): rho_01 picks up exp(+i omega t).
        const cplx want = 0.5 * std::exp(-gamma * t / 2.0) * std::polar(1.0, omega * t);
        EXPECT_LT(std::abs(tr.states[i](0, 1) - want), 1e-8);
    }
}

TEST(Dephasing, ZeroRateMatchesClosedEvolution) {
    for (const ChainSpec& c : {p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 3.7),
                               p1_chain(7, SpinValue::from_twice(2), 10.0, 1.0)}) {
        const ClosedProtocol closed(c);
        const QuantumState psi0 = initial_state(c);
        const OpenSystemSpec spec = dephasing_spec(c, *psi0.basis, 0.0);
        double worst = 0.0;
        const TimeGrid grid = default_time_grid(c, 200);
        const OpenTrajectory tr = evolve_lindblad(spec, pure_density(psi0.amplitudes), grid, {},
                                                  [&](std::size_t, double t, const Eigen::MatrixXcd& rho) {
                                                      const Eigen::VectorXcd psi = closed.state_at(t);
                                                      worst = std::max(worst, (rho - psi * psi.adjoint()).cwiseAbs().maxCoeff());
                                                  });
        EXPECT_LT(worst, 1e-8);
        EXPECT_LT(tr.diagnostics.max_trace_drift, 1e-7);
        EXPECT_GE(tr.diagnostics.min_eigenvalue, -1e-6);
    }
}

TEST(Dephasing, SectorMatchesFullSpace) {
    const ChainSpec c = p2_chain(4, SpinValue::from_twice(1), 3.0, 1.0, 0.7);
    const QuantumState psi0 = initial_state(c);
    const double gamma = 0.2;
    IntegratorOptions keep;
    keep.keep_states = true;
    const TimeGrid grid{0.0, 8.0, 9};
    const OpenTrajectory sec = evolve_lindblad(dephasing_spec(c, *psi0.basis, gamma), pure_density(psi0.amplitudes), grid, keep);
    const Eigen::VectorXcd full0 = lift_to_full(*psi0.basis, psi0.amplitudes);
    const OpenTrajectory full = evolve_lindblad(dephasing_spec_full(c, gamma), pure_density(full0), grid, keep);
    const SectorBasis& b = *psi0.basis;
    for (std::size_t k = 0; k < grid.times().size(); ++k) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < b.dim(); ++i) {
            for (Eigen::Index j = 0; j < b.dim(); ++j) {
                worst = std::max(worst, std::abs(sec.states[k](i, j) - full.states[k](b.code(i), b.code(j))));
            }
        }
        EXPECT_LT(worst, 1e-7);
        // Nothing leaks out of the sector.
        double outside = 0.0;
        for (Eigen::Index i = 0; i < full.states[k].rows(); ++i) {
            if (!b.index_of_code(static_cast<Code>(i))) outside += std::abs(full.states[k](i, i));
        }
        EXPECT_LT(outside, 1e-12);
    }
}

TEST(Dephasing, GeneratorIsLinear) {
    const ChainSpec c = p2_chain(4, SpinValue::from_twice(1), 3.0, 1.0, 0.7);
    const SectorBasis b(4, c.spin, 2);
    const OpenSystemSpec spec = dephasing_spec(c, b, 0.3);
    CounterRng rng(4);
    auto random_rho = [&] {
        Eigen::MatrixXcd g(b.dim(), b.dim());
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        }
        Eigen::MatrixXcd r = g * g.adjoint();
        return Eigen::MatrixXcd(r / r.trace());
    };
    const Eigen::MatrixXcd r1 = random_rho(), r2 = random_rho();
    const double alpha = 0.3;
    IntegratorOptions keep;
    keep.keep_states = true;
    const TimeGrid grid{0.0, 3.0, 4};
    const auto a = evolve_lindblad(spec, r1, grid, keep);
    const auto bb = evolve_lindblad(spec, r2, grid, keep);
    const auto mix = evolve_lindblad(spec, alpha * r1 + (1.0 - alpha) * r2, grid, keep);
    for (std::size_t k = 0; k < mix.states.size(); ++k) {
        EXPECT_LT((mix.states[k] - (alpha * a.states[k] + (1.0 - alpha) * bb.states[k])).cwiseAbs().maxCoeff(), 1e-7);
    }
}

TEST(Dephasing, PeakDecreasesWithRate) {
    const ChainSpec c = p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 3.7);
    const QuantumState psi0 = initial_state(c);
    const TracePartition part = boundary_partition(*psi0.basis);
    const TimeGrid grid = default_time_grid(c, 300);
    double last = 2.0;
    for (double gamma : {0.0, 0.02, 0.1}) {
        std::vector<double> neg(300);
        const auto tr = evolve_lindblad(dephasing_spec(c, *psi0.basis, gamma), pure_density(psi0.amplitudes), grid, {},
                                        [&](std::size_t i, double, const Eigen::MatrixXcd& rho) {
                                            neg[i] = 2.0 * negativity(reduce_mixed(part, rho), {2, 2});
                                        });
        const double peak = find_peak(tr.times, neg).value;
        EXPECT_LE(peak, last + 1e-9);
        last = peak;
    }
}

TEST(Integrator, RejectsBadInput) {
    OpenSystemSpec spec = single_qubit(1.0, -0.1);
    EXPECT_THROW(evolve_lindblad(spec, Eigen::MatrixXcd::Identity(2, 2) / 2.0, {0.0, 1.0, 3}), InvalidArgument);
    spec = single_qubit(1.0, 0.1);
    EXPECT_THROW(evolve_lindblad(spec, Eigen::MatrixXcd::Identity(3, 3) / 3.0, {0.0, 1.0, 3}), DimensionMismatch);
    IntegratorOptions tiny;
    tiny.max_steps = 3;
    tiny.max_step = 1e-3;
    EXPECT_THROW(evolve_lindblad(spec, Eigen::MatrixXcd::Identity(2, 2) / 2.0, {0.0, 1.0, 3}, tiny), ToleranceFailure);
}

TEST(Pseudomode, LorentzianNormalization) {
    PseudomodeSpec pm;
    pm.g = 0.3;
    pm.kappa = 0.7;
    pm.omega_a = 1.1;
    // omega = omega_a + kappa tan(theta) maps the real line onto (-pi/2, pi/2).
    const int n = 20000;
    const double h = std::numbers::pi / n;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double theta = -std::numbers::pi / 2 + (k + 0.5) * h;
        const double c = std::cos(theta);
        sum += lorentzian(pm.omega_a + pm.kappa * std::tan(theta), pm) * pm.kappa / (c * c) * h;
    }
    EXPECT_NEAR(sum, pm.g * pm.g, 1e-10);
    EXPECT_NEAR(lorentzian(pm.omega_a, pm), pm.g * pm.g / (std::numbers::pi * pm.kappa), 1e-15);
}

TEST(Pseudomode, LadderOperator) {
    const int n_max = 4;
    const Eigen::MatrixXcd a = Eigen::MatrixXcd(annihilation(n_max));
    ASSERT_EQ(a.rows(), n_max + 1);
    const Eigen::MatrixXcd num = a.adjoint() * a;
    for (int n = 0; n <= n_max; ++n) EXPECT_NEAR(num(n, n).real(), n, 1e-14);
    const Eigen::MatrixXcd comm = a * a.adjoint() - a.adjoint() * a;
    for (int n = 0; n < n_max; ++n) EXPECT_NEAR(comm(n, n).real(), 1.0, 1e-14);
}

TEST(Pseudomode, DecoupledModeReproducesClosedChain) {
    const ChainSpec c = p2_chain(5, SpinValue::from_twice(1), 10.0, 1.0, 3.0);
    PseudomodeSpec pm;
    pm.g = 0.0;
    pm.kappa = 1.0;
    pm.n_max = 2;
    const OpenSystemSpec spec = pseudomode_system(c, pm);
    const TracePartition part = boundary_partition(spec, c.n_sites);
    const ClosedProtocol closed(c);
    double worst = 0.0;
    const auto tr = evolve_lindblad(spec, pure_density(pseudomode_initial_state(c, pm)), {0.0, 20.0, 41}, {},
                                    [&](std::size_t, double t, const Eigen::MatrixXcd& rho) {
                                        const double open = 2.0 * negativity(reduce_mixed(part, rho), {2, 2});
                                        worst = std::max(worst, std::abs(open - closed.normalized_negativity_at(t)));
                                    });
    EXPECT_LT(worst, 1e-7);
    EXPECT_LT(tr.diagnostics.max_truncation_leak, 1e-14);
}

// Adiabatic elimination of a strongly damped mode gives collapse L at 4 g^2 / kappa.
TEST(Pseudomode, MarkovLimitOnShortChain) {
    const ChainSpec c = p2_chain(3, SpinValue::from_twice(1), 4.0, 1.0, 1.0);
    PseudomodeSpec pm;
    pm.g = 1.0;
    pm.kappa = 100.0;
    pm.n_max = 3;
    const TimeGrid grid{0.0, 20.0, 81};
    const OpenSystemSpec spec = pseudomode_system(c, pm);
    const TracePartition pp = boundary_partition(spec, c.n_sites);
    std::vector<double> a(81);
    evolve_lindblad(spec, pure_density(pseudomode_initial_state(c, pm)), grid, {},
                    [&](std::size_t i, double, const Eigen::MatrixXcd& rho) {
                        a[i] = 2.0 * negativity(reduce_mixed(pp, rho), {2, 2});
                    });
    const QuantumState psi0 = initial_state(c);
    auto deviation = [&](double rate) {
        const OpenSystemSpec ref = markovian_reference(c, rate);
        const TracePartition rp = boundary_partition(ref, c.n_sites);
        double worst = 0.0;
        evolve_lindblad(ref, pure_density(lift_to_full(*psi0.basis, psi0.amplitudes)), grid, {},
                        [&](std::size_t i, double, const Eigen::MatrixXcd& rho) {
                            worst = std::max(worst, std::abs(a[i] - 2.0 * negativity(reduce_mixed(rp, rho), {2, 2})));
                        });
        return worst;
    };
    const double eliminated = deviation(eliminated_mode_rate(pm));
    EXPECT_LT(eliminated, 0.005);
    EXPECT_LT(eliminated, deviation(markovian_rate(pm)));
}

TEST(Pseudomode, LeakIsTracked) {
    const ChainSpec c = p2_chain(3, SpinValue::from_twice(1), 4.0, 1.0, 1.0);
    PseudomodeSpec pm;
    pm.g = 0.5;
    pm.kappa = 0.1;
    pm.n_max = 1;
    const auto tr = evolve_lindblad(pseudomode_system(c, pm), pure_density(pseudomode_initial_state(c, pm)),
                                    {0.0, 5.0, 11});
    EXPECT_GT(tr.diagnostics.max_truncation_leak, 1e-3);
    ASSERT_EQ(tr.truncation_leak.size(), 11u);
    EXPECT_EQ(tr.truncation_leak.front(), 0.0);
}

TEST(Pseudomode, BudgetAndValidation) {
    PseudomodeSpec pm;
    pm.kappa = 0.0;
    EXPECT_THROW(pm.validate(), InvalidArgument);
    pm.kappa = 1.0;
    pm.n_max = 0;
    EXPECT_THROW(pm.validate(), InvalidArgument);
    pm.n_max = 8;
    EXPECT_THROW(check_pseudomode_budget(p2_chain(7, SpinValue::from_twice(1), 10, 1, 3.7), pm), DimensionBudgetExceeded);
    pm.n_max = 7;
    EXPECT_NO_THROW(check_pseudomode_budget(p2_chain(7, SpinValue::from_twice(1), 10, 1, 3.7), pm));
    EXPECT_DOUBLE_EQ(pm.tau_c(), 1.0);
}

TEST(Pseudomode, RatesForMarkovReference) {
    PseudomodeSpec pm;
    pm.g = 0.1;
    pm.kappa = 100.0;
    EXPECT_DOUBLE_EQ(markovian_rate(pm), 2e-4);
    EXPECT_DOUBLE_EQ(eliminated_mode_rate(pm), 4e-4);
}

}  // namespace
