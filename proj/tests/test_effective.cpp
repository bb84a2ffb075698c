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
#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spinent/effective.hpp"
#include "spinent/protocol.hpp"

using namespace spinent;

namespace {

TEST(Trimer, LowestBandEnergyIsSqrt2Eta) {
    for (double big = 2.0; big <= 100.0; big += 0.5) {
        EXPECT_NEAR(band_spectrum(big, 1.0).e_p1, std::numbers::sqrt2 * trimer_eta(big, 1.0), 1e-10) << big;
    }
}

TEST(Trimer, SpectrumDiagonalizesHamiltonian) {
    const double eta = 0.37;
    const TrimerSpectrum t = trimer_spectrum(eta);
    const Eigen::Matrix3d h = trimer_hamiltonian(eta);
    for (int k = 0; k < 3; ++k) {
        EXPECT_LT((h * t.vectors.col(k) - t.energies(k) * t.vectors.col(k)).cwiseAbs().maxCoeff(), 1e-14);
    }
    EXPECT_LT((t.vectors.transpose() * t.vectors - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Band, ClosedFormsMatchEigensolve) {
    for (double big : {2.0, 3.3, 10.0, 30.0, 100.0}) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hopping_matrix(p1_pattern(7, big, 1.0)));
        const auto want = band_spectrum(big, 1.0).ascending();
        for (int k = 0; k < 7; ++k) EXPECT_NEAR(es.eigenvalues()(k), want[k], 1e-9) << "Delta=" << big;
    }
}

TEST(Band, ParticleHoleSymmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hopping_matrix(p1_pattern(11, 7.0, 1.0)));
    const Eigen::VectorXd e = es.eigenvalues();
    for (Eigen::Index k = 0; k < e.size(); ++k) EXPECT_NEAR(e(k), -e(e.size() - 1 - k), 1e-12);
}

TEST(Band, DimerizedEtaReducesToTrimerForSevenSites) {
    EXPECT_NEAR(dimerized_eta(7, 10.0, 1.0), trimer_eta(10.0, 1.0), 1e-12);
    EXPECT_LT(dimerized_eta(11, 10.0, 1.0), dimerized_eta(7, 10.0, 1.0));
}

TEST(Trimer, PeakEstimateNearFullSimulation) {
    const ChainSpec c = p1_chain(7, SpinValue::from_twice(1), 10.0, 1.0);
    const Peak p = closed_negativity_peak(c, default_time_grid(c));
    EXPECT_NEAR(p1_peak_estimate(10.0, 1.0), p.time, 0.05 * p.time);
}

TEST(BulkModes, EigenvectorsOfBulkHopping) {
    const int n = 5;
    const double big = 10.0;
    const BulkModes m = bulk_modes(n, big);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = 0.5 * big;
    for (int k = 0; k < n; ++k) {
        EXPECT_LT((h * m.modes.col(k) - m.energies(k) * m.modes.col(k)).cwiseAbs().maxCoeff(), 1e-12);
    }
    EXPECT_LT((m.modes.transpose() * m.modes - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(P2Effective, CouplingsAndSigns) {
    const P2EffectiveModel m = p2_effective(5, 10.0, 1.0, 30.0);
    ASSERT_EQ(m.zeta.size(), 5u);
    const double l = 6.0;
    for (int k = 1; k <= 5; ++k) {
        EXPECT_NEAR(m.lambda_bar[k - 1], 0.5 * std::sqrt(2.0 / l) * std::sin(std::numbers::pi * k / l), 1e-15);
        EXPECT_NEAR(m.zeta[k - 1], 30.0 - 10.0 * std::cos(std::numbers::pi * k / l), 1e-12);
    }
    EXPECT_TRUE(m.dispersive());
    EXPECT_NEAR(m.dispersive_ratio, 0.0100, 5e-5);
    // Alternating signs nearly cancel in the exchange term.
    EXPECT_LT(std::abs(m.j_eff), 1e-3 * m.boundary_shift);
    EXPECT_NEAR(m.boundary_shift, 8.5786e-3, 1e-6);
}

// The exchange amplitude equals the second-order sum over the bulk
// one-excitation resolvent, computed independently.
TEST(P2Effective, MatchesResolventOracle) {
    for (double b : {3.7, 12.0, 30.0}) {
        const int n = 5;
        Eigen::MatrixXd hb = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) hb(i, i + 1) = hb(i + 1, i) = 0.5 * 10.0;
        const Eigen::MatrixXd g = (b * Eigen::MatrixXd::Identity(n, n) - hb).inverse();
        const double t = 0.5;  // weak bond hops with delta/2
        const P2EffectiveModel m = p2_effective(n, 10.0, 1.0, b);
        EXPECT_NEAR(m.j_eff, t * t * g(0, n - 1), 1e-12) << "B=" << b;
        EXPECT_NEAR(m.boundary_shift, t * t * g(0, 0), 1e-12) << "B=" << b;
    }
}

TEST(P2Effective, ResonanceIsRejected) {
    const BulkModes modes = bulk_modes(5, 10.0);
    EXPECT_THROW(p2_effective(5, 10.0, 1.0, modes.energies(1)), ResonantMode);
}

TEST(P2Effective, DephasingRate) {
    const P2EffectiveModel m = p2_effective(5, 10.0, 1.0, 30.0);
    double want = 0.0;
    for (std::size_t k = 0; k < m.zeta.size(); ++k) want += std::pow(m.lambda_bar[k] / m.zeta[k], 2);
    EXPECT_NEAR(m.dephasing_rate(0.1), 0.1 * want, 1e-15);
    EXPECT_EQ(m.dephasing_rate(0.0), 0.0);
}

// Deep dispersive regime, B = 3 Delta: the two-level model tracks the full chain.
TEST(P2Effective, TwoLevelDynamicsTracksFullChain) {
    const ChainSpec c = p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 30.0);
    const P2EffectiveModel m = p2_effective(c);
    const double tp = p2_effective_peak_time(m);
    const TimeGrid grid{0.0, 2.0 * tp, 401};
    const Trajectory eff = p2_effective_dynamics(m, grid);
    const ClosedProtocol full(c);
    const SectorBasis pair(2, SpinValue::from_twice(1), 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < eff.times.size(); ++i) {
        const double ne = normalized_negativity(reduced_boundary_state(pair, eff.states[i]));
        const double nf = full.normalized_negativity_at(eff.times[i]);
        worst = std::max(worst, std::abs(ne - nf));
    }
    EXPECT_LT(worst, 0.1);
    std::vector<double> vals;
    for (double t : grid.times()) vals.push_back(full.normalized_negativity_at(t));
    const Peak p = find_peak(grid.times(), vals);
    EXPECT_NEAR(p.time, tp, 0.1 * tp);
}

TEST(Horizons, EstimateSources) {
    const ChainSpec p1 = p1_chain(7, SpinValue::from_twice(2), 10.0, 1.0);
    const TimeEstimate a = protocol_time_estimate(p1);
    EXPECT_EQ(a.source, EstimateSource::Trimer);
    EXPECT_NEAR(a.time, p1_peak_estimate(10.0, 1.0) / 2.0, 1e-12);
    const ChainSpec deep = p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 30.0);
    EXPECT_EQ(protocol_time_estimate(deep).source, EstimateSource::EffectiveCoupling);
    const ChainSpec near = p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 3.7);
    EXPECT_EQ(protocol_time_estimate(near).source, EstimateSource::Trimer);
}

}  // namespace
