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
#include <atomic>

#include <gtest/gtest.h>

#include "spinent/ensemble.hpp"

using namespace spinent;

namespace {

const ChainSpec kP2 = p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 3.7);

TimeGrid short_grid() { return {0.0, 2.0 * 13.08, 400}; }

TEST(ParallelFor, VisitsEveryIndexOnce) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsWorkerErrors) {
    EXPECT_THROW(parallel_for(50, 3,
                              [](std::size_t i) {
                                  if (i == 17) throw InvalidArgument("boom");
                              }),
                 InvalidArgument);
}

TEST(Ensemble, ZeroDisorderHasZeroSpread) {
    for (auto kind : {DisorderKind::Diagonal, DisorderKind::OffDiagonal, DisorderKind::Both}) {
        DisorderConfig cfg;
        cfg.kind = kind;
        cfg.strength = 0.0;
        cfg.n_realizations = 16;
        const EnsembleStats s = run_ensemble(kP2, cfg, short_grid(), 2);
        EXPECT_EQ(s.stddev, 0.0);
        EXPECT_EQ(s.mean, closed_negativity_peak(kP2, short_grid()).value);
    }
}

TEST(Ensemble, ReproducibleAcrossThreadCounts) {
    DisorderConfig cfg;
    cfg.kind = DisorderKind::Both;
    cfg.strength = 0.5;
    cfg.n_realizations = 24;
    cfg.seed = 77;
    const EnsembleStats a = run_ensemble(kP2, cfg, short_grid(), 1);
    const EnsembleStats b = run_ensemble(kP2, cfg, short_grid(), 3);
    EXPECT_EQ(a.peaks, b.peaks);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.stddev, b.stddev);
    cfg.seed = 78;
    const EnsembleStats c = run_ensemble(kP2, cfg, short_grid(), 1);
    EXPECT_NE(a.peaks, c.peaks);
}

TEST(Ensemble, RealizationsShareDrawsAcrossStrengths) {
    DisorderConfig lo, hi;
    lo.kind = hi.kind = DisorderKind::OffDiagonal;
    lo.strength = 0.2;
    hi.strength = 0.4;
    const ChainSpec a = disordered_realization(kP2, lo, 5);
    const ChainSpec b = disordered_realization(kP2, hi, 5);
    for (std::size_t i = 0; i < kP2.couplings.size(); ++i) {
        EXPECT_NEAR(b.couplings[i] - kP2.couplings[i], 2.0 * (a.couplings[i] - kP2.couplings[i]), 1e-12);
    }
}

TEST(Ensemble, StatisticsConventions) {
    EnsembleStats s;
    s.peaks = {1.0, 2.0, 3.0, 4.0};
    s.n_realizations = 4;
    s.recompute();
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(1.25));
    s.sample_std = true;
    s.recompute();
    EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(5.0 / 3.0));
    EXPECT_DOUBLE_EQ(s.standard_error(), std::sqrt(5.0 / 3.0) / 2.0);
}

TEST(Ensemble, DisorderLowersMeanPeak) {
    DisorderConfig cfg;
    cfg.kind = DisorderKind::OffDiagonal;
    cfg.strength = 1.0;
    cfg.n_realizations = 40;
    const ChainSpec p1 = p1_chain(7, SpinValue::from_twice(1), 10.0, 1.0);
    const TimeGrid g1 = ensemble_grid(p1, 600);
    const EnsembleStats s = run_ensemble(p1, cfg, g1, 2);
    EXPECT_LT(s.mean, closed_negativity_peak(p1, g1).value);
    EXPECT_GT(s.stddev, 0.0);
}

TEST(Ensemble, CurveValidatesInput) {
    EXPECT_THROW(disorder_curve(kP2, DisorderKind::Diagonal, {}, 10, 1, short_grid()), InvalidArgument);
    DisorderConfig bad;
    bad.strength = -1.0;
    EXPECT_THROW(run_ensemble(kP2, bad, short_grid()), InvalidArgument);
}

TEST(Ensemble, FixedTimeReading) {
    const ChainSpec clean = p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 3.7);
    const Peak p = closed_negativity_peak(clean, default_time_grid(clean, 400));
    const TimeGrid grid{0.0, 2.0 * p.time, 400};
    DisorderConfig cfg;
    cfg.kind = DisorderKind::OffDiagonal;
    cfg.n_realizations = 6;
    cfg.seed = 5;
    const EnsembleStats zero = run_ensemble(clean, cfg, grid, 1, false, p.time);
    EXPECT_EQ(zero.stddev, 0.0);
    EXPECT_DOUBLE_EQ(zero.mean, ClosedProtocol(clean).normalized_negativity_at(p.time));
    cfg.strength = 0.75;
    const EnsembleStats fixed = run_ensemble(clean, cfg, grid, 1, false, p.time);
    const EnsembleStats window = run_ensemble(clean, cfg, grid, 1, false);
    for (std::size_t r = 0; r < fixed.peaks.size(); ++r) EXPECT_LE(fixed.peaks[r], window.peaks[r] + 1e-3);
}

}  // namespace
