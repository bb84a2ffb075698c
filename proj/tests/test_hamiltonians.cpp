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

#include <gtest/gtest.h>

#include "spinent/hamiltonians.hpp"

using namespace spinent;

namespace {

// Exchange J S1.S2 for two spin-1/2: singlet -3J/4, triplet J/4.
TEST(Heisenberg, TwoSpinSpectrum) {
    for (double j : {1.0, 2.5, -0.7}) {
        HeisenbergParams p;
        p.n_sites = 2;
        p.couplings = {2.0 * j};
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(build_general_heisenberg(p));
        std::vector<double> e(es.eigenvalues().data(), es.eigenvalues().data() + 4);
        std::vector<double> want{-0.75 * j, 0.25 * j, 0.25 * j, 0.25 * j};
        std::sort(want.begin(), want.end());
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(e[k], want[k], 1e-12);
    }
}

TEST(Heisenberg, XXLimitMatchesChainBuilder) {
    ChainSpec c = p2_chain(4, SpinValue::from_twice(2), 3.0, 1.0, 0.4);
    HeisenbergParams p;
    p.n_sites = 4;
    p.spin = c.spin;
    p.couplings = {2.0, 6.0, 2.0};  // 1/2 J (SxSx + SySy) with J = 2 * coupling
    p.zz_anisotropy = 0.0;
    p.fields = c.fields;
    const Eigen::MatrixXcd a = build_general_heisenberg(p);
    const Eigen::MatrixXcd b = build_full_space(xx_chain(c), 4, c.spin);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Patterns, DimerizedSevenSites) {
    const auto j = p1_pattern(7, 10.0, 1.0);
    EXPECT_EQ(j, (std::vector<double>{1, 10, 1, 1, 10, 1}));
    const auto j11 = p1_pattern(11, 10.0, 1.0);
    EXPECT_EQ(j11, (std::vector<double>{1, 10, 1, 10, 1, 1, 10, 1, 10, 1}));
}

TEST(Patterns, DimerizedRejectsUntileableLengths) {
    EXPECT_THROW(p1_pattern(8, 10, 1), EvenLength);
    EXPECT_THROW(p1_pattern(9, 10, 1), InvalidArgument);
    EXPECT_THROW(p1_pattern(5, 10, 1), InvalidArgument);
}

TEST(Patterns, WeakBoundary) {
    const auto c = p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 3.7);
    EXPECT_EQ(c.couplings, (std::vector<double>{1, 10, 10, 10, 10, 1}));
    EXPECT_EQ(c.fields, (std::vector<double>{3.7, 0, 0, 0, 0, 0, 3.7}));
    EXPECT_THROW(p2_chain(2, SpinValue::from_twice(1), 10, 1, 1), InvalidArgument);
}

TEST(Patterns, ChainValidation) {
    ChainSpec c = p2_chain(5, SpinValue::from_twice(1), 10.0, 1.0, 1.0);
    c.couplings.pop_back();
    EXPECT_THROW(c.validate(), DimensionMismatch);
    c = p2_chain(5, SpinValue::from_twice(1), 10.0, 1.0, 1.0);
    c.fields[2] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Disorder, ZeroStrengthIsIdentity) {
    const ChainSpec c = p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 3.7);
    for (auto kind : {DisorderKind::Diagonal, DisorderKind::OffDiagonal, DisorderKind::Both}) {
        CounterRng rng(1);
        const ChainSpec d = apply_disorder(c, kind, 0.0, rng);
        EXPECT_EQ(d.couplings, c.couplings);
        EXPECT_EQ(d.fields, c.fields);
    }
}

TEST(Disorder, DiagonalTouchesOnlyBoundaryFields) {
    const ChainSpec c = p2_chain(7, SpinValue::from_twice(1), 10.0, 1.0, 3.7);
    for (std::uint64_t r = 0; r < 200; ++r) {
        CounterRng rng(derive_seed(3, "disorder/diagonal", r));
        const ChainSpec d = apply_disorder(c, DisorderKind::Diagonal, 0.8, rng);
        EXPECT_EQ(d.couplings, c.couplings);
        for (int i = 1; i + 1 < 7; ++i) EXPECT_EQ(d.fields[i], 0.0);
        EXPECT_LE(std::abs(d.fields[0] - 3.7), 0.4);
        EXPECT_LE(std::abs(d.fields[6] - 3.7), 0.4);
    }
}

TEST(Disorder, OffDiagonalBoundedAndDeterministic) {
    const ChainSpec c = p1_chain(7, SpinValue::from_twice(1), 10.0, 1.0);
    CounterRng a(42), b(42);
    const ChainSpec da = apply_disorder(c, DisorderKind::OffDiagonal, 1.0, a);
    const ChainSpec db = apply_disorder(c, DisorderKind::OffDiagonal, 1.0, b);
    EXPECT_EQ(da.couplings, db.couplings);
    for (std::size_t i = 0; i < c.couplings.size(); ++i) {
        EXPECT_LE(std::abs(da.couplings[i] - c.couplings[i]), 0.5);
        EXPECT_NE(da.couplings[i], c.couplings[i]);
    }
    EXPECT_EQ(da.fields, c.fields);
}

TEST(Random, StreamsAreLabelled) {
    EXPECT_NE(derive_seed(1, "disorder/diagonal", 0), derive_seed(1, "disorder/offdiagonal", 0));
    EXPECT_NE(derive_seed(1, "disorder/diagonal", 0), derive_seed(1, "disorder/diagonal", 1));
    EXPECT_NE(derive_seed(1, "disorder/diagonal", 0), derive_seed(2, "disorder/diagonal", 0));
    CounterRng rng(7);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

}  // namespace
