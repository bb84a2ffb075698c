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

// ensemble.hpp: static-disorder ensembles and a small work-sharing loop.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spinent/dynamics.hpp"
#include "spinent/effective.hpp"
#include "spinent/hamiltonians.hpp"
#include "spinent/protocol.hpp"
#include "spinent/random.hpp"

namespace spinent {

// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
// written to per-index slots; the first exception is rethrown after the join.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::string disorder_stream_label(DisorderKind kind) { return "disorder/" + to_string(kind); }

struct EnsembleStats {
    DisorderKind kind = DisorderKind::Diagonal;
    double strength = 0.0;
    int n_realizations = 0;
    std::uint64_t seed = 0;
    std::vector<double> peaks;
    double mean = 0.0;
    double stddev = 0.0;
    bool sample_std = false;

    // Summation in realization order keeps the reduction deterministic.
    // Values are shifted by the first peak so identical peaks give an exact
    // zero spread.
    void recompute() {
        const double n = static_cast<double>(peaks.size());
        const double shift = peaks.empty() ? 0.0 : peaks.front();
        double sum = 0.0;
        for (double p : peaks) sum += p - shift;
        const double mean_shifted = sum / n;
        mean = shift + mean_shifted;
        double ss = 0.0;
        for (double p : peaks) ss += (p - shift - mean_shifted) * (p - shift - mean_shifted);
        const double denom = sample_std ? std::max(1.0, n - 1.0) : n;
        stddev = std::sqrt(ss / denom);
    }
    double standard_error() const { return stddev / std::sqrt(static_cast<double>(std::max(1, n_realizations))); }
};

// Realization r of the ensemble draws from the stream (seed, "disorder/<kind>", r),
// so the same r sees the same draws at every strength.
inline ChainSpec disordered_realization(const ChainSpec& clean, const DisorderConfig& cfg, std::uint64_t r) {
    CounterRng rng(derive_seed(cfg.seed, disorder_stream_label(cfg.kind), r));
    return apply_disorder(clean, cfg.kind, cfg.strength, rng, cfg.full_chain_diagonal);
}

// With fixed_time set, each realization contributes its normalized negativity
// at that time instead of its maximum over the grid.
inline EnsembleStats run_ensemble(const ChainSpec& clean, const DisorderConfig& cfg, const TimeGrid& grid,
                                  int threads = 1, bool sample_std = false,
                                  std::optional<double> fixed_time = std::nullopt) {
    cfg.validate();
    grid.validate();
    EnsembleStats s;
    s.kind = cfg.kind;
    s.strength = cfg.strength;
    s.n_realizations = cfg.n_realizations;
    s.seed = cfg.seed;
    s.sample_std = sample_std;
    s.peaks.assign(static_cast<std::size_t>(cfg.n_realizations), 0.0);
    parallel_for(s.peaks.size(), threads, [&](std::size_t r) {
        const ChainSpec chain = disordered_realization(clean, cfg, r);
        s.peaks[r] = fixed_time ? ClosedProtocol(chain).normalized_negativity_at(*fixed_time)
                                : closed_negativity_peak(chain, grid).value;
    });
    s.recompute();
    return s;
}

// Horizon for ensembles: twice the clean peak time.
inline TimeGrid ensemble_grid(const ChainSpec& clean, int n_points = kDefaultGridPoints) {
    const Peak p = closed_negativity_peak(clean, default_time_grid(clean, n_points));
    return {0.0, 2.0 * p.time, n_points};
}

inline std::vector<EnsembleStats> disorder_curve(const ChainSpec& clean, DisorderKind kind,
                                                 const std::vector<double>& strengths, int n_realizations,
                                                 std::uint64_t seed, const TimeGrid& grid, int threads = 1) {
    if (strengths.empty()) throw InvalidArgument("disorder strength grid is empty");
    std::vector<EnsembleStats> out;
    for (double e : strengths) {
        DisorderConfig cfg;
        cfg.kind = kind;
        cfg.strength = e;
        cfg.n_realizations = n_realizations;
        cfg.seed = seed;
        out.push_back(run_ensemble(clean, cfg, grid, threads));
    }
    return out;
}

}  // namespace spinent
