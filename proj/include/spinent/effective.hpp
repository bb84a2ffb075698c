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

// effective.hpp: closed-form reductions: the trimer model of the dimerized
// chain, its one-excitation band, bulk standing waves and the second-order
// boundary-to-boundary coupling of the weak-boundary chain.
//
// Band and trimer energies use the hopping-matrix convention in which a bond J
// enters the one-excitation matrix as J. Everything that is compared with the
// simulated chain (modes, detunings, couplings, times) uses the literal spin
// operators, where the same bond hops with J/2.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinent/dynamics.hpp"
#include "spinent/errors.hpp"
#include "spinent/hamiltonians.hpp"

namespace spinent {

// ---------------------------------------------------------------------------
// Trimer model

inline double trimer_eta(double strong, double weak) {
    if (!(strong > 0.0) || !(weak > 0.0)) throw InvalidArgument("trimer couplings must be positive");
    const double d2 = strong * strong, w2 = weak * weak;
    const double inner = std::sqrt(d2 * d2 + 6.0 * d2 * w2 + w2 * w2);
    return 0.5 * std::sqrt(std::max(d2 + 3.0 * w2 - inner, 0.0));
}

struct TrimerSpectrum {
    Eigen::Vector3d energies;   // ascending
    Eigen::Matrix3d vectors;    // columns phi_-, phi_0, phi_+
};

inline TrimerSpectrum trimer_spectrum(double eta) {
    if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
    TrimerSpectrum t;
    const double r2 = std::numbers::sqrt2;
    t.energies << -r2 * eta, 0.0, r2 * eta;
    t.vectors.col(0) << 0.5, -r2 / 2.0, 0.5;
    t.vectors.col(1) << 1.0 / r2, 0.0, -1.0 / r2;
    t.vectors.col(2) << 0.5, r2 / 2.0, 0.5;
    return t;
}

inline Eigen::Matrix3d trimer_hamiltonian(double eta) {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    h(0, 1) = h(1, 0) = h(1, 2) = h(2, 1) = eta;
    return h;
}

// Time of the first end-to-end entanglement maximum, pi / (sqrt(2) eta).
inline double p1_peak_estimate(double strong, double weak) {
    return std::numbers::pi / (std::numbers::sqrt2 * trimer_eta(strong, weak));
}

// ---------------------------------------------------------------------------
// One-excitation band of the 7-site dimerized chain

struct BandSpectrum {
    double e0 = 0.0;
    double e_p1 = 0.0, e_p2 = 0.0, e_p3 = 0.0;  // E^{-k} = -E^{+k}

    std::vector<double> ascending() const { return {-e_p3, -e_p2, -e_p1, e0, e_p1, e_p2, e_p3}; }
};

inline BandSpectrum band_spectrum(double strong, double weak) {
    if (!(strong > 0.0) || !(weak > 0.0)) throw InvalidArgument("band couplings must be positive");
    const double d2 = strong * strong, w2 = weak * weak;
    const double inner = std::sqrt(d2 * d2 + 6.0 * d2 * w2 + w2 * w2);
    BandSpectrum b;
    b.e_p3 = std::sqrt(d2 + 3.0 * w2 + inner) / std::numbers::sqrt2;
    b.e_p2 = std::sqrt(d2 + w2);
    b.e_p1 = std::sqrt(std::max(d2 + 3.0 * w2 - inner, 0.0)) / std::numbers::sqrt2;
    return b;
}

// One-excitation matrix with bond J entering as J.
inline Eigen::MatrixXd hopping_matrix(const std::vector<double>& couplings) {
    const Eigen::Index n = static_cast<Eigen::Index>(couplings.size()) + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = couplings[i];
    return h;
}

// Effective coupling of a dimerized chain of any admissible length: the
// smallest positive one-excitation eigenvalue divided by sqrt(2).
inline double dimerized_eta(int n_sites, double strong, double weak) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hopping_matrix(p1_pattern(n_sites, strong, weak)),
                                                      Eigen::EigenvaluesOnly);
    double best = INFINITY;
    for (double e : es.eigenvalues()) {
        if (e > 1e-12 * strong) best = std::min(best, e);
    }
    return best / std::numbers::sqrt2;
}

// ---------------------------------------------------------------------------
// Bulk standing waves

struct BulkModes {
    int n_bulk = 0;
    Eigen::VectorXd energies;  // E_k, k = 1..n_bulk at index k-1
    Eigen::MatrixXd modes;     // column k-1 holds phi^k_n, n = 1..n_bulk
};

// phi^k_n = sqrt(2/(n+1)) sin(pi k n/(n+1)), E_k = Omega + Delta cos(pi k/(n+1))
// with the literal hopping Delta/2.
inline BulkModes bulk_modes(int n_bulk, double strong, double omega = 0.0) {
    if (n_bulk < 1) throw InvalidArgument("n_bulk must be >= 1");
    BulkModes m;
    m.n_bulk = n_bulk;
    m.energies.resize(n_bulk);
    m.modes.resize(n_bulk, n_bulk);
    const double l = n_bulk + 1.0;
    const double norm = std::sqrt(2.0 / l);
    for (int k = 1; k <= n_bulk; ++k) {
        m.energies(k - 1) = omega + strong * std::cos(std::numbers::pi * k / l);
        for (int n = 1; n <= n_bulk; ++n) m.modes(n - 1, k - 1) = norm * std::sin(std::numbers::pi * k * n / l);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Weak-boundary chain: second-order boundary coupling

struct P2EffectiveModel {
    int n_bulk = 0;
    double strong = 0.0, weak = 0.0, field = 0.0;
    std::vector<double> lambda_bar;  // boundary-mode couplings
    std::vector<double> zeta;        // detunings B - E_k
    // Mediated coupling. The receiver couples to mode k with an extra
    // (-1)^{k-1}, which enters the exchange term.
    double j_eff = 0.0;
    // Equal second-order shift of both boundary levels, sum lambda^2/zeta.
    double boundary_shift = 0.0;
    double dispersive_ratio = 0.0;  // max |lambda_k / zeta_k|

    // Gamma = gamma sum lambda_k^2 / zeta_k^2 (per-mode detuning).
    double dephasing_rate(double gamma) const {
        double s = 0.0;
        for (std::size_t k = 0; k < zeta.size(); ++k) s += lambda_bar[k] * lambda_bar[k] / (zeta[k] * zeta[k]);
        return gamma * s;
    }
    // Alternative reading with one representative detuning, the field B.
    double dephasing_rate_single_detuning(double gamma) const {
        double s = 0.0;
        for (double l : lambda_bar) s += l * l;
        return gamma * s / (field * field);
    }
    bool dispersive(double threshold = 0.1) const { return dispersive_ratio < threshold; }
};

inline P2EffectiveModel p2_effective(int n_bulk, double strong, double weak, double field) {
    if (n_bulk < 1) throw InvalidArgument("n_bulk must be >= 1");
    const BulkModes modes = bulk_modes(n_bulk, strong, 0.0);
    P2EffectiveModel m;
    m.n_bulk = n_bulk;
    m.strong = strong;
    m.weak = weak;
    m.field = field;
    const double l = n_bulk + 1.0;
    for (int k = 1; k <= n_bulk; ++k) {
        const double lam = 0.5 * weak * std::sqrt(2.0 / l) * std::sin(std::numbers::pi * k / l);
        const double z = field - modes.energies(k - 1);
        if (std::abs(z) < 1e-12 * std::max(1.0, std::abs(strong))) {
            throw ResonantMode("field " + std::to_string(field) + " is resonant with bulk mode " + std::to_string(k));
        }
        m.lambda_bar.push_back(lam);
        m.zeta.push_back(z);
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        m.j_eff += sign * lam * lam / z;
        m.boundary_shift += lam * lam / z;
        m.dispersive_ratio = std::max(m.dispersive_ratio, std::abs(lam / z));
    }
    return m;
}

inline P2EffectiveModel p2_effective(const ChainSpec& spec) {
    if (spec.protocol != Protocol::P2) throw InvalidArgument("p2_effective needs a P2 chain");
    return p2_effective(spec.n_sites - 2, spec.strong_coupling, spec.weak_coupling, spec.fields.front());
}

// Two-site chain whose single-excitation dynamics is H_eff = j_eff (c_e^+ c_r + h.c.):
// an XX bond of 2 j_eff under the literal convention, no fields.
inline ChainSpec p2_effective_chain(const P2EffectiveModel& m) {
    ChainSpec c;
    c.n_sites = 2;
    c.spin = SpinValue::from_twice(1);
    c.couplings = {2.0 * m.j_eff};
    c.fields = {0.0, 0.0};
    c.protocol = Protocol::P2;
    c.strong_coupling = m.strong;
    c.weak_coupling = m.weak;
    return c;
}

// Normalized boundary negativity peaks at this time under the closed H_eff.
inline double p2_effective_peak_time(const P2EffectiveModel& m) {
    if (m.j_eff == 0.0) throw InvalidArgument("j_eff vanishes");
    return std::numbers::pi / (4.0 * std::abs(m.j_eff));
}

// Closed two-level trajectory of the sender/receiver pair.
inline Trajectory p2_effective_dynamics(const P2EffectiveModel& m, const TimeGrid& grid) {
    const ChainSpec c = p2_effective_chain(m);
    const QuantumState psi0 = initial_state_p2(c);
    return evolve(project_to_sector(xx_chain(c), *psi0.basis), psi0, grid);
}

// ---------------------------------------------------------------------------
// Time horizons

enum class EstimateSource { Trimer, EffectiveCoupling, Fallback };

inline std::string to_string(EstimateSource s) {
    switch (s) {
        case EstimateSource::Trimer: return "trimer";
        case EstimateSource::EffectiveCoupling: return "effective_coupling";
        case EstimateSource::Fallback: return "fallback";
    }
    return "fallback";
}

struct TimeEstimate {
    double time = 0.0;
    EstimateSource source = EstimateSource::Fallback;
};

// Expected time of the first entanglement maximum. The dimerized chain uses
// the trimer time, divided by 2s because the single-quantum hopping grows as
// 2s. The weak-boundary chain uses pi/(4|j_eff|) deep in the dispersive
// regime and otherwise shares the trimer time of the same (Delta, delta), so
// both protocols get a common horizon in comparisons.
inline TimeEstimate protocol_time_estimate(const ChainSpec& spec) {
    const double two_s = spec.spin.twice();
    const double delta = spec.weak_coupling, big = spec.strong_coupling;
    if (spec.protocol == Protocol::P1) {
        return {std::numbers::pi / (std::numbers::sqrt2 * dimerized_eta(spec.n_sites, big, delta)) / two_s,
                EstimateSource::Trimer};
    }
    if (spec.protocol == Protocol::P2 && big > 0.0 && delta > 0.0) {
        try {
            const P2EffectiveModel m = p2_effective(spec);
            if (m.dispersive() && m.j_eff != 0.0) {
                return {p2_effective_peak_time(m) / two_s, EstimateSource::EffectiveCoupling};
            }
        } catch (const ResonantMode&) {
        }
        return {p1_peak_estimate(big, delta) / two_s, EstimateSource::Trimer};
    }
    double min_j = INFINITY;
    for (double j : spec.couplings) {
        if (j != 0.0) min_j = std::min(min_j, std::abs(j));
    }
    if (!std::isfinite(min_j)) min_j = 1.0;
    return {3.0 * 2.0 * std::numbers::pi / min_j, EstimateSource::Fallback};
}

inline constexpr int kDefaultGridPoints = 2000;

inline TimeGrid default_time_grid(const ChainSpec& spec, int n_points = kDefaultGridPoints) {
    return {0.0, 2.0 * protocol_time_estimate(spec).time, n_points};
}

}  // namespace spinent
