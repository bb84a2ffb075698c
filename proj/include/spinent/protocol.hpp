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

// protocol.hpp: closed-system protocol runs: boundary-pair observables along
// a time grid and the refined entanglement peak.

#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "spinent/dynamics.hpp"
#include "spinent/hamiltonians.hpp"
#include "spinent/measures.hpp"
#include "spinent/sector.hpp"

namespace spinent {

struct BoundaryObservables {
    double negativity = 0.0;
    double normalized_negativity = 0.0;
    double fidelity_bell = 0.0;
    double bulk_population = 0.0;
};

// Target of the extraction step: (|2s,0> + |0,2s>)/sqrt(2) on the boundary
// pair, which is |psi+> for s = 1/2.
inline Eigen::VectorXcd boundary_target(SpinValue spin) {
    const int d = spin.local_dim();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
    v((d - 1) * d) = v(d - 1) = 1.0 / std::sqrt(2.0);
    return v;
}

// Holds the sector Hamiltonian and initial state of one chain and evaluates
// boundary observables at arbitrary times. The weak-boundary protocol applies
// R_z(-pi/2) to the last site before the fidelity is taken.
class ClosedProtocol {
public:
    explicit ClosedProtocol(const ChainSpec& spec, RzConvention rz = kDefaultRzConvention)
        : spec_(spec), rz_(rz) {
        spec_.validate();
        if (spec_.protocol == Protocol::Custom) throw InvalidArgument("closed protocol run needs P1 or P2");
        psi0_ = initial_state(spec_);
        partition_ = boundary_partition(*psi0_.basis);
        bulk_diag_ = bulk_excitation_diagonal(*psi0_.basis);
        target_ = boundary_target(spec_.spin);
        const SparseRowMatrix h = project_to_sector_sparse(xx_chain(spec_), *psi0_.basis);
        if (h.rows() <= kDenseSectorLimit) {
            spectral_.emplace(Eigen::MatrixXd(h), psi0_.amplitudes);
        } else {
            sparse_h_ = h;
        }
    }

    const ChainSpec& spec() const { return spec_; }
    const SectorBasis& basis() const { return *psi0_.basis; }
    const QuantumState& initial() const { return psi0_; }
    bool dense() const { return spectral_.has_value(); }
    const char* solver() const { return dense() ? "eigendecomposition" : "lanczos"; }

    Eigen::VectorXcd state_at(double t) const {
        if (spectral_) return spectral_->state_at(t);
        return krylov_evolve(sparse_h_, psi0_.amplitudes, {0.0, t, 2}).back();
    }

    double normalized_negativity(const Eigen::VectorXcd& psi) const {
        const Eigen::MatrixXcd rho = reduce_pure(partition_, psi);
        const int d = spec_.spin.local_dim();
        return negativity(rho, {d, d}) / max_negativity(d);
    }

    double normalized_negativity_at(double t) const { return normalized_negativity(state_at(t)); }

    BoundaryObservables observe(const Eigen::VectorXcd& psi) const {
        BoundaryObservables o;
        const int d = spec_.spin.local_dim();
        const Eigen::MatrixXcd rho = reduce_pure(partition_, psi);
        o.negativity = negativity(rho, {d, d});
        o.normalized_negativity = o.negativity / max_negativity(d);
        o.bulk_population = (psi.cwiseAbs2().array() * bulk_diag_.array()).sum();
        if (spec_.protocol == Protocol::P2) {
            const QuantumState rotated =
                rz_on_site({psi0_.basis, psi}, spec_.n_sites - 1, kExtractionAngle, rz_);
            o.fidelity_bell = fidelity_pure_mixed(target_, reduce_pure(partition_, rotated.amplitudes));
        } else {
            o.fidelity_bell = fidelity_pure_mixed(target_, rho);
        }
        return o;
    }

    BoundaryObservables observe_at(double t) const { return observe(state_at(t)); }

private:
    ChainSpec spec_;
    RzConvention rz_;
    QuantumState psi0_;
    TracePartition partition_;
    Eigen::VectorXd bulk_diag_;
    Eigen::VectorXcd target_;
    std::optional<SpectralEvolution> spectral_;
    SparseRowMatrix sparse_h_;
};

struct ProtocolSeries {
    std::vector<double> times;
    std::vector<BoundaryObservables> values;
    Peak peak;                          // of the normalized negativity
    BoundaryObservables at_peak;
    double max_bulk_population = 0.0;
    std::string solver;

    std::vector<double> column(double BoundaryObservables::*field) const {
        std::vector<double> out;
        out.reserve(values.size());
        for (const auto& v : values) out.push_back(v.*field);
        return out;
    }
};

inline std::vector<Eigen::VectorXcd> protocol_states(const ClosedProtocol& p, const std::vector<double>& times) {
    std::vector<Eigen::VectorXcd> states;
    states.reserve(times.size());
    if (p.dense()) {
        for (double t : times) states.push_back(p.state_at(t));
    } else {
        const SparseRowMatrix h = project_to_sector_sparse(xx_chain(p.spec()), p.basis());
        states = krylov_evolve(h, p.initial().amplitudes, {times.front(), times.back(), static_cast<int>(times.size())});
    }
    return states;
}

inline ProtocolSeries run_closed_protocol(const ClosedProtocol& p, const TimeGrid& grid) {
    ProtocolSeries s;
    s.times = grid.times();
    s.solver = p.solver();
    for (const auto& psi : protocol_states(p, s.times)) s.values.push_back(p.observe(psi));
    const auto neg = s.column(&BoundaryObservables::normalized_negativity);
    if (p.dense()) {
        s.peak = find_peak(s.times, neg, [&](double t) { return p.normalized_negativity_at(t); });
    } else {
        s.peak = find_peak(s.times, neg);
    }
    s.at_peak = p.dense() ? p.observe_at(s.peak.time) : s.values[s.peak.index];
    for (const auto& v : s.values) s.max_bulk_population = std::max(s.max_bulk_population, v.bulk_population);
    return s;
}

inline ProtocolSeries run_closed_protocol(const ChainSpec& spec, const TimeGrid& grid) {
    return run_closed_protocol(ClosedProtocol(spec), grid);
}

// Peak normalized negativity only; the inner loop of scans and ensembles.
inline Peak closed_negativity_peak(const ChainSpec& spec, const TimeGrid& grid) {
    const ClosedProtocol p(spec);
    const std::vector<double> times = grid.times();
    std::vector<double> neg;
    neg.reserve(times.size());
    for (const auto& psi : protocol_states(p, times)) neg.push_back(p.normalized_negativity(psi));
    if (p.dense()) return find_peak(times, neg, [&](double t) { return p.normalized_negativity_at(t); });
    return find_peak(times, neg);
}

}  // namespace spinent
