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

// hamiltonians.hpp: Heisenberg and XX chain Hamiltonians, the two coupling
// architectures, and static disorder.
//
// Conventions: spin operators are the literal spin-s matrices (S = sigma/2 for
// s = 1/2), so an XX bond J (SxSx + SySy) hops a single s=1/2 excitation with
// amplitude J/2. The weak coupling delta is the energy unit and 1/delta the
// time unit.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinent/errors.hpp"
#include "spinent/random.hpp"
#include "spinent/sector.hpp"
#include "spinent/spin.hpp"

namespace spinent {

struct HeisenbergParams {
    int n_sites = 2;
    SpinValue spin = SpinValue::from_twice(1);
    std::vector<double> couplings;  // J_{i,i+1}, size n_sites - 1
    double anisotropy = 0.0;        // lambda
    double zz_anisotropy = 1.0;     // Gamma
    std::vector<double> onsite;     // epsilon_i, size n_sites (empty = zeros)
    std::vector<double> fields;     // B_i, size n_sites (empty = zeros)
};

inline OperatorSum heisenberg_terms(const HeisenbergParams& p) {
    if (p.n_sites < 1) throw InvalidArgument("n_sites must be positive");
    if (static_cast<int>(p.couplings.size()) != p.n_sites - 1) {
        throw DimensionMismatch("expected " + std::to_string(p.n_sites - 1) + " couplings");
    }
    auto site_array = [&](const std::vector<double>& v, const char* name) {
        if (v.empty()) return std::vector<double>(p.n_sites, 0.0);
        if (static_cast<int>(v.size()) != p.n_sites) {
            throw DimensionMismatch(std::string(name) + " must have one entry per site");
        }
        return v;
    };
    if (!std::isfinite(p.anisotropy) || !std::isfinite(p.zz_anisotropy)) {
        throw InvalidArgument("anisotropies must be finite");
    }
    const auto eps = site_array(p.onsite, "onsite");
    const auto b = site_array(p.fields, "fields");
    OperatorSum terms;
    for (int i = 0; i + 1 < p.n_sites; ++i) {
        const double half_j = 0.5 * p.couplings[i];
        terms.push_back({half_j * (1.0 + p.anisotropy), {{i, LocalOp::Sx}, {i + 1, LocalOp::Sx}}});
        terms.push_back({half_j * (1.0 - p.anisotropy), {{i, LocalOp::Sy}, {i + 1, LocalOp::Sy}}});
        terms.push_back({half_j * p.zz_anisotropy, {{i, LocalOp::Sz}, {i + 1, LocalOp::Sz}}});
    }
    for (int i = 0; i < p.n_sites; ++i) {
        terms.push_back({eps[i] + b[i], {{i, LocalOp::Sz}}});
    }
    return terms;
}

// H = 1/2 sum J[(1+lambda) SxSx + (1-lambda) SySy + Gamma SzSz] + sum (eps + B) Sz
// in the full tensor-product space. With J = 2J' and lambda = 0, Gamma = 1 the
// bond reduces to the exchange form J' S1.S2.
inline Eigen::MatrixXcd build_general_heisenberg(const HeisenbergParams& p) {
    check_full_space_budget(p.n_sites, p.spin.local_dim());
    return build_full_space(heisenberg_terms(p), p.n_sites, p.spin);
}

// ---------------------------------------------------------------------------
// XX chains

enum class Protocol { P1, P2, Custom };

inline std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::P1: return "p1";
        case Protocol::P2: return "p2";
        case Protocol::Custom: return "custom";
    }
    return "custom";
}

struct ChainSpec {
    int n_sites = 7;
    SpinValue spin = SpinValue::from_twice(1);
    std::vector<double> couplings;  // size n_sites - 1
    std::vector<double> fields;     // size n_sites
    Protocol protocol = Protocol::Custom;
    double strong_coupling = 10.0;  // Delta
    double weak_coupling = 1.0;     // delta, also the disorder scale

    void validate() const {
        if (n_sites < 2) throw InvalidArgument("chain needs at least two sites, got " + std::to_string(n_sites));
        if (static_cast<int>(couplings.size()) != n_sites - 1) {
            throw DimensionMismatch("chain of " + std::to_string(n_sites) + " sites needs " +
                                    std::to_string(n_sites - 1) + " couplings");
        }
        if (static_cast<int>(fields.size()) != n_sites) {
            throw DimensionMismatch("field array must have one entry per site");
        }
        for (double j : couplings) {
            if (!std::isfinite(j)) throw InvalidArgument("non-finite coupling");
        }
        for (double b : fields) {
            if (!std::isfinite(b)) throw InvalidArgument("non-finite field");
        }
        if (protocol == Protocol::P1 && n_sites % 2 == 0) {
            throw EvenLength("P1 requires an odd chain length");
        }
    }
};

// Dimerized couplings: A and C attach to their dimers by delta, the central
// site B attaches to its neighbours by delta, and each dimer carries Delta.
// Each half between A and B must tile into dimers, so N = 4m + 3, N >= 7.
inline std::vector<double> p1_pattern(int n_sites, double strong, double weak) {
    if (n_sites % 2 == 0) throw EvenLength("P1 needs N = 2m + 1, got " + std::to_string(n_sites));
    if (n_sites < 7 || (n_sites - 3) % 4 != 0) {
        throw InvalidArgument("P1 needs a symmetric dimer tiling around the centre (N = 7, 11, 15, ...), got " +
                              std::to_string(n_sites));
    }
    const int center = n_sites / 2;
    std::vector<double> j(n_sites - 1, weak);
    // Dimers occupy sites (1,2), (3,4), ... up to the centre, mirrored after it.
    for (int left = 1; left + 1 < center; left += 2) {
        j[left] = strong;
        j[n_sites - 2 - left] = strong;
    }
    return j;
}

struct ChainPattern {
    std::vector<double> couplings;
    std::vector<double> fields;
};

inline ChainPattern p2_pattern(int n_sites, double strong, double weak, double field) {
    if (n_sites < 3) throw InvalidArgument("P2 needs N >= 3, got " + std::to_string(n_sites));
    ChainPattern out;
    out.couplings.assign(n_sites - 1, strong);
    out.couplings.front() = weak;
    out.couplings.back() = weak;
    out.fields.assign(n_sites, 0.0);
    out.fields.front() = field;
    out.fields.back() = field;
    return out;
}

inline ChainSpec p1_chain(int n_sites, SpinValue spin, double strong, double weak) {
    ChainSpec c;
    c.n_sites = n_sites;
    c.spin = spin;
    c.couplings = p1_pattern(n_sites, strong, weak);
    c.fields.assign(n_sites, 0.0);
    c.protocol = Protocol::P1;
    c.strong_coupling = strong;
    c.weak_coupling = weak;
    return c;
}

inline ChainSpec p2_chain(int n_sites, SpinValue spin, double strong, double weak, double field) {
    auto pat = p2_pattern(n_sites, strong, weak, field);
    ChainSpec c;
    c.n_sites = n_sites;
    c.spin = spin;
    c.couplings = std::move(pat.couplings);
    c.fields = std::move(pat.fields);
    c.protocol = Protocol::P2;
    c.strong_coupling = strong;
    c.weak_coupling = weak;
    return c;
}

// sum J_i (S^x_i S^x_{i+1} + S^y_i S^y_{i+1}) + sum B_i S^z_i, written with
// ladder operators so it can be projected onto magnetization sectors.
inline OperatorSum xx_chain(const ChainSpec& spec) {
    spec.validate();
    OperatorSum terms;
    for (int i = 0; i + 1 < spec.n_sites; ++i) {
        const double j = spec.couplings[i];
        if (j == 0.0) continue;
        terms.push_back({0.5 * j, {{i, LocalOp::SPlus}, {i + 1, LocalOp::SMinus}}});
        terms.push_back({0.5 * j, {{i, LocalOp::SMinus}, {i + 1, LocalOp::SPlus}}});
    }
    for (int i = 0; i < spec.n_sites; ++i) {
        if (spec.fields[i] == 0.0) continue;
        terms.push_back({spec.fields[i], {{i, LocalOp::Sz}}});
    }
    return terms;
}

// ---------------------------------------------------------------------------
// Static disorder. Draws d ~ U[-0.5, 0.5] scaled by E * delta.

enum class DisorderKind { Diagonal, OffDiagonal, Both };

inline std::string to_string(DisorderKind k) {
    switch (k) {
        case DisorderKind::Diagonal: return "diagonal";
        case DisorderKind::OffDiagonal: return "offdiagonal";
        case DisorderKind::Both: return "both";
    }
    return "both";
}

struct DisorderConfig {
    DisorderKind kind = DisorderKind::Diagonal;
    double strength = 0.0;  // E
    int n_realizations = 1000;
    std::uint64_t seed = 0;
    // Exploration mode: on-site disorder on every site instead of the two
    // boundary-field sites. Not part of the reference comparison.
    bool full_chain_diagonal = false;

    void validate() const {
        if (!(strength >= 0.0) || !std::isfinite(strength)) throw InvalidArgument("disorder strength must be >= 0");
        if (n_realizations < 1) throw InvalidArgument("n_realizations must be >= 1");
    }
};

// Adds E delta d to the on-site field of the first and last site.
inline ChainSpec apply_diagonal_disorder(const ChainSpec& spec, double strength, CounterRng& rng,
                                         bool full_chain = false) {
    if (!(strength >= 0.0)) throw InvalidArgument("disorder strength must be >= 0");
    ChainSpec out = spec;
    auto perturb = [&](int site) { out.fields[site] += strength * spec.weak_coupling * rng.uniform(-0.5, 0.5); };
    if (full_chain) {
        for (int i = 0; i < spec.n_sites; ++i) perturb(i);
    } else {
        perturb(0);
        perturb(spec.n_sites - 1);
    }
    return out;
}

// J_i -> J_i + E d_i delta on every bond; negative couplings are kept.
inline ChainSpec apply_offdiagonal_disorder(const ChainSpec& spec, double strength, CounterRng& rng) {
    if (!(strength >= 0.0)) throw InvalidArgument("disorder strength must be >= 0");
    ChainSpec out = spec;
    for (double& j : out.couplings) j += strength * spec.weak_coupling * rng.uniform(-0.5, 0.5);
    return out;
}

// Combined disorder draws the diagonal values first, then the bonds.
inline ChainSpec apply_disorder(const ChainSpec& spec, DisorderKind kind, double strength, CounterRng& rng,
                                bool full_chain_diagonal = false) {
    switch (kind) {
        case DisorderKind::Diagonal: return apply_diagonal_disorder(spec, strength, rng, full_chain_diagonal);
        case DisorderKind::OffDiagonal: return apply_offdiagonal_disorder(spec, strength, rng);
        case DisorderKind::Both: {
            const ChainSpec diag = apply_diagonal_disorder(spec, strength, rng, full_chain_diagonal);
            return apply_offdiagonal_disorder(diag, strength, rng);
        }
    }
    return spec;
}

}  // namespace spinent
