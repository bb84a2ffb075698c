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

// sector.hpp: product bases with fixed total excitation number, operator
// strings, and their matrix elements in a sector or in the full space.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "spinent/errors.hpp"
#include "spinent/spin.hpp"

namespace spinent {

using Code = std::uint64_t;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SparseComplex = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Above this dimension sector Hamiltonians are kept sparse only.
inline constexpr Eigen::Index kDenseSectorLimit = 4096;

// Ordered product states of n_sites spins. With an excitation offset the
// basis spans the sector of fixed total excitation number above |0...0>;
// without one it spans the full space. States are sorted lexicographically
// with site 0 most significant, which is also the order of their codes.
class SectorBasis {
public:
    SectorBasis(int n_sites, SpinValue spin, std::optional<int> offset)
        : n_sites_(n_sites), spin_(spin), offset_(offset) {
        if (n_sites < 1 || n_sites > 40) {
            throw InvalidArgument("n_sites must be in [1, 40], got " + std::to_string(n_sites));
        }
        const int d = spin.local_dim();
        place_.assign(n_sites, 1);
        for (int site = n_sites - 2; site >= 0; --site) place_[site] = place_[site + 1] * d;
        if (offset) {
            const int max_total = n_sites * spin.max_excitation();
            if (*offset < 0 || *offset > max_total) {
                throw InvalidArgument("excitation offset " + std::to_string(*offset) +
                                      " outside [0, " + std::to_string(max_total) + "]");
            }
            enumerate(0, *offset, 0);
        } else {
            check_full_space_budget(n_sites, d);
            const Code total = static_cast<Code>(full_space_dim(n_sites, d));
            codes_.resize(total);
            for (Code c = 0; c < total; ++c) codes_[c] = c;
        }
    }

    int n_sites() const { return n_sites_; }
    SpinValue spin() const { return spin_; }
    std::optional<int> offset() const { return offset_; }
    bool is_full_space() const { return !offset_.has_value(); }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(codes_.size()); }
    const std::vector<Code>& codes() const { return codes_; }
    Code code(Eigen::Index i) const { return codes_[static_cast<std::size_t>(i)]; }

    int digit_of_code(Code c, int site) const {
        return static_cast<int>((c / place_[site]) % spin_.local_dim());
    }
    int digit(Eigen::Index i, int site) const { return digit_of_code(code(i), site); }
    Code place(int site) const { return place_[site]; }

    std::vector<int> tuple(Eigen::Index i) const {
        std::vector<int> out(n_sites_);
        for (int site = 0; site < n_sites_; ++site) out[site] = digit(i, site);
        return out;
    }

    Code encode(std::span<const int> digits) const {
        if (static_cast<int>(digits.size()) != n_sites_) {
            throw DimensionMismatch("tuple has " + std::to_string(digits.size()) + " entries, basis has " +
                                    std::to_string(n_sites_) + " sites");
        }
        Code c = 0;
        for (int site = 0; site < n_sites_; ++site) {
            if (digits[site] < 0 || digits[site] >= spin_.local_dim()) {
                throw IndexOutOfRange("local level " + std::to_string(digits[site]));
            }
            c += static_cast<Code>(digits[site]) * place_[site];
        }
        return c;
    }

    std::optional<Eigen::Index> index_of_code(Code c) const {
        const auto it = std::lower_bound(codes_.begin(), codes_.end(), c);
        if (it == codes_.end() || *it != c) return std::nullopt;
        return static_cast<Eigen::Index>(it - codes_.begin());
    }

    std::optional<Eigen::Index> index_of(std::span<const int> digits) const {
        return index_of_code(encode(digits));
    }

    // Total excitation number of a basis state (sum of local levels).
    int excitations(Eigen::Index i) const {
        int total = 0;
        for (int site = 0; site < n_sites_; ++site) total += digit(i, site);
        return total;
    }

private:
    void enumerate(int site, int remaining, Code prefix) {
        const int dmax = spin_.max_excitation();
        if (site == n_sites_) {
            if (remaining == 0) codes_.push_back(prefix);
            return;
        }
        const int sites_after = n_sites_ - site - 1;
        for (int level = 0; level <= std::min(dmax, remaining); ++level) {
            if (remaining - level > sites_after * dmax) continue;
            enumerate(site + 1, remaining - level, prefix + static_cast<Code>(level) * place_[site]);
        }
    }

    int n_sites_;
    SpinValue spin_;
    std::optional<int> offset_;
    std::vector<Code> place_;
    std::vector<Code> codes_;
};

inline SectorBasis sector_basis(int n_sites, SpinValue spin, int total_m_offset) {
    return SectorBasis(n_sites, spin, total_m_offset);
}

inline SectorBasis full_basis(int n_sites, SpinValue spin) {
    return SectorBasis(n_sites, spin, std::nullopt);
}

// ---------------------------------------------------------------------------
// Operator strings

enum class LocalOp { Sz, SPlus, SMinus, Sx, Sy };

struct SiteOp {
    int site;
    LocalOp op;
};

// coeff * prod(factors); factors act right to left when they share a site.
struct OperatorTerm {
    double coeff = 0.0;
    std::vector<SiteOp> factors;
};

using OperatorSum = std::vector<OperatorTerm>;

inline const Eigen::MatrixXcd& local_matrix(const SpinOperators& ops, LocalOp op) {
    switch (op) {
        case LocalOp::Sz: return ops.sz;
        case LocalOp::SPlus: return ops.s_plus;
        case LocalOp::SMinus: return ops.s_minus;
        case LocalOp::Sx: return ops.sx;
        case LocalOp::Sy: return ops.sy;
    }
    return ops.sz;
}

// Change of total excitation number, or nullopt for mixing operators.
inline std::optional<int> excitation_change(LocalOp op) {
    switch (op) {
        case LocalOp::Sz: return 0;
        case LocalOp::SPlus: return 1;
        case LocalOp::SMinus: return -1;
        default: return std::nullopt;
    }
}

inline bool conserves_magnetization(const OperatorTerm& term) {
    int change = 0;
    for (const auto& f : term.factors) {
        const auto c = excitation_change(f.op);
        if (!c) return false;
        change += *c;
    }
    return change == 0;
}

namespace detail {

struct Branch {
    Code code;
    cplx amp;
};

// Applies one operator term to a product state and returns the resulting
// superposition of product states.
inline std::vector<Branch> apply_term(const SectorBasis& basis, const SpinOperators& ops,
                                      const OperatorTerm& term, Code start) {
    const int d = basis.spin().local_dim();
    std::vector<Branch> current{{start, cplx(term.coeff)}};
    std::vector<Branch> next;
    for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) {
        if (it->site < 0 || it->site >= basis.n_sites()) {
            throw IndexOutOfRange("operator site " + std::to_string(it->site));
        }
        const Eigen::MatrixXcd& m = local_matrix(ops, it->op);
        next.clear();
        for (const Branch& b : current) {
            const int level = basis.digit_of_code(b.code, it->site);
            const Code base = b.code - static_cast<Code>(level) * basis.place(it->site);
            for (int out = 0; out < d; ++out) {
                const cplx v = m(out, level);
                if (std::abs(v) == 0.0) continue;
                next.push_back({base + static_cast<Code>(out) * basis.place(it->site), b.amp * v});
            }
        }
        current.swap(next);
        if (current.empty()) break;
    }
    return current;
}

}  // namespace detail

// Sector matrix <a|H|b> of a magnetization-conserving operator sum.
inline SparseRowMatrix project_to_sector_sparse(const OperatorSum& terms, const SectorBasis& basis) {
    for (const auto& term : terms) {
        if (!conserves_magnetization(term)) {
            throw NonConservingTerm("operator term does not conserve total S_z");
        }
    }
    const SpinOperators ops = spin_matrices(basis.spin());
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index col = 0; col < basis.dim(); ++col) {
        for (const auto& term : terms) {
            for (const auto& br : detail::apply_term(basis, ops, term, basis.code(col))) {
                const auto row = basis.index_of_code(br.code);
                if (!row) {
                    throw NonConservingTerm("operator maps a sector state outside the sector");
                }
                triplets.emplace_back(static_cast<int>(*row), static_cast<int>(col), br.amp.real());
            }
        }
    }
    SparseRowMatrix h(basis.dim(), basis.dim());
    h.setFromTriplets(triplets.begin(), triplets.end());
    h.prune(0.0);
    return h;
}

inline Eigen::MatrixXd project_to_sector(const OperatorSum& terms, const SectorBasis& basis) {
    if (basis.dim() > kDenseSectorLimit) {
        throw DimensionBudgetExceeded("sector dimension " + std::to_string(basis.dim()) +
                                      " exceeds the dense limit; use project_to_sector_sparse");
    }
    return Eigen::MatrixXd(project_to_sector_sparse(terms, basis));
}

// Full tensor-product matrix of an arbitrary operator sum.
inline SparseComplex build_full_space_sparse(const OperatorSum& terms, int n_sites, SpinValue spin) {
    const SectorBasis basis = full_basis(n_sites, spin);
    const SpinOperators ops = spin_matrices(spin);
    std::vector<Eigen::Triplet<cplx>> triplets;
    for (Eigen::Index col = 0; col < basis.dim(); ++col) {
        for (const auto& term : terms) {
            for (const auto& br : detail::apply_term(basis, ops, term, basis.code(col))) {
                triplets.emplace_back(static_cast<int>(br.code), static_cast<int>(col), br.amp);
            }
        }
    }
    SparseComplex h(basis.dim(), basis.dim());
    h.setFromTriplets(triplets.begin(), triplets.end());
    h.prune(cplx(0.0));
    return h;
}

inline Eigen::MatrixXcd build_full_space(const OperatorSum& terms, int n_sites, SpinValue spin) {
    return Eigen::MatrixXcd(build_full_space_sparse(terms, n_sites, spin));
}

// Embeds a sector vector into the full product space.
inline Eigen::VectorXcd lift_to_full(const SectorBasis& basis, const Eigen::VectorXcd& amplitudes) {
    if (amplitudes.size() != basis.dim()) {
        throw DimensionMismatch("amplitude vector does not match sector dimension");
    }
    check_full_space_budget(basis.n_sites(), basis.spin().local_dim());
    Eigen::VectorXcd out =
        Eigen::VectorXcd::Zero(full_space_dim(basis.n_sites(), basis.spin().local_dim()));
    for (Eigen::Index i = 0; i < basis.dim(); ++i) out(static_cast<Eigen::Index>(basis.code(i))) = amplitudes(i);
    return out;
}

// ---------------------------------------------------------------------------
// Partial-trace bookkeeping: basis states grouped by the configuration of the
// traced-out part, each entry carrying the index of the kept configuration.

struct TracePartition {
    int kept_dim = 0;
    std::vector<std::vector<std::pair<int, Eigen::Index>>> groups;
};

template <class SplitFn>
TracePartition make_trace_partition(Eigen::Index dim, int kept_dim, SplitFn&& split) {
    TracePartition part;
    part.kept_dim = kept_dim;
    std::unordered_map<Code, std::size_t> group_of;
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto [kept, rest] = split(i);
        auto [it, inserted] = group_of.try_emplace(rest, part.groups.size());
        if (inserted) part.groups.emplace_back();
        part.groups[it->second].emplace_back(kept, i);
    }
    return part;
}

// Keeps the first and last site of the chain (the entangled pair).
inline TracePartition boundary_partition(const SectorBasis& basis) {
    const int d = basis.spin().local_dim();
    const int last = basis.n_sites() - 1;
    if (last < 1) throw InvalidArgument("boundary pair needs at least two sites");
    return make_trace_partition(basis.dim(), d * d, [&](Eigen::Index i) {
        const Code c = basis.code(i);
        const int a = basis.digit_of_code(c, 0);
        const int b = basis.digit_of_code(c, last);
        const Code rest = c - static_cast<Code>(a) * basis.place(0) - static_cast<Code>(b) * basis.place(last);
        return std::pair<int, Code>{a * d + b, rest};
    });
}

// Keeps `keep` (in the given order) of a mixed-radix product space whose
// factor dimensions are `dims`, factor 0 most significant.
inline TracePartition mixed_radix_partition(const std::vector<int>& dims, const std::vector<int>& keep) {
    const int n = static_cast<int>(dims.size());
    std::vector<Code> place(n, 1);
    for (int k = n - 2; k >= 0; --k) place[k] = place[k + 1] * static_cast<Code>(dims[k + 1]);
    Code total = 1;
    for (int dk : dims) total *= static_cast<Code>(dk);
    int kept_dim = 1;
    for (int k : keep) {
        if (k < 0 || k >= n) throw IndexOutOfRange("kept factor " + std::to_string(k));
        kept_dim *= dims[k];
    }
    return make_trace_partition(static_cast<Eigen::Index>(total), kept_dim, [&](Eigen::Index i) {
        Code rest = static_cast<Code>(i);
        int kept = 0;
        for (int k : keep) {
            const int digit = static_cast<int>((static_cast<Code>(i) / place[k]) % dims[k]);
            kept = kept * dims[k] + digit;
            rest -= static_cast<Code>(digit) * place[k];
        }
        return std::pair<int, Code>{kept, rest};
    });
}

}  // namespace spinent
