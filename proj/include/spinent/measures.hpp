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

// measures.hpp: reduced states, partial transpose, negativity, fidelity and
// entropies. Entropies are in bits.

#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinent/errors.hpp"
#include "spinent/sector.hpp"
#include "spinent/spin.hpp"

namespace spinent {

// Eigenvalues in (-kClampTolerance, 0) are treated as round-off and set to 0.
inline constexpr double kClampTolerance = 1e-8;

struct DensityMatrix {
    std::vector<int> dims;
    Eigen::MatrixXcd matrix;

    Eigen::Index size() const { return matrix.rows(); }

    // Throws unless trace, hermiticity and positivity hold within tolerance.
    void validate(double trace_tol = 1e-9, double herm_tol = 1e-10, double pos_tol = kClampTolerance) const {
        const Eigen::Index expect = std::accumulate(dims.begin(), dims.end(), Eigen::Index{1},
                                                    [](Eigen::Index a, int b) { return a * b; });
        if (matrix.rows() != matrix.cols() || matrix.rows() != expect) {
            throw DimensionMismatch("density matrix size does not match subsystem dims");
        }
        if (std::abs(matrix.trace() - cplx(1.0)) > trace_tol) throw InvalidArgument("trace is not 1");
        if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > herm_tol) throw NonHermitian("density matrix");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -pos_tol) throw NotPositive("density matrix has a negative eigenvalue");
    }

    static DensityMatrix from_pure(const Eigen::VectorXcd& psi, std::vector<int> dims) {
        return {std::move(dims), psi * psi.adjoint()};
    }
};

struct BipartiteSplit {
    int dim_a;
    int dim_b;
};

// ---------------------------------------------------------------------------
// Partial traces

inline Eigen::MatrixXcd reduce_pure(const TracePartition& part, const Eigen::VectorXcd& psi) {
    const int k = part.kept_dim;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(k, k);
    Eigen::VectorXcd v(k);
    for (const auto& group : part.groups) {
        v.setZero();
        for (const auto& [kept, idx] : group) v(kept) += psi(idx);
        rho.noalias() += v * v.adjoint();
    }
    return rho;
}

inline Eigen::MatrixXcd reduce_mixed(const TracePartition& part, const Eigen::MatrixXcd& rho) {
    const int k = part.kept_dim;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(k, k);
    for (const auto& group : part.groups) {
        for (const auto& [ka, ia] : group) {
            for (const auto& [kb, ib] : group) out(ka, kb) += rho(ia, ib);
        }
    }
    return out;
}

// State of the first and last chain sites, all others traced out.
inline DensityMatrix reduced_boundary_state(const SectorBasis& basis, const Eigen::VectorXcd& psi) {
    if (psi.size() != basis.dim()) throw DimensionMismatch("state does not match basis");
    const int d = basis.spin().local_dim();
    return {{d, d}, reduce_pure(boundary_partition(basis), psi)};
}

inline DensityMatrix reduced_boundary_state(const SectorBasis& basis, const Eigen::MatrixXcd& rho) {
    if (rho.rows() != basis.dim() || rho.cols() != basis.dim()) {
        throw DimensionMismatch("density matrix does not match basis");
    }
    const int d = basis.spin().local_dim();
    return {{d, d}, reduce_mixed(boundary_partition(basis), rho)};
}

// ---------------------------------------------------------------------------
// Partial transpose and negativity

// Transposes the A factor: <i_a i_b| rho |j_a j_b> -> <j_a i_b| . |i_a j_b>.
inline Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& rho, BipartiteSplit split) {
    const Eigen::Index n = static_cast<Eigen::Index>(split.dim_a) * split.dim_b;
    if (rho.rows() != n || rho.cols() != n) {
        throw DimensionMismatch("matrix size does not match the bipartite split");
    }
    Eigen::MatrixXcd out(n, n);
    const int db = split.dim_b;
    for (int ia = 0; ia < split.dim_a; ++ia) {
        for (int ja = 0; ja < split.dim_a; ++ja) {
            out.block(ja * db, ia * db, db, db) = rho.block(ia * db, ja * db, db, db);
        }
    }
    return out;
}

inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    if (m.rows() == 4) {
        const Eigen::Matrix4cd fixed = m;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(fixed, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline double trace_norm_hermitian(const Eigen::MatrixXcd& m) {
    return hermitian_eigenvalues(m).cwiseAbs().sum();
}

// (||rho^{T_A}||_1 - 1) / 2.
inline double negativity(const Eigen::MatrixXcd& rho, BipartiteSplit split) {
    const double n = 0.5 * (trace_norm_hermitian(partial_transpose(rho, split)) - 1.0);
    return n < 0.0 ? 0.0 : n;
}

inline double negativity(const DensityMatrix& rho) {
    if (rho.dims.size() != 2) throw DimensionMismatch("negativity needs a bipartite state");
    return negativity(rho.matrix, {rho.dims[0], rho.dims[1]});
}

// Sum of |negative eigenvalues| of rho^{T_A}; equals negativity for unit-trace input.
inline double negative_eigenvalue_sum(const Eigen::MatrixXcd& rho, BipartiteSplit split) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(partial_transpose(rho, split));
    double s = 0.0;
    for (double v : ev) {
        if (v < 0.0) s -= v;
    }
    return s;
}

// Maximum negativity of two d-level systems, reached by sum_k |kk>/sqrt(d).
inline double max_negativity(int d) { return 0.5 * (d - 1); }

inline double normalized_negativity(const Eigen::MatrixXcd& rho, BipartiteSplit split, int d) {
    return negativity(rho, split) / max_negativity(d);
}

inline double normalized_negativity(const DensityMatrix& rho) {
    return negativity(rho) / max_negativity(std::min(rho.dims[0], rho.dims[1]));
}

// ---------------------------------------------------------------------------
// Fidelity and entropies

namespace detail {

inline Eigen::VectorXd clamped(const Eigen::VectorXd& ev, const char* what) {
    Eigen::VectorXd out = ev;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (out(i) < -kClampTolerance) throw NotPositive(std::string(what) + " has eigenvalue " + std::to_string(out(i)));
        if (out(i) < 0.0) out(i) = 0.0;
    }
    return out;
}

inline Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const Eigen::VectorXd ev = clamped(es.eigenvalues(), "fidelity argument").cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).
inline double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw DimensionMismatch("fidelity arguments differ in size");
    }
    const Eigen::MatrixXcd sr = detail::psd_sqrt(rho);
    Eigen::MatrixXcd inner = sr * sigma * sr;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inner, Eigen::EigenvaluesOnly);
    const double f = detail::clamped(es.eigenvalues(), "sqrt(rho) sigma sqrt(rho)").cwiseSqrt().sum();
    return std::min(f, 1.0);
}

inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    return fidelity(rho.matrix, sigma.matrix);
}

inline double fidelity_pure(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi) {
    return std::abs(psi.dot(phi));
}

// sqrt(<psi|rho|psi>).
inline double fidelity_pure_mixed(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& rho) {
    const double overlap = (psi.adjoint() * rho * psi)(0, 0).real();
    return std::sqrt(std::max(overlap, 0.0));
}

inline double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd p = detail::clamped(es.eigenvalues(), "density matrix");
    double s = 0.0;
    for (double v : p) {
        if (v > 0.0) s -= v * std::log2(v);
    }
    return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix); }

inline void check_distribution(std::span<const double> p) {
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw InvalidDistribution("negative or NaN probability");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidDistribution("probabilities sum to " + std::to_string(total));
}

inline double shannon_entropy(std::span<const double> p) {
    check_distribution(p);
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

// sum_i sqrt(p_i q_i).
inline double bhattacharyya(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw InvalidDistribution("distributions differ in length");
    check_distribution(p);
    check_distribution(q);
    double f = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) f += std::sqrt(p[i] * q[i]);
    return f;
}

// (|01> + |10>)/sqrt(2) for two qubits, basis order |a b> with a most significant.
inline Eigen::VectorXcd bell_psi_plus() {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(1) = v(2) = 1.0 / std::sqrt(2.0);
    return v;
}

}  // namespace spinent
