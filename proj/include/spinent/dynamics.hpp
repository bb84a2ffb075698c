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

// dynamics.hpp: initial states and unitary evolution inside a magnetization
// sector: one-time eigendecomposition for dense sectors, Lanczos propagation
// for large sparse ones, and the free-fermion single-excitation propagator.

#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "spinent/errors.hpp"
#include "spinent/hamiltonians.hpp"
#include "spinent/sector.hpp"

namespace spinent {

struct QuantumState {
    std::shared_ptr<const SectorBasis> basis;
    Eigen::VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }
};

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int n_points = 2;

    void validate() const {
        if (!(t_end > t_start)) throw InvalidArgument("time grid needs t_end > t_start");
        if (n_points < 2) throw InvalidArgument("time grid needs at least two points");
    }
    double step() const { return (t_end - t_start) / (n_points - 1); }
    double at(int i) const { return i == n_points - 1 ? t_end : t_start + i * step(); }
    std::vector<double> times() const {
        validate();
        std::vector<double> t(n_points);
        for (int i = 0; i < n_points; ++i) t[i] = at(i);
        return t;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
    std::string solver;
};

// ---------------------------------------------------------------------------
// Initial states

inline QuantumState product_state(const ChainSpec& spec, const std::vector<int>& levels) {
    int total = 0;
    for (int l : levels) total += l;
    auto basis = std::make_shared<const SectorBasis>(spec.n_sites, spec.spin, total);
    const auto idx = basis->index_of(levels);
    if (!idx) throw InvalidArgument("product state not in its own sector");
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(basis->dim());
    amp(*idx) = 1.0;
    return {std::move(basis), std::move(amp)};
}

// |m=+s>_A |m=-s>^(N-2) |m=+s>_C.
inline QuantumState initial_state_p1(const ChainSpec& spec) {
    if (spec.protocol != Protocol::P1) throw InvalidArgument("initial_state_p1 needs a P1 chain");
    std::vector<int> levels(spec.n_sites, 0);
    levels.front() = levels.back() = spec.spin.max_excitation();
    return product_state(spec, levels);
}

// |m=+s>_A |m=-s>^(N-1).
inline QuantumState initial_state_p2(const ChainSpec& spec) {
    if (spec.protocol != Protocol::P2) throw InvalidArgument("initial_state_p2 needs a P2 chain");
    std::vector<int> levels(spec.n_sites, 0);
    levels.front() = spec.spin.max_excitation();
    return product_state(spec, levels);
}

inline QuantumState initial_state(const ChainSpec& spec) {
    return spec.protocol == Protocol::P1 ? initial_state_p1(spec) : initial_state_p2(spec);
}

// ---------------------------------------------------------------------------
// Spectral propagation

inline void check_symmetric(const Eigen::MatrixXd& h, double tol = 1e-12) {
    if (h.rows() != h.cols()) throw DimensionMismatch("Hamiltonian is not square");
    if (h.size() > 0 && (h - h.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw NonHermitian("sector Hamiltonian is not symmetric");
    }
}

// psi(t) = V exp(-i E t) V^T psi0 from a single eigendecomposition.
class SpectralEvolution {
public:
    SpectralEvolution(const Eigen::MatrixXd& h, const Eigen::VectorXcd& psi0) {
        check_symmetric(h);
        if (psi0.size() != h.rows()) throw DimensionMismatch("state does not match Hamiltonian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
        coeffs_ = vectors_.transpose().cast<cplx>() * psi0;
    }

    Eigen::VectorXcd state_at(double t) const {
        Eigen::VectorXcd phased(coeffs_.size());
        for (Eigen::Index k = 0; k < coeffs_.size(); ++k) {
            phased(k) = coeffs_(k) * std::polar(1.0, -energies_(k) * t);
        }
        return vectors_.cast<cplx>() * phased;
    }

    double energy() const { return (coeffs_.cwiseAbs2().array() * energies_.array()).sum(); }
    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXd& eigenvectors() const { return vectors_; }

private:
    Eigen::VectorXd energies_;
    Eigen::MatrixXd vectors_;
    Eigen::VectorXcd coeffs_;
};

// exp(-i H dt) psi by Lanczos with full reorthogonalization.
inline Eigen::VectorXcd krylov_step(const SparseRowMatrix& h, const Eigen::VectorXcd& psi, double dt,
                                    int max_krylov = 40, double tol = 1e-13) {
    const double beta0 = psi.norm();
    if (beta0 == 0.0) return psi;
    const Eigen::Index n = psi.size();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(max_krylov, n));
    Eigen::MatrixXcd basis(n, m_max);
    std::vector<double> alpha, beta;
    basis.col(0) = psi / beta0;
    int m = 0;
    for (int j = 0; j < m_max; ++j) {
        Eigen::VectorXcd w = h * basis.col(j);
        const double a = basis.col(j).dot(w).real();
        alpha.push_back(a);
        for (int r = 0; r < 2; ++r) {
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
        }
        m = j + 1;
        const double b = w.norm();
        if (b < tol || j + 1 == m_max) break;
        beta.push_back(b);
        basis.col(j + 1) = w / b;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        t(j, j) = alpha[j];
        if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(m);
    for (int k = 0; k < m; ++k) {
        e1 += es.eigenvectors().col(k).cast<cplx>() *
              (std::polar(1.0, -es.eigenvalues()(k) * dt) * es.eigenvectors()(0, k));
    }
    return beta0 * (basis.leftCols(m) * e1);
}

// Propagates through every grid point with Krylov steps no longer than
// max_step (in units where ||H|| max_step stays moderate).
inline std::vector<Eigen::VectorXcd> krylov_evolve(const SparseRowMatrix& h, const Eigen::VectorXcd& psi0,
                                                    const TimeGrid& grid) {
    grid.validate();
    double norm_est = 0.0;
    for (int r = 0; r < h.outerSize(); ++r) {
        double row = 0.0;
        for (SparseRowMatrix::InnerIterator it(h, r); it; ++it) row += std::abs(it.value());
        norm_est = std::max(norm_est, row);
    }
    const double max_step = norm_est > 0.0 ? 10.0 / norm_est : grid.step();
    std::vector<Eigen::VectorXcd> out;
    out.reserve(grid.n_points);
    Eigen::VectorXcd psi = psi0;
    if (grid.t_start != 0.0) psi = krylov_step(h, psi, grid.t_start);
    out.push_back(psi);
    for (int i = 1; i < grid.n_points; ++i) {
        double remaining = grid.at(i) - grid.at(i - 1);
        while (remaining > 0.0) {
            const double dt = std::min(remaining, max_step);
            psi = krylov_step(h, psi, dt);
            remaining -= dt;
        }
        out.push_back(psi);
    }
    return out;
}

inline Trajectory evolve(const Eigen::MatrixXd& h, const QuantumState& psi0, const TimeGrid& grid) {
    grid.validate();
    if (psi0.amplitudes.size() != h.rows()) throw DimensionMismatch("state does not match Hamiltonian");
    SpectralEvolution ev(h, psi0.amplitudes);
    Trajectory traj;
    traj.solver = "eigendecomposition";
    traj.times = grid.times();
    traj.states.reserve(traj.times.size());
    for (double t : traj.times) traj.states.push_back(ev.state_at(t));
    return traj;
}

// Dense eigendecomposition up to dense_limit, Lanczos above it.
inline Trajectory evolve(const SparseRowMatrix& h, const QuantumState& psi0, const TimeGrid& grid,
                         Eigen::Index dense_limit = kDenseSectorLimit) {
    if (h.rows() <= dense_limit) return evolve(Eigen::MatrixXd(h), psi0, grid);
    Eigen::MatrixXd sym_check = Eigen::MatrixXd(h.topLeftCorner(std::min<Eigen::Index>(h.rows(), 64),
                                                                std::min<Eigen::Index>(h.cols(), 64)));
    check_symmetric(sym_check);
    Trajectory traj;
    traj.solver = "lanczos";
    traj.times = grid.times();
    traj.states = krylov_evolve(h, psi0.amplitudes, grid);
    return traj;
}

// ---------------------------------------------------------------------------
// Local phase rotation

// Label convention: diag(e^{-i theta/2}, e^{+i theta/2}) on (|0>, |1>), that is
// the phase e^{+i theta m}. SpinZ is exp(-i theta S_z), the phase e^{-i theta m}.
enum class RzConvention { Label, SpinZ };

inline std::string to_string(RzConvention c) { return c == RzConvention::Label ? "label" : "spin_z"; }

// Convention under which the P2 s=1/2 peak state maps onto |psi+> for theta = -pi/2.
inline constexpr RzConvention kDefaultRzConvention = RzConvention::SpinZ;
inline constexpr double kExtractionAngle = -std::numbers::pi / 2.0;

inline QuantumState rz_on_site(const QuantumState& psi, int site, double theta,
                               RzConvention conv = kDefaultRzConvention) {
    const SectorBasis& b = *psi.basis;
    if (site < 0 || site >= b.n_sites()) throw IndexOutOfRange("rotation site " + std::to_string(site));
    const double sign = conv == RzConvention::Label ? 1.0 : -1.0;
    QuantumState out = psi;
    for (Eigen::Index i = 0; i < b.dim(); ++i) {
        const double m = b.spin().m_of(b.digit(i, site));
        out.amplitudes(i) *= std::polar(1.0, sign * theta * m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Free-fermion single-excitation path (s = 1/2)

// One-particle matrix of the XX chain: hopping J_i/2 and diagonal
// B_j - sum(B)/2, the S_z energy of an excitation on site j.
inline Eigen::MatrixXd single_excitation_hamiltonian(std::span<const double> couplings,
                                                     std::span<const double> fields) {
    const Eigen::Index n = static_cast<Eigen::Index>(fields.size());
    if (static_cast<Eigen::Index>(couplings.size()) + 1 != n) {
        throw DimensionMismatch("need n_sites - 1 couplings");
    }
    double field_sum = 0.0;
    for (double b : fields) field_sum += b;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) h(j, j) = fields[j] - 0.5 * field_sum;
    for (Eigen::Index j = 0; j + 1 < n; ++j) h(j, j + 1) = h(j + 1, j) = 0.5 * couplings[j];
    return h;
}

// exp(-i h t); column j holds the amplitudes of an excitation started on site j.
inline Eigen::MatrixXcd jw_single_excitation_propagator(std::span<const double> couplings,
                                                        std::span<const double> fields, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(single_excitation_hamiltonian(couplings, fields));
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
    const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
    return v * phases.asDiagonal() * v.transpose();
}

// ---------------------------------------------------------------------------
// Observables

// Excitation number carried by sites 1..N-2 for each basis state.
inline Eigen::VectorXd bulk_excitation_diagonal(const SectorBasis& b) {
    Eigen::VectorXd out(b.dim());
    for (Eigen::Index i = 0; i < b.dim(); ++i) {
        int n = 0;
        for (int site = 1; site + 1 < b.n_sites(); ++site) n += b.digit(i, site);
        out(i) = n;
    }
    return out;
}

inline std::vector<double> bulk_population(const Trajectory& traj, const SectorBasis& basis) {
    const Eigen::VectorXd diag = bulk_excitation_diagonal(basis);
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const auto& psi : traj.states) {
        if (psi.size() != basis.dim()) throw DimensionMismatch("trajectory does not match basis");
        out.push_back((psi.cwiseAbs2().array() * diag.array()).sum());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Peak detection: grid maximum plus three-point parabolic refinement.

struct Peak {
    std::size_t index = 0;
    double time = 0.0;
    double value = 0.0;
};

inline Peak find_peak(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size() || times.empty()) throw InvalidArgument("peak search needs matching non-empty series");
    std::size_t k = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[k]) k = i;
    }
    Peak p{k, times[k], values[k]};
    if (k == 0 || k + 1 == values.size()) return p;
    const double vm = values[k - 1], v0 = values[k], vp = values[k + 1];
    const double curvature = vm - 2.0 * v0 + vp;
    if (!(curvature < 0.0)) return p;
    const double h = 0.5 * (times[k + 1] - times[k - 1]);
    const double shift = std::clamp(0.5 * (vm - vp) / curvature, -1.0, 1.0);
    p.time = times[k] + shift * h;
    p.value = std::max(v0, v0 - 0.125 * (vm - vp) * (vm - vp) / curvature);
    return p;
}

// Refines with the exact observable at the parabolic vertex; keeps the grid
// value when the vertex does not improve on it.
inline Peak find_peak(std::span<const double> times, std::span<const double> values,
                      const std::function<double(double)>& exact) {
    Peak p = find_peak(times, values);
    if (p.time == times[p.index]) return p;
    const double v = exact(p.time);
    if (v >= values[p.index]) {
        p.value = v;
    } else {
        p.time = times[p.index];
        p.value = values[p.index];
    }
    return p;
}

}  // namespace spinent
