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

// lindblad.hpp: Lindblad master equation
//
//   d rho/dt = -i[H, rho] + sum_l r_l (L_l rho L_l^+ - 1/2 {L_l^+ L_l, rho})
//
// integrated with classical RK4 under step-doubling error control. The
// generator is applied matrix-free: with H_nh = H - i/2 sum r L^+L the
// right-hand side is X + X^+ + sum r L rho L^+ where X = -i H_nh rho.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "spinent/dynamics.hpp"
#include "spinent/errors.hpp"
#include "spinent/hamiltonians.hpp"
#include "spinent/measures.hpp"
#include "spinent/sector.hpp"

namespace spinent {

// Row-major so sparse-times-dense products stream contiguous rows.
using DenseRowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Representation { Sector, Full, ChainPseudomode };

inline std::string to_string(Representation r) {
    switch (r) {
        case Representation::Sector: return "sector";
        case Representation::Full: return "full";
        case Representation::ChainPseudomode: return "chain_pseudomode";
    }
    return "full";
}

struct CollapseOperator {
    SparseComplex op;
    double rate = 0.0;
    std::string label;

    bool is_diagonal() const {
        for (int r = 0; r < op.outerSize(); ++r) {
            for (SparseComplex::InnerIterator it(op, r); it; ++it) {
                if (it.row() != it.col() && it.value() != cplx(0.0)) return false;
            }
        }
        return true;
    }
};

struct OpenSystemSpec {
    SparseComplex hamiltonian;
    std::vector<CollapseOperator> collapse_ops;
    Representation representation = Representation::Full;
    // Factor dimensions of the product space (most significant first), used for
    // partial traces; the sector representation leaves this empty.
    std::vector<int> dims;
    // Index in `dims` of a truncated bosonic factor whose top level is monitored.
    std::optional<int> truncated_factor;

    Eigen::Index dim() const { return hamiltonian.rows(); }

    void validate() const {
        if (hamiltonian.rows() != hamiltonian.cols()) throw DimensionMismatch("Hamiltonian is not square");
        const SparseComplex diff = SparseComplex(hamiltonian.adjoint()) - hamiltonian;
        for (int r = 0; r < diff.outerSize(); ++r) {
            for (SparseComplex::InnerIterator it(diff, r); it; ++it) {
                if (std::abs(it.value()) > 1e-12) throw NonHermitian("open-system Hamiltonian");
            }
        }
        for (const auto& c : collapse_ops) {
            if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) throw InvalidArgument("collapse rate must be >= 0");
            if (c.op.rows() != dim() || c.op.cols() != dim()) {
                throw DimensionMismatch("collapse operator " + c.label + " does not match the Hamiltonian");
            }
        }
        if (!dims.empty()) {
            Eigen::Index prod = 1;
            for (int d : dims) prod *= d;
            if (prod != dim()) throw DimensionMismatch("factor dims do not multiply to the system dimension");
        }
        if (truncated_factor && (*truncated_factor < 0 || *truncated_factor >= static_cast<int>(dims.size()))) {
            throw IndexOutOfRange("truncated factor index");
        }
    }
};

// ---------------------------------------------------------------------------
// Generator

class LindbladGenerator {
public:
    explicit LindbladGenerator(const OpenSystemSpec& spec) {
        spec.validate();
        dim_ = spec.dim();
        SparseComplex h_nh = spec.hamiltonian;
        for (const auto& c : spec.collapse_ops) {
            if (c.rate == 0.0) continue;
            const SparseComplex ldl = SparseComplex(c.op.adjoint()) * c.op;
            h_nh -= cplx(0.0, 0.5 * c.rate) * ldl;
            if (c.is_diagonal()) {
                diag_jumps_.push_back(std::sqrt(c.rate) * Eigen::VectorXcd(c.op.diagonal()));
            } else {
                const SparseComplex l = std::sqrt(c.rate) * c.op;
                general_jumps_.push_back({l, SparseComplex(l.adjoint())});
            }
        }
        minus_i_h_ = cplx(0.0, -1.0) * h_nh;
        minus_i_h_.makeCompressed();
        // Diagonal jumps combine into one elementwise weight W_ij = sum l_i conj(l_j).
        if (!diag_jumps_.empty()) {
            diag_weight_ = DenseRowMatrix::Zero(dim_, dim_);
            for (const auto& l : diag_jumps_) diag_weight_.noalias() += l * l.adjoint();
        }
    }

    Eigen::Index dim() const { return dim_; }

    void apply(const DenseRowMatrix& rho, DenseRowMatrix& out) const {
        x_.noalias() = minus_i_h_ * rho;
        out.resize(dim_, dim_);
        // out = X + X^+, walking the upper triangle once.
        for (Eigen::Index i = 0; i < dim_; ++i) {
            out(i, i) = cplx(2.0 * x_(i, i).real(), 0.0);
            for (Eigen::Index j = i + 1; j < dim_; ++j) {
                const cplx v = x_(i, j) + std::conj(x_(j, i));
                out(i, j) = v;
                out(j, i) = std::conj(v);
            }
        }
        if (!diag_jumps_.empty()) out += diag_weight_.cwiseProduct(rho);
        for (const auto& j : general_jumps_) {
            y_.noalias() = j.l * rho;
            out.noalias() += y_ * j.l_dag;
        }
    }

private:
    struct GeneralJump {
        SparseComplex l;
        SparseComplex l_dag;
    };
    Eigen::Index dim_ = 0;
    SparseComplex minus_i_h_;  // -i (H - i/2 sum r L^+L)
    std::vector<Eigen::VectorXcd> diag_jumps_;
    DenseRowMatrix diag_weight_;
    std::vector<GeneralJump> general_jumps_;
    mutable DenseRowMatrix x_, y_;
};

// ---------------------------------------------------------------------------
// Integrator

struct IntegratorOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    double initial_step = 1e-3;
    double min_step = 1e-12;
    double max_step = 1.0;
    long max_steps = 50'000'000;
    double positivity_tol = 1e-6;
    // Grid points at which the minimum eigenvalue is computed; 0 checks all.
    int eigen_checks = 0;
    bool keep_states = false;
};

struct OpenDiagnostics {
    double max_trace_drift = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 1.0;
    double max_truncation_leak = 0.0;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

struct OpenTrajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> states;
    std::vector<double> truncation_leak;
    OpenDiagnostics diagnostics;
};

using OpenObserver = std::function<void(std::size_t index, double t, const Eigen::MatrixXcd& rho)>;

namespace detail {

inline double truncation_leak(const OpenSystemSpec& spec, const DenseRowMatrix& rho) {
    if (!spec.truncated_factor) return 0.0;
    const int f = *spec.truncated_factor;
    Eigen::Index place = 1;
    for (int k = static_cast<int>(spec.dims.size()) - 1; k > f; --k) place *= spec.dims[k];
    const int top = spec.dims[f] - 1;
    double leak = 0.0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        if ((i / place) % spec.dims[f] == top) leak += rho(i, i).real();
    }
    return leak;
}

inline void rk4(const LindbladGenerator& g, const DenseRowMatrix& y, const DenseRowMatrix& k1, double h,
                DenseRowMatrix& out, DenseRowMatrix& k2, DenseRowMatrix& k3, DenseRowMatrix& k4,
                DenseRowMatrix& tmp) {
    tmp = y + (0.5 * h) * k1;
    g.apply(tmp, k2);
    tmp = y + (0.5 * h) * k2;
    g.apply(tmp, k3);
    tmp = y + h * k3;
    g.apply(tmp, k4);
    out = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

inline OpenTrajectory evolve_lindblad(const OpenSystemSpec& spec, const Eigen::MatrixXcd& rho0, const TimeGrid& grid,
                                      const IntegratorOptions& opt = {}, const OpenObserver& observer = {}) {
    grid.validate();
    if (grid.t_start != 0.0) throw InvalidArgument("open evolution starts at t = 0");
    const LindbladGenerator gen(spec);
    if (rho0.rows() != gen.dim() || rho0.cols() != gen.dim()) {
        throw DimensionMismatch("initial density matrix does not match the system");
    }
    if (std::abs(rho0.trace() - cplx(1.0)) > 1e-9) throw InvalidArgument("initial density matrix trace is not 1");

    OpenTrajectory traj;
    traj.times = grid.times();
    DenseRowMatrix y = rho0;
    DenseRowMatrix k1, k2, k3, k4, tmp, full, half, two_half;
    const int n = grid.n_points;
    const int checks = opt.eigen_checks <= 0 ? n : std::min(opt.eigen_checks, n);
    const int stride = std::max(1, (n - 1) / std::max(1, checks - 1));

    auto record = [&](int i) {
        const double trace_drift = std::abs(y.trace() - cplx(1.0));
        traj.diagnostics.max_trace_drift = std::max(traj.diagnostics.max_trace_drift, trace_drift);
        const double leak = detail::truncation_leak(spec, y);
        traj.truncation_leak.push_back(leak);
        traj.diagnostics.max_truncation_leak = std::max(traj.diagnostics.max_truncation_leak, leak);
        const Eigen::MatrixXcd rho = y;
        if (i % stride == 0 || i == n - 1) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
            const double mn = es.eigenvalues().minCoeff();
            traj.diagnostics.min_eigenvalue = std::min(traj.diagnostics.min_eigenvalue, mn);
            if (mn < -opt.positivity_tol) {
                throw PositivityViolation("minimum eigenvalue " + std::to_string(mn) + " at t = " +
                                          std::to_string(traj.times[i]));
            }
        }
        if (opt.keep_states) traj.states.push_back(rho);
        if (observer) observer(static_cast<std::size_t>(i), traj.times[i], rho);
    };

    record(0);
    double t = 0.0;
    double h = std::min(opt.initial_step, opt.max_step);
    long steps = 0;
    for (int i = 1; i < n; ++i) {
        const double target = traj.times[i];
        while (t < target) {
            if (++steps > opt.max_steps) throw ToleranceFailure("step budget exhausted");
            bool last = false;
            double step = h;
            if (t + step >= target) {
                step = target - t;
                last = true;
            }
            gen.apply(y, k1);
            detail::rk4(gen, y, k1, step, full, k2, k3, k4, tmp);
            detail::rk4(gen, y, k1, 0.5 * step, half, k2, k3, k4, tmp);
            gen.apply(half, k1);
            detail::rk4(gen, half, k1, 0.5 * step, two_half, k2, k3, k4, tmp);
            const double scale = opt.atol + opt.rtol * std::max(y.cwiseAbs().maxCoeff(), two_half.cwiseAbs().maxCoeff());
            const double err = (two_half - full).cwiseAbs().maxCoeff() / 15.0 / scale;
            if (err <= 1.0) {
                y = two_half + (two_half - full) / 15.0;
                const DenseRowMatrix herm = 0.5 * (y + y.adjoint());
                traj.diagnostics.max_hermiticity_error =
                    std::max(traj.diagnostics.max_hermiticity_error, 0.5 * (y - y.adjoint()).cwiseAbs().maxCoeff());
                y = herm;
                t = last ? target : t + step;
                ++traj.diagnostics.accepted_steps;
                const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 4.0;
                // A short final step to hit the grid should not shrink the next one.
                if (!(last && step < h)) h = step * std::clamp(grow, 0.2, 4.0);
                h = std::min(h, opt.max_step);
                continue;
            }
            ++traj.diagnostics.rejected_steps;
            const double shrink = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.1;
            h = step * shrink;
            if (h < opt.min_step) {
                throw ToleranceFailure("step size fell below " + std::to_string(opt.min_step) + " at t = " +
                                       std::to_string(t));
            }
        }
        record(i);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Local dephasing

// One S_z collapse operator per site at rate gamma, in the magnetization
// sector of `basis` (S_z conserves the sector).
inline OpenSystemSpec dephasing_spec(const ChainSpec& chain, const SectorBasis& basis, double gamma) {
    if (!(gamma >= 0.0)) throw InvalidArgument("dephasing rate must be >= 0");
    OpenSystemSpec s;
    s.representation = Representation::Sector;
    s.hamiltonian = project_to_sector_sparse(xx_chain(chain), basis).cast<cplx>();
    for (int site = 0; site < chain.n_sites; ++site) {
        const SparseRowMatrix sz = project_to_sector_sparse({{1.0, {{site, LocalOp::Sz}}}}, basis);
        s.collapse_ops.push_back({sz.cast<cplx>(), gamma, "sz_" + std::to_string(site)});
    }
    return s;
}

// Same model in the full product space, for small-N cross-checks.
inline OpenSystemSpec dephasing_spec_full(const ChainSpec& chain, double gamma) {
    if (!(gamma >= 0.0)) throw InvalidArgument("dephasing rate must be >= 0");
    OpenSystemSpec s;
    s.representation = Representation::Full;
    s.hamiltonian = build_full_space_sparse(xx_chain(chain), chain.n_sites, chain.spin);
    s.dims.assign(chain.n_sites, chain.spin.local_dim());
    for (int site = 0; site < chain.n_sites; ++site) {
        s.collapse_ops.push_back({build_full_space_sparse({{1.0, {{site, LocalOp::Sz}}}}, chain.n_sites, chain.spin),
                                  gamma, "sz_" + std::to_string(site)});
    }
    return s;
}

// ---------------------------------------------------------------------------
// Pseudomode embedding of a Lorentzian environment

struct PseudomodeSpec {
    double omega_a = 0.0;  // pseudomode frequency
    double g = 0.1;        // system-mode coupling
    double kappa = 1.0;    // mode decay rate, also the Lorentzian half width
    int n_max = 3;         // highest Fock level kept, |0> .. |n_max>

    int levels() const { return n_max + 1; }

    void validate() const {
        if (!(kappa > 0.0)) throw InvalidArgument("kappa must be > 0");
        if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
        if (!std::isfinite(g) || !std::isfinite(omega_a)) throw InvalidArgument("non-finite pseudomode parameter");
    }
    double tau_c() const { return 1.0 / kappa; }
};

inline constexpr Eigen::Index kPseudomodeDimBudget = 1024;

// gamma(omega) = (1/pi) g^2 kappa / ((omega - omega_a)^2 + kappa^2); integrates to g^2.
inline double lorentzian(double omega, const PseudomodeSpec& pm) {
    const double x = omega - pm.omega_a;
    return pm.g * pm.g * pm.kappa / (std::numbers::pi * (x * x + pm.kappa * pm.kappa));
}

inline SparseComplex sparse_kron(const SparseComplex& a, const SparseComplex& b) {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int ra = 0; ra < a.outerSize(); ++ra) {
        for (SparseComplex::InnerIterator ia(a, ra); ia; ++ia) {
            for (int rb = 0; rb < b.outerSize(); ++rb) {
                for (SparseComplex::InnerIterator ib(b, rb); ib; ++ib) {
                    trip.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                                      static_cast<int>(ia.col() * b.cols() + ib.col()), ia.value() * ib.value());
                }
            }
        }
    }
    SparseComplex out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

inline SparseComplex sparse_identity(Eigen::Index n) {
    SparseComplex id(n, n);
    id.setIdentity();
    return id;
}

// Truncated annihilation operator on levels 0..n_max.
inline SparseComplex annihilation(int n_max) {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int n = 1; n <= n_max; ++n) trip.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    SparseComplex a(n_max + 1, n_max + 1);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

// L = sum_i (S^z_i + S^x_i) on the chain.
inline SparseComplex pseudomode_system_operator(const ChainSpec& chain) {
    OperatorSum l;
    for (int i = 0; i < chain.n_sites; ++i) {
        l.push_back({1.0, {{i, LocalOp::Sz}}});
        l.push_back({1.0, {{i, LocalOp::Sx}}});
    }
    return build_full_space_sparse(l, chain.n_sites, chain.spin);
}

inline void check_pseudomode_budget(const ChainSpec& chain, const PseudomodeSpec& pm) {
    check_full_space_budget(chain.n_sites, chain.spin.local_dim());
    const Eigen::Index dim = full_space_dim(chain.n_sites, chain.spin.local_dim()) * pm.levels();
    if (dim > kPseudomodeDimBudget) {
        throw DimensionBudgetExceeded("chain x pseudomode dimension " + std::to_string(dim) + " exceeds " +
                                      std::to_string(kPseudomodeDimBudget));
    }
}

// H = H_chain x I + omega_a I x a^+a + g (L x a^+ + L^+ x a), collapse sqrt(kappa) I x a.
// Factor order: chain sites, then the mode (least significant).
inline OpenSystemSpec pseudomode_system(const ChainSpec& chain, const PseudomodeSpec& pm) {
    pm.validate();
    check_pseudomode_budget(chain, pm);
    const SparseComplex h_chain = build_full_space_sparse(xx_chain(chain), chain.n_sites, chain.spin);
    const SparseComplex l = pseudomode_system_operator(chain);
    const SparseComplex a = annihilation(pm.n_max);
    const SparseComplex a_dag = a.adjoint();
    const SparseComplex id_chain = sparse_identity(h_chain.rows());
    const SparseComplex id_mode = sparse_identity(pm.levels());
    OpenSystemSpec s;
    s.representation = Representation::ChainPseudomode;
    SparseComplex h = sparse_kron(h_chain, id_mode);
    if (pm.omega_a != 0.0) h += pm.omega_a * sparse_kron(id_chain, SparseComplex(a_dag * a));
    if (pm.g != 0.0) {
        h += pm.g * (sparse_kron(l, a_dag) + sparse_kron(SparseComplex(l.adjoint()), a));
    }
    h.makeCompressed();
    s.hamiltonian = h;
    s.collapse_ops.push_back({sparse_kron(id_chain, a), pm.kappa, "mode"});
    s.dims.assign(chain.n_sites, chain.spin.local_dim());
    s.dims.push_back(pm.levels());
    s.truncated_factor = chain.n_sites;
    return s;
}

// Full-space Lindblad run with collapse operator L at a given rate; the
// Markovian reference for the pseudomode model.
inline OpenSystemSpec markovian_reference(const ChainSpec& chain, double rate) {
    OpenSystemSpec s;
    s.representation = Representation::Full;
    s.hamiltonian = build_full_space_sparse(xx_chain(chain), chain.n_sites, chain.spin);
    s.collapse_ops.push_back({pseudomode_system_operator(chain), rate, "L"});
    s.dims.assign(chain.n_sites, chain.spin.local_dim());
    return s;
}

// Rate of the Lindblad equation obtained by eliminating a fast mode, quoted
// for the Lorentzian with half width kappa.
inline double markovian_rate(const PseudomodeSpec& pm) { return 2.0 * pm.g * pm.g / pm.kappa; }

// Rate produced by eliminating the mode from this master equation, in which
// kappa multiplies the full mode dissipator.
inline double eliminated_mode_rate(const PseudomodeSpec& pm) { return 4.0 * pm.g * pm.g / pm.kappa; }

// ---------------------------------------------------------------------------
// Initial states and observables in open representations

inline Eigen::MatrixXcd pure_density(const Eigen::VectorXcd& psi) { return psi * psi.adjoint(); }

inline Eigen::VectorXcd pseudomode_initial_state(const ChainSpec& chain, const PseudomodeSpec& pm) {
    const QuantumState psi = initial_state(chain);
    const Eigen::VectorXcd full = lift_to_full(*psi.basis, psi.amplitudes);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(full.size() * pm.levels());
    for (Eigen::Index i = 0; i < full.size(); ++i) out(i * pm.levels()) = full(i);
    return out;
}

// Partition keeping the first and last chain site of a product-space spec.
inline TracePartition boundary_partition(const OpenSystemSpec& spec, int n_sites) {
    if (spec.dims.empty()) throw InvalidArgument("product-space spec required");
    return mixed_radix_partition(spec.dims, {0, n_sites - 1});
}

}  // namespace spinent
