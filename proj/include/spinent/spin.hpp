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

// spin.hpp: spin-s operator matrices and tensor-product embedding.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "spinent/errors.hpp"

namespace spinent {

using cplx = std::complex<double>;

// Spin magnitude stored as the integer 2s. Local basis index n labels
// |m = -s + n>, so index 0 is the lowest S_z eigenstate.
class SpinValue {
public:
    static SpinValue from_twice(int twice_s) {
        if (twice_s < 1 || twice_s > 3) {
            throw UnsupportedSpin("2s = " + std::to_string(twice_s) + " (allowed: 1, 2, 3)");
        }
        return SpinValue(twice_s);
    }

    static SpinValue from_double(double s) {
        const double twice = 2.0 * s;
        const long rounded = std::lround(twice);
        if (std::abs(twice - static_cast<double>(rounded)) > 1e-9) {
            throw UnsupportedSpin("s = " + std::to_string(s) + " is not a half-integer");
        }
        return from_twice(static_cast<int>(rounded));
    }

    int twice() const { return twice_s_; }
    double value() const { return 0.5 * twice_s_; }
    int local_dim() const { return twice_s_ + 1; }
    // Largest local excitation number (index of |m = +s>).
    int max_excitation() const { return twice_s_; }
    double m_of(int index) const { return -value() + index; }

    std::string label() const {
        return twice_s_ % 2 == 0 ? std::to_string(twice_s_ / 2) : std::to_string(twice_s_) + "/2";
    }

    friend bool operator==(SpinValue a, SpinValue b) { return a.twice_s_ == b.twice_s_; }

private:
    explicit SpinValue(int twice_s) : twice_s_(twice_s) {}
    int twice_s_;
};

struct SpinOperators {
    Eigen::MatrixXcd sx, sy, sz, s_plus, s_minus;
};

// Standard angular-momentum matrices, hbar = 1.
inline SpinOperators spin_matrices(SpinValue spin) {
    const int d = spin.local_dim();
    const double s = spin.value();
    SpinOperators ops;
    ops.sz = Eigen::MatrixXcd::Zero(d, d);
    ops.s_plus = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n < d; ++n) {
        const double m = spin.m_of(n);
        ops.sz(n, n) = m;
        if (n + 1 < d) {
            ops.s_plus(n + 1, n) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
        }
    }
    ops.s_minus = ops.s_plus.adjoint();
    ops.sx = 0.5 * (ops.s_plus + ops.s_minus);
    ops.sy = cplx(0.0, -0.5) * (ops.s_plus - ops.s_minus);
    return ops;
}

// Full-space representations are reserved for oracles and small systems.
inline constexpr double kFullSpaceQubitBudget = 16.0;

inline std::int64_t full_space_dim(int n_sites, int local_dim) {
    std::int64_t dim = 1;
    for (int i = 0; i < n_sites; ++i) dim *= local_dim;
    return dim;
}

inline void check_full_space_budget(int n_sites, int local_dim) {
    const double qubits = n_sites * std::log2(static_cast<double>(local_dim));
    if (qubits > kFullSpaceQubitBudget + 1e-12) {
        throw DimensionBudgetExceeded("full space of " + std::to_string(n_sites) + " sites with d=" +
                                      std::to_string(local_dim) + " exceeds 2^16");
    }
}

// I x ... x op x ... x I with op on `site`; site 0 is the most significant factor.
inline Eigen::MatrixXcd embed_local(const Eigen::MatrixXcd& op, int site, int n_sites,
                                    SpinValue spin) {
    const int d = spin.local_dim();
    if (op.rows() != d || op.cols() != d) {
        throw DimensionMismatch("local operator is " + std::to_string(op.rows()) + "x" +
                                std::to_string(op.cols()) + ", expected d=" + std::to_string(d));
    }
    if (site < 0 || site >= n_sites) {
        throw IndexOutOfRange("site " + std::to_string(site) + " not in [0, " +
                              std::to_string(n_sites) + ")");
    }
    check_full_space_budget(n_sites, d);
    const Eigen::Index left = full_space_dim(site, d);
    const Eigen::Index right = full_space_dim(n_sites - site - 1, d);
    const Eigen::Index dim = left * d * right;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index l = 0; l < left; ++l) {
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                const cplx v = op(a, b);
                if (v == cplx(0.0)) continue;
                for (Eigen::Index r = 0; r < right; ++r) {
                    out((l * d + a) * right + r, (l * d + b) * right + r) = v;
                }
            }
        }
    }
    return out;
}

}  // namespace spinent
