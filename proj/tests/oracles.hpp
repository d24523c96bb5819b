// Copyright 2026 The qsynth Authors.
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

// Test-only reference computations, kept independent of the library's own
// evaluation paths: a Taylor-series matrix exponential, a central-difference
// gradient, and textbook gate constants.

#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include "qsynth/common.hpp"

namespace oracles {

using qsynth::cplx;
using qsynth::Mat2;
using qsynth::Mat4;
using qsynth::MatX;

/// Brute-force exp(A) via 50 Taylor terms.
inline MatX taylor_expm(const MatX& a, int terms = 50) {
    MatX result = MatX::Identity(a.rows(), a.cols());
    MatX power = MatX::Identity(a.rows(), a.cols());
    double factorial = 1.0;
    for (int k = 1; k <= terms; ++k) {
        power = power * a;
        factorial *= k;
        result += power / factorial;
    }
    return result;
}

inline Mat2 pauli_x() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}

inline Mat2 pauli_y() {
    Mat2 m;
    m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    return m;
}

inline Mat2 pauli_z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

inline Mat2 hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    Mat2 m;
    m << s, s, s, -s;
    return m;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

/// Central-difference gradient with a fixed step, used to check the
/// optimizer's gradient.
inline Eigen::VectorXd central_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step = 1e-5) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double fp = f(probe);
        probe[i] = x[i] - step;
        const double fm = f(probe);
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

/// Max-absolute entry difference after aligning global phase (phase taken
/// from the largest entry of a).
inline double phase_aligned_distance(const MatX& a, const MatX& b) {
    Eigen::Index mi = 0;
    Eigen::Index mj = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (std::abs(a(i, j)) > best) {
                best = std::abs(a(i, j));
                mi = i;
                mj = j;
            }
        }
    }
    const cplx phase = b(mi, mj) / a(mi, mj);
    return (a * phase - b).cwiseAbs().maxCoeff();
}

}  // namespace oracles
