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

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qsynth {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;

/// Input that failed structural validation (bad JSON, bad schema, bad value).
class parse_error : public std::runtime_error {
  public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

/// A requested resource (instruction set, file entry) does not exist.
class not_found_error : public std::runtime_error {
  public:
    explicit not_found_error(const std::string& what) : std::runtime_error(what) {}
};

/// A size/iteration budget was exhausted (layer cap, qubit cap).
class capacity_error : public std::runtime_error {
  public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// A two-qubit op acts on a qubit pair that is not an edge of the device.
class connectivity_error : public std::runtime_error {
  public:
    explicit connectivity_error(const std::string& what) : std::runtime_error(what) {}
};

/// A gate kind has no fidelity entry on the edge it is needed on.
class missing_calibration_error : public std::runtime_error {
  public:
    explicit missing_calibration_error(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem-level failure (unreadable input, unwritable output).
class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Max-absolute-entry deviation of U†U from the identity.
template <typename Derived>
double unitarity_deviation(const Eigen::MatrixBase<Derived>& u) {
    if (u.rows() != u.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    MatX residual = u.adjoint() * u;
    residual -= MatX::Identity(u.rows(), u.cols());
    return residual.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = 1e-12) {
    return unitarity_deviation(u) <= tol;
}

inline void require_finite_angle(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be a finite angle");
    }
}

/// Kronecker product of two single-qubit matrices. The first factor acts on
/// the first (more significant) qubit of the pair.
inline Mat4 kron22(const Mat2& a, const Mat2& b) {
    Mat4 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace qsynth
