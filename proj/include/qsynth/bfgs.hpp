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
#include <functional>

namespace qsynth {

struct BfgsOptions {
    int max_iters = 1000;
    double grad_tol = 1e-10;    // stop when max-abs gradient entry falls below
    double armijo_c1 = 1e-4;    // sufficient-decrease constant
    double backtrack = 0.5;     // step shrink factor
    int max_backtracks = 60;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    double grad_norm = 0.0;
};

/// Quasi-Newton minimizer with inverse-Hessian BFGS updates and a
/// backtracking line search enforcing the Armijo condition. Deterministic:
/// the trajectory is a pure function of the starting point.
template <typename Objective, typename Gradient>
BfgsResult bfgs_minimize(Objective&& objective, Gradient&& gradient, Eigen::VectorXd x,
                         const BfgsOptions& opts = {}) {
    using Vec = Eigen::VectorXd;
    using Mat = Eigen::MatrixXd;

    const auto n = x.size();
    Mat h_inv = Mat::Identity(n, n);
    double fx = objective(x);
    Vec g = gradient(x);

    BfgsResult best;
    best.x = x;
    best.value = fx;

    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        const double gnorm = g.cwiseAbs().maxCoeff();
        best.grad_norm = gnorm;
        if (gnorm <= opts.grad_tol) {
            break;
        }

        Vec direction = -(h_inv * g);
        double slope = g.dot(direction);
        if (!(slope < 0.0)) {
            // Curvature information went bad; restart from steepest descent.
            h_inv.setIdentity();
            direction = -g;
            slope = -g.squaredNorm();
            if (!(slope < 0.0)) {
                break;
            }
        }

        double step = 1.0;
        double f_new = fx;
        Vec x_new = x;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            x_new = x + step * direction;
            f_new = objective(x_new);
            if (f_new <= fx + opts.armijo_c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= opts.backtrack;
        }
        if (!accepted) {
            break;  // no admissible step; treat as converged
        }

        Vec g_new = gradient(x_new);
        const Vec s = x_new - x;
        const Vec y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const Vec hy = h_inv * y;
            const double yhy = y.dot(hy);
            h_inv += ((sy + yhy) / (sy * sy)) * (s * s.transpose());
            const Mat cross = hy * s.transpose();
            h_inv -= (cross + cross.transpose()) / sy;
        }

        x = std::move(x_new);
        fx = f_new;
        g = std::move(g_new);
        if (fx < best.value) {
            best.x = x;
            best.value = fx;
        }
    }

    best.iterations = iter;
    best.grad_norm = g.cwiseAbs().maxCoeff();
    return best;
}

}  // namespace qsynth
