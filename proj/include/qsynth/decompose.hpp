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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsynth/bfgs.hpp"
#include "qsynth/common.hpp"
#include "qsynth/gates.hpp"
#include "qsynth/json_io.hpp"
#include "qsynth/parallel.hpp"
#include "qsynth/rng.hpp"

namespace qsynth {

/// Layered synthesis circuit: i two-qubit gate layers, each sandwiched by
/// single-qubit layers of one U3 per qubit,
///
///   U = L_i G_i L_{i-1} ... G_1 L_0,   L_k = U3 (x) U3.
///
/// Parameter layout: params[6k .. 6k+2] is the U3 triple of the first qubit
/// in layer k, params[6k+3 .. 6k+5] the second qubit's. In the continuous
/// modes the two-qubit angles follow the U3 block: (theta_k, phi_k) per
/// layer for FullFSim, theta_k per layer for FullXY.
struct Template {
    enum class Mode { FixedGate, ContinuousFSim, ContinuousXY };

    Mode mode = Mode::FixedGate;
    int layers = 0;
    GateKind gate;  // meaningful in FixedGate mode only
    std::vector<double> params;

    static int param_count(Mode mode, int layers) {
        int n = 6 * (layers + 1);
        if (mode == Mode::ContinuousFSim) {
            n += 2 * layers;
        } else if (mode == Mode::ContinuousXY) {
            n += layers;
        }
        return n;
    }

    int param_count() const { return param_count(mode, layers); }

    U3Params u3_at(int layer, int qubit_slot) const {
        const int base = 6 * layer + 3 * qubit_slot;
        return {params[base], params[base + 1], params[base + 2]};
    }

    /// Two-qubit gate of layer k (1-based, k = 1..layers).
    GateKind gate_at(int k) const {
        switch (mode) {
            case Mode::FixedGate:
                return gate;
            case Mode::ContinuousFSim: {
                const int off = 6 * (layers + 1) + 2 * (k - 1);
                return GateKind::fsim(params[off], params[off + 1]);
            }
            case Mode::ContinuousXY: {
                const int off = 6 * (layers + 1) + (k - 1);
                return GateKind::fsim(params[off], 0.0);
            }
        }
        throw std::logic_error("unreachable");
    }
};

inline Mat4 build_template_unitary(const Template& t) {
    if (t.layers < 0) {
        throw std::invalid_argument("build_template_unitary: negative layer count");
    }
    if (static_cast<int>(t.params.size()) != t.param_count()) {
        throw std::invalid_argument("build_template_unitary: expected " +
                                    std::to_string(t.param_count()) + " parameters, got " +
                                    std::to_string(t.params.size()));
    }
    Mat4 u = kron22(u3_matrix(t.u3_at(0, 0)), u3_matrix(t.u3_at(0, 1)));
    for (int k = 1; k <= t.layers; ++k) {
        u = t.gate_at(k).matrix() * u;
        u = kron22(u3_matrix(t.u3_at(k, 0)), u3_matrix(t.u3_at(k, 1))) * u;
    }
    return u;
}

struct OptimizerConfig {
    int max_layers = 10;            // layer-growth cap of the exact search
    int restarts = 10;              // independent optimizations per layer count
    double grad_step = 1e-7;        // finite-difference step (CentralDiff mode)
    double conv_tol = 1e-10;        // gradient-norm stopping threshold
    int max_iters = 1000;           // iteration cap per restart
    double exact_infidelity = 1e-6; // threshold of the exact search
    std::uint64_t rng_seed = 0;
    int parallelism = 1;            // width used for restart batches

    enum class GradMode { Analytic, CentralDiff };
    GradMode grad_mode = GradMode::Analytic;

    void validate() const {
        if (max_layers < 0) throw std::invalid_argument("max_layers must be >= 0");
        if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
        if (!(exact_infidelity > 0.0 && exact_infidelity < 1.0)) {
            throw std::invalid_argument("exact_infidelity must lie in (0, 1)");
        }
        if (!(grad_step > 0.0)) throw std::invalid_argument("grad_step must be positive");
        if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    }
};

/// Result of a synthesis run. f_d is the decomposition fidelity against the
/// stored target, f_h the hardware fidelity estimate of the chosen gates,
/// and f_u = f_d * f_h the combined objective.
struct Decomposition {
    Template tmpl;
    Mat4 target;
    double f_d = 0.0;
    double f_h = 1.0;
    double f_u = 0.0;
    int two_qubit_count = 0;
};

/// Layer-growth search exhausted its cap; carries the best attempt found.
class decomposition_capacity_error : public capacity_error {
  public:
    decomposition_capacity_error(const std::string& what, Decomposition best_found)
        : capacity_error(what), best(std::move(best_found)) {}

    Decomposition best;
};

namespace detail {

inline constexpr std::uint64_t kFullFSimKey = 0x66736D66616D696CULL;
inline constexpr std::uint64_t kFullXYKey = 0x787966616D696C79ULL;

/// Objective 1 - |Tr(U(x)† T)| / 4 over the template angles, with an
/// analytic gradient assembled from per-factor derivatives: for each factor
/// F_j of the product U = F_m ... F_0, d<U,T> / dp = <dF_j, W_j> with
/// W_j = P_j† T S_j† built from the prefix/suffix partial products.
class TemplateObjective {
  public:
    TemplateObjective(const Mat4& target, Template::Mode mode, int layers, const GateKind& gate)
        : target_(target), mode_(mode), layers_(layers) {
        if (mode == Template::Mode::FixedGate) {
            fixed_gate_ = gate.matrix();
        }
        const std::size_t factor_count = 2 * static_cast<std::size_t>(layers) + 1;
        factors_.resize(factor_count);
        suffix_.resize(factor_count);
        u3_cache_.resize(2 * static_cast<std::size_t>(layers + 1));
        gate_theta_.resize(static_cast<std::size_t>(layers));
        gate_phi_.resize(static_cast<std::size_t>(layers));
    }

    int param_count() const { return Template::param_count(mode_, layers_); }

    double value(const Eigen::VectorXd& x) {
        build_factors(x);
        Mat4 u = factors_[0];
        for (std::size_t j = 1; j < factors_.size(); ++j) {
            u = factors_[j] * u;
        }
        const cplx z = (u.adjoint() * target_).trace();
        return 1.0 - std::abs(z) / 4.0;
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& x) {
        build_factors(x);
        const std::size_t m = factors_.size();

        suffix_[0] = Mat4::Identity();
        for (std::size_t j = 1; j < m; ++j) {
            suffix_[j] = factors_[j - 1] * suffix_[j - 1];
        }
        const Mat4 u = factors_[m - 1] * suffix_[m - 1];
        const cplx z = (u.adjoint() * target_).trace();

        Eigen::VectorXd grad = Eigen::VectorXd::Zero(param_count());
        const double zabs = std::abs(z);
        if (zabs < 1e-300) {
            return grad;  // objective is non-smooth at z = 0; subgradient 0
        }
        const cplx zbar_over = std::conj(z) / (4.0 * zabs);

        Mat4 prefix = Mat4::Identity();
        for (std::size_t jj = m; jj-- > 0;) {
            const Mat4 w = prefix.adjoint() * target_ * suffix_[jj].adjoint();
            if (jj % 2 == 0) {
                accumulate_u3_layer(static_cast<int>(jj / 2), w, zbar_over, grad, x);
            } else {
                accumulate_gate_layer(static_cast<int>((jj + 1) / 2), w, zbar_over, grad);
            }
            prefix = prefix * factors_[jj];
        }
        return grad;
    }

  private:
    void build_factors(const Eigen::VectorXd& x) {
        for (int layer = 0; layer <= layers_; ++layer) {
            for (int slot = 0; slot < 2; ++slot) {
                const int base = 6 * layer + 3 * slot;
                u3_cache_[2 * layer + slot] = u3_matrix(x[base], x[base + 1], x[base + 2]);
            }
            factors_[2 * static_cast<std::size_t>(layer)] =
                kron22(u3_cache_[2 * layer], u3_cache_[2 * layer + 1]);
        }
        for (int k = 1; k <= layers_; ++k) {
            double theta;
            double phi;
            if (mode_ == Template::Mode::FixedGate) {
                factors_[2 * static_cast<std::size_t>(k) - 1] = fixed_gate_;
                continue;
            }
            if (mode_ == Template::Mode::ContinuousFSim) {
                const int off = 6 * (layers_ + 1) + 2 * (k - 1);
                theta = x[off];
                phi = x[off + 1];
            } else {
                const int off = 6 * (layers_ + 1) + (k - 1);
                theta = x[off];
                phi = 0.0;
            }
            gate_theta_[k - 1] = theta;
            gate_phi_[k - 1] = phi;
            factors_[2 * static_cast<std::size_t>(k) - 1] = fsim_matrix(theta, phi);
        }
    }

    /// <A (x) B, W> for all three derivatives of one U3 via the partial
    /// contraction C_ij = sum_kl conj(B_kl) W[2i+k, 2j+l].
    static Mat2 contract_right(const Mat2& b, const Mat4& w) {
        Mat2 c;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                cplx acc = 0.0;
                for (int k = 0; k < 2; ++k) {
                    for (int l = 0; l < 2; ++l) {
                        acc += std::conj(b(k, l)) * w(2 * i + k, 2 * j + l);
                    }
                }
                c(i, j) = acc;
            }
        }
        return c;
    }

    static Mat2 contract_left(const Mat2& a, const Mat4& w) {
        Mat2 c;
        for (int k = 0; k < 2; ++k) {
            for (int l = 0; l < 2; ++l) {
                cplx acc = 0.0;
                for (int i = 0; i < 2; ++i) {
                    for (int j = 0; j < 2; ++j) {
                        acc += std::conj(a(i, j)) * w(2 * i + k, 2 * j + l);
                    }
                }
                c(k, l) = acc;
            }
        }
        return c;
    }

    static void u3_derivatives(double alpha, double beta, double lambda, Mat2 out[3]) {
        const double c = std::cos(alpha / 2.0);
        const double s = std::sin(alpha / 2.0);
        const cplx eb = std::polar(1.0, beta);
        const cplx el = std::polar(1.0, lambda);
        const cplx i1(0.0, 1.0);
        out[0] << -0.5 * s, -0.5 * el * c,  //
            0.5 * eb * c, -0.5 * eb * el * s;
        out[1] << 0.0, 0.0,  //
            i1 * eb * s, i1 * eb * el * c;
        out[2] << 0.0, -i1 * el * s,  //
            0.0, i1 * eb * el * c;
    }

    void accumulate_u3_layer(int layer, const Mat4& w, const cplx& zbar_over,
                             Eigen::VectorXd& grad, const Eigen::VectorXd& x) {
        const Mat2& ua = u3_cache_[2 * layer];
        const Mat2& ub = u3_cache_[2 * layer + 1];
        Mat2 deriv[3];

        const Mat2 ca = contract_right(ub, w);  // pair with derivatives of the first qubit
        const int base_a = 6 * layer;
        u3_derivatives(x[base_a], x[base_a + 1], x[base_a + 2], deriv);
        for (int m = 0; m < 3; ++m) {
            cplx dz = 0.0;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    dz += std::conj(deriv[m](i, j)) * ca(i, j);
                }
            }
            grad[base_a + m] = -(zbar_over * dz).real();
        }

        const Mat2 cb = contract_left(ua, w);  // pair with derivatives of the second qubit
        const int base_b = 6 * layer + 3;
        u3_derivatives(x[base_b], x[base_b + 1], x[base_b + 2], deriv);
        for (int m = 0; m < 3; ++m) {
            cplx dz = 0.0;
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    dz += std::conj(deriv[m](k, l)) * cb(k, l);
                }
            }
            grad[base_b + m] = -(zbar_over * dz).real();
        }
    }

    void accumulate_gate_layer(int k, const Mat4& w, const cplx& zbar_over,
                               Eigen::VectorXd& grad) {
        if (mode_ == Template::Mode::FixedGate) {
            return;
        }
        const double theta = gate_theta_[k - 1];
        const double phi = gate_phi_[k - 1];
        const cplx i1(0.0, 1.0);

        // d/dtheta touches the middle 2x2 block only.
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        cplx dz_theta = std::conj(cplx(-st, 0.0)) * (w(1, 1) + w(2, 2)) +
                        std::conj(-i1 * ct) * (w(1, 2) + w(2, 1));
        if (mode_ == Template::Mode::ContinuousFSim) {
            const int off = 6 * (layers_ + 1) + 2 * (k - 1);
            grad[off] = -(zbar_over * dz_theta).real();
            const cplx dphi = -i1 * std::polar(1.0, -phi);
            const cplx dz_phi = std::conj(dphi) * w(3, 3);
            grad[off + 1] = -(zbar_over * dz_phi).real();
        } else {
            const int off = 6 * (layers_ + 1) + (k - 1);
            grad[off] = -(zbar_over * dz_theta).real();
        }
    }

    Mat4 target_;
    Template::Mode mode_;
    int layers_;
    Mat4 fixed_gate_;
    std::vector<Mat4> factors_;
    std::vector<Mat4> suffix_;
    std::vector<Mat2> u3_cache_;
    std::vector<double> gate_theta_;
    std::vector<double> gate_phi_;
};

inline void require_decomposable_target(const Mat4& target) {
    const double dev = unitarity_deviation(target);
    if (dev > 1e-8) {
        throw std::invalid_argument("target is not unitary (deviation " + std::to_string(dev) + ")");
    }
}

/// Seeds depend on the gate content (canonical angles), not on list
/// positions, so the same (target, gate, layers) request yields bit-equal
/// results from every search that embeds it.
inline std::uint64_t restart_seed_base(const OptimizerConfig& cfg, std::uint64_t gate_or_family_key,
                                       int layers) {
    return derive_seed(derive_seed(cfg.rng_seed, gate_or_family_key),
                       static_cast<std::uint64_t>(layers));
}

inline Decomposition optimize_layers(const Mat4& target, Template::Mode mode, const GateKind& gate,
                                     std::uint64_t gate_or_family_key, int layers,
                                     const OptimizerConfig& cfg) {
    cfg.validate();
    require_decomposable_target(target);
    if (layers < 0) {
        throw std::invalid_argument("layer count must be >= 0");
    }

    const int nparams = Template::param_count(mode, layers);
    const std::uint64_t base = restart_seed_base(cfg, gate_or_family_key, layers);

    struct RestartOutcome {
        double value = std::numeric_limits<double>::infinity();
        Eigen::VectorXd x;
    };
    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));

    parallel_for(static_cast<std::size_t>(cfg.restarts), cfg.parallelism, [&](std::size_t r) {
        SplitMix64 rng(derive_seed(base, r));
        Eigen::VectorXd x0(nparams);
        for (int p = 0; p < nparams; ++p) {
            x0[p] = rng.next_double(2.0 * pi);
        }

        TemplateObjective obj(target, mode, layers, gate);
        BfgsOptions opts;
        opts.max_iters = cfg.max_iters;
        opts.grad_tol = cfg.conv_tol;
        BfgsResult res;
        if (cfg.grad_mode == OptimizerConfig::GradMode::Analytic) {
            res = bfgs_minimize([&](const Eigen::VectorXd& x) { return obj.value(x); },
                                [&](const Eigen::VectorXd& x) { return obj.gradient(x); }, x0, opts);
        } else {
            const double h = cfg.grad_step;
            auto fd_grad = [&](const Eigen::VectorXd& x) {
                Eigen::VectorXd g(x.size());
                Eigen::VectorXd probe = x;
                for (Eigen::Index p = 0; p < x.size(); ++p) {
                    probe[p] = x[p] + h;
                    const double fp = obj.value(probe);
                    probe[p] = x[p] - h;
                    const double fm = obj.value(probe);
                    probe[p] = x[p];
                    g[p] = (fp - fm) / (2.0 * h);
                }
                return g;
            };
            res = bfgs_minimize([&](const Eigen::VectorXd& x) { return obj.value(x); }, fd_grad, x0,
                                opts);
        }
        outcomes[r].value = res.value;
        outcomes[r].x = std::move(res.x);
    });

    std::size_t best_r = 0;
    for (std::size_t r = 1; r < outcomes.size(); ++r) {
        if (outcomes[r].value < outcomes[best_r].value) {
            best_r = r;
        }
    }

    Decomposition d;
    d.tmpl.mode = mode;
    d.tmpl.layers = layers;
    d.tmpl.gate = gate;
    d.tmpl.params.assign(outcomes[best_r].x.data(), outcomes[best_r].x.data() + nparams);
    d.target = target;
    d.f_d = std::clamp(1.0 - outcomes[best_r].value, 0.0, 1.0);
    d.f_h = 1.0;
    d.f_u = d.f_d;
    d.two_qubit_count = layers;
    return d;
}

}  // namespace detail

/// Best fixed-gate synthesis with exactly `layers` two-qubit gates:
/// cfg.restarts quasi-Newton runs from uniform-random angles in [0, 2 pi),
/// minimizing 1 - hs_fidelity(template, target). Hardware fidelity is left
/// at 1; callers apply their noise context afterwards.
inline Decomposition optimize_fixed(const Mat4& target, const GateKind& gate, int layers,
                                    const OptimizerConfig& cfg) {
    return detail::optimize_layers(target, Template::Mode::FixedGate, gate, gate_key(gate), layers,
                                   cfg);
}

/// Smallest layer count whose infidelity meets cfg.exact_infidelity.
/// Starts at zero layers so locally-trivial targets cost nothing.
inline Decomposition decompose_exact(const Mat4& target, const GateKind& gate,
                                     const OptimizerConfig& cfg) {
    std::optional<Decomposition> best;
    for (int layers = 0; layers <= cfg.max_layers; ++layers) {
        Decomposition d = optimize_fixed(target, gate, layers, cfg);
        if (1.0 - d.f_d <= cfg.exact_infidelity) {
            return d;
        }
        if (!best || d.f_d > best->f_d) {
            best = std::move(d);
        }
    }
    throw decomposition_capacity_error(
        "no decomposition met infidelity " + std::to_string(cfg.exact_infidelity) + " within " +
            std::to_string(cfg.max_layers) + " layers (best f_d " + std::to_string(best->f_d) + ")",
        *best);
}

/// Noise-aware search over gate kinds and layer counts, maximizing
/// f_u = f_d * f_h with f_h = fidelity^layers * f1q^(2 (layers+1)).
/// Ties within 1e-12 prefer fewer layers, then the earlier gate in the
/// input list. A gate's layer loop stops once f_h alone cannot beat the
/// incumbent.
inline Decomposition decompose_approx(const Mat4& target,
                                      const std::vector<std::pair<GateKind, double>>& gates,
                                      const OptimizerConfig& cfg, double f1q = 1.0) {
    if (gates.empty()) {
        throw std::invalid_argument("decompose_approx: empty gate list");
    }
    if (!(f1q > 0.0 && f1q <= 1.0)) {
        throw std::invalid_argument("decompose_approx: f1q must lie in (0, 1]");
    }
    for (const auto& [g, fid] : gates) {
        if (!(fid > 0.0 && fid <= 1.0)) {
            throw std::invalid_argument("decompose_approx: fidelity of gate '" + format_gate(g) +
                                        "' must lie in (0, 1]");
        }
    }

    std::optional<Decomposition> best;
    std::size_t best_gate_index = 0;
    for (std::size_t j = 0; j < gates.size(); ++j) {
        const auto& [gate, fid] = gates[j];
        for (int layers = 0; layers <= cfg.max_layers; ++layers) {
            const double f_h = std::pow(fid, layers) * std::pow(f1q, 2 * (layers + 1));
            if (best && f_h < best->f_u) {
                break;  // deeper templates only lose more hardware fidelity
            }
            Decomposition d = optimize_fixed(target, gate, layers, cfg);
            d.f_h = f_h;
            d.f_u = d.f_d * f_h;

            bool take = false;
            if (!best) {
                take = true;
            } else if (d.f_u > best->f_u + 1e-12) {
                take = true;
            } else if (std::abs(d.f_u - best->f_u) <= 1e-12) {
                if (d.two_qubit_count < best->two_qubit_count) {
                    take = true;
                } else if (d.two_qubit_count == best->two_qubit_count && j < best_gate_index) {
                    take = true;
                }
            }
            if (take) {
                best = std::move(d);
                best_gate_index = j;
            }
        }
    }
    return *best;
}

/// Layer-growth search with the two-qubit angles included in the
/// optimization vector (theta_k, phi_k per layer for FullFSim; theta_k with
/// phi fixed at 0 for FullXY).
inline Decomposition decompose_continuous(const Mat4& target, ContinuousFamily family,
                                          const OptimizerConfig& cfg) {
    const Template::Mode mode = family == ContinuousFamily::FullFSim
                                    ? Template::Mode::ContinuousFSim
                                    : Template::Mode::ContinuousXY;
    const std::uint64_t key =
        family == ContinuousFamily::FullFSim ? detail::kFullFSimKey : detail::kFullXYKey;

    std::optional<Decomposition> best;
    for (int layers = 0; layers <= cfg.max_layers; ++layers) {
        Decomposition d = detail::optimize_layers(target, mode, GateKind{}, key, layers, cfg);
        if (1.0 - d.f_d <= cfg.exact_infidelity) {
            return d;
        }
        if (!best || d.f_d > best->f_d) {
            best = std::move(d);
        }
    }
    throw decomposition_capacity_error(
        "continuous decomposition did not meet infidelity " + std::to_string(cfg.exact_infidelity) +
            " within " + std::to_string(cfg.max_layers) + " layers",
        *best);
}

inline json decomposition_to_json(const Decomposition& d) {
    json out;
    out["target"] = matrix_to_json(d.target);
    if (d.tmpl.mode == Template::Mode::FixedGate) {
        out["gate"] = {{"theta", d.tmpl.gate.theta}, {"phi", d.tmpl.gate.phi}};
        if (!d.tmpl.gate.name.empty()) {
            out["gate"]["name"] = d.tmpl.gate.name;
        }
    } else {
        out["family"] = d.tmpl.mode == Template::Mode::ContinuousFSim ? "fullfsim" : "fullxy";
        json gates = json::array();
        for (int k = 1; k <= d.tmpl.layers; ++k) {
            const GateKind g = d.tmpl.gate_at(k);
            gates.push_back({{"theta", g.theta}, {"phi", g.phi}});
        }
        out["gates"] = std::move(gates);
    }
    out["layers"] = d.tmpl.layers;
    json u3s = json::array();
    for (int layer = 0; layer <= d.tmpl.layers; ++layer) {
        for (int slot = 0; slot < 2; ++slot) {
            const U3Params p = d.tmpl.u3_at(layer, slot);
            u3s.push_back({p.alpha, p.beta, p.lambda});
        }
    }
    out["u3_params"] = std::move(u3s);
    out["f_d"] = d.f_d;
    out["f_h"] = d.f_h;
    out["f_u"] = d.f_u;
    return out;
}

}  // namespace qsynth
