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

#include <cstring>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "qsynth/circuit.hpp"
#include "qsynth/csv.hpp"
#include "qsynth/decompose.hpp"
#include "qsynth/device.hpp"
#include "qsynth/parallel.hpp"

namespace qsynth {

/// Recovers U3 angles from a 2x2 unitary, discarding its global phase:
/// u3_matrix(result) equals the input up to a phase factor.
inline U3Params u3_params_from_matrix(const Mat2& m) {
    const double a00 = std::abs(m(0, 0));
    const double a10 = std::abs(m(1, 0));
    const double alpha = 2.0 * std::atan2(a10, a00);
    constexpr double eps = 1e-12;
    double beta = 0.0;
    double lambda = 0.0;
    if (a10 <= eps) {  // diagonal: pick beta = 0
        const double gamma = std::arg(m(0, 0));
        lambda = std::arg(m(1, 1)) - gamma;
    } else if (a00 <= eps) {  // anti-diagonal: pick gamma = 0
        beta = std::arg(m(1, 0));
        lambda = std::arg(-m(0, 1));
    } else {
        const double gamma = std::arg(m(0, 0));
        beta = std::arg(m(1, 0)) - gamma;
        lambda = std::arg(-m(0, 1)) - gamma;
    }
    auto wrap = [](double x) {
        x = std::fmod(x, 2.0 * pi);
        if (x > pi) {
            x -= 2.0 * pi;
        } else if (x < -pi) {
            x += 2.0 * pi;
        }
        return x;
    };
    return {alpha, wrap(beta), wrap(lambda)};
}

namespace detail {

inline bool identity_up_to_phase(const Mat2& m, double tol = 1e-12) {
    if (std::abs(m(0, 1)) > tol || std::abs(m(1, 0)) > tol) {
        return false;
    }
    return std::abs(m(1, 1) - m(0, 0)) <= tol;
}

inline void apply_1q(MatX& u, int n, int q, const Mat2& m) {
    const Eigen::Index cols = u.cols();
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t bit = std::size_t{1} << q;
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (std::size_t base = 0; base < dim; base += 2 * bit) {
            for (std::size_t ofs = 0; ofs < bit; ++ofs) {
                const auto r0 = static_cast<Eigen::Index>(base + ofs);
                const auto r1 = static_cast<Eigen::Index>(base + ofs + bit);
                const cplx x0 = u(r0, j);
                const cplx x1 = u(r1, j);
                u(r0, j) = m(0, 0) * x0 + m(0, 1) * x1;
                u(r1, j) = m(1, 0) * x0 + m(1, 1) * x1;
            }
        }
    }
}

/// Applies a two-qubit gate; qubit `a` indexes the more significant bit of
/// the gate matrix, matching Circuit op conventions.
inline void apply_2q(MatX& u, int n, int a, int b, const Mat4& m) {
    const Eigen::Index cols = u.cols();
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t pa = std::size_t{1} << a;
    const std::size_t pb = std::size_t{1} << b;
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (std::size_t r = 0; r < dim; ++r) {
            if ((r & pa) != 0 || (r & pb) != 0) {
                continue;
            }
            const Eigen::Index idx[4] = {
                static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r | pb),
                static_cast<Eigen::Index>(r | pa), static_cast<Eigen::Index>(r | pa | pb)};
            cplx x[4];
            for (int k = 0; k < 4; ++k) {
                x[k] = u(idx[k], j);
            }
            for (int k = 0; k < 4; ++k) {
                u(idx[k], j) = m(k, 0) * x[0] + m(k, 1) * x[1] + m(k, 2) * x[2] + m(k, 3) * x[3];
            }
        }
    }
}

}  // namespace detail

/// Full unitary of a circuit (2^n x 2^n); n is capped at 12.
inline MatX circuit_unitary(const Circuit& c) {
    if (c.qubit_count > 12) {
        throw capacity_error("circuit_unitary: " + std::to_string(c.qubit_count) +
                             " qubits exceed the 12-qubit composition cap");
    }
    if (c.qubit_count < 1) {
        throw std::invalid_argument("circuit_unitary: empty circuit");
    }
    c.validate();
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << c.qubit_count);
    MatX u = MatX::Identity(dim, dim);
    for (const Circuit::Op& op : c.ops) {
        if (const auto* g = std::get_if<Circuit::U3Op>(&op)) {
            detail::apply_1q(u, c.qubit_count, g->q, u3_matrix(g->params));
        } else if (const auto* t = std::get_if<Circuit::TwoQubitUnitaryOp>(&op)) {
            detail::apply_2q(u, c.qubit_count, t->a, t->b, t->matrix);
        } else if (const auto* h = std::get_if<Circuit::HardwareGateOp>(&op)) {
            detail::apply_2q(u, c.qubit_count, h->a, h->b, h->gate.matrix());
        }
    }
    return u;
}

/// Numerical certificate of a compilation: |Tr(U_compiled† U_original)| / 2^n.
inline double verify_circuit(const Circuit& original, const Circuit& compiled) {
    if (original.qubit_count != compiled.qubit_count) {
        throw std::invalid_argument("verify_circuit: qubit counts differ");
    }
    const MatX u_o = circuit_unitary(original);
    const MatX u_c = circuit_unitary(compiled);
    return hs_fidelity(u_c, u_o);
}

enum class CompileMode { Exact, Approx, Continuous };

struct CompileReport {
    struct PerGate {
        std::size_t op_index = 0;
        int a = 0;
        int b = 0;
        std::string gate;  // chosen kind, or the family name in Continuous mode
        int layers = 0;
        double f_d = 1.0;
        double f_h = 1.0;
        double f_u = 1.0;
    };

    std::vector<PerGate> per_gate;
    long long two_qubit_count = 0;
    double est_fidelity = 1.0;
    std::optional<double> verification_fidelity;
};

inline json compile_report_to_json(const CompileReport& report) {
    json out;
    json rows = json::array();
    for (const auto& row : report.per_gate) {
        rows.push_back({{"op_index", row.op_index},
                        {"qubits", {row.a, row.b}},
                        {"gate", row.gate},
                        {"layers", row.layers},
                        {"f_d", row.f_d},
                        {"f_h", row.f_h},
                        {"f_u", row.f_u}});
    }
    out["per_gate"] = std::move(rows);
    out["two_qubit_count"] = report.two_qubit_count;
    out["est_fidelity"] = report.est_fidelity;
    if (report.verification_fidelity) {
        out["verification_fidelity"] = *report.verification_fidelity;
    }
    return out;
}

inline std::string compile_report_to_csv(const CompileReport& report) {
    CsvWriter csv;
    csv.row({"op_index", "qubit_a", "qubit_b", "gate", "layers", "f_d", "f_h", "f_u"});
    for (const auto& row : report.per_gate) {
        csv.row({CsvWriter::number(static_cast<long long>(row.op_index)), CsvWriter::number(row.a),
                 CsvWriter::number(row.b), row.gate, CsvWriter::number(row.layers),
                 CsvWriter::number(row.f_d), CsvWriter::number(row.f_h),
                 CsvWriter::number(row.f_u)});
    }
    return csv.text();
}

struct CompileResult {
    Circuit circuit;
    CompileReport report;
};

namespace detail {

struct ChosenDecomposition {
    Decomposition decomposition;
    std::string label;
};

inline std::string memo_key(const Mat4& target, CompileMode mode,
                            const std::vector<std::pair<GateKind, double>>& gates, double f1q,
                            std::optional<ContinuousFamily> family, double family_fid) {
    std::string key;
    key.reserve(16 * sizeof(cplx) + gates.size() * 24 + 32);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const cplx v = target(i, j);
            const double re = v.real();
            const double im = v.imag();
            key.append(reinterpret_cast<const char*>(&re), sizeof(re));
            key.append(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    }
    key.push_back(static_cast<char>(mode));
    for (const auto& [g, f] : gates) {
        const std::uint64_t k = gate_key(g);
        key.append(reinterpret_cast<const char*>(&k), sizeof(k));
        key.append(reinterpret_cast<const char*>(&f), sizeof(f));
    }
    key.append(reinterpret_cast<const char*>(&f1q), sizeof(f1q));
    if (family) {
        key.push_back(static_cast<char>(*family == ContinuousFamily::FullFSim ? 'F' : 'X'));
        key.append(reinterpret_cast<const char*>(&family_fid), sizeof(family_fid));
    }
    return key;
}

/// Best decomposition of one target on one edge. In Exact mode every member
/// is decomposed to the infidelity threshold and the highest f_u wins; in
/// Approx mode the full (gate, layers) product search runs.
inline ChosenDecomposition decompose_for_edge(const Mat4& target, CompileMode mode,
                                              const std::vector<std::pair<GateKind, double>>& gates,
                                              double f1q, std::optional<ContinuousFamily> family,
                                              double family_fid, const OptimizerConfig& cfg) {
    ChosenDecomposition chosen;
    switch (mode) {
        case CompileMode::Continuous: {
            Decomposition d = decompose_continuous(target, *family, cfg);
            d.f_h = std::pow(family_fid, d.two_qubit_count);
            d.f_u = d.f_d * d.f_h;
            chosen.decomposition = std::move(d);
            chosen.label = *family == ContinuousFamily::FullFSim ? "fullfsim" : "fullxy";
            return chosen;
        }
        case CompileMode::Approx: {
            Decomposition d = decompose_approx(target, gates, cfg, f1q);
            chosen.label = format_gate(d.tmpl.gate);
            chosen.decomposition = std::move(d);
            return chosen;
        }
        case CompileMode::Exact: {
            std::optional<Decomposition> best;
            std::optional<decomposition_capacity_error> first_failure;
            for (const auto& [gate, fid] : gates) {
                Decomposition d;
                try {
                    d = decompose_exact(target, gate, cfg);
                } catch (const decomposition_capacity_error& e) {
                    if (!first_failure) {
                        first_failure = e;
                    }
                    continue;
                }
                d.f_h = std::pow(fid, d.two_qubit_count) *
                        std::pow(f1q, 2 * (d.two_qubit_count + 1));
                d.f_u = d.f_d * d.f_h;
                const bool take =
                    !best || d.f_u > best->f_u + 1e-12 ||
                    (std::abs(d.f_u - best->f_u) <= 1e-12 &&
                     d.two_qubit_count < best->two_qubit_count);
                if (take) {
                    best = std::move(d);
                }
            }
            if (!best) {
                throw *first_failure;
            }
            chosen.label = format_gate(best->tmpl.gate);
            chosen.decomposition = std::move(*best);
            return chosen;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace detail

/// Replaces every two-qubit application unitary with its best decomposition
/// for the given device and instruction set. Decompositions of distinct ops
/// are independent; they run in parallel up to `parallelism` and the result
/// is assembled in program order, so the output does not depend on
/// scheduling. Identical (target, edge context) pairs are memoized.
inline CompileResult compile_circuit(const Circuit& c, const DeviceModel& device,
                                     const InstructionSet& iset, const OptimizerConfig& cfg,
                                     CompileMode mode, int parallelism = 1) {
    c.validate();
    cfg.validate();
    if (c.qubit_count > device.qubit_count) {
        throw std::invalid_argument("compile_circuit: circuit uses more qubits than the device");
    }
    if (iset.continuous() != (mode == CompileMode::Continuous)) {
        throw std::invalid_argument(
            "compile_circuit: continuous instruction sets pair with Continuous mode only");
    }

    // Validate connectivity and calibration coverage up front.
    struct EdgeContext {
        std::vector<std::pair<GateKind, double>> gates;
        double f1q = 1.0;
        double family_fid = 1.0;
    };
    auto edge_context = [&](int a, int b, std::size_t op_index) {
        const auto edge = device.edge_index(a, b);
        if (!edge) {
            throw connectivity_error("op " + std::to_string(op_index) + " acts on (" +
                                     std::to_string(a) + "," + std::to_string(b) +
                                     ") which is not an edge of the device");
        }
        EdgeContext ctx;
        if (mode == CompileMode::Continuous) {
            ctx.family_fid = device.edge_family_fidelity[static_cast<std::size_t>(*edge)];
        } else {
            for (const GateKind& g : iset.members) {
                const auto fid = device.fidelity_for(*edge, g);
                if (!fid) {
                    throw missing_calibration_error(
                        "gate '" + format_gate(g) + "' has no fidelity entry on edge (" +
                        std::to_string(device.edges[static_cast<std::size_t>(*edge)].a) + "," +
                        std::to_string(device.edges[static_cast<std::size_t>(*edge)].b) + ")");
                }
                ctx.gates.emplace_back(g, *fid);
            }
        }
        const double fa = device.single_qubit_fidelity[static_cast<std::size_t>(a)];
        const double fb = device.single_qubit_fidelity[static_cast<std::size_t>(b)];
        ctx.f1q = std::sqrt(fa * fb);
        return ctx;
    };

    std::vector<std::size_t> task_ops;
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
        if (const auto* t = std::get_if<Circuit::TwoQubitUnitaryOp>(&c.ops[i])) {
            edge_context(t->a, t->b, i);  // throws on bad edge / missing data
            task_ops.push_back(i);
        } else if (const auto* h = std::get_if<Circuit::HardwareGateOp>(&c.ops[i])) {
            const auto edge = device.edge_index(h->a, h->b);
            if (!edge) {
                throw connectivity_error("op " + std::to_string(i) + " acts on (" +
                                         std::to_string(h->a) + "," + std::to_string(h->b) +
                                         ") which is not an edge of the device");
            }
            if (mode != CompileMode::Continuous) {
                bool in_set = false;
                for (const GateKind& g : iset.members) {
                    if (same_gate(g, h->gate)) {
                        in_set = true;
                        break;
                    }
                }
                if (!in_set) {
                    throw std::invalid_argument("op " + std::to_string(i) + ": hardware gate '" +
                                                format_gate(h->gate) +
                                                "' is not in instruction set " + iset.name);
                }
                if (!device.fidelity_for(*edge, h->gate)) {
                    throw missing_calibration_error("gate '" + format_gate(h->gate) +
                                                    "' has no fidelity entry on edge (" +
                                                    std::to_string(h->a) + "," +
                                                    std::to_string(h->b) + ")");
                }
            }
        }
    }

    // Decompose all application unitaries (memoized, order-independent).
    OptimizerConfig inner_cfg = cfg;
    inner_cfg.parallelism = 1;  // compile-level parallelism owns the budget
    std::vector<detail::ChosenDecomposition> results(task_ops.size());
    std::unordered_map<std::string, detail::ChosenDecomposition> memo;
    std::mutex memo_mutex;
    parallel_for(task_ops.size(), parallelism, [&](std::size_t k) {
        const auto& op = std::get<Circuit::TwoQubitUnitaryOp>(c.ops[task_ops[k]]);
        const EdgeContext ctx = edge_context(op.a, op.b, task_ops[k]);
        const std::string key =
            detail::memo_key(op.matrix, mode, ctx.gates, ctx.f1q, iset.family, ctx.family_fid);
        {
            std::lock_guard<std::mutex> lock(memo_mutex);
            const auto it = memo.find(key);
            if (it != memo.end()) {
                results[k] = it->second;
                return;
            }
        }
        detail::ChosenDecomposition chosen = detail::decompose_for_edge(
            op.matrix, mode, ctx.gates, ctx.f1q, iset.family, ctx.family_fid, inner_cfg);
        {
            std::lock_guard<std::mutex> lock(memo_mutex);
            memo.emplace(key, chosen);
        }
        results[k] = std::move(chosen);
    });

    // Assemble the lowered circuit in program order, merging adjacent
    // single-qubit gates into one U3 each.
    Circuit out;
    out.qubit_count = c.qubit_count;
    CompileReport report;
    std::vector<Mat2> pending(static_cast<std::size_t>(c.qubit_count), Mat2::Identity());

    auto flush = [&](int q) {
        Mat2& m = pending[static_cast<std::size_t>(q)];
        if (!detail::identity_up_to_phase(m)) {
            out.ops.push_back(Circuit::U3Op{q, u3_params_from_matrix(m)});
        }
        m = Mat2::Identity();
    };

    std::size_t task_cursor = 0;
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
        if (const auto* g = std::get_if<Circuit::U3Op>(&c.ops[i])) {
            pending[static_cast<std::size_t>(g->q)] =
                u3_matrix(g->params) * pending[static_cast<std::size_t>(g->q)];
        } else if (const auto* h = std::get_if<Circuit::HardwareGateOp>(&c.ops[i])) {
            flush(h->a);
            flush(h->b);
            out.ops.push_back(*h);
            const auto edge = device.edge_index(h->a, h->b);
            const double fid = mode == CompileMode::Continuous
                                   ? device.edge_family_fidelity[static_cast<std::size_t>(*edge)]
                                   : *device.fidelity_for(*edge, h->gate);
            report.per_gate.push_back(
                {i, h->a, h->b, format_gate(h->gate), 1, 1.0, fid, fid});
        } else {
            const auto& t = std::get<Circuit::TwoQubitUnitaryOp>(c.ops[i]);
            const detail::ChosenDecomposition& chosen = results[task_cursor++];
            const Decomposition& d = chosen.decomposition;
            // L_0 merges into the pending accumulators; each gate layer
            // flushes and emits, then stacks its trailing U3 pair.
            auto stack_layer = [&](int layer) {
                pending[static_cast<std::size_t>(t.a)] =
                    u3_matrix(d.tmpl.u3_at(layer, 0)) * pending[static_cast<std::size_t>(t.a)];
                pending[static_cast<std::size_t>(t.b)] =
                    u3_matrix(d.tmpl.u3_at(layer, 1)) * pending[static_cast<std::size_t>(t.b)];
            };
            stack_layer(0);
            for (int k = 1; k <= d.tmpl.layers; ++k) {
                flush(t.a);
                flush(t.b);
                out.ops.push_back(Circuit::HardwareGateOp{t.a, t.b, d.tmpl.gate_at(k)});
                stack_layer(k);
            }
            report.per_gate.push_back(
                {i, t.a, t.b, chosen.label, d.two_qubit_count, d.f_d, d.f_h, d.f_u});
        }
    }
    for (int q = 0; q < c.qubit_count; ++q) {
        flush(q);
    }

    report.two_qubit_count = 0;
    report.est_fidelity = 1.0;
    for (const auto& row : report.per_gate) {
        report.two_qubit_count += row.layers;
        report.est_fidelity *= row.f_u;
    }
    return {std::move(out), std::move(report)};
}

}  // namespace qsynth
