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

#include <cstdint>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "qsynth/gates.hpp"
#include "qsynth/json_io.hpp"
#include "qsynth/rng.hpp"

namespace qsynth {

/// Program representation: a flat op list over `qubit_count` qubits.
/// Application circuits carry TwoQubitUnitary ops; compiled circuits carry
/// only U3 and HardwareGate ops.
struct Circuit {
    struct U3Op {
        int q = 0;
        U3Params params;
    };
    struct TwoQubitUnitaryOp {
        int a = 0;
        int b = 0;
        Mat4 matrix;  // first listed qubit indexes the more significant bit
    };
    struct HardwareGateOp {
        int a = 0;
        int b = 0;
        GateKind gate;
    };
    using Op = std::variant<U3Op, TwoQubitUnitaryOp, HardwareGateOp>;

    int qubit_count = 0;
    std::vector<Op> ops;

    void validate() const {
        auto check_q = [this](int q, std::size_t index) {
            if (q < 0 || q >= qubit_count) {
                throw std::invalid_argument("circuit op " + std::to_string(index) +
                                            ": qubit index " + std::to_string(q) + " out of range");
            }
        };
        for (std::size_t i = 0; i < ops.size(); ++i) {
            if (const auto* u = std::get_if<U3Op>(&ops[i])) {
                check_q(u->q, i);
            } else if (const auto* t = std::get_if<TwoQubitUnitaryOp>(&ops[i])) {
                check_q(t->a, i);
                check_q(t->b, i);
                if (t->a == t->b) {
                    throw std::invalid_argument("circuit op " + std::to_string(i) +
                                                ": two-qubit op on identical qubits");
                }
            } else if (const auto* h = std::get_if<HardwareGateOp>(&ops[i])) {
                check_q(h->a, i);
                check_q(h->b, i);
                if (h->a == h->b) {
                    throw std::invalid_argument("circuit op " + std::to_string(i) +
                                                ": two-qubit op on identical qubits");
                }
            }
        }
    }

    std::size_t two_qubit_op_count() const {
        std::size_t n = 0;
        for (const Op& op : ops) {
            if (!std::holds_alternative<U3Op>(op)) {
                ++n;
            }
        }
        return n;
    }

    bool lowered() const {
        for (const Op& op : ops) {
            if (std::holds_alternative<TwoQubitUnitaryOp>(op)) {
                return false;
            }
        }
        return true;
    }
};

inline json circuit_to_json(const Circuit& c) {
    json out;
    out["qubits"] = c.qubit_count;
    json ops = json::array();
    for (const Circuit::Op& op : c.ops) {
        if (const auto* u = std::get_if<Circuit::U3Op>(&op)) {
            ops.push_back({{"kind", "u3"},
                           {"q", u->q},
                           {"params", {u->params.alpha, u->params.beta, u->params.lambda}}});
        } else if (const auto* t = std::get_if<Circuit::TwoQubitUnitaryOp>(&op)) {
            ops.push_back({{"kind", "unitary2q"},
                           {"q", {t->a, t->b}},
                           {"matrix", matrix_to_json(t->matrix)}});
        } else if (const auto* h = std::get_if<Circuit::HardwareGateOp>(&op)) {
            ops.push_back(
                {{"kind", "gate2q"}, {"q", {h->a, h->b}}, {"gate", format_gate(h->gate)}});
        }
    }
    out["ops"] = std::move(ops);
    return out;
}

inline Circuit circuit_from_json(const json& j) {
    Circuit c;
    if (!j.is_object() || !j.contains("qubits")) {
        throw parse_error("circuit: missing field 'qubits'");
    }
    c.qubit_count = j["qubits"].get<int>();
    const json ops = j.value("ops", json::array());
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const std::string ctx = "circuit.ops[" + std::to_string(i) + "]";
        const json& op = ops[i];
        const std::string kind = op.value("kind", "");
        if (kind == "u3") {
            const json& p = op.at("params");
            if (!p.is_array() || p.size() != 3) {
                throw parse_error(ctx + ".params: expected [alpha, beta, lambda]");
            }
            c.ops.push_back(Circuit::U3Op{
                op.at("q").get<int>(),
                U3Params{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()}});
        } else if (kind == "unitary2q") {
            const json& q = op.at("q");
            const MatX m = matrix_from_json(op.at("matrix"), ctx + ".matrix");
            if (m.rows() != 4 || m.cols() != 4) {
                throw parse_error(ctx + ".matrix: expected 4x4");
            }
            c.ops.push_back(Circuit::TwoQubitUnitaryOp{q.at(0).get<int>(), q.at(1).get<int>(),
                                                       Mat4(m)});
        } else if (kind == "gate2q") {
            const json& q = op.at("q");
            c.ops.push_back(Circuit::HardwareGateOp{q.at(0).get<int>(), q.at(1).get<int>(),
                                                    parse_gate(op.at("gate").get<std::string>())});
        } else {
            throw parse_error(ctx + ": unknown op kind '" + kind + "'");
        }
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw parse_error(e.what());
    }
    return c;
}

inline Circuit load_circuit(const std::string& path) {
    return circuit_from_json(load_json_file(path));
}

namespace detail {

inline std::vector<int> random_permutation(int n, SplitMix64& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    return perm;
}

}  // namespace detail

/// Quantum-volume circuit: n layers; each layer pairs up a random
/// permutation of the qubits and applies an independent Haar-random SU(4)
/// unitary to each of the floor(n/2) pairs.
inline Circuit gen_qv(int n, std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument("gen_qv: need n >= 2 qubits");
    }
    Circuit c;
    c.qubit_count = n;
    for (int layer = 0; layer < n; ++layer) {
        const std::uint64_t layer_seed = derive_seed(seed, static_cast<std::uint64_t>(layer));
        SplitMix64 rng(derive_seed(layer_seed, 0));
        const std::vector<int> perm = detail::random_permutation(n, rng);
        for (int k = 0; k + 1 < n; k += 2) {
            const std::uint64_t gate_seed = derive_seed(layer_seed, static_cast<std::uint64_t>(k) + 1);
            c.ops.push_back(Circuit::TwoQubitUnitaryOp{perm[static_cast<std::size_t>(k)],
                                                       perm[static_cast<std::size_t>(k + 1)],
                                                       haar_su4(gate_seed)});
        }
    }
    return c;
}

/// One MaxCut-style layer: ceil(n^3/4) ZZ interactions on random pairs with
/// random angles, followed by the mixer X rotations.
inline Circuit gen_qaoa(int n, std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument("gen_qaoa: need n >= 2 qubits");
    }
    Circuit c;
    c.qubit_count = n;
    const auto interactions = static_cast<int>((static_cast<long long>(n) * n * n + 3) / 4);
    SplitMix64 rng(derive_seed(seed, 0x71616F61ULL));
    for (int k = 0; k < interactions; ++k) {
        const int a = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        int b = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
        if (b >= a) {
            ++b;
        }
        const double beta = rng.next_double(2.0 * pi);
        c.ops.push_back(Circuit::TwoQubitUnitaryOp{a, b, zz_interaction(beta)});
    }
    for (int q = 0; q < n; ++q) {
        // Rx(t) = U3(t, -pi/2, pi/2)
        const double t = rng.next_double(2.0 * pi);
        c.ops.push_back(Circuit::U3Op{q, U3Params{t, -pi / 2.0, pi / 2.0}});
    }
    return c;
}

/// Fourier-transform circuit: one Hadamard per qubit and the
/// controlled-phase ladder of n(n-1)/2 gates with angles pi/2^t.
inline Circuit gen_qft(int n) {
    if (n < 2) {
        throw std::invalid_argument("gen_qft: need n >= 2 qubits");
    }
    Circuit c;
    c.qubit_count = n;
    for (int i = 0; i < n; ++i) {
        c.ops.push_back(Circuit::U3Op{i, U3Params{pi / 2.0, 0.0, pi}});  // Hadamard
        for (int j = i + 1; j < n; ++j) {
            c.ops.push_back(Circuit::TwoQubitUnitaryOp{j, i, qft_cphase(j - i)});
        }
    }
    return c;
}

/// One Trotter step of the 1-D Fermi-Hubbard chain: 2n ZZ interactions and
/// 4n (XX+YY)/2 interactions cycling over the chain bonds, random angles.
inline Circuit gen_fh(int n, std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument("gen_fh: need n >= 2 qubits");
    }
    Circuit c;
    c.qubit_count = n;
    SplitMix64 rng(derive_seed(seed, 0x6668ULL));
    const int bonds = n - 1;
    for (int k = 0; k < 2 * n; ++k) {
        const int q = k % bonds;
        c.ops.push_back(Circuit::TwoQubitUnitaryOp{q, q + 1, zz_interaction(rng.next_double(2.0 * pi))});
    }
    for (int k = 0; k < 4 * n; ++k) {
        const int q = k % bonds;
        c.ops.push_back(
            Circuit::TwoQubitUnitaryOp{q, q + 1, xxyy_interaction(rng.next_double(2.0 * pi))});
    }
    return c;
}

}  // namespace qsynth
