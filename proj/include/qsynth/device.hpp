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
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsynth/csv.hpp"
#include "qsynth/gates.hpp"
#include "qsynth/json_io.hpp"

namespace qsynth {

/// Qubit connectivity plus per-edge, per-gate-kind calibration fidelities.
/// Read-only after construction; safe to share across threads.
struct DeviceModel {
    struct Edge {
        int a = 0;
        int b = 0;  // stored with a < b
    };

    struct EdgeGate {
        GateKind gate;
        double fidelity = 1.0;
    };

    int qubit_count = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<EdgeGate>> edge_gates;   // parallel to edges
    std::vector<double> edge_family_fidelity;        // continuous-family average, default 1.0
    std::vector<double> single_qubit_fidelity;       // per qubit, defaults to 1.0

    std::optional<int> edge_index(int a, int b) const {
        if (a > b) {
            std::swap(a, b);
        }
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (edges[i].a == a && edges[i].b == b) {
                return static_cast<int>(i);
            }
        }
        return std::nullopt;
    }

    std::optional<double> fidelity_for(int edge, const GateKind& gate) const {
        const std::uint64_t key = gate_key(gate);
        for (const EdgeGate& eg : edge_gates[static_cast<std::size_t>(edge)]) {
            if (gate_key(eg.gate) == key) {
                return eg.fidelity;
            }
        }
        return std::nullopt;
    }

    void add_edge(int a, int b, std::vector<EdgeGate> gates, double family_fidelity = 1.0) {
        if (a > b) {
            std::swap(a, b);
        }
        edges.push_back({a, b});
        edge_gates.push_back(std::move(gates));
        edge_family_fidelity.push_back(family_fidelity);
    }
};

inline json device_to_json(const DeviceModel& device) {
    json out;
    out["qubits"] = device.qubit_count;
    json edges = json::array();
    for (std::size_t i = 0; i < device.edges.size(); ++i) {
        json e;
        e["a"] = device.edges[i].a;
        e["b"] = device.edges[i].b;
        json gates = json::object();
        for (const auto& eg : device.edge_gates[i]) {
            gates[format_gate(eg.gate)] = eg.fidelity;
        }
        e["gates"] = std::move(gates);
        if (device.edge_family_fidelity[i] != 1.0) {
            e["family_fidelity"] = device.edge_family_fidelity[i];
        }
        edges.push_back(std::move(e));
    }
    out["edges"] = std::move(edges);
    json f1q = json::object();
    for (int q = 0; q < device.qubit_count; ++q) {
        if (device.single_qubit_fidelity[static_cast<std::size_t>(q)] != 1.0) {
            f1q[std::to_string(q)] = device.single_qubit_fidelity[static_cast<std::size_t>(q)];
        }
    }
    if (!f1q.empty()) {
        out["single_qubit_fidelity"] = std::move(f1q);
    }
    return out;
}

inline DeviceModel device_from_json(const json& j) {
    DeviceModel device;
    if (!j.is_object() || !j.contains("qubits") || !j["qubits"].is_number_integer()) {
        throw parse_error("device: missing integer field 'qubits'");
    }
    device.qubit_count = j["qubits"].get<int>();
    if (device.qubit_count < 1) {
        throw parse_error("device.qubits: must be >= 1");
    }
    device.single_qubit_fidelity.assign(static_cast<std::size_t>(device.qubit_count), 1.0);

    const json edges = j.value("edges", json::array());
    if (!edges.is_array()) {
        throw parse_error("device.edges: expected an array");
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string ctx = "device.edges[" + std::to_string(i) + "]";
        const json& e = edges[i];
        if (!e.is_object() || !e.contains("a") || !e.contains("b")) {
            throw parse_error(ctx + ": expected object with fields 'a' and 'b'");
        }
        const int a = e["a"].get<int>();
        const int b = e["b"].get<int>();
        if (a < 0 || a >= device.qubit_count || b < 0 || b >= device.qubit_count) {
            throw parse_error(ctx + ": qubit index out of range [0, " +
                              std::to_string(device.qubit_count) + ")");
        }
        if (a == b) {
            throw parse_error(ctx + ": self-loop on qubit " + std::to_string(a));
        }
        if (device.edge_index(a, b)) {
            throw parse_error(ctx + ": duplicate edge (" + std::to_string(a) + "," +
                              std::to_string(b) + ")");
        }
        std::vector<DeviceModel::EdgeGate> gates;
        for (const auto& [name, fid] : e.value("gates", json::object()).items()) {
            GateKind gate;
            try {
                gate = parse_gate(name);
            } catch (const parse_error& pe) {
                throw parse_error(ctx + ".gates: " + pe.what());
            }
            if (!fid.is_number()) {
                throw parse_error(ctx + ".gates." + name + ": fidelity must be a number");
            }
            const double f = fid.get<double>();
            if (!(f > 0.0 && f <= 1.0)) {
                throw parse_error(ctx + ".gates." + name + ": fidelity " + std::to_string(f) +
                                  " outside (0, 1]");
            }
            gates.push_back({gate, f});
        }
        double family_fid = 1.0;
        if (e.contains("family_fidelity")) {
            family_fid = e["family_fidelity"].get<double>();
            if (!(family_fid > 0.0 && family_fid <= 1.0)) {
                throw parse_error(ctx + ".family_fidelity: " + std::to_string(family_fid) +
                                  " outside (0, 1]");
            }
        }
        device.add_edge(a, b, std::move(gates), family_fid);
    }

    if (j.contains("single_qubit_fidelity")) {
        for (const auto& [qstr, fid] : j["single_qubit_fidelity"].items()) {
            int q = -1;
            try {
                q = std::stoi(qstr);
            } catch (...) {
                throw parse_error("device.single_qubit_fidelity: bad qubit key '" + qstr + "'");
            }
            if (q < 0 || q >= device.qubit_count) {
                throw parse_error("device.single_qubit_fidelity." + qstr + ": index out of range");
            }
            const double f = fid.get<double>();
            if (!(f > 0.0 && f <= 1.0)) {
                throw parse_error("device.single_qubit_fidelity." + qstr + ": fidelity " +
                                  std::to_string(f) + " outside (0, 1]");
            }
            device.single_qubit_fidelity[static_cast<std::size_t>(q)] = f;
        }
    }
    return device;
}

inline DeviceModel load_device(const std::string& path) {
    return device_from_json(load_json_file(path));
}

/// A named, finite (or continuous-family) collection of hardware gate kinds.
struct InstructionSet {
    std::string name;
    std::vector<GateKind> members;          // empty for continuous families
    std::optional<ContinuousFamily> family; // set for FullXY / FullFSim

    bool continuous() const { return family.has_value(); }
};

namespace detail {

inline GateKind base_gate(int index) {
    switch (index) {
        case 1: return GateKind::syc();
        case 2: return GateKind::sqiswap();
        case 3: return GateKind::cz();
        case 4: return GateKind::iswap();
        case 5: return GateKind::fsim(pi / 3.0, 0.0);
        case 6: return GateKind::fsim(3.0 * pi / 8.0, 0.0);
        case 7: return GateKind::fsim(pi / 6.0, pi);
        default: throw std::logic_error("base_gate: bad index");
    }
}

inline std::vector<GateKind> base_gates(std::initializer_list<int> indices, bool with_swap = false) {
    std::vector<GateKind> out;
    for (int i : indices) {
        out.push_back(base_gate(i));
    }
    if (with_swap) {
        out.push_back(GateKind::swap());
    }
    return out;
}

}  // namespace detail

/// Registry of the studied instruction sets. Single-gate sets S1-S7, the
/// incremental combinations G1-G7 (G7 adds SWAP) and R1-R5 (R5 adds SWAP),
/// and the two continuous families.
inline InstructionSet instruction_set(const std::string& name) {
    std::string key;
    for (char c : name) {
        if (c != '_' && c != '-') {
            key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    InstructionSet set;
    set.name = name;
    if (key.size() == 2 && key[0] == 's' && key[1] >= '1' && key[1] <= '7') {
        set.name = "S" + std::string(1, key[1]);
        set.members = {detail::base_gate(key[1] - '0')};
        return set;
    }
    if (key.size() == 2 && key[0] == 'g' && key[1] >= '1' && key[1] <= '7') {
        const int n = key[1] - '0';
        set.name = "G" + std::to_string(n);
        std::initializer_list<int> all{1, 2, 3, 4, 5, 6, 7};
        std::vector<int> take(all.begin(), all.begin() + std::min(n + 1, 7));
        for (int i : take) {
            set.members.push_back(detail::base_gate(i));
        }
        if (n == 7) {
            set.members.push_back(GateKind::swap());
        }
        return set;
    }
    if (key.size() == 2 && key[0] == 'r' && key[1] >= '1' && key[1] <= '5') {
        const int n = key[1] - '0';
        set.name = "R" + std::to_string(n);
        switch (n) {
            case 1: set.members = detail::base_gates({3, 4}); break;
            case 2: set.members = detail::base_gates({2, 3, 4}); break;
            case 3: set.members = detail::base_gates({2, 3, 4, 5}); break;
            case 4: set.members = detail::base_gates({2, 3, 4, 5, 6}); break;
            case 5: set.members = detail::base_gates({2, 3, 4, 5, 6}, true); break;
            default: break;
        }
        return set;
    }
    if (key == "fullxy") {
        set.name = "FullXY";
        set.family = ContinuousFamily::FullXY;
        return set;
    }
    if (key == "fullfsim") {
        set.name = "FullFSim";
        set.family = ContinuousFamily::FullFSim;
        return set;
    }
    throw not_found_error("unknown instruction set '" + name + "'");
}

/// Per-(pair, gate-type) calibration budget. The step structure follows the
/// fSim tune-up sequence: CPHASE angle calibration at phi and pi, iSWAP
/// angle calibration at 0 and pi/2, the theta tune, unitary tomography of
/// the composed pulse, and cross-entropy benchmarking rounds.
struct CalibrationCostModel {
    long long circuits_cphase = 3000;
    long long circuits_iswap = 3000;
    long long circuits_theta_tune = 1500;
    long long circuits_tomography = 1500;
    long long circuits_xeb = 1000;
    long long total_per_pair_per_type = 10000;
    double hours_per_type_per_pair = 2.0;
    int parallelism = 1;

    long long step_sum() const {
        return circuits_cphase + circuits_iswap + circuits_theta_tune + circuits_tomography +
               circuits_xeb;
    }
};

inline CalibrationCostModel calibration_model_from_json(const json& j) {
    CalibrationCostModel m;
    bool steps_given = false;
    auto read = [&](const char* key, long long& field) {
        if (j.contains(key)) {
            field = j[key].get<long long>();
            if (field < 0) {
                throw parse_error(std::string("calibration.") + key + ": must be >= 0");
            }
            steps_given = true;
        }
    };
    read("circuits_cphase", m.circuits_cphase);
    read("circuits_iswap", m.circuits_iswap);
    read("circuits_theta_tune", m.circuits_theta_tune);
    read("circuits_tomography", m.circuits_tomography);
    read("circuits_xeb", m.circuits_xeb);
    if (steps_given) {
        m.total_per_pair_per_type = m.step_sum();
    }
    if (j.contains("total_per_pair_per_type")) {
        const long long total = j["total_per_pair_per_type"].get<long long>();
        if (steps_given && total != m.total_per_pair_per_type) {
            throw parse_error("calibration.total_per_pair_per_type: " + std::to_string(total) +
                              " does not equal the step sum " +
                              std::to_string(m.total_per_pair_per_type));
        }
        m.total_per_pair_per_type = total;
    }
    if (j.contains("hours_per_type_per_pair")) {
        m.hours_per_type_per_pair = j["hours_per_type_per_pair"].get<double>();
    }
    if (j.contains("parallelism")) {
        m.parallelism = j["parallelism"].get<int>();
        if (m.parallelism < 1) {
            throw parse_error("calibration.parallelism: must be >= 1");
        }
    }
    return m;
}

struct CalibrationCost {
    long long circuits = 0;
    double hours = 0.0;
};

/// Whole-device calibration bill: both circuits and hours scale linearly
/// with edge count and with the number of gate types.
inline CalibrationCost calibration_cost(const CalibrationCostModel& model,
                                        const DeviceModel& device, int num_gate_types) {
    if (num_gate_types < 1) {
        throw std::invalid_argument("calibration_cost: num_gate_types must be >= 1");
    }
    const auto pairs = static_cast<long long>(device.edges.size());
    CalibrationCost cost;
    cost.circuits = pairs * num_gate_types * model.total_per_pair_per_type;
    cost.hours = static_cast<double>(pairs) * num_gate_types * model.hours_per_type_per_pair /
                 model.parallelism;
    return cost;
}

struct TradeoffRow {
    std::string set_name;
    std::optional<int> num_types;       // nullopt for continuous families
    std::optional<long long> circuits;  // nullopt => unbounded
    std::optional<double> hours;
    double metric = 0.0;
};

/// Calibration cost vs. application-metric table for candidate sets. Rows
/// are sorted by gate-type count; continuous families sort last and report
/// unbounded calibration cost.
inline std::vector<TradeoffRow> tradeoff_report(const DeviceModel& device,
                                                const std::vector<InstructionSet>& sets,
                                                const std::map<std::string, double>& per_set_metric,
                                                const CalibrationCostModel& model = {}) {
    std::vector<TradeoffRow> rows;
    for (const InstructionSet& set : sets) {
        const auto it = per_set_metric.find(set.name);
        if (it == per_set_metric.end()) {
            throw std::invalid_argument("tradeoff_report: no metric for set '" + set.name + "'");
        }
        TradeoffRow row;
        row.set_name = set.name;
        row.metric = it->second;
        if (!set.continuous()) {
            const int types = static_cast<int>(set.members.size());
            row.num_types = types;
            const CalibrationCost cost = calibration_cost(model, device, std::max(types, 1));
            row.circuits = types == 0 ? 0 : cost.circuits;
            row.hours = types == 0 ? 0.0 : cost.hours;
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const TradeoffRow& x, const TradeoffRow& y) {
        const int xt = x.num_types.value_or(std::numeric_limits<int>::max());
        const int yt = y.num_types.value_or(std::numeric_limits<int>::max());
        return xt < yt;
    });
    return rows;
}

inline std::string tradeoff_csv(const std::vector<TradeoffRow>& rows) {
    CsvWriter csv;
    csv.row({"set", "num_types", "circuits", "hours", "metric"});
    for (const TradeoffRow& row : rows) {
        csv.row({row.set_name,
                 row.num_types ? CsvWriter::number(*row.num_types) : std::string("unbounded"),
                 row.circuits ? CsvWriter::number(*row.circuits) : std::string("unbounded"),
                 row.hours ? CsvWriter::number(*row.hours) : std::string("unbounded"),
                 CsvWriter::number(row.metric)});
    }
    return csv.text();
}

/// Ring of n qubits (the 8-qubit octagon is the smallest cell of the
/// Aspen-style lattice).
inline std::vector<std::pair<int, int>> ring_edges(int n) {
    if (n < 2) {
        throw std::invalid_argument("ring_edges: need at least 2 qubits");
    }
    std::vector<std::pair<int, int>> edges;
    if (n == 2) {
        edges.emplace_back(0, 1);
        return edges;
    }
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    return edges;
}

/// Staggered grid of `rows` rows with `cols` qubits each; odd rows are
/// offset by half a cell and couple diagonally to both neighbors above.
/// 9 x 6 gives 54 qubits and 88 edges.
inline std::vector<std::pair<int, int>> staggered_grid_edges(int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("staggered_grid_edges: rows and cols must be >= 1");
    }
    auto id = [cols](int r, int c) { return r * cols + c; };
    std::vector<std::pair<int, int>> edges;
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (r % 2 == 0) {
                if (c - 1 >= 0) {
                    edges.emplace_back(id(r, c), id(r + 1, c - 1));
                }
                edges.emplace_back(id(r, c), id(r + 1, c));
            } else {
                edges.emplace_back(id(r, c), id(r + 1, c));
                if (c + 1 < cols) {
                    edges.emplace_back(id(r, c), id(r + 1, c + 1));
                }
            }
        }
    }
    for (auto& [a, b] : edges) {
        if (a > b) {
            std::swap(a, b);
        }
    }
    return edges;
}

/// Builds a device where every edge carries the same gate kinds at the
/// given fidelities.
inline DeviceModel make_uniform_device(int qubits, const std::vector<std::pair<int, int>>& edges,
                                       const std::vector<std::pair<GateKind, double>>& gate_fids) {
    DeviceModel device;
    device.qubit_count = qubits;
    device.single_qubit_fidelity.assign(static_cast<std::size_t>(qubits), 1.0);
    for (const auto& [a, b] : edges) {
        std::vector<DeviceModel::EdgeGate> gates;
        for (const auto& [g, f] : gate_fids) {
            gates.push_back({g, f});
        }
        device.add_edge(a, b, std::move(gates));
    }
    return device;
}

}  // namespace qsynth
