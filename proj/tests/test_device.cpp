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

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "qsynth/device.hpp"

using namespace qsynth;
using Catch::Matchers::WithinAbs;

namespace {

std::set<std::uint64_t> member_keys(const InstructionSet& set) {
    std::set<std::uint64_t> keys;
    for (const GateKind& g : set.members) {
        keys.insert(gate_key(g));
    }
    return keys;
}

}  // namespace

TEST_CASE("instruction set registry matches the studied table") {
    SECTION("single-gate sets") {
        REQUIRE(instruction_set("S1").members.size() == 1);
        REQUIRE(same_gate(instruction_set("S1").members[0], GateKind::syc()));
        REQUIRE(same_gate(instruction_set("S2").members[0], GateKind::sqiswap()));
        REQUIRE(same_gate(instruction_set("S3").members[0], GateKind::cz()));
        REQUIRE(same_gate(instruction_set("S4").members[0], GateKind::iswap()));
        REQUIRE(same_gate(instruction_set("S5").members[0], GateKind::fsim(pi / 3, 0)));
        REQUIRE(same_gate(instruction_set("S6").members[0], GateKind::fsim(3 * pi / 8, 0)));
        REQUIRE(same_gate(instruction_set("S7").members[0], GateKind::fsim(pi / 6, pi)));
    }
    SECTION("combination sets") {
        const InstructionSet g1 = instruction_set("G1");
        REQUIRE(g1.members.size() == 2);
        REQUIRE(same_gate(g1.members[0], GateKind::syc()));
        REQUIRE(same_gate(g1.members[1], GateKind::sqiswap()));

        const InstructionSet g2 = instruction_set("G2");
        REQUIRE(g2.members.size() == 3);
        REQUIRE(same_gate(g2.members[2], GateKind::cz()));

        const InstructionSet g7 = instruction_set("G7");
        REQUIRE(g7.members.size() == 8);
        REQUIRE(same_gate(g7.members.back(), GateKind::swap()));

        const InstructionSet r5 = instruction_set("R5");
        REQUIRE(r5.members.size() == 6);
        REQUIRE(same_gate(r5.members[0], GateKind::sqiswap()));
        REQUIRE(same_gate(r5.members[1], GateKind::cz()));
        REQUIRE(same_gate(r5.members[2], GateKind::iswap()));
        REQUIRE(same_gate(r5.members[3], GateKind::fsim(pi / 3, 0)));
        REQUIRE(same_gate(r5.members[4], GateKind::fsim(3 * pi / 8, 0)));
        REQUIRE(same_gate(r5.members[5], GateKind::swap()));
    }
    SECTION("inclusion chains G1 through G7 and R1 through R5") {
        for (int n = 2; n <= 7; ++n) {
            const auto smaller = member_keys(instruction_set("G" + std::to_string(n - 1)));
            const auto larger = member_keys(instruction_set("G" + std::to_string(n)));
            REQUIRE(std::includes(larger.begin(), larger.end(), smaller.begin(), smaller.end()));
            REQUIRE(larger.size() == smaller.size() + 1);
        }
        for (int n = 2; n <= 5; ++n) {
            const auto smaller = member_keys(instruction_set("R" + std::to_string(n - 1)));
            const auto larger = member_keys(instruction_set("R" + std::to_string(n)));
            REQUIRE(std::includes(larger.begin(), larger.end(), smaller.begin(), smaller.end()));
        }
    }
    SECTION("continuous families and unknown names") {
        REQUIRE(instruction_set("FullXY").continuous());
        REQUIRE(instruction_set("fullfsim").family == ContinuousFamily::FullFSim);
        REQUIRE_THROWS_AS(instruction_set("S9"), not_found_error);
        REQUIRE_THROWS_AS(instruction_set("bogus"), not_found_error);
    }
}

TEST_CASE("device JSON round trip and validation") {
    json j = {
        {"qubits", 8},
        {"edges", json::array()},
    };
    for (int q = 0; q < 8; ++q) {
        j["edges"].push_back({{"a", q},
                              {"b", (q + 1) % 8},
                              {"gates", {{"cz", 0.91 + 0.01 * q}, {"xy:3.141592653589793", 0.9}}}});
    }
    j["single_qubit_fidelity"] = {{"0", 0.999}};

    SECTION("ring fixture loads with 8 edges and keyed fidelities") {
        const DeviceModel device = device_from_json(j);
        REQUIRE(device.qubit_count == 8);
        REQUIRE(device.edges.size() == 8);
        const auto edge = device.edge_index(1, 0);
        REQUIRE(edge.has_value());
        REQUIRE_THAT(*device.fidelity_for(*edge, GateKind::cz()), WithinAbs(0.91, 1e-15));
        // XY(pi) and iSWAP are the same gate type.
        REQUIRE(device.fidelity_for(*edge, GateKind::iswap()).has_value());
        REQUIRE(device.single_qubit_fidelity[0] == 0.999);
        REQUIRE(device.single_qubit_fidelity[1] == 1.0);
    }
    SECTION("serialize then reload is the identity") {
        const DeviceModel device = device_from_json(j);
        const DeviceModel reloaded = device_from_json(device_to_json(device));
        REQUIRE(reloaded.qubit_count == device.qubit_count);
        REQUIRE(reloaded.edges.size() == device.edges.size());
        for (std::size_t e = 0; e < device.edges.size(); ++e) {
            REQUIRE(reloaded.edges[e].a == device.edges[e].a);
            REQUIRE(reloaded.edges[e].b == device.edges[e].b);
            for (const auto& eg : device.edge_gates[e]) {
                const auto fid = reloaded.fidelity_for(static_cast<int>(e), eg.gate);
                REQUIRE(fid.has_value());
                REQUIRE(*fid == eg.fidelity);
            }
        }
        REQUIRE(reloaded.single_qubit_fidelity == device.single_qubit_fidelity);
    }
    SECTION("empty edge list is a valid single-qubit-only device") {
        const DeviceModel device = device_from_json({{"qubits", 3}});
        REQUIRE(device.qubit_count == 3);
        REQUIRE(device.edges.empty());
    }
    SECTION("rejections carry field context") {
        json bad = j;
        bad["edges"][2]["gates"]["cz"] = 1.2;
        REQUIRE_THROWS_WITH(device_from_json(bad),
                            Catch::Matchers::ContainsSubstring("edges[2]"));
        bad = j;
        bad["edges"][0]["b"] = 11;
        REQUIRE_THROWS_AS(device_from_json(bad), parse_error);
        bad = j;
        bad["edges"][0]["b"] = 0;
        REQUIRE_THROWS_WITH(device_from_json(bad), Catch::Matchers::ContainsSubstring("self-loop"));
        bad = j;
        bad["edges"][0]["gates"]["cnot"] = 0.9;
        REQUIRE_THROWS_AS(device_from_json(bad), parse_error);
    }
}

TEST_CASE("calibration cost model") {
    const CalibrationCostModel model;
    SECTION("defaults sum to the per-pair total") {
        REQUIRE(model.step_sum() == model.total_per_pair_per_type);
        REQUIRE(model.circuits_xeb == 1000);
        REQUIRE(model.hours_per_type_per_pair == 2.0);
    }
    SECTION("unit case: one edge, one type") {
        const DeviceModel device = make_uniform_device(2, {{0, 1}}, {{GateKind::cz(), 0.99}});
        const CalibrationCost cost = calibration_cost(model, device, 1);
        REQUIRE(cost.circuits == 10000);
        REQUIRE_THAT(cost.hours, WithinAbs(2.0, 1e-12));
    }
    SECTION("the 54-qubit grid at 10 types lands near 1e7 circuits") {
        const auto edges = staggered_grid_edges(9, 6);
        REQUIRE(edges.size() == 88);
        const DeviceModel device = make_uniform_device(54, edges, {{GateKind::syc(), 0.99}});
        const CalibrationCost cost = calibration_cost(model, device, 10);
        REQUIRE(cost.circuits == 8'800'000);
    }
    SECTION("linearity in gate types") {
        const DeviceModel device =
            make_uniform_device(8, ring_edges(8), {{GateKind::cz(), 0.95}});
        for (int a = 1; a <= 4; ++a) {
            for (int b = 1; b <= 4; ++b) {
                const auto ca = calibration_cost(model, device, a);
                const auto cb = calibration_cost(model, device, b);
                const auto cab = calibration_cost(model, device, a + b);
                REQUIRE(cab.circuits == ca.circuits + cb.circuits);
                REQUIRE_THAT(cab.hours, WithinAbs(ca.hours + cb.hours, 1e-9));
            }
        }
        REQUIRE_THROWS_AS(calibration_cost(model, device, 0), std::invalid_argument);
    }
    SECTION("JSON config honors the step-sum invariant") {
        const json cfg = {{"circuits_cphase", 2000}, {"circuits_iswap", 2000},
                          {"circuits_theta_tune", 1000}, {"circuits_tomography", 500},
                          {"circuits_xeb", 1000}};
        const CalibrationCostModel m = calibration_model_from_json(cfg);
        REQUIRE(m.total_per_pair_per_type == 6500);
        json contradictory = cfg;
        contradictory["total_per_pair_per_type"] = 9999;
        REQUIRE_THROWS_AS(calibration_model_from_json(contradictory), parse_error);
        const CalibrationCostModel only_total =
            calibration_model_from_json({{"total_per_pair_per_type", 4000}});
        REQUIRE(only_total.total_per_pair_per_type == 4000);
    }
}

TEST_CASE("tradeoff report") {
    const DeviceModel device = make_uniform_device(8, ring_edges(8), {{GateKind::cz(), 0.95}});
    SECTION("rows sorted by type count with monotone circuit counts") {
        const std::vector<InstructionSet> sets = {instruction_set("G7"), instruction_set("S2"),
                                                  instruction_set("G1")};
        const std::map<std::string, double> metrics = {{"G7", 0.9}, {"S2", 0.6}, {"G1", 0.7}};
        const auto rows = tradeoff_report(device, sets, metrics);
        REQUIRE(rows.size() == 3);
        REQUIRE(rows[0].set_name == "S2");
        REQUIRE(rows[1].set_name == "G1");
        REQUIRE(rows[2].set_name == "G7");
        REQUIRE(*rows[0].circuits < *rows[1].circuits);
        REQUIRE(*rows[1].circuits < *rows[2].circuits);
        REQUIRE(*rows[2].circuits == 8LL * 8 * 10000);
    }
    SECTION("continuous families report unbounded cost and sort last") {
        const std::vector<InstructionSet> sets = {instruction_set("FullFSim"),
                                                  instruction_set("S3")};
        const std::map<std::string, double> metrics = {{"FullFSim", 0.95}, {"S3", 0.5}};
        const auto rows = tradeoff_report(device, sets, metrics);
        REQUIRE(rows[0].set_name == "S3");
        REQUIRE(rows[1].set_name == "FullFSim");
        REQUIRE_FALSE(rows[1].circuits.has_value());
        const std::string csv = tradeoff_csv(rows);
        REQUIRE(csv.find("unbounded") != std::string::npos);
        REQUIRE(csv.find("\r\n") != std::string::npos);
    }
    SECTION("missing metric is an error, empty input is an empty table") {
        REQUIRE_THROWS_AS(tradeoff_report(device, {instruction_set("S1")}, {}),
                          std::invalid_argument);
        REQUIRE(tradeoff_report(device, {}, {}).empty());
    }
}

TEST_CASE("topology generators") {
    SECTION("ring") {
        REQUIRE(ring_edges(8).size() == 8);
        REQUIRE(ring_edges(2).size() == 1);
        REQUIRE_THROWS_AS(ring_edges(1), std::invalid_argument);
    }
    SECTION("staggered grid: 9 rows of 6 gives 54 qubits, 88 couplers") {
        const auto edges = staggered_grid_edges(9, 6);
        REQUIRE(edges.size() == 88);
        std::set<std::pair<int, int>> unique(edges.begin(), edges.end());
        REQUIRE(unique.size() == edges.size());
        for (const auto& [a, b] : edges) {
            REQUIRE(a < b);
            REQUIRE(a >= 0);
            REQUIRE(b < 54);
        }
    }
}
