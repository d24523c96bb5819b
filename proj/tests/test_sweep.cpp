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

#include <cstdio>
#include <fstream>

#include "qsynth/sweep.hpp"

using namespace qsynth;
using Catch::Matchers::WithinAbs;

namespace {

OptimizerConfig sweep_cfg() {
    OptimizerConfig cfg;
    cfg.max_layers = 6;  // the characterization band tops out at 6 gates
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("swap ensemble on a coarse grid reproduces the known ladder") {
    SweepSpec spec;
    spec.theta_points = 5;  // {0, pi/8, pi/4, 3pi/8, pi/2}
    spec.phi_points = 5;    // {0, pi/4, pi/2, 3pi/4, pi}
    spec.ensemble = Ensemble::SWAP;
    spec.seed = 1;
    const SweepResult result = run_sweep(spec, sweep_cfg(), 2);

    // Known points: the SWAP-equivalent gate needs 1 application, the
    // half-way point 2, and CZ 3.
    const SweepCell& at_swap = result.cell(4, 4);  // (pi/2, pi)
    REQUIRE(at_swap.failures == 0);
    REQUIRE_THAT(at_swap.mean_count, WithinAbs(1.0, 1e-12));
    const SweepCell& mid = result.cell(2, 2);  // (pi/4, pi/2)
    REQUIRE(mid.failures == 0);
    REQUIRE_THAT(mid.mean_count, WithinAbs(2.0, 1e-12));
    const SweepCell& at_cz = result.cell(0, 4);  // (0, pi)
    REQUIRE(at_cz.failures == 0);
    REQUIRE_THAT(at_cz.mean_count, WithinAbs(3.0, 1e-12));

    // The identity corner cannot entangle: recorded as failure, not error.
    REQUIRE(result.cell(0, 0).failures == 1);

    // Wherever decomposition succeeded the count sits in the [1, 6] band
    // (the target is entangling, so 0 layers never suffice).
    for (const SweepCell& cell : result.grid) {
        if (cell.failures == 0) {
            REQUIRE(cell.mean_count >= 1.0);
            REQUIRE(cell.mean_count <= 6.0);
        }
    }
}

TEST_CASE("sweep determinism under parallelism") {
    SweepSpec spec;
    spec.theta_points = 3;
    spec.phi_points = 3;
    spec.ensemble = Ensemble::QAOA;
    spec.ensemble_size = 4;
    spec.seed = 9;
    const SweepResult serial = run_sweep(spec, sweep_cfg(), 1);
    const SweepResult wide = run_sweep(spec, sweep_cfg(), 4);
    REQUIRE(serial.grid.size() == wide.grid.size());
    for (std::size_t i = 0; i < serial.grid.size(); ++i) {
        REQUIRE(serial.grid[i].mean_count == wide.grid[i].mean_count);
        REQUIRE(serial.grid[i].min_count == wide.grid[i].min_count);
        REQUIRE(serial.grid[i].max_count == wide.grid[i].max_count);
        REQUIRE(serial.grid[i].failures == wide.grid[i].failures);
    }
    REQUIRE(sweep_to_csv(serial) == sweep_to_csv(wide));
}

TEST_CASE("the CZ grid column reuses the plain exact-decomposition path") {
    SweepSpec spec;
    spec.theta_points = 2;  // {0, pi/2}
    spec.phi_points = 2;    // {0, pi}
    spec.ensemble = Ensemble::QV;
    spec.ensemble_size = 3;
    spec.seed = 33;
    const OptimizerConfig cfg = sweep_cfg();
    const SweepResult result = run_sweep(spec, cfg, 2);

    const std::vector<Mat4> targets = ensemble_targets(spec);
    long long total = 0;
    for (std::size_t m = 0; m < targets.size(); ++m) {
        OptimizerConfig member_cfg = cfg;
        member_cfg.rng_seed = derive_seed(cfg.rng_seed, m);
        total += decompose_exact(targets[m], GateKind::cz(), member_cfg).two_qubit_count;
    }
    const SweepCell& cz_cell = result.cell(0, 1);
    REQUIRE(cz_cell.failures == 0);
    REQUIRE_THAT(cz_cell.mean_count, WithinAbs(static_cast<double>(total) / 3.0, 0.0));
}

TEST_CASE("heatmap CSV export") {
    SweepSpec spec;
    spec.theta_points = 3;
    spec.phi_points = 4;
    spec.ensemble = Ensemble::SWAP;
    spec.seed = 2;
    const SweepResult result = run_sweep(spec, sweep_cfg(), 2);
    const std::string csv = sweep_to_csv(result);

    SECTION("row count and header") {
        REQUIRE(csv.rfind("theta,phi,mean_count,min_count,max_count,failures\r\n", 0) == 0);
        std::size_t lines = 0;
        for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos; pos += 2) {
            ++lines;
        }
        REQUIRE(lines == 1 + 12);  // header + theta_points * phi_points
    }
    SECTION("theta-major ordering: phi varies fastest") {
        const auto first_data = csv.find("\r\n") + 2;
        const auto second_row_start = csv.find("\r\n", first_data) + 2;
        const std::string row0 = csv.substr(first_data, csv.find("\r\n", first_data) - first_data);
        const std::string row1 =
            csv.substr(second_row_start, csv.find("\r\n", second_row_start) - second_row_start);
        REQUIRE(row0.substr(0, 2) == "0,");
        REQUIRE(row1.substr(0, 2) == "0,");  // same theta, next phi
        REQUIRE(row0 != row1);
    }
    SECTION("byte-identical across runs and through the file writer") {
        const SweepResult again = run_sweep(spec, sweep_cfg(), 1);
        REQUIRE(sweep_to_csv(again) == csv);
        const std::string path = "sweep_test_export.csv";
        export_heatmap_csv(result, path);
        REQUIRE(slurp(path) == csv);
        std::remove(path.c_str());
    }
    SECTION("unwritable path raises an io error") {
        REQUIRE_THROWS_AS(export_heatmap_csv(result, "/nonexistent_dir/x.csv"), io_error);
    }
}

TEST_CASE("gate shortlist selection") {
    SweepSpec grid;
    grid.theta_points = 2;
    grid.phi_points = 2;
    auto make_result = [&](std::vector<double> means, std::vector<int> failures) {
        SweepResult r;
        r.spec = grid;
        for (std::size_t i = 0; i < means.size(); ++i) {
            SweepCell cell;
            cell.mean_count = means[i];
            cell.min_count = 1;
            cell.max_count = 6;
            cell.failures = failures[i];
            r.grid.push_back(cell);
        }
        return r;
    };

    SECTION("ranks by summed mean count ascending") {
        const SweepResult a = make_result({3, 1, 2, 5}, {0, 0, 0, 0});
        const SweepResult b = make_result({1, 1, 4, 4}, {0, 0, 0, 0});
        const auto top = select_gate_shortlist({a, b}, 2);
        REQUIRE(top.size() == 2);
        // cell 1 = (theta 0, phi pi) scores 2; cell 0 = (0, 0) scores 4.
        REQUIRE(same_gate(top[0], GateKind::cz()));
        REQUIRE(same_gate(top[1], GateKind::fsim(0, 0)));
    }
    SECTION("cells with failures are ineligible") {
        const SweepResult a = make_result({3, 1, 2, 5}, {0, 1, 0, 0});
        const auto top = select_gate_shortlist({a}, 1);
        REQUIRE(top.size() == 1);
        REQUIRE(same_gate(top[0], GateKind::fsim(pi / 2, 0)));  // cell 2 is now the minimum
    }
    SECTION("k covering the whole grid returns all eligible points sorted") {
        const SweepResult a = make_result({3, 1, 2, 5}, {0, 0, 0, 0});
        const auto all = select_gate_shortlist({a}, 10);
        REQUIRE(all.size() == 4);
        REQUIRE(same_gate(all[0], GateKind::cz()));
        REQUIRE(same_gate(all[3], GateKind::swap()));  // (pi/2, pi), the worst cell
    }
    SECTION("grid mismatch and empty input are rejected") {
        SweepResult other = make_result({1, 1, 1, 1}, {0, 0, 0, 0});
        other.spec.phi_points = 3;
        const SweepResult a = make_result({3, 1, 2, 5}, {0, 0, 0, 0});
        REQUIRE_THROWS_AS(select_gate_shortlist({a, other}, 1), std::invalid_argument);
        REQUIRE_THROWS_AS(select_gate_shortlist({}, 1), std::invalid_argument);
    }
}
