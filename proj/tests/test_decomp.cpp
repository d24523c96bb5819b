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

#include "oracles.hpp"
#include "qsynth/decompose.hpp"

using namespace qsynth;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kH[3] = {pi / 2.0, 0.0, pi};  // U3 triple of the Hadamard

Template swap_via_three_cz() {
    // SWAP as three CNOTs, CNOT = (I(x)H) CZ (I(x)H), alternating control:
    // layers L0 = I(x)H, L1 = H(x)H, L2 = H(x)H, L3 = I(x)H.
    Template t;
    t.mode = Template::Mode::FixedGate;
    t.layers = 3;
    t.gate = GateKind::cz();
    t.params = {0, 0, 0, kH[0], kH[1], kH[2],              // L0
                kH[0], kH[1], kH[2], kH[0], kH[1], kH[2],  // L1
                kH[0], kH[1], kH[2], kH[0], kH[1], kH[2],  // L2
                0, 0, 0, kH[0], kH[1], kH[2]};             // L3
    return t;
}

Template zz_via_two_cz(double beta) {
    // exp(-i beta ZZ) = CNOT (I(x)Rz(2 beta)) CNOT and H Rz H = Rx,
    // Rx(t) = U3(t, -pi/2, pi/2): layers L0 = I(x)H, L1 = I(x)Rx(2 beta),
    // L2 = I(x)H around two CZ gates.
    Template t;
    t.mode = Template::Mode::FixedGate;
    t.layers = 2;
    t.gate = GateKind::cz();
    t.params = {0, 0, 0, kH[0], kH[1], kH[2],            // L0
                0, 0, 0, 2 * beta, -pi / 2.0, pi / 2.0,  // L1
                0, 0, 0, kH[0], kH[1], kH[2]};           // L2
    return t;
}

}  // namespace

TEST_CASE("build_template_unitary") {
    SECTION("zero layers, zero angles is the identity") {
        Template t;
        t.layers = 0;
        t.params.assign(6, 0.0);
        REQUIRE((build_template_unitary(t) - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("identity sandwich reproduces the bare gate") {
        Template t;
        t.layers = 1;
        t.gate = GateKind::cz();
        t.params.assign(12, 0.0);
        REQUIRE((build_template_unitary(t) - fsim_matrix(0, pi)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("random parameters give a unitary") {
        SplitMix64 rng(5);
        Template t;
        t.layers = 2;
        t.gate = GateKind::syc();
        for (int trial = 0; trial < 20; ++trial) {
            t.params.clear();
            for (int p = 0; p < t.param_count(); ++p) {
                t.params.push_back(rng.next_double(2 * pi));
            }
            REQUIRE(unitarity_deviation(build_template_unitary(t)) < 1e-12);
        }
    }
    SECTION("parameter length mismatch is rejected") {
        Template t;
        t.layers = 1;
        t.params.assign(7, 0.0);
        REQUIRE_THROWS_AS(build_template_unitary(t), std::invalid_argument);
    }
    SECTION("textbook identities embed exactly") {
        REQUIRE_THAT(hs_fidelity(build_template_unitary(swap_via_three_cz()), swap_matrix()),
                     WithinAbs(1.0, 1e-13));
        for (double beta : {0.1, pi / 8, pi / 4, 1.9}) {
            REQUIRE_THAT(
                hs_fidelity(build_template_unitary(zz_via_two_cz(beta)), zz_interaction(beta)),
                WithinAbs(1.0, 1e-13));
        }
    }
    SECTION("continuous templates consume the gate-angle tail") {
        Template t;
        t.mode = Template::Mode::ContinuousFSim;
        t.layers = 1;
        t.params.assign(14, 0.0);
        t.params[12] = pi / 2;  // theta_1
        t.params[13] = pi;      // phi_1
        REQUIRE((build_template_unitary(t) - fsim_matrix(pi / 2, pi)).cwiseAbs().maxCoeff() <
                1e-15);
    }
}

TEST_CASE("analytic gradient matches the central-difference oracle") {
    SplitMix64 rng(99);
    const Mat4 target = haar_su4(17);
    for (auto mode : {Template::Mode::FixedGate, Template::Mode::ContinuousFSim,
                      Template::Mode::ContinuousXY}) {
        detail::TemplateObjective obj(target, mode, 2, GateKind::syc());
        for (int point = 0; point < 10; ++point) {
            Eigen::VectorXd x(obj.param_count());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                x[i] = rng.next_double(2 * pi);
            }
            const Eigen::VectorXd analytic = obj.gradient(x);
            const Eigen::VectorXd numeric = oracles::central_difference_gradient(
                [&](const Eigen::VectorXd& v) { return obj.value(v); }, x, 1e-5);
            const double scale = std::max(numeric.norm(), 1e-8);
            REQUIRE((analytic - numeric).norm() / scale < 1e-4);
        }
    }
}

TEST_CASE("optimize_fixed") {
    OptimizerConfig cfg;
    SECTION("gate equals target") {
        const Decomposition d = optimize_fixed(fsim_matrix(0, pi), GateKind::cz(), 1, cfg);
        REQUIRE(d.f_d >= 1.0 - 1e-9);
        REQUIRE(d.f_h == 1.0);
        REQUIRE(d.two_qubit_count == 1);
    }
    SECTION("SWAP from three CZ layers") {
        const Decomposition d = optimize_fixed(swap_matrix(), GateKind::cz(), 3, cfg);
        REQUIRE(d.f_d >= 1.0 - 1e-6);
    }
    SECTION("SWAP cannot be reached with two CZ layers") {
        const Decomposition d = optimize_fixed(swap_matrix(), GateKind::cz(), 2, cfg);
        REQUIRE(d.f_d < 1.0 - 1e-6);
    }
    SECTION("non-unitary target is rejected") {
        Mat4 bad = Mat4::Identity();
        bad(0, 0) = 1.5;
        REQUIRE_THROWS_AS(optimize_fixed(bad, GateKind::cz(), 1, cfg), std::invalid_argument);
    }
    SECTION("reconstruction reproduces the stored fidelity") {
        const Mat4 target = haar_su4(4);
        const Decomposition d = optimize_fixed(target, GateKind::syc(), 3, cfg);
        const double replay = hs_fidelity(build_template_unitary(d.tmpl), d.target);
        REQUIRE_THAT(replay, WithinAbs(d.f_d, 1e-9));
    }
    SECTION("deterministic, and independent of restart parallelism") {
        const Mat4 target = haar_su4(21);
        OptimizerConfig serial = cfg;
        serial.rng_seed = 77;
        OptimizerConfig wide = serial;
        wide.parallelism = 4;
        const Decomposition a = optimize_fixed(target, GateKind::cz(), 2, serial);
        const Decomposition b = optimize_fixed(target, GateKind::cz(), 2, wide);
        REQUIRE(a.f_d == b.f_d);
        REQUIRE(a.tmpl.params == b.tmpl.params);
    }
}

TEST_CASE("decompose_exact") {
    OptimizerConfig cfg;
    SECTION("generic two-qubit unitary needs three CZ layers") {
        const Decomposition d = decompose_exact(haar_su4(12), GateKind::cz(), cfg);
        REQUIRE(d.two_qubit_count == 3);
        REQUIRE(1.0 - d.f_d <= cfg.exact_infidelity);
    }
    SECTION("generic ZZ interaction needs two CZ layers") {
        const Decomposition d = decompose_exact(zz_interaction(pi / 8), GateKind::cz(), cfg);
        REQUIRE(d.two_qubit_count == 2);
    }
    SECTION("ZZ at beta = pi/4 is locally equivalent to CZ itself") {
        // diag(e^{-i pi/4}, e^{i pi/4}, e^{i pi/4}, e^{-i pi/4}) times
        // Rz(-pi/2) on each qubit is e^{-i pi/4} CZ, so one layer suffices.
        const Decomposition d = decompose_exact(zz_interaction(pi / 4), GateKind::cz(), cfg);
        REQUIRE(d.two_qubit_count == 1);
    }
    SECTION("identity needs zero layers") {
        for (const GateKind& g : {GateKind::cz(), GateKind::syc(), GateKind::iswap()}) {
            REQUIRE(decompose_exact(Mat4::Identity(), g, cfg).two_qubit_count == 0);
        }
    }
    SECTION("layer cap exhaustion carries the best attempt") {
        OptimizerConfig capped = cfg;
        capped.max_layers = 2;
        try {
            decompose_exact(swap_matrix(), GateKind::cz(), capped);
            FAIL("expected decomposition_capacity_error");
        } catch (const decomposition_capacity_error& e) {
            REQUIRE(e.best.f_d < 1.0 - 1e-6);
            REQUIRE(e.best.f_d > 0.5);
            REQUIRE(e.best.two_qubit_count <= 2);
        }
    }
    SECTION("monotone best fidelity in layer count") {
        for (std::uint64_t s : {31ULL, 32ULL, 33ULL}) {
            const Mat4 target = haar_su4(s);
            double previous = -1.0;
            for (int layers = 0; layers <= 3; ++layers) {
                const double f = optimize_fixed(target, GateKind::sqiswap(), layers, cfg).f_d;
                REQUIRE(f >= previous - 1e-9);
                previous = f;
            }
        }
    }
}

TEST_CASE("decompose_approx") {
    OptimizerConfig cfg;
    SECTION("two noisy layers beat three: the 0.8836 vs 0.8306 crossover") {
        const Mat4 target = haar_su4(1);
        const Decomposition d = decompose_approx(target, {{GateKind::cz(), 0.94}}, cfg);
        REQUIRE(d.two_qubit_count == 2);
        REQUIRE_THAT(d.f_h, WithinAbs(0.8836, 1e-12));
        REQUIRE(d.f_u > 0.94 * 0.94 * 0.94);  // strictly above the exact option's ceiling
    }
    SECTION("perfect hardware reduces to the exact search up to ties") {
        OptimizerConfig small = cfg;
        small.max_layers = 4;
        const Mat4 target = haar_su4(2);
        const Decomposition approx = decompose_approx(target, {{GateKind::cz(), 1.0}}, small);
        const Decomposition exact = decompose_exact(target, GateKind::cz(), small);
        REQUIRE(approx.f_u >= exact.f_u - 1e-12);
        const bool same_layers = approx.two_qubit_count == exact.two_qubit_count;
        const bool strictly_better = approx.f_d > exact.f_d + 1e-12;
        REQUIRE((same_layers || strictly_better));
    }
    SECTION("dominates the exact decomposition at the same fidelities") {
        for (std::uint64_t s : {41ULL, 42ULL, 43ULL, 44ULL, 45ULL}) {
            const Mat4 target = haar_su4(s);
            const double fid = 0.96;
            const Decomposition approx = decompose_approx(target, {{GateKind::cz(), fid}}, cfg);
            const Decomposition exact = decompose_exact(target, GateKind::cz(), cfg);
            const double exact_fu = exact.f_d * std::pow(fid, exact.two_qubit_count);
            REQUIRE(approx.f_u >= exact_fu - 1e-9);
        }
    }
    SECTION("tie-breaking prefers fewer layers, then earlier gates") {
        // The identity decomposes with zero layers for every gate; all
        // candidates tie at f_u = 1, so the first gate at zero layers wins.
        const Decomposition d = decompose_approx(
            Mat4::Identity(), {{GateKind::syc(), 0.99}, {GateKind::cz(), 0.99}}, cfg);
        REQUIRE(d.two_qubit_count == 0);
        REQUIRE(d.tmpl.gate.name == "syc");
    }
    SECTION("argument validation") {
        REQUIRE_THROWS_AS(decompose_approx(Mat4::Identity(), {}, cfg), std::invalid_argument);
        REQUIRE_THROWS_AS(decompose_approx(Mat4::Identity(), {{GateKind::cz(), 0.0}}, cfg),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(decompose_approx(Mat4::Identity(), {{GateKind::cz(), 1.2}}, cfg),
                          std::invalid_argument);
    }
}

TEST_CASE("decompose_continuous") {
    OptimizerConfig cfg;
    SECTION("generic unitary needs two free fSim layers") {
        const Decomposition d = decompose_continuous(haar_su4(3), ContinuousFamily::FullFSim, cfg);
        REQUIRE(d.two_qubit_count == 2);
        REQUIRE(1.0 - d.f_d <= cfg.exact_infidelity);
    }
    SECTION("SWAP needs one free fSim layer") {
        const Decomposition d = decompose_continuous(swap_matrix(), ContinuousFamily::FullFSim, cfg);
        REQUIRE(d.two_qubit_count == 1);
    }
    SECTION("ZZ interactions need one free fSim layer") {
        const Decomposition d =
            decompose_continuous(zz_interaction(pi / 8), ContinuousFamily::FullFSim, cfg);
        REQUIRE(d.two_qubit_count == 1);
    }
    SECTION("hopping terms live inside the XY family") {
        const Decomposition d =
            decompose_continuous(xxyy_interaction(1.1), ContinuousFamily::FullXY, cfg);
        REQUIRE(d.two_qubit_count == 1);
    }
}
