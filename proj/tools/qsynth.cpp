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

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qsynth/qsynth.hpp"

namespace {

using namespace qsynth;

// Exit codes: 0 success, 2 parse/validation, 3 capacity exceeded,
// 4 missing calibration data, 5 I/O.
constexpr int kExitParse = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitMissingCalibration = 4;
constexpr int kExitIo = 5;

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void log_info(const std::string& msg) {
    if (g_log_level >= 1) {
        std::cerr << "[qsynth] " << msg << "\n";
    }
}

int env_int(const char* name, int fallback) {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') {
        return fallback;
    }
    return std::atoi(value);
}

struct OptimizerFlags {
    int max_layers = -1;
    int restarts = -1;
    int max_iters = -1;
    double infidelity = -1.0;
    double conv_tol = -1.0;
    double grad_step = -1.0;
    std::string grad_mode;

    void attach(CLI::App* cmd) {
        cmd->add_option("--max-layers", max_layers, "Layer-growth cap");
        cmd->add_option("--restarts", restarts, "Optimizer restarts per layer count");
        cmd->add_option("--max-iters", max_iters, "Iteration cap per restart");
        cmd->add_option("--infidelity", infidelity, "Exact-mode infidelity threshold");
        cmd->add_option("--conv-tol", conv_tol, "Gradient-norm stopping tolerance");
        cmd->add_option("--grad-step", grad_step, "Finite-difference step");
        cmd->add_option("--grad", grad_mode, "Gradient mode: analytic|fd");
    }

    OptimizerConfig resolve(std::uint64_t seed, int parallelism) const {
        OptimizerConfig cfg;
        if (max_layers >= 0) cfg.max_layers = max_layers;
        if (restarts >= 0) cfg.restarts = restarts;
        if (max_iters >= 0) cfg.max_iters = max_iters;
        if (infidelity >= 0.0) cfg.exact_infidelity = infidelity;
        if (conv_tol >= 0.0) cfg.conv_tol = conv_tol;
        if (grad_step >= 0.0) cfg.grad_step = grad_step;
        if (grad_mode == "fd") {
            cfg.grad_mode = OptimizerConfig::GradMode::CentralDiff;
        } else if (!grad_mode.empty() && grad_mode != "analytic") {
            throw parse_error("unknown gradient mode '" + grad_mode + "'");
        }
        cfg.rng_seed = seed;
        cfg.parallelism = parallelism;
        cfg.validate();
        return cfg;
    }
};

Mat4 resolve_target(const std::string& spec, double param, std::uint64_t seed) {
    if (spec == "identity") {
        return Mat4::Identity();
    }
    if (spec == "swap") {
        return app_unitary(AppKind::SWAP);
    }
    if (spec == "qv") {
        return app_unitary(AppKind::QV, seed);
    }
    if (spec == "qaoa-zz") {
        return app_unitary(AppKind::QAOA_ZZ, param);
    }
    if (spec == "fh-zz") {
        return app_unitary(AppKind::FH_ZZ, param);
    }
    if (spec == "fh-xxyy") {
        return app_unitary(AppKind::FH_XXYY, param);
    }
    if (spec == "qft-cp") {
        return app_unitary(AppKind::QFT_CP, param);
    }
    if (std::filesystem::exists(spec)) {
        const MatX m = matrix_from_json(load_json_file(spec), spec);
        if (m.rows() != 4 || m.cols() != 4) {
            throw parse_error(spec + ": expected a 4x4 matrix");
        }
        return Mat4(m);
    }
    throw parse_error("unknown target '" + spec +
                      "' (named targets: identity, swap, qv, qaoa-zz, qft-cp, fh-zz, fh-xxyy; "
                      "otherwise a matrix JSON file)");
}

int run_decompose(const std::string& target_spec, double param, std::uint64_t seed,
                  const std::string& gate_spec, std::string mode, double fidelity, double f1q,
                  const OptimizerFlags& flags, int parallelism, const std::string& out_path) {
    const Mat4 target = resolve_target(target_spec, param, seed);
    const OptimizerConfig cfg = flags.resolve(seed, parallelism);

    std::optional<InstructionSet> set;
    try {
        set = instruction_set(gate_spec);
    } catch (const not_found_error&) {
        // plain gate spec
    }
    if (set && set->continuous()) {
        mode = "continuous";
    }

    Decomposition d;
    if (mode == "continuous") {
        const ContinuousFamily family =
            set && set->family ? *set->family : ContinuousFamily::FullFSim;
        d = decompose_continuous(target, family, cfg);
    } else if (mode == "approx") {
        std::vector<std::pair<GateKind, double>> gates;
        if (set) {
            for (const GateKind& g : set->members) {
                gates.emplace_back(g, fidelity);
            }
        } else {
            gates.emplace_back(parse_gate(gate_spec), fidelity);
        }
        d = decompose_approx(target, gates, cfg, f1q);
    } else if (mode == "exact") {
        std::vector<GateKind> gates;
        if (set) {
            gates = set->members;
        } else {
            gates.push_back(parse_gate(gate_spec));
        }
        std::optional<Decomposition> best;
        for (const GateKind& g : gates) {
            Decomposition candidate = decompose_exact(target, g, cfg);
            if (!best || candidate.two_qubit_count < best->two_qubit_count) {
                best = std::move(candidate);
            }
        }
        d = std::move(*best);
    } else {
        throw parse_error("unknown mode '" + mode + "' (exact|approx|continuous)");
    }

    json report = decomposition_to_json(d);
    report["mode"] = mode;
    report["target_spec"] = target_spec;
    report["seed"] = seed;
    write_json_file(out_path, report);
    std::printf("layers %d f_d %.12g f_h %.12g f_u %.12g\n", d.two_qubit_count, d.f_d, d.f_h,
                d.f_u);
    log_info("report written to " + out_path);
    return 0;
}

int run_compile(const std::string& circuit_path, const std::string& device_path,
                const std::string& iset_name, const std::string& mode_name,
                const OptimizerFlags& flags, std::uint64_t seed, int parallelism,
                const std::string& out_circuit, const std::string& out_report,
                const std::string& out_csv) {
    const Circuit circuit = load_circuit(circuit_path);
    const DeviceModel device = load_device(device_path);
    const InstructionSet iset = instruction_set(iset_name);
    CompileMode mode;
    if (mode_name == "exact") {
        mode = CompileMode::Exact;
    } else if (mode_name == "approx") {
        mode = CompileMode::Approx;
    } else if (mode_name == "continuous") {
        mode = CompileMode::Continuous;
    } else {
        throw parse_error("unknown mode '" + mode_name + "' (exact|approx|continuous)");
    }
    const OptimizerConfig cfg = flags.resolve(seed, 1);

    CompileResult result = compile_circuit(circuit, device, iset, cfg, mode, parallelism);
    if (circuit.qubit_count <= 12) {
        result.report.verification_fidelity = verify_circuit(circuit, result.circuit);
    }

    write_json_file(out_circuit, circuit_to_json(result.circuit));
    write_json_file(out_report, compile_report_to_json(result.report));
    if (!out_csv.empty()) {
        write_text_file(out_csv, compile_report_to_csv(result.report));
    }
    std::printf("two_qubit_count %lld est_fidelity %.12g", result.report.two_qubit_count,
                result.report.est_fidelity);
    if (result.report.verification_fidelity) {
        std::printf(" verification %.12g", *result.report.verification_fidelity);
    }
    std::printf("\n");
    for (const auto& row : result.report.per_gate) {
        std::printf("op %zu (%d,%d) gate %s layers %d f_u %.6g\n", row.op_index, row.a, row.b,
                    row.gate.c_str(), row.layers, row.f_u);
    }
    return 0;
}

int run_sweep_cmd(const std::string& ensemble_name_str, const std::string& grid, int size,
                  bool full_scale, std::uint64_t seed, const OptimizerFlags& flags,
                  int parallelism, const std::string& out_csv, const std::string& out_json) {
    SweepSpec spec;
    spec.ensemble = ensemble_from_name(ensemble_name_str);
    const auto x = grid.find('x');
    if (x == std::string::npos) {
        throw parse_error("grid must look like '19x19'");
    }
    spec.theta_points = std::stoi(grid.substr(0, x));
    spec.phi_points = std::stoi(grid.substr(x + 1));
    if (size > 0) {
        spec.ensemble_size = size;
    } else if (!full_scale &&
               (spec.ensemble == Ensemble::QV || spec.ensemble == Ensemble::QAOA)) {
        spec.ensemble_size = 50;  // desk-scale default; --full restores 1000
    }
    spec.seed = seed;

    OptimizerFlags sweep_flags = flags;
    if (sweep_flags.max_layers < 0) {
        sweep_flags.max_layers = 6;  // characterization band: 1..6 gates
    }
    const OptimizerConfig cfg = sweep_flags.resolve(seed, 1);

    log_info("sweeping " + std::to_string(spec.theta_points) + "x" +
             std::to_string(spec.phi_points) + " grid, ensemble size " +
             std::to_string(spec.resolved_size()));
    const SweepResult result = run_sweep(spec, cfg, parallelism);
    export_heatmap_csv(result, out_csv);
    if (!out_json.empty()) {
        write_json_file(out_json, sweep_to_json(result));
    }
    std::printf("cells %d ensemble %d wall_time_s %.3f csv %s\n",
                spec.theta_points * spec.phi_points, spec.resolved_size(), result.wall_time_s,
                out_csv.c_str());
    return 0;
}

int run_calibrate_cost(const std::string& device_path, int types, const std::string& config_path,
                       const std::string& sets_arg, const std::string& metrics_path,
                       const std::string& out_report, const std::string& out_csv) {
    const DeviceModel device = load_device(device_path);
    CalibrationCostModel model;
    if (!config_path.empty()) {
        model = calibration_model_from_json(load_json_file(config_path));
    }
    const CalibrationCost cost = calibration_cost(model, device, types);
    json report;
    report["edges"] = device.edges.size();
    report["gate_types"] = types;
    report["circuits"] = cost.circuits;
    report["hours"] = cost.hours;

    if (!sets_arg.empty()) {
        std::vector<InstructionSet> sets;
        std::string token;
        std::stringstream ss(sets_arg);
        while (std::getline(ss, token, ',')) {
            sets.push_back(instruction_set(token));
        }
        std::map<std::string, double> metrics;
        if (!metrics_path.empty()) {
            for (const auto& [k, v] : load_json_file(metrics_path).items()) {
                metrics[k] = v.get<double>();
            }
        }
        const auto rows = tradeoff_report(device, sets, metrics, model);
        if (!out_csv.empty()) {
            write_text_file(out_csv, tradeoff_csv(rows));
        }
        json jrows = json::array();
        for (const auto& row : rows) {
            json r = {{"set", row.set_name}, {"metric", row.metric}};
            if (row.num_types) r["num_types"] = *row.num_types;
            if (row.circuits) r["circuits"] = *row.circuits;
            if (row.hours) r["hours"] = *row.hours;
            jrows.push_back(std::move(r));
        }
        report["tradeoff"] = std::move(jrows);
    }
    write_json_file(out_report, report);
    std::printf("edges %zu types %d circuits %lld hours %.3f\n", device.edges.size(), types,
                cost.circuits, cost.hours);
    return 0;
}

int run_bench(int gates, int threads, const std::string& gate_spec, std::uint64_t seed,
              const OptimizerFlags& flags, const std::string& out_report) {
    const GateKind gate = parse_gate(gate_spec);
    const OptimizerConfig cfg = flags.resolve(seed, 1);

    std::vector<Mat4> targets;
    targets.reserve(static_cast<std::size_t>(gates));
    for (int g = 0; g < gates; ++g) {
        targets.push_back(haar_su4(derive_seed(seed, static_cast<std::uint64_t>(g))));
    }
    auto run_once = [&](int width) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<int> layers(targets.size());
        parallel_for(targets.size(), width, [&](std::size_t i) {
            OptimizerConfig task_cfg = cfg;
            task_cfg.rng_seed = derive_seed(cfg.rng_seed, i);
            layers[i] = decompose_exact(targets[i], gate, task_cfg).two_qubit_count;
        });
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const double t_wide = run_once(threads);
    double t_serial = t_wide;
    double speedup = 1.0;
    if (threads > 1) {
        t_serial = run_once(1);
        speedup = t_serial / t_wide;
    }
    const double rate = gates / t_wide;
    std::printf("gates %d threads %d wall_s %.3f gates_per_s %.2f speedup %.2f\n", gates, threads,
                t_wide, rate, speedup);
    const unsigned cores = std::thread::hardware_concurrency();
    if (threads > 1 && static_cast<unsigned>(threads) <= cores && speedup < 0.75 * threads) {
        std::cerr << "warning: speedup " << speedup << " below the near-linear expectation for "
                  << threads << " threads\n";
    }
    json report = {{"gates", gates},       {"threads", threads}, {"wall_s", t_wide},
                   {"serial_s", t_serial}, {"speedup", speedup}, {"gates_per_s", rate}};
    write_json_file(out_report, report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-qubit unitary synthesis for fSim/XY-family instruction sets"};
    app.require_subcommand(1);
    g_log_level = env_int("QSYNTH_LOG_LEVEL", 1);
    const int default_parallelism = env_int("QSYNTH_PARALLELISM", 1);

    // decompose
    auto* dec = app.add_subcommand("decompose", "Decompose one two-qubit unitary");
    std::string dec_target;
    std::string dec_gate;
    std::string dec_mode = "exact";
    double dec_param = 0.0;
    double dec_fidelity = 1.0;
    double dec_f1q = 1.0;
    std::uint64_t dec_seed = 0;
    int dec_parallelism = default_parallelism;
    std::string dec_out = "decompose_report.json";
    OptimizerFlags dec_flags;
    dec->add_option("--target", dec_target, "Named unitary or matrix JSON file")->required();
    dec->add_option("--gate", dec_gate, "Gate spec (cz, syc, fsim:t,p, ...) or set name")
        ->required();
    dec->add_option("--mode", dec_mode, "exact|approx|continuous");
    dec->add_option("--param", dec_param, "Angle (or ladder index) for parameterized targets");
    dec->add_option("--fidelity", dec_fidelity, "Per-gate hardware fidelity (approx mode)");
    dec->add_option("--f1q", dec_f1q, "Single-qubit gate fidelity (approx mode)");
    dec->add_option("--seed", dec_seed, "Root seed");
    dec->add_option("--parallelism", dec_parallelism, "Restart parallelism");
    dec->add_option("--out", dec_out, "Report JSON path");
    dec_flags.attach(dec);

    // compile
    auto* cmp = app.add_subcommand("compile", "Compile a circuit for a device");
    std::string cmp_circuit;
    std::string cmp_device;
    std::string cmp_iset;
    std::string cmp_mode = "approx";
    std::uint64_t cmp_seed = 0;
    int cmp_parallelism = default_parallelism;
    std::string cmp_out_circuit = "compiled_circuit.json";
    std::string cmp_out_report = "compile_report.json";
    std::string cmp_out_csv;
    OptimizerFlags cmp_flags;
    cmp->add_option("--circuit", cmp_circuit, "Circuit JSON")->required();
    cmp->add_option("--device", cmp_device, "Device JSON")->required();
    cmp->add_option("--iset", cmp_iset, "Instruction set name")->required();
    cmp->add_option("--mode", cmp_mode, "exact|approx|continuous");
    cmp->add_option("--seed", cmp_seed, "Root seed");
    cmp->add_option("--parallelism", cmp_parallelism, "Per-gate decomposition parallelism");
    cmp->add_option("--out-circuit", cmp_out_circuit, "Compiled circuit JSON path");
    cmp->add_option("--report", cmp_out_report, "Report JSON path");
    cmp->add_option("--csv", cmp_out_csv, "Optional report CSV path");
    cmp_flags.attach(cmp);

    // sweep
    auto* swp = app.add_subcommand("sweep", "Characterize a gate-parameter grid");
    std::string swp_ensemble = "qv";
    std::string swp_grid = "19x19";
    int swp_size = 0;
    bool swp_full = false;
    std::uint64_t swp_seed = 0;
    int swp_parallelism = default_parallelism;
    std::string swp_csv = "heatmap.csv";
    std::string swp_json;
    OptimizerFlags swp_flags;
    swp->add_option("--ensemble", swp_ensemble, "qv|qaoa|qft|fh|swap");
    swp->add_option("--grid", swp_grid, "theta x phi points, e.g. 19x19");
    swp->add_option("--size", swp_size, "Ensemble size override");
    swp->add_flag("--full", swp_full, "Use reference ensemble sizes (1000 for qv/qaoa)");
    swp->add_option("--seed", swp_seed, "Root seed");
    swp->add_option("--parallelism", swp_parallelism, "Grid-task parallelism");
    swp->add_option("--out", swp_csv, "Heatmap CSV path");
    swp->add_option("--json", swp_json, "Optional full-result JSON path");
    swp_flags.attach(swp);

    // calibrate-cost
    auto* cal = app.add_subcommand("calibrate-cost", "Estimate calibration overhead");
    std::string cal_device;
    int cal_types = 1;
    std::string cal_config;
    std::string cal_sets;
    std::string cal_metrics;
    std::string cal_out = "calibration_report.json";
    std::string cal_csv;
    cal->add_option("--device", cal_device, "Device JSON")->required();
    cal->add_option("--types", cal_types, "Number of gate types");
    cal->add_option("--config", cal_config, "Calibration model JSON");
    cal->add_option("--sets", cal_sets, "Comma-separated instruction sets for a tradeoff table");
    cal->add_option("--metrics", cal_metrics, "JSON map set name -> application metric");
    cal->add_option("--out", cal_out, "Report JSON path");
    cal->add_option("--csv", cal_csv, "Tradeoff CSV path");

    // bench
    auto* ben = app.add_subcommand("bench", "Decomposition throughput benchmark");
    int ben_gates = 100;
    int ben_threads = static_cast<int>(std::thread::hardware_concurrency());
    std::string ben_gate = "cz";
    std::uint64_t ben_seed = 0;
    std::string ben_out = "bench_report.json";
    OptimizerFlags ben_flags;
    ben->add_option("--gates", ben_gates, "Number of random targets");
    ben->add_option("--threads", ben_threads, "Worker threads");
    ben->add_option("--gate", ben_gate, "Hardware gate spec");
    ben->add_option("--seed", ben_seed, "Root seed");
    ben->add_option("--out", ben_out, "Report JSON path");
    ben_flags.attach(ben);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitParse;
    }

    try {
        if (dec->parsed()) {
            return run_decompose(dec_target, dec_param, dec_seed, dec_gate, dec_mode, dec_fidelity,
                                 dec_f1q, dec_flags, dec_parallelism, dec_out);
        }
        if (cmp->parsed()) {
            return run_compile(cmp_circuit, cmp_device, cmp_iset, cmp_mode, cmp_flags, cmp_seed,
                               cmp_parallelism, cmp_out_circuit, cmp_out_report, cmp_out_csv);
        }
        if (swp->parsed()) {
            return run_sweep_cmd(swp_ensemble, swp_grid, swp_size, swp_full, swp_seed, swp_flags,
                                 swp_parallelism, swp_csv, swp_json);
        }
        if (cal->parsed()) {
            return run_calibrate_cost(cal_device, cal_types, cal_config, cal_sets, cal_metrics,
                                      cal_out, cal_csv);
        }
        if (ben->parsed()) {
            return run_bench(ben_gates, ben_threads, ben_gate, ben_seed, ben_flags, ben_out);
        }
    } catch (const decomposition_capacity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const capacity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const missing_calibration_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingCalibration;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const not_found_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
