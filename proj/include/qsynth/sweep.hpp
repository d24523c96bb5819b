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

#include <chrono>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "qsynth/csv.hpp"
#include "qsynth/decompose.hpp"
#include "qsynth/gates.hpp"
#include "qsynth/parallel.hpp"

namespace qsynth {

enum class Ensemble { QV, QAOA, QFT, FH, SWAP };

inline const char* ensemble_name(Ensemble e) {
    switch (e) {
        case Ensemble::QV: return "qv";
        case Ensemble::QAOA: return "qaoa";
        case Ensemble::QFT: return "qft";
        case Ensemble::FH: return "fh";
        case Ensemble::SWAP: return "swap";
    }
    return "?";
}

inline Ensemble ensemble_from_name(const std::string& name) {
    if (name == "qv") return Ensemble::QV;
    if (name == "qaoa") return Ensemble::QAOA;
    if (name == "qft") return Ensemble::QFT;
    if (name == "fh") return Ensemble::FH;
    if (name == "swap") return Ensemble::SWAP;
    throw parse_error("unknown ensemble '" + name + "'");
}

/// Reference ensemble sizes of the published characterization.
inline int default_ensemble_size(Ensemble e) {
    switch (e) {
        case Ensemble::QV: return 1000;
        case Ensemble::QAOA: return 1000;
        case Ensemble::QFT: return 10;
        case Ensemble::FH: return 60;
        case Ensemble::SWAP: return 1;
    }
    return 1;
}

/// Grid characterization request. The grid spans theta in [0, pi/2] and
/// phi in [0, pi] inclusive (the symmetry-reduced fSim parameter range);
/// every ensemble member is decomposed exactly at every grid point.
struct SweepSpec {
    int theta_points = 19;
    int phi_points = 19;
    Ensemble ensemble = Ensemble::QV;
    int ensemble_size = 0;  // 0 = the ensemble's reference size
    std::uint64_t seed = 0;

    int resolved_size() const {
        return ensemble_size > 0 ? ensemble_size : default_ensemble_size(ensemble);
    }

    double theta_at(int i) const { return (pi / 2.0) * i / (theta_points - 1); }
    double phi_at(int j) const { return pi * j / (phi_points - 1); }

    bool same_grid(const SweepSpec& other) const {
        return theta_points == other.theta_points && phi_points == other.phi_points;
    }
};

struct SweepCell {
    double mean_count = 0.0;  // over successful members; 0 when all failed
    int min_count = 0;
    int max_count = 0;
    int failures = 0;
};

struct SweepResult {
    SweepSpec spec;
    OptimizerConfig cfg;
    std::vector<SweepCell> grid;  // theta-major: cell(i, j) = grid[i * phi_points + j]
    double wall_time_s = 0.0;

    const SweepCell& cell(int ti, int pj) const {
        return grid[static_cast<std::size_t>(ti) * spec.phi_points + pj];
    }
};

/// Ladder indices t of the controlled-phase gates of an n-qubit Fourier
/// transform, in circuit order, truncated/extended to `size` entries (the
/// smallest transform with enough gates is used). 10 entries correspond to
/// the 5-qubit transform.
inline std::vector<int> qft_ladder_indices(int size) {
    int n = 2;
    while (n * (n - 1) / 2 < size) {
        ++n;
    }
    std::vector<int> ts;
    for (int i = 0; i < n && static_cast<int>(ts.size()) < size; ++i) {
        for (int j = i + 1; j < n && static_cast<int>(ts.size()) < size; ++j) {
            ts.push_back(j - i);
        }
    }
    return ts;
}

/// Two-qubit targets of a characterization ensemble, derived from the spec
/// seed via the documented splitting rule.
inline std::vector<Mat4> ensemble_targets(const SweepSpec& spec) {
    const int size = spec.resolved_size();
    std::vector<Mat4> targets;
    targets.reserve(static_cast<std::size_t>(size));
    const int n_zz = (size + 2) / 3;  // FH mix: one ZZ per two hopping terms
    const std::vector<int> ladder =
        spec.ensemble == Ensemble::QFT ? qft_ladder_indices(size) : std::vector<int>{};
    for (int m = 0; m < size; ++m) {
        const std::uint64_t child = derive_seed(spec.seed, static_cast<std::uint64_t>(m));
        switch (spec.ensemble) {
            case Ensemble::QV:
                targets.push_back(haar_su4(child));
                break;
            case Ensemble::QAOA: {
                SplitMix64 rng(child);
                targets.push_back(zz_interaction(rng.next_double(2.0 * pi)));
                break;
            }
            case Ensemble::QFT:
                targets.push_back(qft_cphase(ladder[static_cast<std::size_t>(m)]));
                break;
            case Ensemble::FH: {
                SplitMix64 rng(child);
                const double beta = rng.next_double(2.0 * pi);
                targets.push_back(m < n_zz ? zz_interaction(beta) : xxyy_interaction(beta));
                break;
            }
            case Ensemble::SWAP:
                targets.push_back(swap_matrix());
                break;
        }
    }
    return targets;
}

/// Decomposes every ensemble member at every grid point and returns layer
/// statistics per cell. Members that exceed cfg.max_layers are counted as
/// failures. Deterministic for a given seed regardless of parallelism:
/// task seeds depend on the member index and gate only, and cells are
/// assembled by position.
inline SweepResult run_sweep(const SweepSpec& spec, const OptimizerConfig& cfg, int parallelism) {
    if (spec.theta_points < 2 || spec.phi_points < 2) {
        throw std::invalid_argument("run_sweep: grid needs at least 2 points per axis");
    }
    if (spec.resolved_size() < 1) {
        throw std::invalid_argument("run_sweep: ensemble_size must be >= 1");
    }
    cfg.validate();

    const auto start = std::chrono::steady_clock::now();
    const std::vector<Mat4> targets = ensemble_targets(spec);
    const std::size_t members = targets.size();
    const std::size_t cells =
        static_cast<std::size_t>(spec.theta_points) * static_cast<std::size_t>(spec.phi_points);

    std::vector<int> layer_counts(cells * members, -1);  // -1 = failure
    parallel_for(cells * members, parallelism, [&](std::size_t task) {
        const std::size_t cell = task / members;
        const std::size_t member = task % members;
        const int ti = static_cast<int>(cell) / spec.phi_points;
        const int pj = static_cast<int>(cell) % spec.phi_points;
        const GateKind gate = GateKind::fsim(spec.theta_at(ti), spec.phi_at(pj));

        OptimizerConfig task_cfg = cfg;
        task_cfg.rng_seed = derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(member));
        task_cfg.parallelism = 1;
        try {
            layer_counts[task] = decompose_exact(targets[member], gate, task_cfg).two_qubit_count;
        } catch (const decomposition_capacity_error&) {
            layer_counts[task] = -1;
        }
    });

    SweepResult result;
    result.spec = spec;
    result.cfg = cfg;
    result.grid.resize(cells);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        SweepCell& stats = result.grid[cell];
        long long sum = 0;
        int successes = 0;
        for (std::size_t m = 0; m < members; ++m) {
            const int layers = layer_counts[cell * members + m];
            if (layers < 0) {
                ++stats.failures;
                continue;
            }
            if (successes == 0) {
                stats.min_count = layers;
                stats.max_count = layers;
            } else {
                stats.min_count = std::min(stats.min_count, layers);
                stats.max_count = std::max(stats.max_count, layers);
            }
            sum += layers;
            ++successes;
        }
        stats.mean_count = successes > 0 ? static_cast<double>(sum) / successes : 0.0;
    }
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/// Ranks grid points by mean gate count summed across the given sweeps
/// (ascending) and returns the top k, deduplicated under canonicalization.
/// Cells with failures in any sweep are not eligible.
inline std::vector<GateKind> select_gate_shortlist(const std::vector<SweepResult>& results, int k) {
    if (results.empty()) {
        throw std::invalid_argument("select_gate_shortlist: no sweep results");
    }
    if (k < 1) {
        throw std::invalid_argument("select_gate_shortlist: k must be >= 1");
    }
    const SweepSpec& grid = results.front().spec;
    for (const SweepResult& r : results) {
        if (!r.spec.same_grid(grid)) {
            throw std::invalid_argument("select_gate_shortlist: sweeps cover different grids");
        }
    }

    struct Scored {
        double score;
        std::size_t cell;
    };
    std::vector<Scored> scored;
    const std::size_t cells = results.front().grid.size();
    for (std::size_t cell = 0; cell < cells; ++cell) {
        double score = 0.0;
        bool eligible = true;
        for (const SweepResult& r : results) {
            if (r.grid[cell].failures > 0) {
                eligible = false;
                break;
            }
            score += r.grid[cell].mean_count;
        }
        if (eligible) {
            scored.push_back({score, cell});
        }
    }
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& x, const Scored& y) {
        if (x.score != y.score) {
            return x.score < y.score;
        }
        return x.cell < y.cell;
    });

    std::vector<GateKind> shortlist;
    std::set<std::uint64_t> seen;
    for (const Scored& s : scored) {
        if (static_cast<int>(shortlist.size()) >= k) {
            break;
        }
        const int ti = static_cast<int>(s.cell) / grid.phi_points;
        const int pj = static_cast<int>(s.cell) % grid.phi_points;
        const GateKind gate = GateKind::fsim(grid.theta_at(ti), grid.phi_at(pj)).canonical();
        if (seen.insert(gate_key(gate)).second) {
            shortlist.push_back(gate);
        }
    }
    return shortlist;
}

inline std::string sweep_to_csv(const SweepResult& result) {
    CsvWriter csv;
    csv.row({"theta", "phi", "mean_count", "min_count", "max_count", "failures"});
    for (int ti = 0; ti < result.spec.theta_points; ++ti) {
        for (int pj = 0; pj < result.spec.phi_points; ++pj) {
            const SweepCell& cell = result.cell(ti, pj);
            csv.row({CsvWriter::number(result.spec.theta_at(ti)),
                     CsvWriter::number(result.spec.phi_at(pj)),
                     CsvWriter::number(cell.mean_count), CsvWriter::number(cell.min_count),
                     CsvWriter::number(cell.max_count), CsvWriter::number(cell.failures)});
        }
    }
    return csv.text();
}

/// Writes the grid as CSV (theta-major row order). Output depends only on
/// the sweep result, so reruns with the same seed are byte-identical.
inline void export_heatmap_csv(const SweepResult& result, const std::string& path) {
    write_text_file(path, sweep_to_csv(result));
}

inline json sweep_to_json(const SweepResult& result) {
    json out;
    out["spec"] = {{"theta_points", result.spec.theta_points},
                   {"phi_points", result.spec.phi_points},
                   {"ensemble", ensemble_name(result.spec.ensemble)},
                   {"ensemble_size", result.spec.resolved_size()},
                   {"seed", result.spec.seed}};
    out["optimizer"] = {{"max_layers", result.cfg.max_layers},
                        {"restarts", result.cfg.restarts},
                        {"exact_infidelity", result.cfg.exact_infidelity},
                        {"rng_seed", result.cfg.rng_seed}};
    json cells = json::array();
    for (int ti = 0; ti < result.spec.theta_points; ++ti) {
        for (int pj = 0; pj < result.spec.phi_points; ++pj) {
            const SweepCell& cell = result.cell(ti, pj);
            cells.push_back({{"theta", result.spec.theta_at(ti)},
                             {"phi", result.spec.phi_at(pj)},
                             {"mean_count", cell.mean_count},
                             {"min_count", cell.min_count},
                             {"max_count", cell.max_count},
                             {"failures", cell.failures}});
        }
    }
    out["grid"] = std::move(cells);
    out["wall_time_s"] = result.wall_time_s;
    return out;
}

}  // namespace qsynth
