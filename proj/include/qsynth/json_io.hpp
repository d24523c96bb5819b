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

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qsynth/common.hpp"

namespace qsynth {

using json = nlohmann::json;

/// Matrices are interchanged as row-major arrays of [re, im] pairs:
/// [[[re,im], ...row 0...], [...row 1...], ...].
inline json matrix_to_json(const MatX& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline MatX matrix_from_json(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) {
        throw parse_error(context + ": expected a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array()) {
        throw parse_error(context + ": rows must be arrays");
    }
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    MatX m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw parse_error(context + ": ragged matrix at row " + std::to_string(i));
        }
        for (Eigen::Index k = 0; k < cols; ++k) {
            const json& entry = row[static_cast<std::size_t>(k)];
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
                throw parse_error(context + ": entry (" + std::to_string(i) + "," + std::to_string(k) +
                                  ") is not a [re, im] pair");
            }
            m(i, k) = cplx(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open '" + path + "' for reading");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io_error("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw io_error("write to '" + path + "' failed");
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace qsynth
