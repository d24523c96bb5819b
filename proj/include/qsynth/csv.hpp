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

#include <cstdio>
#include <string>
#include <vector>

namespace qsynth {

/// Minimal RFC 4180 writer: CRLF records, quoting only where required.
class CsvWriter {
  public:
    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) {
                out_ += ',';
            }
            out_ += escape(fields[i]);
        }
        out_ += "\r\n";
    }

    const std::string& text() const { return out_; }

    static std::string number(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    static std::string number(long long v) { return std::to_string(v); }
    static std::string number(int v) { return std::to_string(v); }

  private:
    static std::string escape(const std::string& field) {
        if (field.find_first_of(",\"\r\n") == std::string::npos) {
            return field;
        }
        std::string quoted = "\"";
        for (char c : field) {
            quoted += c;
            if (c == '"') {
                quoted += '"';
            }
        }
        quoted += '"';
        return quoted;
    }

    std::string out_;
};

}  // namespace qsynth
