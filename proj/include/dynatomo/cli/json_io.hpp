// Copyright 2026 The Dynatomo Authors
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

// JSON encoding of the numeric types. Complex numbers are [re, im] pairs,
// vectors are lists of pairs and matrices are row-major lists of rows.
// nlohmann::json keeps object keys in a std::map and prints doubles as the
// shortest decimal that round-trips, which is what the report format needs.

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include <nlohmann/json.hpp>

#include "dynatomo/matcore.hpp"

namespace dynatomo::cli {

using json = nlohmann::json;

inline json encode(cplx z) { return json::array({z.real(), z.imag()}); }

inline json encode(const CVector &v) {
    json out = json::array();
    for (const auto &z : v) out.push_back(encode(z));
    return out;
}

inline json encode(const RVector &v) { return json(v); }

inline json encode(const CMatrix &m) {
    json out = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(encode(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

inline json encode(const RMatrix &m) {
    json out = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

/// Non-finite doubles have no JSON spelling; they are written as null.
inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline bool is_complex(const json &j) {
    return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

inline cplx decode_complex(const json &j) { return {j[0].get<double>(), j[1].get<double>()}; }

/// Shortest round-trip decimal for CSV cells.
inline std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf.data(), res.ptr);
}

}  // namespace dynatomo::cli
