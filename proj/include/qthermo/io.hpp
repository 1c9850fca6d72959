// Copyright 2026 The qthermo Authors
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

// JSON readers and writers for states, channels and reports. Key order is
// fixed (ordered_json) and doubles print in shortest round-trip form.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qthermo/core.hpp"
#include "qthermo/eto_channels.hpp"

namespace qthermo::io {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

inline json to_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const CMatrix& m) {
  return json{{"re", to_json(RMatrix(m.real()))}, {"im", to_json(RMatrix(m.imag()))}};
}

inline json to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

inline RMatrix real_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw FormatError(std::string(what) + " must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  if (cols == 0) throw FormatError(std::string(what) + " rows must be non-empty arrays");
  RMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw FormatError(std::string(what) + " is not rectangular");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw FormatError(std::string(what) + " entries must be numbers");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

/// Complex matrix given either as {"re": [[..]], "im": [[..]]} or as a plain
/// real array of rows.
inline CMatrix complex_matrix(const json& j, const char* what) {
  if (j.is_array()) return real_matrix(j, what).cast<complex_t>();
  if (!j.is_object() || !j.contains("re")) throw FormatError(std::string(what) + " needs an \"re\" part");
  RMatrix re = real_matrix(j.at("re"), what);
  RMatrix im = RMatrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) {
    im = real_matrix(j.at("im"), what);
    if (im.rows() != re.rows() || im.cols() != re.cols())
      throw FormatError(std::string(what) + " real and imaginary parts differ in shape");
  }
  CMatrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

inline std::vector<double> real_vector(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw FormatError(std::string(what) + " must be a non-empty array");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw FormatError(std::string(what) + " entries must be numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

inline double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw FormatError(std::string("missing numeric field \"") + key + "\"");
  return j.at(key).get<double>();
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

// ---------------------------------------------------------------------------
// States: {"energies": [..], "beta": x, "rho": {"re": [[..]], "im": [[..]]}}

struct StateFile {
  Hamiltonian h;
  InverseTemperature beta;
  DensityMatrix rho;
};

inline StateFile read_state(const json& j) {
  if (!j.is_object()) throw FormatError("state file must be a JSON object");
  Hamiltonian h(real_vector(j.at("energies"), "energies"));
  InverseTemperature beta(number(j, "beta"));
  if (!j.contains("rho")) throw FormatError("state file needs \"rho\"");
  CMatrix m = complex_matrix(j.at("rho"), "rho");
  if (m.rows() != static_cast<Eigen::Index>(h.dimension()))
    throw DimensionError("state and energies differ in dimension");
  return {std::move(h), beta, assert_state(m)};
}

inline json write_state(const Hamiltonian& h, InverseTemperature beta, const DensityMatrix& rho) {
  return json{{"energies", to_json(h.original_levels())}, {"beta", beta.value()}, {"rho", to_json(rho.matrix())}};
}

// ---------------------------------------------------------------------------
// Channels: {"G": [[..]], "alpha": {"re": [[..]], "im": [[..]]}, "energies": [..], "beta": x}

inline json write_channel(const ETOChannel& ch) {
  return json{{"G", to_json(ch.transitions().matrix())},
              {"alpha", to_json(ch.damping().matrix())},
              {"energies", to_json(ch.hamiltonian().original_levels())},
              {"beta", ch.beta().value()}};
}

inline ETOChannel read_channel(const json& j) {
  if (!j.is_object()) throw FormatError("channel file must be a JSON object");
  Hamiltonian h(real_vector(j.at("energies"), "energies"));
  InverseTemperature beta(number(j, "beta"));
  TransitionMatrix g(real_matrix(j.at("G"), "G"));
  DampingFactors a(complex_matrix(j.at("alpha"), "alpha"));
  return build_eto(g, a, h, beta);
}

}  // namespace qthermo::io
