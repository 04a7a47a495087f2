// Copyright 2026 The lgcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LGCERT_CLI_SCENARIO_HPP_
#define LGCERT_CLI_SCENARIO_HPP_

// Scenario files. Every qcore/protocols invariant is enforced at load time
// and reported against the JSON field it came from.
//
//   {
//     "dimension": 2,
//     "initial_state": "maximally_mixed" | "ground" | "plus_x" | matrix,
//     "hamiltonian": {"preset": "precession", "omega": 1.0} | "zero" | matrix,
//     "observable": "sigma_z" | matrix,
//     "times": [t1, t2, ...]  or  "schedule": {"start": s, "gap": g, "count": n},
//     "protocol": {"mode": "projective", "dephase_times": [0],
//                  "clumsiness": {"kind": "depolarizing", "strength": 0.05}},
//     "checks": ["LG3", "NSIT", "LG2-12-1", ...],
//     "shots": 0, "seed": 0, "derive_lower_moments": false
//   }
//
// Matrices are row-major arrays of [re, im] pairs (plain reals allowed).

#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgcert/protocols.hpp"
#include "lgcert/qcore.hpp"
#include "lgcert/serialization.hpp"

namespace lgcert::cli {

/// Input or validation problem; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  Eigen::Index dimension = 2;
  DensityOperator initial_state = DensityOperator::maximally_mixed(2);
  Hamiltonian hamiltonian = Hamiltonian::zero(2);
  DichotomicObservable observable = DichotomicObservable::sigma_z();
  Schedule schedule{1.0};
  ProtocolConfig protocol;
  std::vector<std::string> checks;
  bool derive_lower_moments = false;
};

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

template <typename F>
auto field(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    // Library invariant messages usually name their field already.
    const std::string what = e.what();
    const std::string root = name.substr(0, name.find('.'));
    if (what.rfind(root, 0) == 0) throw InputError(what);
    throw InputError(name + ": " + what);
  }
}

inline const Json& require(const Json& j, const std::string& key) {
  if (!j.contains(key)) throw std::invalid_argument("missing required field '" + key + "'");
  return j.at(key);
}

inline std::string preset_name(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object() && j.contains("preset")) return j.at("preset").get<std::string>();
  return {};
}

inline DensityOperator parse_state(const Json& j, Eigen::Index d) {
  const std::string preset = preset_name(j);
  if (preset == "maximally_mixed") return DensityOperator::maximally_mixed(d);
  if (preset == "ground") return DensityOperator::basis_state(d, 0);
  if (preset == "plus_x") {
    // Uniform superposition of the computational basis; |+x> for a qubit.
    return DensityOperator::pure(Eigen::VectorXcd::Ones(d));
  }
  if (!preset.empty()) throw std::invalid_argument("unknown preset '" + preset + "'");
  return DensityOperator(matrix_from_json(j, "matrix"));
}

inline Hamiltonian parse_hamiltonian(const Json& j, Eigen::Index d) {
  const std::string preset = preset_name(j);
  if (preset == "precession") {
    if (d != 2) throw std::invalid_argument("preset 'precession' needs dimension 2");
    return Hamiltonian::precession(require(j, "omega").get<double>());
  }
  if (preset == "zero") return Hamiltonian::zero(d);
  if (!preset.empty()) throw std::invalid_argument("unknown preset '" + preset + "'");
  return Hamiltonian(matrix_from_json(j, "matrix"));
}

inline DichotomicObservable parse_observable(const Json& j, Eigen::Index d) {
  const std::string preset = preset_name(j);
  if (preset == "sigma_z") {
    if (d != 2) throw std::invalid_argument("preset 'sigma_z' needs dimension 2");
    return DichotomicObservable::sigma_z();
  }
  if (!preset.empty()) throw std::invalid_argument("unknown preset '" + preset + "'");
  return DichotomicObservable(matrix_from_json(j, "matrix"));
}

inline Schedule parse_schedule(const Json& j) {
  const bool has_times = j.contains("times"), has_schedule = j.contains("schedule");
  if (has_times == has_schedule) {
    throw InputError("exactly one of 'times' or 'schedule' is required");
  }
  if (has_times) {
    return field("times", [&] { return Schedule(j.at("times").get<std::vector<double>>()); });
  }
  return field("schedule", [&] {
    const auto& s = j.at("schedule");
    const double start = require(s, "start").get<double>();
    const double gap = require(s, "gap").get<double>();
    const auto count = require(s, "count").get<std::size_t>();
    std::vector<double> times;
    for (std::size_t k = 0; k < count; ++k) times.push_back(start + gap * static_cast<double>(k));
    return Schedule(std::move(times));
  });
}

inline ClumsinessModel parse_clumsiness(const Json& j, Eigen::Index d) {
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "none") return ClumsinessModel::none();
  if (kind == "depolarizing") {
    return ClumsinessModel::depolarizing(require(j, "strength").get<double>());
  }
  if (kind == "unitary_kick") {
    Hamiltonian g(matrix_from_json(require(j, "generator"), "generator"));
    lgcert::detail::require_same_dim(g.dim(), d, "generator");
    return ClumsinessModel::unitary_kick(require(j, "angle").get<double>(), std::move(g));
  }
  throw std::invalid_argument("unknown clumsiness kind '" + kind + "'");
}

inline ProtocolConfig parse_protocol(const Json& j, Eigen::Index d) {
  ProtocolConfig c;
  if (j.contains("mode")) {
    c.mode = field("protocol.mode",
                   [&] { return parse_protocol_mode(j.at("mode").get<std::string>()); });
  }
  if (j.contains("dephase_times")) {
    c.dephase_times = field("protocol.dephase_times", [&] {
      return j.at("dephase_times").get<std::set<std::size_t>>();
    });
  }
  if (j.contains("clumsiness")) {
    c.clumsiness = field("protocol.clumsiness", [&] { return parse_clumsiness(j.at("clumsiness"), d); });
  }
  return c;
}

}  // namespace detail

inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Keep nlohmann's description, drop its own position prefix.
    std::string what = e.what();
    if (const auto cut = what.find(": ", what.find("column")); cut != std::string::npos) {
      what = what.substr(cut + 2);
    }
    throw InputError(source + ": parse error at " +
                     detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + what);
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

inline Scenario parse_scenario(const Json& j) {
  using detail::field;
  if (!j.is_object()) throw InputError("scenario: expected a JSON object");
  Scenario s;
  s.dimension = field("dimension", [&] {
    const auto d = detail::require(j, "dimension").get<long>();
    if (d < 1 || d > 16) throw std::invalid_argument("must be between 1 and 16");
    return static_cast<Eigen::Index>(d);
  });
  const auto d = s.dimension;
  s.initial_state = field("initial_state", [&] {
    auto rho = detail::parse_state(detail::require(j, "initial_state"), d);
    lgcert::detail::require_same_dim(rho.dim(), d, "dimension");
    return rho;
  });
  s.hamiltonian = field("hamiltonian", [&] {
    auto h = detail::parse_hamiltonian(detail::require(j, "hamiltonian"), d);
    lgcert::detail::require_same_dim(h.dim(), d, "dimension");
    return h;
  });
  s.observable = field("observable", [&] {
    auto q = detail::parse_observable(detail::require(j, "observable"), d);
    lgcert::detail::require_same_dim(q.dim(), d, "dimension");
    return q;
  });
  s.schedule = detail::parse_schedule(j);
  if (j.contains("protocol")) {
    s.protocol = field("protocol", [&] { return detail::parse_protocol(j.at("protocol"), d); });
  }
  field("protocol", [&] {
    s.protocol.validate(s.schedule);
    return 0;
  });
  if (j.contains("checks")) {
    s.checks = field("checks", [&] { return j.at("checks").get<std::vector<std::string>>(); });
  }
  if (s.checks.empty()) throw InputError("checks: at least one check is required");
  if (j.contains("shots")) {
    s.protocol.shots = field("shots", [&] { return j.at("shots").get<std::uint64_t>(); });
  }
  if (j.contains("seed")) {
    s.protocol.seed = field("seed", [&] { return j.at("seed").get<std::uint64_t>(); });
  }
  if (j.contains("derive_lower_moments")) {
    s.derive_lower_moments =
        field("derive_lower_moments", [&] { return j.at("derive_lower_moments").get<bool>(); });
  }
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  try {
    return parse_scenario(read_json_file(path));
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + what);
  }
}

}  // namespace lgcert::cli

#endif  // LGCERT_CLI_SCENARIO_HPP_
