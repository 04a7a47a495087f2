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

#ifndef LGCERT_CLI_SWEEP_HPP_
#define LGCERT_CLI_SWEEP_HPP_

// Parameter sweeps over a scenario template.
//
//   {
//     "scenario": {...} | "scenario_file": "relative/or/absolute.json",
//     "parameter": "/schedule/gap",          (JSON pointer into the scenario)
//     "values": [0, 0.5, ...] | {"start": a, "stop": b, "count": k}
//   }
//
// Points are evaluated concurrently; rows come back in sweep order. A point
// whose scenario is invalid yields a row with only the error column set.

#include <algorithm>
#include <filesystem>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "lgcert/cli/certification.hpp"
#include "lgcert/cli/scenario.hpp"

namespace lgcert::cli {

struct SweepSpec {
  Json scenario;
  std::string parameter;
  std::vector<Json> values;
};

struct SweepRow {
  Json value;
  std::optional<CertificationResult> result;
  std::string error;
};

namespace detail {

inline std::vector<Json> parse_values(const Json& j) {
  std::vector<Json> values;
  if (j.is_array()) {
    for (const auto& v : j) values.push_back(v);
  } else if (j.is_object()) {
    const double start = require(j, "start").get<double>();
    const double stop = require(j, "stop").get<double>();
    const auto count = require(j, "count").get<std::size_t>();
    for (std::size_t k = 0; k < count; ++k) {
      values.push_back(count == 1 ? start
                                  : start + (stop - start) * static_cast<double>(k) /
                                                static_cast<double>(count - 1));
    }
  } else {
    throw std::invalid_argument("expected an array or {start, stop, count}");
  }
  if (values.empty()) throw std::invalid_argument("at least one value is required");
  return values;
}

}  // namespace detail

/// `base_dir` resolves a relative "scenario_file".
inline SweepSpec parse_sweep(const Json& j, const std::filesystem::path& base_dir = {}) {
  using detail::field;
  if (!j.is_object()) throw InputError("sweep: expected a JSON object");
  SweepSpec spec;
  const bool inline_scenario = j.contains("scenario"), file = j.contains("scenario_file");
  if (inline_scenario == file) {
    throw InputError("sweep: exactly one of 'scenario' or 'scenario_file' is required");
  }
  if (inline_scenario) {
    spec.scenario = j.at("scenario");
  } else {
    std::filesystem::path path = field("scenario_file", [&] {
      return std::filesystem::path(j.at("scenario_file").get<std::string>());
    });
    if (path.is_relative()) path = base_dir / path;
    spec.scenario = read_json_file(path.string());
  }
  spec.parameter = field("parameter", [&] {
    const auto text = detail::require(j, "parameter").get<std::string>();
    const Json::json_pointer pointer(text);
    if (!spec.scenario.contains(pointer)) {
      throw std::invalid_argument("'" + text + "' does not resolve in the scenario");
    }
    return text;
  });
  spec.values = field("values", [&] { return detail::parse_values(detail::require(j, "values")); });
  return spec;
}

inline SweepSpec load_sweep(const std::string& path) {
  try {
    return parse_sweep(read_json_file(path), std::filesystem::path(path).parent_path());
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + what);
  }
}

/// Scenario JSON for one sweep point.
inline Json sweep_point(const SweepSpec& spec, const Json& value) {
  Json scenario = spec.scenario;
  scenario[Json::json_pointer(spec.parameter)] = value;
  return scenario;
}

inline SweepRow evaluate_point(const SweepSpec& spec, const Json& value) {
  SweepRow row{value, std::nullopt, {}};
  try {
    row.result = run_certification(parse_scenario(sweep_point(spec, value)));
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

/// Evaluates every point as an independent task, at most `workers` at a time.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  std::vector<SweepRow> rows(spec.values.size());
  for (std::size_t begin = 0; begin < spec.values.size(); begin += workers) {
    const std::size_t end = std::min(spec.values.size(), begin + workers);
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t k = begin; k < end; ++k) {
      batch.push_back(std::async(std::launch::async, [&spec, k] {
        return evaluate_point(spec, spec.values[k]);
      }));
    }
    for (std::size_t k = begin; k < end; ++k) rows[k] = batch[k - begin].get();
  }
  return rows;
}

inline std::string format_value(const Json& v) {
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

/// Columns: value, sorted check ids, max |W| per witness, error.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::set<std::string> checks, witnesses;
  for (const auto& row : rows) {
    if (!row.result) continue;
    for (const auto& e : row.result->checks.entries) checks.insert(e.id);
    for (const auto& w : row.result->witnesses) witnesses.insert(w.id + ".max_abs");
  }
  std::vector<std::string> columns(checks.begin(), checks.end());
  columns.insert(columns.end(), witnesses.begin(), witnesses.end());

  std::string out = "value";
  for (const auto& c : columns) out += "," + csv_field(c);
  out += ",error\n";
  for (const auto& row : rows) {
    out += csv_field(format_value(row.value));
    const auto values = row.result ? report_values(*row.result) : std::map<std::string, double>{};
    for (const auto& c : columns) {
      out += ",";
      if (auto it = values.find(c); it != values.end()) out += format_double(it->second);
    }
    out += "," + csv_field(row.error) + "\n";
  }
  return out;
}

inline Json sweep_json(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  Json out_rows = Json::array();
  for (const auto& row : rows) {
    Json r{{"value", row.value}};
    if (row.result) {
      r["report"] = row.result->report;
    } else {
      r["error"] = row.error;
    }
    out_rows.push_back(std::move(r));
  }
  return {{"parameter", spec.parameter}, {"rows", std::move(out_rows)}};
}

/// 0 when every point ran and satisfied every check, 2 when no point ran,
/// 1 otherwise.
inline int sweep_exit_code(const std::vector<SweepRow>& rows) {
  bool any_ran = false, clean = true;
  for (const auto& row : rows) {
    if (row.result) {
      any_ran = true;
      clean &= row.result->all_satisfied();
    } else {
      clean = false;
    }
  }
  if (!any_ran) return 2;
  return clean ? 0 : 1;
}

}  // namespace lgcert::cli

#endif  // LGCERT_CLI_SWEEP_HPP_
