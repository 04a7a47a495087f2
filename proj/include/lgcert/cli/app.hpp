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

#ifndef LGCERT_CLI_APP_HPP_
#define LGCERT_CLI_APP_HPP_

// Command-line front end:
//
//   lgcert certify <scenario.json> [--shots N] [--seed S] [--out PATH] [--format json|csv]
//   lgcert sweep   <sweep.json>    [...]
//   lgcert oracle  <scenario.json> [...]
//
// Exit codes: 0 all checks satisfied, 1 some check violated, 2 input or
// validation error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lgcert/cli/certification.hpp"
#include "lgcert/cli/scenario.hpp"
#include "lgcert/cli/sweep.hpp"

namespace lgcert::cli {

inline constexpr int kExitSatisfied = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitInputError = 2;

struct Overrides {
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;

  void apply(Scenario& s) const {
    if (shots) s.protocol.shots = *shots;
    if (seed) s.protocol.seed = *seed;
  }
  void apply(Json& scenario) const {
    if (shots) scenario["shots"] = *shots;
    if (seed) scenario["seed"] = *seed;
  }
};

namespace detail {

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw InputError(out_path + ": cannot open for writing");
  file << text;
}

}  // namespace detail

/// `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Leggett-Garg macrorealism certification", "lgcert"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string out_path;
  std::string format = "json";
  std::string input;
  auto add_common = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("file", input, what)->required();
    sub->add_option("--shots", overrides.shots, "Shots per experiment (0 = exact)");
    sub->add_option("--seed", overrides.seed, "Base seed");
    sub->add_option("--out", out_path, "Write output to PATH instead of stdout");
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto* certify = app.add_subcommand("certify", "Run a scenario's checks");
  add_common(certify, "Scenario JSON");
  auto* sweep = app.add_subcommand("sweep", "Sweep a scenario parameter");
  add_common(sweep, "Sweep JSON");
  auto* oracle = app.add_subcommand("oracle", "Dump the raw experiment tables");
  add_common(oracle, "Scenario JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSatisfied : kExitInputError;
  }

  try {
    if (certify->parsed()) {
      Scenario s = load_scenario(input);
      overrides.apply(s);
      const auto result = run_certification(s);
      detail::emit(format == "csv" ? certification_csv(result) : result.report.dump(2) + "\n",
                   out_path, out);
      return result.all_satisfied() ? kExitSatisfied : kExitViolated;
    }
    if (oracle->parsed()) {
      Scenario s = load_scenario(input);
      overrides.apply(s);
      const Json tables = run_oracle(s);
      detail::emit(format == "csv" ? oracle_csv(tables) : tables.dump(2) + "\n", out_path, out);
      return kExitSatisfied;
    }
    SweepSpec spec = load_sweep(input);
    overrides.apply(spec.scenario);
    const auto rows = run_sweep(spec);
    detail::emit(format == "csv" ? sweep_csv(rows) : sweep_json(spec, rows).dump(2) + "\n",
                 out_path, out);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (!rows[k].result) err << "row " << k << ": " << rows[k].error << "\n";
    }
    return sweep_exit_code(rows);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace lgcert::cli

#endif  // LGCERT_CLI_APP_HPP_
