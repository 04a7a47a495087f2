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

#ifndef LGCERT_CLI_CERTIFICATION_HPP_
#define LGCERT_CLI_CERTIFICATION_HPP_

// Experiment orchestration. Each moment comes from its own simulated
// experiment (a fresh copy of the initial state measured only at that
// moment's times); NSIT and monotonicity checks use companion experiments
// run with the mechanism at every configured index up to the last measured
// time.
//
// Check identifiers are either whole families (LG2, LG3, LG4, NSIT, MONO,
// NONNEG, APPENDIX, QUASI, FEASIBLE) or single conditions ("LG3-2",
// "NSIT-(2;12)", "A-MONO-(+1,+1)", ...).

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lgcert/cli/scenario.hpp"
#include "lgcert/feasibility.hpp"
#include "lgcert/interference.hpp"
#include "lgcert/macrocert.hpp"
#include "lgcert/protocols.hpp"
#include "lgcert/serialization.hpp"

namespace lgcert::cli {

inline const std::vector<std::string>& check_families() {
  static const std::vector<std::string> families{"LG2",  "LG3",      "LG4",   "NSIT",    "MONO",
                                                 "NONNEG", "APPENDIX", "QUASI", "FEASIBLE"};
  return families;
}

/// Family of a check identifier, or "" if it names none.
inline std::string family_of(const std::string& id) {
  for (const auto& f : check_families()) {
    if (id == f) return f;
  }
  if (id.rfind("A-", 0) == 0) return "APPENDIX";
  for (const auto& f : check_families()) {
    if (id.rfind(f + "-", 0) == 0) return f;
  }
  return {};
}

/// 64-bit FNV-1a; gives every named experiment its own random stream.
inline std::uint64_t stream_of(const std::string& name) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct ExperimentSpec {
  std::string name;
  std::vector<std::size_t> times;
  MechanismScope scope = MechanismScope::measured_only;
};

struct CertificationResult {
  Json report;
  InequalityReport checks;
  std::vector<WitnessReport> witnesses;

  bool all_satisfied() const { return checks.all_satisfied(); }
};

namespace detail {

inline std::string experiment_name(const std::vector<std::size_t>& times) {
  std::string out = "p";
  for (auto t : times) out += std::to_string(t + 1);
  return out;
}

inline std::vector<std::size_t> times_of(TimeSet s) { return time_indices(s); }

inline TimeSet set_of(const std::vector<std::size_t>& times) {
  TimeSet s = 0;
  for (auto t : times) s |= TimeSet{1} << t;
  return s;
}

/// Experiments a family needs, written against the times it refers to.
struct FamilyNeeds {
  std::vector<TimeSet> moments;
  std::vector<std::vector<std::size_t>> companions;
};

inline FamilyNeeds needs_of(const std::string& family, std::size_t n) {
  FamilyNeeds needs;
  auto pair = [](std::size_t i, std::size_t j) { return time_set({i, j}); };
  if (family == "LG3") {
    needs.moments = {pair(0, 1), pair(1, 2), pair(0, 2)};
  } else if (family == "LG4") {
    needs.moments = {pair(0, 1), pair(1, 2), pair(2, 3), pair(0, 3)};
  } else if (family == "LG2") {
    const std::size_t m = std::clamp<std::size_t>(n, 2, 4);
    for (const auto& [i, j] : lg2_pairs(m)) {
      needs.moments.push_back(time_set({i}));
      needs.moments.push_back(time_set({j}));
      needs.moments.push_back(pair(i, j));
    }
  } else if (family == "NONNEG") {
    const std::size_t m = std::clamp<std::size_t>(n, 2, 4);
    for (TimeSet s = 1; s < (TimeSet{1} << m); ++s) needs.moments.push_back(s);
  } else if (family == "FEASIBLE") {
    const std::size_t m = std::clamp<std::size_t>(n, 3, 4);
    for (TimeSet s = 1; s < (TimeSet{1} << m); ++s) {
      if (std::popcount(s) <= 2) needs.moments.push_back(s);
    }
  } else if (family == "NSIT" || family == "MONO") {
    if (n <= 2) {
      needs.companions = {{0, 1}, {1}};
    } else {
      needs.companions = {{0, 1, 2}, {1, 2}, {0, 2}, {2}};
    }
  }
  return needs;
}

inline std::vector<std::string> needed_names(const FamilyNeeds& needs) {
  std::vector<std::string> names;
  for (TimeSet s : needs.moments) names.push_back(experiment_name(times_of(s)));
  for (const auto& c : needs.companions) names.push_back("nsit:" + experiment_name(c));
  std::vector<std::string> unique;
  for (auto& name : names) {
    if (std::find(unique.begin(), unique.end(), name) == unique.end()) unique.push_back(name);
  }
  return unique;
}

inline std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : ", ") + item;
  return out;
}

/// Rejects families whose experiments refer to times the schedule lacks.
inline void require_times(const std::string& family, std::size_t n) {
  auto fail = [&](const std::string& why) {
    throw InputError("checks: " + family + " cannot run: " + why);
  };
  const FamilyNeeds needs = needs_of(family, n);
  std::vector<std::string> missing;
  for (TimeSet s : needs.moments) {
    const auto times = times_of(s);
    if (times.back() >= n) missing.push_back(experiment_name(times));
  }
  for (const auto& c : needs.companions) {
    if (c.back() >= n) missing.push_back("nsit:" + experiment_name(c));
  }
  if (!missing.empty()) {
    fail("requires experiments " + join(needed_names(needs)) + "; missing " + join(missing) +
         " (schedule has " + std::to_string(n) + " time" + (n == 1 ? "" : "s") + ")");
  }
  const bool moment_family = !needs.moments.empty();
  if (moment_family && n > 4) fail("moment checks support at most four times");
  if ((family == "NSIT" || family == "MONO") && n > 3) {
    fail("NSIT and monotonicity sets are defined for two or three times");
  }
  if (family == "APPENDIX" && n != 2) fail("requires exactly two times");
  if (family == "QUASI" && n < 2) fail("requires at least two times");
}

inline Json protocol_json(const ProtocolConfig& c) {
  Json clumsiness{{"kind", "none"}};
  switch (c.clumsiness.kind) {
    case ClumsinessModel::Kind::none:
      break;
    case ClumsinessModel::Kind::depolarizing:
      clumsiness = {{"kind", "depolarizing"}, {"strength", c.clumsiness.strength}};
      break;
    case ClumsinessModel::Kind::unitary_kick:
      clumsiness = {{"kind", "unitary_kick"},
                    {"angle", c.clumsiness.strength},
                    {"generator", matrix_to_json(c.clumsiness.generator->matrix())}};
      break;
  }
  return {{"mode", to_string(c.mode)},
          {"dephase_times", c.dephase_times},
          {"clumsiness", std::move(clumsiness)}};
}

inline const char* scope_name(MechanismScope scope) {
  return scope == MechanismScope::measured_only ? "measured_only" : "all_preceding";
}

/// NSIT/MONO pairings (id suffix, full, reduced, marginalized slots).
struct Companion {
  std::string tag;
  std::string full;
  std::string reduced;
  std::vector<std::size_t> marginalized;
};

inline std::vector<Companion> nsit_companions(std::size_t n) {
  if (n <= 2) return {{"(2;12)", "nsit:p12", "nsit:p2", {0}}};
  return {{"(3;23)", "nsit:p23", "nsit:p3", {0}},
          {"(13;123)", "nsit:p123", "nsit:p13", {1}},
          {"(23;123)", "nsit:p123", "nsit:p23", {0}}};
}

inline std::vector<Companion> mono_companions(std::size_t n) {
  if (n <= 2) return {{"(2;12)", "nsit:p12", "nsit:p2", {0}}};
  return {{"(3;23)", "nsit:p23", "nsit:p3", {0}},
          {"(23;123)", "nsit:p123", "nsit:p23", {0}}};
}

/// The three-sigma rule for NSIT as a single margin: min_i (tol_i - |W_i|).
inline ConditionResult nsit_condition(const WitnessReport& w) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.defects.size(); ++i) {
    margin = std::min(margin, w.tolerances[i] - std::abs(w.defects[i]));
  }
  return ConditionResult::make(w.id, margin, 0.0);
}

}  // namespace detail

/// Requested families and single ids, validated against known families.
struct CheckRequest {
  std::set<std::string> families;
  std::set<std::string> ids;

  static CheckRequest from(const std::vector<std::string>& checks) {
    CheckRequest r;
    for (const auto& c : checks) {
      const std::string f = family_of(c);
      if (f.empty()) throw InputError("checks: unknown check '" + c + "'");
      if (f == c) {
        r.families.insert(f);
      } else {
        r.ids.insert(c);
      }
    }
    return r;
  }

  /// Families that must be evaluated to answer the request.
  std::set<std::string> evaluated() const {
    std::set<std::string> out = families;
    for (const auto& id : ids) out.insert(family_of(id));
    return out;
  }

  bool wants(const std::string& id) const {
    return families.count(family_of(id)) > 0 || ids.count(id) > 0;
  }
};

/// Experiments required by a scenario's checks, in a fixed order.
inline std::vector<ExperimentSpec> plan_experiments(const Scenario& s) {
  const std::size_t n = s.schedule.size();
  const auto families = CheckRequest::from(s.checks).evaluated();
  std::set<TimeSet> moments;
  std::set<std::vector<std::size_t>> companions;
  for (const auto& f : families) {
    detail::require_times(f, n);
    const auto needs = detail::needs_of(f, n);
    moments.insert(needs.moments.begin(), needs.moments.end());
    companions.insert(needs.companions.begin(), needs.companions.end());
  }
  std::vector<ExperimentSpec> plan;
  if (!moments.empty()) {
    if (s.derive_lower_moments) {
      std::vector<std::size_t> all(n);
      for (std::size_t k = 0; k < n; ++k) all[k] = k;
      plan.push_back({detail::experiment_name(all), all, MechanismScope::measured_only});
    } else {
      std::vector<TimeSet> ordered(moments.begin(), moments.end());
      std::sort(ordered.begin(), ordered.end(), [](TimeSet a, TimeSet b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        if (pa != pb) return pa < pb;
        return time_indices(a) < time_indices(b);
      });
      for (TimeSet m : ordered) {
        const auto times = detail::times_of(m);
        plan.push_back({detail::experiment_name(times), times, MechanismScope::measured_only});
      }
    }
  }
  for (const auto& c : companions) {
    plan.push_back({"nsit:" + detail::experiment_name(c), c, MechanismScope::all_preceding});
  }
  return plan;
}

inline std::map<std::string, OutcomeTable> run_experiments(const Scenario& s,
                                                           const std::vector<ExperimentSpec>& plan) {
  std::map<std::string, OutcomeTable> tables;
  for (const auto& e : plan) {
    tables.emplace(e.name, run_experiment(s.initial_state, s.hamiltonian, s.observable, s.schedule,
                                          s.protocol, e.times, e.scope, stream_of(e.name)));
  }
  return tables;
}

inline Json experiments_json(const std::vector<ExperimentSpec>& plan,
                             const std::map<std::string, OutcomeTable>& tables) {
  Json out = Json::object();
  for (const auto& e : plan) {
    Json times = Json::array();
    for (auto t : e.times) times.push_back(t);
    out[e.name] = {{"times", std::move(times)},
                   {"mechanism_scope", detail::scope_name(e.scope)},
                   {"stream", stream_of(e.name)},
                   {"table", to_json(tables.at(e.name))}};
  }
  return out;
}

/// Raw tables of every experiment the scenario's checks would run.
inline Json run_oracle(const Scenario& s) {
  const auto plan = plan_experiments(s);
  const auto tables = run_experiments(s, plan);
  return {{"experiments", experiments_json(plan, tables)}};
}

inline CertificationResult run_certification(const Scenario& s) {
  const std::size_t n = s.schedule.size();
  const CheckRequest request = CheckRequest::from(s.checks);
  const auto families = request.evaluated();
  const auto plan = plan_experiments(s);
  const auto tables = run_experiments(s, plan);
  const bool empirical = s.protocol.shots > 0;

  Json moments_json = Json::object();
  std::optional<MomentSet> moments;
  std::vector<LabeledTable> labeled;
  for (const auto& e : plan) {
    if (e.scope == MechanismScope::measured_only) labeled.push_back({e.times, tables.at(e.name)});
  }
  if (!labeled.empty()) {
    moments = moments_from_tables(labeled, n, s.derive_lower_moments);
    for (TimeSet m : moments->subsets()) {
      const auto& value = moments->get(m);
      if (!value) continue;
      const std::string source = s.derive_lower_moments ? plan.front().name
                                                         : detail::experiment_name(time_indices(m));
      moments_json[MomentSet::name(m)] = {{"value", value->value},
                                          {"standard_error", value->standard_error()},
                                          {"source", source}};
    }
  }

  InequalityReport all;
  std::vector<WitnessReport> witnesses;
  Json details = Json::object();
  for (const auto& f : families) {
    if (f == "LG2") all.append(check_lg2(*moments));
    if (f == "LG3") all.append(check_lg3(*moments));
    if (f == "LG4") all.append(check_lg4(*moments));
    if (f == "NONNEG") all.append(check_nonnegativity(*moments));
    if (f == "FEASIBLE") {
      MomentSet partial(moments->n());
      for (TimeSet m : partial.subsets()) {
        if (std::popcount(m) <= 2) partial.fix(m, moments->value(m), moments->get(m)->shots);
      }
      const auto result = feasible_completion(partial);
      all.entries.push_back(ConditionResult::make("FEASIBLE", result.gap, kFeasibilitySlack));
      details["feasibility"] = to_json(result);
    }
    if (f == "NSIT") {
      for (const auto& c : detail::nsit_companions(n)) {
        auto w = check_nsit(tables.at(c.full), tables.at(c.reduced), c.marginalized, "NSIT-" + c.tag);
        all.entries.push_back(detail::nsit_condition(w));
        witnesses.push_back(std::move(w));
      }
    }
    if (f == "MONO") {
      for (const auto& c : detail::mono_companions(n)) {
        all.append(check_monotonicity(tables.at(c.full), tables.at(c.reduced), c.marginalized,
                                      "MONO-" + c.tag));
      }
    }
    if (f == "APPENDIX") {
      all.append(check_appendix_identities(s.initial_state, s.hamiltonian, s.observable,
                                           s.schedule[0], s.schedule[1]));
    }
    if (f == "QUASI") {
      const auto q = quasi_probability(s.initial_state, s.hamiltonian, s.observable, s.schedule);
      for (std::size_t k = 0; k < q.values.size(); ++k) {
        all.entries.push_back(ConditionResult::make(
            "QUASI-(" + format_outcome(SignTable::signs(q.n, k)) + ")", q.values[k]));
      }
      details["quasi"] = to_json(q);
    }
  }

  CertificationResult result;
  for (const auto& id : request.ids) {
    const bool found = std::any_of(all.entries.begin(), all.entries.end(),
                                   [&](const auto& e) { return e.id == id; });
    if (!found) {
      throw InputError("checks: '" + id + "' is not produced for this scenario");
    }
  }
  std::set<std::string> seen;
  for (const auto& e : all.entries) {
    if (request.wants(e.id) && seen.insert(e.id).second) result.checks.entries.push_back(e);
  }
  for (auto& w : witnesses) {
    if (request.wants(w.id)) result.witnesses.push_back(std::move(w));
  }

  Json witnesses_json = Json::object();
  for (const auto& w : result.witnesses) {
    Json j = to_json(w);
    j["verdict"] = w.non_invasive() ? "non-invasive" : "invasive";
    witnesses_json[w.id] = std::move(j);
  }
  const std::size_t violations = result.checks.violations();
  Json schedule = Json::array();
  for (double t : s.schedule.times()) schedule.push_back(t);
  result.report = {
      {"mode", empirical ? "empirical" : "exact"},
      {"protocol", detail::protocol_json(s.protocol)},
      {"seed", s.protocol.seed},
      {"shots", s.protocol.shots},
      {"schedule", std::move(schedule)},
      {"derive_lower_moments", s.derive_lower_moments},
      {"experiments", experiments_json(plan, tables)},
      {"moments", std::move(moments_json)},
      {"checks", to_json(result.checks)},
      {"witnesses", std::move(witnesses_json)},
      {"details", std::move(details)},
      {"summary",
       {{"checks", result.checks.entries.size()},
        {"violations", violations},
        {"all_satisfied", violations == 0}}},
  };
  return result;
}

/// One-row CSV of a certification: sorted check ids, then max |W| per
/// witness.
inline std::vector<std::string> report_columns(const CertificationResult& r) {
  std::vector<std::string> columns;
  for (const auto& e : r.checks.entries) columns.push_back(e.id);
  std::sort(columns.begin(), columns.end());
  std::vector<std::string> witness_columns;
  for (const auto& w : r.witnesses) witness_columns.push_back(w.id + ".max_abs");
  std::sort(witness_columns.begin(), witness_columns.end());
  columns.insert(columns.end(), witness_columns.begin(), witness_columns.end());
  return columns;
}

inline std::map<std::string, double> report_values(const CertificationResult& r) {
  std::map<std::string, double> values;
  for (const auto& e : r.checks.entries) values[e.id] = e.margin;
  for (const auto& w : r.witnesses) values[w.id + ".max_abs"] = w.max_abs();
  return values;
}

inline std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string certification_csv(const CertificationResult& r) {
  const auto columns = report_columns(r);
  const auto values = report_values(r);
  std::string header, row;
  for (const auto& c : columns) {
    header += (header.empty() ? "" : ",") + csv_field(c);
    row += (row.empty() ? "" : ",") + format_double(values.at(c));
  }
  return header + "\n" + row + "\n";
}

inline std::string oracle_csv(const Json& oracle) {
  std::string out = "experiment,outcome,probability\n";
  for (const auto& [name, e] : oracle.at("experiments").items()) {
    for (const auto& [outcome, p] : e.at("table").at("probabilities").items()) {
      out += csv_field(name) + "," + csv_field(outcome) + "," + format_double(p.get<double>()) + "\n";
    }
  }
  return out;
}

}  // namespace lgcert::cli

#endif  // LGCERT_CLI_CERTIFICATION_HPP_
