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

#ifndef LGCERT_SERIALIZATION_HPP_
#define LGCERT_SERIALIZATION_HPP_

// JSON and CSV forms of matrices, outcome tables and reports. JSON objects
// use nlohmann's default (sorted) key order, so dumps are canonical.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgcert/feasibility.hpp"
#include "lgcert/macrocert.hpp"
#include "lgcert/outcome_table.hpp"
#include "lgcert/qcore.hpp"

namespace lgcert {

using Json = nlohmann::json;

/// Shortest representation that reads back to the same double; falls back
/// to 17 significant digits.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec == std::errc()) return std::string(buf, res.ptr);
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline int parse_label(const std::string& text) {
  int value = 0;
  const char* first = text.data();
  if (!text.empty() && text[0] == '+') ++first;
  const auto res = std::from_chars(first, text.data() + text.size(), value);
  if (first == text.data() + text.size() || res.ec != std::errc() ||
      res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("invalid outcome label '" + text + "'");
  }
  return value;
}

inline double parse_double(const std::string& text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("invalid number '" + text + "'");
  }
  return value;
}

inline std::vector<int> parse_outcome(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_label(item));
  return out;
}

// ---- matrices --------------------------------------------------------------

/// Row-major nested arrays of [re, im] pairs.
inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Accepts [re, im] pairs or plain real numbers as entries.
inline ComplexMatrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument(field + ": expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument(field + ": row " + std::to_string(i) + " has the wrong length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& e = row[static_cast<std::size_t>(k)];
      if (e.is_number()) {
        m(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw std::invalid_argument(field + ": entry (" + std::to_string(i) + ", " +
                                    std::to_string(k) + ") must be a number or [re, im]");
      }
    }
  }
  if (!detail::all_finite(m)) throw std::invalid_argument(field + ": entries must be finite");
  return m;
}

// ---- outcome tables --------------------------------------------------------

inline Json to_json(const OutcomeTable& t) {
  Json slots = Json::array();
  for (const auto& s : t.slots()) {
    Json labels = Json::array();
    for (int l : s) labels.push_back(format_label(l));
    slots.push_back(std::move(labels));
  }
  Json probs = Json::object();
  for (std::size_t k = 0; k < t.size(); ++k) probs[format_outcome(t.outcome_at(k))] = t.raw()[k];
  Json out{{"slots", std::move(slots)}, {"probabilities", std::move(probs)}};
  if (t.empirical()) out["shots"] = t.shots();
  return out;
}

inline OutcomeTable table_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("slots") || !j.contains("probabilities")) {
    throw std::invalid_argument("outcome table: expected keys 'slots' and 'probabilities'");
  }
  std::vector<SlotLabels> slots;
  for (const auto& s : j.at("slots")) {
    SlotLabels labels;
    for (const auto& l : s) labels.push_back(parse_label(l.get<std::string>()));
    slots.push_back(std::move(labels));
  }
  std::vector<double> probs(OutcomeTable::entry_count(slots), 0.0);
  for (const auto& [key, value] : j.at("probabilities").items()) {
    probs.at(OutcomeTable::index_in(slots, parse_outcome(key))) = value.get<double>();
  }
  const std::uint64_t shots = j.contains("shots") ? j.at("shots").get<std::uint64_t>() : 0;
  return OutcomeTable(std::move(slots), std::move(probs), shots);
}

/// Header "s1,...,sm,probability"; one row per outcome tuple.
inline std::string to_csv(const OutcomeTable& t) {
  std::string out;
  for (std::size_t s = 0; s < t.arity(); ++s) out += "s" + std::to_string(s + 1) + ",";
  out += "probability\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    out += format_outcome(t.outcome_at(k)) + "," + format_double(t.raw()[k]) + "\n";
  }
  return out;
}

/// Inverse of to_csv for dense tables; slot labels are taken in order of
/// first appearance, which reproduces the row-major layout.
inline OutcomeTable table_from_csv(const std::string& text, std::uint64_t shots = 0) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw std::invalid_argument("outcome csv: empty input");
  const std::size_t arity = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  std::vector<SlotLabels> slots(arity);
  std::vector<std::pair<Outcome, double>> rows;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto cut = line.rfind(',');
    if (cut == std::string::npos) throw std::invalid_argument("outcome csv: malformed row");
    Outcome o = parse_outcome(line.substr(0, cut));
    if (o.size() != arity) throw std::invalid_argument("outcome csv: row arity mismatch");
    for (std::size_t s = 0; s < arity; ++s) {
      if (std::find(slots[s].begin(), slots[s].end(), o[s]) == slots[s].end()) {
        slots[s].push_back(o[s]);
      }
    }
    rows.emplace_back(std::move(o), parse_double(line.substr(cut + 1)));
  }
  std::vector<double> probs(OutcomeTable::entry_count(slots), 0.0);
  for (const auto& [o, p] : rows) probs.at(OutcomeTable::index_in(slots, o)) = p;
  return OutcomeTable(std::move(slots), std::move(probs), shots);
}

// ---- reports ---------------------------------------------------------------

inline Json to_json(const ConditionResult& c) {
  return {{"margin", c.margin}, {"tolerance", c.tolerance}, {"satisfied", c.satisfied}};
}

/// Keyed by condition id.
inline Json to_json(const InequalityReport& r) {
  Json out = Json::object();
  for (const auto& e : r.entries) out[e.id] = to_json(e);
  return out;
}

inline Json to_json(const WitnessReport& w) {
  Json defects = Json::object(), tolerances = Json::object();
  for (std::size_t i = 0; i < w.outcomes.size(); ++i) {
    defects[format_outcome(w.outcomes[i])] = w.defects[i];
    tolerances[format_outcome(w.outcomes[i])] = w.tolerances[i];
  }
  return {{"defects", std::move(defects)},
          {"tolerances", std::move(tolerances)},
          {"max_abs", w.max_abs()},
          {"non_invasive", w.non_invasive()}};
}

inline Json to_json(const SignTable& t) {
  Json out = Json::object();
  for (std::size_t k = 0; k < t.values.size(); ++k) {
    out[format_outcome(SignTable::signs(t.n, k))] = t.values[k];
  }
  return out;
}

inline Json to_json(const DerivedBound& b) {
  Json others = Json::object();
  for (const auto& [v, c] : b.others) others[MomentSet::name(v)] = c;
  return {{"variable", MomentSet::name(b.variable)},
          {"kind", b.lower ? "lower" : "upper"},
          {"constant", b.constant},
          {"terms", std::move(others)},
          {"text", b.to_string()}};
}

inline Json to_json(const FeasibilityResult& r) {
  Json out{{"feasible", r.feasible}, {"gap", r.gap}};
  if (r.feasible) {
    Json w = Json::object();
    for (const auto& [v, x] : r.witness) w[MomentSet::name(v)] = x;
    out["witness"] = std::move(w);
  }
  if (r.certificate) {
    out["certificate"] = {to_json(r.certificate->first), to_json(r.certificate->second)};
  }
  return out;
}

}  // namespace lgcert

#endif  // LGCERT_SERIALIZATION_HPP_
