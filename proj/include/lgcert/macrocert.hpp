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

#ifndef LGCERT_MACROCERT_HPP_
#define LGCERT_MACROCERT_HPP_

// Moments of a dichotomic variable measured at up to four times, the
// candidate joint probability they determine, and the macrorealism
// conditions checked against them.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lgcert/outcome_table.hpp"

namespace lgcert {

/// Margins at or above -kVerdictTol count as satisfied in exact mode.
inline constexpr double kVerdictTol = 1e-10;
/// Statistical verdicts flag a violation only beyond this many standard errors.
inline constexpr double kDefaultSigmas = 3.0;

/// Subset of measurement times, bit k <-> time index k (0-based).
using TimeSet = std::uint32_t;

inline TimeSet time_set(std::initializer_list<std::size_t> indices) {
  TimeSet s = 0;
  for (auto k : indices) s |= TimeSet{1} << k;
  return s;
}

inline std::vector<std::size_t> time_indices(TimeSet s) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < 32; ++k) {
    if (s & (TimeSet{1} << k)) out.push_back(k);
  }
  return out;
}

/// "12" for time indices {0, 1}.
inline std::string time_digits(TimeSet s) {
  std::string out;
  for (auto k : time_indices(s)) out += std::to_string(k + 1);
  return out;
}

struct Moment {
  double value = 0.0;
  std::uint64_t shots = 0;  // 0 = exact

  /// Multinomial standard error of an average of +-1 products.
  double standard_error() const {
    if (shots == 0) return 0.0;
    return std::sqrt(std::max(0.0, 1.0 - value * value) /
                     static_cast<double>(shots));
  }
};

/// Averages <Q_i>, correlators C_ij, D_ijk and E for n = 2..4 times, each
/// either fixed (measured) or unfixed.
class MomentSet {
 public:
  explicit MomentSet(std::size_t n) : n_(n) {
    if (n < 2 || n > 4) throw std::invalid_argument("moment set: n must be 2, 3 or 4");
  }

  std::size_t n() const { return n_; }
  TimeSet all() const { return (TimeSet{1} << n_) - 1; }

  void fix(TimeSet s, double value, std::uint64_t shots = 0) {
    check_subset(s);
    if (!std::isfinite(value) || std::abs(value) > 1.0 + 1e-12) {
      throw std::invalid_argument("moment " + name(s) + " = " +
                                  std::to_string(value) + " outside [-1, 1]");
    }
    moments_[s] = Moment{std::clamp(value, -1.0, 1.0), shots};
  }
  void unfix(TimeSet s) {
    check_subset(s);
    moments_[s].reset();
  }

  bool fixed(TimeSet s) const {
    check_subset(s);
    return moments_[s].has_value();
  }
  const std::optional<Moment>& get(TimeSet s) const {
    check_subset(s);
    return moments_[s];
  }
  double value(TimeSet s) const {
    const auto& m = get(s);
    if (!m) throw std::invalid_argument("moment " + name(s) + " is not fixed");
    return m->value;
  }

  double average(std::size_t i) const { return value(time_set({i})); }
  double correlator(std::size_t i, std::size_t j) const {
    return value(time_set({i, j}));
  }

  /// Every non-empty subset of the n times.
  std::vector<TimeSet> subsets() const {
    std::vector<TimeSet> out;
    for (TimeSet s = 1; s <= all(); ++s) out.push_back(s);
    return out;
  }

  /// "<Q1>", "C12", "D123", "E".
  static std::string name(TimeSet s) {
    switch (std::popcount(s)) {
      case 1: return "<Q" + time_digits(s) + ">";
      case 2: return "C" + time_digits(s);
      case 3: return "D" + time_digits(s);
      case 4: return "E";
    }
    return "?";
  }

 private:
  void check_subset(TimeSet s) const {
    if (s == 0 || (s & ~all()) != 0) {
      throw std::invalid_argument("moment set: time subset outside 1.." +
                                  std::to_string(n_));
    }
  }

  std::size_t n_;
  std::array<std::optional<Moment>, 16> moments_{};
};

/// Real function of sign strings (s_1..s_n), index bit (n-1-i) set iff
/// s_i = -1, i.e. the same row-major order as a dichotomic OutcomeTable.
struct SignTable {
  std::size_t n = 0;
  std::vector<double> values;

  static std::vector<int> signs(std::size_t n, std::size_t index) {
    std::vector<int> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = (index >> (n - 1 - i)) & 1U ? -1 : +1;
    return s;
  }
  static std::size_t index_of(std::span<const int> s) {
    std::size_t index = 0;
    for (int v : s) index = 2 * index + (v < 0 ? 1 : 0);
    return index;
  }
  double at(std::span<const int> s) const { return values.at(index_of(s)); }
  double at(std::initializer_list<int> s) const {
    return at(std::span(s.begin(), s.size()));
  }
  double total() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
};

using CandidateProbability = SignTable;

/// prod_{i in S} s_i for the sign string with the given index.
inline int parity(TimeSet s, std::size_t n, std::size_t index) {
  int sign = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if ((s >> i) & 1U) sign *= ((index >> (n - 1 - i)) & 1U) ? -1 : 1;
  }
  return sign;
}

struct ConditionResult {
  std::string id;
  double margin = 0.0;
  double tolerance = kVerdictTol;
  bool satisfied = true;

  static ConditionResult make(std::string id, double margin,
                              double tolerance = kVerdictTol) {
    return {std::move(id), margin, tolerance, margin >= -tolerance};
  }
};

struct InequalityReport {
  std::vector<ConditionResult> entries;

  bool all_satisfied() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const auto& e) { return e.satisfied; });
  }
  std::size_t violations() const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(), [](const auto& e) { return !e.satisfied; }));
  }
  const ConditionResult& at(const std::string& id) const {
    for (const auto& e : entries) {
      if (e.id == id) return e;
    }
    throw std::out_of_range("no condition " + id);
  }
  void append(const InequalityReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  }
};

/// Per-outcome NSIT defects W = reduced - marginal(full).
struct WitnessReport {
  std::string id;
  std::vector<Outcome> outcomes;
  std::vector<double> defects;
  std::vector<double> tolerances;

  double max_abs() const {
    double m = 0.0;
    for (double w : defects) m = std::max(m, std::abs(w));
    return m;
  }
  bool non_invasive() const {
    for (std::size_t i = 0; i < defects.size(); ++i) {
      if (std::abs(defects[i]) > tolerances[i]) return false;
    }
    return true;
  }
  double defect(const Outcome& outcome) const {
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i] == outcome) return defects[i];
    }
    throw std::out_of_range("no defect for outcome (" + format_outcome(outcome) + ")");
  }
};

namespace detail {

// margin = constant + sum coeff * moment, with a linearly propagated
// statistical tolerance when any contributing moment is empirical.
inline ConditionResult linear_condition(
    std::string id, double constant,
    std::span<const std::pair<TimeSet, double>> terms, const MomentSet& m,
    double sigmas) {
  double margin = constant;
  double variance = 0.0;
  for (const auto& [s, c] : terms) {
    const auto& moment = m.get(s);
    if (!moment) {
      throw std::invalid_argument(id + ": moment " + MomentSet::name(s) + " is not fixed");
    }
    margin += c * moment->value;
    const double se = moment->standard_error();
    variance += c * c * se * se;
  }
  return ConditionResult::make(std::move(id), margin,
                               std::max(kVerdictTol, sigmas * std::sqrt(variance)));
}

inline void require_dichotomic(const OutcomeTable& t, const std::string& what) {
  for (const auto& slot : t.slots()) {
    if (slot != SlotLabels{+1, -1}) {
      throw std::invalid_argument(what + ": table slots must be labelled +1/-1");
    }
  }
}

}  // namespace detail

/// An experiment's table together with the schedule indices its slots
/// record.
struct LabeledTable {
  std::vector<std::size_t> times;
  OutcomeTable table;
};

/// Fills one moment per experiment: each table supplies the moment of all of
/// its times (<Q_i> from a single-time table, C_ij from a two-time table,
/// ...). With `derive_lower` a table also supplies every lower moment of its
/// times. A moment supplied twice is an error.
inline MomentSet moments_from_tables(std::span<const LabeledTable> tables,
                                     std::size_t n, bool derive_lower = false) {
  MomentSet m(n);
  for (const auto& [times, table] : tables) {
    if (times.size() != table.arity()) {
      throw std::invalid_argument("moments_from_tables: table records " +
                                  std::to_string(table.arity()) + " slots but is labelled with " +
                                  std::to_string(times.size()) + " times");
    }
    detail::require_dichotomic(table, "moments_from_tables");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= n || (i > 0 && times[i] <= times[i - 1])) {
        throw std::invalid_argument("moments_from_tables: time labels must be increasing indices below n");
      }
    }
    const std::size_t slots = times.size();
    const TimeSet top = (TimeSet{1} << slots) - 1;
    for (TimeSet local = 1; local <= top; ++local) {
      if (!derive_lower && local != top) continue;
      TimeSet global = 0;
      double value = 0.0;
      for (std::size_t i = 0; i < slots; ++i) {
        if ((local >> i) & 1U) global |= TimeSet{1} << times[i];
      }
      for (std::size_t k = 0; k < table.size(); ++k) {
        // Slot i of the table is bit i of `local`; parity() indexes by slot.
        value += parity(local, slots, k) * table[k];
      }
      if (m.fixed(global)) {
        throw std::invalid_argument("moments_from_tables: duplicate source for " +
                                    MomentSet::name(global));
      }
      m.fix(global, std::clamp(value, -1.0, 1.0), table.shots());
    }
  }
  return m;
}

/// p(s) = 2^-n (1 + sum_S prod_{i in S} s_i m_S) over all fixed moments.
inline CandidateProbability candidate_probability(const MomentSet& m) {
  const std::size_t n = m.n();
  CandidateProbability c{n, std::vector<double>(std::size_t{1} << n, 0.0)};
  const double scale = 1.0 / static_cast<double>(std::size_t{1} << n);
  for (std::size_t index = 0; index < c.values.size(); ++index) {
    double acc = 1.0;
    for (TimeSet s : m.subsets()) acc += parity(s, n, index) * m.value(s);
    c.values[index] = scale * acc;
  }
  return c;
}

/// Non-negativity of every candidate entry, built directly from the moments
/// so that empirical moments propagate their errors into each tolerance.
inline InequalityReport check_nonnegativity(const MomentSet& m,
                                            double sigmas = kDefaultSigmas) {
  const std::size_t n = m.n();
  const double scale = 1.0 / static_cast<double>(std::size_t{1} << n);
  InequalityReport report;
  for (std::size_t index = 0; index < (std::size_t{1} << n); ++index) {
    std::vector<std::pair<TimeSet, double>> terms;
    for (TimeSet s : m.subsets()) terms.emplace_back(s, scale * parity(s, n, index));
    report.entries.push_back(detail::linear_condition(
        "NONNEG-(" + format_outcome(SignTable::signs(n, index)) + ")", scale, terms, m,
        sigmas));
  }
  return report;
}

inline InequalityReport check_nonnegativity(const CandidateProbability& c) {
  InequalityReport report;
  for (std::size_t index = 0; index < c.values.size(); ++index) {
    report.entries.push_back(ConditionResult::make(
        "NONNEG-(" + format_outcome(SignTable::signs(c.n, index)) + ")", c.values[index]));
  }
  return report;
}

/// Three-time LG inequalities, in the order
///   1 + C12 + C23 + C13, 1 - C12 - C23 + C13,
///   1 + C12 - C23 - C13, 1 - C12 + C23 - C13.
inline InequalityReport check_lg3(const MomentSet& m, double sigmas = kDefaultSigmas) {
  if (m.n() < 3) throw std::invalid_argument("check_lg3: needs three times");
  const TimeSet c12 = time_set({0, 1}), c23 = time_set({1, 2}), c13 = time_set({0, 2});
  constexpr std::array<std::array<double, 3>, 4> signs{{
      {+1, +1, +1}, {-1, -1, +1}, {+1, -1, -1}, {-1, +1, -1}}};
  InequalityReport report;
  for (std::size_t k = 0; k < signs.size(); ++k) {
    const std::array<std::pair<TimeSet, double>, 3> terms{
        {{c12, signs[k][0]}, {c23, signs[k][1]}, {c13, signs[k][2]}}};
    report.entries.push_back(detail::linear_condition(
        "LG3-" + std::to_string(k + 1), 1.0, terms, m, sigmas));
  }
  return report;
}

/// Pairs whose two-time LG inequalities form the standard set: (12) for two
/// times, (12), (23), (13) for three and (12), (23), (34), (14) for four.
inline std::vector<std::pair<std::size_t, std::size_t>> lg2_pairs(std::size_t n) {
  switch (n) {
    case 2: return {{0, 1}};
    case 3: return {{0, 1}, {1, 2}, {0, 2}};
    case 4: return {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  }
  throw std::invalid_argument("lg2_pairs: n must be 2, 3 or 4");
}

/// Two-time LG inequalities per pair, in the order
///   1 + <Qi> + <Qj> + Cij, 1 - <Qi> - <Qj> + Cij,
///   1 + <Qi> - <Qj> - Cij, 1 - <Qi> + <Qj> - Cij,
/// i.e. 4 q(s_i, s_j) for (s_i, s_j) = (+,+), (-,-), (+,-), (-,+).
inline InequalityReport check_lg2(const MomentSet& m, double sigmas = kDefaultSigmas) {
  constexpr std::array<std::array<double, 3>, 4> signs{{
      {+1, +1, +1}, {-1, -1, +1}, {+1, -1, -1}, {-1, +1, -1}}};
  InequalityReport report;
  for (const auto& [i, j] : lg2_pairs(m.n())) {
    const std::string pair = std::to_string(i + 1) + std::to_string(j + 1);
    for (std::size_t k = 0; k < signs.size(); ++k) {
      const std::array<std::pair<TimeSet, double>, 3> terms{
          {{time_set({i}), signs[k][0]},
           {time_set({j}), signs[k][1]},
           {time_set({i, j}), signs[k][2]}}};
      report.entries.push_back(detail::linear_condition(
          "LG2-" + pair + "-" + std::to_string(k + 1), 1.0, terms, m, sigmas));
    }
  }
  return report;
}

/// Four-time LG inequalities 2 -+ (C12 + C23 + C34 + C14 with one correlator
/// negated). LG4-(2j+1) is 2 + inner_j and LG4-(2j+2) is 2 - inner_j, where
/// inner_j negates the j-th of (C12, C23, C34, C14).
inline InequalityReport check_lg4(const MomentSet& m, double sigmas = kDefaultSigmas) {
  if (m.n() != 4) throw std::invalid_argument("check_lg4: needs four times");
  const std::array<TimeSet, 4> cs{time_set({0, 1}), time_set({1, 2}),
                                  time_set({2, 3}), time_set({0, 3})};
  InequalityReport report;
  int id = 1;
  for (std::size_t negated = 0; negated < 4; ++negated) {
    for (double overall : {+1.0, -1.0}) {
      std::array<std::pair<TimeSet, double>, 4> terms{};
      for (std::size_t k = 0; k < 4; ++k) {
        terms[k] = {cs[k], overall * (k == negated ? -1.0 : 1.0)};
      }
      report.entries.push_back(detail::linear_condition(
          "LG4-" + std::to_string(id++), 2.0, terms, m, sigmas));
    }
  }
  return report;
}

/// NSIT defects W(outcome) = reduced(outcome) - sum over `marginalize_over`
/// of full. Empirical inputs get a per-outcome tolerance of `sigmas`
/// binomial standard errors of the difference; exact inputs use
/// `exact_threshold`.
inline WitnessReport check_nsit(const OutcomeTable& full, const OutcomeTable& reduced,
                                std::span<const std::size_t> marginalize_over,
                                std::string id = "NSIT",
                                double exact_threshold = kVerdictTol,
                                double sigmas = kDefaultSigmas) {
  std::vector<std::size_t> keep;
  for (std::size_t s = 0; s < full.arity(); ++s) {
    if (std::find(marginalize_over.begin(), marginalize_over.end(), s) ==
        marginalize_over.end()) {
      keep.push_back(s);
    }
  }
  if (keep.size() + marginalize_over.size() != full.arity() || keep.empty()) {
    throw std::invalid_argument("check_nsit: invalid marginalized slot set");
  }
  const OutcomeTable marginal = marginal_distribution(full, keep);
  if (marginal.slots() != reduced.slots()) {
    throw std::invalid_argument("check_nsit: reduced table slots do not match the marginal of the full table");
  }
  WitnessReport report;
  report.id = std::move(id);
  for (std::size_t k = 0; k < reduced.size(); ++k) {
    report.outcomes.push_back(reduced.outcome_at(k));
    report.defects.push_back(reduced.raw()[k] - marginal.raw()[k]);
    const double se_r = standard_error(reduced[k], reduced.shots());
    const double se_f = standard_error(marginal[k], full.shots());
    const double stat = sigmas * std::sqrt(se_r * se_r + se_f * se_f);
    report.tolerances.push_back(
        (reduced.empirical() || full.empirical()) ? std::max(stat, exact_threshold)
                                                  : exact_threshold);
  }
  return report;
}

inline WitnessReport check_nsit(const OutcomeTable& full, const OutcomeTable& reduced,
                                std::initializer_list<std::size_t> marginalize_over,
                                std::string id = "NSIT") {
  return check_nsit(full, reduced, std::span(marginalize_over.begin(), marginalize_over.size()),
                    std::move(id));
}

/// Sequential monotonicity: reduced(tail) >= full(head, tail) for every
/// assignment of the `head` slots of full (by default its leading slots).
inline InequalityReport check_monotonicity(const OutcomeTable& full,
                                           const OutcomeTable& reduced,
                                           std::optional<std::vector<std::size_t>> head = std::nullopt,
                                           const std::string& id = "MONO",
                                           double sigmas = kDefaultSigmas) {
  if (reduced.arity() >= full.arity()) {
    throw std::invalid_argument("check_monotonicity: reduced table must have fewer slots");
  }
  std::vector<std::size_t> dropped;
  if (head) {
    dropped = *head;
  } else {
    for (std::size_t s = 0; s < full.arity() - reduced.arity(); ++s) dropped.push_back(s);
  }
  std::vector<std::size_t> tail;
  for (std::size_t s = 0; s < full.arity(); ++s) {
    if (std::find(dropped.begin(), dropped.end(), s) == dropped.end()) tail.push_back(s);
  }
  if (tail.size() != reduced.arity()) {
    throw std::invalid_argument("check_monotonicity: slot mismatch");
  }
  for (std::size_t i = 0; i < tail.size(); ++i) {
    if (full.slots()[tail[i]] != reduced.slots()[i]) {
      throw std::invalid_argument("check_monotonicity: slot labels do not match");
    }
  }
  InequalityReport report;
  const bool empirical = full.empirical() || reduced.empirical();
  for (std::size_t k = 0; k < full.size(); ++k) {
    const Outcome outcome = full.outcome_at(k);
    Outcome rest;
    for (auto s : tail) rest.push_back(outcome[s]);
    const double r = reduced.at(rest);
    const double f = full[k];
    double tol = kVerdictTol;
    if (empirical) {
      const double se_r = standard_error(r, reduced.shots());
      const double se_f = standard_error(f, full.shots());
      tol = std::max(tol, sigmas * std::sqrt(se_r * se_r + se_f * se_f));
    }
    report.entries.push_back(
        ConditionResult::make(id + "-(" + format_outcome(outcome) + ")", r - f, tol));
  }
  return report;
}

/// Four-time completion p(s1,s2,s3,s4) = p123 p124 / p12 of two three-time
/// tables sharing the (s1, s2) marginal; zero where p12 vanishes.
inline OutcomeTable fine_extension(const OutcomeTable& p123, const OutcomeTable& p124) {
  if (p123.arity() != 3 || p124.arity() != 3) {
    throw std::invalid_argument("fine_extension: inputs must be three-time tables");
  }
  detail::require_dichotomic(p123, "fine_extension");
  detail::require_dichotomic(p124, "fine_extension");
  for (const auto* t : {&p123, &p124}) {
    if (std::abs(t->total() - 1.0) > kNormalizationTol) {
      throw std::invalid_argument("fine_extension: inputs must be normalized");
    }
  }
  const OutcomeTable a = marginal_distribution(p123, {0, 1});
  const OutcomeTable b = marginal_distribution(p124, {0, 1});
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.raw()[k] - b.raw()[k]) > kNormalizationTol) {
      throw std::invalid_argument("fine_extension: inputs disagree on the (s1, s2) marginal at (" +
                                  format_outcome(a.outcome_at(k)) + ")");
    }
  }
  std::vector<double> probs(16, 0.0);
  for (std::size_t index = 0; index < 16; ++index) {
    const auto s = SignTable::signs(4, index);
    const double p12 = a.at({s[0], s[1]});
    if (p12 <= 0.0) continue;
    probs[index] = p123.at({s[0], s[1], s[2]}) * p124.at({s[0], s[1], s[3]}) / p12;
  }
  return OutcomeTable(dichotomic_slots(4), std::move(probs));
}

}  // namespace lgcert

#endif  // LGCERT_MACROCERT_HPP_
