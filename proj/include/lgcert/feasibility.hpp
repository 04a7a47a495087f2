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

#ifndef LGCERT_FEASIBILITY_HPP_
#define LGCERT_FEASIBILITY_HPP_

// Can the unfixed moments of a MomentSet be chosen so that the candidate
// probability is non-negative everywhere? Decided by Fourier-Motzkin
// elimination over the 2^n constraints
//     1 + sum_S prod_{i in S} s_i m_S >= 0,
// whose coefficients on every moment are +-1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lgcert/macrocert.hpp"

namespace lgcert {

inline constexpr double kFeasibilitySlack = 1e-10;

/// variable >= constant + sum(coeff * other)  (lower), or <= (upper).
struct DerivedBound {
  TimeSet variable = 0;
  bool lower = true;
  double constant = 0.0;
  std::vector<std::pair<TimeSet, double>> others;

  std::string to_string() const {
    std::ostringstream os;
    os << MomentSet::name(variable) << (lower ? " >= " : " <= ") << constant;
    for (const auto& [v, c] : others) {
      os << (c < 0 ? " - " : " + ") << std::abs(c) << "*" << MomentSet::name(v);
    }
    return os.str();
  }
};

struct FeasibilityResult {
  bool feasible = false;
  /// One feasible assignment of the unfixed moments (when feasible).
  std::vector<std::pair<TimeSet, double>> witness;
  /// Contradictory pair (lower, upper) on one variable (when infeasible).
  std::optional<std::pair<DerivedBound, DerivedBound>> certificate;
  /// Smallest derived constant gap: non-negative when feasible, the size of
  /// the contradiction (negative) otherwise.
  double gap = 0.0;

  double value_of(TimeSet v) const {
    for (const auto& [var, x] : witness) {
      if (var == v) return x;
    }
    throw std::out_of_range("no witness value for " + MomentSet::name(v));
  }
};

/// Elimination order: E, then D_ijk, then C_ij, then <Q_i>; lexicographic in
/// the time indices within each order.
inline std::vector<TimeSet> elimination_order(const MomentSet& m) {
  std::vector<TimeSet> vars;
  for (TimeSet s : m.subsets()) {
    if (!m.fixed(s)) vars.push_back(s);
  }
  std::sort(vars.begin(), vars.end(), [](TimeSet a, TimeSet b) {
    if (std::popcount(a) != std::popcount(b)) return std::popcount(a) > std::popcount(b);
    return time_indices(a) < time_indices(b);
  });
  return vars;
}

namespace detail {

struct FmRow {
  std::vector<double> coef;  // one per variable, eliminated ones are zero
  double constant = 0.0;     // row reads constant + coef . x >= 0
  std::uint32_t ancestors = 0;
  int lower_parent = -1;  // indices into the previous stage
  int upper_parent = -1;
};

inline DerivedBound bound_from_row(const FmRow& row, std::size_t var,
                                   const std::vector<TimeSet>& vars) {
  const double a = row.coef[var];
  DerivedBound b;
  b.variable = vars[var];
  b.lower = a > 0.0;
  b.constant = -row.constant / a;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (j != var && row.coef[j] != 0.0) b.others.emplace_back(vars[j], -row.coef[j] / a);
  }
  return b;
}

}  // namespace detail

inline FeasibilityResult feasible_completion(const MomentSet& m) {
  const std::size_t n = m.n();
  if (n != 3 && n != 4) throw std::invalid_argument("feasible_completion: n must be 3 or 4");
  const std::vector<TimeSet> vars = elimination_order(m);
  if (vars.empty()) throw std::invalid_argument("feasible_completion: nothing is unfixed");
  const std::size_t k = vars.size();

  std::vector<detail::FmRow> rows;
  for (std::size_t index = 0; index < (std::size_t{1} << n); ++index) {
    detail::FmRow row;
    row.coef.assign(k, 0.0);
    row.constant = 1.0;
    for (TimeSet s : m.subsets()) {
      const int sign = parity(s, n, index);
      if (m.fixed(s)) {
        row.constant += sign * m.value(s);
      } else {
        const auto pos = std::find(vars.begin(), vars.end(), s) - vars.begin();
        row.coef[static_cast<std::size_t>(pos)] = sign;
      }
    }
    row.ancestors = std::uint32_t{1} << index;
    rows.push_back(std::move(row));
  }

  FeasibilityResult result;
  result.gap = std::numeric_limits<double>::infinity();
  std::vector<std::vector<detail::FmRow>> stages{rows};

  for (std::size_t v = 0; v < k; ++v) {
    const auto& current = stages.back();
    std::vector<std::size_t> lowers, uppers;
    std::map<std::vector<double>, detail::FmRow> next;
    auto keep = [&](detail::FmRow row) {
      auto [it, inserted] = next.try_emplace(row.coef, row);
      if (!inserted && row.constant < it->second.constant) it->second = std::move(row);
    };
    for (std::size_t r = 0; r < current.size(); ++r) {
      const double a = current[r].coef[v];
      if (a > 0.0) {
        lowers.push_back(r);
      } else if (a < 0.0) {
        uppers.push_back(r);
      } else {
        keep(current[r]);
      }
    }

    std::optional<std::pair<std::size_t, std::size_t>> worst;
    double worst_constant = -kFeasibilitySlack;
    for (auto lo : lowers) {
      for (auto up : uppers) {
        const auto& l = current[lo];
        const auto& u = current[up];
        const std::uint32_t ancestors = l.ancestors | u.ancestors;
        // Chernikov: after eliminating v+1 variables a non-redundant row has
        // at most v+2 original ancestors.
        if (static_cast<std::size_t>(std::popcount(ancestors)) > v + 2) continue;
        detail::FmRow row;
        row.coef.resize(k);
        const double al = l.coef[v], au = -u.coef[v];
        for (std::size_t j = 0; j < k; ++j) row.coef[j] = l.coef[j] / al + u.coef[j] / au;
        row.coef[v] = 0.0;
        row.constant = l.constant / al + u.constant / au;
        row.ancestors = ancestors;
        row.lower_parent = static_cast<int>(lo);
        row.upper_parent = static_cast<int>(up);

        const bool constant_only = std::all_of(row.coef.begin(), row.coef.end(),
                                               [](double c) { return std::abs(c) < 1e-14; });
        if (constant_only) {
          result.gap = std::min(result.gap, row.constant);
          if (row.constant < worst_constant) {
            worst_constant = row.constant;
            worst = {lo, up};
          }
          continue;
        }
        keep(std::move(row));
      }
    }

    if (worst) {
      result.feasible = false;
      result.certificate = {detail::bound_from_row(current[worst->first], v, vars),
                            detail::bound_from_row(current[worst->second], v, vars)};
      result.gap = worst_constant;
      return result;
    }

    std::vector<detail::FmRow> stage;
    stage.reserve(next.size());
    for (auto& [coef, row] : next) stage.push_back(std::move(row));
    stages.push_back(std::move(stage));
  }

  // Back-substitute from the last eliminated variable, taking the midpoint of
  // each admissible interval.
  result.feasible = true;
  if (!std::isfinite(result.gap)) result.gap = 0.0;
  std::vector<double> x(k, 0.0);
  for (std::size_t v = k; v-- > 0;) {
    double lo = -1.0, hi = 1.0;
    for (const auto& row : stages[v]) {
      const double a = row.coef[v];
      if (a == 0.0) continue;
      double rest = row.constant;
      for (std::size_t j = v + 1; j < k; ++j) rest += row.coef[j] * x[j];
      const double b = -rest / a;
      if (a > 0.0) {
        lo = std::max(lo, b);
      } else {
        hi = std::min(hi, b);
      }
    }
    x[v] = 0.5 * (lo + hi);
  }
  for (std::size_t v = 0; v < k; ++v) result.witness.emplace_back(vars[v], x[v]);
  return result;
}

}  // namespace lgcert

#endif  // LGCERT_FEASIBILITY_HPP_
