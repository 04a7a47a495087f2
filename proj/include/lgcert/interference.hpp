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

#ifndef LGCERT_INTERFERENCE_HPP_
#define LGCERT_INTERFERENCE_HPP_

// Interference between measurement histories: the decoherence functional,
// the quasi-probability built from time-ordered projector strings, and the
// identities tying both to the two-time sequential probability and the NSIT
// defect.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lgcert/macrocert.hpp"
#include "lgcert/protocols.hpp"
#include "lgcert/qcore.hpp"

namespace lgcert {

/// q(s_1..s_n) = Re Tr(P_{s_n}(t_n) ... P_{s_1}(t_1) rho).
inline SignTable quasi_probability(const DensityOperator& rho, const Hamiltonian& h,
                                   const DichotomicObservable& q,
                                   const Schedule& schedule) {
  if (schedule.size() < 2) {
    throw std::invalid_argument("quasi_probability: needs at least two times");
  }
  detail::require_same_dim(rho.dim(), q.dim(), "quasi_probability");
  detail::require_same_dim(rho.dim(), h.dim(), "quasi_probability");
  const std::size_t n = schedule.size();
  std::vector<std::array<ComplexMatrix, 2>> projectors;
  for (std::size_t k = 0; k < n; ++k) {
    projectors.push_back({heisenberg_projector(q, +1, h, schedule[k]),
                          heisenberg_projector(q, -1, h, schedule[k])});
  }
  SignTable out{n, std::vector<double>(std::size_t{1} << n)};
  for (std::size_t index = 0; index < out.values.size(); ++index) {
    const auto s = SignTable::signs(n, index);
    ComplexMatrix chain = rho.matrix();
    for (std::size_t k = 0; k < n; ++k) chain = projectors[k][s[k] > 0 ? 0 : 1] * chain;
    out.values[index] = chain.trace().real();
  }
  return out;
}

/// D(s1, s2 | s1', s2) = Tr(P_{s2}(t2) P_{s1}(t1) rho P_{s1'}(t1)).
inline Complex decoherence_functional(const DensityOperator& rho, const Hamiltonian& h,
                                      const DichotomicObservable& q, double t1, double t2,
                                      int s1, int s1_prime, int s2) {
  if (!(t1 < t2)) throw std::invalid_argument("decoherence_functional: requires t1 < t2");
  detail::require_same_dim(rho.dim(), q.dim(), "decoherence_functional");
  detail::require_same_dim(rho.dim(), h.dim(), "decoherence_functional");
  const ComplexMatrix p1 = heisenberg_projector(q, s1, h, t1);
  const ComplexMatrix p1_prime = heisenberg_projector(q, s1_prime, h, t1);
  const ComplexMatrix p2 = heisenberg_projector(q, s2, h, t2);
  return (p2 * p1 * rho.matrix() * p1_prime).trace();
}

/// Coherence witness W(s2) = p2(s2) - sum_{s1} p12(s1, s2) for plain
/// projective measurements.
inline std::array<double, 2> coherence_witness(const DensityOperator& rho,
                                               const Hamiltonian& h,
                                               const DichotomicObservable& q,
                                               double t1, double t2) {
  const auto pair = run_nsit_pair(rho, h, q, t1, t2, ProtocolConfig{});
  const auto report = check_nsit(pair.p12, pair.p2_alone, {0});
  return {report.defect({+1}), report.defect({-1})};
}

/// Numerically confirms, for one (rho, H, Q, t1, t2):
///  - IDENT:   p12(s1,s2) = q(s1,s2) - W(s2)/2 (residual within 1e-12);
///  - BOUND:   where all q >= 0 and W(s2) < 0, |W(s2)| <= 2 min_{s1} p12;
///  - MONO:    p12(s1,s2) + W(s2) >= 0, the rewritten form of
///             p12(-s1,s2) <= p2(s2);
///  - MONOEQ:  that rewriting agrees with the direct difference (1e-12).
/// BOUND entries appear only for outcomes where the premise holds.
inline InequalityReport check_appendix_identities(const DensityOperator& rho,
                                                  const Hamiltonian& h,
                                                  const DichotomicObservable& q,
                                                  double t1, double t2) {
  if (!(t1 < t2)) throw std::invalid_argument("check_appendix_identities: requires t1 < t2");
  const auto pair = run_nsit_pair(rho, h, q, t1, t2, ProtocolConfig{});
  const auto& p12 = pair.p12;
  const auto& p2 = pair.p2_alone;
  const auto quasi = quasi_probability(rho, h, q, Schedule{t1, t2});
  const auto witness = check_nsit(p12, p2, {0});

  bool quasi_nonnegative = true;
  for (double v : quasi.values) quasi_nonnegative &= v >= -kVerdictTol;

  InequalityReport report;
  for (int s2 : {+1, -1}) {
    const double w = witness.defect({s2});
    double min_p12 = std::numeric_limits<double>::infinity();
    for (int s1 : {+1, -1}) {
      const std::string tag = "(" + format_outcome(std::vector<int>{s1, s2}) + ")";
      const double p = p12.raw()[p12.index_of(std::vector<int>{s1, s2})];
      const double residual = p - (quasi.at({s1, s2}) - 0.5 * w);
      report.entries.push_back(ConditionResult::make("A-IDENT-" + tag, -std::abs(residual),
                                                     kAlgebraicTol));
      report.entries.push_back(ConditionResult::make("A-MONO-" + tag, p + w));
      const double direct =
          p2.raw()[p2.index_of(std::vector<int>{s2})] -
          p12.raw()[p12.index_of(std::vector<int>{-s1, s2})];
      report.entries.push_back(ConditionResult::make(
          "A-MONOEQ-" + tag, -std::abs(direct - (p + w)), kAlgebraicTol));
      min_p12 = std::min(min_p12, p);
    }
    if (quasi_nonnegative && w < 0.0) {
      report.entries.push_back(ConditionResult::make(
          "A-BOUND-(" + format_label(s2) + ")", 2.0 * min_p12 - std::abs(w)));
    }
  }
  return report;
}

}  // namespace lgcert

#endif  // LGCERT_INTERFERENCE_HPP_
