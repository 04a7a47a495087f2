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

#ifndef LGCERT_OUTCOME_TABLE_HPP_
#define LGCERT_OUTCOME_TABLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lgcert {

inline constexpr double kNormalizationTol = 1e-10;
inline constexpr double kEntryRangeTol = 1e-12;

using Outcome = std::vector<int>;
using SlotLabels = std::vector<int>;

/// "+1", "-1", "+2", "0": positive labels always carry an explicit sign.
inline std::string format_label(int label) {
  return label > 0 ? "+" + std::to_string(label) : std::to_string(label);
}

inline std::string format_outcome(std::span<const int> outcome) {
  std::string out;
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (i) out += ',';
    out += format_label(outcome[i]);
  }
  return out;
}

inline std::vector<SlotLabels> dichotomic_slots(std::size_t count) {
  return std::vector<SlotLabels>(count, SlotLabels{+1, -1});
}

/// Probability distribution over outcome tuples, stored densely in row-major
/// order (first slot most significant).
///
/// Exact tables (shots == 0) must be normalized to 1e-10. Empirical tables
/// carry their shot count; their entries are counts / shots and are not
/// required to sum to one, because tables assembled from several
/// post-selected experiments need not.
class OutcomeTable {
 public:
  OutcomeTable(std::vector<SlotLabels> slots, std::vector<double> probabilities,
               std::uint64_t shots = 0)
      : slots_(std::move(slots)), probs_(std::move(probabilities)), shots_(shots) {
    if (slots_.empty()) throw std::invalid_argument("outcome table: no slots");
    for (const auto& s : slots_) {
      if (s.empty()) throw std::invalid_argument("outcome table: empty slot");
      for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          if (s[i] == s[j]) {
            throw std::invalid_argument("outcome table: duplicate label " +
                                        format_label(s[i]));
          }
        }
      }
    }
    const std::size_t expected = entry_count(slots_);
    if (probs_.size() != expected) {
      throw std::invalid_argument("outcome table: expected " +
                                  std::to_string(expected) + " entries, got " +
                                  std::to_string(probs_.size()));
    }
    for (std::size_t k = 0; k < probs_.size(); ++k) {
      const double p = probs_[k];
      if (!std::isfinite(p) || p < -kEntryRangeTol || p > 1.0 + kEntryRangeTol) {
        throw std::invalid_argument("outcome table: probability of (" +
                                    format_outcome(outcome_at(k)) +
                                    ") outside [0, 1]");
      }
    }
    if (shots_ == 0 && std::abs(total() - 1.0) > kNormalizationTol) {
      throw std::invalid_argument("outcome table: probabilities sum to " +
                                  std::to_string(total()) + ", expected 1");
    }
  }

  static OutcomeTable point_mass(std::vector<SlotLabels> slots,
                                 const Outcome& outcome) {
    std::vector<double> probs(entry_count(slots), 0.0);
    probs[index_in(slots, outcome)] = 1.0;
    return OutcomeTable(std::move(slots), std::move(probs));
  }

  static std::size_t entry_count(const std::vector<SlotLabels>& slots) {
    std::size_t n = 1;
    for (const auto& s : slots) n *= s.size();
    return n;
  }

  static std::size_t index_in(const std::vector<SlotLabels>& slots,
                              std::span<const int> outcome) {
    if (outcome.size() != slots.size()) {
      throw std::invalid_argument("outcome table: tuple arity mismatch");
    }
    std::size_t index = 0;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto& labels = slots[s];
      const auto it = std::find(labels.begin(), labels.end(), outcome[s]);
      if (it == labels.end()) {
        throw std::invalid_argument("outcome table: label " +
                                    format_label(outcome[s]) +
                                    " not in slot " + std::to_string(s));
      }
      index = index * labels.size() +
              static_cast<std::size_t>(it - labels.begin());
    }
    return index;
  }

  const std::vector<SlotLabels>& slots() const { return slots_; }
  std::size_t arity() const { return slots_.size(); }
  std::size_t size() const { return probs_.size(); }
  std::uint64_t shots() const { return shots_; }
  bool empirical() const { return shots_ > 0; }

  /// Entry clamped to [0, 1].
  double operator[](std::size_t index) const {
    return std::clamp(probs_.at(index), 0.0, 1.0);
  }
  double at(const Outcome& outcome) const { return (*this)[index_of(outcome)]; }
  const std::vector<double>& raw() const { return probs_; }

  double total() const {
    double sum = 0.0;
    for (double p : probs_) sum += p;
    return sum;
  }

  Outcome outcome_at(std::size_t index) const {
    Outcome out(slots_.size());
    for (std::size_t s = slots_.size(); s-- > 0;) {
      const std::size_t radix = slots_[s].size();
      out[s] = slots_[s][index % radix];
      index /= radix;
    }
    return out;
  }

  std::size_t index_of(std::span<const int> outcome) const {
    return index_in(slots_, outcome);
  }

  bool operator==(const OutcomeTable&) const = default;

 private:
  std::vector<SlotLabels> slots_;
  std::vector<double> probs_;
  std::uint64_t shots_ = 0;
};

/// Binomial standard error sqrt(p (1 - p) / shots); zero for exact tables.
inline double standard_error(double p, std::uint64_t shots) {
  if (shots == 0) return 0.0;
  const double q = std::clamp(p, 0.0, 1.0);
  return std::sqrt(q * (1.0 - q) / static_cast<double>(shots));
}

/// Sums out every slot not listed in `keep`. Kept slots retain their order.
inline OutcomeTable marginal_distribution(const OutcomeTable& table,
                                          std::span<const std::size_t> keep) {
  if (keep.empty()) throw std::invalid_argument("marginal: empty keep set");
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("marginal: duplicate slot in keep set");
  }
  if (sorted.back() >= table.arity()) {
    throw std::invalid_argument("marginal: slot index out of range");
  }
  std::vector<SlotLabels> slots;
  for (auto s : sorted) slots.push_back(table.slots()[s]);

  std::vector<double> probs(OutcomeTable::entry_count(slots), 0.0);
  Outcome reduced(sorted.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    const Outcome full = table.outcome_at(k);
    for (std::size_t i = 0; i < sorted.size(); ++i) reduced[i] = full[sorted[i]];
    probs[OutcomeTable::index_in(slots, reduced)] += table.raw()[k];
  }
  for (auto& p : probs) p = std::clamp(p, 0.0, 1.0 + kEntryRangeTol);
  return OutcomeTable(std::move(slots), std::move(probs), table.shots());
}

inline OutcomeTable marginal_distribution(const OutcomeTable& table,
                                          std::initializer_list<std::size_t> keep) {
  return marginal_distribution(table, std::span(keep.begin(), keep.size()));
}

/// Draws multinomial counts over `weights` (clamped at zero, need not be
/// normalized) by sequential conditional binomials.
inline std::vector<std::uint64_t> multinomial_counts(
    std::span<const double> weights, std::uint64_t shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> counts(weights.size(), 0);
  double remaining_mass = 0.0;
  for (double w : weights) remaining_mass += std::max(w, 0.0);
  std::uint64_t remaining = shots;
  for (std::size_t i = 0; i < weights.size() && remaining > 0; ++i) {
    const double w = std::max(weights[i], 0.0);
    if (i + 1 == weights.size() || w >= remaining_mass) {
      counts[i] = remaining;
      remaining = 0;
      break;
    }
    const double p = remaining_mass > 0.0 ? w / remaining_mass : 0.0;
    std::binomial_distribution<std::uint64_t> draw(remaining, std::clamp(p, 0.0, 1.0));
    counts[i] = draw(rng);
    remaining -= counts[i];
    remaining_mass -= w;
  }
  return counts;
}

/// Finite-statistics emulation: entries become counts / shots.
inline OutcomeTable sample_counts(const OutcomeTable& table, std::uint64_t shots,
                                  std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("sample_counts: shots must be >= 1");
  std::vector<double> weights(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) weights[k] = table[k];
  const auto counts = multinomial_counts(weights, shots, seed);
  std::vector<double> probs(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    probs[k] = static_cast<double>(counts[k]) / static_cast<double>(shots);
  }
  return OutcomeTable(table.slots(), std::move(probs), shots);
}

/// SplitMix64 mixing of a base seed with a stream tag; used to give every
/// simulated experiment its own reproducible random stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace lgcert

#endif  // LGCERT_OUTCOME_TABLE_HPP_
