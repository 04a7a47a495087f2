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

#ifndef LGCERT_PROTOCOLS_HPP_
#define LGCERT_PROTOCOLS_HPP_

// Simulated measurement protocols: single-time, sequential projective,
// ideal negative (detector coupled to one outcome), and the modified
// variants with a diagonalizing operation (dephasing or an ancilla performing
// a blind measurement) acting just before selected measurement times.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lgcert/outcome_table.hpp"
#include "lgcert/qcore.hpp"

namespace lgcert {

/// Strictly increasing, positive measurement times.
class Schedule {
 public:
  Schedule(std::initializer_list<double> times)
      : Schedule(std::vector<double>(times)) {}
  explicit Schedule(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty()) throw InvariantError("schedule: no measurement times");
    for (std::size_t k = 0; k < times_.size(); ++k) {
      if (!std::isfinite(times_[k]) || !(times_[k] > 0.0)) {
        throw InvariantError("schedule: time " + std::to_string(k) +
                             " must be finite and > 0");
      }
      if (k > 0 && !(times_[k] > times_[k - 1])) {
        throw InvariantError("schedule: times must be strictly increasing (t[" +
                             std::to_string(k - 1) + "] >= t[" +
                             std::to_string(k) + "])");
      }
    }
  }

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  double operator[](std::size_t k) const { return times_.at(k); }

 private:
  std::vector<double> times_;
};

enum class ProtocolMode {
  projective,
  inrm,
  projective_dephased,
  inrm_dephased,
  ancilla_blind,
};

inline const char* to_string(ProtocolMode mode) {
  switch (mode) {
    case ProtocolMode::projective: return "projective";
    case ProtocolMode::inrm: return "inrm";
    case ProtocolMode::projective_dephased: return "projective_dephased";
    case ProtocolMode::inrm_dephased: return "inrm_dephased";
    case ProtocolMode::ancilla_blind: return "ancilla_blind";
  }
  return "?";
}

inline ProtocolMode parse_protocol_mode(const std::string& name) {
  for (auto m : {ProtocolMode::projective, ProtocolMode::inrm,
                 ProtocolMode::projective_dephased, ProtocolMode::inrm_dephased,
                 ProtocolMode::ancilla_blind}) {
    if (name == to_string(m)) return m;
  }
  throw InvariantError("protocol.mode: unknown mode '" + name + "'");
}

/// How an experiment is run. `dephase_times` are schedule indices at which
/// the diagonalizing mechanism acts immediately before the measurement time;
/// for ancilla_blind they are the indices carrying an ancilla. A modified
/// mode with no indices given acts at index 0.
struct ProtocolConfig {
  ProtocolMode mode = ProtocolMode::projective;
  std::set<std::size_t> dephase_times;
  ClumsinessModel clumsiness;
  std::uint64_t shots = 0;  // 0 = exact probabilities
  std::uint64_t seed = 0;

  bool modified() const {
    return mode == ProtocolMode::projective_dephased ||
           mode == ProtocolMode::inrm_dephased ||
           mode == ProtocolMode::ancilla_blind;
  }
  bool negative_result() const {
    return mode == ProtocolMode::inrm || mode == ProtocolMode::inrm_dephased;
  }

  std::set<std::size_t> mechanism_indices() const {
    if (!modified()) return {};
    if (dephase_times.empty()) return {0};
    return dephase_times;
  }

  void validate(const Schedule& schedule) const {
    clumsiness.validate();
    if (!modified() && !dephase_times.empty()) {
      throw InvariantError(std::string("protocol.dephase_times: mode ") +
                           to_string(mode) + " has no diagonalizing mechanism");
    }
    for (auto k : dephase_times) {
      if (k >= schedule.size()) {
        throw InvariantError("protocol.dephase_times: index " +
                             std::to_string(k) + " outside the schedule");
      }
    }
  }
};

/// Which indices of a schedule receive the diagonalizing mechanism in one
/// experiment.
enum class MechanismScope {
  /// Only at times that are measured in this experiment.
  measured_only,
  /// At every configured index up to the last measured time, blind where
  /// the time is not measured (companion experiments for NSIT checks).
  all_preceding,
};

namespace detail {

enum class Readout { none, record, negative };
enum class Mechanism { none, dephase, ancilla };

struct Step {
  double time = 0.0;
  Mechanism mechanism = Mechanism::none;
  bool clumsy = false;
  Readout readout = Readout::none;
  int coupling = 0;  // negative readout: the outcome the detector couples to
  std::size_t observable = 0;  // index into the observables of the run
};

// Joint system (x) ancilla state after a controlled shift |n> -> |n + k> of
// an N-level ancilla prepared in |0>, controlled by projector k. Returns the
// system block conditioned on each ancilla reading; summing the blocks is
// the partial trace over the ancilla.
inline std::vector<ComplexMatrix> ancilla_blocks(
    const ComplexMatrix& sigma, const std::vector<ComplexMatrix>& projectors) {
  const auto d = sigma.rows();
  const auto n = static_cast<Eigen::Index>(projectors.size());
  ComplexMatrix shift = ComplexMatrix::Zero(d * n, d * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index a = 0; a < n; ++a) {
      const Eigen::Index b = (a + k) % n;
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          shift(i * n + b, j * n + a) += projectors[k](i, j);
        }
      }
    }
  }
  ComplexMatrix joint = ComplexMatrix::Zero(d * n, d * n);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) joint(i * n, j * n) = sigma(i, j);
  }
  joint = shift * joint * shift.adjoint();

  std::vector<ComplexMatrix> blocks(projectors.size(), ComplexMatrix(d, d));
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) blocks[a](i, j) = joint(i * n + a, j * n + a);
    }
  }
  return blocks;
}

inline ComplexMatrix sum_blocks(const std::vector<ComplexMatrix>& blocks) {
  ComplexMatrix out = ComplexMatrix::Zero(blocks.front().rows(), blocks.front().cols());
  for (const auto& b : blocks) out += b;
  return out;
}

struct BranchResult {
  std::vector<SlotLabels> slots;
  std::vector<double> probabilities;
  double discarded = 0.0;  // weight removed by triggered negative detectors
};

// Unnormalized branch propagation. Each branch carries the (sub-normalized)
// state conditioned on its recorded outcomes; its trace is the branch weight.
// Zero-weight branches are carried along and report probability zero.
inline BranchResult propagate(const DensityOperator& rho, const Hamiltonian& h,
                              std::span<const ManyValuedObservable> observables,
                              std::span<const Step> steps,
                              const ClumsinessModel& clumsiness) {
  require_same_dim(rho.dim(), h.dim(), "protocol (state vs hamiltonian)");
  for (const auto& q : observables) {
    require_same_dim(rho.dim(), q.dim(), "protocol (state vs observable)");
  }

  BranchResult result;
  std::vector<ComplexMatrix> branches{rho.matrix()};
  double now = 0.0;
  for (const Step& step : steps) {
    const ManyValuedObservable& q = observables[step.observable];
    const auto& projectors = q.projectors();
    const auto& labels = q.labels();
    auto projector_for = [&](int label) -> const ComplexMatrix& {
      const auto it = std::find(labels.begin(), labels.end(), label);
      if (it == labels.end()) {
        throw std::invalid_argument("negative measurement: coupling label " +
                                    format_label(label) + " not an outcome");
      }
      return projectors[static_cast<std::size_t>(it - labels.begin())];
    };

    const ComplexMatrix u = h.propagator(step.time - now);
    now = step.time;
    for (auto& b : branches) b = conjugate(u, b);

    if (step.mechanism == Mechanism::dephase) {
      for (auto& b : branches) b = dephase_raw(b, projectors);
    }
    if (step.clumsy) {
      for (auto& b : branches) b = clumsiness_raw(b, clumsiness);
    }

    switch (step.readout) {
      case Readout::none:
        if (step.mechanism == Mechanism::ancilla) {
          for (auto& b : branches) b = sum_blocks(ancilla_blocks(b, projectors));
        }
        break;
      case Readout::record: {
        std::vector<ComplexMatrix> next;
        next.reserve(branches.size() * projectors.size());
        for (const auto& b : branches) {
          if (step.mechanism == Mechanism::ancilla) {
            for (auto& block : ancilla_blocks(b, projectors)) next.push_back(std::move(block));
          } else {
            for (const auto& p : projectors) next.push_back(p * b * p);
          }
        }
        branches = std::move(next);
        result.slots.push_back(labels);
        break;
      }
      case Readout::negative: {
        // The detector triggers on `coupling`; only the null result survives.
        // Every other projector is grouped into the complement.
        const ComplexMatrix& trigger = projector_for(step.coupling);
        const auto d = trigger.rows();
        const ComplexMatrix complement = ComplexMatrix::Identity(d, d) - trigger;
        for (auto& b : branches) {
          result.discarded += (trigger * b * trigger).trace().real();
          b = complement * b * complement;
        }
        break;
      }
    }
  }

  result.probabilities.reserve(branches.size());
  for (const auto& b : branches) {
    result.probabilities.push_back(std::clamp(b.trace().real(), 0.0, 1.0));
  }
  if (result.slots.empty()) {
    result.slots.push_back({0});  // nothing recorded: a single sure outcome
  }
  return result;
}

inline BranchResult propagate(const DensityOperator& rho, const Hamiltonian& h,
                              const ManyValuedObservable& q,
                              std::span<const Step> steps,
                              const ClumsinessModel& clumsiness) {
  return propagate(rho, h, std::span(&q, 1), steps, clumsiness);
}

inline std::vector<std::size_t> all_indices(const Schedule& schedule) {
  std::vector<std::size_t> out(schedule.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = k;
  return out;
}

inline std::vector<std::size_t> checked_measured(const Schedule& schedule,
                                                 std::span<const std::size_t> measured) {
  std::vector<std::size_t> sorted(measured.begin(), measured.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) throw std::invalid_argument("experiment: nothing measured");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("experiment: time measured twice");
  }
  if (sorted.back() >= schedule.size()) {
    throw std::invalid_argument("experiment: measured index outside the schedule");
  }
  return sorted;
}

// Steps for one experiment over `measured` schedule indices. Negative-result
// detectors sit at every measured time but the last, with the given
// couplings; the final measured time is always read projectively.
inline std::vector<Step> plan_steps(const Schedule& schedule,
                                    const ProtocolConfig& config,
                                    std::span<const std::size_t> measured,
                                    MechanismScope scope,
                                    std::span<const int> couplings) {
  const std::set<std::size_t> mechanism = config.mechanism_indices();
  const std::size_t last = measured.back();
  const Mechanism kind = config.mode == ProtocolMode::ancilla_blind
                             ? Mechanism::ancilla
                             : Mechanism::dephase;
  const bool clumsy_run = measured.size() >= 2 &&
                          config.clumsiness.kind != ClumsinessModel::Kind::none;

  std::vector<Step> steps;
  std::size_t detector = 0;
  for (std::size_t k = 0; k <= last; ++k) {
    const bool is_measured =
        std::find(measured.begin(), measured.end(), k) != measured.end();
    const bool has_mechanism =
        mechanism.count(k) > 0 &&
        (is_measured || scope == MechanismScope::all_preceding);
    if (!is_measured && !has_mechanism) continue;

    Step step;
    step.time = schedule[k];
    step.mechanism = has_mechanism ? kind : Mechanism::none;
    step.clumsy = clumsy_run && k == measured.front();
    if (is_measured) {
      if (config.negative_result() && k != last) {
        step.readout = Readout::negative;
        step.coupling = couplings[detector++];
      } else {
        step.readout = Readout::record;
      }
    }
    steps.push_back(step);
  }
  return steps;
}

}  // namespace detail

/// p1(s) = Tr(P_s(t) rho).
inline OutcomeTable single_time_distribution(const DensityOperator& rho,
                                             const Hamiltonian& h,
                                             const ManyValuedObservable& q,
                                             double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("single_time_distribution: non-finite time");
  const detail::Step step{t, detail::Mechanism::none, false, detail::Readout::record, 0};
  auto r = detail::propagate(rho, h, q, std::span(&step, 1), ClumsinessModel::none());
  return OutcomeTable(std::move(r.slots), std::move(r.probabilities));
}

inline OutcomeTable single_time_distribution(const DensityOperator& rho,
                                             const Hamiltonian& h,
                                             const DichotomicObservable& q,
                                             double t) {
  return single_time_distribution(rho, h, q.projective(), t);
}

/// Probability of an outcome string for sequential measurements at every
/// schedule time. Supports the projective, projective_dephased and
/// ancilla_blind modes; negative-result modes go through inrm_distribution.
/// With config.shots > 0 the exact table is replaced by a multinomial sample.
inline OutcomeTable sequential_distribution(const DensityOperator& rho,
                                            const Hamiltonian& h,
                                            const ManyValuedObservable& q,
                                            const Schedule& schedule,
                                            const ProtocolConfig& config) {
  config.validate(schedule);
  if (config.negative_result()) {
    throw std::invalid_argument(
        "sequential_distribution: negative-result modes are assembled from "
        "inrm_distribution partials");
  }
  const auto measured = detail::all_indices(schedule);
  const auto steps = detail::plan_steps(schedule, config, measured,
                                        MechanismScope::measured_only, {});
  auto r = detail::propagate(rho, h, q, steps, config.clumsiness);
  OutcomeTable exact(std::move(r.slots), std::move(r.probabilities));
  if (config.shots == 0) return exact;
  return sample_counts(exact, config.shots, config.seed);
}

inline OutcomeTable sequential_distribution(const DensityOperator& rho,
                                            const Hamiltonian& h,
                                            const DichotomicObservable& q,
                                            const Schedule& schedule,
                                            const ProtocolConfig& config) {
  return sequential_distribution(rho, h, q.projective(), schedule, config);
}

/// Surviving branch of one negative-result configuration: detectors at every
/// schedule time but the last, each coupled to `couplings[k]`; the run is
/// kept only when no detector triggers, i.e. the system was found in
/// -couplings[k] each time.
struct InrmPartial {
  std::vector<int> couplings;
  std::vector<SlotLabels> slots;           // full slot layout of the assembled table
  std::vector<double> final_probabilities;  // p(-c_1, ..., -c_{m-1}, s_m) per s_m
  double discarded = 0.0;
  std::uint64_t shots = 0;

  Outcome prefix() const {
    Outcome out;
    for (int c : couplings) out.push_back(-c);
    return out;
  }
  double surviving() const {
    double sum = 0.0;
    for (double p : final_probabilities) sum += p;
    return sum;
  }
};

namespace detail {

inline void require_sign_labels(const ManyValuedObservable& q) {
  if (q.labels() != SlotLabels{+1, -1}) {
    throw std::invalid_argument(
        "negative-result protocols need a dichotomic observable labelled +1/-1");
  }
}

inline std::uint64_t coupling_tag(std::span<const int> couplings) {
  std::uint64_t tag = 0;
  for (int c : couplings) tag = 2 * tag + (c > 0 ? 1 : 0);
  return 0x1a2b0000ULL + tag;
}

// One detector configuration of a negative-result experiment over the
// (sorted) measured indices. With shots > 0 the surviving entries and the
// discarded fraction are drawn jointly from one multinomial.
inline InrmPartial negative_result_partial(const DensityOperator& rho,
                                           const Hamiltonian& h,
                                           const ManyValuedObservable& q,
                                           const Schedule& schedule,
                                           const ProtocolConfig& config,
                                           std::span<const std::size_t> measured,
                                           MechanismScope scope,
                                           std::span<const int> couplings,
                                           std::uint64_t seed) {
  const auto steps = plan_steps(schedule, config, measured, scope, couplings);
  auto r = propagate(rho, h, q, steps, config.clumsiness);

  InrmPartial partial;
  partial.couplings.assign(couplings.begin(), couplings.end());
  partial.slots = dichotomic_slots(measured.size());
  partial.final_probabilities = std::move(r.probabilities);
  partial.discarded = std::clamp(r.discarded, 0.0, 1.0);
  if (config.shots == 0) return partial;

  std::vector<double> weights = partial.final_probabilities;
  weights.push_back(partial.discarded);
  const auto counts = multinomial_counts(weights, config.shots,
                                         derive_seed(seed, coupling_tag(couplings)));
  const double n = static_cast<double>(config.shots);
  for (std::size_t i = 0; i < partial.final_probabilities.size(); ++i) {
    partial.final_probabilities[i] = static_cast<double>(counts[i]) / n;
  }
  partial.discarded = static_cast<double>(counts.back()) / n;
  partial.shots = config.shots;
  return partial;
}

}  // namespace detail

inline InrmPartial inrm_distribution(const DensityOperator& rho,
                                     const Hamiltonian& h,
                                     const DichotomicObservable& q,
                                     const Schedule& schedule,
                                     std::span<const int> couplings,
                                     const ProtocolConfig& config) {
  config.validate(schedule);
  if (couplings.size() + 1 != schedule.size()) {
    throw std::invalid_argument(
        "inrm_distribution: need one detector coupling per time but the last (" +
        std::to_string(schedule.size() - 1) + "), got " +
        std::to_string(couplings.size()));
  }
  for (int c : couplings) {
    if (c != 1 && c != -1) {
      throw std::invalid_argument("inrm_distribution: couplings must be +1 or -1");
    }
  }
  if (config.mode == ProtocolMode::ancilla_blind) {
    throw std::invalid_argument("inrm_distribution: ancilla mode has no detectors");
  }
  ProtocolConfig run = config;
  if (!run.negative_result()) {
    run.mode = run.modified() ? ProtocolMode::inrm_dephased : ProtocolMode::inrm;
  }
  const auto measured = detail::all_indices(schedule);
  return detail::negative_result_partial(rho, h, q.projective(), schedule, run,
                                         measured, MechanismScope::measured_only,
                                         couplings, config.seed);
}

/// Merges negative-result partials whose prefixes cover every outcome of the
/// detector times exactly once.
inline OutcomeTable assemble_inrm(std::span<const InrmPartial> partials) {
  if (partials.empty()) throw std::invalid_argument("assemble_inrm: no partials");
  const auto& slots = partials.front().slots;
  const std::uint64_t shots = partials.front().shots;
  std::map<Outcome, const InrmPartial*> by_prefix;
  for (const auto& p : partials) {
    if (p.slots != slots || p.shots != shots) {
      throw std::invalid_argument("assemble_inrm: partials disagree on layout or shots");
    }
    if (!by_prefix.emplace(p.prefix(), &p).second) {
      throw std::invalid_argument("assemble_inrm: duplicated configuration (" +
                                  format_outcome(p.couplings) + ")");
    }
  }
  const std::size_t detectors = slots.size() - 1;
  const std::size_t expected = std::size_t{1} << detectors;
  if (by_prefix.size() != expected) {
    throw std::invalid_argument("assemble_inrm: " + std::to_string(expected) +
                                " configurations required, got " +
                                std::to_string(by_prefix.size()));
  }
  std::vector<double> probs(OutcomeTable::entry_count(slots), 0.0);
  for (const auto& [prefix, partial] : by_prefix) {
    Outcome outcome = prefix;
    outcome.push_back(0);
    const auto& final_labels = slots.back();
    for (std::size_t i = 0; i < final_labels.size(); ++i) {
      outcome.back() = final_labels[i];
      probs[OutcomeTable::index_in(slots, outcome)] = partial->final_probabilities[i];
    }
  }
  return OutcomeTable(slots, std::move(probs), shots);
}

/// Every coupling configuration for a schedule, in lexicographic order with
/// +1 before -1.
inline std::vector<std::vector<int>> all_couplings(std::size_t detectors) {
  std::vector<std::vector<int>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << detectors); ++mask) {
    std::vector<int> c(detectors);
    for (std::size_t k = 0; k < detectors; ++k) {
      c[k] = (mask >> (detectors - 1 - k)) & 1U ? -1 : +1;
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// Reduced system state after an ancilla coupled by a CNOT at t1 is traced
/// out: P+ rho(t1) P+ + P- rho(t1) P-.
inline DensityOperator ancilla_blind_reduced_state(const DensityOperator& rho,
                                                   const Hamiltonian& h,
                                                   const DichotomicObservable& q,
                                                   double t1) {
  detail::require_same_dim(rho.dim(), q.dim(), "ancilla_blind_reduced_state");
  const DensityOperator at_t1 = evolve(rho, h, t1);
  const ComplexMatrix reduced = detail::sum_blocks(
      detail::ancilla_blocks(at_t1.matrix(), q.projective().projectors()));
  return DensityOperator(detail::hermitian_part(reduced));
}

inline DensityOperator ancilla_blind_reduced_state(const DensityOperator& rho,
                                                   const Hamiltonian& h,
                                                   const ManyValuedObservable& q,
                                                   double t1) {
  if (q.outcomes() != 2) {
    throw std::invalid_argument(
        "ancilla_blind_reduced_state: observable must be dichotomic");
  }
  detail::require_same_dim(rho.dim(), q.dim(), "ancilla_blind_reduced_state");
  const DensityOperator at_t1 = evolve(rho, h, t1);
  return DensityOperator(detail::hermitian_part(
      detail::sum_blocks(detail::ancilla_blocks(at_t1.matrix(), q.projectors()))));
}

/// One experiment recording the schedule times in `measured`, under any
/// protocol mode. Negative-result modes are run once per detector
/// configuration and assembled. `stream` separates the random streams of
/// distinct experiments sharing a base seed.
inline OutcomeTable run_experiment(const DensityOperator& rho,
                                   const Hamiltonian& h,
                                   const ManyValuedObservable& q,
                                   const Schedule& schedule,
                                   const ProtocolConfig& config,
                                   std::span<const std::size_t> measured,
                                   MechanismScope scope,
                                   std::uint64_t stream = 0) {
  config.validate(schedule);
  const auto sorted = detail::checked_measured(schedule, measured);
  const std::uint64_t seed = derive_seed(config.seed, stream);

  if (config.negative_result() && sorted.size() >= 2) {
    detail::require_sign_labels(q);
    std::vector<InrmPartial> partials;
    for (const auto& couplings : all_couplings(sorted.size() - 1)) {
      partials.push_back(detail::negative_result_partial(
          rho, h, q, schedule, config, sorted, scope, couplings, seed));
    }
    return assemble_inrm(partials);
  }

  const auto steps = detail::plan_steps(schedule, config, sorted, scope, {});
  auto r = detail::propagate(rho, h, q, steps, config.clumsiness);
  OutcomeTable exact(std::move(r.slots), std::move(r.probabilities));
  if (config.shots == 0) return exact;
  return sample_counts(exact, config.shots, seed);
}

inline OutcomeTable run_experiment(const DensityOperator& rho,
                                   const Hamiltonian& h,
                                   const DichotomicObservable& q,
                                   const Schedule& schedule,
                                   const ProtocolConfig& config,
                                   std::span<const std::size_t> measured,
                                   MechanismScope scope,
                                   std::uint64_t stream = 0) {
  return run_experiment(rho, h, q.projective(), schedule, config, measured, scope,
                        stream);
}

/// Plain projective sequence measuring a different observable at each
/// schedule time, e.g. a coarse-grained dichotomic variable at t1 followed by
/// the full N-outcome measurement at t2.
inline OutcomeTable mixed_sequential_distribution(
    const DensityOperator& rho, const Hamiltonian& h,
    std::span<const ManyValuedObservable> per_time, const Schedule& schedule) {
  if (per_time.size() != schedule.size()) {
    throw std::invalid_argument("mixed_sequential_distribution: one observable per time required");
  }
  std::vector<detail::Step> steps;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    detail::Step step;
    step.time = schedule[k];
    step.readout = detail::Readout::record;
    step.observable = k;
    steps.push_back(step);
  }
  auto r = detail::propagate(rho, h, per_time, steps, ClumsinessModel::none());
  return OutcomeTable(std::move(r.slots), std::move(r.probabilities));
}

/// Dichotomic variable Q = P(plus) - P(rest) grouping the outcomes of a
/// many-valued observable.
inline DichotomicObservable coarse_grain(const ManyValuedObservable& q,
                                         std::span<const int> plus_labels) {
  const auto d = q.dim();
  ComplexMatrix m = -ComplexMatrix::Identity(d, d);
  for (std::size_t i = 0; i < q.outcomes(); ++i) {
    if (std::find(plus_labels.begin(), plus_labels.end(), q.labels()[i]) != plus_labels.end()) {
      m += 2.0 * q.projectors()[i];
    }
  }
  return DichotomicObservable(detail::hermitian_part(m));
}

struct NsitPair {
  OutcomeTable p12;
  OutcomeTable p2_alone;
};

/// Two-time table and its companion single-time-at-t2 table, both under the
/// same configuration: whatever diagonalizing mechanism acts before t1 in the
/// two-time run stays in place (blind) in the single-time run.
inline NsitPair run_nsit_pair(const DensityOperator& rho, const Hamiltonian& h,
                              const ManyValuedObservable& q, double t1, double t2,
                              const ProtocolConfig& config) {
  if (!(t1 < t2)) throw std::invalid_argument("run_nsit_pair: requires t1 < t2");
  const Schedule schedule{t1, t2};
  const std::vector<std::size_t> both{0, 1};
  const std::vector<std::size_t> second{1};
  return {run_experiment(rho, h, q, schedule, config, both,
                         MechanismScope::all_preceding, 1),
          run_experiment(rho, h, q, schedule, config, second,
                         MechanismScope::all_preceding, 2)};
}

inline NsitPair run_nsit_pair(const DensityOperator& rho, const Hamiltonian& h,
                              const DichotomicObservable& q, double t1, double t2,
                              const ProtocolConfig& config) {
  return run_nsit_pair(rho, h, q.projective(), t1, t2, config);
}

}  // namespace lgcert

#endif  // LGCERT_PROTOCOLS_HPP_
