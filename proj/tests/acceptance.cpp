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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lgcert/cli/certification.hpp"
#include "lgcert/feasibility.hpp"
#include "lgcert/interference.hpp"
#include "lgcert/macrocert.hpp"
#include "lgcert/protocols.hpp"
#include "lgcert/qcore.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lgcert;

namespace {

// Tolerances, pinned.
constexpr double kExactTol = 1e-10;
constexpr double kIdentityTol = 1e-12;
constexpr double kRuntimeLimitSeconds = 1.0;
constexpr double kBoundarySlack = 2e-3;
constexpr double kCoverageFloor = 0.99;
constexpr double kSigmas = 3.0;
constexpr std::uint64_t kShots = 1000000;

constexpr double kPi = std::numbers::pi;
const auto kZ = DichotomicObservable::sigma_z();

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

ProtocolConfig with_mode(ProtocolMode mode, std::set<std::size_t> indices = {}) {
  ProtocolConfig c;
  c.mode = mode;
  c.dephase_times = std::move(indices);
  return c;
}

/// Moments from one independent experiment per moment.
MomentSet separate_experiments(const DensityOperator& rho, const Hamiltonian& h,
                               const Schedule& s, const std::vector<TimeSet>& moments,
                               std::vector<OutcomeTable>* tables = nullptr) {
  std::vector<LabeledTable> labeled;
  for (TimeSet m : moments) {
    const auto times = time_indices(m);
    labeled.push_back({times, run_experiment(rho, h, kZ, s, {}, times,
                                             MechanismScope::measured_only)});
    if (tables) tables->push_back(labeled.back().table);
  }
  return moments_from_tables(labeled, s.size());
}

/// Highest-order moment of a sequential table (C12 or D123).
double moment_of(const OutcomeTable& t) {
  std::vector<std::size_t> times;
  for (std::size_t k = 0; k < t.arity(); ++k) times.push_back(k);
  const std::vector<LabeledTable> one{{times, t}};
  return moments_from_tables(one, t.arity()).value((TimeSet{1} << t.arity()) - 1);
}

Verdict criterion_1() {
  Verdict o;
  const auto start = std::chrono::steady_clock::now();
  const Schedule s{kPi / 3, 2 * kPi / 3, kPi};
  const auto m = separate_experiments(DensityOperator::maximally_mixed(2),
                                      Hamiltonian::precession(1.0), s,
                                      {time_set({0, 1}), time_set({1, 2}), time_set({0, 2})});
  const auto r = check_lg3(m);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  int at_target = 0, violated = 0;
  for (const auto& e : r.entries) {
    if (std::abs(e.margin + 0.5) <= kExactTol) ++at_target;
    if (!e.satisfied) ++violated;
  }
  o.detail << "LG3-2 margin " << fmt(r.at("LG3-2").margin) << ", violated " << violated
           << " of 4, runtime " << fmt(seconds) << " s";
  o.require(at_target == 1 && violated == 1, "exactly one margin at -0.5");
  o.require(seconds < kRuntimeLimitSeconds, "runtime < 1 s");
  return o;
}

Verdict criterion_2() {
  Verdict o;
  const auto rho = testutil::ground();
  const auto h = Hamiltonian::precession(1.0);
  const Schedule s{2 * kPi / 3, 4 * kPi / 3};
  const auto q = quasi_probability(rho, h, kZ, s);
  const auto m = separate_experiments(rho, h, s, {time_set({0}), time_set({1}), time_set({0, 1})});
  const double margin = check_lg2(m).at("LG2-12-1").margin;
  o.detail << "q(+,+) " << fmt(q.at({+1, +1})) << ", LG2-12-1 margin " << fmt(margin);
  o.require(std::abs(q.at({+1, +1}) + 0.125) <= kExactTol, "q(+,+) = -0.125");
  o.require(std::abs(margin + 0.5) <= kExactTol, "margin = -0.5");
  return o;
}

Verdict criterion_3() {
  Verdict o;
  const auto rho = testutil::ground();
  const auto h = Hamiltonian::precession(1.0);
  auto witness = [&](const ProtocolConfig& c, double t1) {
    const auto pair = run_nsit_pair(rho, h, kZ, t1, kPi, c);
    return check_nsit(pair.p12, pair.p2_alone, {0});
  };
  const auto plain = witness({}, kPi / 2);
  const auto dephased = witness(with_mode(ProtocolMode::projective_dephased, {0}), kPi / 2);
  const auto blind = witness(with_mode(ProtocolMode::ancilla_blind, {0}), kPi / 2);
  auto clumsy_config = with_mode(ProtocolMode::projective_dephased, {0});
  clumsy_config.clumsiness = ClumsinessModel::depolarizing(0.05);
  const auto clumsy = witness(clumsy_config, kPi / 2);
  const double clumsy_oracle =
      oracle::clumsy_dephased_witness({0, 0, 1}, 1.0, kPi / 2, kPi, 0.05, +1);
  const auto off_node = witness(clumsy_config, kPi / 4);

  o.detail << "W(+) projective " << fmt(plain.defect({+1})) << ", dephased |W| "
           << fmt(dephased.max_abs()) << ", ancilla_blind |W| " << fmt(blind.max_abs())
           << ", eps=0.05 dephased |W| " << fmt(clumsy.max_abs()) << " (oracle "
           << fmt(clumsy_oracle) << ")";
  o.require(std::abs(plain.defect({+1}) + 0.5) <= kExactTol, "W(+) = -0.5");
  o.require(dephased.max_abs() <= kIdentityTol && blind.max_abs() <= kIdentityTol,
            "modified protocols |W| <= 1e-12");
  o.require(std::abs(clumsy.defect({+1}) - clumsy_oracle) <= kIdentityTol,
            "clumsy W matches oracle");
  // "Non-zero" is judged at the same 1e-12 resolution that defines zero for
  // the modified protocols. The dephased state at w t1 = pi/2 is I/2, which
  // a unital channel leaves unchanged, so |W| is rounding noise here.
  o.require(clumsy.max_abs() > kIdentityTol,
            "|W| > 0 with eps = 0.05; oracle gives 0 because <Q1> = cos(pi/2) = 0 "
            "(at w t1 = pi/4 the same channel gives W(+) = " +
                fmt(off_node.defect({+1})) + ")");
  return o;
}

Verdict criterion_4() {
  Verdict o;
  std::mt19937_64 rng(404);
  double worst_c = 0.0, worst_d = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto sc = testutil::random_qubit(rng, 3);
    const auto rho = testutil::from_bloch(sc.bloch);
    const auto h = Hamiltonian::precession(sc.omega);
    const Schedule s(sc.times);
    const std::vector<std::size_t> pair{0, 1}, all{0, 1, 2};
    auto run = [&](const ProtocolConfig& c, const std::vector<std::size_t>& times) {
      return moment_of(run_experiment(rho, h, kZ, s, c, times, MechanismScope::measured_only));
    };
    worst_c = std::max(worst_c, std::abs(run({}, pair) -
                                         run(with_mode(ProtocolMode::projective_dephased, {0}),
                                             pair)));
    worst_d = std::max(worst_d, std::abs(run({}, all) -
                                         run(with_mode(ProtocolMode::projective_dephased, {0, 1}),
                                             all)));
  }
  o.detail << "max |dC12| " << fmt(worst_c) << ", max |dD123| " << fmt(worst_d)
           << " over 200 scenarios";
  o.require(worst_c <= kIdentityTol && worst_d <= kIdentityTol, "invariance to 1e-12");
  return o;
}

Verdict criterion_5() {
  Verdict o;
  std::mt19937_64 rng(505);
  double worst = 0.0, worst_accounting = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = trial % 2 == 0 ? 2 : 3;
    const auto rho = testutil::random_state(rng, d);
    const auto h = testutil::random_hamiltonian(rng, d);
    const auto q = testutil::random_dichotomic(rng, d);
    const auto sc = testutil::random_qubit(rng, 3);
    const Schedule s(sc.times);
    std::vector<InrmPartial> parts;
    for (const auto& c : all_couplings(2)) {
      parts.push_back(inrm_distribution(rho, h, q, s, c, with_mode(ProtocolMode::inrm)));
      worst_accounting =
          std::max(worst_accounting, std::abs(parts.back().surviving() + parts.back().discarded - 1));
    }
    const auto assembled = assemble_inrm(parts);
    const auto seq = sequential_distribution(rho, h, q, s, {});
    worst = std::max(worst, testutil::max_diff(assembled.raw(), seq.raw()));
  }
  o.detail << "max entry difference " << fmt(worst) << ", max accounting defect "
           << fmt(worst_accounting) << " over 200 scenarios";
  o.require(worst <= kIdentityTol, "entrywise to 1e-12");
  o.require(worst_accounting <= kExactTol, "accounting to 1e-10");
  return o;
}

Verdict criterion_6() {
  Verdict o;
  const Schedule s{2 * kPi / 3, 4 * kPi / 3, 2 * kPi};
  std::vector<TimeSet> all;
  for (TimeSet m = 1; m < 8; ++m) all.push_back(m);
  std::vector<OutcomeTable> tables;
  const auto m = separate_experiments(DensityOperator::maximally_mixed(2),
                                      Hamiltonian::precession(1.0), s, all, &tables);
  const double ppp = candidate_probability(m).values[0];
  double lowest = 1.0;
  for (const auto& t : tables) {
    for (double p : t.raw()) lowest = std::min(lowest, p);
  }
  o.detail << "candidate p(+,+,+) " << fmt(ppp) << " from " << tables.size()
           << " experiments, lowest measured entry " << fmt(lowest);
  o.require(tables.size() == 7, "seven experiments");
  o.require(std::abs(ppp + 1.0 / 16) <= kExactTol, "p(+,+,+) = -1/16");
  o.require(lowest >= 0.0, "measured tables non-negative");
  return o;
}

Verdict criterion_7() {
  Verdict o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int lg_disagree = 0, grid_disagree = 0, compared = 0, feasible = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::array<double, 3> q{u(rng), u(rng), u(rng)};
    const std::array<double, 3> c{u(rng), u(rng), u(rng)};
    MomentSet m(3);
    for (std::size_t i = 0; i < 3; ++i) m.fix(time_set({i}), q[i]);
    m.fix(time_set({0, 1}), c[0]);
    m.fix(time_set({1, 2}), c[1]);
    m.fix(time_set({0, 2}), c[2]);
    const auto r = feasible_completion(m);
    auto report = check_lg3(m);
    report.append(check_lg2(m));
    const auto lg = oracle::lg_margins(q, c);
    if (std::abs(*std::min_element(lg.begin(), lg.end())) < kBoundarySlack) continue;
    ++compared;
    feasible += r.feasible;
    lg_disagree += r.feasible != report.all_satisfied();
    grid_disagree += r.feasible != oracle::grid_feasible(q, c);
  }
  o.detail << compared << " samples outside slack (" << feasible << " feasible): "
           << lg_disagree << " disagreements with LG conjunction, " << grid_disagree
           << " with grid oracle";
  o.require(lg_disagree == 0 && grid_disagree == 0, "zero disagreements");
  return o;
}

Verdict criterion_8() {
  Verdict o;
  std::mt19937_64 rng(808);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto sc = testutil::random_qubit(rng, 2);
    const auto r = check_appendix_identities(testutil::from_bloch(sc.bloch),
                                             Hamiltonian::precession(sc.omega), kZ, sc.times[0],
                                             sc.times[1]);
    for (const auto& e : r.entries) {
      if (e.id.rfind("A-IDENT", 0) == 0) worst = std::max(worst, -e.margin);
    }
  }
  const auto rho = testutil::ground();
  const auto h = Hamiltonian::precession(1.0);
  const auto pair = run_nsit_pair(rho, h, kZ, kPi / 2, kPi, {});
  const auto mono = check_monotonicity(pair.p12, pair.p2_alone);
  const Schedule s{kPi / 2, kPi};
  const auto lg2 =
      check_lg2(separate_experiments(rho, h, s, {time_set({0}), time_set({1}), time_set({0, 1})}));
  double lg_min = 1.0;
  for (const auto& e : lg2.entries) lg_min = std::min(lg_min, e.margin);
  const auto appendix = check_appendix_identities(rho, h, kZ, kPi / 2, kPi);
  o.detail << "max identity residual " << fmt(worst) << "; p12(+,+) "
           << fmt(pair.p12.at({+1, +1})) << " vs p2(+) " << fmt(pair.p2_alone.at({+1}))
           << ", A-MONO-(+1,+1) " << fmt(appendix.at("A-MONO-(+1,+1)").margin)
           << ", min LG2 margin " << fmt(lg_min);
  o.require(worst <= kIdentityTol, "identity to 1e-12");
  o.require(std::abs(pair.p12.at({+1, +1}) - 0.25) <= kExactTol &&
                std::abs(pair.p2_alone.at({+1})) <= kExactTol,
            "p12(+,+) = 0.25, p2(+) = 0");
  o.require(!mono.at("MONO-(+1,+1)").satisfied && !appendix.at("A-MONO-(+1,+1)").satisfied,
            "monotonicity violated");
  o.require(lg2.all_satisfied(), "two-time LG satisfied");
  return o;
}

Verdict criterion_9() {
  Verdict o;
  const auto rho = testutil::from_bloch({0.3, -0.2, 0.6});
  const auto h = Hamiltonian::precession(1.1);
  const Schedule s{0.4, 1.3, 2.1};
  const auto exact = sequential_distribution(rho, h, kZ, s, {});
  std::size_t inside = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto sampled = sample_counts(exact, kShots, seed);
    for (std::size_t k = 0; k < exact.size(); ++k) {
      const double p = exact[k];
      inside += std::abs(sampled[k] - p) <= kSigmas * std::sqrt(p * (1 - p) / kShots);
      ++total;
    }
  }
  const double coverage = static_cast<double>(inside) / static_cast<double>(total);

  cli::Scenario sc;
  sc.initial_state = testutil::ground();
  sc.hamiltonian = h;
  sc.schedule = Schedule{kPi / 2, kPi};
  sc.protocol = with_mode(ProtocolMode::projective_dephased, {0});
  sc.protocol.shots = kShots;
  sc.protocol.seed = 42;
  sc.checks = {"NSIT"};
  const auto r = cli::run_certification(sc);
  const bool non_invasive = r.witnesses.at(0).non_invasive();
  o.detail << inside << "/" << total << " entries within 3 SE (" << fmt(100 * coverage)
           << "%); empirical dephased NSIT "
           << (non_invasive ? "non-invasive" : "invasive") << " (max |W| "
           << fmt(r.witnesses[0].max_abs()) << ")";
  o.require(coverage >= kCoverageFloor, "coverage >= 99%");
  o.require(non_invasive, "non-invasive verdict");
  return o;
}

Verdict criterion_10() {
  Verdict o;
  std::mt19937_64 rng(1010);
  double worst = 0.0;
  const auto config = with_mode(ProtocolMode::ancilla_blind, {0, 1});
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = trial % 2 == 0 ? 2 : 3;
    const auto rho = testutil::random_state(rng, d);
    const auto h = testutil::random_hamiltonian(rng, d);
    const auto q = testutil::random_dichotomic(rng, d);
    const Schedule s(testutil::random_qubit(rng, 3).times);
    auto run = [&](std::vector<std::size_t> times) {
      return run_experiment(rho, h, q, s, config, times, MechanismScope::all_preceding);
    };
    const auto p123 = run({0, 1, 2}), p23 = run({1, 2}), p13 = run({0, 2}), p3 = run({2});
    worst = std::max({worst, check_nsit(p23, p3, {0}).max_abs(),
                      check_nsit(p123, p13, {1}).max_abs(), check_nsit(p123, p23, {0}).max_abs()});
  }
  o.detail << "max |defect| over three conditions and 100 random scenarios " << fmt(worst);
  o.require(worst <= kIdentityTol, "defects <= 1e-12");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 three-time LG violation", criterion_1},
      {"2 two-time LG violation", criterion_2},
      {"3 NSIT witness", criterion_3},
      {"4 correlator invariance", criterion_4},
      {"5 INRM equivalence", criterion_5},
      {"6 higher-order negativity", criterion_6},
      {"7 Fine's theorem", criterion_7},
      {"8 two-time identities", criterion_8},
      {"9 finite-shot behavior", criterion_9},
      {"10 three-time NSIT set", criterion_10},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << "\n";
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
