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

#include "lgcert/protocols.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "lgcert/macrocert.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lgcert;

namespace {

constexpr double kPi = std::numbers::pi;

const auto kZ = DichotomicObservable::sigma_z();

ProtocolConfig mode(ProtocolMode m, std::set<std::size_t> idx = {}) {
  ProtocolConfig c;
  c.mode = m;
  c.dephase_times = std::move(idx);
  return c;
}

double correlator(const OutcomeTable& t) {
  double c = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto s = t.outcome_at(k);
    double prod = 1.0;
    for (int v : s) prod *= v;
    c += prod * t.raw()[k];
  }
  return c;
}

}  // namespace

TEST(Schedule, invariants) {
  EXPECT_NO_THROW((Schedule{0.5, 1.0}));
  try {
    Schedule{2.0, 1.0};
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("increasing"), std::string::npos) << e.what();
  }
  EXPECT_THROW((Schedule{0.0, 1.0}), InvariantError);
  EXPECT_THROW(Schedule(std::vector<double>{}), InvariantError);
}

TEST(ProtocolConfig, validation) {
  const Schedule s{1.0, 2.0};
  EXPECT_THROW(mode(ProtocolMode::projective, {0}).validate(s), InvariantError);
  EXPECT_THROW(mode(ProtocolMode::projective_dephased, {2}).validate(s), InvariantError);
  EXPECT_NO_THROW(mode(ProtocolMode::ancilla_blind, {0, 1}).validate(s));
  EXPECT_EQ(mode(ProtocolMode::projective_dephased).mechanism_indices(), std::set<std::size_t>{0});
  EXPECT_EQ(parse_protocol_mode("inrm_dephased"), ProtocolMode::inrm_dephased);
  EXPECT_THROW(parse_protocol_mode("weak"), std::invalid_argument);
}

TEST(SingleTime, cases) {
  const auto mixed = DensityOperator::maximally_mixed(2);
  const auto h = Hamiltonian::precession(1.3);
  const auto a = single_time_distribution(mixed, h, kZ, 0.7);
  EXPECT_NEAR(a.at({+1}), 0.5, 1e-15);
  EXPECT_NEAR(a.at({-1}), 0.5, 1e-15);
  const auto b = single_time_distribution(testutil::ground(), Hamiltonian::zero(2), kZ, 3.0);
  EXPECT_EQ(b.at({+1}), 1.0);
  EXPECT_EQ(b.at({-1}), 0.0);
  const double omega = 2.0;
  for (double wt : {0.3, 1.0, kPi, 4.0}) {
    const auto c = single_time_distribution(testutil::ground(), Hamiltonian::precession(omega), kZ,
                                            wt / omega);
    EXPECT_NEAR(c.at({+1}), 0.5 * (1 + std::cos(wt)), 1e-12);
  }
  EXPECT_THROW(single_time_distribution(mixed, Hamiltonian::zero(3), kZ, 1.0),
               std::invalid_argument);
}

TEST(Sequential, frozen_dynamics) {
  const auto t = sequential_distribution(testutil::ground(), Hamiltonian::zero(2), kZ,
                                         Schedule{1.0, 2.0}, {});
  EXPECT_EQ(t.at({+1, +1}), 1.0);
  EXPECT_EQ(t.total(), 1.0);
}

TEST(Sequential, maximally_mixed_matches_oracle) {
  const double omega = 1.0;
  for (double wtau : {0.0, kPi / 3, kPi / 2, kPi}) {
    const double t1 = 0.4, t2 = 0.4 + wtau / omega;
    if (!(t2 > t1)) continue;
    const auto t = sequential_distribution(DensityOperator::maximally_mixed(2),
                                           Hamiltonian::precession(omega), kZ, Schedule{t1, t2},
                                           {});
    for (std::size_t k = 0; k < 4; ++k) {
      const auto s = oracle::signs(2, k);
      EXPECT_NEAR(t.raw()[k], 0.25 * (1 + s[0] * s[1] * std::cos(wtau)), 1e-12);
    }
  }
}

TEST(Sequential, random_qubits_match_markov_oracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sc = testutil::random_qubit(rng, 3);
    const auto t = sequential_distribution(testutil::from_bloch(sc.bloch),
                                           Hamiltonian::precession(sc.omega), kZ,
                                           Schedule(sc.times), {});
    EXPECT_LT(testutil::max_diff(t.raw(), oracle::sequential(sc.bloch, sc.omega, sc.times)),
              1e-12);
  }
}

TEST(Sequential, dephased_mode_equals_pre_dephased_state) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = testutil::random_state(rng, 3);
    const auto h = testutil::random_hamiltonian(rng, 3);
    const auto q = testutil::random_dichotomic(rng, 3);
    const Schedule s{0.3, 0.9, 1.4};
    const auto dephased = sequential_distribution(rho, h, q, s,
                                                  mode(ProtocolMode::projective_dephased, {1}));
    // Dephasing at t1 is the same as replacing rho by evolve-dephase-unevolve.
    const auto first = sequential_distribution(rho, h, q, s,
                                               mode(ProtocolMode::projective_dephased, {0}));
    const auto replaced = evolve(dephase(evolve(rho, h, s[0]), q), h, -s[0]);
    const auto plain = sequential_distribution(replaced, h, q, s, {});
    EXPECT_LT(testutil::max_diff(first.raw(), plain.raw()), 1e-12);
    // Dephasing immediately before a projective measurement of the same Q
    // changes nothing in the recorded statistics.
    EXPECT_LT(testutil::max_diff(dephased.raw(), plain.raw()), 1e-12);
  }
}

TEST(Sequential, ancilla_matches_dephasing) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = testutil::random_state(rng, 2);
    const auto h = testutil::random_hamiltonian(rng, 2);
    const Schedule s{0.2, 0.5, 1.1};
    const auto a = sequential_distribution(rho, h, kZ, s, mode(ProtocolMode::ancilla_blind, {0, 1}));
    const auto d =
        sequential_distribution(rho, h, kZ, s, mode(ProtocolMode::projective_dephased, {0, 1}));
    EXPECT_LT(testutil::max_diff(a.raw(), d.raw()), 1e-12);
    const auto pair_a = run_nsit_pair(rho, h, kZ, 0.3, 0.8, mode(ProtocolMode::ancilla_blind));
    const auto pair_d =
        run_nsit_pair(rho, h, kZ, 0.3, 0.8, mode(ProtocolMode::projective_dephased));
    EXPECT_LT(testutil::max_diff(pair_a.p2_alone.raw(), pair_d.p2_alone.raw()), 1e-12);
  }
}

TEST(Sequential, correlators_invariant_under_dephasing) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sc = testutil::random_qubit(rng, 3);
    const auto rho = testutil::from_bloch(sc.bloch);
    const auto h = Hamiltonian::precession(sc.omega);
    const Schedule two{sc.times[0], sc.times[1]};
    const Schedule three(sc.times);
    const double c_plain = correlator(sequential_distribution(rho, h, kZ, two, {}));
    const double c_deph = correlator(
        sequential_distribution(rho, h, kZ, two, mode(ProtocolMode::projective_dephased, {0})));
    EXPECT_NEAR(c_plain, c_deph, 1e-12);
    const double d_plain = correlator(sequential_distribution(rho, h, kZ, three, {}));
    const double d_deph = correlator(sequential_distribution(
        rho, h, kZ, three, mode(ProtocolMode::projective_dephased, {0, 1})));
    EXPECT_NEAR(d_plain, d_deph, 1e-12);
  }
}

TEST(Sequential, many_valued_observable) {
  // Qutrit, three outcomes, labels 1..3.
  std::vector<ComplexMatrix> p(3, ComplexMatrix::Zero(3, 3));
  for (int i = 0; i < 3; ++i) p[i](i, i) = 1.0;
  const ManyValuedObservable q(p, {1, 2, 3});
  std::mt19937_64 rng(6);
  const auto rho = testutil::random_state(rng, 3);
  const auto h = testutil::random_hamiltonian(rng, 3);
  const auto t = sequential_distribution(rho, h, q, Schedule{0.4, 1.0}, {});
  EXPECT_EQ(t.slots(), (std::vector<SlotLabels>{{1, 2, 3}, {1, 2, 3}}));
  EXPECT_NEAR(t.total(), 1.0, 1e-12);
  // p(n1, n2) = |<n2|U(t2-t1)|n1>|^2 <n1|rho(t1)|n1>.
  const ComplexMatrix r1 = evolve(rho, h, 0.4).matrix();
  const ComplexMatrix u = h.propagator(0.6);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      EXPECT_NEAR(t.at({a + 1, b + 1}), std::norm(u(b, a)) * r1(a, a).real(), 1e-12);
    }
  }
}

TEST(Inrm, surviving_branches) {
  ProtocolConfig inrm = mode(ProtocolMode::inrm);
  const auto never = inrm_distribution(testutil::ground(), Hamiltonian::zero(2), kZ,
                                       Schedule{1.0, 2.0}, std::vector<int>{+1}, inrm);
  EXPECT_NEAR(never.surviving(), 0.0, 1e-15);
  EXPECT_NEAR(never.discarded, 1.0, 1e-15);

  const double omega = 1.0;
  const auto half = inrm_distribution(DensityOperator::maximally_mixed(2),
                                      Hamiltonian::precession(omega), kZ,
                                      Schedule{0.5, 0.5 + kPi / 2}, std::vector<int>{-1}, inrm);
  EXPECT_EQ(half.prefix(), (Outcome{+1}));
  for (double p : half.final_probabilities) EXPECT_NEAR(p, 0.25, 1e-12);
  EXPECT_NEAR(half.surviving() + half.discarded, 1.0, 1e-10);

  EXPECT_THROW(inrm_distribution(testutil::ground(), Hamiltonian::zero(2), kZ, Schedule{1.0, 2.0},
                                 std::vector<int>{+1, -1}, inrm),
               std::invalid_argument);
}

TEST(Inrm, assembly_equals_sequential) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rho = testutil::random_state(rng, 2);
    const auto h = testutil::random_hamiltonian(rng, 2);
    const Schedule s{0.3, 0.7, 1.6};
    std::vector<InrmPartial> parts;
    for (const auto& c : all_couplings(2)) {
      parts.push_back(inrm_distribution(rho, h, kZ, s, c, mode(ProtocolMode::inrm)));
      EXPECT_NEAR(parts.back().surviving() + parts.back().discarded, 1.0, 1e-10);
    }
    const auto assembled = assemble_inrm(parts);
    const auto seq = sequential_distribution(rho, h, kZ, s, {});
    EXPECT_LT(testutil::max_diff(assembled.raw(), seq.raw()), 1e-12);

    const std::vector<InrmPartial> missing(parts.begin(), parts.begin() + 3);
    EXPECT_THROW(assemble_inrm(missing), std::invalid_argument);
    auto dup = parts;
    dup[3] = dup[0];
    EXPECT_THROW(assemble_inrm(dup), std::invalid_argument);
  }
}

TEST(Inrm, empirical_assembly_within_three_sigma) {
  const auto rho = DensityOperator::maximally_mixed(2);
  const auto h = Hamiltonian::precession(1.0);
  const Schedule s{0.5, 1.5, 2.5};
  ProtocolConfig cfg = mode(ProtocolMode::inrm);
  cfg.shots = 1000000;
  cfg.seed = 99;
  const std::vector<std::size_t> all{0, 1, 2};
  const auto empirical = run_experiment(rho, h, kZ, s, cfg, all, MechanismScope::measured_only);
  const auto exact = sequential_distribution(rho, h, kZ, s, {});
  EXPECT_EQ(empirical.shots(), cfg.shots);
  for (std::size_t k = 0; k < exact.size(); ++k) {
    EXPECT_LE(std::abs(empirical.raw()[k] - exact.raw()[k]),
              3 * standard_error(exact.raw()[k], cfg.shots) + 1e-15);
  }
}

TEST(AncillaBlind, reduced_state) {
  std::mt19937_64 rng(23);
  const auto diag = DensityOperator(DensityOperator::maximally_mixed(2).matrix());
  EXPECT_LT(testutil::max_diff(
                ancilla_blind_reduced_state(diag, Hamiltonian::zero(2), kZ, 1.0).matrix(),
                diag.matrix()),
            1e-15);
  const double omega = 1.0;
  EXPECT_LT(testutil::max_diff(ancilla_blind_reduced_state(testutil::ground(),
                                                           Hamiltonian::precession(omega), kZ,
                                                           kPi / 2 / omega)
                                   .matrix(),
                               DensityOperator::maximally_mixed(2).matrix()),
            1e-12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = testutil::random_state(rng, 4);
    const auto h = testutil::random_hamiltonian(rng, 4);
    const auto q = testutil::random_dichotomic(rng, 4);
    EXPECT_LT(testutil::max_diff(ancilla_blind_reduced_state(rho, h, q, 0.8).matrix(),
                                 dephase(evolve(rho, h, 0.8), q).matrix()),
              1e-12);
  }
  std::vector<ComplexMatrix> p(3, ComplexMatrix::Zero(3, 3));
  for (int i = 0; i < 3; ++i) p[i](i, i) = 1.0;
  EXPECT_THROW(ancilla_blind_reduced_state(DensityOperator::maximally_mixed(3),
                                           Hamiltonian::zero(3), ManyValuedObservable(p, {1, 2, 3}),
                                           1.0),
               std::invalid_argument);
}

TEST(Marginal, cases) {
  const OutcomeTable uniform(dichotomic_slots(2), {0.25, 0.25, 0.25, 0.25});
  const std::vector<std::size_t> both{0, 1};
  EXPECT_EQ(marginal_distribution(uniform, both), uniform);
  const auto second = marginal_distribution(uniform, {1});
  EXPECT_EQ(second.raw(), (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(marginal_distribution(uniform, std::span<const std::size_t>{}),
               std::invalid_argument);

  const double omega = 1.0, tau = 2 * kPi / 3;
  const auto p123 = sequential_distribution(DensityOperator::maximally_mixed(2),
                                            Hamiltonian::precession(omega), kZ,
                                            Schedule{1.0, 1.0 + tau, 1.0 + 2 * tau}, {});
  const auto p23 = marginal_distribution(p123, {1, 2});
  for (std::size_t k = 0; k < 4; ++k) {
    const auto s = oracle::signs(2, k);
    EXPECT_NEAR(p23.raw()[k], 0.25 * (1 + s[0] * s[1] * std::cos(2 * kPi / 3)), 1e-12);
  }
}

TEST(Sampling, cases) {
  const auto point = OutcomeTable::point_mass(dichotomic_slots(2), {+1, -1});
  const auto sampled = sample_counts(point, 12345, 1);
  EXPECT_EQ(sampled.raw(), point.raw());

  const OutcomeTable uniform(dichotomic_slots(2), {0.25, 0.25, 0.25, 0.25});
  const auto a = sample_counts(uniform, 1000000, 7);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(a.raw()[k], 0.25, 3 * std::sqrt(0.1875e-6));
  EXPECT_NEAR(a.total(), 1.0, 1e-12);
  EXPECT_EQ(sample_counts(uniform, 1000000, 7), a);
  EXPECT_THROW(sample_counts(uniform, 0, 7), std::invalid_argument);
}

TEST(Sampling, error_scales_with_shots) {
  const OutcomeTable t(dichotomic_slots(2), {0.1, 0.2, 0.3, 0.4});
  double small = 0.0, large = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    small += testutil::max_diff(sample_counts(t, 1000, seed).raw(), t.raw());
    large += testutil::max_diff(sample_counts(t, 100000, seed).raw(), t.raw());
  }
  EXPECT_GE(small / large, 5.0);
  EXPECT_LE(small / large, 20.0);
}

TEST(NsitPair, cases) {
  const double omega = 1.0;
  const auto h = Hamiltonian::precession(omega);
  const auto mixed = run_nsit_pair(DensityOperator::maximally_mixed(2), h, kZ, 0.3, 1.9, {});
  EXPECT_LT(check_nsit(mixed.p12, mixed.p2_alone, {0}).max_abs(), 1e-12);

  const auto plain = run_nsit_pair(testutil::ground(), h, kZ, kPi / 2, kPi, {});
  EXPECT_NEAR(plain.p2_alone.at({+1}), 0.0, 1e-12);
  EXPECT_NEAR(plain.p12.at({+1, +1}) + plain.p12.at({-1, +1}), 0.5, 1e-12);

  const auto deph = run_nsit_pair(testutil::ground(), h, kZ, kPi / 2, kPi,
                                  mode(ProtocolMode::projective_dephased, {0}));
  EXPECT_LE(check_nsit(deph.p12, deph.p2_alone, {0}).max_abs(), 1e-12);

  EXPECT_THROW(run_nsit_pair(testutil::ground(), h, kZ, 2.0, 1.0, {}), std::invalid_argument);
}

TEST(NsitPair, clumsy_dephased_matches_oracle) {
  const double omega = 1.0;
  const auto h = Hamiltonian::precession(omega);
  const oracle::Bloch up{0, 0, 1};
  for (double eps : {0.0, 0.05, 0.1}) {
    ProtocolConfig cfg = mode(ProtocolMode::projective_dephased, {0});
    cfg.clumsiness = ClumsinessModel::depolarizing(eps);
    for (double t1 : {kPi / 4, kPi / 2, 1.1}) {
      const auto pair = run_nsit_pair(testutil::ground(), h, kZ, t1, kPi, cfg);
      EXPECT_LT(testutil::max_diff(pair.p12.raw(), oracle::sequential_dephased_depolarized(
                                                       up, omega, t1, kPi, eps)),
                1e-12);
      const auto w = check_nsit(pair.p12, pair.p2_alone, {0});
      for (int s2 : {+1, -1}) {
        EXPECT_NEAR(w.defect({s2}), oracle::clumsy_dephased_witness(up, omega, t1, kPi, eps, s2),
                    1e-12);
      }
    }
  }
}
