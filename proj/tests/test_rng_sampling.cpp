#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "ssp/sampling.hpp"
#include "support.hpp"

using namespace ssp;

TEST_CASE("rng: streams are reproducible and distinct") {
  Rng a(42, 0), b(42, 0), c(42, 1);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
  }
  int same = 0;
  Rng a2(42, 0);
  for (int i = 0; i < 100; ++i) {
    if (a2.next_u64() == c.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("rng: uniform_below stays in range and covers values") {
  Rng r(7, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t v = r.uniform_below(5);
    CHECK(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("partition draw returns whole blocks with 1/p weights") {
  // N = 4, tau = 2, blocks {0,1}, {2,3}: p_i = 1/2, so zeta = 2 on the block.
  const SamplingLaw law = SamplingLaw::partition(4, 2, WeightRule::inverse_probability);
  Rng rng(3, 0);
  for (int t = 0; t < 200; ++t) {
    const SampleRealization r = law.draw(rng);
    REQUIRE(r.indices.size() == 2);
    const bool first = r.indices[0] == 0 && r.indices[1] == 1;
    const bool second = r.indices[0] == 2 && r.indices[1] == 3;
    CHECK((first || second));
    CHECK(r.weights[0] == 2.0);
    CHECK(r.weights[1] == 2.0);
  }
}

TEST_CASE("nice with tau = N draws the full universe with unit weights") {
  const SamplingLaw law = SamplingLaw::nice(6, 6, WeightRule::inverse_probability);
  Rng rng(11, 0);
  for (int t = 0; t < 20; ++t) {
    const SampleRealization r = law.draw(rng);
    REQUIRE(r.indices.size() == 6);
    for (int i = 0; i < 6; ++i) {
      CHECK(r.indices[i] == i);
      CHECK(r.weights[i] == 1.0);
    }
  }
}

TEST_CASE("nice sampling: empirical index and pair frequencies") {
  const int N = 5, trials = 100000;
  const SamplingLaw law = SamplingLaw::nice(N, 2, WeightRule::inverse_probability);
  Rng rng(2024, 0);
  std::vector<int> index_count(N, 0);
  std::map<std::pair<int, int>, int> pair_count;
  for (int t = 0; t < trials; ++t) {
    const SampleRealization r = law.draw(rng);
    REQUIRE(r.indices.size() == 2);
    for (int i : r.indices) ++index_count[i];
    ++pair_count[{r.indices[0], r.indices[1]}];
  }
  // P[i in S] = tau/N = 0.4; each of the 10 pairs has probability 0.1.
  const double se_idx = std::sqrt(0.4 * 0.6 / trials);
  for (int i = 0; i < N; ++i) {
    CHECK(std::abs(index_count[i] / double(trials) - 0.4) <= 3 * se_idx);
  }
  CHECK(pair_count.size() == 10);
  const double se_pair = std::sqrt(0.1 * 0.9 / trials);
  for (const auto& [pr, cnt] : pair_count) {
    CHECK(std::abs(cnt / double(trials) - 0.1) <= 3 * se_pair);
  }
}

TEST_CASE("weights are exactly 1/p_i or the 0/1 indicator") {
  const SamplingLaw obj = SamplingLaw::nice(7, 3, WeightRule::inverse_probability);
  const SamplingLaw con = SamplingLaw::nice(9, 4, WeightRule::indicator);
  Rng rng(5, 0);
  for (int t = 0; t < 500; ++t) {
    for (const auto& [law, is_obj] : {std::pair{&obj, true}, std::pair{&con, false}}) {
      const SampleRealization r = law->draw(rng);
      for (std::size_t u = 0; u < r.indices.size(); ++u) {
        if (is_obj) {
          CHECK(r.weights[u] == 1.0 / law->marginal(r.indices[u]));
        } else {
          CHECK(r.weights[u] == 1.0);
        }
      }
    }
  }
}

TEST_CASE("check_unbiasedness") {
  SUBCASE("full-batch nice law is exact") {
    const auto rep = check_unbiasedness(SamplingLaw::nice(4, 4, WeightRule::inverse_probability),
                                        10000);
    CHECK(rep.ok);
    for (int i = 0; i < 4; ++i) {
      CHECK(rep.mean[i] == 1.0);
      CHECK(rep.std_error[i] == 0.0);
    }
  }
  SUBCASE("partition law means are 1 within tolerance") {
    const auto rep = check_unbiasedness(SamplingLaw::partition(12, 3, WeightRule::inverse_probability),
                                        50000);
    CHECK(rep.ok);
    for (double t : rep.target) CHECK(t == 1.0);
  }
  SUBCASE("constraint nice law m=10 tau=2 has means near p_j = 0.2") {
    const auto rep = check_unbiasedness(SamplingLaw::nice(10, 2, WeightRule::indicator), 50000);
    CHECK(rep.ok);
    CHECK(rep.max_weight <= 1.0);
    for (int j = 0; j < 10; ++j) {
      CHECK(rep.target[j] == doctest::Approx(0.2));
      CHECK(std::abs(rep.mean[j] - 0.2) < 0.02);
    }
  }
  SUBCASE("too few trials is an input error") {
    CHECK_THROWS_AS(check_unbiasedness(SamplingLaw::nice(4, 2, WeightRule::indicator), 100),
                    InputError);
  }
}

TEST_CASE("scaled_constants closed forms") {
  ProblemConstants base;
  base.B_sq = 10.0;
  base.L = 3.0;
  base.B_j = {1.0, 2.0, 0.5};
  base.c_bar = 1.0;

  SUBCASE("full batch is the identity") {
    const auto sc = scaled_constants(SamplingLaw::nice(12, 12, WeightRule::inverse_probability),
                                     SamplingLaw::nice(3, 3, WeightRule::indicator), base, 1.0);
    CHECK(sc.B_sq == base.B_sq);
    CHECK(sc.L == base.L);
    CHECK(sc.B_h == 2.0);
    CHECK(sc.c == base.c_bar);
    CHECK(sc.C_beta == doctest::Approx(1.0 / 4.0));
  }
  SUBCASE("tau1 = 1 gives N B^2") {
    const auto sc = scaled_constants(SamplingLaw::nice(12, 1, WeightRule::inverse_probability),
                                     SamplingLaw::nice(3, 1, WeightRule::indicator), base, 1.0);
    CHECK(sc.B_sq == 12.0 * base.B_sq);
  }
  SUBCASE("arithmetic example: N=120 tau1=20, m=240 tau2=80") {
    ProblemConstants b2;
    b2.B_sq = 10.0;
    b2.B_j = {1.0};
    b2.c_bar = 1.0;
    const auto sc = scaled_constants(SamplingLaw::partition(120, 20, WeightRule::inverse_probability),
                                     SamplingLaw::partition(240, 80, WeightRule::indicator), b2, 1.0);
    CHECK(sc.B_sq == doctest::Approx(60.0).epsilon(1e-15));
    CHECK(sc.c == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("beta outside (0,2) is a configuration error") {
    CHECK_THROWS_AS(scaled_constants(SamplingLaw::nice(4, 2, WeightRule::inverse_probability),
                                     SamplingLaw::nice(3, 1, WeightRule::indicator), base, 2.5),
                    ConfigError);
  }
  SUBCASE("monotone in the batch sizes") {
    double prev_B = std::numeric_limits<double>::infinity();
    for (int tau : {1, 2, 3, 4, 6, 12}) {
      const auto sc = scaled_constants(SamplingLaw::nice(12, tau, WeightRule::inverse_probability),
                                       SamplingLaw::nice(3, 1, WeightRule::indicator), base, 1.0);
      CHECK(sc.B_sq <= prev_B);
      prev_B = sc.B_sq;
    }
    double prev_c = std::numeric_limits<double>::infinity();
    for (int tau : {1, 3, 8, 24}) {
      const auto sc = scaled_constants(SamplingLaw::nice(12, 2, WeightRule::inverse_probability),
                                       SamplingLaw::nice(24, tau, WeightRule::indicator), base, 1.0);
      CHECK(sc.c <= prev_c);
      prev_c = sc.c;
    }
  }
}

TEST_CASE("second moment: closed form matches enumeration for nice laws") {
  for (const auto& [N, tau] : {std::pair{6, 2}, std::pair{8, 3}, std::pair{12, 4}}) {
    const SamplingLaw law = SamplingLaw::nice(N, tau, WeightRule::inverse_probability);
    const auto sm = law.expected_weight_sq_norm();
    CHECK(!sm.estimated);
    CHECK(sm.value == doctest::Approx(ssp_test::nice_second_moment_enumerated(N, tau))
                          .epsilon(1e-12));
    CHECK(sm.value == doctest::Approx(double(N) * N / tau).epsilon(1e-12));
  }
}

TEST_CASE("custom law: exact enumeration below the subset cap, Monte-Carlo above") {
  // Two-subset custom law over {0,1,2}: exact path.
  const SamplingLaw small = SamplingLaw::custom(3, {{0, 1}, {1, 2}}, {0.5, 0.5},
                                                WeightRule::inverse_probability);
  const auto sm_small = small.expected_weight_sq_norm();
  CHECK(!sm_small.estimated);
  // p_0 = p_2 = 0.5, p_1 = 1: each subset contributes 1/0.25 + 1 = 5.
  CHECK(sm_small.value == doctest::Approx(5.0));

  // 24 singleton subsets: forced onto the Monte-Carlo path, flagged as estimate.
  std::vector<std::vector<int>> subsets;
  std::vector<double> probs(24, 1.0 / 24.0);
  for (int i = 0; i < 24; ++i) subsets.push_back({i});
  const SamplingLaw big = SamplingLaw::custom(24, std::move(subsets), std::move(probs),
                                              WeightRule::inverse_probability);
  const auto sm_big = big.expected_weight_sq_norm();
  CHECK(sm_big.estimated);
  CHECK(sm_big.std_error >= 0.0);
  // ||zeta||^2 = 1/p^2 = 576 on every draw, so the estimate is exact here.
  CHECK(sm_big.value == doctest::Approx(576.0).epsilon(0.05));
}

TEST_CASE("improper and malformed laws are rejected") {
  CHECK_THROWS_AS(SamplingLaw::partition(10, 3, WeightRule::indicator), ConfigError);
  CHECK_THROWS_AS(SamplingLaw::custom(3, {{0, 1}}, {1.0}, WeightRule::indicator), ConfigError);
  CHECK_THROWS_AS(SamplingLaw::custom(2, {{0}, {1}}, {0.7, 0.2}, WeightRule::indicator),
                  ConfigError);
  CHECK_THROWS_AS(SamplingLaw::partition_blocks(4, {{0, 1}, {1, 2, 3}}, WeightRule::indicator),
                  ConfigError);
}

TEST_CASE("function-level unbiasedness of the stochastic objective") {
  ConstrainedLassoSpec spec;
  spec.N = 8;
  spec.n = 6;
  spec.m_lin = 4;
  spec.m_soc = 0;
  spec.seed = 99;
  const ProblemInstance p = make_constrained_lasso(spec);
  Rng point_rng(17, 0);
  const Vector x = ssp_test::random_vector(point_rng, 6);
  const double Fx = p.objective(x);

  const SamplingLaw law = SamplingLaw::nice(8, 3, WeightRule::inverse_probability);
  Rng rng(4, 0);
  std::vector<double> samples;
  samples.reserve(10000);
  for (int t = 0; t < 10000; ++t) {
    const SampleRealization r = law.draw(rng);
    double v = 0.0;
    for (std::size_t u = 0; u < r.indices.size(); ++u) {
      v += r.weights[u] * p.component_value(r.indices[u], x);
    }
    samples.push_back(v / p.num_components());
  }
  const auto ms = ssp_test::mean_se(samples);
  CHECK(std::abs(ms.mean - Fx) <= 3.0 * ms.se);
}

TEST_CASE("constraint reformulation equivalence on realized draws") {
  ConstrainedLassoSpec spec;
  spec.N = 4;
  spec.n = 3;
  spec.m_lin = 6;
  spec.m_soc = 2;
  spec.seed = 5;
  const ProblemInstance p = make_constrained_lasso(spec);
  const SamplingLaw law = SamplingLaw::nice(8, 3, WeightRule::indicator);
  Rng rng(8, 0);

  // Feasible point: every realized max_{j in S'} h_j is <= 0.
  const Vector feasible = Vector::Zero(3);
  for (int t = 0; t < 300; ++t) {
    const SampleRealization r = law.draw(rng);
    double m = -std::numeric_limits<double>::infinity();
    for (int j : r.indices) m = std::max(m, p.h_value(j, feasible));
    CHECK(m <= 0.0);
  }

  // A point violating some constraint j*: draws containing j* expose it.
  Rng prng(21, 0);
  Vector x;
  int jstar = -1;
  for (int attempt = 0; attempt < 100 && jstar < 0; ++attempt) {
    x = ssp_test::random_vector(prng, 3, 2.0);
    for (int j = 0; j < p.num_constraints(); ++j) {
      if (p.h_value(j, x) > 0.1) {
        jstar = j;
        break;
      }
    }
  }
  REQUIRE(jstar >= 0);
  int hits = 0;
  for (int t = 0; t < 300; ++t) {
    const SampleRealization r = law.draw(rng);
    if (std::find(r.indices.begin(), r.indices.end(), jstar) == r.indices.end()) continue;
    ++hits;
    double m = -std::numeric_limits<double>::infinity();
    for (int j : r.indices) m = std::max(m, p.h_value(j, x));
    CHECK(m > 0.0);
  }
  CHECK(hits > 0);
}
