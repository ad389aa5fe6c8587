#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "support/generators.hpp"
#include "wirehead/errors.hpp"
#include "wirehead/io.hpp"
#include "wirehead/pomdp.hpp"
#include "wirehead/rng.hpp"

using namespace wirehead;
namespace gen = wirehead::testing;

namespace {

FinitePomdp single_state(double discount, const std::vector<double>& kernel_row) {
  std::vector transition(1, std::vector(1, std::vector<double>{1.0}));
  std::vector obs_kernel(1, std::vector(1, kernel_row));
  return make_pomdp(1, 1, kernel_row.size(), transition, obs_kernel, discount);
}

double state_value(const QTable& q, std::size_t s) {
  return *std::max_element(q.values[s].begin(), q.values[s].end());
}

}  // namespace

TEST_CASE("construction rejects malformed inputs") {
  std::vector t(1, std::vector(1, std::vector<double>{1.0}));
  std::vector k(1, std::vector(1, std::vector<double>{0.5, 0.5}));
  CHECK_THROWS_AS(make_pomdp(0, 1, 2, t, k, 0.5), UsageError);
  CHECK_THROWS_AS(make_pomdp(1, 1, 2, t, k, 1.0), UsageError);
  CHECK_THROWS_AS(make_pomdp(1, 1, 2, t, k, -0.1), UsageError);

  std::vector bad_sum(1, std::vector(1, std::vector<double>{0.5, 0.4}));
  CHECK_THROWS_AS(make_pomdp(1, 1, 2, t, bad_sum, 0.5), UsageError);
  std::vector negative(1, std::vector(1, std::vector<double>{1.5, -0.5}));
  CHECK_THROWS_AS(make_pomdp(1, 1, 2, t, negative, 0.5), UsageError);
  std::vector short_row(1, std::vector(1, std::vector<double>{1.0}));
  CHECK_THROWS_AS(make_pomdp(1, 1, 2, t, short_row, 0.5), UsageError);

  const FinitePomdp pomdp = single_state(0.5, {0.5, 0.5});
  CHECK_THROWS_AS(make_reward_maps(pomdp, {0.5, 1.5}, {0.5}), UsageError);
  CHECK_THROWS_AS(make_reward_maps(pomdp, {0.5}, {0.5}), UsageError);
  CHECK_THROWS_AS(make_dominance_spec(pomdp, {}, 0, 0.5), UsageError);
  CHECK_THROWS_AS(make_dominance_spec(pomdp, {0}, 0, 0.5), UsageError);
  CHECK_THROWS_AS(make_dominance_spec(pomdp, {0}, 1, 1.0), UsageError);
}

TEST_CASE("expected_observed_reward dots the kernel with the implemented map") {
  SUBCASE("degenerate kernel returns its observation's reward") {
    const FinitePomdp pomdp = single_state(0.5, {1.0, 0.0});
    const RewardMaps rewards = make_reward_maps(pomdp, {0.5, 1.0}, {0.0});
    CHECK(expected_observed_reward(pomdp, rewards, 0, 0) == doctest::Approx(0.5));
  }
  SUBCASE("half-half kernel over {0, 1} rewards averages to 0.5") {
    const FinitePomdp pomdp = single_state(0.5, {0.5, 0.5});
    const RewardMaps rewards = make_reward_maps(pomdp, {0.0, 1.0}, {0.0});
    CHECK(expected_observed_reward(pomdp, rewards, 0, 0) == doctest::Approx(0.5));
  }
  SUBCASE("three-observation dot product, Monte Carlo cross-check") {
    const FinitePomdp pomdp = single_state(0.5, {0.2, 0.3, 0.5});
    const RewardMaps rewards = make_reward_maps(pomdp, {0.0, 0.5, 1.0}, {0.0});
    const double exact = expected_observed_reward(pomdp, rewards, 0, 0);
    CHECK(exact == doctest::Approx(0.65));

    RandomStream rng(2024);
    const int draws = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
      sum += rewards.implemented[rng.sample_discrete(pomdp.obs_kernel[0][0])];
    }
    // Variance of the sampled reward is 0.1525; three sigma of the mean.
    CHECK(std::abs(sum / draws - exact) < 3.0 * std::sqrt(0.1525 / draws));
  }
  SUBCASE("out-of-range indices rejected") {
    const FinitePomdp pomdp = single_state(0.5, {1.0});
    const RewardMaps rewards = make_reward_maps(pomdp, {1.0}, {0.0});
    CHECK_THROWS_AS(expected_observed_reward(pomdp, rewards, 1, 0), UsageError);
    CHECK_THROWS_AS(expected_observed_reward(pomdp, rewards, 0, 1), UsageError);
  }
}

TEST_CASE("q_value_iteration fixed points") {
  SUBCASE("self-loop paying 1 at discount 0.9 is worth 10") {
    const FinitePomdp pomdp = single_state(0.9, {1.0});
    const RewardMaps rewards = make_reward_maps(pomdp, {1.0}, {0.0});
    ValueIterationOptions options;
    options.tolerance = 1e-12;
    const QTable q = q_value_iteration(pomdp, rewards, options);
    CHECK(q.converged);
    CHECK(q.values[0][0] == doctest::Approx(10.0).epsilon(1e-9));
  }
  SUBCASE("discount 0 reduces to the one-step expected reward") {
    RandomStream rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      const FinitePomdp pomdp = gen::random_pomdp(rng, 5, 4, 5, 0.0);
      const RewardMaps rewards = gen::random_reward_maps(rng, pomdp);
      const QTable q = q_value_iteration(pomdp, rewards);
      for (std::size_t s = 0; s < pomdp.state_count; ++s) {
        for (std::size_t a = 0; a < pomdp.action_count; ++a) {
          double one_step = 0.0;
          for (std::size_t sn = 0; sn < pomdp.state_count; ++sn) {
            one_step += pomdp.transition[s][a][sn] *
                        expected_observed_reward(pomdp, rewards, sn, a);
          }
          CHECK(q.values[s][a] == doctest::Approx(one_step).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("chain fixture matches the horizon-40 enumeration oracle") {
    const PomdpFixture fixture =
        load_pomdp_fixture(WIREHEAD_SOURCE_DIR "/fixtures/chain3.json");
    ValueIterationOptions options;
    options.tolerance = 1e-14;
    const QTable q = q_value_iteration(fixture.pomdp, fixture.rewards, options);
    REQUIRE(q.converged);
    const auto policy = greedy_policy(q);
    const double truncation =
        std::pow(fixture.pomdp.discount, 40) / (1.0 - fixture.pomdp.discount);
    for (std::size_t s = 0; s < fixture.pomdp.state_count; ++s) {
      const double oracle =
          enumerate_policy_return(fixture.pomdp, fixture.rewards, policy, s, 40);
      CHECK(std::abs(state_value(q, s) - oracle) <= truncation + 1e-9);
    }
  }
  SUBCASE("rejects a nonpositive tolerance") {
    const FinitePomdp pomdp = single_state(0.5, {1.0});
    const RewardMaps rewards = make_reward_maps(pomdp, {1.0}, {0.0});
    ValueIterationOptions options;
    options.tolerance = 0.0;
    CHECK_THROWS_AS(q_value_iteration(pomdp, rewards, options), UsageError);
  }
}

TEST_CASE("enumerate_policy_return") {
  const FinitePomdp pomdp = single_state(0.9, {1.0});
  const RewardMaps rewards = make_reward_maps(pomdp, {1.0}, {0.0});
  const std::vector<std::size_t> policy{0};
  SUBCASE("two-step self-loop sums the geometric series") {
    CHECK(enumerate_policy_return(pomdp, rewards, policy, 0, 2) ==
          doctest::Approx(1.9).epsilon(1e-12));
  }
  SUBCASE("discount 0 at horizon 1 is the one-step reward") {
    RandomStream rng(37);
    const FinitePomdp random = gen::random_pomdp(rng, 4, 3, 4, 0.0);
    const RewardMaps maps = gen::random_reward_maps(rng, random);
    std::vector<std::size_t> pick(random.state_count, 0);
    for (std::size_t s = 0; s < random.state_count; ++s) {
      double one_step = 0.0;
      for (std::size_t sn = 0; sn < random.state_count; ++sn) {
        one_step += random.transition[s][0][sn] *
                    expected_observed_reward(random, maps, sn, 0);
      }
      CHECK(enumerate_policy_return(random, maps, pick, s, 1) ==
            doctest::Approx(one_step).epsilon(1e-12));
    }
  }
  SUBCASE("node budget bounds the horizon") {
    CHECK_THROWS_AS(enumerate_policy_return(pomdp, rewards, policy, 0, 11, 10),
                    ResourceError);
    CHECK_THROWS_AS(enumerate_policy_return(pomdp, rewards, policy, 0, 0),
                    UsageError);
  }
}

TEST_CASE("check_assumption reports witnesses") {
  SUBCASE("task action above a zero ceiling fails the task limit") {
    const std::vector t(1, std::vector(2, std::vector<double>{1.0}));
    const std::vector<std::vector<std::vector<double>>> k{
        {{0.0, 1.0}, {0.7, 0.3}}};
    const FinitePomdp pomdp = make_pomdp(1, 2, 2, t, k, 0.9);
    const RewardMaps rewards = make_reward_maps(pomdp, {0.0, 1.0}, {0.0});
    const DominanceSpec spec = make_dominance_spec(pomdp, {1}, 0, 0.0);
    const AssumptionReport report = check_assumption(pomdp, rewards, spec);
    CHECK(report.manipulation.holds);
    CHECK(report.availability.holds);
    CHECK_FALSE(report.task_limit.holds);
    CHECK(report.task_limit.value == doctest::Approx(0.3));
    CHECK(report.task_limit.action == 1);
    CHECK_FALSE(report.all_hold());
  }
  SUBCASE("wirehead kernel leaking 0.1 of its mass fails manipulation") {
    const std::vector t(1, std::vector(2, std::vector<double>{1.0}));
    const std::vector<std::vector<std::vector<double>>> k{
        {{0.1, 0.9}, {0.7, 0.3}}};
    const FinitePomdp pomdp = make_pomdp(1, 2, 2, t, k, 0.9);
    const RewardMaps rewards = make_reward_maps(pomdp, {0.0, 1.0}, {0.0});
    const DominanceSpec spec = make_dominance_spec(pomdp, {1}, 0, 0.95);
    const AssumptionReport report = check_assumption(pomdp, rewards, spec);
    CHECK_FALSE(report.manipulation.holds);
    CHECK(report.manipulation.value == doctest::Approx(0.9));
    CHECK(report.manipulation.action == 0);
    CHECK(report.task_limit.holds);

    // A failed report gates certification outright.
    const QTable q = q_value_iteration(pomdp, rewards);
    CHECK_THROWS_AS(certify_dominance(q, spec, report, 1e-9), UsageError);
  }
}

TEST_CASE("certify_dominance on the hand-built chain") {
  const PomdpFixture fixture =
      load_pomdp_fixture(WIREHEAD_SOURCE_DIR "/fixtures/chain3_dominance.json");
  REQUIRE(fixture.dominance.has_value());
  const AssumptionReport report =
      check_assumption(fixture.pomdp, fixture.rewards, *fixture.dominance);
  REQUIRE(report.all_hold());

  ValueIterationOptions options;
  options.tolerance = 1e-12;
  const QTable q = q_value_iteration(fixture.pomdp, fixture.rewards, options);
  const DominanceCertificate cert =
      certify_dominance(q, *fixture.dominance, report, 1e-9);
  CHECK(cert.pass);
  CHECK(cert.required_gap == doctest::Approx(0.3));

  // Closed-form values: wirehead self-loop pays 1 forever (Q = 2 at
  // discount 0.5); the task action collects the next state's arrival reward
  // (0.65, 0.5, 0.25 along the cycle) plus discounted optimal continuation.
  CHECK(q.values[0][1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(q.values[1][1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(q.values[2][1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(q.values[0][0] == doctest::Approx(1.65).epsilon(1e-9));
  CHECK(q.values[1][0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(q.values[2][0] == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(cert.minimal_gap == doctest::Approx(0.35).epsilon(1e-9));
  CHECK(cert.witness_state == 0);
  CHECK(cert.witness_action == 0);

  // Independent oracle: the gap at s is the return difference between always
  // wireheading and deviating to the task action once at s. Deviations land
  // in a state whose deviation policy never revisits s, so the stationary
  // policy's return equals the one-step-deviation Q value.
  for (std::size_t s = 0; s < 3; ++s) {
    std::vector<std::size_t> deviate{1, 1, 1};
    deviate[s] = 0;
    const std::vector<std::size_t> wire{1, 1, 1};
    const double oracle_gap =
        enumerate_policy_return(fixture.pomdp, fixture.rewards, wire, s, 60) -
        enumerate_policy_return(fixture.pomdp, fixture.rewards, deviate, s, 60);
    CHECK(q.values[s][1] - q.values[s][0] ==
          doctest::Approx(oracle_gap).epsilon(1e-9));
  }
}

TEST_CASE("certify_dominance extreme ceiling r_task = 0") {
  const std::vector t(1, std::vector(2, std::vector<double>{1.0}));
  const std::vector<std::vector<std::vector<double>>> k{
      {{0.0, 1.0}, {1.0, 0.0}}};
  const FinitePomdp pomdp = make_pomdp(1, 2, 2, t, k, 0.9);
  const RewardMaps rewards = make_reward_maps(pomdp, {0.0, 1.0}, {0.0});
  const DominanceSpec spec = make_dominance_spec(pomdp, {1}, 0, 0.0);
  const AssumptionReport report = check_assumption(pomdp, rewards, spec);
  REQUIRE(report.all_hold());
  ValueIterationOptions options;
  options.tolerance = 1e-12;
  const QTable q = q_value_iteration(pomdp, rewards, options);
  const DominanceCertificate cert = certify_dominance(q, spec, report, 1e-9);
  CHECK(cert.pass);
  CHECK(cert.minimal_gap >= 1.0 - cert.slack);
  CHECK(cert.minimal_gap == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("property: construction normalizes every row to within 1e-12") {
  RandomStream rng(mix_seed({101, 1}));
  for (int trial = 0; trial < 2000; ++trial) {
    const FinitePomdp pomdp = gen::random_pomdp(rng, 5, 6, 5, 0.5);
    for (std::size_t s = 0; s < pomdp.state_count; ++s) {
      for (std::size_t a = 0; a < pomdp.action_count; ++a) {
        double ts = 0.0, os = 0.0;
        for (double p : pomdp.transition[s][a]) ts += p;
        for (double p : pomdp.obs_kernel[s][a]) os += p;
        CHECK(std::abs(ts - 1.0) <= 1e-12);
        CHECK(std::abs(os - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("property: residuals contract and values stay within bounds") {
  RandomStream rng(mix_seed({101, 2}));
  for (int trial = 0; trial < 300; ++trial) {
    const double discount = trial % 2 == 0 ? 0.5 : 0.9;
    const FinitePomdp pomdp = gen::random_pomdp(rng, 5, 6, 5, discount);
    const RewardMaps rewards = gen::random_reward_maps(rng, pomdp);
    std::vector<double> residuals;
    ValueIterationOptions options;
    options.tolerance = 1e-8;
    options.residual_history = &residuals;
    const QTable q = q_value_iteration(pomdp, rewards, options);
    REQUIRE(q.converged);
    for (std::size_t i = 1; i < residuals.size(); ++i) {
      CHECK(residuals[i] <= residuals[i - 1] + 1e-12);
    }
    const double ceiling = 1.0 / (1.0 - discount) + 1e-9;
    for (const auto& row : q.values) {
      for (double v : row) {
        CHECK(v >= 0.0);
        CHECK(v <= ceiling);
      }
    }
  }
}

TEST_CASE("property: greedy value matches the enumeration oracle") {
  RandomStream rng(mix_seed({101, 3}));
  for (int trial = 0; trial < 300; ++trial) {
    const double discount = trial % 2 == 0 ? 0.25 : 0.5;
    const FinitePomdp pomdp = gen::random_pomdp(rng, 4, 4, 4, discount);
    const RewardMaps rewards = gen::random_reward_maps(rng, pomdp);
    ValueIterationOptions options;
    options.tolerance = 1e-12;
    const QTable q = q_value_iteration(pomdp, rewards, options);
    const auto policy = greedy_policy(q);
    const double bound = std::pow(discount, 40) / (1.0 - discount) + 1e-9;
    for (std::size_t s = 0; s < pomdp.state_count; ++s) {
      const double oracle =
          enumerate_policy_return(pomdp, rewards, policy, s, 40);
      CHECK(std::abs(state_value(q, s) - oracle) <= bound);
    }
  }
}

TEST_CASE("property: dominance certification is sound") {
  RandomStream rng(mix_seed({101, 4}));
  const double discounts[] = {0.5, 0.9, 0.99};
  const double ceilings[] = {0.3, 0.6, 0.8};
  SUBCASE("satisfying instances always certify") {
    for (int trial = 0; trial < 200; ++trial) {
      const gen::DominanceInstance instance = gen::random_dominance_instance(
          rng, 5, 6, 5, discounts[trial % 3], ceilings[(trial / 3) % 3]);
      const AssumptionReport report =
          check_assumption(instance.pomdp, instance.rewards, instance.spec);
      REQUIRE(report.all_hold());
      ValueIterationOptions options;
      options.tolerance = 1e-9;
      const QTable q = q_value_iteration(instance.pomdp, instance.rewards, options);
      const DominanceCertificate cert =
          certify_dominance(q, instance.spec, report, 1e-9);
      CHECK(cert.pass);
      CHECK(cert.minimal_gap >= cert.required_gap - cert.slack);
      CHECK(cert.wirehead_value_error <= cert.slack);
    }
  }
  SUBCASE("instances broken by 0.1 or more are rejected at the gate") {
    for (int trial = 0; trial < 100; ++trial) {
      const auto which = trial % 2 == 0 ? gen::BrokenCondition::manipulation
                                        : gen::BrokenCondition::task_limit;
      const gen::DominanceInstance instance = gen::broken_dominance_instance(
          rng, 5, 6, 5, discounts[trial % 3], ceilings[(trial / 3) % 3], which);
      const AssumptionReport report =
          check_assumption(instance.pomdp, instance.rewards, instance.spec);
      CHECK_FALSE(report.all_hold());
      const QTable q = q_value_iteration(instance.pomdp, instance.rewards);
      CHECK_THROWS_AS(certify_dominance(q, instance.spec, report, 1e-9),
                      UsageError);
    }
  }
}

TEST_CASE("property: gap is tight when task actions achieve their ceiling") {
  RandomStream rng(mix_seed({101, 5}));
  for (int trial = 0; trial < 100; ++trial) {
    const double discount = trial % 2 == 0 ? 0.5 : 0.9;
    const double r_task = 0.2 + 0.6 * rng.uniform();
    const std::size_t S = 1 + rng.uniform_index(4);
    const std::size_t A = 2 + rng.uniform_index(3);
    const std::size_t wirehead = rng.uniform_index(A);

    // Identity transitions; task kernels split mass between the zero- and
    // one-reward observations so the expectation is exactly r_task.
    std::vector transition(S, std::vector(A, std::vector<double>(S, 0.0)));
    std::vector obs_kernel(S, std::vector(A, std::vector<double>(2, 0.0)));
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        transition[s][a][s] = 1.0;
        if (a == wirehead) {
          obs_kernel[s][a][1] = 1.0;
        } else {
          obs_kernel[s][a][0] = 1.0 - r_task;
          obs_kernel[s][a][1] = r_task;
        }
      }
    }
    const FinitePomdp pomdp =
        make_pomdp(S, A, 2, transition, obs_kernel, discount);
    const RewardMaps rewards =
        make_reward_maps(pomdp, {0.0, 1.0}, std::vector<double>(S, 0.0));
    std::vector<std::size_t> task_actions;
    for (std::size_t a = 0; a < A; ++a) {
      if (a != wirehead) task_actions.push_back(a);
    }
    const DominanceSpec spec =
        make_dominance_spec(pomdp, task_actions, wirehead, r_task);
    const AssumptionReport report = check_assumption(pomdp, rewards, spec);
    REQUIRE(report.all_hold());
    ValueIterationOptions options;
    options.tolerance = 1e-10;
    const QTable q = q_value_iteration(pomdp, rewards, options);
    const DominanceCertificate cert = certify_dominance(q, spec, report, 1e-9);
    CHECK(cert.pass);
    CHECK(std::abs(cert.minimal_gap - cert.required_gap) <= cert.slack);
  }
}
