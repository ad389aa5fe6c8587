#include "wirehead/pomdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wirehead/errors.hpp"

namespace wirehead {

namespace {

constexpr double kRowSumTolerance = 1e-6;

void normalize_rows(std::vector<std::vector<std::vector<double>>>& table,
                    std::size_t outer, std::size_t middle, std::size_t inner,
                    const char* label) {
  if (table.size() != outer) {
    throw UsageError(std::string(label) + ": expected " +
                     std::to_string(outer) + " outer entries, got " +
                     std::to_string(table.size()));
  }
  for (std::size_t i = 0; i < outer; ++i) {
    if (table[i].size() != middle) {
      throw UsageError(std::string(label) + "[" + std::to_string(i) +
                       "]: expected " + std::to_string(middle) + " rows");
    }
    for (std::size_t j = 0; j < middle; ++j) {
      auto& row = table[i][j];
      if (row.size() != inner) {
        throw UsageError(std::string(label) + "[" + std::to_string(i) + "][" +
                         std::to_string(j) + "]: expected row length " +
                         std::to_string(inner));
      }
      double sum = 0.0;
      for (double p : row) {
        if (!std::isfinite(p) || p < 0.0) {
          throw UsageError(std::string(label) + "[" + std::to_string(i) +
                           "][" + std::to_string(j) +
                           "]: entries must be finite and nonnegative");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw UsageError(std::string(label) + "[" + std::to_string(i) + "][" +
                         std::to_string(j) + "]: row sums to " +
                         std::to_string(sum) + ", not 1");
      }
      for (double& p : row) p /= sum;
    }
  }
}

void check_state(const FinitePomdp& pomdp, std::size_t s, const char* what) {
  if (s >= pomdp.state_count) {
    throw UsageError(std::string(what) + ": state index " + std::to_string(s) +
                     " out of range [0, " + std::to_string(pomdp.state_count) +
                     ")");
  }
}

void check_action(const FinitePomdp& pomdp, std::size_t a, const char* what) {
  if (a >= pomdp.action_count) {
    throw UsageError(std::string(what) + ": action index " +
                     std::to_string(a) + " out of range [0, " +
                     std::to_string(pomdp.action_count) + ")");
  }
}

}  // namespace

FinitePomdp make_pomdp(std::size_t state_count, std::size_t action_count,
                       std::size_t observation_count,
                       std::vector<std::vector<std::vector<double>>> transition,
                       std::vector<std::vector<std::vector<double>>> obs_kernel,
                       double discount) {
  if (state_count == 0 || action_count == 0 || observation_count == 0) {
    throw UsageError("make_pomdp: state, action, and observation sets must be nonempty");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw UsageError("make_pomdp: discount must lie in [0, 1), got " +
                     std::to_string(discount));
  }
  normalize_rows(transition, state_count, action_count, state_count, "transition");
  normalize_rows(obs_kernel, state_count, action_count, observation_count, "obs_kernel");
  FinitePomdp pomdp;
  pomdp.state_count = state_count;
  pomdp.action_count = action_count;
  pomdp.observation_count = observation_count;
  pomdp.transition = std::move(transition);
  pomdp.obs_kernel = std::move(obs_kernel);
  pomdp.discount = discount;
  return pomdp;
}

RewardMaps make_reward_maps(const FinitePomdp& pomdp,
                            std::vector<double> implemented,
                            std::vector<double> intended) {
  if (implemented.size() != pomdp.observation_count) {
    throw UsageError("make_reward_maps: implemented map has " +
                     std::to_string(implemented.size()) + " entries, expected " +
                     std::to_string(pomdp.observation_count));
  }
  if (intended.size() != pomdp.state_count) {
    throw UsageError("make_reward_maps: intended map has " +
                     std::to_string(intended.size()) + " entries, expected " +
                     std::to_string(pomdp.state_count));
  }
  for (double r : implemented) {
    if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
      throw UsageError("make_reward_maps: implemented rewards must lie in [0, 1]");
    }
  }
  for (double r : intended) {
    if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
      throw UsageError("make_reward_maps: intended rewards must lie in [0, 1]");
    }
  }
  return RewardMaps{std::move(implemented), std::move(intended)};
}

DominanceSpec make_dominance_spec(const FinitePomdp& pomdp,
                                  std::vector<std::size_t> task_actions,
                                  std::size_t wirehead_action, double r_task) {
  if (task_actions.empty()) {
    throw UsageError("make_dominance_spec: task_actions must be nonempty");
  }
  check_action(pomdp, wirehead_action, "make_dominance_spec");
  for (std::size_t a : task_actions) {
    check_action(pomdp, a, "make_dominance_spec");
    if (a == wirehead_action) {
      throw UsageError("make_dominance_spec: wirehead action " +
                       std::to_string(a) + " also listed as a task action");
    }
  }
  if (!(r_task >= 0.0 && r_task < 1.0)) {
    throw UsageError("make_dominance_spec: r_task must lie in [0, 1), got " +
                     std::to_string(r_task));
  }
  return DominanceSpec{std::move(task_actions), wirehead_action, r_task};
}

double expected_observed_reward(const FinitePomdp& pomdp,
                                const RewardMaps& rewards,
                                std::size_t next_state, std::size_t action) {
  check_state(pomdp, next_state, "expected_observed_reward");
  check_action(pomdp, action, "expected_observed_reward");
  const auto& row = pomdp.obs_kernel[next_state][action];
  double expectation = 0.0;
  for (std::size_t o = 0; o < row.size(); ++o) {
    expectation += row[o] * rewards.implemented[o];
  }
  return expectation;
}

QTable q_value_iteration(const FinitePomdp& pomdp, const RewardMaps& rewards,
                         const ValueIterationOptions& options) {
  if (!(options.tolerance > 0.0)) {
    throw UsageError("q_value_iteration: tolerance must be positive");
  }
  const std::size_t S = pomdp.state_count;
  const std::size_t A = pomdp.action_count;

  // Expected implemented reward on arrival, fixed across sweeps.
  std::vector<std::vector<double>> arrival(S, std::vector<double>(A, 0.0));
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      arrival[s][a] = expected_observed_reward(pomdp, rewards, s, a);
    }
  }

  QTable table;
  table.discount = pomdp.discount;
  table.values.assign(S, std::vector<double>(A, 0.0));
  std::vector<double> state_value(S, 0.0);
  std::vector<std::vector<double>> next(S, std::vector<double>(A, 0.0));

  double residual = std::numeric_limits<double>::infinity();
  std::size_t iteration = 0;
  while (iteration < options.max_iterations) {
    for (std::size_t s = 0; s < S; ++s) {
      state_value[s] = *std::max_element(table.values[s].begin(),
                                         table.values[s].end());
    }
    residual = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        double backup = 0.0;
        const auto& trans = pomdp.transition[s][a];
        for (std::size_t sn = 0; sn < S; ++sn) {
          backup += trans[sn] * (arrival[sn][a] + pomdp.discount * state_value[sn]);
        }
        if (!std::isfinite(backup)) {
          throw NumericalError("q_value_iteration: non-finite backup at state " +
                               std::to_string(s) + ", action " + std::to_string(a));
        }
        next[s][a] = backup;
        residual = std::max(residual, std::abs(backup - table.values[s][a]));
      }
    }
    table.values.swap(next);
    ++iteration;
    if (options.residual_history) options.residual_history->push_back(residual);
    if (residual <= options.tolerance) break;
  }

  table.residual = residual;
  table.iterations = iteration;
  table.converged = residual <= options.tolerance;
  return table;
}

std::vector<std::size_t> greedy_policy(const QTable& qtable) {
  std::vector<std::size_t> policy(qtable.values.size(), 0);
  for (std::size_t s = 0; s < qtable.values.size(); ++s) {
    const auto& row = qtable.values[s];
    std::size_t best = 0;
    for (std::size_t a = 1; a < row.size(); ++a) {
      if (row[a] > row[best]) best = a;  // strict: ties keep the lowest index
    }
    policy[s] = best;
  }
  return policy;
}

double enumerate_policy_return(const FinitePomdp& pomdp,
                               const RewardMaps& rewards,
                               const std::vector<std::size_t>& policy,
                               std::size_t start_state, std::size_t horizon,
                               std::size_t node_budget) {
  if (horizon == 0) throw UsageError("enumerate_policy_return: horizon must be >= 1");
  check_state(pomdp, start_state, "enumerate_policy_return");
  if (policy.size() != pomdp.state_count) {
    throw UsageError("enumerate_policy_return: policy size mismatch");
  }
  for (std::size_t a : policy) check_action(pomdp, a, "enumerate_policy_return");

  const std::size_t S = pomdp.state_count;
  const std::size_t cost = S * S;
  if (horizon > node_budget / (cost == 0 ? 1 : cost)) {
    throw ResourceError("enumerate_policy_return: horizon " +
                        std::to_string(horizon) + " exceeds node budget " +
                        std::to_string(node_budget));
  }

  // Forward recursion on the state distribution. At step t the agent in
  // distribution d takes policy[s], lands in s' with T[s][policy[s]][s'], and
  // collects the expected arrival reward under (s', policy[s]).
  std::vector<double> dist(S, 0.0);
  dist[start_state] = 1.0;
  double total = 0.0;
  double weight = 1.0;
  std::vector<double> next_dist(S, 0.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    std::fill(next_dist.begin(), next_dist.end(), 0.0);
    double step_reward = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      if (dist[s] == 0.0) continue;
      const std::size_t a = policy[s];
      const auto& trans = pomdp.transition[s][a];
      for (std::size_t sn = 0; sn < S; ++sn) {
        if (trans[sn] == 0.0) continue;
        const double mass = dist[s] * trans[sn];
        next_dist[sn] += mass;
        step_reward += mass * expected_observed_reward(pomdp, rewards, sn, a);
      }
    }
    total += weight * step_reward;
    weight *= pomdp.discount;
    dist.swap(next_dist);
  }
  return total;
}

AssumptionReport check_assumption(const FinitePomdp& pomdp,
                                  const RewardMaps& rewards,
                                  const DominanceSpec& spec) {
  constexpr double kTolerance = 1e-9;
  check_action(pomdp, spec.wirehead_action, "check_assumption");
  for (std::size_t a : spec.task_actions) check_action(pomdp, a, "check_assumption");

  AssumptionReport report;

  // Manipulation: the wirehead action yields expected observed reward 1 from
  // every successor state. Track the worst deviation.
  double worst_deviation = 0.0;
  for (std::size_t sn = 0; sn < pomdp.state_count; ++sn) {
    const double e = expected_observed_reward(pomdp, rewards, sn, spec.wirehead_action);
    const double deviation = std::abs(e - 1.0);
    if (deviation > worst_deviation) {
      worst_deviation = deviation;
      report.manipulation.state = sn;
      report.manipulation.action = spec.wirehead_action;
      report.manipulation.value = e;
    }
  }
  report.manipulation.holds = worst_deviation <= kTolerance;
  if (report.manipulation.holds) {
    report.manipulation.value = 1.0;
  }

  // Task limit: every task action's expected observed reward stays at or
  // below r_task from every successor state.
  double worst_excess = 0.0;
  for (std::size_t sn = 0; sn < pomdp.state_count; ++sn) {
    for (std::size_t a : spec.task_actions) {
      const double e = expected_observed_reward(pomdp, rewards, sn, a);
      const double excess = e - spec.r_task;
      if (excess > worst_excess) {
        worst_excess = excess;
        report.task_limit.state = sn;
        report.task_limit.action = a;
        report.task_limit.value = e;
      }
    }
  }
  report.task_limit.holds = worst_excess <= kTolerance;

  // Availability: with a global action set, validity of the index in every
  // state is the whole condition; reported for completeness.
  report.availability.holds = spec.wirehead_action < pomdp.action_count;
  report.availability.action = spec.wirehead_action;

  return report;
}

DominanceCertificate certify_dominance(const QTable& qtable,
                                       const DominanceSpec& spec,
                                       const AssumptionReport& report,
                                       double tolerance) {
  if (!report.all_hold()) {
    throw UsageError("certify_dominance: assumption report does not hold; "
                     "a certificate would be vacuous");
  }
  if (!(tolerance >= 0.0)) {
    throw UsageError("certify_dominance: tolerance must be nonnegative");
  }
  if (qtable.values.empty()) {
    throw UsageError("certify_dominance: empty Q table");
  }
  const std::size_t A = qtable.values.front().size();
  if (spec.wirehead_action >= A) {
    throw UsageError("certify_dominance: wirehead action out of range");
  }
  for (std::size_t a : spec.task_actions) {
    if (a >= A) throw UsageError("certify_dominance: task action out of range");
  }

  DominanceCertificate cert;
  cert.required_gap = 1.0 - spec.r_task;
  cert.residual = qtable.residual;
  cert.slack = tolerance + 2.0 * qtable.residual / (1.0 - qtable.discount);

  const double max_value = 1.0 / (1.0 - qtable.discount);
  double minimal_gap = std::numeric_limits<double>::infinity();
  double worst_value_error = 0.0;
  for (std::size_t s = 0; s < qtable.values.size(); ++s) {
    const double q_wire = qtable.values[s][spec.wirehead_action];
    worst_value_error = std::max(worst_value_error, std::abs(q_wire - max_value));
    for (std::size_t a : spec.task_actions) {
      const double gap = q_wire - qtable.values[s][a];
      if (gap < minimal_gap) {
        minimal_gap = gap;
        cert.witness_state = s;
        cert.witness_action = a;
      }
    }
  }
  cert.minimal_gap = minimal_gap;
  cert.wirehead_value_error = worst_value_error;
  cert.pass = minimal_gap >= cert.required_gap - cert.slack &&
              worst_value_error <= cert.slack;
  return cert;
}

}  // namespace wirehead
