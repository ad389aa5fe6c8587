#pragma once

#include <cstddef>
#include <vector>

namespace wirehead {

// Finite POMDP with an action-dependent observation kernel on the successor
// state. Rewards are not part of the tuple; they attach through RewardMaps so
// the same dynamics can carry different implemented/intended reward pairs.
struct FinitePomdp {
  std::size_t state_count = 0;
  std::size_t action_count = 0;
  std::size_t observation_count = 0;
  // transition[s][a] is a probability row over successor states.
  std::vector<std::vector<std::vector<double>>> transition;
  // obs_kernel[next_state][a] is a probability row over observations.
  std::vector<std::vector<std::vector<double>>> obs_kernel;
  // Discount in [0, 1).
  double discount = 0.0;
};

// Validates shapes, checks every probability row sums to 1 within 1e-6, then
// normalizes rows exactly. Throws UsageError on malformed input. All
// construction paths (fixtures, exports, generators) go through this.
FinitePomdp make_pomdp(std::size_t state_count, std::size_t action_count,
                       std::size_t observation_count,
                       std::vector<std::vector<std::vector<double>>> transition,
                       std::vector<std::vector<std::vector<double>>> obs_kernel,
                       double discount);

// Implemented reward is a function of the observation; intended reward is a
// function of the latent state and never enters any agent-facing computation.
struct RewardMaps {
  std::vector<double> implemented;  // per observation, values in [0, 1]
  std::vector<double> intended;     // per state, values in [0, 1]
};

// Validates sizes against the pomdp and the [0, 1] range.
RewardMaps make_reward_maps(const FinitePomdp& pomdp,
                            std::vector<double> implemented,
                            std::vector<double> intended);

// Partition of the action set for the dominance claim: a designated
// manipulation action against a ceiling r_task < 1 on every other listed
// action's expected observed reward.
struct DominanceSpec {
  std::vector<std::size_t> task_actions;
  std::size_t wirehead_action = 0;
  double r_task = 0.0;
};

DominanceSpec make_dominance_spec(const FinitePomdp& pomdp,
                                  std::vector<std::size_t> task_actions,
                                  std::size_t wirehead_action, double r_task);

struct QTable {
  std::vector<std::vector<double>> values;  // Q[s][a]
  double discount = 0.0;
  double residual = 0.0;  // sup-norm change of the final sweep
  std::size_t iterations = 0;
  bool converged = false;
};

struct ValueIterationOptions {
  double tolerance = 1e-9;
  std::size_t max_iterations = 1'000'000;
  // When set, receives the residual after every sweep (testing hook for the
  // contraction property).
  std::vector<double>* residual_history = nullptr;
};

// One witness per assumption condition; `state`/`action`/`value` identify the
// worst violation when `holds` is false.
struct ConditionWitness {
  bool holds = true;
  std::size_t state = 0;
  std::size_t action = 0;
  double value = 0.0;
};

struct AssumptionReport {
  ConditionWitness manipulation;  // E[implemented | s', a_w] = 1 for every s'
  ConditionWitness task_limit;    // E[implemented | s', a] <= r_task for task a
  ConditionWitness availability;  // a_w is a valid action everywhere
  bool all_hold() const {
    return manipulation.holds && task_limit.holds && availability.holds;
  }
};

struct DominanceCertificate {
  bool pass = false;
  double minimal_gap = 0.0;  // min over (s, task a) of Q[s][a_w] - Q[s][a]
  std::size_t witness_state = 0;
  std::size_t witness_action = 0;
  double required_gap = 0.0;          // 1 - r_task
  double slack = 0.0;                 // tolerance + 2 * residual / (1 - discount)
  double residual = 0.0;              // copied from the QTable
  double wirehead_value_error = 0.0;  // max_s |Q[s][a_w] - 1/(1-discount)|
};

// Expected implemented reward on arrival in `next_state` after taking
// `action`: the observation-kernel row dotted with the implemented map.
double expected_observed_reward(const FinitePomdp& pomdp,
                                const RewardMaps& rewards,
                                std::size_t next_state, std::size_t action);

// Fixed point of
//   Q(s,a) <- sum_s' T[s][a][s'] (E[implemented | s', a] + discount * max_a' Q(s',a'))
// by synchronous sweeps from Q = 0. Contraction with modulus `discount`
// guarantees convergence; the returned residual is the final sweep's sup-norm
// change. Throws NumericalError if any intermediate is non-finite.
QTable q_value_iteration(const FinitePomdp& pomdp, const RewardMaps& rewards,
                         const ValueIterationOptions& options = {});

// Greedy action per state; max ties break toward the lowest action index.
std::vector<std::size_t> greedy_policy(const QTable& qtable);

// Exact expected discounted implemented return of a deterministic policy over
// `horizon` steps, by forward recursion on state distributions (identical in
// value to full trajectory-tree enumeration). Truncation error against the
// infinite-horizon value is at most discount^horizon / (1 - discount).
// Throws ResourceError when state_count^2 * horizon exceeds `node_budget`.
double enumerate_policy_return(const FinitePomdp& pomdp,
                               const RewardMaps& rewards,
                               const std::vector<std::size_t>& policy,
                               std::size_t start_state, std::size_t horizon,
                               std::size_t node_budget = 50'000'000);

// Checks the three dominance preconditions and reports witnesses for any
// violation. Condition tolerances: equality within 1e-9, ceiling within 1e-9.
AssumptionReport check_assumption(const FinitePomdp& pomdp,
                                  const RewardMaps& rewards,
                                  const DominanceSpec& spec);

// Certifies Q[s][a_w] - Q[s][a] >= (1 - r_task) - slack for every state and
// every task action, and Q[s][a_w] = 1/(1-discount) within slack, where
// slack = tolerance + 2 * residual / (1 - discount) covers value-iteration
// truncation. The assumption report gates the call: a failed report makes the
// certificate vacuous, so passing one throws UsageError.
DominanceCertificate certify_dominance(const QTable& qtable,
                                       const DominanceSpec& spec,
                                       const AssumptionReport& report,
                                       double tolerance);

}  // namespace wirehead
