#pragma once

#include <cstddef>
#include <vector>

#include "wirehead/rng.hpp"
#include "wirehead/selfgrade.hpp"

namespace wirehead {

// Tabular two-head softmax policy. The grade head is conditioned on the
// sampled answer by default (row per (context, answer) pair); an unconditioned
// variant keeps one row per context. Control-condition policies carry no
// grade head at all.
struct PolicySnapshot {
  std::vector<std::vector<double>> answer_logits;  // [context][answer]
  std::vector<std::vector<double>> grade_logits;   // see grade_row_index
  bool grade_conditioned = true;
  std::size_t answer_count = 0;  // row stride for conditioned grade lookups
  double temperature = 1.0;
};

PolicySnapshot make_policy(std::size_t context_count, std::size_t answer_count,
                           std::size_t grade_count, bool with_grade_head,
                           bool grade_conditioned, double temperature);

inline bool has_grade_head(const PolicySnapshot& policy) {
  return !policy.grade_logits.empty();
}

std::size_t grade_row_index(const PolicySnapshot& policy,
                            std::size_t context_id, std::size_t answer);

// Numerically stable softmax of logits / temperature; rows sum to 1 within
// 1e-12 by construction.
std::vector<double> softmax_row(const std::vector<double>& logits,
                                double temperature);

// Exact log softmax value at one index, same parameterization.
double log_softmax_at(const std::vector<double>& logits, double temperature,
                      std::size_t index);

// Natural-log entropy of an explicit distribution.
double entropy(const std::vector<double>& probs);

struct BaselineState {
  double value = 0.0;
  double alpha = 0.9;
  bool initialized = false;
};

// First observation initializes the value; afterwards
// value <- alpha * value + (1 - alpha) * reward.
BaselineState update_baseline(BaselineState state, double reward);

// reward - baseline; an uninitialized baseline counts as 0.
double compute_advantage(double reward, const BaselineState& baseline);

struct OptimizerConfig {
  double learning_rate = 0.05;
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  // Plain gradient ascent when false; per-parameter adaptive moment scaling
  // with the decay rates and stabilizer below when true. The adaptive default
  // learning rate is 0.01; shipped configs sweep it.
  bool adaptive = false;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  std::vector<std::vector<double>> answer_m, answer_v;
  std::vector<std::vector<double>> grade_m, grade_v;
  std::size_t step = 0;
};

OptimizerState make_optimizer_state(const PolicySnapshot& policy);

// Ascent-direction gradient of advantage * (log pi(y) + log pi(g)): nonzero
// only in the sampled answer row and, when a grade head exists, the sampled
// grade row.
struct PolicyGradient {
  std::size_t context_id = 0;
  std::vector<double> answer_row;
  bool has_grade = false;
  std::size_t grade_row = 0;
  std::vector<double> grade_row_values;
};

struct SampledAction {
  ActionPair action;
  double log_prob_answer = 0.0;
  double log_prob_grade = 0.0;  // 0 when the policy has no grade head
  double answer_entropy = 0.0;
  double grade_entropy = 0.0;
};

// Two-step draw: answer from the context's answer row, then (if present) a
// grade from the matching grade row. Log probabilities are exact log softmax
// values of the sampled indices.
SampledAction sample_action(const PolicySnapshot& policy, const GradeGrid& grid,
                            std::size_t context_id, RandomStream& rng);

PolicyGradient policy_gradient(const PolicySnapshot& policy,
                               std::size_t context_id, const ActionPair& action,
                               double advantage);

// In order: global-norm clip across both rows, optional adaptive moment
// scaling, ascent step, then decoupled weight decay shrinking every parameter
// by (1 - learning_rate * weight_decay). Throws NumericalError on non-finite
// gradients without touching the policy or optimizer state.
void apply_update(PolicySnapshot& policy, const PolicyGradient& gradient,
                  const OptimizerConfig& config, OptimizerState& state);

// Central-difference check of policy_gradient on the scalar objective
// advantage * (log pi(y) + log pi(g)), perturbing every logit. Returns the
// maximum relative error over parameters with |analytic| > 1e-8.
double finite_difference_check(const PolicySnapshot& policy,
                               std::size_t context_id, const ActionPair& action,
                               double advantage, double step);

}  // namespace wirehead
