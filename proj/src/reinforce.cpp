#include "wirehead/reinforce.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wirehead/errors.hpp"

namespace wirehead {

namespace {

void check_finite_rows(const std::vector<double>& row, const char* what) {
  for (double g : row) {
    if (!std::isfinite(g)) {
      throw NumericalError(std::string(what) + ": non-finite gradient entry");
    }
  }
}

double squared_norm(const std::vector<double>& row) {
  double sum = 0.0;
  for (double g : row) sum += g * g;
  return sum;
}

}  // namespace

PolicySnapshot make_policy(std::size_t context_count, std::size_t answer_count,
                           std::size_t grade_count, bool with_grade_head,
                           bool grade_conditioned, double temperature) {
  if (context_count == 0 || answer_count == 0) {
    throw UsageError("make_policy: context and answer sets must be nonempty");
  }
  if (with_grade_head && grade_count == 0) {
    throw UsageError("make_policy: grade head requested with zero grades");
  }
  if (!(temperature > 0.0)) {
    throw UsageError("make_policy: temperature must be positive");
  }
  PolicySnapshot policy;
  policy.answer_logits.assign(context_count, std::vector<double>(answer_count, 0.0));
  if (with_grade_head) {
    const std::size_t rows =
        grade_conditioned ? context_count * answer_count : context_count;
    policy.grade_logits.assign(rows, std::vector<double>(grade_count, 0.0));
  }
  policy.grade_conditioned = grade_conditioned;
  policy.answer_count = answer_count;
  policy.temperature = temperature;
  return policy;
}

std::size_t grade_row_index(const PolicySnapshot& policy,
                            std::size_t context_id, std::size_t answer) {
  if (!has_grade_head(policy)) {
    throw UsageError("grade_row_index: policy has no grade head");
  }
  if (context_id >= policy.answer_logits.size() ||
      answer >= policy.answer_count) {
    throw UsageError("grade_row_index: index out of range");
  }
  return policy.grade_conditioned ? context_id * policy.answer_count + answer
                                  : context_id;
}

std::vector<double> softmax_row(const std::vector<double>& logits,
                                double temperature) {
  if (logits.empty()) throw UsageError("softmax_row: empty logits");
  if (!(temperature > 0.0)) throw UsageError("softmax_row: temperature must be positive");
  double max_scaled = logits[0] / temperature;
  for (double z : logits) max_scaled = std::max(max_scaled, z / temperature);
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] / temperature - max_scaled);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

double log_softmax_at(const std::vector<double>& logits, double temperature,
                      std::size_t index) {
  if (index >= logits.size()) throw UsageError("log_softmax_at: index out of range");
  double max_scaled = logits[0] / temperature;
  for (double z : logits) max_scaled = std::max(max_scaled, z / temperature);
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z / temperature - max_scaled);
  return logits[index] / temperature - max_scaled - std::log(sum);
}

double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

BaselineState update_baseline(BaselineState state, double reward) {
  if (!state.initialized) {
    state.value = reward;
    state.initialized = true;
  } else {
    state.value = state.alpha * state.value + (1.0 - state.alpha) * reward;
  }
  return state;
}

double compute_advantage(double reward, const BaselineState& baseline) {
  return reward - (baseline.initialized ? baseline.value : 0.0);
}

OptimizerState make_optimizer_state(const PolicySnapshot& policy) {
  OptimizerState state;
  state.answer_m.assign(policy.answer_logits.size(),
                        std::vector<double>(policy.answer_count, 0.0));
  state.answer_v = state.answer_m;
  if (has_grade_head(policy)) {
    state.grade_m.assign(policy.grade_logits.size(),
                         std::vector<double>(policy.grade_logits.front().size(), 0.0));
    state.grade_v = state.grade_m;
  }
  return state;
}

SampledAction sample_action(const PolicySnapshot& policy, const GradeGrid& grid,
                            std::size_t context_id, RandomStream& rng) {
  if (context_id >= policy.answer_logits.size()) {
    throw UsageError("sample_action: context index out of range");
  }
  SampledAction sampled;
  const auto answer_probs =
      softmax_row(policy.answer_logits[context_id], policy.temperature);
  const std::size_t answer = rng.sample_discrete(answer_probs);
  sampled.log_prob_answer =
      log_softmax_at(policy.answer_logits[context_id], policy.temperature, answer);
  sampled.answer_entropy = entropy(answer_probs);

  if (!has_grade_head(policy)) {
    sampled.action = ActionPair{answer, 0, 0.0};
    return sampled;
  }

  const std::size_t row = grade_row_index(policy, context_id, answer);
  if (policy.grade_logits[row].size() != grid.values.size()) {
    throw UsageError("sample_action: grade head width does not match the grid");
  }
  const auto grade_probs =
      softmax_row(policy.grade_logits[row], policy.temperature);
  const std::size_t grade = rng.sample_discrete(grade_probs);
  sampled.log_prob_grade =
      log_softmax_at(policy.grade_logits[row], policy.temperature, grade);
  sampled.grade_entropy = entropy(grade_probs);
  sampled.action = make_action(grid, answer, grade);
  return sampled;
}

PolicyGradient policy_gradient(const PolicySnapshot& policy,
                               std::size_t context_id, const ActionPair& action,
                               double advantage) {
  if (context_id >= policy.answer_logits.size()) {
    throw UsageError("policy_gradient: context index out of range");
  }
  if (action.answer >= policy.answer_count) {
    throw UsageError("policy_gradient: answer index out of range");
  }
  const double tau = policy.temperature;
  PolicyGradient gradient;
  gradient.context_id = context_id;

  const auto answer_probs =
      softmax_row(policy.answer_logits[context_id], tau);
  gradient.answer_row.resize(answer_probs.size());
  for (std::size_t i = 0; i < answer_probs.size(); ++i) {
    const double indicator = i == action.answer ? 1.0 : 0.0;
    gradient.answer_row[i] = advantage * (indicator - answer_probs[i]) / tau;
  }

  if (has_grade_head(policy)) {
    const std::size_t row = grade_row_index(policy, context_id, action.answer);
    if (action.grade_index >= policy.grade_logits[row].size()) {
      throw UsageError("policy_gradient: grade index out of range");
    }
    const auto grade_probs = softmax_row(policy.grade_logits[row], tau);
    gradient.has_grade = true;
    gradient.grade_row = row;
    gradient.grade_row_values.resize(grade_probs.size());
    for (std::size_t i = 0; i < grade_probs.size(); ++i) {
      const double indicator = i == action.grade_index ? 1.0 : 0.0;
      gradient.grade_row_values[i] = advantage * (indicator - grade_probs[i]) / tau;
    }
  }
  return gradient;
}

void apply_update(PolicySnapshot& policy, const PolicyGradient& gradient,
                  const OptimizerConfig& config, OptimizerState& state) {
  if (gradient.context_id >= policy.answer_logits.size() ||
      gradient.answer_row.size() != policy.answer_count) {
    throw UsageError("apply_update: gradient shape mismatch");
  }
  if (gradient.has_grade &&
      (gradient.grade_row >= policy.grade_logits.size() ||
       gradient.grade_row_values.size() != policy.grade_logits.front().size())) {
    throw UsageError("apply_update: grade gradient shape mismatch");
  }
  check_finite_rows(gradient.answer_row, "apply_update");
  if (gradient.has_grade) check_finite_rows(gradient.grade_row_values, "apply_update");

  // Global-norm clip across both rows.
  double norm = squared_norm(gradient.answer_row);
  if (gradient.has_grade) norm += squared_norm(gradient.grade_row_values);
  norm = std::sqrt(norm);
  const double scale = norm > config.clip_norm ? config.clip_norm / norm : 1.0;

  const double lr = config.learning_rate;
  if (!config.adaptive) {
    auto& answer_row = policy.answer_logits[gradient.context_id];
    for (std::size_t i = 0; i < answer_row.size(); ++i) {
      answer_row[i] += lr * scale * gradient.answer_row[i];
    }
    if (gradient.has_grade) {
      auto& grade_row = policy.grade_logits[gradient.grade_row];
      for (std::size_t i = 0; i < grade_row.size(); ++i) {
        grade_row[i] += lr * scale * gradient.grade_row_values[i];
      }
    }
  } else {
    // Moments span the full tables and decay every step; the sparse gradient
    // contributes only to its two rows, but the scaled step moves everything,
    // matching the reference optimizer's treatment of dense parameters.
    state.step += 1;
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    auto adaptive_pass = [&](std::vector<std::vector<double>>& params,
                             std::vector<std::vector<double>>& m,
                             std::vector<std::vector<double>>& v,
                             auto gradient_at) {
      for (std::size_t r = 0; r < params.size(); ++r) {
        for (std::size_t i = 0; i < params[r].size(); ++i) {
          const double g = gradient_at(r, i);
          m[r][i] = config.beta1 * m[r][i] + (1.0 - config.beta1) * g;
          v[r][i] = config.beta2 * v[r][i] + (1.0 - config.beta2) * g * g;
          const double m_hat = m[r][i] / c1;
          const double v_hat = v[r][i] / c2;
          params[r][i] += lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
      }
    };
    adaptive_pass(policy.answer_logits, state.answer_m, state.answer_v,
                  [&](std::size_t r, std::size_t i) {
                    return r == gradient.context_id
                               ? scale * gradient.answer_row[i]
                               : 0.0;
                  });
    if (has_grade_head(policy)) {
      adaptive_pass(policy.grade_logits, state.grade_m, state.grade_v,
                    [&](std::size_t r, std::size_t i) {
                      return gradient.has_grade && r == gradient.grade_row
                                 ? scale * gradient.grade_row_values[i]
                                 : 0.0;
                    });
    }
  }

  // Decoupled weight decay shrinks every parameter, gradient or not.
  const double decay = 1.0 - lr * config.weight_decay;
  for (auto& row : policy.answer_logits) {
    for (double& theta : row) theta *= decay;
  }
  for (auto& row : policy.grade_logits) {
    for (double& theta : row) theta *= decay;
  }
}

double finite_difference_check(const PolicySnapshot& policy,
                               std::size_t context_id, const ActionPair& action,
                               double advantage, double step) {
  if (!(step >= 1e-7 && step <= 1e-3)) {
    throw UsageError("finite_difference_check: step must lie in [1e-7, 1e-3]");
  }
  const PolicyGradient analytic =
      policy_gradient(policy, context_id, action, advantage);

  const auto objective = [&](const PolicySnapshot& p) {
    double value = advantage * log_softmax_at(p.answer_logits[context_id],
                                              p.temperature, action.answer);
    if (has_grade_head(p)) {
      const std::size_t row = grade_row_index(p, context_id, action.answer);
      value += advantage *
               log_softmax_at(p.grade_logits[row], p.temperature, action.grade_index);
    }
    return value;
  };

  const auto analytic_at = [&](bool grade_table, std::size_t r, std::size_t i) {
    if (!grade_table) {
      return r == analytic.context_id ? analytic.answer_row[i] : 0.0;
    }
    return analytic.has_grade && r == analytic.grade_row
               ? analytic.grade_row_values[i]
               : 0.0;
  };

  PolicySnapshot perturbed = policy;
  double max_relative_error = 0.0;
  const auto scan_table = [&](std::vector<std::vector<double>>& table,
                              bool grade_table) {
    for (std::size_t r = 0; r < table.size(); ++r) {
      for (std::size_t i = 0; i < table[r].size(); ++i) {
        const double a = analytic_at(grade_table, r, i);
        if (std::abs(a) <= 1e-8) continue;
        const double original = table[r][i];
        table[r][i] = original + step;
        const double plus = objective(perturbed);
        table[r][i] = original - step;
        const double minus = objective(perturbed);
        table[r][i] = original;
        const double fd = (plus - minus) / (2.0 * step);
        max_relative_error =
            std::max(max_relative_error, std::abs(fd - a) / std::abs(a));
      }
    }
  };
  scan_table(perturbed.answer_logits, false);
  scan_table(perturbed.grade_logits, true);
  return max_relative_error;
}

}  // namespace wirehead
