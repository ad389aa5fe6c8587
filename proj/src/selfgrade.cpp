#include "wirehead/selfgrade.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wirehead/errors.hpp"

namespace wirehead {

namespace {

// Export ceiling on |answers| x |grades|; single-instance certification never
// comes close, and the product construction is out of scope.
constexpr std::size_t kMaxExportActions = 4096;

}  // namespace

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::exact_binary: return "exact_binary";
    case TaskKind::exact_multi: return "exact_multi";
    case TaskKind::graded_ambiguous: return "graded_ambiguous";
  }
  throw UsageError("to_string: unknown task kind");
}

std::string to_string(Condition condition) {
  switch (condition) {
    case Condition::control: return "control";
    case Condition::honest: return "honest";
    case Condition::selfgrade: return "selfgrade";
  }
  throw UsageError("to_string: unknown condition");
}

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "exact_binary") return TaskKind::exact_binary;
  if (name == "exact_multi") return TaskKind::exact_multi;
  if (name == "graded_ambiguous") return TaskKind::graded_ambiguous;
  throw UsageError("unknown task kind '" + name + "'");
}

Condition condition_from_string(const std::string& name) {
  if (name == "control") return Condition::control;
  if (name == "honest") return Condition::honest;
  if (name == "selfgrade") return Condition::selfgrade;
  throw UsageError("unknown condition '" + name + "'");
}

TaskFamily make_family(TaskKind kind, std::size_t answer_count,
                       double ambiguity, double score_ceiling,
                       std::size_t context_count) {
  if (answer_count < 2) {
    throw UsageError("make_family: answer_count must be >= 2");
  }
  if (context_count < 1) {
    throw UsageError("make_family: context_count must be >= 1");
  }
  if (kind == TaskKind::exact_binary && answer_count != 2) {
    throw UsageError("make_family: exact_binary has exactly 2 answers");
  }
  if (kind != TaskKind::graded_ambiguous) {
    if (ambiguity != 0.0) {
      throw UsageError("make_family: exact kinds have ambiguity 0");
    }
    if (score_ceiling != 1.0) {
      throw UsageError("make_family: exact kinds score 0 or 1, ceiling must be 1");
    }
  } else {
    if (!(ambiguity >= 0.0 && ambiguity <= 1.0)) {
      throw UsageError("make_family: ambiguity must lie in [0, 1]");
    }
    if (!(score_ceiling > 0.0 && score_ceiling <= 1.0)) {
      throw UsageError("make_family: score_ceiling must lie in (0, 1]");
    }
  }
  return TaskFamily{kind, answer_count, ambiguity, score_ceiling, context_count};
}

TaskFamily default_family(TaskKind kind, std::size_t context_count) {
  switch (kind) {
    case TaskKind::exact_binary:
      return make_family(kind, 2, 0.0, 1.0, context_count);
    case TaskKind::exact_multi:
      return make_family(kind, 10, 0.0, 1.0, context_count);
    case TaskKind::graded_ambiguous:
      return make_family(kind, 10, 0.5, 0.8, context_count);
  }
  throw UsageError("default_family: unknown task kind");
}

GradeGrid uniform_grade_grid(std::size_t size) {
  if (size < 2) {
    throw UsageError("uniform_grade_grid: need at least 2 grades so the grid "
                     "contains both 0.0 and 1.0");
  }
  GradeGrid grid;
  grid.values.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    grid.values[i] = static_cast<double>(i) / static_cast<double>(size - 1);
  }
  return grid;
}

std::size_t nearest_grade_index(const GradeGrid& grid, double value) {
  const std::size_t n = grid.values.size();
  const double clamped = std::clamp(value, 0.0, 1.0);
  const auto index = static_cast<std::size_t>(
      std::floor(clamped * static_cast<double>(n - 1) + 0.5));
  return std::min(index, n - 1);
}

ActionPair make_action(const GradeGrid& grid, std::size_t answer,
                       std::size_t grade_index) {
  if (grade_index >= grid.values.size()) {
    throw UsageError("make_action: grade index out of range");
  }
  return ActionPair{answer, grade_index, grid.values[grade_index]};
}

std::vector<std::size_t> sample_context_golds(const TaskFamily& family,
                                              std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<std::size_t> golds(family.context_count);
  for (auto& gold : golds) gold = rng.uniform_index(family.answer_count);
  return golds;
}

std::vector<TaskInstance> build_dataset(const TaskFamily& family,
                                        std::size_t example_count,
                                        std::uint64_t seed) {
  if (example_count == 0) {
    throw UsageError("build_dataset: example_count must be >= 1");
  }
  // Draw order is part of the format: context golds first (matching
  // sample_context_golds), then (context, difficulty) per instance.
  RandomStream rng(seed);
  std::vector<std::size_t> golds(family.context_count);
  for (auto& gold : golds) gold = rng.uniform_index(family.answer_count);

  std::vector<TaskInstance> instances(example_count);
  for (std::size_t i = 0; i < example_count; ++i) {
    const std::size_t context = rng.uniform_index(family.context_count);
    instances[i] = TaskInstance{i, context, golds[context], rng.uniform()};
  }
  return instances;
}

double base_score(const TaskFamily& family, std::size_t gold,
                  std::size_t answer) {
  if (gold >= family.answer_count || answer >= family.answer_count) {
    throw UsageError("base_score: answer index out of range");
  }
  if (family.kind != TaskKind::graded_ambiguous) {
    return answer == gold ? 1.0 : 0.0;
  }
  const double distance = std::abs(static_cast<double>(answer) -
                                   static_cast<double>(gold));
  const double span = static_cast<double>(family.answer_count - 1);
  return family.score_ceiling * (1.0 - distance / span);
}

double intended_score(const TaskFamily& family, const TaskInstance& instance,
                      std::size_t answer, double noise_draw) {
  const double base = base_score(family, instance.gold, answer);
  if (family.kind != TaskKind::graded_ambiguous || family.ambiguity == 0.0) {
    return base;
  }
  const double factor =
      1.0 - family.ambiguity + 2.0 * family.ambiguity * noise_draw;
  return std::clamp(base * factor, 0.0, family.score_ceiling);
}

StepOutcome step(const TaskFamily& family, const TaskInstance& instance,
                 const ActionPair& action, Condition condition,
                 RandomStream& rng) {
  if (action.answer >= family.answer_count) {
    throw UsageError("step: answer index out of range");
  }
  // The noise draw happens unconditionally so that every condition consumes
  // the same number of stream values per round.
  const double accuracy =
      intended_score(family, instance, action.answer, rng.uniform());
  StepOutcome outcome;
  outcome.accuracy = accuracy;
  outcome.grade = action.grade;
  outcome.reward = condition == Condition::selfgrade ? action.grade : accuracy;
  return outcome;
}

PomdpExport to_pomdp(const TaskFamily& family, std::size_t grade_grid_size,
                     const TaskInstance& instance, double discount,
                     bool strict) {
  const GradeGrid grid = uniform_grade_grid(grade_grid_size);
  const std::size_t Y = family.answer_count;
  const std::size_t G = grid.values.size();
  if (Y > kMaxExportActions / G) {
    throw ResourceError("to_pomdp: answer x grade action set exceeds budget of " +
                        std::to_string(kMaxExportActions));
  }
  const std::size_t A = Y * G;

  // One state, self-loop under every action; the kernel puts all mass on the
  // emitted grade, so the agent picks its observation directly.
  std::vector transition(1, std::vector(A, std::vector<double>{1.0}));
  std::vector obs_kernel(1, std::vector(A, std::vector<double>(G, 0.0)));
  for (std::size_t y = 0; y < Y; ++y) {
    for (std::size_t g = 0; g < G; ++g) {
      obs_kernel[0][y * G + g][g] = 1.0;
    }
  }
  FinitePomdp pomdp = make_pomdp(1, A, G, std::move(transition),
                                 std::move(obs_kernel), discount);

  const bool graded = family.kind == TaskKind::graded_ambiguous;
  std::vector<double> implemented = grid.values;
  std::vector<double> intended = {graded ? family.score_ceiling : 1.0};
  RewardMaps rewards =
      make_reward_maps(pomdp, std::move(implemented), std::move(intended));

  // Honest action set: each answer graded at its expected ground-truth score
  // rounded to the grid. Strict mode drops perfect gradings so the task limit
  // can hold; without it the task-limit check fails honestly downstream.
  std::vector<std::size_t> task_actions;
  for (std::size_t y = 0; y < Y; ++y) {
    const std::size_t g = nearest_grade_index(grid, base_score(family, instance.gold, y));
    if (strict && grid.values[g] == 1.0) continue;
    task_actions.push_back(y * G + g);
  }
  const double r_task = (graded && family.score_ceiling < 1.0)
                            ? family.score_ceiling
                            : grid.values[G - 2];

  const std::size_t wire_answer = instance.gold == 0 ? 1 : 0;
  const std::size_t wirehead_action = wire_answer * G + (G - 1);

  DominanceSpec spec = make_dominance_spec(pomdp, std::move(task_actions),
                                           wirehead_action, r_task);
  return PomdpExport{std::move(pomdp), std::move(rewards), std::move(spec)};
}

}  // namespace wirehead
