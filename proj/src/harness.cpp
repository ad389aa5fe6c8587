#include "wirehead/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wirehead/errors.hpp"
#include "wirehead/rng.hpp"

namespace wirehead {

namespace {

using nlohmann::json;

constexpr std::size_t kCurveSmoothingWindow = 20;

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

json family_to_json(const TaskFamily& family) {
  return json{{"kind", to_string(family.kind)},
              {"answer_count", family.answer_count},
              {"ambiguity", family.ambiguity},
              {"score_ceiling", family.score_ceiling},
              {"context_count", family.context_count}};
}

TaskFamily family_from_json(const json& node, const std::string& origin) {
  if (!node.is_object() || !node.contains("kind")) {
    throw UsageError(origin + ": every family needs a 'kind'");
  }
  const TaskKind kind = task_kind_from_string(node["kind"].get<std::string>());
  const TaskFamily defaults = default_family(kind);
  try {
    return make_family(kind,
                       node.value("answer_count", defaults.answer_count),
                       node.value("ambiguity", defaults.ambiguity),
                       node.value("score_ceiling", defaults.score_ceiling),
                       node.value("context_count", defaults.context_count));
  } catch (const json::exception& error) {
    throw UsageError(origin + ": family '" + to_string(kind) + "': " + error.what());
  }
}

json manifest_to_json(const ExperimentConfig& config,
                      const SweepManifest& manifest) {
  json cells = json::array();
  for (const auto& status : manifest.cells) {
    cells.push_back(json{
        {"family_index", status.cell.family_index},
        {"family", to_string(config.families[status.cell.family_index].kind)},
        {"condition", to_string(status.cell.condition)},
        {"seed", status.cell.seed},
        {"log_file", status.log_file},
        {"completed", status.completed},
        {"error", status.error}});
  }
  return json{{"cells", cells}};
}

// Grade-head prior described in AgentConfig: distance ramp toward an
// (optimism-shifted) honest grade, sharp for exact tasks, flatter and more
// optimistic as ambiguity grows.
void apply_grade_prior(PolicySnapshot& policy, const TaskFamily& family,
                       const GradeGrid& grid,
                       const std::vector<std::size_t>& context_golds,
                       const AgentConfig& agent) {
  if (!has_grade_head(policy)) return;
  const double sharpness =
      agent.grade_prior_sharpness * (1.0 - family.ambiguity);
  const double shift = agent.grade_prior_optimism * family.ambiguity;
  const auto prior_center = [&](double honest_score) {
    return (1.0 - shift) * honest_score + shift;
  };
  for (std::size_t context = 0; context < family.context_count; ++context) {
    if (policy.grade_conditioned) {
      for (std::size_t answer = 0; answer < family.answer_count; ++answer) {
        const double center = prior_center(
            base_score(family, context_golds[context], answer));
        auto& row = policy.grade_logits[grade_row_index(policy, context, answer)];
        for (std::size_t g = 0; g < row.size(); ++g) {
          row[g] = -sharpness * std::abs(grid.values[g] - center);
        }
      }
    } else {
      double mean_score = 0.0;
      for (std::size_t answer = 0; answer < family.answer_count; ++answer) {
        mean_score += base_score(family, context_golds[context], answer);
      }
      mean_score /= static_cast<double>(family.answer_count);
      const double center = prior_center(mean_score);
      auto& row = policy.grade_logits[context];
      for (std::size_t g = 0; g < row.size(); ++g) {
        row[g] = -sharpness * std::abs(grid.values[g] - center);
      }
    }
  }
}

void write_records_jsonl(const std::filesystem::path& path,
                         const std::vector<RoundRecord>& records) {
  std::string content;
  for (const auto& record : records) {
    content += round_record_to_line(record);
    content += '\n';
  }
  write_text_file(path, content);
}

std::vector<RoundRecord> read_records_jsonl(const std::filesystem::path& path) {
  const std::string content = read_text_file(path);
  std::vector<RoundRecord> records;
  std::istringstream lines(content);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    if (line.empty()) continue;
    records.push_back(round_record_from_line(
        line, path.string() + ":" + std::to_string(line_number)));
  }
  return records;
}

void write_summaries(const ExperimentConfig& config,
                     const SweepManifest& manifest) {
  std::string cell_rows =
      "family,condition,seed,counted_rounds,mean_reward,mean_accuracy,"
      "mean_grade,grade_inflation,saturated,wirehead\n";
  // inflation[condition][family] accumulated over seeds.
  std::vector<std::vector<double>> inflation_sum(
      config.conditions.size(), std::vector<double>(config.families.size(), 0.0));
  std::vector<std::vector<std::size_t>> inflation_count(
      config.conditions.size(),
      std::vector<std::size_t>(config.families.size(), 0));

  for (const auto& status : manifest.cells) {
    if (!status.completed) continue;
    const auto records =
        read_records_jsonl(config.output_dir / status.log_file);
    if (records.empty()) continue;
    RunSummary summary;
    try {
      summary = summarize_run(records, config.metrics.window,
                              config.metrics.thresholds);
    } catch (const UsageError&) {
      continue;  // every counted round degenerate; nothing to tabulate
    }
    const auto& family = config.families[status.cell.family_index];
    cell_rows += to_string(family.kind) + "," +
                 to_string(status.cell.condition) + "," +
                 std::to_string(status.cell.seed) + "," +
                 std::to_string(summary.counted_rounds) + "," +
                 format_double(summary.mean_reward) + "," +
                 format_double(summary.mean_accuracy) + ",";
    cell_rows += summary.mean_grade ? format_double(*summary.mean_grade) : "";
    cell_rows += ",";
    cell_rows +=
        summary.grade_inflation ? format_double(*summary.grade_inflation) : "";
    cell_rows += ",";
    cell_rows += summary.saturated ? "true" : "false";
    cell_rows += ",";
    cell_rows += summary.wirehead_flag ? "true" : "false";
    cell_rows += "\n";

    if (summary.grade_inflation) {
      const auto condition_it = std::find(config.conditions.begin(),
                                          config.conditions.end(),
                                          status.cell.condition);
      const auto c = static_cast<std::size_t>(
          condition_it - config.conditions.begin());
      inflation_sum[c][status.cell.family_index] += *summary.grade_inflation;
      inflation_count[c][status.cell.family_index] += 1;
    }
  }
  write_text_file(config.output_dir / "cell_summaries.csv", cell_rows);

  std::string matrix = "condition";
  for (const auto& family : config.families) {
    matrix += "," + to_string(family.kind);
  }
  matrix += "\n";
  for (std::size_t c = 0; c < config.conditions.size(); ++c) {
    matrix += to_string(config.conditions[c]);
    for (std::size_t f = 0; f < config.families.size(); ++f) {
      matrix += ",";
      if (inflation_count[c][f] > 0) {
        matrix += format_double(inflation_sum[c][f] /
                                static_cast<double>(inflation_count[c][f]));
      }
    }
    matrix += "\n";
  }
  write_text_file(config.output_dir / "inflation_matrix.csv", matrix);
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig config;
  config.families = {default_family(TaskKind::exact_binary),
                     default_family(TaskKind::exact_multi),
                     default_family(TaskKind::graded_ambiguous)};
  config.conditions = {Condition::control, Condition::honest,
                       Condition::selfgrade};
  config.seeds = {0, 1, 2, 3, 4};
  config.agent.optimizer.adaptive = true;
  config.agent.optimizer.learning_rate = 0.2;
  return config;
}

void validate_config(const ExperimentConfig& config) {
  if (config.rounds_per_episode == 0) {
    throw UsageError("config: rounds_per_episode must be >= 1");
  }
  if (config.examples_per_dataset == 0) {
    throw UsageError("config: examples_per_dataset must be >= 1");
  }
  if (config.families.empty()) throw UsageError("config: need at least one family");
  if (config.conditions.empty()) {
    throw UsageError("config: need at least one condition");
  }
  if (config.seeds.empty()) throw UsageError("config: need at least one seed");
  if (std::set(config.conditions.begin(), config.conditions.end()).size() !=
      config.conditions.size()) {
    throw UsageError("config: duplicate conditions produce duplicate cells");
  }
  if (std::set(config.seeds.begin(), config.seeds.end()).size() !=
      config.seeds.size()) {
    throw UsageError("config: duplicate seeds produce duplicate cells");
  }
  if (config.metrics.window == 0) {
    throw UsageError("config: metrics window must be >= 1");
  }
  if (!(config.agent.baseline_alpha >= 0.0 && config.agent.baseline_alpha <= 1.0)) {
    throw UsageError("config: baseline alpha must lie in [0, 1]");
  }
  if (!(config.agent.temperature > 0.0)) {
    throw UsageError("config: temperature must be positive");
  }
  if (config.agent.grade_grid_size < 2) {
    throw UsageError("config: grade grid needs at least 2 values");
  }
  if (!(config.agent.optimizer.learning_rate > 0.0)) {
    throw UsageError("config: learning rate must be positive");
  }
  if (!(config.agent.optimizer.clip_norm > 0.0)) {
    throw UsageError("config: clip norm must be positive");
  }
  if (config.agent.optimizer.weight_decay < 0.0) {
    throw UsageError("config: weight decay must be nonnegative");
  }
}

ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin) {
  json node;
  try {
    node = json::parse(text);
  } catch (const json::parse_error& error) {
    throw UsageError(origin + ": " + error.what());
  }
  ExperimentConfig config;
  try {
    config.master_seed = node.value("master_seed", config.master_seed);
    config.rounds_per_episode =
        node.value("rounds_per_episode", config.rounds_per_episode);
    config.examples_per_dataset =
        node.value("examples_per_dataset", config.examples_per_dataset);

    if (node.contains("families")) {
      config.families.clear();
      for (const auto& entry : node["families"]) {
        config.families.push_back(family_from_json(entry, origin));
      }
    } else {
      config.families = default_config().families;
    }

    if (node.contains("conditions")) {
      for (const auto& entry : node["conditions"]) {
        config.conditions.push_back(
            condition_from_string(entry.get<std::string>()));
      }
    } else {
      config.conditions = {Condition::control, Condition::honest,
                           Condition::selfgrade};
    }

    if (node.contains("seeds")) {
      config.seeds = node["seeds"].get<std::vector<std::uint64_t>>();
    } else {
      config.seeds = {0, 1, 2, 3, 4};
    }

    if (node.contains("agent")) {
      const json& agent = node["agent"];
      auto& optimizer = config.agent.optimizer;
      optimizer.adaptive = agent.value("adaptive", optimizer.adaptive);
      optimizer.learning_rate =
          agent.value("learning_rate", optimizer.adaptive ? 0.01 : 0.05);
      optimizer.weight_decay =
          agent.value("weight_decay", optimizer.weight_decay);
      optimizer.clip_norm = agent.value("clip_norm", optimizer.clip_norm);
      optimizer.beta1 = agent.value("beta1", optimizer.beta1);
      optimizer.beta2 = agent.value("beta2", optimizer.beta2);
      optimizer.epsilon = agent.value("epsilon", optimizer.epsilon);
      config.agent.baseline_alpha =
          agent.value("baseline_alpha", config.agent.baseline_alpha);
      config.agent.temperature =
          agent.value("temperature", config.agent.temperature);
      config.agent.grade_conditioned =
          agent.value("grade_conditioned", config.agent.grade_conditioned);
      config.agent.grade_grid_size =
          agent.value("grade_grid_size", config.agent.grade_grid_size);
      config.agent.grade_prior_sharpness = agent.value(
          "grade_prior_sharpness", config.agent.grade_prior_sharpness);
      config.agent.grade_prior_optimism = agent.value(
          "grade_prior_optimism", config.agent.grade_prior_optimism);
    }

    if (node.contains("metrics")) {
      const json& metrics = node["metrics"];
      config.metrics.window = metrics.value("window", config.metrics.window);
      config.metrics.thresholds.saturation = metrics.value(
          "saturation_threshold", config.metrics.thresholds.saturation);
      config.metrics.thresholds.divergence = metrics.value(
          "divergence_threshold", config.metrics.thresholds.divergence);
    }

    config.output_dir = node.value("output_dir", std::string("out"));
    config.plots = node.value("plots", config.plots);
  } catch (const json::exception& error) {
    throw UsageError(origin + ": " + error.what());
  }
  validate_config(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.string());
}

std::string serialize_config(const ExperimentConfig& config) {
  json families = json::array();
  for (const auto& family : config.families) {
    families.push_back(family_to_json(family));
  }
  json conditions = json::array();
  for (Condition condition : config.conditions) {
    conditions.push_back(to_string(condition));
  }
  json node;
  node["master_seed"] = config.master_seed;
  node["rounds_per_episode"] = config.rounds_per_episode;
  node["examples_per_dataset"] = config.examples_per_dataset;
  node["families"] = families;
  node["conditions"] = conditions;
  node["seeds"] = config.seeds;
  node["agent"] = json{
      {"adaptive", config.agent.optimizer.adaptive},
      {"learning_rate", config.agent.optimizer.learning_rate},
      {"weight_decay", config.agent.optimizer.weight_decay},
      {"clip_norm", config.agent.optimizer.clip_norm},
      {"beta1", config.agent.optimizer.beta1},
      {"beta2", config.agent.optimizer.beta2},
      {"epsilon", config.agent.optimizer.epsilon},
      {"baseline_alpha", config.agent.baseline_alpha},
      {"temperature", config.agent.temperature},
      {"grade_conditioned", config.agent.grade_conditioned},
      {"grade_grid_size", config.agent.grade_grid_size},
      {"grade_prior_sharpness", config.agent.grade_prior_sharpness},
      {"grade_prior_optimism", config.agent.grade_prior_optimism}};
  node["metrics"] = json{
      {"window", config.metrics.window},
      {"saturation_threshold", config.metrics.thresholds.saturation},
      {"divergence_threshold", config.metrics.thresholds.divergence}};
  node["output_dir"] = config.output_dir.string();
  node["plots"] = config.plots;
  return node.dump(2) + "\n";
}

std::uint64_t cell_stream_seed(std::uint64_t master_seed,
                               std::size_t family_index, std::uint64_t seed,
                               StreamPurpose purpose) {
  return mix_seed({master_seed, static_cast<std::uint64_t>(family_index), seed,
                   static_cast<std::uint64_t>(purpose)});
}

std::string cell_name(const ExperimentConfig& config, const Cell& cell) {
  return "f" + std::to_string(cell.family_index) + "_" +
         to_string(config.families[cell.family_index].kind) + "_" +
         to_string(cell.condition) + "_s" + std::to_string(cell.seed);
}

std::vector<RoundRecord> run_episode(const ExperimentConfig& config,
                                     const Cell& cell) {
  if (cell.family_index >= config.families.size()) {
    throw UsageError("run_episode: family index out of range");
  }
  const TaskFamily& family = config.families[cell.family_index];
  const GradeGrid grid = uniform_grade_grid(config.agent.grade_grid_size);

  const std::uint64_t dataset_seed = cell_stream_seed(
      config.master_seed, cell.family_index, cell.seed, StreamPurpose::dataset);
  const auto dataset =
      build_dataset(family, config.examples_per_dataset, dataset_seed);
  const auto context_golds = sample_context_golds(family, dataset_seed);

  const bool with_grade_head = cell.condition != Condition::control;
  PolicySnapshot policy = make_policy(
      family.context_count, family.answer_count, grid.values.size(),
      with_grade_head, config.agent.grade_conditioned, config.agent.temperature);
  apply_grade_prior(policy, family, grid, context_golds, config.agent);

  OptimizerState optimizer_state = make_optimizer_state(policy);
  BaselineState baseline;
  baseline.alpha = config.agent.baseline_alpha;

  RandomStream rollout(cell_stream_seed(config.master_seed, cell.family_index,
                                        cell.seed, StreamPurpose::rollout));

  std::vector<RoundRecord> records;
  records.reserve(config.rounds_per_episode);
  for (std::size_t round = 0; round < config.rounds_per_episode; ++round) {
    const TaskInstance& instance = dataset[round % dataset.size()];
    const SampledAction sampled =
        sample_action(policy, grid, instance.context_id, rollout);
    const StepOutcome outcome =
        step(family, instance, sampled.action, cell.condition, rollout);

    baseline = update_baseline(baseline, outcome.reward);
    const double advantage = compute_advantage(outcome.reward, baseline);

    RoundRecord record;
    record.round = round;
    record.condition = cell.condition;
    record.task_kind = family.kind;
    record.seed = cell.seed;
    record.instance_id = instance.instance_id;
    record.answer = sampled.action.answer;
    record.reward = outcome.reward;
    record.accuracy = outcome.accuracy;
    record.baseline = baseline.value;
    record.advantage = advantage;
    record.answer_entropy = sampled.answer_entropy;
    if (with_grade_head) {
      record.grade = outcome.grade;
      record.grade_entropy = sampled.grade_entropy;
    }

    try {
      const PolicyGradient gradient = policy_gradient(
          policy, instance.context_id, sampled.action, advantage);
      apply_update(policy, gradient, config.agent.optimizer, optimizer_state);
    } catch (const NumericalError&) {
      record.degenerate = true;
    }
    records.push_back(record);
  }
  return records;
}

bool sweep_failed(const SweepManifest& manifest) {
  return std::any_of(manifest.cells.begin(), manifest.cells.end(),
                     [](const CellStatus& status) { return !status.completed; });
}

SweepManifest run_sweep(const ExperimentConfig& config, std::size_t workers,
                        bool resume) {
  validate_config(config);
  std::filesystem::create_directories(config.output_dir / "logs");
  write_text_file(config.output_dir / "config.json", serialize_config(config));

  SweepManifest manifest;
  for (std::size_t f = 0; f < config.families.size(); ++f) {
    for (Condition condition : config.conditions) {
      for (std::uint64_t seed : config.seeds) {
        CellStatus status;
        status.cell = Cell{f, condition, seed};
        status.log_file =
            "logs/" + cell_name(config, status.cell) + ".jsonl";
        manifest.cells.push_back(std::move(status));
      }
    }
  }

  // Resume: trust the previous manifest for cells whose logs still exist.
  const auto manifest_path = config.output_dir / "manifest.json";
  if (resume && std::filesystem::exists(manifest_path)) {
    try {
      const json previous = json::parse(read_text_file(manifest_path));
      for (const auto& entry : previous.at("cells")) {
        if (!entry.value("completed", false)) continue;
        const Cell cell{entry.at("family_index").get<std::size_t>(),
                        condition_from_string(entry.at("condition").get<std::string>()),
                        entry.at("seed").get<std::uint64_t>()};
        for (auto& status : manifest.cells) {
          if (status.cell.family_index == cell.family_index &&
              status.cell.condition == cell.condition &&
              status.cell.seed == cell.seed &&
              std::filesystem::exists(config.output_dir / status.log_file)) {
            status.completed = true;
          }
        }
      }
    } catch (const json::exception& error) {
      throw UsageError(manifest_path.string() + ": " + error.what());
    }
  }

  std::mutex manifest_mutex;
  std::atomic<std::size_t> next_cell{0};
  std::atomic<std::size_t> executed{0};
  const auto persist_manifest = [&]() {
    write_text_file(manifest_path, manifest_to_json(config, manifest).dump(2) + "\n");
  };

  const std::size_t cell_count = manifest.cells.size();
  std::size_t pool_size = workers == 0
                              ? std::max<std::size_t>(
                                    1, std::thread::hardware_concurrency())
                              : workers;
  pool_size = std::min(pool_size, cell_count);

  const auto worker = [&]() {
    while (true) {
      const std::size_t index = next_cell.fetch_add(1);
      if (index >= cell_count) return;
      CellStatus* status = nullptr;
      {
        std::lock_guard lock(manifest_mutex);
        status = &manifest.cells[index];
        if (status->completed) continue;
      }
      std::string error;
      try {
        const auto records = run_episode(config, status->cell);
        write_records_jsonl(config.output_dir / status->log_file, records);
        executed.fetch_add(1);
      } catch (const std::exception& failure) {
        error = failure.what();
      }
      {
        std::lock_guard lock(manifest_mutex);
        status->completed = error.empty();
        status->error = error;
        persist_manifest();
      }
    }
  };

  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  manifest.executed = executed.load();
  persist_manifest();

  write_summaries(config, manifest);
  if (config.plots) {
    emit_figures(config.output_dir,
                 {FigureKind::learning_curves, FigureKind::inflation_bars,
                  FigureKind::reward_vs_accuracy},
                 config.metrics);
  }
  return manifest;
}

std::vector<CellSeries> load_sweep_cells(
    const std::filesystem::path& output_dir,
    std::vector<std::string>* warnings) {
  const auto manifest_path = output_dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    throw UsageError("no manifest found under '" + output_dir.string() + "'");
  }
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::exception& error) {
    throw UsageError(manifest_path.string() + ": " + error.what());
  }

  std::vector<CellSeries> cells;
  try {
    for (const auto& entry : manifest.at("cells")) {
      const std::string name = entry.at("family").get<std::string>() + "/" +
                               entry.at("condition").get<std::string>() +
                               "/seed " +
                               std::to_string(entry.at("seed").get<std::uint64_t>());
      if (!entry.value("completed", false)) {
        if (warnings) {
          warnings->push_back("cell " + name + " incomplete: " +
                              entry.value("error", std::string("not run")));
        }
        continue;
      }
      const auto log_path =
          output_dir / entry.at("log_file").get<std::string>();
      if (!std::filesystem::exists(log_path)) {
        if (warnings) {
          warnings->push_back("cell " + name + " log missing: " +
                              log_path.string());
        }
        continue;
      }
      CellSeries cell;
      cell.kind = task_kind_from_string(entry.at("family").get<std::string>());
      cell.condition =
          condition_from_string(entry.at("condition").get<std::string>());
      cell.seed = entry.at("seed").get<std::uint64_t>();
      cell.records = read_records_jsonl(log_path);
      cells.push_back(std::move(cell));
    }
  } catch (const json::exception& error) {
    throw UsageError(manifest_path.string() + ": " + error.what());
  }
  return cells;
}

CertifyResult certify_fixture(const PomdpFixture& fixture,
                              std::optional<double> discount_override,
                              double vi_tolerance,
                              double certificate_tolerance) {
  if (!fixture.dominance.has_value()) {
    throw UsageError("fixture has no dominance section to certify");
  }
  FinitePomdp pomdp = fixture.pomdp;
  if (discount_override.has_value()) {
    if (!(*discount_override >= 0.0 && *discount_override < 1.0)) {
      throw UsageError("discount override must lie in [0, 1)");
    }
    pomdp.discount = *discount_override;
  }

  CertifyResult result;
  result.report = check_assumption(pomdp, fixture.rewards, *fixture.dominance);
  if (!result.report.all_hold()) {
    result.pass = false;
    result.certificate_text = serialize_certificate(result.report, std::nullopt);
    return result;
  }
  ValueIterationOptions options;
  options.tolerance = vi_tolerance;
  const QTable qtable = q_value_iteration(pomdp, fixture.rewards, options);
  result.certificate = certify_dominance(qtable, *fixture.dominance,
                                         result.report, certificate_tolerance);
  result.pass = result.certificate->pass;
  result.certificate_text =
      serialize_certificate(result.report, result.certificate);
  return result;
}

FigureKind figure_kind_from_string(const std::string& name) {
  if (name == "learning_curves") return FigureKind::learning_curves;
  if (name == "inflation_bars") return FigureKind::inflation_bars;
  if (name == "reward_vs_accuracy") return FigureKind::reward_vs_accuracy;
  throw UsageError("unknown figure kind '" + name + "'");
}

MetricsConfig sweep_metrics_config(const std::filesystem::path& output_dir) {
  const auto config_path = output_dir / "config.json";
  if (!std::filesystem::exists(config_path)) return MetricsConfig{};
  return load_config(config_path).metrics;
}

std::vector<std::filesystem::path> emit_figures(
    const std::filesystem::path& output_dir,
    const std::vector<FigureKind>& kinds, const MetricsConfig& metrics) {
  std::vector<std::string> warnings;
  const std::vector<CellSeries> cells = load_sweep_cells(output_dir, &warnings);
  if (cells.empty()) {
    throw UsageError("sweep under '" + output_dir.string() +
                     "' has no completed cells to plot");
  }

  const auto plots_dir = output_dir / "plots";
  std::vector<std::filesystem::path> written;
  for (FigureKind kind : kinds) {
    switch (kind) {
      case FigureKind::learning_curves: {
        for (TaskKind task : {TaskKind::exact_binary, TaskKind::exact_multi,
                              TaskKind::graded_ambiguous}) {
          bool present = false;
          for (const auto& cell : cells) present = present || cell.kind == task;
          if (!present) continue;
          const LearningCurves curves =
              learning_curve_series(cells, task, kCurveSmoothingWindow);
          const auto path =
              plots_dir / ("learning_curves_" + to_string(task) + ".svg");
          write_text_file(
              path, render_learning_curves_svg(
                        curves, "learning curves: " + to_string(task)));
          written.push_back(path);
        }
        break;
      }
      case FigureKind::inflation_bars: {
        const InflationBars bars = inflation_bar_series(cells, metrics.window);
        const auto path = plots_dir / "inflation_bars.svg";
        write_text_file(path, render_inflation_bars_svg(
                                  bars, "grade inflation by condition and task"));
        written.push_back(path);
        break;
      }
      case FigureKind::reward_vs_accuracy: {
        const auto points = reward_accuracy_points(cells, metrics.window);
        const auto path = plots_dir / "reward_vs_accuracy.svg";
        write_text_file(path,
                        render_reward_accuracy_svg(
                            points, metrics.thresholds.divergence,
                            "final-window reward against accuracy"));
        written.push_back(path);
        break;
      }
    }
  }

  std::string report = "figure emission report\n";
  if (warnings.empty()) {
    report += "no gaps: every manifest cell contributed\n";
  } else {
    for (const auto& warning : warnings) report += "warning: " + warning + "\n";
  }
  write_text_file(plots_dir / "report.txt", report);
  return written;
}

}  // namespace wirehead
