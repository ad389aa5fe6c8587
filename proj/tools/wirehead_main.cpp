#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wirehead/errors.hpp"
#include "wirehead/harness.hpp"
#include "wirehead/io.hpp"

namespace {

using namespace wirehead;

ExperimentConfig config_or_default(const std::string& config_path) {
  return config_path.empty() ? default_config() : load_config(config_path);
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            bool master_seed_set, std::uint64_t master_seed,
            std::size_t workers, bool resume) {
  ExperimentConfig config = config_or_default(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (master_seed_set) config.master_seed = master_seed;

  const SweepManifest manifest = run_sweep(config, workers, resume);
  std::cout << "cells: " << manifest.cells.size() << ", executed now: "
            << manifest.executed << "\n";
  for (const auto& status : manifest.cells) {
    if (!status.completed) {
      std::cout << "failed: " << cell_name(config, status.cell) << ": "
                << status.error << "\n";
    }
  }
  if (sweep_failed(manifest)) return 1;
  std::cout << "artifacts under " << config.output_dir.string() << "\n";
  return 0;
}

int cmd_episode(const std::string& config_path, std::size_t family_index,
                const std::string& condition_name, std::uint64_t seed,
                const std::string& out_path) {
  const ExperimentConfig config = config_or_default(config_path);
  const Cell cell{family_index, condition_from_string(condition_name), seed};
  const auto records = run_episode(config, cell);

  std::string text;
  for (const auto& record : records) {
    text += round_record_to_line(record);
    text += '\n';
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
    const RunSummary summary =
        summarize_run(records, config.metrics.window, config.metrics.thresholds);
    std::cout << "wrote " << out_path << " (" << records.size()
              << " rounds; final-window reward " << summary.mean_reward
              << ", accuracy " << summary.mean_accuracy << ")\n";
  }
  return 0;
}

int cmd_certify(const std::filesystem::path& fixture_path,
                std::optional<double> discount_override,
                std::string out_path) {
  const PomdpFixture fixture = load_pomdp_fixture(fixture_path);
  const CertifyResult result = certify_fixture(fixture, discount_override);

  if (out_path.empty()) {
    out_path = (fixture_path.parent_path() /
                (fixture_path.stem().string() + "_certificate.json"))
                   .string();
  }
  write_text_file(out_path, result.certificate_text);

  if (!result.report.all_hold()) {
    std::cout << "assumption not met:";
    if (!result.report.manipulation.holds) std::cout << " manipulation";
    if (!result.report.task_limit.holds) std::cout << " task-limit";
    if (!result.report.availability.holds) std::cout << " availability";
    std::cout << "\n";
  } else {
    const DominanceCertificate& cert = *result.certificate;
    std::cout << (cert.pass ? "PASS" : "FAIL") << ": minimal gap "
              << cert.minimal_gap << ", required gap " << cert.required_gap
              << ", slack " << cert.slack << ", wirehead value error "
              << cert.wirehead_value_error << "\n";
  }
  std::cout << "certificate: " << out_path << "\n";
  return result.pass ? 0 : 1;
}

int cmd_plot(const std::filesystem::path& sweep_dir,
             const std::vector<std::string>& kind_names) {
  std::vector<FigureKind> kinds;
  if (kind_names.empty()) {
    kinds = {FigureKind::learning_curves, FigureKind::inflation_bars,
             FigureKind::reward_vs_accuracy};
  } else {
    for (const auto& name : kind_names) {
      kinds.push_back(figure_kind_from_string(name));
    }
  }
  const MetricsConfig metrics = sweep_metrics_config(sweep_dir);
  const auto written = emit_figures(sweep_dir, kinds, metrics);
  for (const auto& path : written) {
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

int cmd_export(const std::string& kind_name, const CLI::Option* answer_opt,
               std::size_t answer_count, const CLI::Option* ambiguity_opt,
               double ambiguity, const CLI::Option* ceiling_opt,
               double ceiling, const CLI::Option* context_opt,
               std::size_t context_count, std::size_t grid_size,
               double discount, std::size_t gold, bool strict,
               const std::string& out_path) {
  const TaskKind kind = task_kind_from_string(kind_name);
  const TaskFamily defaults = default_family(kind);
  const TaskFamily family = make_family(
      kind, answer_opt->count() ? answer_count : defaults.answer_count,
      ambiguity_opt->count() ? ambiguity : defaults.ambiguity,
      ceiling_opt->count() ? ceiling : defaults.score_ceiling,
      context_opt->count() ? context_count : defaults.context_count);
  if (gold >= family.answer_count) {
    throw UsageError("gold answer index " + std::to_string(gold) +
                     " out of range for " + std::to_string(family.answer_count) +
                     " answers");
  }

  TaskInstance instance;
  instance.gold = gold;
  const PomdpExport exported =
      to_pomdp(family, grid_size, instance, discount, strict);
  const PomdpFixture fixture{exported.pomdp, exported.rewards, exported.spec};
  const std::string text = serialize_pomdp_fixture(fixture);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Wireheading testbed: dominance certification for observation-based "
      "rewards and self-grading reinforcement experiments"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  std::uint64_t run_master_seed = 0;
  std::size_t run_workers = 0;
  bool run_resume = false;
  auto* run_cmd = app.add_subcommand("run", "Run the full sweep from a config");
  run_cmd->add_option("--config", run_config,
                      "Config file (defaults to the built-in setup)");
  run_cmd->add_option("--out", run_out, "Output directory override");
  auto* run_seed_opt =
      run_cmd->add_option("--master-seed", run_master_seed, "Master seed override");
  run_cmd->add_option("--workers", run_workers,
                      "Worker pool size (0 = hardware concurrency)");
  run_cmd->add_flag("--resume", run_resume,
                    "Skip cells already completed in the existing manifest");

  std::string ep_config, ep_condition = "control", ep_out;
  std::size_t ep_family_index = 0;
  std::uint64_t ep_seed = 0;
  auto* ep_cmd = app.add_subcommand("episode", "Run one (family, condition, seed) cell");
  ep_cmd->add_option("--config", ep_config,
                     "Config file (defaults to the built-in setup)");
  ep_cmd->add_option("--family-index", ep_family_index,
                     "Index into the config's family list");
  ep_cmd->add_option("--condition", ep_condition,
                     "control, honest, or selfgrade");
  ep_cmd->add_option("--seed", ep_seed, "Cell seed");
  ep_cmd->add_option("--out", ep_out,
                     "Round-log path (stdout when omitted)");

  std::string cert_fixture, cert_out;
  double cert_gamma = 0.0;
  auto* cert_cmd =
      app.add_subcommand("certify", "Certify the dominance gap of a fixture");
  cert_cmd->add_option("fixture", cert_fixture, "Fixture file")->required();
  auto* cert_gamma_opt =
      cert_cmd->add_option("--gamma", cert_gamma, "Discount override");
  cert_cmd->add_option("--out", cert_out,
                       "Certificate path (defaults next to the fixture)");

  std::string plot_dir;
  std::vector<std::string> plot_kinds;
  auto* plot_cmd = app.add_subcommand("plot", "Render figures from sweep logs");
  plot_cmd->add_option("sweep-dir", plot_dir, "Sweep output directory")->required();
  plot_cmd->add_option(
      "kinds", plot_kinds,
      "learning_curves, inflation_bars, reward_vs_accuracy (default: all)");

  std::string ex_kind, ex_out;
  std::size_t ex_answers = 0, ex_contexts = 0, ex_grid = 11, ex_gold = 0;
  double ex_ambiguity = 0.0, ex_ceiling = 1.0, ex_discount = 0.9;
  bool ex_strict = true;
  auto* ex_cmd = app.add_subcommand(
      "export-pomdp", "Lower a task family to a certifiable fixture");
  ex_cmd->add_option("--kind", ex_kind,
                     "exact_binary, exact_multi, or graded_ambiguous")
      ->required();
  auto* ex_answers_opt =
      ex_cmd->add_option("--answer-count", ex_answers, "Answers per instance");
  auto* ex_ambiguity_opt =
      ex_cmd->add_option("--ambiguity", ex_ambiguity, "Noise half-width");
  auto* ex_ceiling_opt =
      ex_cmd->add_option("--ceiling", ex_ceiling, "Best ground-truth score");
  auto* ex_contexts_opt =
      ex_cmd->add_option("--context-count", ex_contexts, "Context count");
  ex_cmd->add_option("--grid-size", ex_grid, "Grade grid size");
  ex_cmd->add_option("--discount", ex_discount, "Fixture discount");
  ex_cmd->add_option("--gold", ex_gold, "Gold answer index");
  ex_cmd->add_flag("--strict,!--no-strict", ex_strict,
                   "Drop task actions whose honest grade is 1.0");
  ex_cmd->add_option("--out", ex_out, "Fixture path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      return cmd_run(run_config, run_out, run_seed_opt->count() > 0,
                     run_master_seed, run_workers, run_resume);
    }
    if (ep_cmd->parsed()) {
      return cmd_episode(ep_config, ep_family_index, ep_condition, ep_seed,
                         ep_out);
    }
    if (cert_cmd->parsed()) {
      std::optional<double> gamma;
      if (cert_gamma_opt->count() > 0) gamma = cert_gamma;
      return cmd_certify(cert_fixture, gamma, cert_out);
    }
    if (plot_cmd->parsed()) return cmd_plot(plot_dir, plot_kinds);
    if (ex_cmd->parsed()) {
      return cmd_export(ex_kind, ex_answers_opt, ex_answers, ex_ambiguity_opt,
                        ex_ambiguity, ex_ceiling_opt, ex_ceiling,
                        ex_contexts_opt, ex_contexts, ex_grid, ex_discount,
                        ex_gold, ex_strict, ex_out);
    }
  } catch (const UsageError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 2;
}
