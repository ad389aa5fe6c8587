#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wirehead/io.hpp"
#include "wirehead/metrics.hpp"
#include "wirehead/plots.hpp"
#include "wirehead/reinforce.hpp"
#include "wirehead/selfgrade.hpp"

namespace wirehead {

struct AgentConfig {
  OptimizerConfig optimizer;
  double baseline_alpha = 0.9;
  double temperature = 1.0;
  // Grade head conditioned on (context, sampled answer); the unconditioned
  // ablation keeps one grade row per context.
  bool grade_conditioned = true;
  std::size_t grade_grid_size = 11;
  // Grade-head initialization: rows start at
  //   -sharpness * (1 - ambiguity) * |grid - h'|,
  //   h' = (1 - optimism * ambiguity) * h + optimism * ambiguity,
  // where h is the answer's noiseless ground-truth score. The tabular
  // analogue of a pretrained grading prior: exact tasks get a sharp honest
  // prior, ambiguous tasks a flatter and more optimistic one.
  double grade_prior_sharpness = 6.0;
  double grade_prior_optimism = 0.8;
};

struct MetricsConfig {
  std::size_t window = 50;
  ClassifyThresholds thresholds;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 0;
  std::size_t rounds_per_episode = 500;
  std::size_t examples_per_dataset = 100;
  std::vector<TaskFamily> families;
  std::vector<Condition> conditions;
  std::vector<std::uint64_t> seeds;
  AgentConfig agent;
  MetricsConfig metrics;
  std::filesystem::path output_dir = "out";
  bool plots = true;
};

// The shipped reproduction setup: all three families and conditions, seeds
// 0..4, 500 rounds over 100 examples, adaptive optimizer at learning rate 0.2.
ExperimentConfig default_config();

// Throws UsageError on violated invariants (empty seeds/conditions/families,
// zero rounds, duplicate cells).
void validate_config(const ExperimentConfig& config);

// JSON with per-field defaults; unset learning_rate defaults to 0.05 plain /
// 0.01 adaptive. Schema in docs/formats.md.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

struct Cell {
  std::size_t family_index = 0;
  Condition condition = Condition::control;
  std::uint64_t seed = 0;
};

// Stream roles within a cell.
enum class StreamPurpose : std::uint64_t { dataset = 1, rollout = 2 };

// Per-cell stream seeds are derived from (master seed, family index, seed,
// purpose) only. The condition is deliberately not mixed in: seed-matched
// cells across conditions share their dataset and sampling streams, so reward
// wiring is the only difference between Honest and Selfgrade runs.
std::uint64_t cell_stream_seed(std::uint64_t master_seed,
                               std::size_t family_index, std::uint64_t seed,
                               StreamPurpose purpose);

// Stable cell identifier used in filenames and tables.
std::string cell_name(const ExperimentConfig& config, const Cell& cell);

// One full training episode, deterministic given (config, cell). Rounds whose
// update hits non-finite values are recorded as degenerate and skipped by
// summaries; the run continues.
std::vector<RoundRecord> run_episode(const ExperimentConfig& config,
                                     const Cell& cell);

struct CellStatus {
  Cell cell;
  std::string log_file;  // relative to output_dir
  bool completed = false;
  std::string error;     // nonempty when the cell failed
};

struct SweepManifest {
  std::vector<CellStatus> cells;
  // Cells actually executed by this invocation (resume skips completed ones).
  std::size_t executed = 0;
};

bool sweep_failed(const SweepManifest& manifest);

// Runs every (family, condition, seed) cell on a bounded worker pool, writes
// per-cell logs, the manifest, summary tables, and (per config) figures under
// config.output_dir. With resume, cells already completed in an existing
// manifest are not re-executed.
SweepManifest run_sweep(const ExperimentConfig& config, std::size_t workers,
                        bool resume);

// Loads completed cells' logs back; `warnings` (when given) collects one line
// per missing or failed cell.
std::vector<CellSeries> load_sweep_cells(
    const std::filesystem::path& output_dir,
    std::vector<std::string>* warnings = nullptr);

struct CertifyResult {
  AssumptionReport report;
  std::optional<DominanceCertificate> certificate;  // absent when gated
  bool pass = false;
  std::string certificate_text;
};

// check_assumption, then (when it holds) value iteration and the dominance
// certificate. A failed assumption yields pass = false with no certificate.
CertifyResult certify_fixture(const PomdpFixture& fixture,
                              std::optional<double> discount_override,
                              double vi_tolerance = 1e-12,
                              double certificate_tolerance = 1e-9);

enum class FigureKind { learning_curves, inflation_bars, reward_vs_accuracy };
FigureKind figure_kind_from_string(const std::string& name);

// Renders the requested figures from the logs under output_dir into
// output_dir/plots, plus a report listing any gaps. Figures are pure
// functions of the logs: regenerating them changes no bytes. Throws
// UsageError when the sweep directory has no completed cells.
std::vector<std::filesystem::path> emit_figures(
    const std::filesystem::path& output_dir,
    const std::vector<FigureKind>& kinds, const MetricsConfig& metrics);

// Metrics settings recorded in the sweep's resolved config, for tools that
// only have the output directory; defaults when the file is absent.
MetricsConfig sweep_metrics_config(const std::filesystem::path& output_dir);

}  // namespace wirehead
