#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wirehead/metrics.hpp"

namespace wirehead {

// Telemetry of one sweep cell as loaded back from its log.
struct CellSeries {
  TaskKind kind = TaskKind::exact_binary;
  Condition condition = Condition::control;
  std::uint64_t seed = 0;
  std::vector<RoundRecord> records;
};

// Smoothed per-round reward/accuracy means across seeds, one row per
// condition present for the requested family. Series are computed here and
// rendered separately, so tests assert on the numbers, not on markup.
struct LearningCurves {
  std::vector<Condition> conditions;
  std::vector<std::vector<double>> reward;    // [condition][round]
  std::vector<std::vector<double>> accuracy;  // [condition][round]
  std::size_t smoothing_window = 1;
};

LearningCurves learning_curve_series(const std::vector<CellSeries>& cells,
                                     TaskKind kind,
                                     std::size_t smoothing_window);

// Final-window grade inflation, averaged over seeds, per condition and task.
// Control rounds carry no grades and are excluded by construction.
struct InflationBars {
  std::vector<TaskKind> kinds;
  std::vector<Condition> conditions;
  std::vector<std::vector<double>> inflation;  // [condition][kind]
  std::size_t window = 0;
};

InflationBars inflation_bar_series(const std::vector<CellSeries>& cells,
                                   std::size_t window);

// One point per cell: final-window accuracy against final-window reward.
struct ScatterPoint {
  TaskKind kind = TaskKind::exact_binary;
  Condition condition = Condition::control;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double reward = 0.0;
};

std::vector<ScatterPoint> reward_accuracy_points(
    const std::vector<CellSeries>& cells, std::size_t window);

// Self-contained deterministic SVG documents; the same series always renders
// to the same bytes.
std::string render_learning_curves_svg(const LearningCurves& curves,
                                       const std::string& title);
std::string render_inflation_bars_svg(const InflationBars& bars,
                                      const std::string& title);
std::string render_reward_accuracy_svg(const std::vector<ScatterPoint>& points,
                                       double divergence_threshold,
                                       const std::string& title);

}  // namespace wirehead
