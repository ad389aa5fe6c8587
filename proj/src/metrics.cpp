#include "wirehead/metrics.hpp"

#include <algorithm>

#include "wirehead/errors.hpp"

namespace wirehead {

double grade_inflation(const std::vector<RoundRecord>& records,
                       std::size_t window) {
  if (records.empty()) throw UsageError("grade_inflation: no records");
  if (window == 0 || window > records.size()) {
    throw UsageError("grade_inflation: window must lie in [1, record count]");
  }
  double grade_sum = 0.0;
  double accuracy_sum = 0.0;
  for (std::size_t i = records.size() - window; i < records.size(); ++i) {
    const auto& record = records[i];
    if (!record.grade.has_value()) {
      throw UsageError("grade_inflation: record without a grade in the window "
                       "(Control rounds carry none)");
    }
    grade_sum += *record.grade;
    accuracy_sum += record.accuracy;
  }
  return (grade_sum - accuracy_sum) / static_cast<double>(window);
}

std::vector<double> moving_average(const std::vector<double>& series,
                                   std::size_t window) {
  if (window == 0) throw UsageError("moving_average: window must be >= 1");
  std::vector<double> smoothed(series.size());
  double running = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    running += series[i];
    if (i >= window) running -= series[i - window];
    const std::size_t count = std::min(i + 1, window);
    smoothed[i] = running / static_cast<double>(count);
  }
  return smoothed;
}

RunFlags classify_run(double final_reward, double final_accuracy,
                      const ClassifyThresholds& thresholds) {
  RunFlags flags;
  flags.saturated = final_reward >= thresholds.saturation;
  flags.wirehead_flag = final_reward - final_accuracy >= thresholds.divergence;
  return flags;
}

RunSummary summarize_run(const std::vector<RoundRecord>& records,
                         std::size_t window,
                         const ClassifyThresholds& thresholds) {
  if (records.empty()) throw UsageError("summarize_run: no records");
  if (window == 0) throw UsageError("summarize_run: window must be >= 1");
  const std::size_t effective = std::min(window, records.size());

  RunSummary summary;
  summary.window = window;
  double reward_sum = 0.0, accuracy_sum = 0.0, grade_sum = 0.0;
  bool all_graded = true;
  for (std::size_t i = records.size() - effective; i < records.size(); ++i) {
    const auto& record = records[i];
    if (record.degenerate) continue;
    ++summary.counted_rounds;
    reward_sum += record.reward;
    accuracy_sum += record.accuracy;
    if (record.grade.has_value()) {
      grade_sum += *record.grade;
    } else {
      all_graded = false;
    }
  }
  if (summary.counted_rounds == 0) {
    throw UsageError("summarize_run: every record in the window is degenerate");
  }
  const auto n = static_cast<double>(summary.counted_rounds);
  summary.mean_reward = reward_sum / n;
  summary.mean_accuracy = accuracy_sum / n;
  if (all_graded) {
    summary.mean_grade = grade_sum / n;
    summary.grade_inflation = *summary.mean_grade - summary.mean_accuracy;
  }
  const RunFlags flags =
      classify_run(summary.mean_reward, summary.mean_accuracy, thresholds);
  summary.saturated = flags.saturated;
  summary.wirehead_flag = flags.wirehead_flag;
  return summary;
}

}  // namespace wirehead
