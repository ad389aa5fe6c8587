#include "wirehead/plots.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "wirehead/errors.hpp"

namespace wirehead {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

const char* condition_color(Condition condition) {
  switch (condition) {
    case Condition::control: return "#1f77b4";
    case Condition::honest: return "#2ca02c";
    case Condition::selfgrade: return "#d62728";
  }
  return "#000000";
}

std::string fixed(double value, int digits = 2) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

// Means per round across the given per-seed series; rows may be ragged when a
// cell failed early, in which case each round averages the seeds that have it.
std::vector<double> mean_across(const std::vector<const std::vector<double>*>& rows) {
  std::size_t length = 0;
  for (const auto* row : rows) length = std::max(length, row->size());
  std::vector<double> mean(length, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto* row : rows) {
      if (t < row->size()) {
        sum += (*row)[t];
        ++count;
      }
    }
    mean[t] = count == 0 ? 0.0 : sum / static_cast<double>(count);
  }
  return mean;
}

struct Frame {
  double x0, x1, y0, y1;  // data ranges
  double map_x(double x) const {
    return kMarginLeft + (x - x0) / (x1 - x0) * (kWidth - kMarginLeft - kMarginRight);
  }
  double map_y(double y) const {
    return kHeight - kMarginBottom -
           (y - y0) / (y1 - y0) * (kHeight - kMarginTop - kMarginBottom);
  }
};

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& frame,
               const std::string& x_label, const std::string& y_label) {
  out << "<line x1=\"" << fixed(frame.map_x(frame.x0)) << "\" y1=\""
      << fixed(frame.map_y(frame.y0)) << "\" x2=\"" << fixed(frame.map_x(frame.x1))
      << "\" y2=\"" << fixed(frame.map_y(frame.y0))
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << fixed(frame.map_x(frame.x0)) << "\" y1=\""
      << fixed(frame.map_y(frame.y0)) << "\" x2=\"" << fixed(frame.map_x(frame.x0))
      << "\" y2=\"" << fixed(frame.map_y(frame.y1))
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << fixed((frame.map_x(frame.x0) + frame.map_x(frame.x1)) / 2)
      << "\" y=\"" << fixed(kHeight - 12) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"12\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\""
      << fixed((frame.map_y(frame.y0) + frame.map_y(frame.y1)) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 "
      << fixed((frame.map_y(frame.y0) + frame.map_y(frame.y1)) / 2) << ")\">"
      << y_label << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = frame.y0 + (frame.y1 - frame.y0) * i / 5.0;
    out << "<text x=\"" << fixed(frame.map_x(frame.x0) - 8) << "\" y=\""
        << fixed(frame.map_y(y) + 4) << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"10\">" << fixed(y)
        << "</text>\n";
  }
}

void polyline(std::ostringstream& out, const Frame& frame,
              const std::vector<double>& series, const char* color,
              bool dashed) {
  if (series.empty()) return;
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (dashed) out << " stroke-dasharray=\"5,4\"";
  out << " points=\"";
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (t > 0) out << " ";
    out << fixed(frame.map_x(static_cast<double>(t))) << ","
        << fixed(frame.map_y(series[t]));
  }
  out << "\"/>\n";
}

}  // namespace

LearningCurves learning_curve_series(const std::vector<CellSeries>& cells,
                                     TaskKind kind,
                                     std::size_t smoothing_window) {
  if (smoothing_window == 0) {
    throw UsageError("learning_curve_series: smoothing window must be >= 1");
  }
  LearningCurves curves;
  curves.smoothing_window = smoothing_window;
  for (Condition condition : {Condition::control, Condition::honest,
                              Condition::selfgrade}) {
    std::vector<std::vector<double>> reward_rows, accuracy_rows;
    for (const auto& cell : cells) {
      if (cell.kind != kind || cell.condition != condition) continue;
      std::vector<double> reward, accuracy;
      reward.reserve(cell.records.size());
      for (const auto& record : cell.records) {
        if (record.degenerate) continue;
        reward.push_back(record.reward);
        accuracy.push_back(record.accuracy);
      }
      reward_rows.push_back(std::move(reward));
      accuracy_rows.push_back(std::move(accuracy));
    }
    if (reward_rows.empty()) continue;
    std::vector<const std::vector<double>*> reward_ptrs, accuracy_ptrs;
    for (const auto& row : reward_rows) reward_ptrs.push_back(&row);
    for (const auto& row : accuracy_rows) accuracy_ptrs.push_back(&row);
    curves.conditions.push_back(condition);
    curves.reward.push_back(
        moving_average(mean_across(reward_ptrs), smoothing_window));
    curves.accuracy.push_back(
        moving_average(mean_across(accuracy_ptrs), smoothing_window));
  }
  return curves;
}

InflationBars inflation_bar_series(const std::vector<CellSeries>& cells,
                                   std::size_t window) {
  if (window == 0) throw UsageError("inflation_bar_series: window must be >= 1");
  InflationBars bars;
  bars.window = window;
  for (TaskKind kind : {TaskKind::exact_binary, TaskKind::exact_multi,
                        TaskKind::graded_ambiguous}) {
    bool kind_present = false;
    for (const auto& cell : cells) {
      if (cell.kind == kind) {
        kind_present = true;
        break;
      }
    }
    if (kind_present) bars.kinds.push_back(kind);
  }
  for (Condition condition : {Condition::honest, Condition::selfgrade}) {
    bool any = false;
    std::vector<double> row;
    for (TaskKind kind : bars.kinds) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& cell : cells) {
        if (cell.kind != kind || cell.condition != condition) continue;
        if (cell.records.empty()) continue;
        sum += grade_inflation(cell.records,
                               std::min(window, cell.records.size()));
        ++count;
      }
      row.push_back(count == 0 ? 0.0 : sum / static_cast<double>(count));
      any = any || count > 0;
    }
    if (any) {
      bars.conditions.push_back(condition);
      bars.inflation.push_back(std::move(row));
    }
  }
  return bars;
}

std::vector<ScatterPoint> reward_accuracy_points(
    const std::vector<CellSeries>& cells, std::size_t window) {
  if (window == 0) throw UsageError("reward_accuracy_points: window must be >= 1");
  std::vector<ScatterPoint> points;
  for (const auto& cell : cells) {
    if (cell.records.empty()) continue;
    const RunSummary summary =
        summarize_run(cell.records, window, ClassifyThresholds{});
    points.push_back(ScatterPoint{cell.kind, cell.condition, cell.seed,
                                  summary.mean_accuracy, summary.mean_reward});
  }
  return points;
}

std::string render_learning_curves_svg(const LearningCurves& curves,
                                       const std::string& title) {
  std::size_t rounds = 1;
  for (const auto& row : curves.reward) rounds = std::max(rounds, row.size());
  const Frame frame{0.0, static_cast<double>(rounds > 1 ? rounds - 1 : 1),
                    0.0, 1.0};
  std::ostringstream out;
  open_svg(out, title);
  draw_axes(out, frame, "round", "reward (solid) / accuracy (dashed)");
  for (std::size_t c = 0; c < curves.conditions.size(); ++c) {
    const char* color = condition_color(curves.conditions[c]);
    polyline(out, frame, curves.reward[c], color, false);
    polyline(out, frame, curves.accuracy[c], color, true);
    out << "<text x=\"" << fixed(kWidth - kMarginRight - 150)
        << "\" y=\"" << fixed(kMarginTop + 16.0 * static_cast<double>(c))
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
        << "\">" << to_string(curves.conditions[c]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_inflation_bars_svg(const InflationBars& bars,
                                      const std::string& title) {
  const Frame frame{0.0, 1.0, -1.0, 1.0};
  std::ostringstream out;
  open_svg(out, title);
  draw_axes(out, frame, "task family", "grade inflation");
  // Zero line.
  out << "<line x1=\"" << fixed(frame.map_x(0.0)) << "\" y1=\""
      << fixed(frame.map_y(0.0)) << "\" x2=\"" << fixed(frame.map_x(1.0))
      << "\" y2=\"" << fixed(frame.map_y(0.0))
      << "\" stroke=\"#888888\" stroke-width=\"0.5\"/>\n";
  const std::size_t kinds = bars.kinds.size();
  const std::size_t conditions = bars.conditions.size();
  if (kinds > 0 && conditions > 0) {
    const double group = 1.0 / static_cast<double>(kinds);
    const double bar = group / static_cast<double>(conditions + 1);
    for (std::size_t k = 0; k < kinds; ++k) {
      for (std::size_t c = 0; c < conditions; ++c) {
        const double x_left = static_cast<double>(k) * group +
                              bar * (0.5 + static_cast<double>(c));
        const double value = bars.inflation[c][k];
        const double y_top = frame.map_y(std::max(value, 0.0));
        const double height = std::abs(frame.map_y(value) - frame.map_y(0.0));
        out << "<rect x=\"" << fixed(frame.map_x(x_left)) << "\" y=\""
            << fixed(y_top) << "\" width=\""
            << fixed(bar * (kWidth - kMarginLeft - kMarginRight)) << "\" height=\""
            << fixed(height) << "\" fill=\""
            << condition_color(bars.conditions[c]) << "\"/>\n";
        out << "<text x=\"" << fixed(frame.map_x(x_left + bar / 2)) << "\" y=\""
            << fixed(y_top - 4) << "\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"10\">"
            << fixed(value, 3) << "</text>\n";
      }
      out << "<text x=\""
          << fixed(frame.map_x(static_cast<double>(k) * group + group / 2))
          << "\" y=\"" << fixed(kHeight - kMarginBottom + 16)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << to_string(bars.kinds[k]) << "</text>\n";
    }
    for (std::size_t c = 0; c < conditions; ++c) {
      out << "<text x=\"" << fixed(kWidth - kMarginRight - 150) << "\" y=\""
          << fixed(kMarginTop + 16.0 * static_cast<double>(c))
          << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
          << condition_color(bars.conditions[c]) << "\">"
          << to_string(bars.conditions[c]) << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_reward_accuracy_svg(const std::vector<ScatterPoint>& points,
                                       double divergence_threshold,
                                       const std::string& title) {
  const Frame frame{0.0, 1.0, 0.0, 1.0};
  std::ostringstream out;
  open_svg(out, title);
  // Wirehead region: reward - accuracy >= threshold, shaded above the offset
  // diagonal.
  out << "<polygon points=\""
      << fixed(frame.map_x(0.0)) << "," << fixed(frame.map_y(divergence_threshold))
      << " " << fixed(frame.map_x(1.0 - divergence_threshold)) << ","
      << fixed(frame.map_y(1.0)) << " " << fixed(frame.map_x(0.0)) << ","
      << fixed(frame.map_y(1.0)) << "\" fill=\"#f4cccc\"/>\n";
  draw_axes(out, frame, "final-window accuracy", "final-window reward");
  out << "<line x1=\"" << fixed(frame.map_x(0.0)) << "\" y1=\""
      << fixed(frame.map_y(0.0)) << "\" x2=\"" << fixed(frame.map_x(1.0))
      << "\" y2=\"" << fixed(frame.map_y(1.0))
      << "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"3,3\"/>\n";
  for (const auto& point : points) {
    out << "<circle cx=\"" << fixed(frame.map_x(point.accuracy)) << "\" cy=\""
        << fixed(frame.map_y(point.reward)) << "\" r=\"4\" fill=\""
        << condition_color(point.condition) << "\" fill-opacity=\"0.7\"/>\n";
  }
  for (std::size_t c = 0; c < 3; ++c) {
    const auto condition = static_cast<Condition>(c);
    out << "<text x=\"" << fixed(kMarginLeft + 10) << "\" y=\""
        << fixed(kMarginTop + 16.0 * static_cast<double>(c))
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << condition_color(condition) << "\">" << to_string(condition)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace wirehead
