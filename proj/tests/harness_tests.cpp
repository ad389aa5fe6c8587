#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "wirehead/errors.hpp"
#include "wirehead/harness.hpp"
#include "wirehead/io.hpp"

using namespace wirehead;

namespace {

const std::filesystem::path kSourceDir{WIREHEAD_SOURCE_DIR};

std::filesystem::path fresh_scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   "wirehead_harness_test_artifacts" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

ExperimentConfig small_config(const std::filesystem::path& out) {
  ExperimentConfig config = default_config();
  config.families = {default_family(TaskKind::graded_ambiguous)};
  config.seeds = {0, 1};
  config.rounds_per_episode = 120;
  config.examples_per_dataset = 20;
  config.metrics.window = 30;
  config.plots = false;
  config.output_dir = out;
  return config;
}

std::string episode_bytes(const ExperimentConfig& config, const Cell& cell) {
  std::string bytes;
  for (const auto& record : run_episode(config, cell)) {
    bytes += round_record_to_line(record) + "\n";
  }
  return bytes;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("experiment configs serialize, parse, and validate") {
  SUBCASE("the default config round trips byte for byte") {
    const ExperimentConfig config = default_config();
    validate_config(config);
    const std::string serialized = serialize_config(config);
    const ExperimentConfig parsed = parse_config(serialized, "round_trip");
    CHECK(serialize_config(parsed) == serialized);
  }
  SUBCASE("an empty object falls back to the shipped sets") {
    const ExperimentConfig parsed = parse_config("{}", "empty");
    CHECK(parsed.families.size() == 3);
    CHECK(parsed.conditions.size() == 3);
    CHECK(parsed.seeds == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
    CHECK_FALSE(parsed.agent.optimizer.adaptive);
    CHECK(parsed.agent.optimizer.learning_rate == 0.05);
  }
  SUBCASE("unset learning rate defaults by optimizer kind") {
    const ExperimentConfig adaptive =
        parse_config(R"({"agent": {"adaptive": true}})", "cfg");
    CHECK(adaptive.agent.optimizer.learning_rate == 0.01);
    const ExperimentConfig plain =
        parse_config(R"({"agent": {"adaptive": false}})", "cfg");
    CHECK(plain.agent.optimizer.learning_rate == 0.05);
  }
  SUBCASE("violated invariants are rejected") {
    ExperimentConfig config = default_config();
    config.seeds = {0, 0};
    CHECK_THROWS_AS(validate_config(config), UsageError);
    config = default_config();
    config.conditions = {Condition::honest, Condition::honest};
    CHECK_THROWS_AS(validate_config(config), UsageError);
    config = default_config();
    config.families.clear();
    CHECK_THROWS_AS(validate_config(config), UsageError);
    config = default_config();
    config.rounds_per_episode = 0;
    CHECK_THROWS_AS(validate_config(config), UsageError);
    config = default_config();
    config.metrics.window = 0;
    CHECK_THROWS_AS(validate_config(config), UsageError);
    config = default_config();
    config.agent.temperature = 0.0;
    CHECK_THROWS_AS(validate_config(config), UsageError);
    config = default_config();
    config.agent.grade_grid_size = 1;
    CHECK_THROWS_AS(validate_config(config), UsageError);
    CHECK_THROWS_AS(parse_config("{not json", "cfg"), UsageError);
  }
}

TEST_CASE("the shipped default config file matches the built-in defaults") {
  CHECK(read_text_file(kSourceDir / "configs" / "default.json") ==
        serialize_config(default_config()));
}

TEST_CASE("cell stream seeds split by family, seed, and purpose only") {
  const std::uint64_t dataset =
      cell_stream_seed(0, 0, 0, StreamPurpose::dataset);
  CHECK(dataset != cell_stream_seed(0, 0, 0, StreamPurpose::rollout));
  CHECK(dataset != cell_stream_seed(0, 1, 0, StreamPurpose::dataset));
  CHECK(dataset != cell_stream_seed(0, 0, 1, StreamPurpose::dataset));
  CHECK(dataset != cell_stream_seed(1, 0, 0, StreamPurpose::dataset));

  const ExperimentConfig config = default_config();
  CHECK(cell_name(config, Cell{0, Condition::control, 0}) ==
        "f0_exact_binary_control_s0");
  CHECK(cell_name(config, Cell{2, Condition::selfgrade, 4}) ==
        "f2_graded_ambiguous_selfgrade_s4");
}

TEST_CASE("episodes are deterministic and wire rewards per condition") {
  const ExperimentConfig config = small_config("unused");
  SUBCASE("same cell, same bytes") {
    const Cell cell{0, Condition::selfgrade, 1};
    CHECK(episode_bytes(config, cell) == episode_bytes(config, cell));
  }
  SUBCASE("control pays the ground truth and carries no grade") {
    for (const auto& record : run_episode(config, Cell{0, Condition::control, 0})) {
      CHECK(record.reward == record.accuracy);
      CHECK_FALSE(record.grade.has_value());
      CHECK_FALSE(record.grade_entropy.has_value());
    }
  }
  SUBCASE("honest grades but still pays the ground truth") {
    for (const auto& record : run_episode(config, Cell{0, Condition::honest, 0})) {
      CHECK(record.reward == record.accuracy);
      REQUIRE(record.grade.has_value());
    }
  }
  SUBCASE("selfgrade pays the emitted grade") {
    for (const auto& record :
         run_episode(config, Cell{0, Condition::selfgrade, 0})) {
      REQUIRE(record.grade.has_value());
      CHECK(record.reward == *record.grade);
    }
  }
  SUBCASE("records are stamped with their cell") {
    const auto records = run_episode(config, Cell{0, Condition::honest, 1});
    REQUIRE(records.size() == config.rounds_per_episode);
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(records[i].round == i);
      CHECK(records[i].seed == 1);
      CHECK(records[i].condition == Condition::honest);
      CHECK(records[i].task_kind == TaskKind::graded_ambiguous);
    }
  }
  SUBCASE("out-of-range family index is rejected") {
    CHECK_THROWS_AS(run_episode(config, Cell{5, Condition::control, 0}),
                    UsageError);
  }
}

TEST_CASE("seed-matched conditions differ only in reward wiring at round one") {
  const ExperimentConfig config = small_config("unused");
  const auto control = run_episode(config, Cell{0, Condition::control, 2});
  const auto honest = run_episode(config, Cell{0, Condition::honest, 2});
  const auto selfgrade = run_episode(config, Cell{0, Condition::selfgrade, 2});

  const RoundRecord& h = honest.front();
  const RoundRecord& s = selfgrade.front();
  CHECK(control.front().instance_id == h.instance_id);
  CHECK(control.front().answer == h.answer);
  CHECK(h.instance_id == s.instance_id);
  CHECK(h.answer == s.answer);
  CHECK(h.accuracy == s.accuracy);
  REQUIRE(h.grade.has_value());
  REQUIRE(s.grade.has_value());
  CHECK(*h.grade == *s.grade);
  CHECK(h.answer_entropy == s.answer_entropy);
  CHECK(*h.grade_entropy == *s.grade_entropy);
  // Reward wiring is the only difference: each pays its own signal, and the
  // first baseline update zeroes both advantages.
  CHECK(h.reward == h.accuracy);
  CHECK(s.reward == *s.grade);
  CHECK(h.advantage == 0.0);
  CHECK(s.advantage == 0.0);
  CHECK(h.baseline == h.reward);
  CHECK(s.baseline == s.reward);

  // The shared dataset stream keeps instance schedules identical throughout.
  for (std::size_t i = 0; i < honest.size(); ++i) {
    CHECK(honest[i].instance_id == selfgrade[i].instance_id);
    CHECK(honest[i].instance_id == control[i].instance_id);
  }
}

TEST_CASE("sweeps write logs, tables, figures, and resume cleanly") {
  const auto out = fresh_scratch_dir("sweep");
  ExperimentConfig config = small_config(out);
  config.plots = true;

  const SweepManifest manifest = run_sweep(config, 2, false);
  CHECK(manifest.executed == 6);
  CHECK_FALSE(sweep_failed(manifest));
  REQUIRE(manifest.cells.size() == 6);
  for (const auto& status : manifest.cells) {
    CHECK(status.completed);
    CHECK(status.error.empty());
    CHECK(std::filesystem::exists(out / status.log_file));
  }
  CHECK(std::filesystem::exists(out / "config.json"));
  CHECK(std::filesystem::exists(out / "manifest.json"));
  CHECK(count_lines(read_text_file(out / "cell_summaries.csv")) == 7);
  CHECK(count_lines(read_text_file(out / "inflation_matrix.csv")) == 4);
  CHECK(std::filesystem::exists(out / "plots" / "inflation_bars.svg"));
  CHECK(std::filesystem::exists(out / "plots" /
                                "learning_curves_graded_ambiguous.svg"));
  CHECK(std::filesystem::exists(out / "plots" / "reward_vs_accuracy.svg"));
  const std::string report = read_text_file(out / "plots" / "report.txt");
  CHECK(report.find("no gaps") != std::string::npos);

  SUBCASE("resume re-executes nothing") {
    const SweepManifest resumed = run_sweep(config, 2, true);
    CHECK(resumed.executed == 0);
    CHECK_FALSE(sweep_failed(resumed));
    CHECK(resumed.cells.size() == 6);
  }
  SUBCASE("loaded cells expose the full telemetry") {
    std::vector<std::string> warnings;
    const auto cells = load_sweep_cells(out, &warnings);
    CHECK(warnings.empty());
    REQUIRE(cells.size() == 6);
    for (const auto& cell : cells) {
      CHECK(cell.records.size() == config.rounds_per_episode);
    }
    // Control cells sit on the reward = accuracy diagonal.
    std::size_t control_points = 0;
    for (const auto& point :
         reward_accuracy_points(cells, config.metrics.window)) {
      if (point.condition == Condition::control) {
        ++control_points;
        CHECK(std::abs(point.reward - point.accuracy) <= 1e-9);
      }
    }
    CHECK(control_points == 2);
    const LearningCurves curves =
        learning_curve_series(cells, TaskKind::graded_ambiguous, 20);
    REQUIRE(curves.conditions.size() == 3);
    for (const auto& row : curves.reward) {
      CHECK(row.size() == config.rounds_per_episode);
    }
  }
  SUBCASE("figures are pure functions of the logs") {
    const auto before = read_text_file(out / "plots" / "inflation_bars.svg");
    emit_figures(out, {FigureKind::inflation_bars}, config.metrics);
    CHECK(read_text_file(out / "plots" / "inflation_bars.svg") == before);
  }
  SUBCASE("plotting an empty sweep directory fails loudly") {
    CHECK_THROWS_AS(emit_figures(fresh_scratch_dir("no_sweep"),
                                 {FigureKind::inflation_bars}, config.metrics),
                    UsageError);
  }
}

TEST_CASE("certify_fixture gates on the assumption and certifies the chain") {
  const PomdpFixture fixture =
      load_pomdp_fixture(kSourceDir / "fixtures" / "chain3_dominance.json");
  SUBCASE("the shipped chain certifies at its native discount") {
    const CertifyResult result = certify_fixture(fixture, std::nullopt);
    CHECK(result.pass);
    CHECK(result.report.all_hold());
    REQUIRE(result.certificate.has_value());
    CHECK(result.certificate->minimal_gap == doctest::Approx(0.35).epsilon(1e-9));
    CHECK(result.certificate->required_gap == doctest::Approx(0.3));
    CHECK(result.certificate_text.find("\"pass\": true") != std::string::npos);
  }
  SUBCASE("a discount override reruns the analysis myopically") {
    const CertifyResult result = certify_fixture(fixture, 0.0);
    CHECK(result.pass);
    REQUIRE(result.certificate.has_value());
    // One-step gaps are 1 - E[observed reward at the arrival state]: the
    // cycle start arrives at the richest kernel, 1 - 0.65.
    CHECK(result.certificate->minimal_gap == doctest::Approx(0.35).epsilon(1e-9));
    CHECK(result.certificate->witness_state == 0);
  }
  SUBCASE("invalid overrides and undominated fixtures are rejected") {
    CHECK_THROWS_AS(certify_fixture(fixture, 1.0), UsageError);
    const PomdpFixture plain =
        load_pomdp_fixture(kSourceDir / "fixtures" / "chain3.json");
    CHECK_THROWS_AS(certify_fixture(plain, std::nullopt), UsageError);
  }
  SUBCASE("a violated ceiling yields a gated failing result") {
    PomdpFixture broken = fixture;
    broken.dominance->r_task = 0.0;  // task actions pay up to 0.65
    const CertifyResult result = certify_fixture(broken, std::nullopt);
    CHECK_FALSE(result.pass);
    CHECK_FALSE(result.certificate.has_value());
    CHECK_FALSE(result.report.task_limit.holds);
    CHECK(result.certificate_text.find("assumption not met") !=
          std::string::npos);
  }
}

TEST_CASE("figure kinds parse by name") {
  CHECK(figure_kind_from_string("learning_curves") ==
        FigureKind::learning_curves);
  CHECK(figure_kind_from_string("inflation_bars") == FigureKind::inflation_bars);
  CHECK(figure_kind_from_string("reward_vs_accuracy") ==
        FigureKind::reward_vs_accuracy);
  CHECK_THROWS_AS(figure_kind_from_string("pie_chart"), UsageError);
}
