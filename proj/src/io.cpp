#include "wirehead/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wirehead/errors.hpp"

namespace wirehead {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& error) {
    throw UsageError(origin + ": " + error.what());
  }
}

// Field accessor that converts library exceptions into diagnostics naming
// the origin and field path.
template <typename T>
T field(const json& node, const std::string& origin, const std::string& path) {
  const json* cursor = &node;
  std::istringstream segments(path);
  std::string segment;
  while (std::getline(segments, segment, '.')) {
    if (!cursor->is_object() || !cursor->contains(segment)) {
      throw UsageError(origin + ": missing field '" + path + "'");
    }
    cursor = &(*cursor)[segment];
  }
  try {
    return cursor->get<T>();
  } catch (const json::exception& error) {
    throw UsageError(origin + ": field '" + path + "': " + error.what());
  }
}

json policy_to_json(const PolicySnapshot& policy) {
  json node;
  node["answer_logits"] = policy.answer_logits;
  node["grade_logits"] = policy.grade_logits;
  node["grade_conditioned"] = policy.grade_conditioned;
  node["answer_count"] = policy.answer_count;
  node["temperature"] = policy.temperature;
  return node;
}

PolicySnapshot policy_from_json(const json& node, const std::string& origin) {
  PolicySnapshot policy;
  policy.answer_logits =
      field<std::vector<std::vector<double>>>(node, origin, "answer_logits");
  policy.grade_logits =
      field<std::vector<std::vector<double>>>(node, origin, "grade_logits");
  policy.grade_conditioned = field<bool>(node, origin, "grade_conditioned");
  policy.answer_count = field<std::size_t>(node, origin, "answer_count");
  policy.temperature = field<double>(node, origin, "temperature");
  return policy;
}

json witness_to_json(const ConditionWitness& witness) {
  return json{{"holds", witness.holds},
              {"state", witness.state},
              {"action", witness.action},
              {"value", witness.value}};
}

}  // namespace

PomdpFixture parse_pomdp_fixture(const std::string& text,
                                 const std::string& origin) {
  const json node = parse_json(text, origin);
  const auto states = field<std::size_t>(node, origin, "states");
  const auto actions = field<std::size_t>(node, origin, "actions");
  const auto observations = field<std::size_t>(node, origin, "observations");
  auto transition = field<std::vector<std::vector<std::vector<double>>>>(
      node, origin, "transition");
  auto obs_kernel = field<std::vector<std::vector<std::vector<double>>>>(
      node, origin, "obs_kernel");
  const auto discount = field<double>(node, origin, "discount");

  PomdpFixture fixture;
  try {
    fixture.pomdp = make_pomdp(states, actions, observations,
                               std::move(transition), std::move(obs_kernel),
                               discount);
    fixture.rewards = make_reward_maps(
        fixture.pomdp,
        field<std::vector<double>>(node, origin, "implemented_reward"),
        field<std::vector<double>>(node, origin, "intended_reward"));
    if (node.contains("dominance")) {
      fixture.dominance = make_dominance_spec(
          fixture.pomdp,
          field<std::vector<std::size_t>>(node, origin, "dominance.task_actions"),
          field<std::size_t>(node, origin, "dominance.wirehead_action"),
          field<double>(node, origin, "dominance.r_task"));
    }
  } catch (const UsageError& error) {
    throw UsageError(origin + ": " + error.what());
  }
  return fixture;
}

std::string serialize_pomdp_fixture(const PomdpFixture& fixture) {
  json node;
  node["states"] = fixture.pomdp.state_count;
  node["actions"] = fixture.pomdp.action_count;
  node["observations"] = fixture.pomdp.observation_count;
  node["transition"] = fixture.pomdp.transition;
  node["obs_kernel"] = fixture.pomdp.obs_kernel;
  node["discount"] = fixture.pomdp.discount;
  node["implemented_reward"] = fixture.rewards.implemented;
  node["intended_reward"] = fixture.rewards.intended;
  if (fixture.dominance.has_value()) {
    node["dominance"] = json{{"task_actions", fixture.dominance->task_actions},
                             {"wirehead_action", fixture.dominance->wirehead_action},
                             {"r_task", fixture.dominance->r_task}};
  }
  return node.dump(2) + "\n";
}

PomdpFixture load_pomdp_fixture(const std::filesystem::path& path) {
  return parse_pomdp_fixture(read_text_file(path), path.string());
}

void save_pomdp_fixture(const PomdpFixture& fixture,
                        const std::filesystem::path& path) {
  write_text_file(path, serialize_pomdp_fixture(fixture));
}

std::string serialize_certificate(
    const AssumptionReport& report,
    const std::optional<DominanceCertificate>& certificate) {
  json node;
  node["assumption"] = json{{"manipulation", witness_to_json(report.manipulation)},
                            {"task_limit", witness_to_json(report.task_limit)},
                            {"availability", witness_to_json(report.availability)},
                            {"all_hold", report.all_hold()}};
  if (!certificate.has_value()) {
    node["pass"] = false;
    node["note"] = "assumption not met; no certificate issued";
    return node.dump(2) + "\n";
  }
  node["pass"] = certificate->pass;
  node["minimal_gap"] = certificate->minimal_gap;
  node["required_gap"] = certificate->required_gap;
  node["slack"] = certificate->slack;
  node["residual"] = certificate->residual;
  node["wirehead_value_error"] = certificate->wirehead_value_error;
  node["witness"] = json{{"state", certificate->witness_state},
                         {"action", certificate->witness_action}};
  return node.dump(2) + "\n";
}

std::string round_record_to_line(const RoundRecord& record) {
  json node;
  node["round"] = record.round;
  node["condition"] = to_string(record.condition);
  node["task_kind"] = to_string(record.task_kind);
  node["seed"] = record.seed;
  node["instance_id"] = record.instance_id;
  node["answer"] = record.answer;
  node["reward"] = record.reward;
  node["accuracy"] = record.accuracy;
  node["grade"] = record.grade.has_value() ? json(*record.grade) : json(nullptr);
  node["baseline"] = record.baseline;
  node["advantage"] = record.advantage;
  node["answer_entropy"] = record.answer_entropy;
  node["grade_entropy"] = record.grade_entropy.has_value()
                              ? json(*record.grade_entropy)
                              : json(nullptr);
  node["degenerate"] = record.degenerate;
  return node.dump();
}

RoundRecord round_record_from_line(const std::string& line,
                                   const std::string& origin) {
  const json node = parse_json(line, origin);
  RoundRecord record;
  record.round = field<std::size_t>(node, origin, "round");
  record.condition =
      condition_from_string(field<std::string>(node, origin, "condition"));
  record.task_kind =
      task_kind_from_string(field<std::string>(node, origin, "task_kind"));
  record.seed = field<std::uint64_t>(node, origin, "seed");
  record.instance_id = field<std::size_t>(node, origin, "instance_id");
  record.answer = field<std::size_t>(node, origin, "answer");
  record.reward = field<double>(node, origin, "reward");
  record.accuracy = field<double>(node, origin, "accuracy");
  if (!node.contains("grade")) throw UsageError(origin + ": missing field 'grade'");
  if (!node["grade"].is_null()) record.grade = node["grade"].get<double>();
  record.baseline = field<double>(node, origin, "baseline");
  record.advantage = field<double>(node, origin, "advantage");
  record.answer_entropy = field<double>(node, origin, "answer_entropy");
  if (!node.contains("grade_entropy")) {
    throw UsageError(origin + ": missing field 'grade_entropy'");
  }
  if (!node["grade_entropy"].is_null()) {
    record.grade_entropy = node["grade_entropy"].get<double>();
  }
  record.degenerate = field<bool>(node, origin, "degenerate");
  return record;
}

std::string serialize_snapshot(const SnapshotBundle& bundle) {
  json node;
  node["policy"] = policy_to_json(bundle.policy);
  node["baseline"] = json{{"value", bundle.baseline.value},
                          {"alpha", bundle.baseline.alpha},
                          {"initialized", bundle.baseline.initialized}};
  node["optimizer"] = json{{"learning_rate", bundle.optimizer.learning_rate},
                           {"weight_decay", bundle.optimizer.weight_decay},
                           {"clip_norm", bundle.optimizer.clip_norm},
                           {"adaptive", bundle.optimizer.adaptive},
                           {"beta1", bundle.optimizer.beta1},
                           {"beta2", bundle.optimizer.beta2},
                           {"epsilon", bundle.optimizer.epsilon}};
  node["round"] = bundle.round;
  return node.dump(2) + "\n";
}

SnapshotBundle parse_snapshot(const std::string& text,
                              const std::string& origin) {
  const json node = parse_json(text, origin);
  SnapshotBundle bundle;
  if (!node.contains("policy")) throw UsageError(origin + ": missing field 'policy'");
  bundle.policy = policy_from_json(node["policy"], origin);
  bundle.baseline.value = field<double>(node, origin, "baseline.value");
  bundle.baseline.alpha = field<double>(node, origin, "baseline.alpha");
  bundle.baseline.initialized = field<bool>(node, origin, "baseline.initialized");
  bundle.optimizer.learning_rate =
      field<double>(node, origin, "optimizer.learning_rate");
  bundle.optimizer.weight_decay =
      field<double>(node, origin, "optimizer.weight_decay");
  bundle.optimizer.clip_norm = field<double>(node, origin, "optimizer.clip_norm");
  bundle.optimizer.adaptive = field<bool>(node, origin, "optimizer.adaptive");
  bundle.optimizer.beta1 = field<double>(node, origin, "optimizer.beta1");
  bundle.optimizer.beta2 = field<double>(node, origin, "optimizer.beta2");
  bundle.optimizer.epsilon = field<double>(node, origin, "optimizer.epsilon");
  bundle.round = field<std::size_t>(node, origin, "round");
  return bundle;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw UsageError("write to '" + path.string() + "' failed");
}

}  // namespace wirehead
