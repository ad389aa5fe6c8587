#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "wirehead/metrics.hpp"
#include "wirehead/pomdp.hpp"
#include "wirehead/reinforce.hpp"

namespace wirehead {

// A POMDP fixture bundles dynamics, rewards, and (optionally) the action
// partition needed for dominance certification. Serialized as JSON; the
// schema is documented in docs/formats.md.
struct PomdpFixture {
  FinitePomdp pomdp;
  RewardMaps rewards;
  std::optional<DominanceSpec> dominance;
};

// Parse/serialize round-trip exactly (modulo row normalization at
// construction). Parse failures throw UsageError naming `origin` and the
// offending field or byte position.
PomdpFixture parse_pomdp_fixture(const std::string& text,
                                 const std::string& origin);
std::string serialize_pomdp_fixture(const PomdpFixture& fixture);
PomdpFixture load_pomdp_fixture(const std::filesystem::path& path);
void save_pomdp_fixture(const PomdpFixture& fixture,
                        const std::filesystem::path& path);

// Certificate record: verdict, gap, witness, slack accounting, and the
// assumption report it was gated on. With no certificate (assumption not
// met), only the report and a failing verdict are emitted.
std::string serialize_certificate(
    const AssumptionReport& report,
    const std::optional<DominanceCertificate>& certificate);

// One RoundRecord per line, self-describing field names, no trailing
// newline. Absent grades serialize as nulls.
std::string round_record_to_line(const RoundRecord& record);
RoundRecord round_record_from_line(const std::string& line,
                                   const std::string& origin);

// Policy snapshot bundle for post-hoc analysis: logit tables, baseline,
// optimizer configuration, and the round index the snapshot was taken at.
struct SnapshotBundle {
  PolicySnapshot policy;
  BaselineState baseline;
  OptimizerConfig optimizer;
  std::size_t round = 0;
};

std::string serialize_snapshot(const SnapshotBundle& bundle);
SnapshotBundle parse_snapshot(const std::string& text,
                              const std::string& origin);

// Whole-file helpers used by the harness and tools.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace wirehead
