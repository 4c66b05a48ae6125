#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flipfair/instance.hpp"
#include "flipfair/io.hpp"

namespace flipfair {

// ---- picking sequences ----

/// Exactly k rounds, each a permutation of the agents.
struct PickSequence {
  std::vector<std::vector<AgentId>> rounds;
  friend bool operator==(const PickSequence&, const PickSequence&) = default;
};

/// Throws ValidationError naming the bad round.
void validate_pick_sequence(const Instance& inst, const PickSequence& seq);
/// Accepts {"rounds": [[...], ...]} or a bare array of rounds.
PickSequence parse_pick_sequence(std::string_view text);
PickSequence pick_sequence_from_json(const Json& doc);
Json to_json(const PickSequence& seq);
/// All (n!)^k sequences; rounds vary slowest-first in lexicographic permutation order.
std::vector<PickSequence> all_pick_sequences(int n, int k);
/// Parses "0,1,2".
std::vector<AgentId> parse_order(std::string_view text);

/// Every pick takes the picker's most valuable remaining item, lowest id on ties.
Allocation round_robin(const Instance& inst, std::span<const AgentId> order);
/// Round 1 in order, round 2 reversed. Throws ValidationError unless k == 2.
Allocation balanced_round_robin_k2(const Instance& inst, std::span<const AgentId> order);
Allocation generalized_round_robin(const Instance& inst, const PickSequence& seq);

// ---- selection scripts ----

struct ScriptChoice {
  enum class Kind { agent, cycle, drop_item };
  int step = 0;
  Kind kind = Kind::agent;
  AgentId agent = -1;
  std::vector<AgentId> cycle;
  ItemId item = -1;
  friend bool operator==(const ScriptChoice&, const ScriptChoice&) = default;
};

/// Explicit choices keyed by main-loop iteration (0-based). Entries sharing a
/// (step, kind) are consumed in file order. A choice that is not legal when it
/// is consulted, or that is never consulted, raises ScriptError.
struct SelectionScript {
  std::vector<ScriptChoice> choices;
  friend bool operator==(const SelectionScript&, const SelectionScript&) = default;
};

SelectionScript parse_script(std::string_view text);
SelectionScript script_from_json(const Json& doc);
Json to_json(const SelectionScript& script);

// ---- envy-graph algorithms ----

using Edge = std::pair<AgentId, AgentId>;

struct TraceRecord {
  int iteration = 0;
  std::string op;  // get | swap | pass
  AgentId agent = -1;
  std::optional<ItemId> item_in;
  std::optional<ItemId> item_out;
  bool privileged_swap = false;
  std::vector<AgentId> removed_from_p;
  int rotations = 0;
  std::vector<AgentId> rotated_agents;
  /// Graph that triggered cycle elimination this iteration; empty if none ran.
  std::vector<Edge> edges_before_rotation;
  /// Envy graph over all agents at the end of the iteration.
  std::vector<Edge> edges;
  std::vector<AgentId> privileged;
  std::vector<Bundle> bundles;
  std::string state_hash;
};

struct RunTrace {
  std::string algorithm;
  std::vector<TraceRecord> records;
};

Json to_json(const TraceRecord& rec);
/// One JSON object per line.
std::string trace_jsonl(const RunTrace& trace);

struct RunOptions {
  const SelectionScript* script = nullptr;
  /// Check the privileged-set invariants after every iteration; ImpossibleState on failure.
  bool check_invariants = false;
  RunTrace* trace = nullptr;
};

/// Rotates bundles backwards along envy cycles (DFS order) among `vertices`
/// until the restricted graph has a source. Returns the input if one exists.
PartialAllocation eliminate_envy_cycles(const Instance& inst, PartialAllocation partial,
                                        std::span<const AgentId> vertices);

/// Envy-cycle elimination where agents leave once they hold k items.
Allocation ece_k(const Instance& inst, const RunOptions& opts = {});
/// Envy-cycle elimination with item swaps and a privileged set.
Allocation ece_swaps(const Instance& inst, const RunOptions& opts = {});

struct OperationCounts {
  std::int64_t gets = 0;
  std::int64_t swaps = 0;
  std::int64_t privileged_swaps = 0;
  std::int64_t passes = 0;
  std::int64_t rotations = 0;
  std::int64_t iterations = 0;
  /// Longest run of passes between two value-increasing operations.
  std::int64_t max_consecutive_passes = 0;
  /// Most swaps one agent made while holding one bundle (reset by get or rotation).
  std::int64_t max_swaps_per_holding = 0;
};

OperationCounts operation_counter(const RunTrace& trace);
/// n * kn * (kn + 1): a conservative iteration envelope for ece_swaps.
std::int64_t iteration_bound(int n, int k);

}  // namespace flipfair
