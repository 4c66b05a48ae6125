#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flipfair/instance.hpp"
#include "flipfair/io.hpp"
#include "flipfair/rational.hpp"

namespace flipfair {

/// a from the envious agent's bundle, b from the envied agent's bundle.
struct RationalFlip {
  ItemId a;
  ItemId b;
  friend bool operator==(const RationalFlip&, const RationalFlip&) = default;
  friend auto operator<=>(const RationalFlip&, const RationalFlip&) = default;
};

/// Pairs (a in A_i, b in A_j) with v_i(b) > v_i(a), sorted by (a, b).
std::vector<RationalFlip> rational_flips(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j);

/// v_i(A_i - a + b) / v_i(A_j - b + a); 1 when the denominator vanishes.
Rational flip_ratio(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j, RationalFlip f);

Rational pair_gamma_ef(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j);
Rational pair_gamma_eff1(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j);
Rational pair_gamma_effx(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j);
bool pair_ef1_removal(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j);
bool pair_efx_removal(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j);

struct PairReport {
  AgentId i = 0;
  AgentId j = 0;
  bool envies = false;
  Rational ef{1};
  bool ef1_removal = true;
  bool efx_removal = true;
  Rational eff1{1};
  Rational effx{1};
  /// Flip attaining eff1 (max) / effx (min); empty without envy.
  std::optional<RationalFlip> eff1_flip;
  std::optional<RationalFlip> effx_flip;
};

/// Everything about one ordered pair in a single pass over its flips.
PairReport audit_pair(const Instance& inst, const Allocation& alloc, AgentId i, AgentId j);

struct AuditReport {
  std::vector<PairReport> pairs;  // ordered (i, j), i != j, row-major
  Rational ef{1};
  bool ef1_removal = true;
  bool efx_removal = true;
  Rational eff1{1};
  Rational effx{1};
  /// Filled by solvers::is_pareto_optimal when requested.
  std::optional<bool> pareto_optimal;
};

/// Throws ValidationError for an invalid allocation.
AuditReport audit_allocation(const Instance& inst, const Allocation& alloc);

Json to_json(const AuditReport& report);

enum class Notion { ef, eff1, effx };

Notion parse_notion(std::string_view name);
const char* notion_name(Notion n);
const Rational& gamma_of(const AuditReport& report, Notion n);

class EnvyGraph {
 public:
  EnvyGraph(int n, std::vector<AgentId> vertices, std::vector<std::vector<bool>> adj);

  [[nodiscard]] const std::vector<AgentId>& vertices() const { return vertices_; }
  [[nodiscard]] bool contains(AgentId v) const;
  [[nodiscard]] bool has_edge(AgentId i, AgentId j) const { return adj_[i][j]; }
  /// Sorted lexicographically.
  [[nodiscard]] std::vector<std::pair<AgentId, AgentId>> edges() const;
  /// Vertices without incoming edges, ascending.
  [[nodiscard]] std::vector<AgentId> sources() const;
  /// First cycle found by DFS from the lowest-id vertex, neighbours ascending.
  /// Returned as c0, c1, ..., c_{L-1} with edges c_t -> c_{t+1} and c_{L-1} -> c0.
  [[nodiscard]] std::optional<std::vector<AgentId>> find_cycle() const;
  [[nodiscard]] bool is_cycle(std::span<const AgentId> cycle) const;
  [[nodiscard]] bool is_acyclic() const { return !find_cycle().has_value(); }
  /// Kahn's algorithm, smallest available id first. Throws ImpossibleState on a cycle.
  [[nodiscard]] std::vector<AgentId> topological_order() const;
  /// Vertices reachable from v along out-edges, v included, ascending.
  [[nodiscard]] std::vector<AgentId> reachable_from(AgentId v) const;

 private:
  int n_;
  std::vector<AgentId> vertices_;
  std::vector<bool> member_;
  std::vector<std::vector<bool>> adj_;
};

/// Edge (i, j) iff both are listed and v_i(B_i) < v_i(B_j). Bundles may be partial.
EnvyGraph build_envy_graph(const Instance& inst, std::span<const Bundle> bundles, std::span<const AgentId> vertices);
EnvyGraph build_envy_graph(const Instance& inst, std::span<const Bundle> bundles);

Json edges_to_json(const std::vector<std::pair<AgentId, AgentId>>& edges);

}  // namespace flipfair
