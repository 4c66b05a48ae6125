#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "flipfair/audit.hpp"
#include "flipfair/instance.hpp"
#include "flipfair/io.hpp"
#include "flipfair/rational.hpp"

namespace flipfair {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

/// (kn)! / (k!)^n.
mpz_class allocation_count(int n, int k);
/// Throws BudgetExceeded when allocation_count(n, k) > budget.
void check_budget(int n, int k, std::uint64_t budget);

/// Visits every ordered partition once: agent 0 takes a k-subset of the items in
/// lexicographic order, agent 1 a k-subset of the rest, and so on. The visitor
/// returns false to stop early.
void enumerate_allocations(int n, int k, const std::function<bool(const Allocation&)>& visit,
                           std::uint64_t budget = kDefaultBudget);

enum class Exec { serial, parallel };

struct SolveOptions {
  std::uint64_t budget = kDefaultBudget;
  /// List every optimum; otherwise only the first in enumeration order.
  bool all_optima = true;
  /// serial is the single-scan reference; parallel splits by agent 0's bundle.
  Exec exec = Exec::parallel;
};

enum class Rule { mnw, leximin, sw };

const char* rule_name(Rule r);

struct ObjectiveResult {
  Rule rule = Rule::sw;
  /// Optima in enumeration order (only the first unless all_optima).
  std::vector<Allocation> optima;
  std::vector<std::vector<Rational>> values;  // v_i(A_i) per listed optimum
  std::uint64_t count = 0;                    // number of optima, listed or not
  /// mnw: |P(A)|; product over P(A). sw: the sum. leximin: minimum value.
  int positive_count = 0;
  Rational objective;
  /// leximin: ascending value vector of every optimum.
  std::vector<Rational> sorted_values;

  friend bool operator==(const ObjectiveResult&, const ObjectiveResult&) = default;
};

/// Maximise |P(A)|, then the product of v_i(A_i) over P(A).
ObjectiveResult max_nash_welfare(const Instance& inst, const SolveOptions& opts = {});
/// Lexicographically maximal ascending value vector.
ObjectiveResult leximin(const Instance& inst, const SolveOptions& opts = {});
ObjectiveResult max_social_welfare(const Instance& inst, const SolveOptions& opts = {});

struct ParetoResult {
  bool optimal = true;
  /// First dominating allocation in enumeration order.
  std::optional<Allocation> certificate;
};

ParetoResult is_pareto_optimal(const Instance& inst, const Allocation& alloc, const SolveOptions& opts = {});

enum class SearchMode { first, exhaustive };

struct ExistsResult {
  std::vector<Allocation> found;  // enumeration order
};

/// Allocations whose allocation-level gamma for `notion` is at least `threshold`.
ExistsResult effx_exists(const Instance& inst, Notion notion, const Rational& threshold, SearchMode mode,
                         const SolveOptions& opts = {});

Json to_json(const ObjectiveResult& r);
Json to_json(const ParetoResult& r);
Json to_json(const ExistsResult& r);

}  // namespace flipfair
