#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "flipfair/rational.hpp"

namespace flipfair {

using AgentId = int;
using ItemId = int;
using Bundle = std::vector<ItemId>;

/// n agents, bundle size k, and an n x (k*n) matrix of non-negative values.
/// Immutable after construction.
class Instance {
 public:
  /// Validates n >= 2, k >= 1, row count, row length m = k*n and non-negativity.
  /// Throws ValidationError naming the offending row/column.
  Instance(int n, int k, std::vector<std::vector<Rational>> values);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] int m() const { return n_ * k_; }

  /// Unchecked fast path; callers guarantee valid ids.
  [[nodiscard]] const Rational& value(AgentId agent, ItemId item) const {
    return values_[static_cast<std::size_t>(agent) * static_cast<std::size_t>(m()) + static_cast<std::size_t>(item)];
  }
  [[nodiscard]] std::span<const Rational> row(AgentId agent) const {
    return {values_.data() + static_cast<std::size_t>(agent) * static_cast<std::size_t>(m()),
            static_cast<std::size_t>(m())};
  }

  [[nodiscard]] bool valid_agent(AgentId a) const { return a >= 0 && a < n_; }
  [[nodiscard]] bool valid_item(ItemId g) const { return g >= 0 && g < m(); }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  int n_;
  int k_;
  std::vector<Rational> values_;
};

/// v_agent(bundle): exact sum; empty bundle is 0. Throws ValidationError on bad ids.
Rational value_of(const Instance& inst, AgentId agent, std::span<const ItemId> bundle);

/// Ordered partition of the items into n bundles of size k. Construction does
/// not validate; see validate_allocation.
struct Allocation {
  std::vector<Bundle> bundles;

  /// Sorts each bundle so equal partitions compare equal.
  static Allocation canonical(std::vector<Bundle> bundles);
  friend bool operator==(const Allocation&, const Allocation&) = default;
  friend auto operator<=>(const Allocation&, const Allocation&) = default;
};

/// Bundles of size <= k plus the pool of unallocated items.
struct PartialAllocation {
  std::vector<Bundle> bundles;
  std::vector<ItemId> pool;

  static PartialAllocation empty(const Instance& inst);
  friend bool operator==(const PartialAllocation&, const PartialAllocation&) = default;
};

struct Violation {
  enum class Kind { bundle_count, bundle_size, unknown_item, duplicate_item, missing_item };
  Kind kind;
  std::string message;
};

/// Every violated Allocation invariant, in a deterministic order; empty means ok.
std::vector<Violation> validate_allocation(const Instance& inst, const Allocation& alloc);

/// Throws ValidationError with all violations joined when the allocation is invalid.
void require_valid(const Instance& inst, const Allocation& alloc);

}  // namespace flipfair
