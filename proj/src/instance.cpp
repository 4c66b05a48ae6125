#include "flipfair/instance.hpp"

#include <algorithm>
#include <sstream>

#include "flipfair/errors.hpp"

namespace flipfair {

Instance::Instance(int n, int k, std::vector<std::vector<Rational>> values) : n_(n), k_(k) {
  if (n < 2) throw ValidationError("n = " + std::to_string(n) + " agents; at least 2 required");
  if (k < 1) throw ValidationError("k = " + std::to_string(k) + "; bundle size must be at least 1");
  if (static_cast<int>(values.size()) != n) {
    throw ValidationError("values has " + std::to_string(values.size()) + " rows; expected n = " + std::to_string(n));
  }
  const int m = n * k;
  values_.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
  for (int r = 0; r < n; ++r) {
    auto& row = values[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != m) {
      throw ValidationError("row " + std::to_string(r) + ": m = " + std::to_string(row.size()) +
                            " items but k*n = " + std::to_string(m));
    }
    for (int c = 0; c < m; ++c) {
      auto& v = row[static_cast<std::size_t>(c)];
      if (v.sign() < 0) {
        throw ValidationError("row " + std::to_string(r) + ", column " + std::to_string(c) + ": negative value " +
                              v.str());
      }
      values_.push_back(std::move(v));
    }
  }
}

Rational value_of(const Instance& inst, AgentId agent, std::span<const ItemId> bundle) {
  if (!inst.valid_agent(agent)) throw ValidationError("unknown agent id " + std::to_string(agent));
  Rational total;
  for (ItemId g : bundle) {
    if (!inst.valid_item(g)) throw ValidationError("unknown item id " + std::to_string(g));
    total += inst.value(agent, g);
  }
  return total;
}

Allocation Allocation::canonical(std::vector<Bundle> bundles) {
  for (auto& b : bundles) std::sort(b.begin(), b.end());
  return Allocation{std::move(bundles)};
}

PartialAllocation PartialAllocation::empty(const Instance& inst) {
  PartialAllocation p;
  p.bundles.resize(static_cast<std::size_t>(inst.n()));
  p.pool.resize(static_cast<std::size_t>(inst.m()));
  for (int g = 0; g < inst.m(); ++g) p.pool[static_cast<std::size_t>(g)] = g;
  return p;
}

std::vector<Violation> validate_allocation(const Instance& inst, const Allocation& alloc) {
  std::vector<Violation> out;
  if (static_cast<int>(alloc.bundles.size()) != inst.n()) {
    out.push_back({Violation::Kind::bundle_count, "expected " + std::to_string(inst.n()) + " bundles, got " +
                                                      std::to_string(alloc.bundles.size())});
  }
  std::vector<int> seen(static_cast<std::size_t>(inst.m()), 0);
  for (std::size_t i = 0; i < alloc.bundles.size(); ++i) {
    const auto& b = alloc.bundles[i];
    if (static_cast<int>(b.size()) != inst.k()) {
      out.push_back({Violation::Kind::bundle_size, "bundle " + std::to_string(i) + " has " + std::to_string(b.size()) +
                                                       " items; expected k = " + std::to_string(inst.k())});
    }
    for (ItemId g : b) {
      if (!inst.valid_item(g)) {
        out.push_back({Violation::Kind::unknown_item, "bundle " + std::to_string(i) + " holds unknown item " +
                                                          std::to_string(g)});
      } else {
        ++seen[static_cast<std::size_t>(g)];
      }
    }
  }
  for (int g = 0; g < inst.m(); ++g) {
    const int c = seen[static_cast<std::size_t>(g)];
    if (c > 1) {
      out.push_back({Violation::Kind::duplicate_item,
                     "item " + std::to_string(g) + " appears " + std::to_string(c) + " times"});
    } else if (c == 0) {
      out.push_back({Violation::Kind::missing_item, "item " + std::to_string(g) + " is missing"});
    }
  }
  return out;
}

void require_valid(const Instance& inst, const Allocation& alloc) {
  const auto violations = validate_allocation(inst, alloc);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid allocation:";
  for (const auto& v : violations) os << ' ' << v.message << ';';
  throw ValidationError(os.str());
}

}  // namespace flipfair
