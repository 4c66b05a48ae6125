#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "flipfair/generators.hpp"
#include "flipfair/instance.hpp"
#include "flipfair/rational.hpp"

namespace flipfair::testing {

inline Rational R(std::int64_t p, std::int64_t q = 1) { return Rational(p, q); }

inline std::vector<Rational> row(std::initializer_list<std::int64_t> xs) {
  std::vector<Rational> r;
  for (auto x : xs) r.emplace_back(x);
  return r;
}

inline Allocation alloc(std::initializer_list<std::initializer_list<int>> bundles) {
  std::vector<Bundle> b;
  for (const auto& x : bundles) b.emplace_back(x);
  return Allocation::canonical(std::move(b));
}

/// Integer values in [0, hi], or multiples of 1/den when den > 1.
inline Instance random_instance(std::mt19937_64& rng, int n, int k, std::int64_t hi = 10, std::int64_t den = 1) {
  std::vector<std::vector<Rational>> v(static_cast<std::size_t>(n));
  for (auto& r : v) {
    for (int g = 0; g < n * k; ++g) {
      r.emplace_back(static_cast<std::int64_t>(uniform_int(rng, 0, static_cast<std::uint64_t>(hi * den))), den);
    }
  }
  return Instance(n, k, std::move(v));
}

inline Allocation random_allocation(std::mt19937_64& rng, int n, int k) {
  std::vector<int> items(static_cast<std::size_t>(n * k));
  std::iota(items.begin(), items.end(), 0);
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[static_cast<std::size_t>(uniform_int(rng, 0, i - 1))]);
  }
  std::vector<Bundle> b(static_cast<std::size_t>(n));
  for (int t = 0; t < n * k; ++t) b[static_cast<std::size_t>(t / k)].push_back(items[static_cast<std::size_t>(t)]);
  return Allocation::canonical(std::move(b));
}

/// C = 10, eps = 1/100.
inline Instance example1() {
  const std::vector<Rational> r{R(20), R(51, 50), R(1), R(1, 100)};
  return Instance(2, 2, {r, r});
}

/// eps = 1/10.
inline Instance example2() { return Instance(2, 2, {row({10, 6, 4, 1}), {R(101, 10), R(10), R(1), R(2)}}); }

/// C = 10, eps = 1/100.
inline Instance example3() {
  const std::vector<Rational> r{R(20), R(101, 100), R(1), R(1, 100)};
  return Instance(2, 2, {r, r});
}

/// C = 100, eps = 1/100.
inline Instance table2() {
  const std::vector<Rational> r{R(300), R(101, 100), R(1), R(99, 100), R(1, 100), R(0)};
  return Instance(2, 3, {r, r});
}

inline Instance appendix_d2() {
  return Instance(3, 3,
                  {row({50, 17, 16, 14, 2, 1, 0, 0, 0}), row({46, 17, 16, 15, 3, 3, 0, 0, 0}),
                   row({33, 17, 15, 15, 11, 4, 3, 1, 1})});
}

inline Instance zeros(int n, int k) {
  return Instance(n, k, std::vector<std::vector<Rational>>(static_cast<std::size_t>(n),
                                                           std::vector<Rational>(static_cast<std::size_t>(n * k))));
}

}  // namespace flipfair::testing
