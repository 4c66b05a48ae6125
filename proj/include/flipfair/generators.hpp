#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "flipfair/instance.hpp"
#include "flipfair/io.hpp"
#include "flipfair/rational.hpp"

namespace flipfair {

enum class Family { general, ordered, top_n, rho_bounded, identical, binary };

/// general | ordered | top-n-agreement | rho-bounded | identical | binary
Family parse_family(std::string_view name);
const char* family_name(Family f);

struct FamilySpec {
  Family family = Family::general;
  int n = 2;
  int k = 2;
  /// Upper bound on rho; top-n-agreement and rho-bounded only. rho-bounded defaults to 2.
  std::optional<Rational> rho;
  /// Values are multiples of 1/granularity.
  int granularity = 1;
  std::uint64_t seed = 0;
};

/// Deterministic per spec; the result is re-classified before it is returned.
/// Throws ValidationError for an unsatisfiable spec.
Instance generate(const FamilySpec& spec);

enum class TopNStatus { agreement, disagreement, ambiguous };

struct Classification {
  bool identical = false;
  bool binary = false;
  bool ordered = false;
  TopNStatus top_n = TopNStatus::ambiguous;
  /// Common top-n set when top_n == agreement.
  std::vector<ItemId> top_n_items;
  /// Every agent's n-th value is strictly above her (n+1)-th.
  bool separated = false;
  /// max_i max_{g,g' in T} v_i(g)/v_i(g') under agreement; empty if undefined or infinite.
  std::optional<Rational> rho;
  /// max_i v_i(g_i^1)/v_i(g_i^n); empty if some v_i(g_i^n) = 0.
  std::optional<Rational> individualized_rho;
};

Classification classify(const Instance& inst);
bool in_family(const Classification& c, const FamilySpec& spec);
Json to_json(const Classification& c);

/// Portable uniform integer in [lo, hi] by rejection on mt19937_64 output.
std::uint64_t uniform_int(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi);

}  // namespace flipfair
