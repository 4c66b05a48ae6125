#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flipfair/algorithms.hpp"
#include "flipfair/instance.hpp"
#include "flipfair/io.hpp"
#include "flipfair/rational.hpp"
#include "flipfair/solvers.hpp"

namespace flipfair {

using Constants = std::vector<std::pair<std::string, Rational>>;

/// A concrete instance with its symbolic constants fixed, the allocations it
/// talks about, an optional selection script, and machine-checkable facts.
struct Fixture {
  std::string name;
  std::string summary;
  Constants constants;
  Instance instance;
  /// Further instantiations referenced by facts through "instance": label.
  std::vector<std::pair<std::string, Instance>> variants;
  std::vector<std::pair<std::string, Allocation>> allocations;
  std::optional<SelectionScript> script;
  std::vector<Json> facts;

  [[nodiscard]] const Allocation& allocation(const std::string& label) const;
  /// "" names the main instance.
  [[nodiscard]] const Instance& instance_for(const std::string& label) const;
};

const std::vector<std::string>& fixture_names();

/// Builds a registered fixture; `overrides` replace default constants by name.
/// Throws FixtureError for unknown names/constants or violated constraints.
Fixture load_fixture(std::string_view name, const std::map<std::string, Rational>& overrides = {});

struct FactResult {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct FixtureReport {
  std::string name;
  std::vector<FactResult> results;
  [[nodiscard]] bool pass() const;
};

FixtureReport check_fixture(const Fixture& fx, const SolveOptions& opts = {});
Json to_json(const FixtureReport& report);

/// <name>.instance.json and <name>.facts.json documents.
Json fixture_instance_json(const Fixture& fx);
Json fixture_facts_json(const Fixture& fx);
Fixture fixture_from_json(const Json& instance_doc, const Json& facts_doc);
Fixture load_fixture_from_corpus(const std::string& dir, std::string_view name);
void export_corpus(const std::string& dir);

}  // namespace flipfair
