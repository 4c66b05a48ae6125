#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "flipfair/instance.hpp"
#include "flipfair/rational.hpp"

namespace flipfair {

using Json = nlohmann::ordered_json;

/// {"n": int, "k": int, "values": [[rational-string|int, ...], ...]}; row = agent, column = item.
/// Throws ParseError for malformed documents and ValidationError for model violations.
Instance parse_instance(std::string_view text);
Instance instance_from_json(const Json& doc);
Json to_json(const Instance& inst);
std::string serialize_instance(const Instance& inst);

/// {"bundles": [[int, ...], ...]}. Only the shape is checked here; see validate_allocation.
Allocation parse_allocation(std::string_view text);
Allocation allocation_from_json(const Json& doc);
Json to_json(const Allocation& alloc);

Rational rational_from_json(const Json& v, const std::string& where);
inline Json to_json(const Rational& r) { return r.str(); }

/// Parses a document, turning nlohmann exceptions into ParseError.
Json parse_json(std::string_view text, const std::string& what);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace flipfair
