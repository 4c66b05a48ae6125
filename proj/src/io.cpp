#include "flipfair/io.hpp"

#include <fstream>
#include <sstream>

#include "flipfair/errors.hpp"

namespace flipfair {

Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << contents;
}

Rational rational_from_json(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  throw ParseError(where + ": expected an integer or a \"p/q\" string");
}

namespace {

int int_field(const Json& doc, const char* key, const std::string& what) {
  if (!doc.contains(key)) throw ParseError(what + ": missing field \"" + key + "\"");
  const auto& v = doc.at(key);
  if (!v.is_number_integer()) throw ParseError(what + ": field \"" + key + "\" must be an integer");
  return v.get<int>();
}

}  // namespace

Instance instance_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("instance: top level must be an object");
  const int n = int_field(doc, "n", "instance");
  const int k = int_field(doc, "k", "instance");
  if (!doc.contains("values") || !doc.at("values").is_array()) {
    throw ParseError("instance: \"values\" must be an array of rows");
  }
  std::vector<std::vector<Rational>> values;
  const auto& rows = doc.at("values");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array()) throw ParseError("instance: values row " + std::to_string(r) + " must be an array");
    std::vector<Rational> row;
    row.reserve(rows[r].size());
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      row.push_back(rational_from_json(rows[r][c], "instance: row " + std::to_string(r) + ", column " + std::to_string(c)));
    }
    values.push_back(std::move(row));
  }
  return Instance(n, k, std::move(values));
}

Instance parse_instance(std::string_view text) { return instance_from_json(parse_json(text, "instance")); }

Json to_json(const Instance& inst) {
  Json values = Json::array();
  for (int i = 0; i < inst.n(); ++i) {
    Json row = Json::array();
    for (const auto& v : inst.row(i)) row.push_back(v.str());
    values.push_back(std::move(row));
  }
  return Json{{"n", inst.n()}, {"k", inst.k()}, {"values", std::move(values)}};
}

std::string serialize_instance(const Instance& inst) { return to_json(inst).dump(); }

Allocation allocation_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("bundles") || !doc.at("bundles").is_array()) {
    throw ParseError("allocation: expected {\"bundles\": [[int, ...], ...]}");
  }
  std::vector<Bundle> bundles;
  const auto& bs = doc.at("bundles");
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (!bs[i].is_array()) throw ParseError("allocation: bundle " + std::to_string(i) + " must be an array");
    Bundle b;
    for (std::size_t j = 0; j < bs[i].size(); ++j) {
      if (!bs[i][j].is_number_integer()) {
        throw ParseError("allocation: bundle " + std::to_string(i) + ", entry " + std::to_string(j) +
                         " must be an item id");
      }
      b.push_back(bs[i][j].get<int>());
    }
    bundles.push_back(std::move(b));
  }
  return Allocation::canonical(std::move(bundles));
}

Allocation parse_allocation(std::string_view text) { return allocation_from_json(parse_json(text, "allocation")); }

Json to_json(const Allocation& alloc) {
  Json bundles = Json::array();
  for (const auto& b : alloc.bundles) bundles.push_back(b);
  return Json{{"bundles", std::move(bundles)}};
}

}  // namespace flipfair
