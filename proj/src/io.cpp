#include "nestlie/io.hpp"

#include <cmath>
#include <cstdio>

namespace nestlie {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw ParseError(message); }

Matrix parse_matrix(const ordered_json& grid, int n, std::size_t index) {
  const std::string where = "generators[" + std::to_string(index) + "]";
  if (!grid.is_array() || int(grid.size()) != n)
    fail(where + ": expected " + std::to_string(n) + " rows");
  Matrix t(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = grid[std::size_t(i)];
    if (!row.is_array() || int(row.size()) != n)
      fail(where + ": expected " + std::to_string(n) + " columns per row");
    for (int j = 0; j < n; ++j) {
      const auto& entry = row[std::size_t(j)];
      if (!entry.is_array() || entry.size() != 2 ||
          !entry[0].is_number() || !entry[1].is_number())
        fail(where + ": entries must be [re, im] number pairs");
      const double re = entry[0].get<double>();
      const double im = entry[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im))
        fail(where + ": entries must be finite");
      t(i, j) = Complex(re, im);
    }
  }
  return t;
}

}  // namespace

InstanceDocument parse_instance(const std::string& json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("instance document must be a JSON object");
  for (const auto& [key, value] : root.items()) {
    (void)value;
    if (key != "label" && key != "nest" && key != "generators" && key != "tol" &&
        key != "rng_seed")
      fail("unknown key '" + key + "'");
  }
  if (!root.contains("nest")) fail("missing key 'nest'");
  if (!root.contains("generators")) fail("missing key 'generators'");

  InstanceDocument doc;
  const auto& nest = root["nest"];
  if (!nest.is_array() || nest.size() < 2) fail("'nest' must list at least {0, n}");
  for (const auto& b : nest) {
    if (!b.is_number_integer() && !b.is_number_unsigned())
      fail("'nest' entries must be integers");
    doc.nest_boundaries.push_back(b.get<int>());
  }
  const int n = doc.nest_boundaries.back();
  try {
    Nest probe(n, doc.nest_boundaries);
  } catch (const std::exception& e) {
    fail(std::string("invalid nest: ") + e.what());
  }

  const auto& gens = root["generators"];
  if (!gens.is_array()) fail("'generators' must be an array of matrices");
  for (std::size_t i = 0; i < gens.size(); ++i)
    doc.generators.push_back(parse_matrix(gens[i], n, i));

  if (root.contains("label")) {
    if (!root["label"].is_string()) fail("'label' must be a string");
    doc.label = root["label"].get<std::string>();
  }
  if (root.contains("tol")) {
    if (!root["tol"].is_number()) fail("'tol' must be a number");
    const double tol = root["tol"].get<double>();
    if (!std::isfinite(tol) || tol < 0.0) fail("'tol' must be finite and >= 0");
    doc.tol = tol;
  }
  if (root.contains("rng_seed")) {
    if (!root["rng_seed"].is_number_unsigned() && !root["rng_seed"].is_number_integer())
      fail("'rng_seed' must be a nonnegative integer");
    if (root["rng_seed"].is_number_integer() && root["rng_seed"].get<std::int64_t>() < 0)
      fail("'rng_seed' must be a nonnegative integer");
    doc.rng_seed = root["rng_seed"].get<std::uint64_t>();
  }
  return doc;
}

InstanceSpec to_instance_spec(const InstanceDocument& doc) {
  const int n = doc.nest_boundaries.empty() ? 0 : doc.nest_boundaries.back();
  return {Nest(n, doc.nest_boundaries), doc.generators, doc.label, doc.rng_seed};
}

InstanceDocument from_instance_spec(const InstanceSpec& spec) {
  InstanceDocument doc;
  doc.label = spec.label;
  doc.nest_boundaries = spec.nest.boundaries();
  doc.generators = spec.seed_matrices;
  doc.rng_seed = spec.rng_seed;
  return doc;
}

namespace {

void dump_value(const ordered_json& value, std::string& out) {
  switch (value.type()) {
    case nlohmann::json::value_t::null:
      out += "null";
      break;
    case nlohmann::json::value_t::boolean:
      out += value.get<bool>() ? "true" : "false";
      break;
    case nlohmann::json::value_t::number_integer:
      out += std::to_string(value.get<std::int64_t>());
      break;
    case nlohmann::json::value_t::number_unsigned:
      out += std::to_string(value.get<std::uint64_t>());
      break;
    case nlohmann::json::value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", value.get<double>());
      out += buf;
      break;
    }
    case nlohmann::json::value_t::string:
      out += nlohmann::json(value.get<std::string>()).dump();
      break;
    case nlohmann::json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ',';
        first = false;
        dump_value(item, out);
      }
      out += ']';
      break;
    }
    case nlohmann::json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(key).dump();
        out += ':';
        dump_value(item, out);
      }
      out += '}';
      break;
    }
    default:
      throw std::logic_error("canonical_dump: unsupported value type");
  }
}

}  // namespace

std::string canonical_dump(const ordered_json& value) {
  std::string out;
  dump_value(value, out);
  return out;
}

nlohmann::ordered_json matrix_json(const Matrix& t) {
  ordered_json grid = ordered_json::array();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < t.cols(); ++j)
      row.push_back({t(i, j).real(), t(i, j).imag()});
    grid.push_back(std::move(row));
  }
  return grid;
}

std::string write_instance(const InstanceDocument& doc) {
  ordered_json root;
  root["label"] = doc.label;
  root["nest"] = doc.nest_boundaries;
  ordered_json gens = ordered_json::array();
  for (const auto& g : doc.generators) gens.push_back(matrix_json(g));
  root["generators"] = std::move(gens);
  if (doc.tol) root["tol"] = *doc.tol;
  if (doc.rng_seed) root["rng_seed"] = *doc.rng_seed;
  return canonical_dump(root) + "\n";
}

}  // namespace nestlie
