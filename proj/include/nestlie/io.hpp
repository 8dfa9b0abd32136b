#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nestlie/fixtures.hpp"
#include "nestlie/nest.hpp"

namespace nestlie {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// On-disk instance description: a nest given by its boundaries and a list of
// generator matrices with [re, im] entry pairs, plus an optional label,
// tolerance override, and originating RNG seed.
struct InstanceDocument {
  std::string label;
  std::vector<int> nest_boundaries;
  std::vector<Matrix> generators;
  std::optional<double> tol;
  std::optional<std::uint64_t> rng_seed;
};

// Strict parser: unknown keys, malformed grids, non-finite entries, and
// invalid nests are rejected with a ParseError.
InstanceDocument parse_instance(const std::string& json_text);

InstanceSpec to_instance_spec(const InstanceDocument& doc);
InstanceDocument from_instance_spec(const InstanceSpec& spec);

// Canonical serialization: object keys in insertion order, arrays compact,
// floating-point numbers rendered with %.17g so identical documents are
// byte-identical. No trailing newline.
std::string canonical_dump(const nlohmann::ordered_json& value);

// Canonical instance bytes, newline-terminated.
std::string write_instance(const InstanceDocument& doc);

// n x n grid of [re, im] pairs, rows outermost.
nlohmann::ordered_json matrix_json(const Matrix& t);

}  // namespace nestlie
