#pragma once

#include <json.hpp>
#include <string>

#include "naesat/instance.hpp"
#include "naesat/wp.hpp"

namespace naesat {

using Json = nlohmann::ordered_json;

// {"k","d","n","m","edges":[[var,clause,lit],...]} in generation order.
Json instance_to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

// Instance fields plus "n_vars", "n_clauses" and "boundary": [[edge, "0"|"1"], ...].
Json tree_to_json(const BoundaryTree& tree);
BoundaryTree tree_from_json(const Json& j);

// File helpers; failures throw InvalidInput naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Json read_json_file(const std::string& path);

}  // namespace naesat
