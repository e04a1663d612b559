#pragma once

#include <string>

#include "sgraph/graph.hpp"

namespace sgraph {

// Problem files are JSON documents; see README for the schema.
GluedProblem parse_problem(const std::string& text);
GluedProblem load_problem(const std::string& path);
std::string serialize_problem(const GluedProblem& problem);

}  // namespace sgraph
