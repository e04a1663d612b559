#pragma once

#include "sgraph/discretize.hpp"
#include "sgraph/graph.hpp"
#include "sgraph/vertex_algebra.hpp"

namespace sgraph {

// Operator on the glued graph with small edges of length eps * |e|.
DiscreteProblem epsilon_operator_problem(const GluedProblem& problem, double eps);

// Rescaled operator on the extended graph (small edges at unit scale plus one
// unit extension edge per lead), eps >= 0.  Extension caps carry Pi U' - i Theta U = 0.
DiscreteProblem extended_operator_problem(const GluedProblem& problem, double eps);

// Operator on the fixed graph alone with the given condition at M0.
DiscreteProblem fixed_operator_problem(const GluedProblem& problem, double eps, const CMat& A_m0, const CMat& B_m0);

// Condition at a small vertex in the variables of the extended graph, i.e. with
// lead derivatives taken along the extension edges, normalized and rescaled.
RescaledCondition extended_vertex_condition(const GluedProblem& problem, int small_vertex);

EdgeData edge_data_at(const EdgeFields& f, double eps, double scale);

}  // namespace sgraph
