#include "sgraph/operators.hpp"

#include <cmath>

namespace sgraph {

namespace {

VertexCondition at_eps(const VertexSeries& c, double eps) { return {c.A.eval(eps), c.B.eval(eps)}; }

VertexCondition dirichlet(int d) { return {CMat::Identity(d, d), CMat::Zero(d, d)}; }

// Truncated infinite edges end in a Dirichlet cap.
void cap_infinite_edges(DiscreteProblem& dp) {
  for (size_t v = 0; v < dp.graph.vertices.size(); ++v) {
    const Vertex& vx = dp.graph.vertices[v];
    if (vx.degree() == 1 && std::isinf(dp.graph.edges[vx.incident[0].edge].length)) dp.conditions[v] = dirichlet(1);
  }
}

}  // namespace

EdgeData edge_data_at(const EdgeFields& f, double eps, double scale) {
  return {f.p.at_eps(eps), f.q.at_eps(eps), f.V.at_eps(eps), scale};
}

DiscreteProblem epsilon_operator_problem(const GluedProblem& problem, double eps) {
  DiscreteProblem dp;
  dp.graph = build_epsilon_graph(problem, eps);
  for (const EdgeFields& f : problem.big_fields) dp.edges.push_back(edge_data_at(f, eps, 1.0));
  for (const EdgeFields& f : problem.small_fields) dp.edges.push_back(edge_data_at(f, eps, 1.0 / eps));
  for (size_t v = 0; v < problem.big.vertices.size(); ++v)
    if (static_cast<int>(v) != problem.m0) dp.conditions.push_back(at_eps(problem.big_conditions[v], eps));
  for (const VertexSeries& c : problem.small_conditions) dp.conditions.push_back(at_eps(c, eps));
  cap_infinite_edges(dp);
  return dp;
}

RescaledCondition extended_vertex_condition(const GluedProblem& problem, int small_vertex) {
  const VertexSeries& c = problem.small_conditions.at(small_vertex);
  const int d = c.B.rows();
  CMat signs = CMat::Identity(d, d);
  for (const Lead& l : leads(problem))
    if (l.target == small_vertex) signs(l.slot, l.slot) = static_cast<double>(l.nu);
  if (problem.eps_order < 2) throw TruncationError("eps-series truncated below order 2");
  return rescale_condition(normalize_condition(c.A, c.B.right_multiply(signs)));
}

DiscreteProblem extended_operator_problem(const GluedProblem& problem, double eps) {
  DiscreteProblem dp;
  dp.graph = build_extended_graph(problem);
  for (const EdgeFields& f : problem.small_fields) dp.edges.push_back(edge_data_at(f, eps, 1.0));
  const std::vector<Lead> ls = leads(problem);
  for (const Lead& l : ls) dp.edges.push_back({{l.sp.eval(eps)}, {eps * l.nu * l.sq.eval(eps)}, {0.0}, 1.0});
  for (size_t v = 0; v < problem.small.vertices.size(); ++v) {
    const RescaledCondition rc = extended_vertex_condition(problem, static_cast<int>(v));
    dp.conditions.push_back({rc.A.eval(eps), rc.B.eval(eps)});
  }
  for (const Lead& l : ls) {
    // head end of the extension edge: Pi = -sp, Theta = -eps nu sq
    const double pi = -l.sp.eval(eps);
    const double theta = -eps * l.nu * l.sq.eval(eps);
    dp.conditions.push_back({CMat::Constant(1, 1, -kI * theta), CMat::Constant(1, 1, pi)});
  }
  return dp;
}

DiscreteProblem fixed_operator_problem(const GluedProblem& problem, double eps, const CMat& A_m0, const CMat& B_m0) {
  DiscreteProblem dp;
  dp.graph = problem.big;
  for (const EdgeFields& f : problem.big_fields) dp.edges.push_back(edge_data_at(f, eps, 1.0));
  for (size_t v = 0; v < problem.big.vertices.size(); ++v) {
    if (static_cast<int>(v) == problem.m0)
      dp.conditions.push_back({A_m0, B_m0});
    else
      dp.conditions.push_back(at_eps(problem.big_conditions[v], eps));
  }
  cap_infinite_edges(dp);
  return dp;
}

}  // namespace sgraph
