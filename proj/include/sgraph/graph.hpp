#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "sgraph/chebyshev.hpp"
#include "sgraph/common.hpp"
#include "sgraph/eps_series.hpp"

namespace sgraph {

enum class SubgraphTag { Fixed, Small, Extension };

// One end of an edge: end 0 is the tail (x = 0), end 1 the head (x = length).
struct EndRef {
  int edge = -1;
  int end = 0;
  bool operator==(const EndRef&) const = default;
};

// +1 if the edge variable grows away from the vertex, -1 otherwise.
inline int orientation(const EndRef& r) { return r.end == 0 ? 1 : -1; }

struct Edge {
  std::string id;
  int tail = -1;
  int head = -1;
  double length = 1.0;
  SubgraphTag tag = SubgraphTag::Fixed;
};

struct Vertex {
  std::string id;
  std::vector<EndRef> incident;  // a loop contributes both of its ends
  int degree() const { return static_cast<int>(incident.size()); }
};

struct MetricGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  int vertex_index(const std::string& id) const;  // -1 if absent
  int edge_index(const std::string& id) const;
  // Incidence in edge order; for loops the tail end precedes the head end.
  void rebuild_incidence();
  void validate() const;
  int degree_sum() const;
};

MetricGraph make_graph(const std::vector<std::string>& vertices,
                       const std::vector<std::tuple<std::string, std::string, std::string, double>>& edges,
                       SubgraphTag tag);

enum class FieldRole { P, Q, V };

struct EpsScalarField {
  FieldRole role = FieldRole::V;
  std::vector<Cheb> orders;  // Chebyshev coefficients per eps power
  Cheb sqrt_term;            // coefficient of eps^{1/2}; empty when analytic

  double value(double t, double eps) const;
  Cheb at_eps(double eps) const;
  Cheb order(int l) const;
  ScalarSeries at_point(double t) const;
  int max_spatial_degree() const;
};

struct EdgeFields {
  EpsScalarField p{FieldRole::P, {{1.0}}, {}};
  EpsScalarField q{FieldRole::Q, {{0.0}}, {}};
  EpsScalarField V{FieldRole::V, {{0.0}}, {}};
};

// A_M(eps) U_M + B_M(eps) U'_M = 0 with derivatives in the fixed edge directions.
struct VertexSeries {
  EpsMatrixSeries A;
  EpsMatrixSeries B;
};

struct GluedProblem {
  MetricGraph big;    // the fixed graph, containing M0
  MetricGraph small;  // the graph that is shrunk by eps
  int m0 = -1;
  // Each group J_j lists lead indices i, i.e. positions in big.vertices[m0].incident.
  std::vector<std::vector<int>> partition;
  std::vector<int> targets;  // vertex of the small graph receiving group j
  std::vector<EdgeFields> big_fields;
  std::vector<EdgeFields> small_fields;
  // Conditions for big vertices (entry m0 unused) and small vertices.  At a
  // target M_j the slot order is: small-graph incidence, then the leads of J_j.
  std::vector<VertexSeries> big_conditions;
  std::vector<VertexSeries> small_conditions;
  int eps_order = 3;

  int d0() const { return big.vertices.at(m0).degree(); }
  int n() const { return static_cast<int>(targets.size()); }
  void validate() const;
};

bool same_problem(const GluedProblem& a, const GluedProblem& b);

// Lead i: the edge of the fixed graph incident to M0 at position i.
struct Lead {
  int index = 0;
  EndRef at_m0;    // end of the fixed edge that sits at M0
  int nu = 1;      // orientation of that end with respect to M0
  int group = 0;
  int target = 0;  // small vertex M_j
  int slot = 0;    // slot position at M_j
  ScalarSeries sp;  // p of the fixed edge at M0
  ScalarSeries sq;  // q of the fixed edge at M0
};

std::vector<Lead> leads(const GluedProblem& problem);
int target_degree(const GluedProblem& problem, int small_vertex);

// Vertex layout of the graph with small edges: big vertices except M0, then small vertices.
int eps_vertex_of_big(const GluedProblem& problem, int v);
int eps_vertex_of_small(const GluedProblem& problem, int v);
inline int eps_edge_of_big(const GluedProblem&, int e) { return e; }
inline int eps_edge_of_small(const GluedProblem& problem, int e) {
  return static_cast<int>(problem.big.edges.size()) + e;
}
// Extended graph: small vertices, then one end vertex per lead; small edges, then one edge per lead.
inline int ex_vertex_of_lead(const GluedProblem& problem, int i) {
  return static_cast<int>(problem.small.vertices.size()) + i;
}
inline int ex_edge_of_lead(const GluedProblem& problem, int i) {
  return static_cast<int>(problem.small.edges.size()) + i;
}

MetricGraph build_epsilon_graph(const GluedProblem& problem, double eps);
MetricGraph build_extended_graph(const GluedProblem& problem);

enum class PiThetaRole { Fixed, Small, LeadContinued };

struct PiTheta {
  EpsMatrixSeries pi;
  EpsMatrixSeries theta;
};

// Fixed: vertex of the big graph.  Small: vertex of the small graph, its own
// incidence only.  LeadContinued: small vertex plus lead slots with
// p = sp_i(eps), q = eps * nu_i * sq_i(eps).
PiTheta pi_theta(const GluedProblem& problem, int vertex, PiThetaRole role);

}  // namespace sgraph
