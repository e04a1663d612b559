#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgraph/chebyshev.hpp"
#include "sgraph/common.hpp"
#include "sgraph/graph.hpp"

namespace sgraph {

struct EdgeMesh {
  int order = 16;
  int min_elements = 1;
  double truncation = 10.0;  // native length used for infinite edges
};

// Coefficients in the native edge variable, stored as functions of t = xhat / native length.
// A physical coordinate x relates to the native one by xhat = scale * x; the
// physical form equals scale times the native form and the physical mass is the
// native mass divided by scale.
struct EdgeData {
  Cheb p{1.0};
  Cheb q{0.0};
  Cheb V{0.0};
  double scale = 1.0;
};

// A U + B U' = 0 with physical derivatives in the edge directions; slots follow
// the incidence list of the vertex.
struct VertexCondition {
  CMat A;
  CMat B;
};

struct DiscreteProblem {
  MetricGraph graph;
  std::vector<EdgeData> edges;
  std::vector<VertexCondition> conditions;
};

struct FunctionSpace {
  MetricGraph graph;
  int order = 16;
  std::vector<double> scale;
  std::vector<double> native_length;
  std::vector<int> elements;
  std::vector<int> offset;
  int size = 0;

  int nodes_on(int edge) const { return elements[edge] * order + 1; }
  int end_dof(const EndRef& r) const { return offset[r.edge] + (r.end == 0 ? 0 : nodes_on(r.edge) - 1); }
  // Native coordinate of node k on an edge.
  double node_coordinate(int edge, int k) const;
  double element_length(int edge) const { return native_length[edge] / elements[edge]; }
};

std::shared_ptr<const FunctionSpace> make_space(const MetricGraph& graph, const std::vector<double>& scale,
                                                const EdgeMesh& mesh);

struct DiscreteFunction {
  std::shared_ptr<const FunctionSpace> space;
  CVec c;

  // Value at native coordinate xhat on an edge.
  cplx value(int edge, double xhat) const;
  // Physical derivative of order 1 or 2 at native coordinate xhat.
  cplx derivative(int edge, double xhat, int order = 1) const;
  CVec edge_values(int edge) const { return c.segment(space->offset[edge], space->nodes_on(edge)); }
};

struct VertexData {
  CMat A, B;
  RVec pi, theta;
  CMat U, P, Kperp;
  CMat W;  // orthonormal basis of range(Pperp)
  std::vector<int> dofs;
};

struct AssembledOperator {
  std::shared_ptr<const FunctionSpace> space;
  std::vector<EdgeData> edge_data;
  SpMat stiffness;  // S_{ij} = a(phi_j, phi_i) including natural vertex terms
  SpMat mass;
  SpMat basis;      // columns span the essentially constrained space
  std::vector<VertexData> vertices;

  int dofs() const { return space->size; }
  int vertex_index(const std::string& id) const;
};

AssembledOperator assemble(const DiscreteProblem& problem, const EdgeMesh& mesh = {});

DiscreteFunction zero_function(const AssembledOperator& op);
DiscreteFunction interpolate(std::shared_ptr<const FunctionSpace> space,
                             const std::function<cplx(int edge, double xhat)>& f);

// Solve (H - lambda) u = f weakly, where `load` is the discrete right-hand side
// (already multiplied by the mass matrix and carrying any flux data) and `lift`
// is a dof vector satisfying the essential data.
DiscreteFunction solve(const AssembledOperator& op, cplx lambda, const CVec& load, const CVec& lift);
DiscreteFunction resolve(const AssembledOperator& op, cplx lambda, const DiscreteFunction& f);

// Lift carrying P U_M(u) = P * values at a vertex (other end dofs untouched).
void add_essential_lift(const AssembledOperator& op, CVec& lift, int vertex, const CVec& values);
// Flux datum: Pperp (Pi U' - i Theta U) = -Kperp U + Pperp g at a vertex.
void add_flux_datum(const AssembledOperator& op, CVec& load, int vertex, const CVec& g);

std::vector<DiscreteFunction> null_space(const AssembledOperator& op, double tol = 1e-8,
                                         double* gap_ratio = nullptr);
std::vector<std::pair<double, DiscreteFunction>> small_eigenpairs(const AssembledOperator& op, int count);

struct VertexTrace {
  CVec values;
  CVec derivatives;  // physical, in the edge directions
};

VertexTrace trace(const DiscreteFunction& u, const MetricGraph& graph, int vertex);
VertexTrace trace(const DiscreteFunction& u, int vertex);
// Pi U' - i Theta U with the operator's coefficients.
CVec flux(const AssembledOperator& op, const DiscreteFunction& u, int vertex);

enum class NormKind { L2, H2, Cmax, C2max };

// Norm over the edges whose tag is in the filter (all edges when empty), in
// physical measure unless native is set.
double norm(const DiscreteFunction& u, NormKind kind, const std::vector<SubgraphTag>& tags = {}, bool native = false);
// (u, v) in L2 with physical measure over the selected edges.
cplx inner(const DiscreteFunction& u, const DiscreteFunction& v, const std::vector<SubgraphTag>& tags = {});

// Native edge form int p u'v'* + i q (u'v* - u v'*) + V u v* for given coefficients.
cplx edge_form(const DiscreteFunction& u, const DiscreteFunction& v, int edge, const Cheb& p, const Cheb& q,
               const Cheb& V);

void write_csv(const DiscreteFunction& u, const std::string& path);

// Relative Hermiticity defect of the constrained stiffness matrix.
double hermiticity_defect(const AssembledOperator& op);
// Relative residual of (S - lambda M) u = load on the constrained space.
double residual(const AssembledOperator& op, cplx lambda, const DiscreteFunction& u, const CVec& load);

}  // namespace sgraph
