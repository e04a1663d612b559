#pragma once

#include <vector>

#include "sgraph/discretize.hpp"
#include "sgraph/graph.hpp"

namespace sgraph {

struct ThresholdBasis {
  int k = 0;
  int d0 = 0;
  AssembledOperator op;               // extended operator at eps = 0
  std::vector<DiscreteFunction> psi;  // traces orthonormal in C^{d0}
  CMat traces;                        // d0 x k, columns Psi^{(j)}
  CMat Psi;                           // d0 x d0 unitary, first k columns = traces
  double constancy_defect = 0.0;      // max over functions and extension edges
  double gap_ratio = 0.0;
};

struct ConditionAReport {
  bool pass = true;
  int null_dim = 0;
  int kernel_dim = 0;
  double min_trace_singular = 0.0;
  bool ambiguous = false;  // zero cluster not separated by a gap of 1e3
};

AssembledOperator build_threshold_operator(const GluedProblem& problem, const EdgeMesh& mesh = {});

// Values of u on the extension edges, taken at the attachment vertices.
CVec lead_traces(const GluedProblem& problem, const DiscreteFunction& u);

// Throws EmbeddedEigenvalueError when a null vector has vanishing lead traces.
ThresholdBasis compute_threshold_basis(const GluedProblem& problem, const EdgeMesh& mesh = {}, double tol = 1e-7,
                                       ConditionAReport* report = nullptr);

// Deterministic unitary completion of orthonormal columns.
CMat unitary_completion(const CMat& columns, int d);

}  // namespace sgraph
