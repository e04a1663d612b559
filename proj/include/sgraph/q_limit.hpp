#pragma once

#include <vector>

#include "sgraph/discretize.hpp"
#include "sgraph/graph.hpp"
#include "sgraph/threshold.hpp"

namespace sgraph {

struct QMatrix {
  CMat Q;                      // k x k, Hermitian part
  double hermiticity_defect = 0.0;
  RVec eigenvalues;            // zeros first
  CMat Y;                      // unitary, Y* Q Y = diag(eigenvalues)
  int k0 = 0;
  std::vector<DiscreteFunction> psi_tilde;
  CMat traces_tilde;           // d0 x k
};

// Raw (unsymmetrized) matrix of the first-order threshold form.
CMat q_raw(const ThresholdBasis& basis, const GluedProblem& problem);
cplx q_entry(int i, int j, const ThresholdBasis& basis, const GluedProblem& problem);
QMatrix assemble_q(const ThresholdBasis& basis, const GluedProblem& problem);

struct LimitingCondition {
  CMat A;
  CMat B;
};

LimitingCondition limiting_vertex_condition(const QMatrix& q, const ThresholdBasis& basis, const GluedProblem& problem);
AssembledOperator build_limiting_operator(const GluedProblem& problem, const LimitingCondition& cond,
                                          const EdgeMesh& mesh = {});

// Coefficients c_i = (Psi^{(i)})* U_{M0}((H0 - lambda)^{-1} f) and the sum of c_i psi^{(i)} on the extended graph.
CVec threshold_coefficients(const DiscreteFunction& limit_solution, const ThresholdBasis& basis,
                            const GluedProblem& problem);
DiscreteFunction r_gamma_zero(const DiscreteFunction& f_fixed, cplx lambda, const AssembledOperator& h0,
                              const ThresholdBasis& basis, const GluedProblem& problem);

}  // namespace sgraph
