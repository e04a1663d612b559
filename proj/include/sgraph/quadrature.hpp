#pragma once

#include "sgraph/common.hpp"

namespace sgraph {

// Nodal Lagrange basis on the Gauss-Lobatto-Legendre nodes of [-1, 1] together
// with a Gauss rule that integrates products of basis functions and low-degree
// coefficients exactly.
struct ReferenceElement {
  int order = 0;
  RVec nodes;    // order + 1 GLL nodes, ascending
  RVec weights;  // barycentric weights
  RMat D;        // nodal differentiation matrix
  RVec qpts, qwts;
  RMat B;   // basis values at qpts (rows) per node (cols)
  RMat DB;  // first derivatives at qpts
  RMat D2B; // second derivatives at qpts

  // Basis values and derivatives at an arbitrary reference point.
  RVec basis_at(double x) const;
  RVec derivative_at(double x) const;
  RVec second_derivative_at(double x) const;

  static const ReferenceElement& get(int order);
};

RVec gll_nodes(int order);
void gauss_rule(int n, RVec& points, RVec& weights);

}  // namespace sgraph
