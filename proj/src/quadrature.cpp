#include "sgraph/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace sgraph {

RVec gll_nodes(int order) {
  const int n = order + 1;
  RVec x(n);
  for (int j = 0; j < n; ++j) x(j) = -std::cos(M_PI * j / order);
  RVec xold = RVec::Constant(n, 2.0);
  RMat P(n, n);
  for (int it = 0; it < 100 && (x - xold).cwiseAbs().maxCoeff() > 1e-16; ++it) {
    xold = x;
    P.col(0).setOnes();
    P.col(1) = x;
    for (int k = 2; k < n; ++k)
      P.col(k) = ((2.0 * k - 1.0) * x.cwiseProduct(P.col(k - 1)) - (k - 1.0) * P.col(k - 2)) / static_cast<double>(k);
    x = xold - (x.cwiseProduct(P.col(n - 1)) - P.col(n - 2)).cwiseQuotient(n * P.col(n - 1));
  }
  x(0) = -1.0;
  x(n - 1) = 1.0;
  return x;
}

void gauss_rule(int n, RVec& points, RVec& weights) {
  RMat J = RMat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(J);
  points = es.eigenvalues();
  weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
}

RVec ReferenceElement::basis_at(double x) const {
  const int n = order + 1;
  RVec b(n);
  for (int j = 0; j < n; ++j)
    if (x == nodes(j)) {
      b.setZero();
      b(j) = 1.0;
      return b;
    }
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    b(j) = weights(j) / (x - nodes(j));
    denom += b(j);
  }
  return b / denom;
}

RVec ReferenceElement::derivative_at(double x) const { return D.transpose() * basis_at(x); }

RVec ReferenceElement::second_derivative_at(double x) const { return (D * D).transpose() * basis_at(x); }

const ReferenceElement& ReferenceElement::get(int order) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<ReferenceElement>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (slot) return *slot;
  if (order < 4) throw DimensionError("polynomial order must be at least 4");
  auto el = std::make_unique<ReferenceElement>();
  const int n = order + 1;
  el->order = order;
  el->nodes = gll_nodes(order);
  el->weights.resize(n);
  for (int j = 0; j < n; ++j) {
    double w = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != j) w *= el->nodes(j) - el->nodes(k);
    el->weights(j) = 1.0 / w;
  }
  el->D = RMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (i != j) el->D(i, j) = (el->weights(j) / el->weights(i)) / (el->nodes(i) - el->nodes(j));
    el->D(i, i) = -el->D.row(i).sum();
  }
  gauss_rule(order + 6, el->qpts, el->qwts);
  const int nq = static_cast<int>(el->qpts.size());
  el->B.resize(nq, n);
  for (int q = 0; q < nq; ++q) el->B.row(q) = el->basis_at(el->qpts(q)).transpose();
  el->DB = el->B * el->D;
  el->D2B = el->DB * el->D;
  slot = std::move(el);
  return *slot;
}

}  // namespace sgraph
