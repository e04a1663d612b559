#include "sgraph/threshold.hpp"

#include <algorithm>

#include "sgraph/operators.hpp"
#include "sgraph/vertex_algebra.hpp"

namespace sgraph {

AssembledOperator build_threshold_operator(const GluedProblem& problem, const EdgeMesh& mesh) {
  return assemble(extended_operator_problem(problem, 0.0), mesh);
}

CVec lead_traces(const GluedProblem& problem, const DiscreteFunction& u) {
  const int d0 = problem.d0();
  CVec t(d0);
  for (int i = 0; i < d0; ++i) t(i) = u.c(u.space->end_dof({ex_edge_of_lead(problem, i), 0}));
  return t;
}

CMat unitary_completion(const CMat& columns, int d) {
  const int k = static_cast<int>(columns.cols());
  CMat M(d, k + d);
  M << columns, CMat::Identity(d, d);
  Eigen::HouseholderQR<CMat> qr(M);
  CMat Q = qr.householderQ() * CMat::Identity(d, d);
  Q.leftCols(k) = columns;
  return Q;
}

ThresholdBasis compute_threshold_basis(const GluedProblem& problem, const EdgeMesh& mesh, double tol,
                                       ConditionAReport* report) {
  ThresholdBasis tb;
  tb.d0 = problem.d0();
  tb.op = build_threshold_operator(problem, mesh);
  const std::vector<DiscreteFunction> ns = null_space(tb.op, tol, &tb.gap_ratio);
  const int m = static_cast<int>(ns.size());
  ConditionAReport rep;
  rep.null_dim = m;
  rep.ambiguous = tb.gap_ratio < 1e3;
  CMat T(tb.d0, m);
  for (int j = 0; j < m; ++j) T.col(j) = lead_traces(problem, ns[j]);
  if (m > 0) {
    Eigen::JacobiSVD<CMat> svd(T);
    const RVec& s = svd.singularValues();
    rep.min_trace_singular = s.size() < m ? 0.0 : s(m - 1);
    int deficient = m - static_cast<int>(s.size());
    for (int i = 0; i < s.size(); ++i)
      if (s(i) < 1e-6) ++deficient;
    rep.kernel_dim = deficient;
    rep.pass = deficient == 0;
  }
  if (report) *report = rep;
  if (!rep.pass)
    throw EmbeddedEigenvalueError("a threshold solution has vanishing traces on every lead");

  tb.k = m;
  if (m > 0) {
    Eigen::HouseholderQR<CMat> qr(T);
    const CMat Qthin = qr.householderQ() * CMat::Identity(tb.d0, m);
    const CMat R = Qthin.adjoint() * T;  // m x m upper triangular up to round-off
    const CMat Rinv = R.inverse();
    for (int j = 0; j < m; ++j) {
      CVec c = CVec::Zero(tb.op.dofs());
      for (int l = 0; l < m; ++l) c += Rinv(l, j) * ns[l].c;
      tb.psi.push_back({tb.op.space, c});
    }
    tb.traces = CMat(tb.d0, m);
    for (int j = 0; j < m; ++j) tb.traces.col(j) = lead_traces(problem, tb.psi[j]);
    // re-orthonormalize the traces exactly
    const CMat G = tb.traces.adjoint() * tb.traces;
    Eigen::SelfAdjointEigenSolver<CMat> es(G);
    const CMat Ginvsqrt =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    for (int j = 0; j < m; ++j) {
      CVec c = CVec::Zero(tb.op.dofs());
      for (int l = 0; l < m; ++l) c += Ginvsqrt(l, j) * tb.psi[l].c;
      tb.psi[j].c = c;
    }
    for (int j = 0; j < m; ++j) tb.traces.col(j) = lead_traces(problem, tb.psi[j]);
  } else {
    tb.traces = CMat(tb.d0, 0);
  }
  tb.Psi = unitary_completion(tb.traces, tb.d0);

  for (const DiscreteFunction& f : tb.psi)
    for (int i = 0; i < tb.d0; ++i) {
      const CVec v = f.edge_values(ex_edge_of_lead(problem, i));
      const cplx mean = v.mean();
      tb.constancy_defect = std::max(tb.constancy_defect, (v.array() - mean).abs().maxCoeff());
    }
  return tb;
}

}  // namespace sgraph
