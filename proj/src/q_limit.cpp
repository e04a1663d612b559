#include "sgraph/q_limit.hpp"

#include <algorithm>
#include <numeric>

#include "sgraph/operators.hpp"
#include "sgraph/vertex_algebra.hpp"

namespace sgraph {

namespace {

struct VertexTerms {
  CMat Pi0, Th0, Pi1, Th1;
  CMat A1, B1;
  CMat Minv;  // (A0~ - i B0~)^{-1}
  CMat P, R;
};

VertexTerms vertex_terms(const GluedProblem& problem, int v) {
  const RescaledCondition rc = extended_vertex_condition(problem, v);
  const PiTheta pt = pi_theta(problem, v, PiThetaRole::LeadContinued);
  VertexTerms t;
  t.Pi0 = pt.pi.coeff(0);
  t.Th0 = pt.theta.coeff(0);
  t.Pi1 = pt.pi.derivative(1);
  t.Th1 = pt.theta.derivative(1);
  t.A1 = rc.A1;
  t.B1 = rc.B1;
  const CMat Pinv = t.Pi0.inverse();
  const CMat At = rc.A0 + kI * rc.B0 * Pinv * t.Th0;
  const CMat Bt = rc.B0 * Pinv;
  t.Minv = (At - kI * Bt).inverse();
  const CMat U0 = -t.Minv * (At + kI * Bt);
  t.P = spectral_split(U0).P;
  t.R = restricted_inverse_plus(U0, t.P);
  return t;
}

}  // namespace

CMat q_raw(const ThresholdBasis& basis, const GluedProblem& problem) {
  if (problem.eps_order < 2) throw MissingDerivativeError("first-order eps data requires truncation order >= 2");
  const int k = basis.k;
  CMat Q = CMat::Zero(k, k);
  if (k == 0) return Q;

  // bulk part with the first eps-coefficients on the small edges
  for (size_t e = 0; e < problem.small.edges.size(); ++e) {
    const EdgeFields& f = problem.small_fields[e];
    for (int l = 0; l < k; ++l)
      for (int j = 0; j < k; ++j)
        Q(l, j) += edge_form(basis.psi[j], basis.psi[l], static_cast<int>(e), f.p.order(1), f.q.order(1), f.V.order(1));
  }

  for (size_t v = 0; v < problem.small.vertices.size(); ++v) {
    const VertexTerms t = vertex_terms(problem, static_cast<int>(v));
    std::vector<CVec> x(k), F0(k), F1(k), QM(k);
    for (int j = 0; j < k; ++j) {
      const VertexTrace tr = trace(basis.psi[j], static_cast<int>(v));
      x[j] = tr.values;
      F0[j] = t.Pi0 * tr.derivatives - kI * t.Th0 * tr.values;
      F1[j] = t.Pi1 * tr.derivatives - kI * t.Th1 * tr.values;
      QM[j] = 2.0 * kI * t.Minv * (t.A1 * tr.values + t.B1 * tr.derivatives);
    }
    for (int l = 0; l < k; ++l)
      for (int j = 0; j < k; ++j)
        Q(l, j) += x[l].dot(F1[j] + t.R * QM[j]) - 0.5 * kI * (t.P * F0[l]).dot(t.P * QM[j]);
  }
  return Q;
}

cplx q_entry(int i, int j, const ThresholdBasis& basis, const GluedProblem& problem) {
  return q_raw(basis, problem)(i, j);
}

QMatrix assemble_q(const ThresholdBasis& basis, const GluedProblem& problem) {
  QMatrix out;
  const CMat raw = q_raw(basis, problem);
  const int k = basis.k;
  out.Q = 0.5 * (raw + raw.adjoint());
  if (k > 0) {
    Eigen::JacobiSVD<CMat> svd(raw - raw.adjoint());
    out.hermiticity_defect = svd.singularValues()(0);
  }
  const double qnorm = k > 0 ? Eigen::JacobiSVD<CMat>(raw).singularValues()(0) : 0.0;
  if (out.hermiticity_defect > 1e-6 * (1.0 + qnorm))
    throw SelfAdjointnessViolation("Q is not Hermitian (defect " + std::to_string(out.hermiticity_defect) + ")");
  if (k == 0) {
    out.traces_tilde = basis.traces;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(out.Q);
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  const double zero_tol = 1e-8 * (1.0 + qnorm);
  std::stable_partition(idx.begin(), idx.end(), [&](int i) { return std::abs(es.eigenvalues()(i)) <= zero_tol; });
  out.eigenvalues.resize(k);
  out.Y.resize(k, k);
  for (int a = 0; a < k; ++a) {
    out.eigenvalues(a) = es.eigenvalues()(idx[a]);
    out.Y.col(a) = es.eigenvectors().col(idx[a]);
    if (std::abs(out.eigenvalues(a)) <= zero_tol) ++out.k0;
  }
  if (k > 0 && out.k0 == k) out.Y = CMat::Identity(k, k);
  for (int a = 0; a < k; ++a) {
    CVec c = CVec::Zero(basis.op.dofs());
    for (int i = 0; i < k; ++i) c += out.Y(i, a) * basis.psi[i].c;
    out.psi_tilde.push_back({basis.op.space, c});
  }
  out.traces_tilde = basis.traces * out.Y;
  return out;
}

LimitingCondition limiting_vertex_condition(const QMatrix& q, const ThresholdBasis& basis, const GluedProblem& problem) {
  const int d = basis.d0;
  const int k = basis.k;
  const PiTheta pt = pi_theta(problem, problem.m0, PiThetaRole::Fixed);
  const CMat Pi = pt.pi.coeff(0);
  const CMat Th = pt.theta.coeff(0);
  CMat QI = CMat::Identity(d, d);
  QI.topLeftCorner(k, k) = q.Q;
  CMat Ik = CMat::Zero(d, d);
  Ik.topLeftCorner(k, k).setIdentity();
  const CMat Ps = basis.Psi.adjoint();
  return {QI * Ps + kI * Ik * Ps * Th, -Ik * Ps * Pi};
}

AssembledOperator build_limiting_operator(const GluedProblem& problem, const LimitingCondition& cond,
                                          const EdgeMesh& mesh) {
  return assemble(fixed_operator_problem(problem, 0.0, cond.A, cond.B), mesh);
}

CVec threshold_coefficients(const DiscreteFunction& limit_solution, const ThresholdBasis& basis,
                            const GluedProblem& problem) {
  const VertexTrace t = trace(limit_solution, problem.m0);
  return basis.traces.adjoint() * t.values;
}

DiscreteFunction r_gamma_zero(const DiscreteFunction& f_fixed, cplx lambda, const AssembledOperator& h0,
                              const ThresholdBasis& basis, const GluedProblem& problem) {
  DiscreteFunction out{basis.op.space, CVec::Zero(basis.op.dofs())};
  if (basis.k == 0) return out;
  const DiscreteFunction u = resolve(h0, lambda, f_fixed);
  const CVec c = threshold_coefficients(u, basis, problem);
  for (int i = 0; i < basis.k; ++i) out.c += c(i) * basis.psi[i].c;
  return out;
}

}  // namespace sgraph
