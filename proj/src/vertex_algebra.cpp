#include "sgraph/vertex_algebra.hpp"

#include <cmath>
#include <vector>

namespace sgraph {

namespace {

RVec real_diagonal(const CMat& m) { return m.diagonal().real(); }

CMat identity(int d) { return CMat::Identity(d, d); }

// Orthonormal basis of the range of a Hermitian projector.
CMat projector_basis(const CMat& P) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (P + P.adjoint()));
  std::vector<int> cols;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5) cols.push_back(i);
  CMat basis(P.rows(), static_cast<int>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) basis.col(static_cast<int>(c)) = es.eigenvectors().col(cols[c]);
  return basis;
}

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

int numerical_rank(const CMat& m, double rel) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(m);
  const RVec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

SelfAdjointReport check_self_adjoint(const CMat& A, const CMat& B, const RVec& pi, const RVec& theta, double tol) {
  const int d = static_cast<int>(A.rows());
  if (A.cols() != d || B.rows() != d || B.cols() != d || pi.size() != d || theta.size() != d)
    throw DimensionError("check_self_adjoint: inconsistent sizes");
  for (int i = 0; i < d; ++i)
    if (pi(i) == 0.0) throw SingularPiError("Pi has a zero diagonal entry");
  CMat AB(d, 2 * d);
  AB << A, B;
  const CMat pinv = pi.cwiseInverse().cast<cplx>().asDiagonal();
  const CMat th = theta.cast<cplx>().asDiagonal();
  const CMat S = A * pinv * B.adjoint() + kI * B * pinv * th * pinv * B.adjoint();
  SelfAdjointReport rep;
  rep.dim = d;
  rep.rank = numerical_rank(AB);
  rep.defect = spectral_norm(S - S.adjoint());
  rep.pass = rep.rank == d && rep.defect <= tol;
  return rep;
}

NormalizedCondition normalize_condition(const EpsMatrixSeries& A, const EpsMatrixSeries& B, double tol) {
  const int d = A.rows();
  const CMat A0 = A.coeff(0);
  const CMat B0 = B.coeff(0);
  CMat AB(d, 2 * d);
  AB << A0, B0;
  if (numerical_rank(AB, tol) < d) throw RankError("rank(A(0) B(0)) is below the vertex degree");

  // greedy choice of independent rows of B(0), kept in their original order
  const int r = numerical_rank(B0, tol);
  std::vector<int> chosen, rest;
  for (int i = 0; i < d; ++i) {
    CMat trial(static_cast<int>(chosen.size()) + 1, d);
    for (size_t k = 0; k < chosen.size(); ++k) trial.row(static_cast<int>(k)) = B0.row(chosen[k]);
    trial.row(static_cast<int>(chosen.size())) = B0.row(i);
    if (static_cast<int>(chosen.size()) < r && numerical_rank(trial, tol) == static_cast<int>(chosen.size()) + 1)
      chosen.push_back(i);
    else
      rest.push_back(i);
  }
  CMat L = CMat::Zero(d, d);
  for (int k = 0; k < r; ++k) L(k, chosen[k]) = 1.0;
  CMat Bs(r, d);
  for (int k = 0; k < r; ++k) Bs.row(k) = B0.row(chosen[k]);
  for (size_t k = 0; k < rest.size(); ++k) {
    const int row = r + static_cast<int>(k);
    L(row, rest[k]) = 1.0;
    if (r > 0) {
      // B0.row(rest) = c * Bs
      const CVec c = Bs.transpose().colPivHouseholderQr().solve(B0.row(rest[k]).transpose());
      for (int s = 0; s < r; ++s) L(row, chosen[s]) -= c(s);
    }
  }
  NormalizedCondition out;
  out.L = L;
  out.r = r;
  out.A = A.left_multiply(L);
  std::vector<CMat> bc = B.left_multiply(L).coeffs();
  bc[0].bottomRows(d - r).setZero();
  out.B = EpsMatrixSeries(bc);
  const CMat An = out.A.coeff(0);
  const double scale = std::max(1.0, An.norm());
  for (int i = r; i < d; ++i)
    if (An.row(i).norm() <= tol * scale) throw DegenerateRowError("a row of A(0) paired with a zero row of B(0) vanishes");
  return out;
}

CMat unitary_from_condition(const CMat& A, const CMat& B, const RVec& pi, const RVec& theta) {
  const int d = static_cast<int>(A.rows());
  for (int i = 0; i < d; ++i)
    if (pi(i) == 0.0) throw SingularPiError("Pi has a zero diagonal entry");
  const CMat bp = B * pi.cwiseInverse().cast<cplx>().asDiagonal();
  const CMat th = theta.cast<cplx>().asDiagonal();
  const CMat M1 = A + kI * bp * (th - identity(d));
  const CMat M2 = A + kI * bp * (th + identity(d));
  Eigen::JacobiSVD<CMat> svd(M1);
  const RVec& s = svd.singularValues();
  if (d > 0 && (s(0) == 0.0 || s(d - 1) < 1e-13 * s(0)))
    throw NearSingularError("vertex condition does not define a unitary matrix");
  return -M1.fullPivLu().solve(M2);
}

CMat polar_unitary(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMat vertex_unitary(const EpsMatrixSeries& A, const EpsMatrixSeries& B, const EpsMatrixSeries& Pi,
                    const EpsMatrixSeries& Theta, double eps, bool scale_a) {
  auto at = [&](double e) {
    const CMat a = scale_a ? CMat(e * A.eval(e)) : A.eval(e);
    return unitary_from_condition(a, B.eval(e), real_diagonal(Pi.eval(e)), real_diagonal(Theta.eval(e)));
  };
  if (eps > 0.0 || !scale_a) return at(eps);
  const double h = 1e-4;
  const CMat f1 = at(h), f2 = at(h / 2), f3 = at(h / 4);
  const CMat r1 = 2.0 * f2 - f1;
  const CMat r2 = 2.0 * f3 - f2;
  return polar_unitary((4.0 * r2 - r1) / 3.0);
}

SpectralSplit spectral_split(const CMat& U, double tol) {
  const int d = static_cast<int>(U.rows());
  SpectralSplit out;
  if (d == 0) {
    out.P = out.Pperp = CMat(0, 0);
    out.range = out.corange = CMat(0, 0);
    return out;
  }
  Eigen::ComplexEigenSolver<CMat> es(U);
  std::vector<int> minus;
  for (int i = 0; i < d; ++i) {
    const double dist = std::abs(es.eigenvalues()(i) + 1.0);
    if ((dist > 0.5 * tol && dist <= tol) || (dist > tol && dist < 2.0 * tol))
      throw ClusterAmbiguityError("eigenvalue of U lies on the boundary of the -1 cluster");
    if (dist <= tol) minus.push_back(i);
  }
  CMat Vm(d, static_cast<int>(minus.size()));
  for (size_t c = 0; c < minus.size(); ++c) Vm.col(static_cast<int>(c)) = es.eigenvectors().col(minus[c]);
  CMat range = CMat(d, 0);
  if (Vm.cols() > 0) {
    Eigen::HouseholderQR<CMat> qr(Vm);
    range = qr.householderQ() * CMat::Identity(d, Vm.cols());
  }
  out.range = range;
  out.P = range * range.adjoint();
  out.Pperp = identity(d) - out.P;
  out.corange = projector_basis(out.Pperp);
  const CMat restricted = out.corange.adjoint() * U * out.corange;
  out.corange_eigenvalues = restricted.eigenvalues();
  return out;
}

CMat restricted_inverse_plus(const CMat& U, const CMat& P) {
  const int d = static_cast<int>(U.rows());
  const CMat C = projector_basis(identity(d) - P);
  if (C.cols() == 0) return CMat::Zero(d, d);
  const CMat block = C.adjoint() * (U + identity(d)) * C;
  return C * block.inverse() * C.adjoint();
}

KappaMatrices kappa_matrices(const CMat& U, const CMat& P) {
  const int d = static_cast<int>(U.rows());
  KappaMatrices k;
  k.K = CMat::Zero(d, d);
  k.Kperp = CMat::Zero(d, d);
  const CMat D = projector_basis(P);
  if (D.cols() > 0) {
    const CMat block = D.adjoint() * (U - identity(d)) * D;
    k.K = -kI * D * block.inverse() * D.adjoint() * (U + identity(d));
  }
  k.Kperp = kI * restricted_inverse_plus(U, P) * (U - identity(d));
  return k;
}

EssentialNaturalForm essential_natural_form(const CMat& U, const RVec& pi, const RVec& theta, double tol) {
  const SpectralSplit split = spectral_split(U, tol);
  const KappaMatrices kap = kappa_matrices(U, split.P);
  const CMat Pi = pi.cast<cplx>().asDiagonal();
  const CMat Th = theta.cast<cplx>().asDiagonal();
  EssentialNaturalForm f;
  f.essential.values = split.P - kI * kap.K * Th;
  f.essential.derivatives = kap.K * Pi;
  f.natural.values = kap.Kperp - kI * split.Pperp * Th;
  f.natural.derivatives = split.Pperp * Pi;
  return f;
}

CMat transforming_function(const CMat& P_eps, const CMat& P0) {
  const int d = static_cast<int>(P0.rows());
  const CMat diff = P_eps - P0;
  if (spectral_norm(diff) >= 1.0 - 1e-12) throw ProjectorGapError("projectors are too far apart");
  const CMat R = diff * diff;
  Eigen::SelfAdjointEigenSolver<CMat> es(identity(d) - 0.5 * (R + R.adjoint()));
  const CMat root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal() *
                    es.eigenvectors().adjoint();
  const CMat M = P_eps * P0 + (identity(d) - P_eps) * (identity(d) - P0);
  return M.fullPivLu().solve(root);
}

RescaledCondition rescale_condition(const NormalizedCondition& cond) {
  const int d = cond.A.rows();
  const int r = cond.r;
  const EpsMatrixSeries Ap = cond.A.row_block(0, r), Am = cond.A.row_block(r, d - r);
  const EpsMatrixSeries Bp = cond.B.row_block(0, r), Bm = cond.B.row_block(r, d - r);
  RescaledCondition out;
  out.r = r;
  out.A0 = CMat::Zero(d, d);
  out.A0.bottomRows(d - r) = Am.coeff(0);
  out.B0.resize(d, d);
  out.B0 << Bp.coeff(0), Bm.derivative(1);
  out.A1.resize(d, d);
  out.A1 << Ap.coeff(0), Am.derivative(1);
  out.B1.resize(d, d);
  out.B1 << Bp.derivative(1), 0.5 * Bm.derivative(2);
  out.A = EpsMatrixSeries::stack_rows(Ap.multiply_by_eps(), Am);
  out.B = EpsMatrixSeries::stack_rows(Bp, Bm.divide_by_eps());
  return out;
}

std::pair<CMat, CMat> synthesize_condition(const CMat& U, const RVec& pi, const RVec& theta) {
  const int d = static_cast<int>(U.rows());
  const CMat Th = theta.cast<cplx>().asDiagonal();
  const CMat A = kI * (U - identity(d)) - kI * (U + identity(d)) * Th;
  const CMat B = (U + identity(d)) * pi.cast<cplx>().asDiagonal();
  return {A, B};
}

CMat condition_nullspace(const CMat& A, const CMat& B, double rel) {
  const int d = static_cast<int>(A.rows());
  CMat AB(A.rows(), 2 * A.cols());
  AB << A, B;
  Eigen::JacobiSVD<CMat> svd(AB, Eigen::ComputeFullV);
  const int r = numerical_rank(AB, rel);
  (void)d;
  return svd.matrixV().rightCols(AB.cols() - r);
}

double subspace_distance(const CMat& X, const CMat& Y) {
  if (X.cols() != Y.cols()) return 1.0;
  return spectral_norm(X * X.adjoint() - Y * Y.adjoint());
}

}  // namespace sgraph
