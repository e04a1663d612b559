#pragma once

#include <utility>

#include "sgraph/common.hpp"
#include "sgraph/eps_series.hpp"

namespace sgraph {

// Rank with singular values above rel * (largest singular value).
int numerical_rank(const CMat& m, double rel = 1e-10);

struct SelfAdjointReport {
  int rank = 0;
  int dim = 0;
  double defect = 0.0;  // ||S - S*||
  bool pass = false;
};

// S = A Pi^{-1} B* + i B Pi^{-1} Theta Pi^{-1} B* must be Hermitian and rank(A B) = d.
SelfAdjointReport check_self_adjoint(const CMat& A, const CMat& B, const RVec& pi, const RVec& theta,
                                     double tol = 1e-10);

struct NormalizedCondition {
  EpsMatrixSeries A;
  EpsMatrixSeries B;
  int r = 0;  // rank of B(0)
  CMat L;     // constant left multiplier that was applied
};

NormalizedCondition normalize_condition(const EpsMatrixSeries& A, const EpsMatrixSeries& B, double tol = 1e-10);

// U = -(A + i B Pi^{-1}(Theta - I))^{-1} (A + i B Pi^{-1}(Theta + I)) for a fixed pair.
CMat unitary_from_condition(const CMat& A, const CMat& B, const RVec& pi, const RVec& theta);

// U_M(eps) built from (eps A(eps), B(eps)) when scale_a is set (extended-graph
// scaling) and from (A(eps), B(eps)) otherwise.  eps = 0 with scale_a uses
// Richardson extrapolation from eps in {1e-4, 5e-5, 2.5e-5} and a polar projection.
CMat vertex_unitary(const EpsMatrixSeries& A, const EpsMatrixSeries& B, const EpsMatrixSeries& Pi,
                    const EpsMatrixSeries& Theta, double eps, bool scale_a = true);

CMat polar_unitary(const CMat& m);

struct SpectralSplit {
  CMat P;       // projector onto the eigenspace of U near -1
  CMat Pperp;
  CMat range;   // orthonormal basis of range(P)
  CMat corange; // orthonormal basis of range(Pperp)
  CVec corange_eigenvalues;
};

SpectralSplit spectral_split(const CMat& U, double tol = 1e-8);

struct KappaMatrices {
  CMat K;      // -i (U - I)^{-1} P (U + I)
  CMat Kperp;  // i (U + I)^{-1} Pperp (U - I)
};

KappaMatrices kappa_matrices(const CMat& U, const CMat& P);

// Restricted inverse of (U + I) on range(Pperp), zero on range(P).
CMat restricted_inverse_plus(const CMat& U, const CMat& P);

struct ConditionBlock {
  CMat values;       // acts on U_M(u)
  CMat derivatives;  // acts on U'_M(u)
};

struct EssentialNaturalForm {
  ConditionBlock essential;  // P U + K (Pi U' - i Theta U) = 0
  ConditionBlock natural;    // Pperp Pi U' + (Kperp - i Pperp Theta) U = 0
};

EssentialNaturalForm essential_natural_form(const CMat& U, const RVec& pi, const RVec& theta, double tol = 1e-8);

// Transforming function S with S^{-1} P0 S = P(eps) and S = I when P(eps) = P0.
CMat transforming_function(const CMat& P_eps, const CMat& P0);

struct RescaledCondition {
  CMat A0, A1, B0, B1;
  int r = 0;
  // Full rescaled series: A = [eps A+; A-], B = [B+; B- / eps].
  EpsMatrixSeries A;
  EpsMatrixSeries B;
};

RescaledCondition rescale_condition(const NormalizedCondition& cond);

// A = i(U - I) - i(U + I) Theta, B = (U + I) Pi.
std::pair<CMat, CMat> synthesize_condition(const CMat& U, const RVec& pi, const RVec& theta);

// Orthonormal basis of the null space of [A B] in C^{2d}.
CMat condition_nullspace(const CMat& A, const CMat& B, double rel = 1e-10);
// Largest principal-angle sine between two subspaces with orthonormal bases.
double subspace_distance(const CMat& X, const CMat& Y);

}  // namespace sgraph
