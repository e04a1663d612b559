#pragma once

#include <string>
#include <vector>

#include "sgraph/discretize.hpp"
#include "sgraph/graph.hpp"
#include "sgraph/matching.hpp"
#include "sgraph/q_limit.hpp"
#include "sgraph/threshold.hpp"

namespace sgraph {

struct SweepConfig {
  std::vector<double> eps_list;  // default 2^-3 .. 2^-9
  cplx lambda{0.0, 1.0};
  int order = 16;
  EdgeFunction f_fixed;  // defaults: 1 + x on every fixed edge
  EdgeFunction f_small;  // defaults: 0
  std::string out;       // directory for CSV output; empty for none

  static std::vector<double> default_eps();
  EdgeMesh mesh() const { return {order, 1, 10.0}; }
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares fit of log(value) = slope * log(eps) + intercept.
SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& values);

struct RateReport {
  std::string name;
  std::vector<double> eps;
  std::vector<std::vector<double>> columns;  // one vector per norm
  std::vector<std::string> column_names;
  SlopeFit fit;                              // fitted on the first column
  double target_low = 0.0;
  double target_high = 0.0;
  bool pass = false;

  void write_csv(const std::string& path) const;
};

// The built-in star graph: two unit fixed edges from M0 with Dirichlet far
// ends, one unit small edge with potential eps * V0 and Neumann or Dirichlet
// condition at its free end.
GluedProblem star_problem(bool neumann, const Cheb& V0);

struct LimitData {
  ThresholdBasis basis;
  ConditionAReport condition_a;
  QMatrix q;
  LimitingCondition cond;
  AssembledOperator h0;
  CMat Psi_tilde;  // [Psi_k Y, remaining columns of Psi]
};

LimitData build_limit(const GluedProblem& problem, const EdgeMesh& mesh = {});

// c with u1' + u2' = c u(M0) for a two-edge limiting condition.
double delta_coupling(const LimitingCondition& cond);

struct ConvergeReport {
  RateReport fixed_part;  // |R_Gamma(eps) f - (H0 - lambda)^{-1} f_Gamma|, target slope 1
  RateReport full;        // f of fixed L2(Gamma_eps) norm, target slope >= 1/2
  RateReport small_part;  // |R_gamma(eps) f - R_gamma^(0) f| on gamma, target slope 1
};

ConvergeReport cmd_converge(const SweepConfig& config, const GluedProblem& problem);

struct TaylorReport {
  std::vector<double> eps;
  std::vector<double> residuals;  // per degree 0..6
  std::vector<double> ratios;     // residual[d] / residual[d-1]
  bool pass = false;
  void write_csv(const std::string& path) const;
};

// Samples eps -> R_Gamma(eps, lambda) f at 16 Chebyshev points in (0, 0.15] and fits polynomials of degree 0..6.
TaylorReport cmd_taylor(const SweepConfig& config, const GluedProblem& problem);

struct EigenTrackReport {
  int k = 0;
  int k0 = 0;
  std::vector<double> eps;
  std::vector<std::vector<double>> eigenvalues;  // per eps, k smallest of the extended operator
  RVec fitted_first_order;                       // Lambda^(1), ascending
  RVec predicted_first_order;                    // generalized eigenvalues of (Q, G), ascending
  std::vector<double> zero_mode_slopes;
  double max_relative_error = 0.0;
  bool pass = false;
  void write_csv(const std::string& path) const;
};

EigenTrackReport cmd_eigentrack(const SweepConfig& config, const GluedProblem& problem);

struct StarReport {
  bool neumann = true;
  int k = 0;
  double coupling = 0.0;
  double expected = 0.0;
  double error = 0.0;
  bool dirichlet_limit = false;
  CMat A, B;
  bool pass = false;
};

StarReport cmd_star_example(bool neumann, const Cheb& V0, const EdgeMesh& mesh = {});

struct MatchingRow {
  double eps = 0.0;
  double relative_difference = 0.0;
  double continuity_defect = 0.0;
  double profile_defect = 0.0;
  CVec a, b;
};

std::vector<MatchingRow> cmd_matching_verify(const SweepConfig& config, const GluedProblem& problem);

}  // namespace sgraph
