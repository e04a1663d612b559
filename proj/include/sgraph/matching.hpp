#pragma once

#include <functional>
#include <vector>

#include "sgraph/discretize.hpp"
#include "sgraph/graph.hpp"

namespace sgraph {

// f(edge, xhat) with the edge index local to the fixed or the small graph and
// xhat the native coordinate (x on fixed edges, x / eps on small edges).
using EdgeFunction = std::function<cplx(int edge, double xhat)>;

inline EdgeFunction zero_edge_function() {
  return [](int, double) { return cplx{}; };
}

// Explicit solutions of -sp w'' + 2 i eps nu sq w' - eps^2 lambda w = 0 on an extension edge.
struct LeadProfile {
  double eps = 0.0;
  double sp = 1.0;
  double sq = 0.0;
  int nu = 1;
  cplx lambda;
  cplx tau, alpha, beta;

  static LeadProfile make(const Lead& lead, double eps, cplx lambda);
  // phi: value 1, flux 0 at t = 0; phi_prime: value 0, flux 1 at t = 0.
  cplx phi(double t, int derivative = 0) const;
  cplx phi_prime(double t, int derivative = 0) const;
  cplx flux(cplx value, cplx derivative) const;  // sp w' - i eps nu sq w
  double residual(double t) const;               // max ODE residual of both profiles at t
};

// Direct solve of (H_eps - lambda) u = f on the glued graph with small edges.
DiscreteFunction direct_resolvent(const GluedProblem& problem, double eps, cplx lambda, const EdgeFunction& f_fixed,
                                  const EdgeFunction& f_small, const EdgeMesh& mesh = {});

AssembledOperator dirichlet_operator(const GluedProblem& problem, double eps, const EdgeMesh& mesh = {});
DiscreteFunction dirichlet_resolvent(const GluedProblem& problem, double eps, cplx lambda,
                                     const EdgeFunction& f_fixed, const EdgeMesh& mesh = {});
std::vector<DiscreteFunction> special_solutions_gamma(const GluedProblem& problem, double eps, cplx lambda,
                                                      const EdgeMesh& mesh = {});
// Homogeneous solutions on the extended graph with far-end data
// sp w' - i eps nu sq w = Psi_tilde(:, l) on the extension edges.
std::vector<DiscreteFunction> special_solutions_small(const GluedProblem& problem, double eps, cplx lambda,
                                                      const CMat& Psi_tilde, const EdgeMesh& mesh = {});

struct MatchingSystem {
  double eps = 0.0;
  cplx lambda;
  CMat Psi_tilde;
  CMat T_fixed;       // flux of v_Gamma,l at M0 slot i
  CMat T_small;       // lead value of v_gamma^(l)
  CMat T_small_flux;  // lead flux of v_gamma^(l)
  CVec rhs_value, rhs_flux;
  CMat system;        // 2 d0 x 2 d0
  AssembledOperator op_fixed, op_ext;
  DiscreteFunction W0, wf;
  std::vector<DiscreteFunction> v_fixed, v_small;
  std::vector<LeadProfile> profiles;
};

MatchingSystem assemble_matching(const GluedProblem& problem, double eps, cplx lambda, const CMat& Psi_tilde,
                                 const EdgeFunction& f_fixed, const EdgeFunction& f_small, const EdgeMesh& mesh = {});

struct MatchingResult {
  DiscreteFunction W;  // on the fixed graph
  DiscreteFunction w;  // on the extended graph, native variable
  CVec a, b;
  double continuity_defect = 0.0;
  double profile_defect = 0.0;  // |b - Psi~* L_exp (L_cos a' - eps L_tau L_sin a)|
};

MatchingResult solve_and_reconstruct(const MatchingSystem& sys, const GluedProblem& problem);

// Glue W and w into a function on the graph with small edges.
DiscreteFunction glue(const GluedProblem& problem, double eps, const DiscreteFunction& W, const DiscreteFunction& w,
                      const EdgeMesh& mesh = {});

}  // namespace sgraph
