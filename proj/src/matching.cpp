#include "sgraph/matching.hpp"

#include <algorithm>
#include <cmath>

#include "sgraph/operators.hpp"

namespace sgraph {

LeadProfile LeadProfile::make(const Lead& lead, double eps, cplx lambda) {
  LeadProfile p;
  p.eps = eps;
  p.sp = lead.sp.eval(eps);
  p.sq = lead.sq.eval(eps);
  p.nu = lead.nu;
  p.lambda = lambda;
  p.tau = std::sqrt(lambda * p.sp + p.sq * p.sq);
  p.alpha = eps * p.nu * p.sq / p.sp;
  p.beta = eps * p.tau / p.sp;
  return p;
}

cplx LeadProfile::phi(double t, int derivative) const {
  const cplx e = std::exp(kI * alpha * t);
  const cplx c = std::cos(beta * t), s = std::sin(beta * t);
  const cplx ia = kI * alpha;
  switch (derivative) {
    case 0:
      return e * c;
    case 1:
      return e * (ia * c - beta * s);
    default:
      return e * (ia * ia * c - 2.0 * ia * beta * s - beta * beta * c);
  }
}

cplx LeadProfile::phi_prime(double t, int derivative) const {
  const cplx e = std::exp(kI * alpha * t);
  const cplx c = std::cos(beta * t), s = std::sin(beta * t);
  const cplx ia = kI * alpha;
  const cplx norm = 1.0 / (eps * tau);
  switch (derivative) {
    case 0:
      return norm * e * s;
    case 1:
      return norm * e * (ia * s + beta * c);
    default:
      return norm * e * (ia * ia * s + 2.0 * ia * beta * c - beta * beta * s);
  }
}

cplx LeadProfile::flux(cplx value, cplx derivative) const { return sp * derivative - kI * eps * double(nu) * sq * value; }

double LeadProfile::residual(double t) const {
  auto res = [&](auto f) {
    const cplx w = f(t, 0), w1 = f(t, 1), w2 = f(t, 2);
    const cplx r = -sp * w2 + 2.0 * kI * eps * double(nu) * sq * w1 - eps * eps * lambda * w;
    const double scale = std::max({1.0, std::abs(sp * w2), std::abs(w)});
    return std::abs(r) / scale;
  };
  return std::max(res([&](double s, int d) { return phi(s, d); }), res([&](double s, int d) { return phi_prime(s, d); }));
}

namespace {

DiscreteFunction load_on(const std::shared_ptr<const FunctionSpace>& space, int split, const EdgeFunction& first,
                         const EdgeFunction& second) {
  return interpolate(space, [&](int e, double x) { return e < split ? first(e, x) : second(e - split, x); });
}

std::vector<DiscreteFunction> gamma_solutions(const GluedProblem& problem, const AssembledOperator& op, cplx lambda) {
  std::vector<DiscreteFunction> out;
  const int d0 = problem.d0();
  for (int l = 0; l < d0; ++l) {
    CVec lift = CVec::Zero(op.dofs());
    add_essential_lift(op, lift, problem.m0, CVec::Unit(d0, l));
    out.push_back(solve(op, lambda, CVec::Zero(op.dofs()), lift));
  }
  return out;
}

std::vector<DiscreteFunction> small_solutions(const GluedProblem& problem, const AssembledOperator& op, double eps,
                                              cplx lambda, const CMat& Psi_tilde) {
  std::vector<DiscreteFunction> out;
  const int d0 = problem.d0();
  for (int l = 0; l < d0; ++l) {
    CVec load = CVec::Zero(op.dofs());
    // far-end datum in the edge direction equals minus the outward flux
    for (int i = 0; i < d0; ++i)
      add_flux_datum(op, load, ex_vertex_of_lead(problem, i), CVec::Constant(1, -Psi_tilde(i, l)));
    out.push_back(solve(op, eps * eps * lambda, load, CVec::Zero(op.dofs())));
  }
  return out;
}

struct LeadData {
  CVec value, flux;
};

LeadData lead_data(const GluedProblem& problem, const AssembledOperator& op, const DiscreteFunction& w) {
  const int d0 = problem.d0();
  LeadData out{CVec(d0), CVec(d0)};
  for (const Lead& l : leads(problem)) {
    out.value(l.index) = trace(w, l.target).values(l.slot);
    out.flux(l.index) = flux(op, w, l.target)(l.slot);
  }
  return out;
}

}  // namespace

DiscreteFunction direct_resolvent(const GluedProblem& problem, double eps, cplx lambda, const EdgeFunction& f_fixed,
                                  const EdgeFunction& f_small, const EdgeMesh& mesh) {
  const AssembledOperator op = assemble(epsilon_operator_problem(problem, eps), mesh);
  const int split = static_cast<int>(problem.big.edges.size());
  return resolve(op, lambda, load_on(op.space, split, f_fixed, f_small));
}

AssembledOperator dirichlet_operator(const GluedProblem& problem, double eps, const EdgeMesh& mesh) {
  const int d0 = problem.d0();
  return assemble(fixed_operator_problem(problem, eps, CMat::Identity(d0, d0), CMat::Zero(d0, d0)), mesh);
}

DiscreteFunction dirichlet_resolvent(const GluedProblem& problem, double eps, cplx lambda,
                                     const EdgeFunction& f_fixed, const EdgeMesh& mesh) {
  const AssembledOperator op = dirichlet_operator(problem, eps, mesh);
  return resolve(op, lambda, interpolate(op.space, f_fixed));
}

std::vector<DiscreteFunction> special_solutions_gamma(const GluedProblem& problem, double eps, cplx lambda,
                                                      const EdgeMesh& mesh) {
  return gamma_solutions(problem, dirichlet_operator(problem, eps, mesh), lambda);
}

std::vector<DiscreteFunction> special_solutions_small(const GluedProblem& problem, double eps, cplx lambda,
                                                      const CMat& Psi_tilde, const EdgeMesh& mesh) {
  const AssembledOperator op = assemble(extended_operator_problem(problem, eps), mesh);
  return small_solutions(problem, op, eps, lambda, Psi_tilde);
}

MatchingSystem assemble_matching(const GluedProblem& problem, double eps, cplx lambda, const CMat& Psi_tilde,
                                 const EdgeFunction& f_fixed, const EdgeFunction& f_small, const EdgeMesh& mesh) {
  const int d0 = problem.d0();
  MatchingSystem sys;
  sys.eps = eps;
  sys.lambda = lambda;
  sys.Psi_tilde = Psi_tilde;
  sys.op_fixed = dirichlet_operator(problem, eps, mesh);
  sys.op_ext = assemble(extended_operator_problem(problem, eps), mesh);
  sys.W0 = resolve(sys.op_fixed, lambda, interpolate(sys.op_fixed.space, f_fixed));
  const int split = static_cast<int>(problem.small.edges.size());
  const DiscreteFunction fg = load_on(sys.op_ext.space, split, f_small, zero_edge_function());
  sys.wf = solve(sys.op_ext, eps * eps * lambda, eps * eps * (sys.op_ext.mass * fg.c), CVec::Zero(sys.op_ext.dofs()));
  sys.v_fixed = gamma_solutions(problem, sys.op_fixed, lambda);
  sys.v_small = small_solutions(problem, sys.op_ext, eps, lambda, Psi_tilde);
  for (const Lead& l : leads(problem)) sys.profiles.push_back(LeadProfile::make(l, eps, lambda));

  sys.T_fixed.resize(d0, d0);
  sys.T_small.resize(d0, d0);
  sys.T_small_flux.resize(d0, d0);
  for (int l = 0; l < d0; ++l) {
    sys.T_fixed.col(l) = flux(sys.op_fixed, sys.v_fixed[l], problem.m0);
    const LeadData ld = lead_data(problem, sys.op_ext, sys.v_small[l]);
    sys.T_small.col(l) = ld.value;
    sys.T_small_flux.col(l) = ld.flux;
  }
  const LeadData lf = lead_data(problem, sys.op_ext, sys.wf);
  sys.rhs_value = lf.value;
  sys.rhs_flux = lf.flux - eps * flux(sys.op_fixed, sys.W0, problem.m0);
  sys.system.resize(2 * d0, 2 * d0);
  sys.system << CMat::Identity(d0, d0), -sys.T_small, eps * sys.T_fixed, -sys.T_small_flux;
  return sys;
}

MatchingResult solve_and_reconstruct(const MatchingSystem& sys, const GluedProblem& problem) {
  const int d0 = problem.d0();
  CVec rhs(2 * d0);
  rhs << sys.rhs_value, sys.rhs_flux;
  Eigen::FullPivLU<CMat> lu(sys.system);
  if (!lu.isInvertible()) throw SingularSystemError("matching system is singular");
  const CVec ab = lu.solve(rhs);
  MatchingResult r;
  r.a = ab.head(d0);
  r.b = ab.tail(d0);
  r.W = sys.W0;
  r.w = sys.wf;
  for (int l = 0; l < d0; ++l) {
    r.W.c += r.a(l) * sys.v_fixed[l].c;
    r.w.c += r.b(l) * sys.v_small[l].c;
  }
  const VertexTrace tW = trace(r.W, problem.m0);
  const CVec fW = flux(sys.op_fixed, r.W, problem.m0);
  const LeadData lw = lead_data(problem, sys.op_ext, r.w);
  const double scale = std::max({1.0, tW.values.cwiseAbs().maxCoeff(), lw.flux.cwiseAbs().maxCoeff()});
  r.continuity_defect =
      std::max((tW.values - lw.value).cwiseAbs().maxCoeff(), (sys.eps * fW - lw.flux).cwiseAbs().maxCoeff()) / scale;

  CVec R(d0);
  for (int i = 0; i < d0; ++i) {
    const LeadProfile& p = sys.profiles[i];
    R(i) = std::exp(kI * p.alpha) * (std::cos(p.beta) * lw.flux(i) - sys.eps * p.tau * std::sin(p.beta) * lw.value(i));
  }
  const CVec b_pred = sys.Psi_tilde.adjoint() * R;
  r.profile_defect = (r.b - b_pred).norm() / std::max(1.0, r.b.norm());
  return r;
}

DiscreteFunction glue(const GluedProblem& problem, double eps, const DiscreteFunction& W, const DiscreteFunction& w,
                      const EdgeMesh& mesh) {
  const DiscreteProblem dp = epsilon_operator_problem(problem, eps);
  std::vector<double> scale;
  for (const EdgeData& d : dp.edges) scale.push_back(d.scale);
  const auto space = make_space(dp.graph, scale, mesh);
  DiscreteFunction u{space, CVec::Zero(space->size)};
  const int nb = static_cast<int>(problem.big.edges.size());
  for (int e = 0; e < nb; ++e) u.c.segment(space->offset[e], space->nodes_on(e)) = W.edge_values(e);
  for (size_t e = 0; e < problem.small.edges.size(); ++e)
    u.c.segment(space->offset[nb + e], space->nodes_on(nb + e)) = w.edge_values(static_cast<int>(e));
  return u;
}

}  // namespace sgraph
