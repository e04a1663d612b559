#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "sgraph/matching.hpp"
#include "sgraph/operators.hpp"

using namespace sgraph;

namespace {

// One fixed edge M0 -> A (Dirichlet at A) glued to a small edge M1 -> E.
GluedProblem single_lead() {
  GluedProblem p;
  p.big = make_graph({"M0", "A"}, {{"e", "M0", "A", 1.0}}, SubgraphTag::Fixed);
  p.small = make_graph({"M1", "E"}, {{"g", "M1", "E", 1.0}}, SubgraphTag::Small);
  p.m0 = 0;
  p.partition = {{0}};
  p.targets = {0};
  p.big_fields = {EdgeFields{}};
  p.small_fields = {EdgeFields{}};
  auto c = [](const CMat& m) { return EpsMatrixSeries::constant(m); };
  const CMat one = CMat::Identity(1, 1), zero = CMat::Zero(1, 1);
  p.big_conditions = {{}, {c(one), c(zero)}};
  CMat A(2, 2), B(2, 2);
  A << 1, -1, 0, 0;
  B << 0, 0, 1, 1;
  p.small_conditions = {{c(A), c(B)}, {c(zero), c(one)}};
  p.validate();
  return p;
}

double relative_l2(const DiscreteFunction& a, const DiscreteFunction& b) {
  const DiscreteFunction d{b.space, a.c - b.c};
  return norm(d, NormKind::L2) / norm(b, NormKind::L2);
}

// Value at 0 of the interpolating polynomial through (x_a, y_a).
CVec extrapolate_to_zero(const std::vector<double>& x, const std::vector<CVec>& y) {
  CVec out = CVec::Zero(y[0].size());
  for (size_t a = 0; a < x.size(); ++a) {
    double w = 1.0;
    for (size_t c = 0; c < x.size(); ++c)
      if (c != a) w *= -x[c] / (x[a] - x[c]);
    out += w * y[a];
  }
  return out;
}

cplx fd_derivative(const DiscreteFunction& u, int edge, double h) {
  const double c[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
  cplx s = 0.0;
  for (int k = 0; k < 5; ++k) s += c[k] * u.value(edge, k * h);
  return s / (12.0 * h);
}

const auto f_one = [](int e, double) { return cplx(e == 0 ? 1.0 : 0.0); };

}  // namespace

TEST_CASE("lead profiles") {
  Lead lead;
  lead.sp.c = {2.0, 0.3};
  lead.sq.c = {0.7, -0.2};
  lead.nu = -1;
  for (double eps : {0.01, 0.1, 0.25})
    for (cplx lam : {cplx(0, 1), cplx(1, 1), cplx(-3, 0.5)}) {
      const LeadProfile p = LeadProfile::make(lead, eps, lam);
      CHECK(std::abs(p.phi(0.0) - 1.0) < 1e-15);
      CHECK(std::abs(p.flux(p.phi(0.0), p.phi(0.0, 1))) < 1e-14);
      CHECK(std::abs(p.phi_prime(0.0)) < 1e-15);
      CHECK(std::abs(p.flux(p.phi_prime(0.0), p.phi_prime(0.0, 1)) - 1.0) < 1e-14);
      CHECK(p.tau.real() >= 0.0);
      for (double t = 0.0; t <= 1.0; t += 0.125) CHECK(p.residual(t) <= 1e-10);
    }
}

TEST_CASE("Dirichlet resolvent on the fixed graph") {
  const GluedProblem p = star_problem(true, {1.0});
  const AssembledOperator op = dirichlet_operator(p, 0.0);
  const DiscreteFunction f = interpolate(op.space, f_one);
  const DiscreteFunction W = dirichlet_resolvent(p, 0.0, kI, f_one);
  CHECK(residual(op, kI, W, op.mass * f.c) <= 1e-10);
  CHECK(trace(W, p.m0).values.norm() < 1e-14);
  CHECK(dirichlet_resolvent(p, 0.0, kI, zero_edge_function()).c.norm() == 0.0);
  const auto g = [](int, double x) { return cplx(x, 1.0 - x); };
  const DiscreteFunction Rf = resolve(op, kI, f), Rg = resolve(op, -kI, interpolate(op.space, g));
  CHECK(std::abs(inner(Rf, interpolate(op.space, g)) - inner(f, Rg)) < 1e-10);
}

TEST_CASE("special solutions on the fixed graph") {
  const GluedProblem p = star_problem(true, {1.0});
  const auto v = special_solutions_gamma(p, 0.1, kI);
  CMat T(2, 2);
  for (int l = 0; l < 2; ++l) T.col(l) = trace(v[l], p.m0).values;
  CHECK((T - CMat::Identity(2, 2)).norm() <= 1e-10);

  const GluedProblem s = single_lead();
  const cplx lam = kI, k = std::sqrt(lam);
  const DiscreteFunction w = special_solutions_gamma(s, 0.1, lam)[0];
  for (double x : {0.0, 0.3, 0.8, 1.0}) CHECK(std::abs(w.value(0, x) - std::sin(k * (1.0 - x)) / std::sin(k)) <= 1e-8);

  // T_Gamma(0)
  const auto v0 = special_solutions_gamma(p, 0.0, kI);
  const AssembledOperator op0 = dirichlet_operator(p, 0.0);
  CMat T0(2, 2);
  for (int l = 0; l < 2; ++l) T0.col(l) = flux(op0, v0[l], p.m0);
  const auto sv = Eigen::JacobiSVD<CMat>(T0).singularValues();
  CHECK(sv(1) > 0.0);
  CHECK(sv(0) / sv(1) < 1e6);
}

TEST_CASE("special solutions on the extended graph carry the far-end data") {
  for (int t = 0; t < 3; ++t) {
    const GluedProblem p = t == 0 ? star_problem(true, {1.0}) : fx::random_problem(t, 5);
    const LimitData ld = build_limit(p);
    const double eps = 0.1;
    const MatchingSystem sys = assemble_matching(p, eps, kI, ld.Psi_tilde, zero_edge_function(), zero_edge_function());
    const int d0 = p.d0();
    for (int l = 0; l < d0; ++l) {
      for (int i = 0; i < d0; ++i) {
        // outward flux at the cap equals minus the datum in the edge direction
        const cplx f = flux(sys.op_ext, sys.v_small[l], ex_vertex_of_lead(p, i))(0);
        CHECK(std::abs(f + ld.Psi_tilde(i, l)) <= 1e-9);
      }
      for (const Lead& lead : leads(p)) {
        const int e = ex_edge_of_lead(p, lead.index);
        const cplx w0 = sys.v_small[l].value(e, 0.0);
        const cplx fd = lead.sp.eval(eps) * fd_derivative(sys.v_small[l], e, 1e-3) -
                        kI * eps * double(lead.nu) * lead.sq.eval(eps) * w0;
        const double scale = std::max(1.0, std::abs(sys.T_small_flux(lead.index, l)));
        CHECK(std::abs(sys.T_small(lead.index, l) - w0) <= 1e-12 * scale);
        CHECK(std::abs(sys.T_small_flux(lead.index, l) - fd) <= 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("homogeneous data give the trivial solution") {
  const GluedProblem p = star_problem(true, {1.0});
  const LimitData ld = build_limit(p);
  const MatchingSystem sys = assemble_matching(p, 0.1, kI, ld.Psi_tilde, zero_edge_function(), zero_edge_function());
  const MatchingResult r = solve_and_reconstruct(sys, p);
  CHECK(r.a.norm() == 0.0);
  CHECK(r.b.norm() == 0.0);
  CHECK(r.W.c.norm() == 0.0);
}

TEST_CASE("matching agrees with the direct solve on the star") {
  const GluedProblem p = star_problem(true, {1.0});
  const LimitData ld = build_limit(p);
  const auto f_small = [](int, double x) { return cplx(1.0 - x, 0.5); };
  const MatchingSystem sys = assemble_matching(p, 0.1, kI, ld.Psi_tilde, f_one, f_small);
  const MatchingResult r = solve_and_reconstruct(sys, p);
  const DiscreteFunction direct = direct_resolvent(p, 0.1, kI, f_one, f_small);
  CHECK(relative_l2(glue(p, 0.1, r.W, r.w), direct) <= 1e-8);
  CHECK(r.continuity_defect <= 1e-8);
  CHECK(r.profile_defect <= 1e-8);
}

TEST_CASE("random problems: matching against direct solves") {
  for (int t = 0; t < 3; ++t) {
    const GluedProblem p = fx::random_problem(t, 200 + t);
    const LimitData ld = build_limit(p);
    fx::Rng rng(t);
    const EdgeFunction fG = fx::random_source(rng, static_cast<int>(p.big.edges.size()));
    const EdgeFunction fg = fx::random_source(rng, static_cast<int>(p.small.edges.size()));
    const cplx lam(0.4, 1.3);
    const MatchingSystem sys = assemble_matching(p, 0.12, lam, ld.Psi_tilde, fG, fg);
    const MatchingResult r = solve_and_reconstruct(sys, p);
    CHECK(relative_l2(glue(p, 0.12, r.W, r.w), direct_resolvent(p, 0.12, lam, fG, fg)) <= 1e-7);
    CHECK(r.continuity_defect <= 1e-8);
  }
}

TEST_CASE("a and b as eps goes to zero") {
  const GluedProblem p = star_problem(true, {1.0});
  const LimitData ld = build_limit(p);
  std::vector<double> eps;
  std::vector<CVec> as, bs;
  for (int j = 4; j <= 9; ++j) {
    eps.push_back(std::ldexp(1.0, -j));
    const MatchingSystem sys = assemble_matching(p, eps.back(), kI, ld.Psi_tilde, f_one, zero_edge_function());
    const MatchingResult r = solve_and_reconstruct(sys, p);
    as.push_back(r.a);
    bs.push_back(r.b);
  }
  const CVec b0 = extrapolate_to_zero(eps, bs);
  CHECK(b0.norm() <= 1e-4);
  const CVec a0 = extrapolate_to_zero(eps, as);
  const DiscreteFunction u0 = resolve(ld.h0, kI, interpolate(ld.h0.space, f_one));
  const CVec oracle = ld.basis.Psi.adjoint() * trace(u0, p.m0).values;
  CHECK((ld.basis.Psi.adjoint() * a0 - oracle).norm() <= 1e-3 * oracle.norm());

  // polynomial fits in eps with decaying residuals
  const int n = static_cast<int>(eps.size());
  for (const std::vector<CVec>* ys : {&as, &bs}) {
    std::vector<double> res;
    for (int deg = 0; deg <= 3; ++deg) {
      RMat V(n, deg + 1);
      for (int i = 0; i < n; ++i)
        for (int c = 0; c <= deg; ++c) V(i, c) = std::pow(eps[i] / eps[0], c);
      double r2 = 0.0;
      for (int comp = 0; comp < (*ys)[0].size(); ++comp) {
        CVec y(n);
        for (int i = 0; i < n; ++i) y(i) = (*ys)[i](comp);
        const CMat Vc = V.cast<cplx>();
        const CVec coef = Vc.colPivHouseholderQr().solve(y);
        r2 += (Vc * coef - y).squaredNorm();
      }
      res.push_back(std::sqrt(r2));
    }
    for (int d = 1; d <= 3; ++d)
      if (res[d - 1] > 1e-11) CHECK(res[d] <= 0.5 * res[d - 1]);
  }
}
