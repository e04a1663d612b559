#include "fixtures.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "sgraph/threshold.hpp"
#include "sgraph/vertex_algebra.hpp"

namespace fx {

namespace {

using Coeffs = std::vector<CMat>;

Coeffs mul(const Coeffs& a, const Coeffs& b) {
  Coeffs out(a.size() + b.size() - 1, CMat::Zero(a[0].rows(), b[0].cols()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Coeffs axpy(cplx alpha, const Coeffs& x, const Coeffs& y) {
  Coeffs out(std::max(x.size(), y.size()), CMat::Zero(y[0].rows(), y[0].cols()));
  for (size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  for (size_t i = 0; i < y.size(); ++i) out[i] += y[i];
  return out;
}

Coeffs left(const CMat& m, const Coeffs& x) {
  Coeffs out;
  for (const CMat& c : x) out.push_back(m * c);
  return out;
}

// Pair (i(D - C) - i(D + C) Theta, (D + C) Pi) with C^{-1} D = U0 (I - i eps H)^{-1} (I + i eps H).
std::pair<Coeffs, Coeffs> cayley_pair(const CMat& U0, const CMat& H, const EpsMatrixSeries& Pi,
                                      const EpsMatrixSeries& Theta) {
  const int d = static_cast<int>(U0.rows());
  const CMat I = CMat::Identity(d, d);
  const Coeffs C{U0.adjoint(), -kI * H * U0.adjoint()};
  const Coeffs D{I, kI * H};
  const Coeffs dmc = axpy(-1.0, C, D), dpc = axpy(1.0, C, D);
  const Coeffs A = axpy(-kI, mul(dpc, Theta.coeffs()), left(kI * I, dmc));
  return {A, mul(dpc, Pi.coeffs())};
}

VertexSeries fixed_condition(const GluedProblem& p, int v, Rng& rng, bool dirichlet) {
  const int d = p.big.vertices[v].degree();
  if (dirichlet) return {EpsMatrixSeries::constant(CMat::Identity(d, d)), EpsMatrixSeries::constant(CMat::Zero(d, d))};
  const PiTheta pt = pi_theta(p, v, PiThetaRole::Fixed);
  auto [A, B] = cayley_pair(haar_unitary(d, rng), random_hermitian(d, rng, 0.5), pt.pi, pt.theta);
  return {EpsMatrixSeries(A), EpsMatrixSeries(B)};
}

// Condition at a small vertex whose eps = 0 unitary fixes the indicator vectors
// of the given slot clusters, so constants on each cluster solve the threshold problem.
VertexSeries small_condition(const GluedProblem& p, int v, const std::vector<std::vector<int>>& clusters, Rng& rng) {
  const PiTheta pt = pi_theta(p, v, PiThetaRole::LeadContinued);
  const int d = pt.pi.dim();
  const int c = static_cast<int>(clusters.size());
  CMat ind = CMat::Zero(d, c);
  for (int j = 0; j < c; ++j)
    for (int s : clusters[j]) ind(s, j) = 1.0 / std::sqrt(double(clusters[j].size()));
  const CMat Qv = unitary_completion(ind, d);
  CMat block = CMat::Identity(d, d);
  if (d > c) block.bottomRightCorner(d - c, d - c) = haar_unitary(d - c, rng);
  const CMat U0 = Qv * block * Qv.adjoint();
  auto [A, B] = cayley_pair(U0, random_hermitian(d, rng, 0.7), pt.pi, pt.theta);
  A = left(Qv.adjoint(), A);
  B = left(Qv.adjoint(), B);
  // rows 0..c-1 carry derivatives at order 0: divide by eps; the rest: multiply B by eps
  Coeffs Ap(A.size() - 1, CMat::Zero(d, d)), Bp(B.size() + 1, CMat::Zero(d, d));
  for (size_t l = 0; l + 1 < A.size(); ++l) {
    Ap[l].topRows(c) = A[l + 1].topRows(c);
    Ap[l].bottomRows(d - c) = A[l].bottomRows(d - c);
  }
  Ap.push_back(CMat::Zero(d, d));
  Ap.back().bottomRows(d - c) = A.back().bottomRows(d - c);
  for (size_t l = 0; l < B.size(); ++l) {
    Bp[l].topRows(c) = B[l].topRows(c);
    Bp[l + 1].bottomRows(d - c) = B[l].bottomRows(d - c);
  }
  // lead derivatives are stored in the fixed edge directions
  CMat signs = CMat::Identity(d, d);
  for (const Lead& l : leads(p))
    if (l.target == v) signs(l.slot, l.slot) = static_cast<double>(l.nu);
  for (CMat& b : Bp) b = b * signs;
  return {EpsMatrixSeries(Ap), EpsMatrixSeries(Bp)};
}

Cheb random_cheb(Rng& rng, int degree, double scale) {
  Cheb c(degree + 1);
  for (double& x : c) x = scale * uniform(rng, -1.0, 1.0);
  return c;
}

EdgeFields random_fixed_fields(Rng& rng) {
  EdgeFields f;
  Cheb p0 = random_cheb(rng, 2, 0.15);
  p0[0] += 1.0;
  f.p.orders = {p0, random_cheb(rng, 1, 0.1)};
  f.q.orders = {random_cheb(rng, 2, 0.4), random_cheb(rng, 1, 0.3)};
  f.V.orders = {random_cheb(rng, 3, 1.0), random_cheb(rng, 2, 1.0)};
  return f;
}

// Zero-order q and V vanish so that constants solve the threshold problem.
EdgeFields random_small_fields(Rng& rng) {
  EdgeFields f;
  Cheb p0 = random_cheb(rng, 2, 0.2);
  p0[0] += 1.2;
  f.p.orders = {p0, random_cheb(rng, 2, 0.2)};
  f.q.orders = {{0.0}, random_cheb(rng, 2, 0.5)};
  f.V.orders = {{0.0}, random_cheb(rng, 3, 1.0), random_cheb(rng, 2, 0.5)};
  return f;
}

double sin2pi(double t) { return std::sin(2.0 * std::numbers::pi * t); }

}  // namespace

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

CMat random_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n;
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

CMat haar_unitary(int d, Rng& rng) {
  Eigen::HouseholderQR<CMat> qr(random_matrix(d, d, rng));
  CMat Q = qr.householderQ();
  const CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) Q.col(j) *= std::polar(1.0, std::arg(R(j, j)));
  return Q;
}

CMat random_hermitian(int d, Rng& rng, double scale) {
  const CMat m = random_matrix(d, d, rng);
  return 0.5 * scale * (m + m.adjoint());
}

SynthCase random_synthesized(Rng& rng, int d) {
  SynthCase s;
  s.U = haar_unitary(d, rng);
  s.pi.resize(d);
  s.theta.resize(d);
  for (int i = 0; i < d; ++i) {
    s.pi(i) = (rng() % 2 ? 1.0 : -1.0) * uniform(rng, 0.5, 2.0);
    s.theta(i) = uniform(rng, -1.0, 1.0);
  }
  std::tie(s.A, s.B) = synthesize_condition(s.U, s.pi, s.theta);
  return s;
}

GluedProblem random_problem(int topology, std::uint64_t seed) {
  Rng rng(seed);
  GluedProblem p;
  std::vector<std::vector<std::vector<int>>> clusters;
  std::vector<bool> far_dirichlet;
  switch (topology) {
    case 0:
      p.big = make_graph({"M0", "A1", "A2"}, {{"a1", "M0", "A1", 1.0}, {"a2", "A2", "M0", 1.3}}, SubgraphTag::Fixed);
      p.small = make_graph({"M1", "E"}, {{"g", "M1", "E", 1.0}}, SubgraphTag::Small);
      p.partition = {{0, 1}};
      p.targets = {0};
      clusters = {{{0, 1, 2}}, {{0}}};
      far_dirichlet = {false, true, false};
      break;
    case 1:
      p.big = make_graph({"M0", "A1", "A2", "A3"},
                         {{"a1", "M0", "A1", 1.0}, {"a2", "A2", "M0", 0.9}, {"a3", "M0", "A3", 1.2},
                          {"b", "A1", "A3", 1.5}},
                         SubgraphTag::Fixed);
      p.small = make_graph({"M1", "M2", "E"}, {{"e", "M1", "M2", 0.8}, {"f", "M2", "E", 1.2}}, SubgraphTag::Small);
      p.partition = {{0, 1}, {2}};
      p.targets = {0, 1};
      clusters = {{{0}, {1, 2}}, {{0, 1, 2}}, {{0}}};
      far_dirichlet = {false, false, true, false};
      break;
    default:
      p.big = make_graph({"M0", "A1", "A2"},
                         {{"a1", "M0", "A1", 1.0}, {"a2", "M0", "A2", 1.1}, {"l", "A1", "A1", 1.4}},
                         SubgraphTag::Fixed);
      p.small = make_graph({"M1", "E"}, {{"c", "M1", "M1", 1.0}, {"h", "M1", "E", 0.7}}, SubgraphTag::Small);
      p.partition = {{0, 1}};
      p.targets = {0};
      clusters = {{{0, 1, 2, 3, 4}}, {{0}}};
      far_dirichlet = {false, false, true};
      break;
  }
  p.m0 = 0;
  for (size_t e = 0; e < p.big.edges.size(); ++e) p.big_fields.push_back(random_fixed_fields(rng));
  for (size_t e = 0; e < p.small.edges.size(); ++e) p.small_fields.push_back(random_small_fields(rng));
  p.big_conditions.resize(p.big.vertices.size());
  for (size_t v = 1; v < p.big.vertices.size(); ++v)
    p.big_conditions[v] = fixed_condition(p, static_cast<int>(v), rng, far_dirichlet[v]);
  for (size_t v = 0; v < p.small.vertices.size(); ++v)
    p.small_conditions.push_back(small_condition(p, static_cast<int>(v), clusters[v], rng));
  p.validate();
  return p;
}

GluedProblem gauge_transform(const GluedProblem& p, std::uint64_t seed) {
  Rng rng(seed);
  GluedProblem out = p;
  auto apply = [&](VertexSeries& c) {
    if (c.A.empty()) return;
    const int d = c.A.dim();
    const EpsMatrixSeries L({random_matrix(d, d, rng) + 3.0 * CMat::Identity(d, d), random_matrix(d, d, rng)});
    c.A = L * c.A;
    c.B = L * c.B;
  };
  for (size_t v = 0; v < out.big_conditions.size(); ++v)
    if (static_cast<int>(v) != out.m0) apply(out.big_conditions[v]);
  for (VertexSeries& c : out.small_conditions) apply(c);
  out.eps_order = 4;
  return out;
}

GluedProblem embedded_fixture() {
  GluedProblem p;
  p.big = make_graph({"M0", "A-", "A+"}, {{"e-", "M0", "A-", 1.0}, {"e+", "M0", "A+", 1.0}}, SubgraphTag::Fixed);
  p.small = make_graph({"M1", "E1", "E2"}, {{"g1", "M1", "E1", 1.0}, {"g2", "M1", "E2", 1.0}}, SubgraphTag::Small);
  p.m0 = 0;
  p.partition = {{0, 1}};
  p.targets = {0};
  p.big_fields = {EdgeFields{}, EdgeFields{}};
  EdgeFields well;
  well.V.orders = {{-std::numbers::pi * std::numbers::pi}};
  p.small_fields = {well, well};
  auto constant = [](const CMat& m) { return EpsMatrixSeries::constant(m); };
  const CMat one = CMat::Identity(1, 1), zero = CMat::Zero(1, 1);
  p.big_conditions = {{}, {constant(one), constant(zero)}, {constant(one), constant(zero)}};
  CMat A = CMat::Zero(4, 4), B = CMat::Zero(4, 4);
  for (int i = 0; i < 3; ++i) {
    A(i, i) = 1.0;
    A(i, i + 1) = -1.0;
  }
  B.row(3).setOnes();
  p.small_conditions = {{constant(A), constant(B)}, {constant(one), constant(zero)}, {constant(one), constant(zero)}};
  p.validate();
  return p;
}

Cheb cheb_interpolate(double (*f)(double), int degree) {
  const int n = degree + 1;
  Cheb c(n, 0.0);
  for (int k = 0; k < n; ++k) {
    const double theta = std::numbers::pi * (k + 0.5) / n;
    const double fv = f(0.5 * (1.0 + std::cos(theta)));
    for (int j = 0; j < n; ++j) c[j] += 2.0 / n * fv * std::cos(j * theta);
  }
  c[0] *= 0.5;
  return c;
}

GluedProblem star_q_zero() {
  Cheb v = cheb_interpolate(sin2pi, 30);
  for (size_t j = 0; j < v.size(); j += 2) v[j] = 0.0;  // odd about t = 1/2
  return star_problem(true, v);
}

GluedProblem star_sqrt_control() {
  GluedProblem p = star_problem(true, {1.0});
  p.big_fields[0].V.sqrt_term = {2.0};
  return p;
}

EdgeFunction random_source(Rng& rng, int edges) {
  std::vector<std::array<cplx, 3>> c(edges);
  for (auto& a : c)
    for (cplx& z : a) z = cplx(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  return [c](int e, double x) { return c[e][0] + x * (c[e][1] + x * c[e][2]); };
}

}  // namespace fx
