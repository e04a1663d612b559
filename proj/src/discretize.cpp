#include "sgraph/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include <Eigen/SparseLU>

#include "sgraph/quadrature.hpp"
#include "sgraph/vertex_algebra.hpp"

namespace sgraph {

namespace {

using Triplet = Eigen::Triplet<cplx>;

bool selected(const Edge& e, const std::vector<SubgraphTag>& tags) {
  return tags.empty() || std::find(tags.begin(), tags.end(), e.tag) != tags.end();
}

// Element index and reference coordinate of a native point.
std::pair<int, double> locate(const FunctionSpace& s, int edge, double xhat) {
  const double h = s.element_length(edge);
  int k = static_cast<int>(std::floor(xhat / h));
  k = std::clamp(k, 0, s.elements[edge] - 1);
  const double ref = std::clamp(2.0 * (xhat - k * h) / h - 1.0, -1.0, 1.0);
  return {k, ref};
}

CVec element_coeffs(const DiscreteFunction& u, int edge, int k) {
  const int N = u.space->order;
  return u.c.segment(u.space->offset[edge] + k * N, N + 1);
}

CMat reduced_dense(const SpMat& Z, const SpMat& A) {
  const SpMat r = SpMat(Z.adjoint()) * A * Z;
  return CMat(r);
}

}  // namespace

double FunctionSpace::node_coordinate(int edge, int k) const {
  const ReferenceElement& el = ReferenceElement::get(order);
  const int e = std::min(k / order, elements[edge] - 1);
  const int local = k - e * order;
  const double h = element_length(edge);
  return e * h + 0.5 * h * (el.nodes(local) + 1.0);
}

std::shared_ptr<const FunctionSpace> make_space(const MetricGraph& graph, const std::vector<double>& scale,
                                                const EdgeMesh& mesh) {
  auto s = std::make_shared<FunctionSpace>();
  s->graph = graph;
  s->order = mesh.order;
  s->scale = scale;
  if (s->scale.empty()) s->scale.assign(graph.edges.size(), 1.0);
  if (s->scale.size() != graph.edges.size()) throw DimensionError("one scale per edge is required");
  int offset = 0;
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const double len = graph.edges[e].length;
    const double native = std::isinf(len) ? mesh.truncation : len * s->scale[e];
    s->native_length.push_back(native);
    s->elements.push_back(std::max(mesh.min_elements, static_cast<int>(std::ceil(native - 1e-9))));
    s->offset.push_back(offset);
    offset += s->elements.back() * mesh.order + 1;
  }
  s->size = offset;
  return s;
}

cplx DiscreteFunction::value(int edge, double xhat) const {
  const auto [k, ref] = locate(*space, edge, xhat);
  const ReferenceElement& el = ReferenceElement::get(space->order);
  return (element_coeffs(*this, edge, k).transpose() * el.basis_at(ref).cast<cplx>())(0);
}

cplx DiscreteFunction::derivative(int edge, double xhat, int order) const {
  const auto [k, ref] = locate(*space, edge, xhat);
  const ReferenceElement& el = ReferenceElement::get(space->order);
  const double factor = space->scale[edge] * 2.0 / space->element_length(edge);
  const RVec d = order == 1 ? el.derivative_at(ref) : el.second_derivative_at(ref);
  return std::pow(factor, order) * (element_coeffs(*this, edge, k).transpose() * d.cast<cplx>())(0);
}

int AssembledOperator::vertex_index(const std::string& id) const {
  const int v = space->graph.vertex_index(id);
  if (v < 0) throw UnknownVertexError("unknown vertex " + id);
  return v;
}

AssembledOperator assemble(const DiscreteProblem& problem, const EdgeMesh& mesh) {
  const MetricGraph& g = problem.graph;
  if (problem.edges.size() != g.edges.size()) throw DimensionError("edge data count does not match the graph");
  if (problem.conditions.size() != g.vertices.size())
    throw ConditionMismatchError("vertex condition count does not match the graph");
  std::vector<double> scale;
  for (const EdgeData& d : problem.edges) scale.push_back(d.scale);

  AssembledOperator op;
  op.space = make_space(g, scale, mesh);
  op.edge_data = problem.edges;
  const FunctionSpace& s = *op.space;
  const ReferenceElement& el = ReferenceElement::get(mesh.order);
  const int N = mesh.order;
  const int nq = static_cast<int>(el.qpts.size());

  std::vector<Triplet> st, mt;
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const EdgeData& d = problem.edges[e];
    const double h = s.element_length(e);
    const double L = s.native_length[e];
    const double jac = 0.5 * h;
    for (int k = 0; k < s.elements[e]; ++k) {
      RVec pw(nq), qw(nq), vw(nq), w(nq);
      for (int q = 0; q < nq; ++q) {
        const double t = (k * h + jac * (el.qpts(q) + 1.0)) / L;
        const double p = cheb_eval_unit(d.p, t);
        if (!(p > 0.0)) throw EllipticityError("p is not positive on edge " + g.edges[e].id);
        w(q) = el.qwts(q) * jac;
        pw(q) = w(q) * p / (jac * jac);
        qw(q) = w(q) * cheb_eval_unit(d.q, t) / jac;
        vw(q) = w(q) * cheb_eval_unit(d.V, t);
      }
      const RMat K = el.DB.transpose() * pw.asDiagonal() * el.DB + el.B.transpose() * vw.asDiagonal() * el.B;
      // i int q (u' v - u v') with S_ab = a(phi_b, phi_a)
      const RMat C = el.B.transpose() * qw.asDiagonal() * el.DB;
      const RMat Mloc = el.B.transpose() * w.asDiagonal() * el.B;
      const int base = s.offset[e] + k * N;
      for (int a = 0; a <= N; ++a)
        for (int b = 0; b <= N; ++b) {
          const cplx val = d.scale * (K(a, b) + kI * (C(a, b) - C(b, a)));
          st.emplace_back(base + a, base + b, val);
          mt.emplace_back(base + a, base + b, Mloc(a, b) / d.scale);
        }
    }
  }

  std::vector<bool> is_end(s.size, false);
  std::vector<Triplet> zt;
  int col = 0;
  op.vertices.resize(g.vertices.size());
  for (size_t v = 0; v < g.vertices.size(); ++v) {
    const Vertex& vx = g.vertices[v];
    const int deg = vx.degree();
    const VertexCondition& c = problem.conditions[v];
    if (c.A.rows() != deg || c.A.cols() != deg || c.B.rows() != deg || c.B.cols() != deg)
      throw ConditionMismatchError("condition at " + vx.id + " does not match the vertex degree");
    VertexData& vd = op.vertices[v];
    vd.A = c.A;
    vd.B = c.B;
    vd.pi.resize(deg);
    vd.theta.resize(deg);
    for (int a = 0; a < deg; ++a) {
      const EndRef& r = vx.incident[a];
      const EdgeData& d = problem.edges[r.edge];
      const double t = r.end == 0 ? 0.0 : 1.0;
      const int nu = orientation(r);
      vd.pi(a) = nu * cheb_eval_unit(d.p, t);
      vd.theta(a) = nu * d.scale * cheb_eval_unit(d.q, t);
      vd.dofs.push_back(s.end_dof(r));
      is_end[vd.dofs.back()] = true;
    }
    vd.U = unitary_from_condition(c.A, c.B, vd.pi, vd.theta);
    const SpectralSplit split = spectral_split(vd.U);
    vd.P = split.P;
    vd.W = split.corange;
    vd.Kperp = kappa_matrices(vd.U, split.P).Kperp;
    for (int a = 0; a < deg; ++a)
      for (int b = 0; b < deg; ++b)
        if (vd.Kperp(a, b) != cplx{}) st.emplace_back(vd.dofs[a], vd.dofs[b], -vd.Kperp(a, b));
  }
  for (int i = 0; i < s.size; ++i)
    if (!is_end[i]) zt.emplace_back(i, col++, 1.0);
  for (const VertexData& vd : op.vertices) {
    for (int m = 0; m < vd.W.cols(); ++m, ++col)
      for (int a = 0; a < vd.W.rows(); ++a)
        if (vd.W(a, m) != cplx{}) zt.emplace_back(vd.dofs[a], col, vd.W(a, m));
  }
  op.stiffness.resize(s.size, s.size);
  op.stiffness.setFromTriplets(st.begin(), st.end());
  op.mass.resize(s.size, s.size);
  op.mass.setFromTriplets(mt.begin(), mt.end());
  op.basis.resize(s.size, col);
  op.basis.setFromTriplets(zt.begin(), zt.end());
  return op;
}

DiscreteFunction zero_function(const AssembledOperator& op) { return {op.space, CVec::Zero(op.dofs())}; }

DiscreteFunction interpolate(std::shared_ptr<const FunctionSpace> space,
                             const std::function<cplx(int edge, double xhat)>& f) {
  DiscreteFunction u{space, CVec::Zero(space->size)};
  for (size_t e = 0; e < space->graph.edges.size(); ++e)
    for (int k = 0; k < space->nodes_on(e); ++k)
      u.c(space->offset[e] + k) = f(static_cast<int>(e), space->node_coordinate(e, k));
  return u;
}

DiscreteFunction solve(const AssembledOperator& op, cplx lambda, const CVec& load, const CVec& lift) {
  const SpMat A = op.stiffness - lambda * op.mass;
  const SpMat Zt = op.basis.adjoint();
  SpMat R = Zt * A * op.basis;
  R.makeCompressed();
  const CVec rhs = Zt * (load - A * lift);
  Eigen::SparseLU<SpMat> lu;
  lu.compute(R);
  if (lu.info() != Eigen::Success) throw SolveFailure("sparse factorization failed");
  const CVec y = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !y.allFinite()) throw SolveFailure("sparse solve failed");
  return {op.space, lift + op.basis * y};
}

DiscreteFunction resolve(const AssembledOperator& op, cplx lambda, const DiscreteFunction& f) {
  return solve(op, lambda, op.mass * f.c, CVec::Zero(op.dofs()));
}

void add_essential_lift(const AssembledOperator& op, CVec& lift, int vertex, const CVec& values) {
  const VertexData& vd = op.vertices.at(vertex);
  const CVec pv = vd.P * values;
  for (size_t a = 0; a < vd.dofs.size(); ++a) lift(vd.dofs[a]) = pv(a);
}

void add_flux_datum(const AssembledOperator& op, CVec& load, int vertex, const CVec& g) {
  const VertexData& vd = op.vertices.at(vertex);
  for (size_t a = 0; a < vd.dofs.size(); ++a) load(vd.dofs[a]) -= g(a);
}

namespace {

struct DenseSpectrum {
  RVec values;
  CMat vectors;  // full dof vectors, mass-orthonormal
};

DenseSpectrum dense_spectrum(const AssembledOperator& op) {
  CMat S = reduced_dense(op.basis, op.stiffness);
  CMat M = reduced_dense(op.basis, op.mass);
  S = 0.5 * (S + S.adjoint()).eval();
  M = 0.5 * (M + M.adjoint()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<CMat> es(S, M);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("dense eigensolver failed");
  return {es.eigenvalues(), CMat(op.basis * es.eigenvectors())};
}

std::vector<int> order_by_magnitude(const RVec& v) {
  std::vector<int> idx(v.size());
  for (int i = 0; i < v.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(v(a)) < std::abs(v(b)); });
  return idx;
}

}  // namespace

std::vector<DiscreteFunction> null_space(const AssembledOperator& op, double tol, double* gap_ratio) {
  const DenseSpectrum sp = dense_spectrum(op);
  const std::vector<int> idx = order_by_magnitude(sp.values);
  std::vector<DiscreteFunction> out;
  double largest_zero = 0.0;
  size_t k = 0;
  for (; k < idx.size() && std::abs(sp.values(idx[k])) <= tol; ++k) {
    largest_zero = std::max(largest_zero, std::abs(sp.values(idx[k])));
    out.push_back({op.space, sp.vectors.col(idx[k])});
  }
  if (gap_ratio) {
    const double next = k < idx.size() ? std::abs(sp.values(idx[k])) : std::numeric_limits<double>::infinity();
    *gap_ratio = next / std::max(largest_zero, tol * 1e-6);
  }
  return out;
}

std::vector<std::pair<double, DiscreteFunction>> small_eigenpairs(const AssembledOperator& op, int count) {
  const DenseSpectrum sp = dense_spectrum(op);
  if (count > sp.values.size()) throw ConvergenceFailure("more eigenpairs requested than the space holds");
  const std::vector<int> idx = order_by_magnitude(sp.values);
  std::vector<std::pair<double, DiscreteFunction>> out;
  for (int i = 0; i < count; ++i) out.push_back({sp.values(idx[i]), {op.space, sp.vectors.col(idx[i])}});
  return out;
}

VertexTrace trace(const DiscreteFunction& u, const MetricGraph& graph, int vertex) {
  if (vertex < 0 || vertex >= static_cast<int>(graph.vertices.size())) throw UnknownVertexError("unknown vertex");
  const FunctionSpace& s = *u.space;
  const ReferenceElement& el = ReferenceElement::get(s.order);
  const Vertex& vx = graph.vertices[vertex];
  VertexTrace t{CVec(vx.degree()), CVec(vx.degree())};
  for (int a = 0; a < vx.degree(); ++a) {
    const EndRef& r = vx.incident[a];
    const int k = r.end == 0 ? 0 : s.elements[r.edge] - 1;
    const int local = r.end == 0 ? 0 : s.order;
    const double factor = s.scale[r.edge] * 2.0 / s.element_length(r.edge);
    t.values(a) = u.c(s.end_dof(r));
    t.derivatives(a) = factor * (el.D.row(local).cast<cplx>() * element_coeffs(u, r.edge, k))(0);
  }
  return t;
}

VertexTrace trace(const DiscreteFunction& u, int vertex) { return trace(u, u.space->graph, vertex); }

CVec flux(const AssembledOperator& op, const DiscreteFunction& u, int vertex) {
  const VertexTrace t = trace(u, vertex);
  const VertexData& vd = op.vertices.at(vertex);
  return vd.pi.cast<cplx>().cwiseProduct(t.derivatives) - kI * vd.theta.cast<cplx>().cwiseProduct(t.values);
}

double norm(const DiscreteFunction& u, NormKind kind, const std::vector<SubgraphTag>& tags, bool native) {
  const FunctionSpace& s = *u.space;
  const ReferenceElement& el = ReferenceElement::get(s.order);
  double sum = 0.0, m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (size_t e = 0; e < s.graph.edges.size(); ++e) {
    if (!selected(s.graph.edges[e], tags)) continue;
    const double sc = native ? 1.0 : s.scale[e];
    const double h = s.element_length(e);
    const double f1 = sc * 2.0 / h;
    for (int k = 0; k < s.elements[e]; ++k) {
      const CVec c = element_coeffs(u, e, k);
      const CVec v0 = el.B.cast<cplx>() * c;
      const CVec v1 = f1 * (el.DB.cast<cplx>() * c);
      const CVec v2 = f1 * f1 * (el.D2B.cast<cplx>() * c);
      for (int q = 0; q < v0.size(); ++q) {
        const double w = el.qwts(q) * 0.5 * h / sc;
        double term = std::norm(v0(q));
        if (kind == NormKind::H2) term += std::norm(v1(q)) + std::norm(v2(q));
        sum += w * term;
      }
      const CVec n1 = f1 * (el.D.cast<cplx>() * c);
      const CVec n2 = f1 * f1 * (el.D.cast<cplx>() * (el.D.cast<cplx>() * c));
      m0 = std::max({m0, v0.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()});
      m1 = std::max({m1, v1.cwiseAbs().maxCoeff(), n1.cwiseAbs().maxCoeff()});
      m2 = std::max({m2, v2.cwiseAbs().maxCoeff(), n2.cwiseAbs().maxCoeff()});
    }
  }
  switch (kind) {
    case NormKind::L2:
    case NormKind::H2:
      return std::sqrt(sum);
    case NormKind::Cmax:
      return m0;
    case NormKind::C2max:
      return m0 + m1 + m2;
  }
  return 0.0;
}

cplx inner(const DiscreteFunction& u, const DiscreteFunction& v, const std::vector<SubgraphTag>& tags) {
  const FunctionSpace& s = *u.space;
  const ReferenceElement& el = ReferenceElement::get(s.order);
  cplx sum = 0.0;
  for (size_t e = 0; e < s.graph.edges.size(); ++e) {
    if (!selected(s.graph.edges[e], tags)) continue;
    const double h = s.element_length(e);
    for (int k = 0; k < s.elements[e]; ++k) {
      const CVec a = el.B.cast<cplx>() * element_coeffs(u, e, k);
      const CVec b = el.B.cast<cplx>() * element_coeffs(v, e, k);
      for (int q = 0; q < a.size(); ++q) sum += el.qwts(q) * 0.5 * h / s.scale[e] * a(q) * std::conj(b(q));
    }
  }
  return sum;
}

cplx edge_form(const DiscreteFunction& u, const DiscreteFunction& v, int edge, const Cheb& p, const Cheb& q,
               const Cheb& V) {
  const FunctionSpace& s = *u.space;
  const ReferenceElement& el = ReferenceElement::get(s.order);
  const double h = s.element_length(edge);
  const double L = s.native_length[edge];
  cplx sum = 0.0;
  for (int k = 0; k < s.elements[edge]; ++k) {
    const CVec cu = element_coeffs(u, edge, k), cv = element_coeffs(v, edge, k);
    const CVec u0 = el.B.cast<cplx>() * cu, v0 = el.B.cast<cplx>() * cv;
    const CVec u1 = (2.0 / h) * (el.DB.cast<cplx>() * cu), v1 = (2.0 / h) * (el.DB.cast<cplx>() * cv);
    for (int j = 0; j < u0.size(); ++j) {
      const double t = (k * h + 0.5 * h * (el.qpts(j) + 1.0)) / L;
      const double w = el.qwts(j) * 0.5 * h;
      sum += w * (cheb_eval_unit(p, t) * u1(j) * std::conj(v1(j)) +
                  kI * cheb_eval_unit(q, t) * (u1(j) * std::conj(v0(j)) - u0(j) * std::conj(v1(j))) +
                  cheb_eval_unit(V, t) * u0(j) * std::conj(v0(j)));
    }
  }
  return sum;
}

void write_csv(const DiscreteFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  const FunctionSpace& s = *u.space;
  out << "edge,xhat,x,re,im\n" << std::setprecision(16);
  for (size_t e = 0; e < s.graph.edges.size(); ++e)
    for (int k = 0; k < s.nodes_on(e); ++k) {
      const double xh = s.node_coordinate(e, k);
      const cplx val = u.c(s.offset[e] + k);
      out << s.graph.edges[e].id << ',' << xh << ',' << xh / s.scale[e] << ',' << val.real() << ',' << val.imag()
          << '\n';
    }
}

double hermiticity_defect(const AssembledOperator& op) {
  const CMat S = reduced_dense(op.basis, op.stiffness);
  const double n = S.norm();
  return n == 0.0 ? 0.0 : (S - S.adjoint()).norm() / n;
}

double residual(const AssembledOperator& op, cplx lambda, const DiscreteFunction& u, const CVec& load) {
  const SpMat Zt = op.basis.adjoint();
  const CVec r = Zt * ((op.stiffness - lambda * op.mass) * u.c - load);
  const double scale = std::max((Zt * load).norm(), 1e-300);
  return r.norm() / scale;
}

}  // namespace sgraph
