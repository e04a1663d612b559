#include "sgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace sgraph {

int MetricGraph::vertex_index(const std::string& id) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].id == id) return static_cast<int>(i);
  return -1;
}

int MetricGraph::edge_index(const std::string& id) const {
  for (size_t i = 0; i < edges.size(); ++i)
    if (edges[i].id == id) return static_cast<int>(i);
  return -1;
}

void MetricGraph::rebuild_incidence() {
  for (Vertex& v : vertices) v.incident.clear();
  for (size_t e = 0; e < edges.size(); ++e) {
    vertices.at(edges[e].tail).incident.push_back({static_cast<int>(e), 0});
    vertices.at(edges[e].head).incident.push_back({static_cast<int>(e), 1});
  }
}

void MetricGraph::validate() const {
  for (const Edge& e : edges) {
    if (!(e.length > 0.0)) throw SchemaError("edge " + e.id + " has non-positive length");
    if (e.tail < 0 || e.head < 0 || e.tail >= static_cast<int>(vertices.size()) ||
        e.head >= static_cast<int>(vertices.size()))
      throw SchemaError("edge " + e.id + " has an unknown endpoint");
  }
  std::vector<int> count(vertices.size(), 0);
  for (const Edge& e : edges) {
    ++count[e.tail];
    ++count[e.head];
  }
  for (size_t v = 0; v < vertices.size(); ++v) {
    if (count[v] == 0) throw SchemaError("vertex " + vertices[v].id + " is isolated");
    if (count[v] != vertices[v].degree())
      throw SchemaError("incidence list of " + vertices[v].id + " does not match its degree");
    for (const EndRef& r : vertices[v].incident) {
      const Edge& e = edges.at(r.edge);
      if ((r.end == 0 ? e.tail : e.head) != static_cast<int>(v))
        throw SchemaError("incidence list of " + vertices[v].id + " is inconsistent");
    }
  }
}

int MetricGraph::degree_sum() const {
  int s = 0;
  for (const Vertex& v : vertices) s += v.degree();
  return s;
}

MetricGraph make_graph(const std::vector<std::string>& vertices,
                       const std::vector<std::tuple<std::string, std::string, std::string, double>>& edges,
                       SubgraphTag tag) {
  MetricGraph g;
  for (const auto& id : vertices) g.vertices.push_back({id, {}});
  for (const auto& [id, from, to, length] : edges) {
    Edge e{id, g.vertex_index(from), g.vertex_index(to), length, tag};
    if (e.tail < 0 || e.head < 0) throw SchemaError("edge " + id + " references an unknown vertex");
    g.edges.push_back(e);
  }
  g.rebuild_incidence();
  return g;
}

double EpsScalarField::value(double t, double eps) const { return at_point(t).eval(eps); }

Cheb EpsScalarField::at_eps(double eps) const {
  Cheb out{0.0};
  double power = 1.0;
  for (const Cheb& c : orders) {
    out = cheb_axpy(power, c, out);
    power *= eps;
  }
  if (!sqrt_term.empty() && eps > 0.0) out = cheb_axpy(std::sqrt(eps), sqrt_term, out);
  return out;
}

Cheb EpsScalarField::order(int l) const {
  if (l < static_cast<int>(orders.size())) return orders[l];
  return Cheb{0.0};
}

ScalarSeries EpsScalarField::at_point(double t) const {
  ScalarSeries s;
  for (const Cheb& c : orders) s.c.push_back(cheb_eval_unit(c, t));
  if (!sqrt_term.empty()) s.sqrt_term = cheb_eval_unit(sqrt_term, t);
  return s;
}

int EpsScalarField::max_spatial_degree() const {
  size_t d = sqrt_term.size();
  for (const Cheb& c : orders) d = std::max(d, c.size());
  return d == 0 ? 0 : static_cast<int>(d) - 1;
}

namespace {

void check_condition(const VertexSeries& c, int degree, const std::string& where) {
  if (c.A.empty() || c.B.empty()) throw SchemaError("missing vertex condition at " + where);
  if (c.A.rows() != degree || c.A.cols() != degree || c.B.rows() != degree || c.B.cols() != degree)
    throw DimensionError("condition at " + where + " has size " + std::to_string(c.A.rows()) +
                         " but the vertex degree is " + std::to_string(degree));
}

void check_ellipticity(const EdgeFields& f, const std::string& where) {
  for (int k = 0; k <= 32; ++k) {
    const double t = 0.5 - 0.5 * std::cos(M_PI * k / 32.0);
    if (!(cheb_eval_unit(f.p.order(0), t) > 0.0))
      throw EllipticityError("p(., 0) is not positive on edge " + where);
  }
}

bool same_series(const EpsMatrixSeries& a, const EpsMatrixSeries& b) {
  if (a.order() != b.order() || a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int l = 0; l <= a.order(); ++l)
    if (a.coeff(l) != b.coeff(l)) return false;
  return true;
}

bool same_field(const EpsScalarField& a, const EpsScalarField& b) {
  return a.role == b.role && a.orders == b.orders && a.sqrt_term == b.sqrt_term;
}

bool same_graph(const MetricGraph& a, const MetricGraph& b) {
  if (a.vertices.size() != b.vertices.size() || a.edges.size() != b.edges.size()) return false;
  for (size_t i = 0; i < a.vertices.size(); ++i)
    if (a.vertices[i].id != b.vertices[i].id || a.vertices[i].incident != b.vertices[i].incident) return false;
  for (size_t i = 0; i < a.edges.size(); ++i) {
    const Edge& x = a.edges[i];
    const Edge& y = b.edges[i];
    if (x.id != y.id || x.tail != y.tail || x.head != y.head || x.length != y.length || x.tag != y.tag)
      return false;
  }
  return true;
}

}  // namespace

void GluedProblem::validate() const {
  big.validate();
  small.validate();
  if (m0 < 0 || m0 >= static_cast<int>(big.vertices.size())) throw SchemaError("M0 is not a vertex of the fixed graph");
  const int d = d0();
  for (const EndRef& r : big.vertices[m0].incident)
    if (big.edges[r.edge].tail == big.edges[r.edge].head) throw PartitionError("loops at M0 are not supported");
  if (partition.empty() || partition.size() != targets.size())
    throw PartitionError("partition and target lists must be non-empty and of equal length");
  std::set<int> seen;
  for (const auto& group : partition) {
    if (group.empty()) throw PartitionError("empty group in the partition");
    for (int i : group) {
      if (i < 0 || i >= d) throw PartitionError("partition references a lead outside 0..d0-1");
      if (!seen.insert(i).second) throw PartitionError("partition groups overlap");
    }
  }
  if (static_cast<int>(seen.size()) != d) throw PartitionError("partition does not cover every edge at M0");
  std::set<int> target_set;
  for (int t : targets) {
    if (t < 0 || t >= static_cast<int>(small.vertices.size())) throw PartitionError("unknown target vertex");
    if (!target_set.insert(t).second) throw PartitionError("targets must be distinct");
  }
  if (big_fields.size() != big.edges.size() || small_fields.size() != small.edges.size())
    throw SchemaError("coefficient fields missing for some edges");
  for (size_t e = 0; e < big.edges.size(); ++e) check_ellipticity(big_fields[e], big.edges[e].id);
  for (size_t e = 0; e < small.edges.size(); ++e) check_ellipticity(small_fields[e], small.edges[e].id);
  if (big_conditions.size() != big.vertices.size() || small_conditions.size() != small.vertices.size())
    throw SchemaError("vertex condition lists do not match the vertex lists");
  for (size_t v = 0; v < big.vertices.size(); ++v)
    if (static_cast<int>(v) != m0) check_condition(big_conditions[v], big.vertices[v].degree(), big.vertices[v].id);
  for (size_t v = 0; v < small.vertices.size(); ++v)
    check_condition(small_conditions[v], target_degree(*this, static_cast<int>(v)), small.vertices[v].id);
}

bool same_problem(const GluedProblem& a, const GluedProblem& b) {
  if (!same_graph(a.big, b.big) || !same_graph(a.small, b.small)) return false;
  if (a.m0 != b.m0 || a.partition != b.partition || a.targets != b.targets || a.eps_order != b.eps_order)
    return false;
  auto fields_equal = [](const std::vector<EdgeFields>& x, const std::vector<EdgeFields>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!same_field(x[i].p, y[i].p) || !same_field(x[i].q, y[i].q) || !same_field(x[i].V, y[i].V)) return false;
    return true;
  };
  auto conds_equal = [](const std::vector<VertexSeries>& x, const std::vector<VertexSeries>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!same_series(x[i].A, y[i].A) || !same_series(x[i].B, y[i].B)) return false;
    return true;
  };
  return fields_equal(a.big_fields, b.big_fields) && fields_equal(a.small_fields, b.small_fields) &&
         conds_equal(a.big_conditions, b.big_conditions) && conds_equal(a.small_conditions, b.small_conditions);
}

std::vector<Lead> leads(const GluedProblem& problem) {
  const Vertex& m0 = problem.big.vertices.at(problem.m0);
  std::vector<Lead> out(m0.degree());
  for (size_t j = 0; j < problem.partition.size(); ++j) {
    const int target = problem.targets[j];
    int slot = problem.small.vertices[target].degree();
    for (int i : problem.partition[j]) {
      Lead& l = out.at(i);
      l.index = i;
      l.at_m0 = m0.incident[i];
      l.nu = orientation(l.at_m0);
      l.group = static_cast<int>(j);
      l.target = target;
      l.slot = slot++;
      const double t = l.at_m0.end == 0 ? 0.0 : 1.0;
      const EdgeFields& f = problem.big_fields.at(l.at_m0.edge);
      l.sp = f.p.at_point(t);
      l.sq = f.q.at_point(t);
    }
  }
  return out;
}

int target_degree(const GluedProblem& problem, int small_vertex) {
  int d = problem.small.vertices.at(small_vertex).degree();
  for (size_t j = 0; j < problem.targets.size(); ++j)
    if (problem.targets[j] == small_vertex) d += static_cast<int>(problem.partition[j].size());
  return d;
}

int eps_vertex_of_big(const GluedProblem& problem, int v) {
  if (v == problem.m0) throw UnknownVertexError("M0 is not a vertex of the graph with small edges");
  return v < problem.m0 ? v : v - 1;
}

int eps_vertex_of_small(const GluedProblem& problem, int v) {
  return static_cast<int>(problem.big.vertices.size()) - 1 + v;
}

MetricGraph build_epsilon_graph(const GluedProblem& problem, double eps) {
  if (!(eps > 0.0)) throw SchemaError("eps must be positive");
  MetricGraph g;
  for (size_t v = 0; v < problem.big.vertices.size(); ++v)
    if (static_cast<int>(v) != problem.m0) g.vertices.push_back({problem.big.vertices[v].id, {}});
  for (const Vertex& v : problem.small.vertices) g.vertices.push_back({v.id, {}});

  const std::vector<Lead> ls = leads(problem);
  auto remap_big = [&](int v, const EndRef& r) {
    if (v != problem.m0) return eps_vertex_of_big(problem, v);
    for (const Lead& l : ls)
      if (l.at_m0 == r) return eps_vertex_of_small(problem, l.target);
    throw PartitionError("edge at M0 without a lead");
  };
  for (size_t e = 0; e < problem.big.edges.size(); ++e) {
    Edge edge = problem.big.edges[e];
    edge.tail = remap_big(edge.tail, {static_cast<int>(e), 0});
    edge.head = remap_big(edge.head, {static_cast<int>(e), 1});
    edge.tag = SubgraphTag::Fixed;
    g.edges.push_back(edge);
  }
  for (const Edge& s : problem.small.edges) {
    Edge edge = s;
    edge.tail = eps_vertex_of_small(problem, s.tail);
    edge.head = eps_vertex_of_small(problem, s.head);
    edge.length = eps * s.length;
    edge.tag = SubgraphTag::Small;
    g.edges.push_back(edge);
  }
  // incidence: fixed vertices keep their order; small vertices list their own
  // incidence first, then the leads of their group
  for (size_t v = 0; v < problem.big.vertices.size(); ++v) {
    if (static_cast<int>(v) == problem.m0) continue;
    g.vertices[eps_vertex_of_big(problem, static_cast<int>(v))].incident = problem.big.vertices[v].incident;
  }
  for (size_t v = 0; v < problem.small.vertices.size(); ++v) {
    auto& inc = g.vertices[eps_vertex_of_small(problem, static_cast<int>(v))].incident;
    for (const EndRef& r : problem.small.vertices[v].incident)
      inc.push_back({eps_edge_of_small(problem, r.edge), r.end});
  }
  for (size_t j = 0; j < problem.partition.size(); ++j) {
    auto& inc = g.vertices[eps_vertex_of_small(problem, problem.targets[j])].incident;
    for (int i : problem.partition[j]) inc.push_back(ls[i].at_m0);
  }
  g.validate();
  return g;
}

MetricGraph build_extended_graph(const GluedProblem& problem) {
  MetricGraph g;
  for (const Vertex& v : problem.small.vertices) g.vertices.push_back({v.id, {}});
  const std::vector<Lead> ls = leads(problem);
  for (const Lead& l : ls) g.vertices.push_back({"ex:" + problem.big.edges[l.at_m0.edge].id, {}});
  for (const Edge& s : problem.small.edges) {
    Edge edge = s;
    edge.tag = SubgraphTag::Small;
    g.edges.push_back(edge);
  }
  for (const Lead& l : ls) {
    Edge edge{"ex:" + problem.big.edges[l.at_m0.edge].id, l.target, ex_vertex_of_lead(problem, l.index), 1.0,
              SubgraphTag::Extension};
    g.edges.push_back(edge);
  }
  for (size_t v = 0; v < problem.small.vertices.size(); ++v)
    g.vertices[v].incident = problem.small.vertices[v].incident;
  for (size_t j = 0; j < problem.partition.size(); ++j)
    for (int i : problem.partition[j])
      g.vertices[problem.targets[j]].incident.push_back({ex_edge_of_lead(problem, i), 0});
  for (const Lead& l : ls) g.vertices[ex_vertex_of_lead(problem, l.index)].incident.push_back({ex_edge_of_lead(problem, l.index), 1});
  g.validate();
  return g;
}

namespace {

ScalarSeries signed_series(const ScalarSeries& s, int sign) {
  ScalarSeries out = s;
  for (double& c : out.c) c *= sign;
  out.sqrt_term *= sign;
  return out;
}

}  // namespace

PiTheta pi_theta(const GluedProblem& problem, int vertex, PiThetaRole role) {
  std::vector<ScalarSeries> pis, thetas;
  auto add_edge = [&](const EdgeFields& f, const EndRef& r) {
    const double t = r.end == 0 ? 0.0 : 1.0;
    pis.push_back(signed_series(f.p.at_point(t), orientation(r)));
    thetas.push_back(signed_series(f.q.at_point(t), orientation(r)));
  };
  if (role == PiThetaRole::Fixed) {
    for (const EndRef& r : problem.big.vertices.at(vertex).incident) add_edge(problem.big_fields.at(r.edge), r);
  } else {
    for (const EndRef& r : problem.small.vertices.at(vertex).incident) add_edge(problem.small_fields.at(r.edge), r);
    if (role == PiThetaRole::LeadContinued) {
      const std::vector<Lead> ls = leads(problem);
      for (size_t j = 0; j < problem.targets.size(); ++j) {
        if (problem.targets[j] != vertex) continue;
        for (int i : problem.partition[j]) {
          pis.push_back(ls[i].sp);
          ScalarSeries q = signed_series(ls[i].sq, ls[i].nu);
          q.c.insert(q.c.begin(), 0.0);  // eps * nu * sq(eps)
          if (q.sqrt_term != 0.0) q.sqrt_term = 0.0;  // eps^{3/2} terms are not representable; controls never reach here
          thetas.push_back(q);
        }
      }
    }
  }
  for (const ScalarSeries& p : pis)
    if (p.coeff(0) == 0.0) throw EllipticityError("zero diagonal entry in Pi(0)");
  return {EpsMatrixSeries::diagonal(pis), EpsMatrixSeries::diagonal(thetas)};
}

}  // namespace sgraph
