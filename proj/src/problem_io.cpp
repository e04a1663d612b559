#include "sgraph/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace sgraph {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError("missing key '" + std::string(key) + "' in " + where);
  return j.at(key);
}

cplx parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SchemaError("complex entries must be numbers or [re, im] pairs");
}

CMat parse_matrix(const json& j) {
  if (!j.is_array()) throw SchemaError("matrix must be a list of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(j[0].size());
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) throw SchemaError("ragged matrix");
    for (int c = 0; c < cols; ++c) m(r, c) = parse_complex(j[r][c]);
  }
  return m;
}

EpsMatrixSeries parse_series(const json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("condition matrices must be a non-empty list of eps orders");
  std::vector<CMat> coeffs;
  for (const json& m : j) coeffs.push_back(parse_matrix(m));
  for (const CMat& m : coeffs)
    if (m.rows() != coeffs[0].rows() || m.cols() != coeffs[0].cols() || m.rows() != m.cols())
      throw DimensionError("condition matrices must be square and of equal size across eps orders");
  return EpsMatrixSeries(std::move(coeffs));
}

Cheb parse_cheb(const json& j) {
  if (!j.is_array()) throw SchemaError("polynomial must be a list of Chebyshev coefficients");
  Cheb c;
  for (const json& v : j) {
    if (!v.is_number()) throw SchemaError("Chebyshev coefficients must be real numbers");
    c.push_back(v.get<double>());
  }
  if (c.empty()) c.push_back(0.0);
  return c;
}

EpsScalarField parse_field(const json& coeffs, const char* key, FieldRole role, double default_value) {
  EpsScalarField f{role, {{default_value}}, {}};
  if (coeffs.contains(key)) {
    const json& orders = coeffs.at(key);
    if (!orders.is_array() || orders.empty()) throw SchemaError(std::string("field ") + key + " needs at least one eps order");
    f.orders.clear();
    for (const json& o : orders) f.orders.push_back(parse_cheb(o));
  }
  const std::string sqrt_key = std::string(key) + "_sqrt";
  if (coeffs.contains(sqrt_key)) f.sqrt_term = parse_cheb(coeffs.at(sqrt_key));
  return f;
}

MetricGraph parse_graph(const json& j, SubgraphTag tag, const std::string& where) {
  MetricGraph g;
  for (const json& v : require(j, "vertices", where)) g.vertices.push_back({v.get<std::string>(), {}});
  for (const json& e : require(j, "edges", where)) {
    Edge edge;
    edge.id = require(e, "id", where).get<std::string>();
    edge.tail = g.vertex_index(require(e, "from", where).get<std::string>());
    edge.head = g.vertex_index(require(e, "to", where).get<std::string>());
    if (edge.tail < 0 || edge.head < 0) throw SchemaError("edge " + edge.id + " references an unknown vertex");
    const json& len = e.contains("length") ? e.at("length") : json(1.0);
    if (len.is_string() && len.get<std::string>() == "inf") {
      edge.length = std::numeric_limits<double>::infinity();
    } else if (len.is_number()) {
      edge.length = len.get<double>();
    } else {
      throw SchemaError("edge length must be a number or \"inf\"");
    }
    edge.tag = tag;
    g.edges.push_back(edge);
  }
  g.rebuild_incidence();
  return g;
}

json matrix_json(const CMat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

json series_json(const EpsMatrixSeries& s) {
  json out = json::array();
  for (const CMat& m : s.coeffs()) out.push_back(matrix_json(m));
  return out;
}

json graph_json(const MetricGraph& g) {
  json out;
  out["vertices"] = json::array();
  for (const Vertex& v : g.vertices) out["vertices"].push_back(v.id);
  out["edges"] = json::array();
  for (const Edge& e : g.edges) {
    json je{{"id", e.id}, {"from", g.vertices[e.tail].id}, {"to", g.vertices[e.head].id}};
    if (std::isinf(e.length))
      je["length"] = "inf";
    else
      je["length"] = e.length;
    out["edges"].push_back(je);
  }
  return out;
}

json fields_json(const EdgeFields& f) {
  json out;
  auto put = [&](const char* key, const EpsScalarField& field) {
    out[key] = field.orders;
    if (!field.sqrt_term.empty()) out[std::string(key) + "_sqrt"] = field.sqrt_term;
  };
  put("p", f.p);
  put("q", f.q);
  put("V", f.V);
  return out;
}

}  // namespace

GluedProblem parse_problem(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("problem file is not valid JSON: ") + e.what());
  }
  GluedProblem p;
  try {
    p.eps_order = root.value("eps_order", 3);
    p.big = parse_graph(require(root, "gamma_graph", "problem"), SubgraphTag::Fixed, "gamma_graph");
    p.small = parse_graph(require(root, "small_graph", "problem"), SubgraphTag::Small, "small_graph");
    for (const Vertex& v : p.small.vertices)
      if (p.big.vertex_index(v.id) >= 0) throw SchemaError("vertex id " + v.id + " appears in both graphs");

    const json& gluing = require(root, "gluing", "problem");
    p.m0 = p.big.vertex_index(require(gluing, "M0", "gluing").get<std::string>());
    if (p.m0 < 0) throw SchemaError("gluing.M0 is not a vertex of gamma_graph");
    const Vertex& m0 = p.big.vertices[p.m0];
    for (const json& group : require(gluing, "partition", "gluing")) {
      std::vector<int> ids;
      for (const json& eid : group) {
        const int e = p.big.edge_index(eid.get<std::string>());
        int slot = -1;
        for (int i = 0; i < m0.degree(); ++i)
          if (m0.incident[i].edge == e) slot = i;
        if (slot < 0) throw PartitionError("partition edge " + eid.get<std::string>() + " is not incident to M0");
        ids.push_back(slot);
      }
      p.partition.push_back(ids);
    }
    for (const json& t : require(gluing, "targets", "gluing")) {
      const int v = p.small.vertex_index(t.get<std::string>());
      if (v < 0) throw PartitionError("gluing target " + t.get<std::string>() + " is not in small_graph");
      p.targets.push_back(v);
    }

    const json& coeffs = root.contains("coefficients") ? root.at("coefficients") : json::object();
    auto fields_for = [&](const Edge& e) {
      EdgeFields f;
      if (coeffs.contains(e.id)) {
        const json& c = coeffs.at(e.id);
        f.p = parse_field(c, "p", FieldRole::P, 1.0);
        f.q = parse_field(c, "q", FieldRole::Q, 0.0);
        f.V = parse_field(c, "V", FieldRole::V, 0.0);
      }
      return f;
    };
    for (const Edge& e : p.big.edges) p.big_fields.push_back(fields_for(e));
    for (const Edge& e : p.small.edges) p.small_fields.push_back(fields_for(e));

    const json& conds = require(root, "vertex_conditions", "problem");
    auto cond_for = [&](const std::string& id) {
      const json& c = require(conds, id.c_str(), "vertex_conditions");
      return VertexSeries{parse_series(require(c, "A", id)), parse_series(require(c, "B", id))};
    };
    p.big_conditions.resize(p.big.vertices.size());
    for (size_t v = 0; v < p.big.vertices.size(); ++v)
      if (static_cast<int>(v) != p.m0) p.big_conditions[v] = cond_for(p.big.vertices[v].id);
    for (const Vertex& v : p.small.vertices) p.small_conditions.push_back(cond_for(v.id));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed problem field: ") + e.what());
  }
  p.validate();
  return p;
}

GluedProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open problem file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string serialize_problem(const GluedProblem& p) {
  json root;
  root["eps_order"] = p.eps_order;
  root["gamma_graph"] = graph_json(p.big);
  root["small_graph"] = graph_json(p.small);
  const Vertex& m0 = p.big.vertices[p.m0];
  json gluing;
  gluing["M0"] = m0.id;
  gluing["partition"] = json::array();
  for (const auto& group : p.partition) {
    json ids = json::array();
    for (int i : group) ids.push_back(p.big.edges[m0.incident[i].edge].id);
    gluing["partition"].push_back(ids);
  }
  gluing["targets"] = json::array();
  for (int t : p.targets) gluing["targets"].push_back(p.small.vertices[t].id);
  root["gluing"] = gluing;
  json coeffs = json::object();
  for (size_t e = 0; e < p.big.edges.size(); ++e) coeffs[p.big.edges[e].id] = fields_json(p.big_fields[e]);
  for (size_t e = 0; e < p.small.edges.size(); ++e) coeffs[p.small.edges[e].id] = fields_json(p.small_fields[e]);
  root["coefficients"] = coeffs;
  json conds = json::object();
  for (size_t v = 0; v < p.big.vertices.size(); ++v) {
    if (static_cast<int>(v) == p.m0) continue;
    conds[p.big.vertices[v].id] = {{"A", series_json(p.big_conditions[v].A)}, {"B", series_json(p.big_conditions[v].B)}};
  }
  for (size_t v = 0; v < p.small.vertices.size(); ++v)
    conds[p.small.vertices[v].id] = {{"A", series_json(p.small_conditions[v].A)},
                                     {"B", series_json(p.small_conditions[v].B)}};
  root["vertex_conditions"] = conds;
  return root.dump(2);
}

}  // namespace sgraph
