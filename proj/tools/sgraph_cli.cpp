#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sgraph/experiments.hpp"
#include "sgraph/operators.hpp"
#include "sgraph/problem_io.hpp"
#include "sgraph/vertex_algebra.hpp"

using namespace sgraph;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kInput = 2;

struct InputError : Error {
  using Error::Error;
};

struct Options {
  std::string problem;
  std::string eps_list;
  std::string lambda = "i";
  int order = 16;
  std::string out = "sgraph_out";
  double tol = -1.0;
  std::string variant = "neumann";
  std::string v0 = "1";
  std::string f_fixed = "1,1";
  std::string f_small = "0";
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("not a number: '" + item + "'");
    }
  }
  return out;
}

// Accepts "re,im", "x", "yi", "x+yi", "x-yi", "i", "-i".
cplx parse_complex(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.find(',') != std::string::npos) {
    const std::vector<double> v = parse_list(s);
    if (v.size() != 2) throw InputError("complex number needs two components");
    return {v[0], v[1]};
  }
  if (s.empty()) throw InputError("empty complex number");
  if (s.back() != 'i') return {parse_list(s).at(0), 0.0};
  s.pop_back();
  size_t split = std::string::npos;
  for (size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  auto imag = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return std::stod(t);
  };
  try {
    if (split == std::string::npos) return {0.0, imag(s)};
    return {std::stod(s.substr(0, split)), imag(s.substr(split))};
  } catch (const std::exception&) {
    throw InputError("cannot parse complex number");
  }
}

EdgeFunction polynomial_source(const std::string& text) {
  const std::vector<double> m = parse_list(text);
  return [m](int, double x) {
    double v = 0.0;
    for (size_t k = m.size(); k-- > 0;) v = v * x + m[k];
    return cplx(v, 0.0);
  };
}

GluedProblem load(const Options& o) {
  if (o.problem.empty()) return star_problem(o.variant != "dirichlet", {1.0});
  return load_problem(o.problem);
}

SweepConfig sweep(const Options& o) {
  SweepConfig c;
  c.eps_list = parse_list(o.eps_list);
  for (double e : c.eps_list)
    if (!(e > 0.0)) throw InputError("eps values must be positive");
  c.lambda = parse_complex(o.lambda);
  if (c.lambda.imag() == 0.0) throw InputError("lambda must have a nonzero imaginary part");
  if (o.order < 4) throw InputError("order must be at least 4");
  c.order = o.order;
  c.f_fixed = polynomial_source(o.f_fixed);
  c.f_small = polynomial_source(o.f_small);
  c.out = o.out;
  std::filesystem::create_directories(o.out);
  return c;
}

std::ofstream report_file(const Options& o, const std::string& name) {
  std::filesystem::create_directories(o.out);
  std::ofstream f(o.out + "/" + name);
  if (!f) throw InputError("cannot write to " + o.out);
  f << std::setprecision(12);
  return f;
}

void print_matrix(std::ostream& os, const std::string& name, const CMat& m) {
  os << name << " (" << m.rows() << "x" << m.cols() << ")\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << "  " << m(i, j).real() << (m(i, j).imag() < 0 ? "" : "+") << m(i, j).imag() << "i";
    os << '\n';
  }
}

// Summary goes to stdout and to <verb>_summary.txt.
int finish(const Options& o, const std::string& verb, const std::string& text, bool pass) {
  std::ofstream f = report_file(o, verb + "_summary.txt");
  f << text << (pass ? "PASS\n" : "FAIL\n");
  std::cout << text << (pass ? "PASS\n" : "FAIL\n");
  return pass ? kOk : kFail;
}

int cmd_check(const Options& o) {
  const GluedProblem p = load(o);
  const SweepConfig c = sweep(o);
  const std::vector<double> eps = c.eps_list.empty() ? SweepConfig::default_eps() : c.eps_list;
  const double tol = o.tol > 0 ? o.tol : 1e-10;
  std::ofstream csv = report_file(o, "check.csv");
  csv << "eps,vertex,rank,degree,defect,pass\n";
  bool pass = true;
  std::ostringstream s;
  for (double e : eps) {
    const AssembledOperator op = assemble(epsilon_operator_problem(p, e), c.mesh());
    for (size_t v = 0; v < op.vertices.size(); ++v) {
      const VertexData& vd = op.vertices[v];
      const SelfAdjointReport r = check_self_adjoint(vd.A, vd.B, vd.pi, vd.theta, tol);
      csv << e << ',' << op.space->graph.vertices[v].id << ',' << r.rank << ',' << r.dim << ',' << r.defect << ','
          << (r.pass ? 1 : 0) << '\n';
      pass = pass && r.pass;
    }
    const double h = hermiticity_defect(op);
    s << "eps " << e << ": operator hermiticity defect " << h << '\n';
    pass = pass && h <= tol;
  }
  return finish(o, "check", s.str(), pass);
}

int cmd_resolve(const Options& o) {
  const GluedProblem p = load(o);
  const SweepConfig c = sweep(o);
  const double eps = c.eps_list.empty() ? 0.1 : c.eps_list.front();
  const DiscreteFunction u = direct_resolvent(p, eps, c.lambda, c.f_fixed, c.f_small, c.mesh());
  write_csv(u, o.out + "/resolve.csv");
  std::ostringstream s;
  s << "eps " << eps << ", lambda " << c.lambda << ": L2 norm of the solution " << norm(u, NormKind::L2) << '\n';
  return finish(o, "resolve", s.str(), true);
}

int cmd_threshold(const Options& o) {
  const GluedProblem p = load(o);
  const SweepConfig c = sweep(o);
  ConditionAReport rep;
  std::ostringstream s;
  try {
    const ThresholdBasis b = compute_threshold_basis(p, c.mesh(), o.tol > 0 ? o.tol : 1e-7, &rep);
    s << "k " << b.k << "\ncondition A " << (rep.pass ? "holds" : "fails") << "\nnull space dimension " << rep.null_dim
      << "\ngap ratio " << b.gap_ratio << (rep.ambiguous ? " (ambiguous)" : "") << "\nconstancy defect "
      << b.constancy_defect << '\n';
    print_matrix(s, "Psi", b.Psi);
    const double unitarity = (b.Psi.adjoint() * b.Psi - CMat::Identity(b.d0, b.d0)).norm();
    s << "unitarity defect " << unitarity << '\n';
    return finish(o, "threshold", s.str(), rep.pass && b.constancy_defect <= 1e-9 && unitarity <= 1e-10);
  } catch (const EmbeddedEigenvalueError& e) {
    s << "condition A fails: " << e.what() << '\n';
    return finish(o, "threshold", s.str(), false);
  }
}

int cmd_qmatrix(const Options& o) {
  const GluedProblem p = load(o);
  const SweepConfig c = sweep(o);
  const LimitData ld = build_limit(p, c.mesh());
  std::ostringstream s;
  s << "k " << ld.basis.k << "\nk0 " << ld.q.k0 << "\nhermiticity defect " << ld.q.hermiticity_defect << '\n';
  print_matrix(s, "Q", ld.q.Q);
  s << "eigenvalues";
  for (int i = 0; i < ld.q.eigenvalues.size(); ++i) s << ' ' << ld.q.eigenvalues(i);
  s << '\n';
  return finish(o, "qmatrix", s.str(), ld.q.hermiticity_defect <= 1e-8 * (1.0 + ld.q.Q.norm()));
}

int cmd_limit(const Options& o) {
  const GluedProblem p = load(o);
  const SweepConfig c = sweep(o);
  const LimitData ld = build_limit(p, c.mesh());
  const PiTheta pt = pi_theta(p, p.m0, PiThetaRole::Fixed);
  const RVec pi = pt.pi.coeff(0).diagonal().real(), theta = pt.theta.coeff(0).diagonal().real();
  const SelfAdjointReport r = check_self_adjoint(ld.cond.A, ld.cond.B, pi, theta);
  std::ostringstream s;
  print_matrix(s, "A", ld.cond.A);
  print_matrix(s, "B", ld.cond.B);
  s << "self-adjointness defect " << r.defect << ", rank " << r.rank << '\n';
  return finish(o, "limit", s.str(), r.pass);
}

int cmd_converge(const Options& o) {
  const GluedProblem p = load(o);
  const ConvergeReport r = sgraph::cmd_converge(sweep(o), p);
  std::ostringstream s;
  for (const RateReport* x : {&r.fixed_part, &r.full, &r.small_part})
    s << x->name << ": slope " << x->fit.slope << " (target " << x->target_low << ".." << x->target_high << ") "
      << (x->pass ? "ok" : "outside") << '\n';
  return finish(o, "converge", s.str(), r.fixed_part.pass && r.full.pass);
}

int cmd_taylor(const Options& o) {
  const GluedProblem p = load(o);
  const TaylorReport r = sgraph::cmd_taylor(sweep(o), p);
  std::ostringstream s;
  for (size_t d = 0; d < r.residuals.size(); ++d) {
    s << "degree " << d << " residual " << r.residuals[d];
    if (d > 0) s << " ratio " << r.ratios[d - 1];
    s << '\n';
  }
  return finish(o, "taylor", s.str(), r.pass);
}

int cmd_eigentrack(const Options& o) {
  const GluedProblem p = load(o);
  const EigenTrackReport r = sgraph::cmd_eigentrack(sweep(o), p);
  std::ostringstream s;
  s << "k " << r.k << ", k0 " << r.k0 << '\n';
  if (r.k == 0) s << "no tracked eigenvalues\n";
  for (int j = 0; j < r.fitted_first_order.size(); ++j)
    s << "Lambda" << j + 1 << ": fitted " << r.fitted_first_order(j) << ", predicted " << r.predicted_first_order(j)
      << '\n';
  for (double sl : r.zero_mode_slopes) s << "zero mode slope " << sl << '\n';
  s << "max relative error " << r.max_relative_error << '\n';
  return finish(o, "eigentrack", s.str(), r.pass);
}

int cmd_star(const Options& o) {
  if (o.variant != "neumann" && o.variant != "dirichlet") throw InputError("variant must be neumann or dirichlet");
  const std::vector<double> m = parse_list(o.v0);
  const StarReport r = cmd_star_example(o.variant == "neumann", cheb_from_monomial(m), {o.order, 1, 10.0});
  std::ostringstream s;
  s << "variant " << o.variant << "\nk " << r.k << '\n';
  if (r.neumann)
    s << "coupling " << std::setprecision(12) << r.coupling << ", expected " << r.expected << ", error " << r.error
      << '\n';
  else
    s << "dirichlet limit " << (r.dirichlet_limit ? "yes" : "no") << '\n';
  print_matrix(s, "A", r.A);
  print_matrix(s, "B", r.B);
  return finish(o, "star_" + o.variant, s.str(), r.pass);
}

int cmd_matching(const Options& o) {
  const GluedProblem p = load(o);
  SweepConfig c = sweep(o);
  if (c.eps_list.empty()) c.eps_list = {0.1, 0.05, 0.025};
  const std::vector<MatchingRow> rows = cmd_matching_verify(c, p);
  const double tol = o.tol > 0 ? o.tol : 1e-7;
  std::ostringstream s;
  bool pass = true;
  for (const MatchingRow& r : rows) {
    s << "eps " << r.eps << ": relative difference " << r.relative_difference << ", continuity defect "
      << r.continuity_defect << '\n';
    pass = pass && r.relative_difference <= tol;
  }
  return finish(o, "matching", s.str(), pass);
}

void common_flags(CLI::App* sub, Options& o) {
  sub->add_option("--problem", o.problem, "problem file (JSON); the built-in star graph when omitted");
  sub->add_option("--eps-list", o.eps_list, "comma separated eps values");
  sub->add_option("--lambda", o.lambda, "spectral parameter, e.g. i, 1+2i or 1,2");
  sub->add_option("--order", o.order, "polynomial order per element");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--tol", o.tol, "tolerance for the verb's pass test");
  sub->add_option("--f-fixed", o.f_fixed, "source on fixed edges, monomial coefficients in x");
  sub->add_option("--f-small", o.f_small, "source on small edges, monomial coefficients in x/eps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operators on metric graphs with a small glued subgraph"};
  app.require_subcommand(1);
  Options o;
  struct Verb {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const std::vector<Verb> verbs = {
      {"check", "validate vertex conditions and operator hermiticity", cmd_check},
      {"resolve", "solve (H_eps - lambda) u = f", cmd_resolve},
      {"threshold", "threshold basis and condition A", cmd_threshold},
      {"qmatrix", "the matrix Q and its spectrum", cmd_qmatrix},
      {"limit", "limiting vertex condition at M0", cmd_limit},
      {"converge", "convergence rates of the resolvent", cmd_converge},
      {"taylor-fit", "polynomial fits in eps", cmd_taylor},
      {"eigentrack", "small eigenvalues of the extended operator", cmd_eigentrack},
      {"star-example", "built-in star graph", cmd_star},
      {"matching-verify", "matching solver against the direct solve", cmd_matching},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> subs;
  for (const Verb& v : verbs) {
    CLI::App* sub = app.add_subcommand(v.name, v.help);
    common_flags(sub, o);
    if (std::string(v.name) == "star-example") {
      sub->add_option("--variant", o.variant, "neumann or dirichlet");
      sub->add_option("--v0", o.v0, "V0 as monomial coefficients in t");
    }
    subs.emplace_back(sub, v.run);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }
  try {
    for (auto& [sub, run] : subs)
      if (sub->parsed()) return run(o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const SchemaError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const DimensionError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const PartitionError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kInput;
}
