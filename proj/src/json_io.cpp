#include "qsc/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace qsc {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw SchemaError(path + ": " + what); }

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path, std::string("missing key '") + key + "'");
  return j.at(key);
}

std::string sub(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

}  // namespace

void require_keys(const json& j, const std::string& path, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
  if (!j.is_object()) fail(path, "expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!j.contains(k)) fail(path, std::string("missing key '") + k + "'");
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(path, "unknown key '" + k + "'");
}

double parse_real(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int parse_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

cplx parse_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(path, "expected a complex number [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec parse_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of complex numbers");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = parse_complex(j[i], at(path, i));
  return v;
}

RVec parse_real_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  RVec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = parse_real(j[i], at(path, i));
  return v;
}

Mat parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) fail(at(path, 0), "expected a non-empty row");
  const std::size_t cols = j[0].size();
  Mat m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(at(path, r), "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = parse_complex(j[r][c], at(at(path, r), c));
  }
  return m;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

json to_json(const Mat& m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    a.push_back(row);
  }
  return a;
}

json real_to_json(const RVec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

AlgebraPtr parse_algebra(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (j.contains("preset")) {
    require_keys(j, path, {"preset"}, {"lambda"});
    if (!j["preset"].is_string()) fail(sub(path, "preset"), "expected a string");
    const std::string name = j["preset"].get<std::string>();
    if (name == "hp_vacuum" || name == "wiener") {
      if (j.contains("lambda")) fail(path, "preset '" + name + "' takes no lambda");
      return name == "hp_vacuum" ? hp_vacuum() : wiener();
    }
    if (name == "poisson") return poisson(parse_real(field(j, path, "lambda"), sub(path, "lambda")));
    fail(sub(path, "preset"), "unknown preset '" + name + "'");
  }
  require_keys(j, path, {"dim", "c"}, {"names", "lambda"});
  const int dim = parse_int(j["dim"], sub(path, "dim"));
  if (dim < 1) fail(sub(path, "dim"), "must be positive");
  const json& c = j["c"];
  const std::string cpath = sub(path, "c");
  if (!c.is_array() || static_cast<int>(c.size()) != dim) fail(cpath, "expected dim matrices (rank-3 tensor)");
  std::vector<Mat> mats;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!c[k].is_array() || c[k].empty() || !c[k][0].is_array() || c[k][0].empty() || !c[k][0][0].is_array())
      fail(at(cpath, k), "expected a matrix of complex numbers (rank-3 tensor)");
    Mat m = parse_matrix(c[k], at(cpath, k));
    if (m.rows() != dim || m.cols() != dim) fail(at(cpath, k), "expected a dim x dim matrix");
    mats.push_back(std::move(m));
  }
  std::vector<std::string> names;
  if (j.contains("names")) {
    if (!j["names"].is_array()) fail(sub(path, "names"), "expected an array of strings");
    for (std::size_t i = 0; i < j["names"].size(); ++i) {
      if (!j["names"][i].is_string()) fail(at(sub(path, "names"), i), "expected a string");
      names.push_back(j["names"][i].get<std::string>());
    }
  }
  const double lambda = j.contains("lambda") ? parse_real(j["lambda"], sub(path, "lambda")) : 0.0;
  try {
    return std::make_shared<const ItoAlgebra>(std::move(names), std::move(mats), lambda);
  } catch (const InvalidArgument& e) {
    fail(path, e.what());
  }
}

json algebra_to_json(const ItoAlgebra& alg) {
  json c = json::array();
  for (const auto& m : alg.tensor()) c.push_back(to_json(m));
  return {{"dim", alg.dim()}, {"names", alg.names()}, {"c", c}, {"lambda", alg.lambda()}};
}

AlgebraElement parse_element(const AlgebraPtr& alg, const json& j, const std::string& path) {
  Vec v = parse_vector(j, path);
  if (v.size() != alg->dim()) fail(path, "element must have dim coefficients");
  return element(alg, v);
}

std::vector<AlgebraElement> parse_elements(const AlgebraPtr& alg, const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of elements");
  std::vector<AlgebraElement> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_element(alg, j[i], at(path, i)));
  return out;
}

GridPtr parse_grid(const json& j, const std::string& path) {
  require_keys(j, path, {"times", "weights"}, {"d", "n_max"});
  const RVec t = parse_real_vector(j["times"], sub(path, "times"));
  const RVec w = parse_real_vector(j["weights"], sub(path, "weights"));
  const int d = j.contains("d") ? parse_int(j["d"], sub(path, "d")) : 1;
  const int n_max = j.contains("n_max") ? parse_int(j["n_max"], sub(path, "n_max")) : -1;
  try {
    return make_grid(std::vector<double>(t.data(), t.data() + t.size()),
                     std::vector<double>(w.data(), w.data() + w.size()), d, n_max);
  } catch (const InvalidArgument& e) {
    fail(path, e.what());
  }
}

json grid_to_json(const Grid& g) {
  return {{"times", g.times()}, {"weights", g.weights()}, {"d", g.d()}, {"n_max", g.n_max()}};
}

Chain parse_chain(const json& j, const Grid& grid, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of point indices");
  Chain c = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const int x = parse_int(j[i], at(path, i));
    if (x < 0 || x >= grid.n()) fail(at(path, i), "point index outside the grid");
    if (contains(c, x)) fail(at(path, i), "repeated point");
    c |= point(x);
  }
  return c;
}

json chain_to_json(Chain c) { return chain_points(c); }

Quad parse_quad(const json& j, const Grid& grid, const std::string& path) {
  require_keys(j, path, {}, {"w_pm", "w_cm", "w_pc", "w_cc"});
  Quad q;
  if (j.contains("w_pm")) q.pm = parse_chain(j["w_pm"], grid, sub(path, "w_pm"));
  if (j.contains("w_cm")) q.cm = parse_chain(j["w_cm"], grid, sub(path, "w_cm"));
  if (j.contains("w_pc")) q.pc = parse_chain(j["w_pc"], grid, sub(path, "w_pc"));
  if (j.contains("w_cc")) q.cc = parse_chain(j["w_cc"], grid, sub(path, "w_cc"));
  if (!q.disjoint()) fail(path, "chains must be pairwise disjoint");
  return q;
}

json quad_to_json(const Quad& q) {
  return {{"w_pm", chain_to_json(q.pm)}, {"w_cm", chain_to_json(q.cm)}, {"w_pc", chain_to_json(q.pc)},
          {"w_cc", chain_to_json(q.cc)}};
}

KernelTable parse_kernel(const json& j, const GridPtr& grid, int dim_h, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of kernel entries");
  KernelTable k(grid, dim_h);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = at(path, i);
    require_keys(j[i], p, {"block"}, {"w_pm", "w_cm", "w_pc", "w_cc"});
    json chains = j[i];
    chains.erase("block");
    const Quad q = parse_quad(chains, *grid, p);
    const Mat blk = parse_matrix(j[i]["block"], sub(p, "block"));
    try {
      k.add(q, blk);
    } catch (const InvalidArgument& e) {
      fail(p, e.what());
    }
  }
  return k;
}

json kernel_to_json(const KernelTable& k) {
  json a = json::array();
  for (const auto& [q, blk] : k.entries()) {
    json e = quad_to_json(q);
    e["block"] = to_json(blk);
    a.push_back(e);
  }
  return a;
}

MIntegrand parse_m_integrand(const json& j, const GridPtr& grid, int dim_h, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of entries");
  MIntegrand m;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = at(path, i);
    require_keys(j[i], p, {"theta", "upsilon", "block"});
    const Quad theta = parse_quad(j[i]["theta"], *grid, sub(p, "theta"));
    const Quad upsilon = parse_quad(j[i]["upsilon"], *grid, sub(p, "upsilon"));
    const Mat blk = parse_matrix(j[i]["block"], sub(p, "block"));
    try {
      add_m_entry(m, grid, dim_h, theta, upsilon, blk);
    } catch (const InvalidArgument& e) {
      fail(p, e.what());
    }
  }
  return m;
}

HamiltonianBlocks parse_hamiltonian(const json& j, const std::string& path) {
  require_keys(j, path, {"H_cc", "H_pc", "H_pm"});
  HamiltonianBlocks h{parse_matrix(j["H_cc"], sub(path, "H_cc")), parse_matrix(j["H_pc"], sub(path, "H_pc")),
                      parse_matrix(j["H_pm"], sub(path, "H_pm"))};
  const Index n = h.hpm.rows(), nd = h.hcc.rows();
  if (h.hpm.cols() != n || h.hcc.cols() != nd || h.hpc.rows() != nd || h.hpc.cols() != n || nd % n != 0)
    fail(path, "inconsistent block shapes");
  return h;
}

GeneratorBlocks parse_generator_blocks(const json& j, const std::string& path) {
  require_keys(j, path, {"S_pm", "S_cm", "S_pc", "S_cc"});
  GeneratorBlocks b{parse_matrix(j["S_pm"], sub(path, "S_pm")), parse_matrix(j["S_cm"], sub(path, "S_cm")),
                    parse_matrix(j["S_pc"], sub(path, "S_pc")), parse_matrix(j["S_cc"], sub(path, "S_cc"))};
  const Index n = b.pm.rows(), nd = b.cc.rows();
  if (b.pm.cols() != n || b.cc.cols() != nd || b.cm.rows() != n || b.cm.cols() != nd || b.pc.rows() != nd ||
      b.pc.cols() != n)
    fail(path, "inconsistent block shapes");
  return b;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void Report::add_check(const std::string& name, double value, double tolerance) {
  checks.push_back({name, value, tolerance, value <= tolerance});
}

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

json Report::to_json() const {
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"check", c.check}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  return {{"command", command}, {"inputs", inputs},        {"residuals", residuals},
          {"checks", cs},       {"pass", pass()},          {"wall_time_s", wall_time_s}};
}

std::string Report::to_csv() const {
  std::ostringstream out;
  out << "check,value,tolerance,pass\n";
  out << std::setprecision(17);
  for (const auto& c : checks) out << c.check << ',' << c.value << ',' << c.tolerance << ',' << (c.pass ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace qsc
