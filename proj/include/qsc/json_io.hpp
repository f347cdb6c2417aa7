#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsc/qs_integral.hpp"
#include "qsc/qsde_solver.hpp"

namespace qsc {

using json = nlohmann::json;

// Malformed or schema-violating input; the message names the offending field.
class SchemaError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Rejects keys outside required + optional and reports missing required keys.
void require_keys(const json& j, const std::string& path, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {});

double parse_real(const json& j, const std::string& path);
int parse_int(const json& j, const std::string& path);
cplx parse_complex(const json& j, const std::string& path);
Vec parse_vector(const json& j, const std::string& path);
RVec parse_real_vector(const json& j, const std::string& path);
Mat parse_matrix(const json& j, const std::string& path);

json to_json(cplx z);
json to_json(const Vec& v);
json to_json(const Mat& m);
json real_to_json(const RVec& v);

// {"preset": "hp_vacuum" | "wiener" | "poisson", "lambda": x} or
// {"dim": n, "names": [...], "c": [n matrices n x n]}.
AlgebraPtr parse_algebra(const json& j, const std::string& path = "algebra");
json algebra_to_json(const ItoAlgebra& alg);

AlgebraElement parse_element(const AlgebraPtr& alg, const json& j, const std::string& path);
std::vector<AlgebraElement> parse_elements(const AlgebraPtr& alg, const json& j, const std::string& path);

// {"times": [...], "weights": [...], "d": 1, "n_max": n}
GridPtr parse_grid(const json& j, const std::string& path = "grid");
json grid_to_json(const Grid& g);

// {"w_pm": [points], "w_cm": [...], "w_pc": [...], "w_cc": [...]}, all optional.
Quad parse_quad(const json& j, const Grid& grid, const std::string& path);
json quad_to_json(const Quad& q);
Chain parse_chain(const json& j, const Grid& grid, const std::string& path);
json chain_to_json(Chain c);

// List of {"w_pm", "w_cm", "w_pc", "w_cc", "block"} entries.
KernelTable parse_kernel(const json& j, const GridPtr& grid, int dim_h, const std::string& path);
json kernel_to_json(const KernelTable& k);

// List of {"theta": quad, "upsilon": quad, "block": matrix} entries.
MIntegrand parse_m_integrand(const json& j, const GridPtr& grid, int dim_h, const std::string& path);

// {"H_cc", "H_pc", "H_pm"}
HamiltonianBlocks parse_hamiltonian(const json& j, const std::string& path);
// {"S_pm", "S_cm", "S_pc", "S_cc"}
GeneratorBlocks parse_generator_blocks(const json& j, const std::string& path);

json read_json_file(const std::string& path);

struct CheckResult {
  std::string check;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Report with sorted keys: checks, command, inputs, pass, residuals, wall_time_s.
struct Report {
  std::string command;
  json inputs = json::object();
  json residuals = json::object();
  std::vector<CheckResult> checks;
  double wall_time_s = 0.0;

  // Adds a check that passes when value <= tolerance.
  void add_check(const std::string& name, double value, double tolerance);
  bool pass() const;
  json to_json() const;
  std::string to_csv() const;
};

}  // namespace qsc
