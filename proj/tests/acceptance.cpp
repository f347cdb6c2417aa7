// Prints one PASS/FAIL line per acceptance criterion and exits nonzero on any FAIL.
// Usage: qsc_acceptance --cli <path to qsc_cli> --specs <data directory>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "qsc/json_io.hpp"

using namespace qsc;
using qsc::testing::adapted_m;
using qsc::testing::add_future_roles;
using qsc::testing::random_fock;
using qsc::testing::random_integrand;
using qsc::testing::random_m;
using qsc::testing::random_table;
using qsc::testing::random_unitary_generator;
using qsc::testing::Rng;

namespace {

struct Measure {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool ok() const { return value <= tol; }
};

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}
  void add(const std::string& name, double value, double tol) { items_.push_back({name, value, tol}); }
  void note(const std::string& text) { notes_.push_back(text); }
  bool pass() const {
    for (const auto& m : items_)
      if (!m.ok()) return false;
    return !items_.empty();
  }
  std::string line() const {
    std::ostringstream os;
    os << (pass() ? "PASS " : "FAIL ") << name_;
    for (const auto& m : items_) os << " " << m.name << "=" << m.value << (m.ok() ? "<=" : ">") << m.tol;
    for (const auto& n : notes_) os << " [" << n << "]";
    return os.str();
  }

 private:
  std::string name_;
  std::vector<Measure> items_;
  std::vector<std::string> notes_;
};

GridPtr grid3(int d = 1) { return make_grid({0.1, 0.3, 0.7}, {0.2, 0.5, 0.3}, d); }

double scaled(const ItoResidual& r) { return r.exact / std::max(1.0, r.scale); }

Criterion algebra_axioms() {
  Criterion c("algebra_axioms");
  double worst = 0.0;
  for (const auto& alg : {hp_vacuum(), wiener(), poisson(0.5), poisson(1.0), poisson(2.0)}) {
    const ValidationReport v = validate(*alg);
    worst = std::max({worst, v.hermitianity.max_violation, v.associativity.max_violation,
                      v.degeneracy.max_violation});
  }
  c.add("axiom_violation", worst, 1e-14);

  auto hp = hp_vacuum();
  const Vec dn = basis(hp, 3).coeffs;
  Vec am(4);
  am << 0.0, 0.5, cplx(0.0, -0.5), 0.0;
  const AlgebraElement a_minus = element(hp, am);
  const double nn = max_abs(Vec(mul(basis(hp, 3), basis(hp, 3)).coeffs - dn));
  const double ap = max_abs(Vec(mul(a_minus, star(a_minus)).coeffs - basis(hp, 0).coeffs));
  c.add("hp_table", std::max(nn, ap), 0.0);
  return c;
}

Criterion gns() {
  Criterion c("gns");
  double corner = 0.0, cocycle = 0.0, gram_defect = 0.0;
  auto check = [&](const AlgebraPtr& alg, const std::vector<AlgebraElement>& sample) {
    const TriangularRep rep = gns_construct(alg, sample);
    const Mat span = closed_span(alg, sample);
    Mat gram(span.cols(), span.cols());
    for (Index p = 0; p < span.cols(); ++p)
      for (Index q = 0; q < span.cols(); ++q)
        gram(p, q) = l_value(mul(star(element(alg, span.col(p))), element(alg, span.col(q))));
    if (gram.size() > 0) {
      Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (gram + gram.adjoint())));
      gram_defect = std::max(gram_defect, std::max(0.0, -es.eigenvalues().minCoeff()));
    }
    const Vec e = rep.e_vector();
    const Vec ge = metric(rep.dim_k()) * e;
    for (const auto& b : sample) corner = std::max(corner, std::abs(ge.dot(rep.get(b).to_matrix() * e) - l_value(b)));
    for (const auto& a : sample)
      for (const auto& b : sample) {
        const CocycleReport r = verify_cocycles(rep, a, b);
        cocycle = std::max({cocycle, r.j_k, r.k_star_j, r.pairing, r.homomorphism, r.star});
      }
  };
  Rng rng(200);
  auto w = wiener();
  std::vector<AlgebraElement> ws{zero(w), basis(w, 1)};
  for (int i = 0; i < 6; ++i) ws.push_back(element(w, rng.vec(2, 0.7)));
  check(w, ws);
  auto hp = hp_vacuum();
  std::vector<AlgebraElement> hs{zero(hp), basis(hp, 1), basis(hp, 2), basis(hp, 3)};
  for (int i = 0; i < 6; ++i) hs.push_back(element(hp, rng.vec(4, 0.7)));
  check(hp, hs);
  c.add("corner_identity", corner, 1e-10);
  c.add("cocycle_homomorphism", cocycle, 1e-10);
  c.add("gram_psd", gram_defect, 1e-10);
  return c;
}

Criterion kernel_calculus() {
  Criterion c("kernel_calculus");
  Rng rng(201);
  auto g = grid3();
  double hom = 0.0, adj = 0.0, oracle = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const KernelTable k = rng.kernel(g, 2, 12), l = rng.kernel(g, 2, 12);
    const Mat ek = epsilon(k), el = epsilon(l);
    hom = std::max(hom, max_abs(Mat(epsilon(kernel_mul(k, l)) - ek * el)));
    adj = std::max(adj, max_abs(Mat(epsilon(kernel_star(k)) - weighted_adjoint(*g, 2, ek))));
    oracle = std::max(oracle, max_abs(Mat(ek - qsc::testing::epsilon_oracle(k))));
  }
  c.add("homomorphism", hom, 1e-12);
  c.add("star", adj, 1e-12);
  c.add("dense_oracle", oracle, 1e-12);

  auto g4 = make_grid({0.1, 0.3, 0.7, 0.9}, {0.2, 0.5, 0.3, 0.4});
  double mob = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const KernelTable m = rng.kernel(g4, 2, 15);
    mob = std::max(mob, kernel_distance(mobius_to_mm(mobius_to_kernel(m)), m));
    mob = std::max(mob, kernel_distance(mobius_to_kernel(mobius_to_mm(m)), m));
  }
  c.add("mobius_round_trip", mob, 1e-14);

  auto g2 = make_grid({0.1, 0.2}, {0.5, 0.25});
  const PseudoFock sp = pseudo_fock_space(g2);
  double comp = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<TriangularOp> ops;
    for (int x = 0; x < 2; ++x) {
      TriangularOp t;
      t.l = rng.complex();
      t.k_row = rng.mat(1, 1);
      t.k_col = rng.vec(1);
      t.j = rng.mat(1, 1);
      ops.push_back(t);
    }
    const Mat cm = j_project(sp) * pseudo_fock_dilate(sp, ops) * j_embed(sp);
    comp = std::max(comp, max_abs(Mat(cm - epsilon(exponential_kernel(g2, ops)))));
  }
  c.add("pseudo_fock_compression", comp, 1e-12);
  return c;
}

Criterion sum_integral() {
  Criterion c("sum_integral");
  Rng rng(202);
  std::vector<double> t, w;
  for (int x = 0; x < 5; ++x) {
    t.push_back(0.1 + 0.2 * x);
    w.push_back(0.15 + 0.05 * x);
  }
  auto g = make_grid(t, w);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::pair<Chain, Chain>, cplx> table;
    for (Chain a = 0; a < 32; ++a)
      for (Chain b = 0; b < 32; ++b)
        if (!(a & b)) table[{a, b}] = rng.complex();
    worst = std::max(worst, sum_integral_check(*g, [&](Chain a, Chain b) { return table.at({a, b}); }).residual);
  }
  c.add("residual", worst, 1e-12);
  return c;
}

Criterion integrals() {
  Criterion c("integrals");
  Rng rng(203);
  double adj = 0.0, rec = 0.0, intw = 0.0, violation = 0.0;
  for (int d : {1, 2}) {
    auto g = grid3(d);
    for (int trial = 0; trial < 5; ++trial) {
      const TableIntegrand b = random_table(rng, g, 2, 12);
      const IntegrandQuadruple der = qs_derivatives(b);
      const MIntegrand m = random_m(rng, g, 2, 15);
      for (double t : {0.2, 0.5, 1.0}) {
        const Mat i = multiple_integral_matrix(b, t);
        adj = std::max(adj, max_abs(Mat(multiple_integral_matrix(table_star(b), t) - weighted_adjoint(*g, 2, i))));
        rec = std::max(rec, max_abs(Mat(table_constant(b) + single_integral_matrix(der, t) - i)));
        intw = std::max(intw, max_abs(Mat(epsilon(counting_integral(m, g, 2, t)) -
                                          multiple_integral_matrix(epsilon_table(m, g, 2), t))));
      }
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto g = grid3(trial % 2 == 0 ? 1 : 2);
    const TableIntegrand b = random_table(rng, g, 2, 10);
    RVec p(3), r(3), s(3);
    for (int x = 0; x < 3; ++x) {
      p(x) = rng.uniform(1.0, 3.0);
      r(x) = rng.uniform(0.3, 2.0);
      s(x) = rng.uniform(0.3, 2.0);
    }
    const NormEstimate e = table_norm_estimate(b, p, r, s, rng.uniform(0.0, 1.0));
    violation = std::max(violation, e.measured - e.bound);
  }
  c.add("adjoint_rule", adj, 1e-12);
  c.add("reconstruction", rec, 1e-12);
  c.add("intertwining", intw, 1e-12);
  c.add("norm_bound_excess", std::max(0.0, violation), 0.0);
  return c;
}

Criterion ito() {
  Criterion c("ito_formulas");
  Rng rng(204);
  double strong_adapted = 0.0, strong_non = 0.0, weak_adapted = 0.0, weak_non = 0.0, hp_form = 0.0, poly = 0.0;
  auto weak_of = [&](const KernelProcess& p, const GridPtr& g, int dh) {
    IntegrandQuadruple d = IntegrandQuadruple::zero(g, dh);
    for (int x = 0; x < g->n(); ++x) d.points[x] = germs(p, g, x).d().off_corner();
    const WeakResidual w = ito_check_weak(d, epsilon(p(first_cut(*g))), random_fock(rng, g, dh), 1.0);
    return w.exact / std::max(1.0, std::abs(w.lhs));
  };
  auto g = grid3();
  for (int trial = 0; trial < 5; ++trial) {
    const MIntegrand ma = adapted_m(rng, g, 2);
    const KernelProcess pa = [ma, g](double t) { return counting_integral(ma, g, 2, t); };
    MIntegrand mn = random_m(rng, g, 2, 15);
    if (trial % 2 == 0) {
      mn = adapted_m(rng, g, 2);
      add_future_roles(rng, mn, g, 2);
    }
    const KernelProcess pn = [mn, g](double t) { return counting_integral(mn, g, 2, t); };
    for (bool adjoint_first : {false, true}) {
      strong_adapted = std::max(strong_adapted, scaled(ito_check_strong(pa, g, 2, 1.0, adjoint_first)));
      strong_non = std::max(strong_non, scaled(ito_check_strong(pn, g, 2, 1.0, adjoint_first)));
    }
    weak_adapted = std::max(weak_adapted, weak_of(pa, g, 2));
    weak_non = std::max(weak_non, weak_of(pn, g, 2));
    const WeakResidual w = ito_check_weak(random_integrand(rng, g, 2), rng.mat(g->fock_dim(2), g->fock_dim(2)),
                                          random_fock(rng, g, 2), 0.8);
    weak_non = std::max(weak_non, w.exact / std::max(1.0, std::abs(w.lhs)));

    const GeneratorS s = random_unitary_generator(rng, g, 2);
    const Mat k0 = rng.unitary(2);
    const KernelProcess ps = [s, k0](double t) { return chrono_product(s, k0, t); };
    const AdaptedReport ar = ito_check_adapted(ps, g, 2, 1.0);
    hp_form = std::max({hp_form, scaled(ar.ito), ar.adaptedness, ar.germ_structure});
  }
  for (const auto& alg : {hp_vacuum(), wiener(), poisson(2.0)})
    for (int m = 1; m <= 4; ++m) {
      std::vector<Mat> d;
      for (int j = 0; j < alg->dim(); ++j) d.push_back(rng.mat(2, 2, 0.7));
      poly = std::max(poly, functional_ito_poly(*alg, rng.mat(2, 2, 0.7), d, m).residual);
    }
  c.add("strong_adapted", strong_adapted, 1e-11);
  c.add("strong_nonadapted", strong_non, 1e-11);
  c.add("weak_adapted", weak_adapted, 1e-11);
  c.add("weak_nonadapted", weak_non, 1e-11);
  c.add("adapted_hp_form", hp_form, 1e-11);
  c.add("functional_poly", poly, 1e-12);
  c.note("strong and weak residuals relative to max(1, |lhs|)");
  return c;
}

Criterion qsde() {
  Criterion c("qsde");
  Rng rng(205);
  double fixed = 0.0, unit = 0.0, pu = 0.0, reas = 0.0, three10 = 0.0;
  for (int d : {1, 2}) {
    auto g = grid3(d);
    for (int trial = 0; trial < 5; ++trial) {
      const GeneratorS s = random_unitary_generator(rng, g, 2);
      for (int x = 0; x < g->n(); ++x) {
        const UnitarityReport u = pseudo_unitarity_check(s.points[x], g->weight(x));
        pu = std::max({pu, u.cc_isometry, u.pm_identity, u.cm_identity, u.assembled});
      }
      const FixedPointReport r = solve_qsde(s, rng.unitary(2), 1.0);
      fixed = std::max(fixed, r.residual);
      unit = std::max(unit, max_abs(Mat(weighted_adjoint(*g, 2, r.t_t) * r.t_t - Mat::Identity(r.t_t.rows(), r.t_t.cols()))));

      const HamiltonianBlocks h{rng.hermitian(2 * d, 0.7), rng.mat(2 * d, 2, 0.7), rng.hermitian(2, 0.7)};
      const UnitarityReport u0 = pseudo_unitarity_check(exp_generator(h, 0.0), 0.0);
      pu = std::max({pu, u0.cc_isometry, u0.pm_identity, u0.cm_identity, u0.assembled});
      const Decomposition dc = decompose_evolution(h);
      reas = std::max(reas, dc.reassembly);
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto g = grid3();
    const GeneratorS s = random_unitary_generator(rng, g, 2);
    RVec r(3);
    for (int x = 0; x < 3; ++x) r(x) = rng.uniform(0.3, 3.0);
    const Three10Report e = estimate_three10(s, rng.unitary(2), r, rng.uniform(0.2, 1.0));
    three10 = std::max(three10, e.measured - e.bound);
  }
  c.add("fixed_point", fixed, 1e-11);
  c.add("unitarity", unit, 1e-10);
  c.add("pseudo_unitarity", pu, 1e-12);
  c.add("reassembly", reas, 1e-12);
  c.add("three10_excess", std::max(0.0, three10), 0.0);
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
#ifdef WEXITSTATUS
  return WEXITSTATUS(status);
#else
  return status;
#endif
}

Criterion cli(const std::string& exe, const std::filesystem::path& specs) {
  Criterion c("cli");
  namespace fs = std::filesystem;
  const fs::path work = fs::temp_directory_path() / "qsc_acceptance";
  fs::create_directories(work);
  auto invoke = [&](const std::string& command, const fs::path& spec, const fs::path& out, const std::string& extra) {
    return run("\"" + exe + "\" " + command + " --input \"" + spec.string() + "\" --output \"" + out.string() +
               "\" " + extra + " > /dev/null 2>&1");
  };

  const std::vector<std::pair<std::string, std::string>> demos{
      {"validate-algebra", "algebra_hp"}, {"validate-algebra", "algebra_poisson"},
      {"gns", "gns_wiener"},              {"gns", "gns_hp"},
      {"pi-rep", "pi_rep_wiener"},        {"kernel-mul", "kernel_mul"},
      {"ito-check", "ito_adapted"},       {"ito-check", "ito_nonadapted"},
      {"solve", "solve"},                 {"decompose", "decompose"}};
  int demo_bad = 0, determinism_bad = 0;
  for (const auto& [command, name] : demos) {
    const fs::path spec = specs / "demo" / (name + ".json");
    const fs::path a = work / (name + "_a.json"), b = work / (name + "_b.json");
    if (invoke(command, spec, work / (name + ".json"), "") != 0) ++demo_bad;
    const int ea = invoke(command, spec, a, "--deterministic --seed 7");
    const int eb = invoke(command, spec, b, "--deterministic --seed 7");
    if (ea != 0 || eb != 0 || slurp(a).empty() || slurp(a) != slurp(b)) ++determinism_bad;
  }

  struct Defect {
    std::string command, name;
    int exit_code;
    std::string check;
  };
  const std::vector<Defect> defects{
      {"validate-algebra", "algebra_not_hermitian", 1, "hermitianity"},
      {"gns", "gns_not_cpd", 1, "conditional_positivity"},
      {"ito-check", "ito_claimed_adapted", 1, "adaptedness"},
      {"solve", "solve_not_pseudo_unitary", 1, "pseudo_unitarity"},
      {"decompose", "decompose_not_selfadjoint", 1, "pseudo_selfadjoint"},
      {"validate-algebra", "algebra_bad_rank", 2, ""},
      {"kernel-mul", "kernel_mul_bad_block", 2, ""},
      {"kernel-mul", "grid_not_increasing", 2, ""}};
  int defect_bad = 0;
  for (const auto& d : defects) {
    const fs::path out = work / (d.name + ".json");
    fs::remove(out);
    const int code = invoke(d.command, specs / "defect" / (d.name + ".json"), out, "");
    bool ok = code == d.exit_code;
    if (ok && !d.check.empty()) {
      ok = false;
      const json report = json::parse(slurp(out), nullptr, false);
      if (!report.is_discarded() && report.contains("checks"))
        for (const auto& ch : report["checks"])
          if (ch.value("check", "") == d.check && ch.value("pass", true) == false) ok = true;
    }
    if (!ok) ++defect_bad;
  }
  c.add("demo_failures", demo_bad, 0);
  c.add("defect_mismatches", defect_bad, 0);
  c.add("nondeterministic_reports", determinism_bad, 0);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::string exe;
  std::string specs;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--cli") exe = argv[i + 1];
    else if (key == "--specs") specs = argv[i + 1];
  }
  if (exe.empty() || specs.empty()) {
    std::cerr << "usage: qsc_acceptance --cli <qsc_cli> --specs <data dir>\n";
    return 2;
  }
  std::cout.precision(3);
  std::vector<Criterion> results;
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      results.push_back(fn());
    } catch (const std::exception& e) {
      Criterion c(name);
      c.note(std::string("exception: ") + e.what());
      results.push_back(c);
    }
  };
  guarded("algebra_axioms", algebra_axioms);
  guarded("gns", gns);
  guarded("kernel_calculus", kernel_calculus);
  guarded("sum_integral", sum_integral);
  guarded("integrals", integrals);
  guarded("ito_formulas", ito);
  guarded("qsde", qsde);
  guarded("cli", [&] { return cli(exe, specs); });
  bool all = true;
  for (const auto& c : results) {
    std::cout << c.line() << "\n";
    all = all && c.pass();
  }
  return all ? 0 : 1;
}
