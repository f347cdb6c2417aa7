#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include <Eigen/Eigenvalues>

namespace qsc::cli {

namespace {

double pick_tol(const Options& opts, double fallback) { return opts.tol ? *opts.tol : fallback; }

double spec_tol(const json& spec, double fallback) {
  return spec.contains("tol") ? parse_real(spec["tol"], "tol") : fallback;
}

double cut_time(const json& spec, const Options& opts) {
  if (opts.t) return *opts.t;
  return parse_real(spec.at("t"), "t");
}

int parse_dim_h(const json& spec) {
  const int dh = parse_int(spec.at("dim_h"), "dim_h");
  if (dh < 1) throw SchemaError("dim_h: must be positive");
  return dh;
}

Report validate_algebra(const json& spec, const Options& opts) {
  require_keys(spec, "spec", {"algebra"}, {"tol"});
  Report rep;
  const AlgebraPtr alg = parse_algebra(spec["algebra"]);
  const double tol = pick_tol(opts, spec_tol(spec, 1e-12));
  const ValidationReport v = validate(*alg, tol);
  rep.add_check("hermitianity", v.hermitianity.max_violation, tol);
  rep.add_check("associativity", v.associativity.max_violation, tol);
  rep.add_check("degeneracy", v.degeneracy.max_violation, tol);
  rep.residuals["dim"] = alg->dim();
  rep.residuals["ideal_rank"] = v.ideal_rank;
  rep.residuals["ideal_trivial"] = v.ideal_trivial;
  return rep;
}

Mat sample_gram(const AlgebraPtr& alg, const Mat& basis) {
  Mat gram(basis.cols(), basis.cols());
  for (Index p = 0; p < basis.cols(); ++p) {
    const AlgebraElement sp = star(element(alg, basis.col(p)));
    for (Index q = 0; q < basis.cols(); ++q) gram(p, q) = l_value(mul(sp, element(alg, basis.col(q))));
  }
  return gram;
}

Report gns(const json& spec, const Options& opts) {
  require_keys(spec, "spec", {"algebra", "sample"}, {"tol"});
  Report rep;
  const AlgebraPtr alg = parse_algebra(spec["algebra"]);
  const auto sample = parse_elements(alg, spec["sample"], "sample");
  if (sample.empty()) throw SchemaError("sample: at least one element required");
  const double tol = pick_tol(opts, spec_tol(spec, 1e-10));

  const PositivityResult cp = conditional_positivity_check(alg, sample);
  rep.add_check("conditional_positivity", std::max(0.0, -cp.min_eigenvalue), tol);
  rep.residuals["min_eigenvalue"] = cp.min_eigenvalue;
  if (!rep.pass()) return rep;

  const Mat basis = closed_span(alg, sample);
  const Mat gram = sample_gram(alg, basis);
  double gram_defect = 0.0;
  if (gram.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (gram + gram.adjoint())));
    const RVec ev = es.eigenvalues();
    gram_defect = std::max(0.0, -ev.minCoeff()) / std::max(1.0, ev.maxCoeff());
    gram_defect = std::max(gram_defect, max_abs(Mat(gram - gram.adjoint())));
  }
  rep.add_check("gram_psd", gram_defect, tol);

  const TriangularRep tr = gns_construct(alg, sample);
  double corner = 0.0;
  for (Index p = 0; p < basis.cols(); ++p) {
    const AlgebraElement b = element(alg, basis.col(p));
    const Mat m = tr.get(b).to_matrix();
    corner = std::max(corner, std::abs(m(0, m.cols() - 1) - l_value(b)));
  }
  rep.add_check("corner_identity", corner, tol);

  CocycleReport worst;
  for (const auto& a : sample)
    for (const auto& b : sample) {
      const CocycleReport c = verify_cocycles(tr, a, b, tol);
      worst.j_k = std::max(worst.j_k, c.j_k);
      worst.k_star_j = std::max(worst.k_star_j, c.k_star_j);
      worst.pairing = std::max(worst.pairing, c.pairing);
      worst.homomorphism = std::max(worst.homomorphism, c.homomorphism);
      worst.star = std::max(worst.star, c.star);
    }
  rep.add_check("j_k", worst.j_k, tol);
  rep.add_check("k_star_j", worst.k_star_j, tol);
  rep.add_check("pairing", worst.pairing, tol);
  rep.add_check("homomorphism", worst.homomorphism, tol);
  rep.add_check("star", worst.star, tol);
  rep.residuals["dim_k"] = tr.dim_k();
  rep.residuals["span_dim"] = basis.cols();
  rep.residuals["pairs"] = sample.size() * sample.size();
  return rep;
}

ExpSuperposition parse_superposition(const json& j, const Grid& grid) {
  require_keys(j, "vector", {"coeffs", "labels"});
  ExpSuperposition v;
  const Vec c = parse_vector(j["coeffs"], "vector.coeffs");
  if (!j["labels"].is_array() || j["labels"].size() != static_cast<std::size_t>(c.size()))
    throw SchemaError("vector.labels: one label per coefficient");
  for (Index i = 0; i < c.size(); ++i) {
    v.coeffs.push_back(c(i));
    const std::string path = "vector.labels[" + std::to_string(i) + "]";
    const json& lab = j["labels"][static_cast<std::size_t>(i)];
    if (!lab.is_array() || static_cast<int>(lab.size()) != grid.n())
      throw SchemaError(path + ": one vector per grid point");
    std::vector<Vec> per_point;
    for (std::size_t x = 0; x < lab.size(); ++x) {
      Vec k = parse_vector(lab[x], path + "[" + std::to_string(x) + "]");
      if (k.size() != grid.d()) throw SchemaError(path + ": label vectors must have size d");
      per_point.push_back(std::move(k));
    }
    v.labels.push_back(std::move(per_point));
  }
  return v;
}

json superposition_to_json(const ExpSuperposition& v) {
  json labels = json::array();
  for (const auto& lab : v.labels) {
    json pts = json::array();
    for (const auto& k : lab) pts.push_back(to_json(k));
    labels.push_back(pts);
  }
  json coeffs = json::array();
  for (cplx c : v.coeffs) coeffs.push_back(to_json(c));
  return {{"coeffs", coeffs}, {"labels", labels}};
}

Report pi_rep_command(const json& spec, const Options& opts) {
  require_keys(spec, "spec", {"algebra", "sample", "grid", "elements", "elements_b", "vector"}, {"tol"});
  Report rep;
  const AlgebraPtr alg = parse_algebra(spec["algebra"]);
  const auto sample = parse_elements(alg, spec["sample"], "sample");
  const GridPtr grid = parse_grid(spec["grid"]);
  const auto a = parse_elements(alg, spec["elements"], "elements");
  const auto b = parse_elements(alg, spec["elements_b"], "elements_b");
  if (static_cast<int>(a.size()) != grid->n() || static_cast<int>(b.size()) != grid->n())
    throw SchemaError("elements: one element per grid point");
  const ExpSuperposition v = parse_superposition(spec["vector"], *grid);
  const double tol = pick_tol(opts, spec_tol(spec, 1e-10));

  const TriangularRep tr = gns_construct(alg, sample);
  if (tr.dim_k() != grid->d())
    throw SchemaError("grid.d: must equal the GNS dimension " + std::to_string(tr.dim_k()));
  for (std::size_t x = 0; x < a.size(); ++x)
    if (!tr.in_span(a[x]) || !tr.in_span(b[x])) throw SchemaError("elements: outside the span of the sample");

  std::vector<AlgebraElement> ab;
  std::vector<TriangularOp> ops_a;
  for (std::size_t x = 0; x < a.size(); ++x) {
    ab.push_back(monoid_mul(a[x], b[x]));
    ops_a.push_back(tr.get(a[x]));
  }
  const ExpSuperposition two_step = pi_rep(*grid, tr, a, pi_rep(*grid, tr, b, v));
  const ExpSuperposition one_step = pi_rep(*grid, tr, ab, v);
  const Vec lhs = to_fock(grid, two_step).data;
  const Vec rhs = to_fock(grid, one_step).data;
  rep.add_check("multiplicativity", max_abs(Vec(lhs - rhs)) / std::max(1.0, max_abs(rhs)), tol);

  ExpSuperposition vac;
  vac.coeffs = {1.0};
  vac.labels = {std::vector<Vec>(static_cast<std::size_t>(grid->n()), Vec::Zero(grid->d()))};
  const cplx direct = to_fock(grid, pi_rep(*grid, ops_a, vac)).data(0);
  const cplx expected = vacuum_expectation(*grid, ops_a);
  rep.add_check("vacuum_expectation", std::abs(direct - expected) / std::max(1.0, std::abs(expected)), tol);

  rep.residuals["image"] = superposition_to_json(pi_rep(*grid, tr, a, v));
  rep.residuals["vacuum_expectation"] = to_json(expected);
  return rep;
}

Report kernel_mul_command(const json& spec, const Options& opts) {
  require_keys(spec, "spec", {"grid", "dim_h", "K", "L"}, {"tol"});
  Report rep;
  const GridPtr grid = parse_grid(spec["grid"]);
  const int dh = parse_dim_h(spec);
  const KernelTable k = parse_kernel(spec["K"], grid, dh, "K");
  const KernelTable l = parse_kernel(spec["L"], grid, dh, "L");
  const double tol = pick_tol(opts, spec_tol(spec, 1e-12));

  const KernelTable kl = kernel_mul(k, l);
  const Mat ek = epsilon(k), el = epsilon(l);
  rep.add_check("homomorphism", max_abs(Mat(epsilon(kl) - ek * el)), tol);
  rep.add_check("star", max_abs(Mat(epsilon(kernel_star(k)) - weighted_adjoint(*grid, dh, ek))), tol);
  rep.add_check("anti_homomorphism", kernel_distance(kernel_star(kl), kernel_mul(kernel_star(l), kernel_star(k))), tol);
  const double serial = std::max(max_abs(Mat(epsilon_serial(k) - ek)), kernel_distance(kernel_mul_serial(k, l), kl));
  rep.add_check("serial_parallel", serial, tol);
  rep.residuals["product"] = kernel_to_json(kl);
  rep.residuals["product_entries"] = kl.size();
  return rep;
}

Report ito_check_command(const json& spec, const Options& opts) {
  require_keys(spec, "spec", {"grid", "dim_h", "t", "adapted", "M"}, {"h", "tol"});
  Report rep;
  const GridPtr grid = parse_grid(spec["grid"]);
  const int dh = parse_dim_h(spec);
  const double t = cut_time(spec, opts);
  if (!spec["adapted"].is_boolean()) throw SchemaError("adapted: expected a boolean");
  const bool adapted = spec["adapted"].get<bool>();
  const MIntegrand m = parse_m_integrand(spec["M"], grid, dh, "M");
  const double tol = pick_tol(opts, spec_tol(spec, 1e-11));
  const KernelProcess process = [&](double s) { return counting_integral(m, grid, dh, s); };

  const ItoResidual strong = ito_check_strong(process, grid, dh, t, false);
  const ItoResidual strong_adj = ito_check_strong(process, grid, dh, t, true);
  rep.add_check("strong_ito", strong.exact / std::max(1.0, strong.scale), tol);
  rep.add_check("strong_ito_adjoint", strong_adj.exact / std::max(1.0, strong_adj.scale), tol);

  IntegrandQuadruple d = IntegrandQuadruple::zero(grid, dh);
  for (int x = 0; x < grid->n(); ++x) d.points[static_cast<std::size_t>(x)] = germs(process, grid, x).d().off_corner();
  const Mat t0 = epsilon(process(first_cut(*grid)));
  FockVector h = FockVector::zero(grid, dh);
  if (spec.contains("h")) {
    h.data = parse_vector(spec["h"], "h");
    if (h.data.size() != grid->fock_dim(dh)) throw SchemaError("h: must have the truncated Fock dimension");
  } else {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Index i = 0; i < h.data.size(); ++i) h.data(i) = cplx(u(rng), u(rng));
  }
  const WeakResidual weak = ito_check_weak(d, t0, h, t);
  rep.add_check("weak_ito", weak.exact / std::max(1.0, std::abs(weak.lhs)), tol);

  rep.residuals["strong_exact"] = strong.exact;
  rep.residuals["strong_literal"] = strong.literal;
  rep.residuals["strong_scale"] = strong.scale;
  rep.residuals["strong_adjoint_exact"] = strong_adj.exact;
  rep.residuals["strong_adjoint_literal"] = strong_adj.literal;
  rep.residuals["weak_lhs"] = weak.lhs;
  rep.residuals["weak_exact"] = weak.exact;
  rep.residuals["weak_literal"] = weak.literal;
  double detector = 0.0;
  for (int x = 0; x < grid->n(); ++x)
    detector = std::max(detector, adaptedness_residual(process(grid->time(x)), grid->time(x)));
  rep.residuals["nonadapted_detector"] = detector;

  if (adapted) {
    const AdaptedReport ar = ito_check_adapted(process, grid, dh, t);
    rep.add_check("adaptedness", ar.adaptedness, tol);
    rep.add_check("adapted_ito", ar.ito.exact / std::max(1.0, ar.ito.scale), tol);
    rep.add_check("germ_structure", ar.germ_structure, tol);
  }
  return rep;
}

double unitarity_value(const UnitarityReport& u) {
  return std::max({u.cc_isometry, u.pm_identity, u.cm_identity, u.assembled});
}

Report solve_command(const json& spec, const Options& opts) {
  require_keys(spec, "spec", {"grid", "dim_h", "t", "K0"}, {"generators", "S", "r", "tol"});
  if (spec.contains("generators") == spec.contains("S"))
    throw SchemaError("spec: exactly one of 'generators' or 'S' is required");
  Report rep;
  const GridPtr grid = parse_grid(spec["grid"]);
  const int dh = parse_dim_h(spec);
  const double t = cut_time(spec, opts);
  const Mat k0 = parse_matrix(spec["K0"], "K0");
  if (k0.rows() != dh || k0.cols() != dh) throw SchemaError("K0: must be dim_h x dim_h");
  const std::string key = spec.contains("S") ? "S" : "generators";
  const json& list = spec[key];
  if (!list.is_array() || static_cast<int>(list.size()) != grid->n())
    throw SchemaError(key + ": one entry per grid point");

  GeneratorS s{grid, dh, {}};
  std::vector<HamiltonianBlocks> hams;
  for (std::size_t x = 0; x < list.size(); ++x) {
    const std::string path = key + "[" + std::to_string(x) + "]";
    if (key == "S") {
      s.points.push_back(parse_generator_blocks(list[x], path));
    } else {
      hams.push_back(parse_hamiltonian(list[x], path));
      s.points.push_back(exp_generator(hams.back(), grid->weight(static_cast<int>(x))));
    }
  }
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(key + ": " + e.what());
  }
  RVec r = RVec::Ones(grid->n());
  if (spec.contains("r")) {
    r = parse_real_vector(spec["r"], "r");
    if (r.size() != grid->n()) throw SchemaError("r: one weight per grid point");
  }

  double pu = 0.0;
  for (int x = 0; x < grid->n(); ++x)
    pu = std::max(pu, unitarity_value(pseudo_unitarity_check(s.points[static_cast<std::size_t>(x)], grid->weight(x))));
  rep.add_check("pseudo_unitarity", pu, pick_tol(opts, 1e-12));

  const FixedPointReport fp = solve_qsde(s, k0, t);
  rep.add_check("fixed_point", fp.residual, pick_tol(opts, 1e-11));
  rep.add_check("recurrence", fp.recurrence, pick_tol(opts, 1e-12));
  const Mat& tt = fp.t_t;
  const double unit = max_abs(Mat(weighted_adjoint(*grid, dh, tt) * tt - Mat::Identity(tt.rows(), tt.cols())));
  rep.add_check("unitarity", unit, pick_tol(opts, 1e-10));
  rep.add_check("semi_tensor", semi_tensor_residual(s, k0, t), pick_tol(opts, 1e-12));
  const Three10Report est = estimate_three10(s, k0, r, t);
  rep.add_check("three10", std::max(0.0, est.measured - est.bound), pick_tol(opts, 0.0));

  std::vector<Mat> s_pm;
  for (const auto& p : s.points) s_pm.push_back(p.pm);
  const double t_lo = grid->time(0), t_mid = grid->time(grid->n() / 2);
  const Mat v_rs = evolution_family(*grid, s_pm, t_lo, t_mid), v_st = evolution_family(*grid, s_pm, t_mid, t);
  const Mat v_rt = evolution_family(*grid, s_pm, t_lo, t);
  rep.add_check("evolution_consistency", max_abs(Mat(v_rs * v_st - v_rt)), pick_tol(opts, 1e-13));

  if (!hams.empty()) {
    double reassembly = 0.0;
    for (const auto& h : hams) reassembly = std::max(reassembly, decompose_evolution(h).reassembly);
    rep.add_check("decomposition_reassembly", reassembly, pick_tol(opts, 1e-12));
  }

  rep.residuals["T_t"] = to_json(tt);
  rep.residuals["unitarity"] = unit;
  rep.residuals["three10_bound"] = est.bound;
  rep.residuals["three10_measured"] = est.measured;
  return rep;
}

json blocks_to_json(const GeneratorBlocks& b) {
  return {{"S_pm", to_json(b.pm)}, {"S_cm", to_json(b.cm)}, {"S_pc", to_json(b.pc)}, {"S_cc", to_json(b.cc)}};
}

Report decompose_command(const json& spec, const Options& opts) {
  require_keys(spec, "spec", {"H_cc", "H_pc", "H_pm"}, {"tol"});
  json hj = spec;
  hj.erase("tol");
  const HamiltonianBlocks h = parse_hamiltonian(hj, "spec");
  Report rep;
  rep.add_check("pseudo_selfadjoint", pseudo_selfadjoint_residual(h), pick_tol(opts, spec_tol(spec, 1e-12)));
  if (!rep.pass()) return rep;
  rep.add_check("pseudo_unitarity", unitarity_value(pseudo_unitarity_check(exp_generator(h, 0.0), 0.0)),
                pick_tol(opts, 1e-12));
  const Decomposition dc = decompose_evolution(h);
  rep.add_check("diagonalization", dc.diagonalization, pick_tol(opts, 1e-10));
  rep.add_check("orthogonality", dc.orthogonality, pick_tol(opts, 1e-12));
  rep.add_check("reassembly", dc.reassembly, pick_tol(opts, 1e-12));
  rep.add_check("product", dc.product, pick_tol(opts, 1e-12));
  rep.add_check("commutation", dc.commutation, pick_tol(opts, 1e-12));
  rep.residuals["poisson"] = blocks_to_json(dc.poisson);
  rep.residuals["brownian"] = blocks_to_json(dc.brownian);
  rep.residuals["lebesgue"] = blocks_to_json(dc.lebesgue);
  rep.residuals["f0"] = to_json(dc.f0);
  return rep;
}

using Handler = std::function<Report(const json&, const Options&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"validate-algebra", validate_algebra}, {"gns", gns},
      {"pi-rep", pi_rep_command},             {"kernel-mul", kernel_mul_command},
      {"ito-check", ito_check_command},       {"solve", solve_command},
      {"decompose", decompose_command}};
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : handlers()) n.push_back(k);
    return n;
  }();
  return names;
}

Report run_command(const std::string& command, const json& spec, const Options& opts) {
  auto it = handlers().find(command);
  if (it == handlers().end()) throw SchemaError("unknown command '" + command + "'");
  if (opts.tol && !(*opts.tol > 0.0)) throw SchemaError("--tol: must be positive");
  try {
    Report rep = it->second(spec, opts);
    rep.command = command;
    return rep;
  } catch (const json::exception& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace qsc::cli
