#include "qsc/qsde_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace qsc {

GeneratorBlocks GeneratorBlocks::identity(int dim_h, int d) {
  GeneratorBlocks b = zero(dim_h, d);
  b.cc.setIdentity();
  return b;
}

GeneratorBlocks GeneratorBlocks::zero(int dim_h, int d) {
  const Index n = dim_h, nd = static_cast<Index>(dim_h) * d;
  return {Mat::Zero(n, n), Mat::Zero(n, nd), Mat::Zero(nd, n), Mat::Zero(nd, nd)};
}

void GeneratorS::validate() const {
  if (!grid) throw InvalidArgument("GeneratorS: grid required");
  if (static_cast<int>(points.size()) != grid->n()) throw InvalidArgument("GeneratorS: one block set per grid point");
  const Index n = dim_h, nd = static_cast<Index>(dim_h) * grid->d();
  for (const auto& b : points)
    if (b.pm.rows() != n || b.pm.cols() != n || b.cm.rows() != n || b.cm.cols() != nd || b.pc.rows() != nd ||
        b.pc.cols() != n || b.cc.rows() != nd || b.cc.cols() != nd)
      throw InvalidArgument("GeneratorS: block shape mismatch");
}

KernelTable point_kernel(const GeneratorS& s, int x) {
  s.validate();
  const Grid& g = *s.grid;
  const int dh = s.dim_h;
  const Chain px = point(x);
  const GeneratorBlocks& b = s.points[static_cast<std::size_t>(x)];
  KernelTable k(s.grid, dh);
  for (Chain n : g.chains()) {
    if (n & px) continue;
    const Index legs = g.legs(n);
    k.add(Quad{0, 0, 0, n}, Mat::Identity(dh * legs, dh * legs));
    k.add(Quad{px, 0, 0, n}, pad_identity(g, dh, b.pm, 0, 0, n));
    if (!g.admissible(n | px)) continue;
    k.add(Quad{0, 0, 0, n | px}, pad_identity(g, dh, b.cc, px, px, n));
    k.add(Quad{0, px, 0, n}, pad_identity(g, dh, b.cm, px, 0, n));
    k.add(Quad{0, 0, px, n}, pad_identity(g, dh, b.pc, 0, px, n));
  }
  return k;
}

namespace {

KernelTable constant_kernel(const GridPtr& grid, int dim_h, const Mat& k0) {
  if (k0.rows() != dim_h || k0.cols() != dim_h) throw InvalidArgument("K0 must be a dim_h x dim_h matrix");
  KernelTable k(grid, dim_h);
  for (Chain n : grid->chains()) {
    const Index legs = grid->legs(n);
    k.add(Quad{0, 0, 0, n}, kron(k0, Mat::Identity(legs, legs)));
  }
  return k;
}

}  // namespace

KernelTable chrono_product(const GeneratorS& s, const Mat& k0, double t) {
  s.validate();
  KernelTable k = constant_kernel(s.grid, s.dim_h, k0);
  for (int x : chain_points(s.grid->before(t))) k = kernel_mul(k, point_kernel(s, x));
  return k;
}

FixedPointReport solve_qsde(const GeneratorS& s, const Mat& k0, double t) {
  s.validate();
  const Grid& g = *s.grid;
  KernelTable k = constant_kernel(s.grid, s.dim_h, k0);
  const Mat t0 = epsilon(k);
  Mat rhs = t0;
  FixedPointReport rep;
  for (int x : chain_points(g.before(t))) {
    const KernelTable f = point_kernel(s, x);
    const GermMatrix tg = germ_of(k, x);
    const GermMatrix a = germ_add(germ_of(f, x), germ_identity(s.grid, s.dim_h, x), -1.0);
    rhs += one_point_term(g, s.dim_h, x, germ_mul(tg, a).off_corner());
    KernelTable next = kernel_mul(k, f);
    rep.recurrence = std::max(rep.recurrence, max_abs(Mat(epsilon(next) - epsilon(k) * epsilon(f))));
    k = std::move(next);
  }
  rep.t_t = epsilon(k);
  rep.residual = max_abs(Mat(rep.t_t - rhs));
  return rep;
}

Mat deformed_block(const GeneratorBlocks& b, double dx) {
  const Index n = b.pm.rows(), nd = b.cc.rows();
  Mat s(n + nd, n + nd);
  s.topLeftCorner(n, n) = Mat::Identity(n, n) + dx * b.pm;
  s.topRightCorner(n, nd) = std::sqrt(dx) * b.cm;
  s.bottomLeftCorner(nd, n) = std::sqrt(dx) * b.pc;
  s.bottomRightCorner(nd, nd) = b.cc;
  return s;
}

UnitarityReport pseudo_unitarity_check(const GeneratorBlocks& b, double dx, double tol) {
  const Index nd = b.cc.rows();
  UnitarityReport r;
  r.cc_isometry = max_abs(Mat(b.cc.adjoint() * b.cc + dx * b.cm.adjoint() * b.cm - Mat::Identity(nd, nd)));
  r.pm_identity = max_abs(Mat(b.pm + b.pm.adjoint() + b.pc.adjoint() * b.pc + dx * b.pm.adjoint() * b.pm));
  r.cm_identity = max_abs(Mat(b.cm + b.pc.adjoint() * b.cc + dx * b.pm.adjoint() * b.cm));
  const Mat s = deformed_block(b, dx);
  const Mat eye = Mat::Identity(s.rows(), s.cols());
  r.assembled = std::max(max_abs(Mat(s.adjoint() * s - eye)), max_abs(Mat(s * s.adjoint() - eye)));
  r.pass = std::max({r.cc_isometry, r.pm_identity, r.cm_identity, r.assembled}) <= tol;
  return r;
}

double pseudo_selfadjoint_residual(const HamiltonianBlocks& h) {
  return std::max(max_abs(Mat(h.hcc - h.hcc.adjoint())), max_abs(Mat(h.hpm - h.hpm.adjoint())));
}

cplx phi_series(cplx z) {
  // sum_k (iz)^k / (k + 1)!
  cplx term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= I_UNIT * z / static_cast<double>(k + 1);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

cplx phi_closed(cplx z) { return (std::exp(I_UNIT * z) - 1.0) / (I_UNIT * z); }

namespace {

constexpr double kSeriesCutoff = 1e-4;

cplx psi_scalar(double z) {
  if (std::abs(z) < kSeriesCutoff) {
    // -sum_k (iz)^k / (k + 2)!
    cplx term = 0.5, sum = 0.5;
    for (int k = 1; k < 8; ++k) {
      term *= I_UNIT * z / static_cast<double>(k + 2);
      sum += term;
    }
    return -sum;
  }
  return (std::exp(I_UNIT * z) - 1.0 - I_UNIT * z) / (z * z);
}

cplx phi_scalar(double z) { return std::abs(z) < kSeriesCutoff ? phi_series(z) : phi_closed(z); }

template <class F>
Mat hermitian_function(const Mat& h, F f) {
  if (max_abs(Mat(h - h.adjoint())) > 1e-12 * std::max(1.0, max_abs(h)))
    throw InvalidArgument("matrix function: argument must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const auto& v = es.eigenvectors();
  Vec vals(es.eigenvalues().size());
  for (Index i = 0; i < vals.size(); ++i) vals(i) = f(es.eigenvalues()(i));
  return v * vals.asDiagonal() * v.adjoint();
}

void require_hamiltonian(const HamiltonianBlocks& h) {
  const Index n = h.hpm.rows(), nd = h.hcc.rows();
  if (h.hpm.cols() != n || h.hcc.cols() != nd || h.hpc.rows() != nd || h.hpc.cols() != n || n == 0 || nd % n != 0)
    throw InvalidArgument("Hamiltonian blocks have inconsistent shapes");
  const double scale = std::max({1.0, max_abs(h.hcc), max_abs(h.hpm)});
  if (pseudo_selfadjoint_residual(h) > 1e-12 * scale) throw CheckFailure("Hamiltonian is not pseudo-selfadjoint");
}

}  // namespace

Mat phi_matrix(const Mat& h) { return hermitian_function(h, phi_scalar); }
Mat psi_matrix(const Mat& h) { return hermitian_function(h, psi_scalar); }

GeneratorBlocks exp_generator(const HamiltonianBlocks& h, double dx) {
  require_hamiltonian(h);
  if (dx < 0.0) throw InvalidArgument("exp_generator: dx must be nonnegative");
  const Index n = h.hpm.rows(), nd = h.hcc.rows();
  const Mat hcm = h.hpc.adjoint();
  GeneratorBlocks b;
  if (dx == 0.0) {
    const Mat phi = phi_matrix(h.hcc);
    b.cc = hermitian_function(h.hcc, [](double z) { return std::exp(I_UNIT * z); });
    b.pc = phi * (I_UNIT * h.hpc);
    b.cm = I_UNIT * hcm * phi;
    b.pm = hcm * psi_matrix(h.hcc) * h.hpc + I_UNIT * h.hpm;
    return b;
  }
  Mat big(n + nd, n + nd);
  const double r = std::sqrt(dx);
  big.topLeftCorner(n, n) = dx * h.hpm;
  big.topRightCorner(n, nd) = r * hcm;
  big.bottomLeftCorner(nd, n) = r * h.hpc;
  big.bottomRightCorner(nd, nd) = h.hcc;
  big = (0.5 * (big + big.adjoint())).eval();
  const Mat s = hermitian_function(big, [](double z) { return std::exp(I_UNIT * z); });
  b.pm = (s.topLeftCorner(n, n) - Mat::Identity(n, n)) / dx;
  b.cm = s.topRightCorner(n, nd) / r;
  b.pc = s.bottomLeftCorner(nd, n) / r;
  b.cc = s.bottomRightCorner(nd, nd);
  return b;
}

namespace {

// g B^H g with the block metric g = antidiag(I_n, I_nd, I_n).
Mat block_pseudo_adjoint(const Mat& b, Index n, Index nd) {
  Mat g = Mat::Zero(2 * n + nd, 2 * n + nd);
  g.block(0, n + nd, n, n).setIdentity();
  g.block(n, n, nd, nd).setIdentity();
  g.block(n + nd, 0, n, n).setIdentity();
  return g * b.adjoint() * g;
}

}  // namespace

Mat triangular_part(const GeneratorBlocks& b) {
  const Index n = b.pm.rows(), nd = b.cc.rows();
  Mat m = Mat::Zero(2 * n + nd, 2 * n + nd);
  m.block(0, n, n, nd) = b.cm;
  m.block(0, n + nd, n, n) = b.pm;
  m.block(n, n, nd, nd) = b.cc;
  m.block(n, n + nd, nd, n) = b.pc;
  return m;
}

Decomposition decompose_evolution(const HamiltonianBlocks& h, double tol) {
  require_hamiltonian(h);
  const Index n = h.hpm.rows(), nd = h.hcc.rows();
  Eigen::SelfAdjointEigenSolver<Mat> es(h.hcc);
  const auto& v = es.eigenvectors();
  const double cut = tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Vec inv(nd), proj(nd);
  for (Index i = 0; i < nd; ++i) {
    const double z = es.eigenvalues()(i);
    const bool keep = std::abs(z) > cut;
    inv(i) = keep ? 1.0 / z : 0.0;
    proj(i) = keep ? 1.0 : 0.0;
  }
  const Mat pinv = v * inv.asDiagonal() * v.adjoint();
  const Mat range = v * proj.asDiagonal() * v.adjoint();
  const Mat f = pinv * h.hpc;
  const Mat e = -I_UNIT * (Mat::Identity(nd, nd) - range) * h.hpc;
  const Mat l = hermitian_function(h.hcc, [](double z) { return std::exp(I_UNIT * z) - 1.0; });

  Decomposition d;
  d.poisson = {f.adjoint() * l * f, f.adjoint() * l, l * f, l};
  d.brownian = {-0.5 * e.adjoint() * e, e.adjoint(), -e, Mat::Zero(nd, nd)};
  d.lebesgue = GeneratorBlocks::zero(static_cast<int>(n), static_cast<int>(nd / n));
  d.lebesgue.pm = I_UNIT * (h.hpm - f.adjoint() * h.hcc * f);

  const Index size = 2 * n + nd;
  d.f0 = Mat::Identity(size, size);
  d.f0.block(0, n, n, nd) = f.adjoint();
  d.f0.block(0, n + nd, n, n) = -0.5 * f.adjoint() * f;
  d.f0.block(n, n + nd, nd, n) = -f;

  const std::array<Mat, 3> parts{triangular_part(d.poisson), triangular_part(d.brownian),
                                 triangular_part(d.lebesgue)};
  Mat diag = Mat::Zero(size, size);
  diag.block(n, n, nd, nd) = l;
  d.diagonalization = max_abs(Mat(block_pseudo_adjoint(d.f0, n, nd) * parts[0] * d.f0 - diag));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      d.orthogonality = std::max(d.orthogonality, max_abs(Mat(parts[i] * parts[j])));
      d.commutation = std::max(d.commutation, max_abs(Mat(parts[i] * parts[j] - parts[j] * parts[i])));
    }
  GeneratorBlocks full = exp_generator(h, 0.0);
  full.cc -= Mat::Identity(nd, nd);
  const Mat target = triangular_part(full);
  const Mat eye = Mat::Identity(size, size);
  d.reassembly = max_abs(Mat(parts[0] + parts[1] + parts[2] - target));
  d.product = max_abs(Mat((eye + parts[0]) * (eye + parts[1]) * (eye + parts[2]) - eye - target));
  return d;
}

Mat evolution_family(const Grid& grid, const std::vector<Mat>& s_pm, double s, double t) {
  if (static_cast<int>(s_pm.size()) != grid.n()) throw InvalidArgument("evolution_family: one block per grid point");
  const Index n = s_pm.front().rows();
  Mat u = Mat::Identity(n, n);
  for (int x = 0; x < grid.n(); ++x) {
    const Mat& a = s_pm[static_cast<std::size_t>(x)];
    if (a.rows() != n || a.cols() != n) throw InvalidArgument("evolution_family: block shape mismatch");
    const double tx = grid.time(x);
    if (tx >= s && tx < t) u = u * (Mat::Identity(n, n) + grid.weight(x) * a);
  }
  return u;
}

namespace {

// Acts with b on H (x) K^in_x -> H (x) K^out_x while passing m middle legs.
Mat embed_local(const Mat& b, int dim_h, Index mid, Index in_legs, Index out_legs) {
  Mat e = Mat::Zero(dim_h * mid * out_legs, dim_h * mid * in_legs);
  for (Index h = 0; h < dim_h; ++h)
    for (Index hp = 0; hp < dim_h; ++hp)
      for (Index mu = 0; mu < mid; ++mu)
        for (Index o = 0; o < out_legs; ++o)
          for (Index i = 0; i < in_legs; ++i)
            e((h * mid + mu) * out_legs + o, (hp * mid + mu) * in_legs + i) = b(h * out_legs + o, hp * in_legs + i);
  return e;
}

}  // namespace

double semi_tensor_residual(const GeneratorS& s, const Mat& k0, double t) {
  s.validate();
  const Grid& g = *s.grid;
  const int dh = s.dim_h;
  const int d = g.d();
  const std::vector<int> past = chain_points(g.before(t));
  const int k = static_cast<int>(past.size());
  if (k > 8) throw InvalidArgument("semi_tensor_residual: at most 8 past points");
  std::map<std::array<Chain, 3>, Mat> expected;
  for (Index code = 0; code < ipow(5, k); ++code) {
    Mat m = k0;
    std::array<Chain, 3> key{0, 0, 0};
    Index rest = code;
    int in_count = 0;
    for (int i = 0; i < k; ++i) {
      const int role = static_cast<int>(rest % 5);
      rest /= 5;
      const int x = past[static_cast<std::size_t>(i)];
      if (role == 0) continue;
      const GeneratorBlocks& b = s.points[static_cast<std::size_t>(x)];
      const Mat* blk = nullptr;
      Index in_l = 1, out_l = 1;
      double w = 1.0;
      switch (role) {
        case 1: blk = &b.pm; w = g.weight(x); break;
        case 2: blk = &b.cm; in_l = d; key[2] |= point(x); break;
        case 3: blk = &b.pc; out_l = d; key[0] |= point(x); break;
        default: blk = &b.cc; in_l = d; out_l = d; key[1] |= point(x); break;
      }
      m = w * kron(m, Mat::Identity(out_l, out_l)) * embed_local(*blk, dh, ipow(d, in_count), in_l, out_l);
      if (in_l > 1 || role == 2 || role == 4) ++in_count;
    }
    if (!g.admissible(key[0] | key[1]) || !g.admissible(key[1] | key[2])) continue;
    auto it = expected.find(key);
    if (it == expected.end())
      expected.emplace(key, m);
    else
      it->second += m;
  }
  const Chain past_chain = g.before(t);
  const auto actual = kernel_k3(chrono_product(s, k0, t));
  double worst = 0.0;
  for (const auto& [key, blk] : actual) {
    if ((key[0] | key[1] | key[2]) & ~past_chain) continue;
    auto it = expected.find(key);
    worst = std::max(worst, it == expected.end() ? max_abs(blk) : max_abs(Mat(blk - it->second)));
  }
  for (const auto& [key, blk] : expected)
    if (!actual.count(key)) worst = std::max(worst, max_abs(blk));
  return worst;
}

Three10Report estimate_three10(const GeneratorS& s, const Mat& k0, const WeightFunction& r, double t) {
  s.validate();
  const Grid& g = *s.grid;
  require_weight(g, r, "estimate_three10");
  double expo = 0.0;
  for (int x : chain_points(g.before(t))) {
    const GeneratorBlocks& b = s.points[static_cast<std::size_t>(x)];
    const double a = spectral_norm(b.cm), c = spectral_norm(b.pc);
    expo += 0.5 * g.weight(x) * r(x) * (a * a + c * c);
  }
  Three10Report rep;
  rep.bound = std::exp(expo);
  const RVec q = (RVec::Ones(g.n()) + r.cwiseInverse()).eval();
  rep.measured = q_norm(g, s.dim_h, epsilon(chrono_product(s, k0, t)), q);
  return rep;
}

}  // namespace qsc
