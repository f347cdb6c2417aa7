#include "qsc/ito_formula.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace qsc {

GermMatrix germ_of(const KernelTable& k, int x) {
  if (k.in_extra() || k.out_extra()) throw InvalidArgument("germ_of: kernel with extra legs");
  const GridPtr& grid = k.grid();
  if (x < 0 || x >= grid->n()) throw InvalidArgument("germ_of: point outside the grid");
  const Chain px = point(x);
  const int dh = k.dim_h();
  KernelTable e(grid, dh), pm(grid, dh), cm(grid, dh, px, 0), pc(grid, dh, 0, px), cc(grid, dh, px, px);
  for (const auto& [q, blk] : k.entries()) {
    if (!grid->admissible(q.in()) || !grid->admissible(q.out())) continue;
    if (!(q.all() & px)) {
      e.add(q, blk);
      continue;
    }
    const Quad r{q.pm & ~px, q.cm & ~px, q.pc & ~px, q.cc & ~px};
    if (q.pm & px)
      pm.add(r, blk);
    else if (q.cm & px)
      cm.add(r, blk);
    else if (q.pc & px)
      pc.add(r, blk);
    else
      cc.add(r, blk);
  }
  return {grid, dh, x, epsilon(e), epsilon(pm), epsilon(cm), epsilon(pc), epsilon(cc)};
}

GermMatrix germ_identity(const GridPtr& grid, int dim_h, int x) { return germ_of(identity_kernel(grid, dim_h), x); }

namespace {

void require_same_point(const GermMatrix& a, const GermMatrix& b) {
  if (!a.grid || !b.grid || !a.grid->same_as(*b.grid) || a.x != b.x || a.dim_h != b.dim_h)
    throw InvalidArgument("germ: point or space mismatch");
}

}  // namespace

GermMatrix germ_mul(const GermMatrix& a, const GermMatrix& b, bool deformed) {
  require_same_point(a, b);
  const double w = deformed ? a.weight() : 0.0;
  GermMatrix out{a.grid, a.dim_h, a.x, Mat(), Mat(), Mat(), Mat(), Mat()};
  out.e = a.e * b.e;
  out.pm = a.e * b.pm + a.cm * b.pc + a.pm * b.e + w * a.pm * b.pm;
  out.cm = a.e * b.cm + a.cm * b.cc + w * a.pm * b.cm;
  out.pc = a.cc * b.pc + a.pc * b.e + w * a.pc * b.pm;
  out.cc = a.cc * b.cc + w * a.pc * b.cm;
  return out;
}

GermMatrix germ_dagger(const GermMatrix& a) {
  const Grid& g = *a.grid;
  const int dh = a.dim_h;
  GermMatrix out{a.grid, dh, a.x, Mat(), Mat(), Mat(), Mat(), Mat()};
  out.e = weighted_adjoint(g, dh, a.e, 0, 0);
  out.pm = weighted_adjoint(g, dh, a.pm, 0, 0);
  out.cm = weighted_adjoint(g, dh, a.pc, 1, 0);
  out.pc = weighted_adjoint(g, dh, a.cm, 0, 1);
  out.cc = weighted_adjoint(g, dh, a.cc, 1, 1);
  return out;
}

GermMatrix germ_add(const GermMatrix& a, const GermMatrix& b, cplx scale_b) {
  require_same_point(a, b);
  return {a.grid,
          a.dim_h,
          a.x,
          a.e + scale_b * b.e,
          a.pm + scale_b * b.pm,
          a.cm + scale_b * b.cm,
          a.pc + scale_b * b.pc,
          a.cc + scale_b * b.cc};
}

double germ_distance(const GermMatrix& a, const GermMatrix& b) {
  require_same_point(a, b);
  return std::max({max_abs(Mat(a.e - b.e)), max_abs(Mat(a.pm - b.pm)), max_abs(Mat(a.cm - b.cm)),
                   max_abs(Mat(a.pc - b.pc)), max_abs(Mat(a.cc - b.cc))});
}

Mat germ_assemble(const GermMatrix& g) { return g.e + one_point_term(*g.grid, g.dim_h, g.x, g.off_corner()); }

double next_cut(const Grid& grid, int x) {
  if (x + 1 < grid.n()) return grid.time(x + 1);
  return grid.time(grid.n() - 1) + 1.0;
}

double first_cut(const Grid& grid) { return grid.time(0); }

GermMatrix GermPair::d() const { return germ_add(g, t, -1.0); }

GermPair germs(const KernelProcess& k, const GridPtr& grid, int x) {
  if (x < 0 || x >= grid->n()) throw InvalidArgument("germs: point outside the grid");
  return {germ_of(k(grid->time(x)), x), germ_of(k(next_cut(*grid, x)), x)};
}

ItoResidual ito_check_strong(const KernelProcess& k, const GridPtr& grid, int dim_h, double t,
                             bool adjoint_first) {
  const Grid& g = *grid;
  const Mat tt = epsilon(k(t));
  const Mat t0 = epsilon(k(first_cut(g)));
  if (tt.rows() != g.fock_dim(dim_h)) throw InvalidArgument("ito_check: process has the wrong dim_h");
  auto square = [&](const Mat& m) -> Mat {
    const Mat adj = weighted_adjoint(g, dim_h, m);
    return adjoint_first ? Mat(adj * m) : Mat(m * adj);
  };
  const Mat lhs = square(tt) - square(t0);
  Mat rhs_exact = Mat::Zero(lhs.rows(), lhs.cols());
  Mat rhs_literal = rhs_exact;
  for (int x : chain_points(g.before(t))) {
    const GermPair p = germs(k, grid, x);
    for (bool deformed : {true, false}) {
      auto sq = [&](const GermMatrix& m) {
        const GermMatrix md = germ_dagger(m);
        return adjoint_first ? germ_mul(md, m, deformed) : germ_mul(m, md, deformed);
      };
      const GermMatrix diff = germ_add(sq(p.g), sq(p.t), -1.0);
      (deformed ? rhs_exact : rhs_literal) += one_point_term(g, dim_h, x, diff.off_corner());
    }
  }
  return {max_abs(Mat(lhs - rhs_exact)), max_abs(Mat(lhs - rhs_literal)), max_abs(lhs)};
}

namespace {

cplx weighted_dot(const RVec& w, const Vec& a, const Vec& b) {
  return (a.conjugate().array() * w.array().cast<cplx>() * b.array()).sum();
}

}  // namespace

WeakResidual ito_check_weak(const IntegrandQuadruple& d, const Mat& t0, const FockVector& h, double t) {
  d.validate();
  const Grid& g = *d.grid;
  const int dh = d.dim_h;
  if (!g.same_as(*h.grid) || h.dim_h != dh) throw InvalidArgument("ito_check_weak: vector space mismatch");
  const Index dim = g.fock_dim(dh);
  if (t0.rows() != dim || t0.cols() != dim) throw InvalidArgument("ito_check_weak: T_0 shape mismatch");
  const RVec w = g.weight_diagonal(dh);
  const RVec we = extended_weights(g, dh, 1);
  Mat tcur = t0;
  double literal = 0.0, correction = 0.0;
  for (int x : chain_points(g.before(t))) {
    const PointIntegrand& p = d.points[static_cast<std::size_t>(x)];
    const double dx = g.weight(x);
    const Mat a = annihilation_matrix(g, dh, point(x));
    const Vec th = tcur * h.data;
    const Vec ah = a * h.data;
    const Vec u = p.pm * h.data + p.cm * ah;
    const Vec gv = p.pc * h.data + p.cc * ah;
    const Vec au = a * u;
    const Vec outside = gv - a * (a.transpose() * gv);
    literal += dx * (2.0 * weighted_dot(w, th, u).real() + weighted_dot(we, gv, gv).real() +
                     2.0 * weighted_dot(we, Vec(a * th), gv).real());
    correction += dx * dx * weighted_dot(w, u, u).real() + 2.0 * dx * dx * weighted_dot(we, au, gv).real() -
                  dx * weighted_dot(we, outside, outside).real();
    tcur += one_point_term(g, dh, x, p);
  }
  const Vec ht = tcur * h.data;
  const Vec h0 = t0 * h.data;
  WeakResidual r;
  r.lhs = weighted_dot(w, ht, ht).real() - weighted_dot(w, h0, h0).real();
  r.exact = std::abs(r.lhs - (literal + correction));
  r.literal = std::abs(r.lhs - literal);
  return r;
}

std::map<std::array<Chain, 3>, Mat> kernel_k3(const KernelTable& k) {
  if (k.in_extra() || k.out_extra()) throw InvalidArgument("kernel_k3: kernel with extra legs");
  std::map<std::array<Chain, 3>, Mat> out;
  for (const auto& [q, blk] : k.entries()) {
    const std::array<Chain, 3> key{q.pc, q.cc, q.cm};
    const Mat v = k.grid()->chain_weight(q.pm) * blk;
    auto it = out.find(key);
    if (it == out.end())
      out.emplace(key, v);
    else
      it->second += v;
  }
  return out;
}

double adaptedness_residual(const KernelTable& k, double t) {
  const Grid& g = *k.grid();
  const Chain future = g.full() & ~g.before(t);
  const auto k3 = kernel_k3(k);
  double worst = 0.0;
  std::set<std::array<Chain, 3>> keys;
  for (const auto& [key, blk] : k3) {
    if (!g.admissible(key[1] | key[2]) || !g.admissible(key[0] | key[1])) continue;
    if ((key[0] | key[2]) & future) {
      worst = std::max(worst, max_abs(blk));
      continue;
    }
    keys.insert(key);
    if (key[1] & future) continue;
    // Every admissible future extension of a present entry must exist.
    const Chain free = future & ~(key[0] | key[1] | key[2]);
    for_each_subset(free, [&](Chain f) {
      if (f && g.admissible(key[1] | key[2] | f) && g.admissible(key[0] | key[1] | f))
        keys.insert({key[0], key[1] | f, key[2]});
    });
  }
  for (const auto& key : keys) {
    const Chain f = key[1] & future;
    if (!f) continue;
    const std::array<Chain, 3> base{key[0], key[1] & ~f, key[2]};
    auto it = k3.find(key);
    auto ib = k3.find(base);
    const Index rows = k.dim_h() * g.legs(key[0] | key[1]);
    const Index cols = k.dim_h() * g.legs(key[1] | key[2]);
    const Mat have = it == k3.end() ? Mat::Zero(rows, cols) : it->second;
    const Mat want = ib == k3.end() ? Mat::Zero(rows, cols)
                                    : pad_identity(g, k.dim_h(), ib->second, base[1] | base[2],
                                                   base[0] | base[1], f);
    worst = std::max(worst, max_abs(Mat(have - want)));
  }
  return worst;
}

AdaptedReport ito_check_adapted(const KernelProcess& k, const GridPtr& grid, int dim_h, double t) {
  const Grid& g = *grid;
  AdaptedReport rep;
  rep.adaptedness = adaptedness_residual(k(first_cut(g)), first_cut(g));
  rep.adaptedness = std::max(rep.adaptedness, adaptedness_residual(k(t), t));
  for (int x : chain_points(g.before(t))) {
    const double s = g.time(x);
    rep.adaptedness = std::max(rep.adaptedness, adaptedness_residual(k(s), s));
    const GermMatrix germ = germ_of(k(s), x);
    const Mat lifted = kron(germ.e, Mat::Identity(g.d(), g.d()));
    rep.germ_structure =
        std::max({rep.germ_structure, max_abs(germ.cm), max_abs(germ.pc), max_abs(Mat(germ.cc - lifted))});
  }
  rep.ito = ito_check_strong(k, grid, dim_h, t, true);
  return rep;
}

PolyIncrement functional_ito_poly(const ItoAlgebra& alg, const Mat& x, const std::vector<Mat>& d, int m) {
  if (m < 1) throw InvalidArgument("functional_ito_poly: m must be at least 1");
  if (static_cast<int>(d.size()) != alg.dim()) throw InvalidArgument("functional_ito_poly: one D_j per basis element");
  if (x.rows() != x.cols()) throw InvalidArgument("functional_ito_poly: X must be square");
  for (const auto& dj : d)
    if (dj.rows() != x.rows() || dj.cols() != x.cols()) throw InvalidArgument("functional_ito_poly: D_j shape mismatch");
  const int n = alg.dim();
  auto star_sum = [&](const std::vector<Mat>& a, const std::vector<Mat>& b, int j) {
    Mat s = Mat::Zero(x.rows(), x.cols());
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const cplx c = alg.c(j)(i, k);
        if (c != cplx(0.0)) s += c * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(k)];
      }
    return s;
  };
  PolyIncrement r;
  // Left recursion: (X + D)(X^n + D^(n)).
  std::vector<Mat> cur = d;
  Mat xn = x;
  for (int step = 1; step < m; ++step) {
    std::vector<Mat> next(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      next[static_cast<std::size_t>(j)] =
          x * cur[static_cast<std::size_t>(j)] + d[static_cast<std::size_t>(j)] * xn + star_sum(d, cur, j);
    cur = std::move(next);
    xn = x * xn;
  }
  r.recursion = cur;
  // Right multiplication: (X^n + D^(n))(X + D).
  std::vector<Mat> dir = d;
  xn = x;
  for (int step = 1; step < m; ++step) {
    std::vector<Mat> next(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      next[static_cast<std::size_t>(j)] =
          xn * d[static_cast<std::size_t>(j)] + dir[static_cast<std::size_t>(j)] * x + star_sum(dir, d, j);
    dir = std::move(next);
    xn = xn * x;
  }
  r.direct = dir;
  for (int j = 0; j < n; ++j)
    r.residual = std::max(r.residual, max_abs(Mat(r.recursion[static_cast<std::size_t>(j)] -
                                                  r.direct[static_cast<std::size_t>(j)])));
  return r;
}

}  // namespace qsc
