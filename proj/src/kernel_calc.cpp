#include "qsc/kernel_calc.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace qsc {

KernelTable::KernelTable(GridPtr grid, int dim_h, Chain in_extra, Chain out_extra)
    : grid_(std::move(grid)), dim_h_(dim_h), in_extra_(in_extra), out_extra_(out_extra) {
  if (!grid_) throw InvalidArgument("KernelTable: grid required");
  if (dim_h_ < 1) throw InvalidArgument("KernelTable: dim_h must be positive");
  if ((in_extra_ | out_extra_) & ~grid_->full())
    throw InvalidArgument("KernelTable: extra chains outside the grid");
}

void KernelTable::add(const Quad& q, const Mat& block) {
  if (!q.disjoint()) throw InvalidArgument("KernelTable: chains of a quadruple must be disjoint");
  if (q.all() & ~grid_->full()) throw InvalidArgument("KernelTable: chain outside the grid");
  if (q.all() & (in_extra_ | out_extra_))
    throw InvalidArgument("KernelTable: entry overlaps the extra chains");
  if (block.rows() != block_rows(q) || block.cols() != block_cols(q))
    throw InvalidArgument("KernelTable: block has shape " + std::to_string(block.rows()) + "x" +
                          std::to_string(block.cols()) + ", expected " + std::to_string(block_rows(q)) +
                          "x" + std::to_string(block_cols(q)));
  auto it = entries_.find(q);
  if (it == entries_.end())
    entries_.emplace(q, block);
  else
    it->second += block;
}

const Mat* KernelTable::find(const Quad& q) const {
  auto it = entries_.find(q);
  return it == entries_.end() ? nullptr : &it->second;
}

void KernelTable::prune() {
  for (auto it = entries_.begin(); it != entries_.end();) {
    if ((it->second.array() == cplx(0.0)).all())
      it = entries_.erase(it);
    else
      ++it;
  }
}

bool same_space(const KernelTable& a, const KernelTable& b) {
  return a.grid()->same_as(*b.grid()) && a.dim_h() == b.dim_h() && a.in_extra() == b.in_extra() &&
         a.out_extra() == b.out_extra();
}

double kernel_distance(const KernelTable& a, const KernelTable& b) {
  if (!same_space(a, b)) throw InvalidArgument("kernel_distance: kernels live on different spaces");
  double d = 0.0;
  for (const auto& [q, blk] : a.entries()) {
    const Mat* other = b.find(q);
    d = std::max(d, other ? max_abs(Mat(blk - *other)) : max_abs(blk));
  }
  for (const auto& [q, blk] : b.entries())
    if (!a.find(q)) d = std::max(d, max_abs(blk));
  return d;
}

KernelTable identity_kernel(const GridPtr& grid, int dim_h) {
  KernelTable k(grid, dim_h);
  for (Chain n : grid->chains()) {
    Quad q;
    q.cc = n;
    k.add(q, Mat::Identity(k.block_rows(q), k.block_cols(q)));
  }
  return k;
}

namespace {

// Row (or column) positions of a block in the dense extended matrix; -1 when
// the chain is beyond the truncation.
std::vector<Index> placement(const Grid& grid, int dim_h, Chain chain, Chain extra) {
  const Chain combined = chain | extra;
  const Index lc = grid.legs(combined);
  const Index le = grid.legs(extra);
  std::vector<Index> pos(static_cast<std::size_t>(dim_h * lc), -1);
  if (!grid.admissible(chain)) return pos;
  const int d = grid.d();
  for (Index h = 0; h < dim_h; ++h)
    for (Index l = 0; l < lc; ++l) {
      const Index fi = grid.fock_index(chain, dim_h, h, sub_legs(d, combined, l, chain));
      pos[static_cast<std::size_t>(h * lc + l)] = fi * le + sub_legs(d, combined, l, extra);
    }
  return pos;
}

void scatter(Mat& out, const Grid& grid, int dim_h, const KernelTable& k, const Quad& q, const Mat& blk) {
  const Chain o = q.out(), i = q.in();
  if (!grid.admissible(o) || !grid.admissible(i)) return;
  const double w = grid.chain_weight(q.cm) * grid.chain_weight(q.pm);
  const auto rows = placement(grid, dim_h, o, k.out_extra());
  const auto cols = placement(grid, dim_h, i, k.in_extra());
  for (Index c = 0; c < blk.cols(); ++c)
    for (Index r = 0; r < blk.rows(); ++r)
      out(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]) += w * blk(r, c);
}

Mat epsilon_shape(const KernelTable& k) {
  const Grid& g = *k.grid();
  const Index dim = g.fock_dim(k.dim_h());
  return Mat::Zero(dim * g.legs(k.out_extra()), dim * g.legs(k.in_extra()));
}

}  // namespace

Mat epsilon_serial(const KernelTable& k) {
  Mat out = epsilon_shape(k);
  for (const auto& [q, blk] : k.entries()) scatter(out, *k.grid(), k.dim_h(), k, q, blk);
  return out;
}

Mat epsilon(const KernelTable& k) {
  Mat out = epsilon_shape(k);
  // Entries with different output chains write disjoint rows.
  std::map<Chain, std::vector<std::map<Quad, Mat>::const_iterator>> buckets;
  for (auto it = k.entries().begin(); it != k.entries().end(); ++it) buckets[it->first.out()].push_back(it);
  std::vector<const std::vector<std::map<Quad, Mat>::const_iterator>*> work;
  work.reserve(buckets.size());
  for (const auto& [chain, items] : buckets) work.push_back(&items);
  const long nwork = static_cast<long>(work.size());
#pragma omp parallel for schedule(dynamic)
  for (long b = 0; b < nwork; ++b)
    for (const auto& it : *work[static_cast<std::size_t>(b)])
      scatter(out, *k.grid(), k.dim_h(), k, it->first, it->second);
  return out;
}

FockVector epsilon_apply(const KernelTable& k, const FockVector& h) {
  if (k.in_extra() != 0 || k.out_extra() != 0)
    throw InvalidArgument("epsilon_apply: kernel with extra legs does not act on F");
  if (!k.grid()->same_as(*h.grid) || k.dim_h() != h.dim_h)
    throw InvalidArgument("epsilon_apply: grid or dim_h mismatch");
  FockVector out = FockVector::zero(h.grid, h.dim_h);
  out.data = epsilon(k) * h.data;
  return out;
}

KernelTable kernel_star(const KernelTable& k) {
  KernelTable s(k.grid(), k.dim_h(), k.out_extra(), k.in_extra());
  for (const auto& [q, blk] : k.entries()) {
    Quad r = q;
    std::swap(r.cm, r.pc);
    s.add(r, blk.adjoint());
  }
  return s;
}

namespace {

struct ProductTerm {
  Quad q;
  Mat block;
};

// Pointwise composition of an entry of K (left) with an entry of L (right)
// sharing the intermediate chain K.in() == L.out().
ProductTerm compose(const Grid& grid, const Quad& kq, const Mat& kb, const Quad& lq, const Mat& lb) {
  const Chain k_all = kq.all(), l_all = lq.all();
  ProductTerm t;
  t.q.pm = (kq.cm & lq.pc) | (kq.pm & ~l_all) | (lq.pm & ~k_all) | (kq.pm & lq.pm);
  t.q.pc = (kq.pc & ~l_all) | (kq.cc & lq.pc) | (kq.pc & lq.pm);
  t.q.cm = (lq.cm & ~k_all) | (kq.cm & lq.cc) | (kq.pm & lq.cm);
  t.q.cc = (kq.cc & lq.cc) | (kq.pc & lq.cm);
  const double w = grid.chain_weight((kq.pm | kq.pc) & (lq.pm | lq.cm));
  t.block = w * (kb * lb);
  return t;
}

void require_plain(const KernelTable& k, const KernelTable& l) {
  if (!same_space(k, l)) throw InvalidArgument("kernel_mul: kernels live on different spaces");
  if (k.in_extra() || k.out_extra()) throw InvalidArgument("kernel_mul: extra legs not supported");
}

std::map<Chain, std::vector<std::map<Quad, Mat>::const_iterator>> by_output(const KernelTable& l) {
  std::map<Chain, std::vector<std::map<Quad, Mat>::const_iterator>> idx;
  for (auto it = l.entries().begin(); it != l.entries().end(); ++it) idx[it->first.out()].push_back(it);
  return idx;
}

}  // namespace

KernelTable kernel_mul_serial(const KernelTable& k, const KernelTable& l) {
  require_plain(k, l);
  const Grid& grid = *k.grid();
  const auto idx = by_output(l);
  KernelTable out(k.grid(), k.dim_h());
  for (const auto& [kq, kb] : k.entries()) {
    const Chain mid = kq.in();
    if (!grid.admissible(mid)) continue;
    auto it = idx.find(mid);
    if (it == idx.end()) continue;
    for (const auto& lit : it->second) {
      ProductTerm t = compose(grid, kq, kb, lit->first, lit->second);
      out.add(t.q, t.block);
    }
  }
  return out;
}

KernelTable kernel_mul(const KernelTable& k, const KernelTable& l) {
  require_plain(k, l);
  const Grid& grid = *k.grid();
  const auto idx = by_output(l);
  std::vector<std::map<Quad, Mat>::const_iterator> left;
  for (auto it = k.entries().begin(); it != k.entries().end(); ++it) left.push_back(it);
  std::vector<std::vector<ProductTerm>> partial(left.size());
  const long nleft = static_cast<long>(left.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < nleft; ++i) {
    const auto& [kq, kb] = *left[static_cast<std::size_t>(i)];
    const Chain mid = kq.in();
    if (!grid.admissible(mid)) continue;
    auto it = idx.find(mid);
    if (it == idx.end()) continue;
    auto& terms = partial[static_cast<std::size_t>(i)];
    for (const auto& lit : it->second) terms.push_back(compose(grid, kq, kb, lit->first, lit->second));
  }
  // Merge in the serial order so that both versions round identically.
  KernelTable out(k.grid(), k.dim_h());
  for (const auto& terms : partial)
    for (const auto& t : terms) out.add(t.q, t.block);
  return out;
}

KernelTable kernel_add(const KernelTable& a, const KernelTable& b, cplx scale_b) {
  if (!same_space(a, b)) throw InvalidArgument("kernel_add: kernels live on different spaces");
  KernelTable out = a;
  for (const auto& [q, blk] : b.entries()) out.add(q, scale_b * blk);
  return out;
}

Mat pad_identity(const Grid& grid, int dim_h, const Mat& block, Chain in_chain, Chain out_chain,
                 Chain extra) {
  if ((in_chain | out_chain) & extra) throw InvalidArgument("pad_identity: extra chain overlaps block legs");
  const int d = grid.d();
  const Index li = grid.legs(in_chain), lo = grid.legs(out_chain), le = grid.legs(extra);
  if (block.rows() != dim_h * lo || block.cols() != dim_h * li)
    throw InvalidArgument("pad_identity: block shape mismatch");
  if (extra == 0) return block;
  Mat out = Mat::Zero(dim_h * lo * le, dim_h * li * le);
  for (Index ho = 0; ho < dim_h; ++ho)
    for (Index a = 0; a < lo; ++a)
      for (Index hi = 0; hi < dim_h; ++hi)
        for (Index b = 0; b < li; ++b) {
          const cplx v = block(ho * lo + a, hi * li + b);
          if (v == cplx(0.0)) continue;
          for (Index e = 0; e < le; ++e) {
            const Index r = ho * lo * le + merge_legs(d, out_chain, a, extra, e);
            const Index c = hi * li * le + merge_legs(d, in_chain, b, extra, e);
            out(r, c) = v;
          }
        }
  return out;
}

namespace {

void require_mobius_input(const KernelTable& k) {
  if (k.in_extra() || k.out_extra()) throw InvalidArgument("mobius: extra legs not supported");
}

}  // namespace

KernelTable mobius_to_kernel(const KernelTable& m) {
  require_mobius_input(m);
  const Grid& grid = *m.grid();
  KernelTable k(m.grid(), m.dim_h());
  for (const auto& [q, blk] : m.entries()) {
    const Chain free = grid.full() & ~(q.pm | q.cm | q.pc | q.cc);
    for_each_subset(free, [&](Chain extra) {
      Quad r = q;
      r.cc = q.cc | extra;
      if (!grid.admissible(r.in()) || !grid.admissible(r.out())) return;
      k.add(r, pad_identity(grid, m.dim_h(), blk, q.in(), q.out(), extra));
    });
  }
  k.prune();
  return k;
}

KernelTable mobius_to_mm(const KernelTable& k) {
  require_mobius_input(k);
  const Grid& grid = *k.grid();
  KernelTable m(k.grid(), k.dim_h());
  for (const auto& [q, blk] : k.entries()) {
    const Chain free = grid.full() & ~(q.pm | q.cm | q.pc | q.cc);
    for_each_subset(free, [&](Chain extra) {
      Quad r = q;
      r.cc = q.cc | extra;
      if (!grid.admissible(r.in()) || !grid.admissible(r.out())) return;
      const double sign = (chain_size(extra) % 2 == 0) ? 1.0 : -1.0;
      m.add(r, sign * pad_identity(grid, k.dim_h(), blk, q.in(), q.out(), extra));
    });
  }
  m.prune();
  return m;
}

namespace {

void require_point_data(const Grid& grid, const std::vector<TriangularOp>& g) {
  if (static_cast<int>(g.size()) != grid.n())
    throw InvalidArgument("triangular data must be given for every grid point");
  for (const auto& t : g)
    if (t.dim_k() != grid.d()) throw InvalidArgument("triangular data must have dim_K = d");
}

}  // namespace

KernelTable exponential_kernel(const GridPtr& grid, const std::vector<TriangularOp>& g) {
  require_point_data(*grid, g);
  if (grid->n() > 8) throw InvalidArgument("exponential_kernel: at most 8 grid points");
  KernelTable k(grid, 1);
  const int n = grid->n();
  const Index combos = ipow(5, n);
  for (Index code = 0; code < combos; ++code) {
    Quad q;
    Index rest = code;
    for (int x = 0; x < n; ++x) {
      const int role = static_cast<int>(rest % 5);
      rest /= 5;
      if (role == 1) q.pm |= point(x);
      if (role == 2) q.cm |= point(x);
      if (role == 3) q.pc |= point(x);
      if (role == 4) q.cc |= point(x);
    }
    if (!grid->admissible(q.in()) || !grid->admissible(q.out())) continue;
    Mat blk = Mat::Ones(1, 1);
    for (int x = 0; x < n; ++x) {
      const TriangularOp& t = g[static_cast<std::size_t>(x)];
      if (contains(q.pm, x)) blk *= t.l;
      if (contains(q.cm, x)) blk = kron(blk, t.k_row);
      if (contains(q.pc, x)) blk = kron(blk, t.k_col);
      if (contains(q.cc, x)) blk = kron(blk, t.j);
    }
    k.add(q, blk);
  }
  return k;
}

PseudoFock pseudo_fock_space(const GridPtr& grid, Index max_dim) {
  const int radix = 3 + grid->d();
  const Index dim = ipow(radix, grid->n());
  if (dim > max_dim) throw InvalidArgument("pseudo-Fock space exceeds the size guard");
  return {grid, radix, dim};
}

namespace {

std::vector<int> digits_of(Index config, int radix, int n) {
  std::vector<int> dg(static_cast<std::size_t>(n));
  for (int x = n - 1; x >= 0; --x) {
    dg[static_cast<std::size_t>(x)] = static_cast<int>(config % radix);
    config /= radix;
  }
  return dg;
}

Index config_of(const std::vector<int>& dg, int radix) {
  Index c = 0;
  for (int v : dg) c = c * radix + v;
  return c;
}

// Local digits: 0 absent, 1 minus, 2..2+d-1 preserved legs, 2+d plus.
std::vector<int> digits_for(const Grid& grid, Chain minus, Chain o, Index legs, Chain plus) {
  const int n = grid.n(), d = grid.d();
  std::vector<int> dg(static_cast<std::size_t>(n), 0);
  const std::vector<int> pts = chain_points(o);
  const int k = static_cast<int>(pts.size());
  for (int i = 0; i < k; ++i)
    dg[static_cast<std::size_t>(pts[static_cast<std::size_t>(i)])] =
        2 + static_cast<int>((legs / ipow(d, k - 1 - i)) % d);
  for (int x = 0; x < n; ++x) {
    if (contains(minus, x)) dg[static_cast<std::size_t>(x)] = 1;
    if (contains(plus, x)) dg[static_cast<std::size_t>(x)] = 2 + d;
  }
  return dg;
}

}  // namespace

Mat pseudo_fock_dilate(const PseudoFock& space, const std::vector<TriangularOp>& g) {
  const Grid& grid = *space.grid;
  require_point_data(grid, g);
  const int d = grid.d();
  Mat out = Mat::Ones(1, 1);
  for (int x = 0; x < grid.n(); ++x) {
    const TriangularOp& t = g[static_cast<std::size_t>(x)];
    Mat loc = Mat::Zero(space.radix, space.radix);
    loc(0, 0) = 1.0;
    loc(1, 1) = 1.0;
    loc(2 + d, 2 + d) = 1.0;
    loc(1, 2 + d) = t.l;
    loc.block(1, 2, 1, d) = t.k_row;
    loc.block(2, 2, d, d) = t.j;
    loc.block(2, 2 + d, d, 1) = t.k_col;
    out = kron(out, loc);
  }
  return out;
}

Mat j_embed(const PseudoFock& space) {
  const Grid& grid = *space.grid;
  Mat j = Mat::Zero(space.dim, grid.fock_dim(1));
  for (Chain o : grid.chains())
    for (Index lg = 0; lg < grid.legs(o); ++lg)
      for_each_subset(grid.full() & ~o, [&](Chain plus) {
        j(config_of(digits_for(grid, 0, o, lg, plus), space.radix), grid.fock_index(o, 1, 0, lg)) = 1.0;
      });
  return j;
}

Mat j_project(const PseudoFock& space) {
  const Grid& grid = *space.grid;
  Mat j = Mat::Zero(grid.fock_dim(1), space.dim);
  for (Chain o : grid.chains())
    for (Index lg = 0; lg < grid.legs(o); ++lg)
      for_each_subset(grid.full() & ~o, [&](Chain minus) {
        j(grid.fock_index(o, 1, 0, lg), config_of(digits_for(grid, minus, o, lg, 0), space.radix)) =
            grid.chain_weight(minus);
      });
  return j;
}

Mat pseudo_metric(const PseudoFock& space) {
  const Grid& grid = *space.grid;
  const int d = grid.d();
  Mat eta = Mat::Zero(space.dim, space.dim);
  for (Index c = 0; c < space.dim; ++c) {
    std::vector<int> dg = digits_of(c, space.radix, grid.n());
    double w = 1.0;
    for (int x = 0; x < grid.n(); ++x) {
      int& v = dg[static_cast<std::size_t>(x)];
      if (v != 0) w *= grid.weight(x);
      if (v == 1)
        v = 2 + d;
      else if (v == 2 + d)
        v = 1;
    }
    eta(config_of(dg, space.radix), c) = w;
  }
  return eta;
}

std::array<TriangularOp, 4> normal_order_factor(const TriangularOp& g) {
  const int n = g.dim_k();
  TriangularOp corner = TriangularOp::identity(n);
  corner.l = g.l;
  TriangularOp column = TriangularOp::identity(n);
  column.k_col = g.k_col;
  TriangularOp diagonal = TriangularOp::identity(n);
  diagonal.j = g.j;
  TriangularOp row = TriangularOp::identity(n);
  row.k_row = g.k_row;
  return {corner, column, diagonal, row};
}

ExpSuperposition pi_rep(const Grid& grid, const std::vector<TriangularOp>& g, const ExpSuperposition& v) {
  require_point_data(grid, g);
  if (v.coeffs.size() != v.labels.size()) throw InvalidArgument("pi_rep: coefficient/label count mismatch");
  ExpSuperposition out;
  for (std::size_t i = 0; i < v.coeffs.size(); ++i) {
    const auto& k = v.labels[i];
    if (static_cast<int>(k.size()) != grid.n()) throw InvalidArgument("pi_rep: label must cover the grid");
    cplx exponent = 0.0;
    std::vector<Vec> next(k.size());
    for (int x = 0; x < grid.n(); ++x) {
      const TriangularOp& t = g[static_cast<std::size_t>(x)];
      const Vec& kx = k[static_cast<std::size_t>(x)];
      exponent += grid.weight(x) * (t.l + (t.k_row * kx)(0, 0));
      next[static_cast<std::size_t>(x)] = t.k_col + t.j * kx;
    }
    out.coeffs.push_back(v.coeffs[i] * std::exp(exponent));
    out.labels.push_back(std::move(next));
  }
  return out;
}

ExpSuperposition pi_rep(const Grid& grid, const TriangularRep& rep, const std::vector<AlgebraElement>& g,
                        const ExpSuperposition& v) {
  if (static_cast<int>(g.size()) != grid.n()) throw InvalidArgument("pi_rep: one monoid element per point");
  std::vector<TriangularOp> ops;
  ops.reserve(g.size());
  for (const auto& b : g) ops.push_back(rep.get(b));
  return pi_rep(grid, ops, v);
}

FockVector to_fock(const GridPtr& grid, const ExpSuperposition& v) {
  FockVector out = FockVector::zero(grid, 1);
  for (std::size_t i = 0; i < v.coeffs.size(); ++i) out.data += v.coeffs[i] * exp_vector(grid, v.labels[i]).data;
  return out;
}

cplx vacuum_expectation(const Grid& grid, const std::vector<TriangularOp>& g) {
  require_point_data(grid, g);
  cplx s = 0.0;
  for (int x = 0; x < grid.n(); ++x) s += grid.weight(x) * g[static_cast<std::size_t>(x)].l;
  return std::exp(s);
}

NormQuadruple reflect(const NormQuadruple& a) { return {a.pm, a.pc, a.cm, a.cc}; }

double norm_alpha(const KernelTable& k, const NormQuadruple& alpha) {
  const Grid& grid = *k.grid();
  double best = 0.0;
  for (const auto& [q, blk] : k.entries()) {
    const double nb = spectral_norm(blk);
    if (nb == 0.0) continue;
    const double den = grid.product(alpha.pm, q.pm) * grid.product(alpha.cm, q.cm) *
                       grid.product(alpha.pc, q.pc) * grid.product(alpha.cc, q.cc);
    if (den <= 0.0) return INFINITY;
    best = std::max(best, nb / den);
  }
  return best;
}

double projective_norm(const KernelTable& k, const WeightFunction& p, const WeightFunction& r) {
  const Grid& grid = *k.grid();
  require_weight(grid, p, "projective_norm");
  require_weight(grid, r, "projective_norm");
  // max over N for each (P, C, A)
  std::map<std::array<Chain, 3>, double> sup_n;
  for (const auto& [q, blk] : k.entries()) {
    const double v = spectral_norm(blk) / grid.product(p, q.cc);
    auto& slot = sup_n[{q.pm, q.pc, q.cm}];
    slot = std::max(slot, v);
  }
  std::map<Chain, double> inner;
  for (const auto& [key, v] : sup_n) {
    const Chain ca = key[1] | key[2];
    inner[key[0]] += grid.chain_weight(ca) * v * v * grid.product(r, ca);
  }
  double total = 0.0;
  for (const auto& [pm, s] : inner) total += grid.chain_weight(pm) * std::sqrt(s);
  return total;
}

AlphaBound bound_pr(const Grid& grid, const NormQuadruple& alpha, const WeightFunction& r,
                    const WeightFunction& p) {
  require_weight(grid, r, "bound_pr");
  require_weight(grid, p, "bound_pr");
  double sum_pm = 0.0, sum_pc = 0.0, sum_cm = 0.0, ratio = 0.0;
  for (Chain c : grid.chains()) {
    const double w = grid.chain_weight(c);
    sum_pm += w * grid.product(alpha.pm, c);
    const double rc = grid.product(r, c);
    sum_pc += w * std::pow(grid.product(alpha.pc, c), 2) * rc;
    sum_cm += w * std::pow(grid.product(alpha.cm, c), 2) * rc;
    ratio = std::max(ratio, grid.product(alpha.cc, c) / grid.product(p, c));
  }
  double expo = 0.0;
  for (int x = 0; x < grid.n(); ++x)
    expo += grid.weight(x) * (alpha.pm(x) + r(x) * (alpha.pc(x) * alpha.pc(x) + alpha.cm(x) * alpha.cm(x)) / 2.0);
  AlphaBound b;
  b.product_bound = sum_pm * std::sqrt(sum_pc * sum_cm) * ratio;
  b.exponential_bound = std::exp(expo);
  b.cc_ratio = ratio;
  return b;
}

}  // namespace qsc
