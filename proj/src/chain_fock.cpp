#include "qsc/chain_fock.hpp"

#include <algorithm>
#include <cmath>

namespace qsc {

Index ipow(int base, int exp) {
  Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::vector<int> chain_points(Chain c) {
  std::vector<int> pts;
  for (int x = 0; c != 0; ++x, c >>= 1)
    if (c & 1u) pts.push_back(x);
  return pts;
}

void for_each_subset(Chain c, const std::function<void(Chain)>& f) {
  Chain s = c;
  while (true) {
    f(s);
    if (s == 0) break;
    s = (s - 1) & c;
  }
}

Index sub_legs(int d, Chain c, Index legs, Chain s) {
  if (d == 1) return 0;
  const std::vector<int> pts = chain_points(c);
  Index out = 0;
  const int k = static_cast<int>(pts.size());
  for (int i = 0; i < k; ++i) {
    const Index digit = (legs / ipow(d, k - 1 - i)) % d;
    if (contains(s, pts[static_cast<std::size_t>(i)])) out = out * d + digit;
  }
  return out;
}

Index merge_legs(int d, Chain a, Index la, Chain b, Index lb) {
  if (d == 1) return 0;
  const Chain u = a | b;
  const std::vector<int> pts = chain_points(u);
  const int ka = chain_size(a);
  const int kb = chain_size(b);
  int ia = 0, ib = 0;
  Index out = 0;
  for (int x : pts) {
    Index digit;
    if (contains(a, x)) {
      digit = (la / ipow(d, ka - 1 - ia)) % d;
      ++ia;
    } else {
      digit = (lb / ipow(d, kb - 1 - ib)) % d;
      ++ib;
    }
    out = out * d + digit;
  }
  return out;
}

Grid::Grid(std::vector<double> times, std::vector<double> weights, int d, int n_max)
    : times_(std::move(times)), weights_(std::move(weights)), d_(d), n_max_(n_max) {
  if (times_.empty()) throw InvalidArgument("Grid: at least one point required");
  if (times_.size() > 20) throw InvalidArgument("Grid: at most 20 points supported");
  if (weights_.size() != times_.size())
    throw InvalidArgument("Grid: times and weights must have equal length");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) throw InvalidArgument("Grid: times must be finite");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw InvalidArgument("Grid: times must be strictly increasing");
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw InvalidArgument("Grid: weights must be positive");
  }
  if (d_ < 1) throw InvalidArgument("Grid: d must be positive");
  if (n_max_ < 0) n_max_ = n();
  if (n_max_ > n()) n_max_ = n();

  std::vector<Chain> all;
  for (Chain c = 0; c <= full(); ++c) {
    if (chain_size(c) <= n_max_) all.push_back(c);
    if (c == full()) break;
  }
  std::stable_sort(all.begin(), all.end(), [](Chain a, Chain b) {
    const int sa = chain_size(a), sb = chain_size(b);
    return sa != sb ? sa < sb : a < b;
  });
  chains_ = std::move(all);
  for (Chain c : chains_) {
    offsets_[c] = units_;
    units_ += legs(c);
  }
}

Chain Grid::before(double t) const {
  Chain c = 0;
  for (int x = 0; x < n(); ++x)
    if (times_[static_cast<std::size_t>(x)] < t) c |= point(x);
  return c;
}

double Grid::chain_weight(Chain c) const {
  double w = 1.0;
  for (int x : chain_points(c)) w *= weight(x);
  return w;
}

double Grid::product(const RVec& p, Chain c) const {
  double w = 1.0;
  for (int x : chain_points(c)) w *= p(x);
  return w;
}

Index Grid::unit_offset(Chain c) const {
  auto it = offsets_.find(c);
  return it == offsets_.end() ? -1 : it->second;
}

Index Grid::fock_index(Chain c, int dim_h, Index h, Index lg) const {
  const Index off = unit_offset(c);
  if (off < 0) return -1;
  return off * dim_h + h * legs(c) + lg;
}

RVec Grid::weight_diagonal(int dim_h) const {
  RVec w(fock_dim(dim_h));
  for (Chain c : chains_) {
    const Index off = unit_offset(c) * dim_h;
    w.segment(off, legs(c) * dim_h).setConstant(chain_weight(c));
  }
  return w;
}

RVec Grid::weight_diagonal(int dim_h, const RVec& p) const {
  RVec w(fock_dim(dim_h));
  for (Chain c : chains_) {
    const Index off = unit_offset(c) * dim_h;
    w.segment(off, legs(c) * dim_h).setConstant(chain_weight(c) * product(p, c));
  }
  return w;
}

bool Grid::same_as(const Grid& o) const {
  return times_ == o.times_ && weights_ == o.weights_ && d_ == o.d_ && n_max_ == o.n_max_;
}

GridPtr make_grid(std::vector<double> times, std::vector<double> weights, int d, int n_max) {
  return std::make_shared<const Grid>(std::move(times), std::move(weights), d, n_max);
}

void require_weight(const Grid& grid, const WeightFunction& p, const char* what) {
  if (p.size() != grid.n())
    throw InvalidArgument(std::string(what) + ": weight function length must equal grid size");
  if ((p.array() <= 0.0).any())
    throw InvalidArgument(std::string(what) + ": weight function must be strictly positive");
}

FockVector FockVector::zero(const GridPtr& grid, int dim_h) {
  if (dim_h < 1) throw InvalidArgument("FockVector: dim_h must be positive");
  return {grid, dim_h, Vec::Zero(grid->fock_dim(dim_h))};
}

FockVector FockVector::vacuum(const GridPtr& grid, const Vec& h0) {
  FockVector v = zero(grid, static_cast<int>(h0.size()));
  v.data.head(h0.size()) = h0;
  return v;
}

Vec FockVector::block(Chain c) const {
  const Index off = grid->unit_offset(c);
  if (off < 0) throw InvalidArgument("FockVector: chain exceeds truncation");
  return data.segment(off * dim_h, block_size(c));
}

void FockVector::set_block(Chain c, const Vec& v) {
  const Index off = grid->unit_offset(c);
  if (off < 0) throw InvalidArgument("FockVector: chain exceeds truncation");
  if (v.size() != block_size(c)) throw InvalidArgument("FockVector: block size mismatch");
  data.segment(off * dim_h, block_size(c)) = v;
}

FockVector exp_vector(const GridPtr& grid, const std::vector<Vec>& k, const Vec& h0) {
  if (static_cast<int>(k.size()) != grid->n())
    throw InvalidArgument("exp_vector: one vector per grid point required");
  for (const auto& kx : k)
    if (kx.size() != grid->d()) throw InvalidArgument("exp_vector: vectors must have length d");
  FockVector v = FockVector::zero(grid, static_cast<int>(h0.size()));
  for (Chain c : grid->chains()) {
    Vec t = Vec::Ones(1);
    for (int x : chain_points(c)) {
      Vec next(t.size() * grid->d());
      for (Index i = 0; i < t.size(); ++i)
        next.segment(i * grid->d(), grid->d()) = t(i) * k[static_cast<std::size_t>(x)];
      t = std::move(next);
    }
    Vec blk(h0.size() * t.size());
    for (Index h = 0; h < h0.size(); ++h) blk.segment(h * t.size(), t.size()) = h0(h) * t;
    v.set_block(c, blk);
  }
  return v;
}

namespace {
void require_same_space(const FockVector& f, const FockVector& h) {
  if (!f.grid || !h.grid || !f.grid->same_as(*h.grid) || f.dim_h != h.dim_h)
    throw InvalidArgument("Fock vectors live on different grids");
}
}  // namespace

cplx inner(const FockVector& f, const FockVector& h) {
  require_same_space(f, h);
  const RVec w = f.grid->weight_diagonal(f.dim_h);
  return (f.data.conjugate().array() * w.array().cast<cplx>() * h.data.array()).sum();
}

double norm_weighted(const FockVector& f, const WeightFunction& p) {
  require_weight(*f.grid, p, "norm_weighted");
  const RVec w = f.grid->weight_diagonal(f.dim_h, p);
  return std::sqrt((w.array() * f.data.array().abs2()).sum());
}

Mat annihilation_matrix(const Grid& grid, int dim_h, Chain theta) {
  const Index m = grid.legs(theta);
  const Index dim = grid.fock_dim(dim_h);
  Mat a = Mat::Zero(dim * m, dim);
  for (Chain u : grid.chains()) {
    if (u & theta) continue;
    const Chain w = u | theta;
    if (!grid.admissible(w)) continue;
    const Index lu = grid.legs(u);
    for (Index h = 0; h < dim_h; ++h)
      for (Index a_legs = 0; a_legs < lu; ++a_legs)
        for (Index t_legs = 0; t_legs < m; ++t_legs) {
          const Index row = grid.fock_index(u, dim_h, h, a_legs) * m + t_legs;
          const Index col =
              grid.fock_index(w, dim_h, h, merge_legs(grid.d(), u, a_legs, theta, t_legs));
          a(row, col) = 1.0;
        }
  }
  return a;
}

Mat creation_matrix(const Grid& grid, int dim_h, Chain theta) {
  return annihilation_matrix(grid, dim_h, theta).transpose();
}

Vec annihilate(Chain theta, const FockVector& h) {
  return annihilation_matrix(*h.grid, h.dim_h, theta) * h.data;
}

FockVector create(const GridPtr& grid, int dim_h, const TwoChainMap& f) {
  FockVector out = FockVector::zero(grid, dim_h);
  for (const auto& [theta, v] : f) {
    const Mat at = creation_matrix(*grid, dim_h, theta);
    if (v.size() != at.cols()) throw InvalidArgument("create: extended vector has wrong size");
    out.data += at * v;
  }
  return out;
}

RVec extended_weights(const Grid& grid, int dim_h, int extra_legs) {
  const RVec w = grid.weight_diagonal(dim_h);
  const Index m = ipow(grid.d(), extra_legs);
  RVec out(w.size() * m);
  for (Index i = 0; i < w.size(); ++i) out.segment(i * m, m).setConstant(w(i));
  return out;
}

cplx two_chain_inner(const Grid& grid, int dim_h, const TwoChainMap& f, const TwoChainMap& g) {
  cplx s = 0.0;
  for (const auto& [theta, fv] : f) {
    auto it = g.find(theta);
    if (it == g.end()) continue;
    const RVec w = extended_weights(grid, dim_h, chain_size(theta));
    s += grid.chain_weight(theta) *
         (fv.conjugate().array() * w.array().cast<cplx>() * it->second.array()).sum();
  }
  return s;
}

SumIntegralResult sum_integral_check(const Grid& grid, const ScalarTwoChain& f) {
  // Deterministic order: chains in grid order, subsets in decreasing-mask order.
  cplx lhs = 0.0;
  for (Chain w : grid.chains()) {
    cplx inner_sum = 0.0;
    for_each_subset(w, [&](Chain theta) { inner_sum += f(theta, w & ~theta); });
    lhs += grid.chain_weight(w) * inner_sum;
  }
  cplx rhs = 0.0;
  for (Chain theta : grid.chains())
    for (Chain u : grid.chains()) {
      if ((theta & u) != 0 || !grid.admissible(theta | u)) continue;
      rhs += grid.chain_weight(theta) * grid.chain_weight(u) * f(theta, u);
    }
  return {lhs, rhs, std::abs(lhs - rhs)};
}

double q_norm(const Grid& grid, int dim_h, const Mat& t, const WeightFunction& q, int extra_out,
              int extra_in) {
  require_weight(grid, q, "q_norm");
  const RVec wq = grid.weight_diagonal(dim_h, q);
  const RVec w = grid.weight_diagonal(dim_h);
  auto expand = [&](const RVec& v, int extra) {
    const Index m = ipow(grid.d(), extra);
    RVec out(v.size() * m);
    for (Index i = 0; i < v.size(); ++i) out.segment(i * m, m).setConstant(v(i));
    return out;
  };
  // Output norm uses weight w / q, input norm uses w q.
  const RVec w_out = expand((w.array().square() / wq.array()).matrix(), extra_out);
  const RVec w_in = expand(wq, extra_in);
  if (t.rows() != w_out.size() || t.cols() != w_in.size())
    throw InvalidArgument("q_norm: operator shape does not match the weighted spaces");
  const Mat scaled = w_out.cwiseSqrt().asDiagonal() * t * w_in.cwiseSqrt().cwiseInverse().asDiagonal();
  return spectral_norm(scaled);
}

Mat weighted_adjoint(const Grid& grid, int dim_h, const Mat& t, int extra_out, int extra_in) {
  const RVec w_out = extended_weights(grid, dim_h, extra_out);
  const RVec w_in = extended_weights(grid, dim_h, extra_in);
  if (t.rows() != w_out.size() || t.cols() != w_in.size())
    throw InvalidArgument("weighted_adjoint: operator shape does not match the weighted spaces");
  return w_in.cwiseInverse().asDiagonal() * t.adjoint() * w_out.asDiagonal();
}

}  // namespace qsc
