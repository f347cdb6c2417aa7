#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "qsc/core.hpp"

namespace qsc {

// A chain is a subset of grid points encoded as a bitmask (bit x <-> point x).
using Chain = std::uint32_t;

inline int chain_size(Chain c) { return std::popcount(c); }
inline bool contains(Chain c, int x) { return ((c >> x) & 1u) != 0; }
inline Chain point(int x) { return Chain{1} << x; }
Index ipow(int base, int exp);
std::vector<int> chain_points(Chain c);

// Calls f(s) for every subset s of c (including the empty set and c itself).
void for_each_subset(Chain c, const std::function<void(Chain)>& f);

// Leg multi-indices: a tensor on chain c has d^|c| components stored row-major
// with the earliest grid point as the most significant digit.
//
// Extracts the legs on the sub-chain s from a multi-index over c.
Index sub_legs(int d, Chain c, Index legs, Chain s);
// Merges legs over disjoint chains a and b into a multi-index over a | b.
Index merge_legs(int d, Chain a, Index la, Chain b, Index lb);

// Strictly increasing grid with quadrature masses; chains are truncated at n_max.
class Grid {
 public:
  Grid(std::vector<double> times, std::vector<double> weights, int d = 1, int n_max = -1);

  int n() const { return static_cast<int>(times_.size()); }
  int d() const { return d_; }
  int n_max() const { return n_max_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(int x) const { return weights_.at(static_cast<std::size_t>(x)); }
  double time(int x) const { return times_.at(static_cast<std::size_t>(x)); }

  Chain full() const { return n() == 32 ? ~Chain{0} : (Chain{1} << n()) - 1; }
  // Points with t(x) < t.
  Chain before(double t) const;
  bool admissible(Chain c) const { return (c & ~full()) == 0 && chain_size(c) <= n_max_; }

  double chain_weight(Chain c) const;
  // Product extension p(c) = prod_{x in c} p(x) of a per-point weight function.
  double product(const RVec& p, Chain c) const;

  // Admissible chains ordered by (size, mask).
  const std::vector<Chain>& chains() const { return chains_; }
  Index legs(Chain c) const { return ipow(d_, chain_size(c)); }
  // Start of the chain's block in units of dim_h; -1 for inadmissible chains.
  Index unit_offset(Chain c) const;
  Index units() const { return units_; }
  Index fock_dim(int dim_h) const { return units_ * dim_h; }
  Index fock_index(Chain c, int dim_h, Index h, Index legs) const;

  // Per-index chain weights w(c) on the Fock space (and times p(c) if given).
  RVec weight_diagonal(int dim_h) const;
  RVec weight_diagonal(int dim_h, const RVec& p) const;

  bool same_as(const Grid& other) const;

 private:
  std::vector<double> times_;
  std::vector<double> weights_;
  int d_;
  int n_max_;
  std::vector<Chain> chains_;
  std::map<Chain, Index> offsets_;
  Index units_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;
GridPtr make_grid(std::vector<double> times, std::vector<double> weights, int d = 1, int n_max = -1);

// Strictly positive per-point weight function p(x).
using WeightFunction = RVec;
void require_weight(const Grid& grid, const WeightFunction& p, const char* what);

// Dense coefficient vector over all admissible chains; the block of chain c
// has dim_h * d^|c| entries with the initial-space index outermost.
struct FockVector {
  GridPtr grid;
  int dim_h = 1;
  Vec data;

  static FockVector zero(const GridPtr& grid, int dim_h = 1);
  static FockVector vacuum(const GridPtr& grid, const Vec& h0);
  Index block_size(Chain c) const { return grid->legs(c) * dim_h; }
  Vec block(Chain c) const;
  void set_block(Chain c, const Vec& v);
};

// exp{k}: entry at c is h0 (x) (tensor over x in c of k(x)).
FockVector exp_vector(const GridPtr& grid, const std::vector<Vec>& k, const Vec& h0 = Vec::Ones(1));

cplx inner(const FockVector& f, const FockVector& h);
double norm_weighted(const FockVector& f, const WeightFunction& p);

// Extended space F (x) K^(theta): index fock_index(u) * d^|theta| + legs(theta).
//
// Annihilation A(theta): (A h)(u, legs) = h(u | theta) for u disjoint from theta.
// Returned as a dense 0/1 matrix of shape (D d^|theta|) x D.
Mat annihilation_matrix(const Grid& grid, int dim_h, Chain theta);
// Creation A*(theta) is the transpose of the annihilation matrix.
Mat creation_matrix(const Grid& grid, int dim_h, Chain theta);

Vec annihilate(Chain theta, const FockVector& h);

// Two-chain map f(theta, u): for each theta a vector on the extended space F (x) K^(theta).
using TwoChainMap = std::map<Chain, Vec>;
// [a* f](w) = sum_{theta subset w} f(theta, w \ theta).
FockVector create(const GridPtr& grid, int dim_h, const TwoChainMap& f);

// Weighted pairing sum_theta w(theta) <f(theta)|g(theta)> on extended spaces.
cplx two_chain_inner(const Grid& grid, int dim_h, const TwoChainMap& f, const TwoChainMap& g);

// Scalar two-chain function for the sum-integral identity.
using ScalarTwoChain = std::function<cplx(Chain, Chain)>;
struct SumIntegralResult {
  cplx lhs;
  cplx rhs;
  double residual;
};
SumIntegralResult sum_integral_check(const Grid& grid, const ScalarTwoChain& f);

// Weighted operator norm sup ||T h||(1/q) / ||h||(q) for T acting on F (x) legs.
double q_norm(const Grid& grid, int dim_h, const Mat& t, const WeightFunction& q, int extra_out = 0,
              int extra_in = 0);
// Weighted adjoint of T : F (x) K^in -> F (x) K^out (legs unweighted).
Mat weighted_adjoint(const Grid& grid, int dim_h, const Mat& t, int extra_out = 0, int extra_in = 0);
RVec extended_weights(const Grid& grid, int dim_h, int extra_legs);

}  // namespace qsc
