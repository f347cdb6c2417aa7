#pragma once

#include <array>
#include <compare>
#include <map>
#include <vector>

#include "qsc/chain_fock.hpp"
#include "qsc/gns_rep.hpp"

namespace qsc {

// Quadruple of pairwise-disjoint chains (w_+^-, w_o^-, w_+^o, w_o^o):
// pm integrated, cm annihilated, pc created, cc preserved.
struct Quad {
  Chain pm = 0;
  Chain cm = 0;
  Chain pc = 0;
  Chain cc = 0;

  Chain all() const { return pm | cm | pc | cc; }
  Chain in() const { return cm | cc; }
  Chain out() const { return cc | pc; }
  bool disjoint() const {
    return chain_size(pm) + chain_size(cm) + chain_size(pc) + chain_size(cc) == chain_size(all());
  }
  auto operator<=>(const Quad&) const = default;
};

// Sparse kernel table. Each block maps H (x) K^(in_extra | cm | cc) to
// H (x) K^(out_extra | cc | pc) with legs sorted by grid order over the union.
// The extra chains are carried by every entry and must be disjoint from it;
// they are used for kernels whose value is itself indexed by an outer table.
class KernelTable {
 public:
  KernelTable(GridPtr grid, int dim_h, Chain in_extra = 0, Chain out_extra = 0);

  const GridPtr& grid() const { return grid_; }
  int dim_h() const { return dim_h_; }
  Chain in_extra() const { return in_extra_; }
  Chain out_extra() const { return out_extra_; }
  const std::map<Quad, Mat>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  Index block_rows(const Quad& q) const { return dim_h_ * grid_->legs(out_extra_ | q.out()); }
  Index block_cols(const Quad& q) const { return dim_h_ * grid_->legs(in_extra_ | q.in()); }

  // Adds block to the entry at q (creating it if absent).
  void add(const Quad& q, const Mat& block);
  const Mat* find(const Quad& q) const;
  // Removes entries whose blocks are exactly zero.
  void prune();

 private:
  GridPtr grid_;
  int dim_h_;
  Chain in_extra_;
  Chain out_extra_;
  std::map<Quad, Mat> entries_;
};

bool same_space(const KernelTable& a, const KernelTable& b);
double kernel_distance(const KernelTable& a, const KernelTable& b);

// Identity kernel: (0, 0, 0, N) -> I for every admissible N.
KernelTable identity_kernel(const GridPtr& grid, int dim_h);

// Dense matrix of eps(K) on F (x) K^(in_extra) -> F (x) K^(out_extra); the
// extra legs are the innermost index. OpenMP-parallel over output chains.
Mat epsilon(const KernelTable& k);
// Single-threaded reference with the same summation order.
Mat epsilon_serial(const KernelTable& k);
FockVector epsilon_apply(const KernelTable& k, const FockVector& h);

KernelTable kernel_star(const KernelTable& k);

// Exact discrete product with eps(K L) = eps(K) eps(L) on the truncated space.
KernelTable kernel_mul(const KernelTable& k, const KernelTable& l);
KernelTable kernel_mul_serial(const KernelTable& k, const KernelTable& l);
KernelTable kernel_add(const KernelTable& a, const KernelTable& b, cplx scale_b = 1.0);

// Embeds a block acting on legs (in_chain -> out_chain) into legs over
// (in_chain | extra -> out_chain | extra) with the identity on extra.
Mat pad_identity(const Grid& grid, int dim_h, const Mat& block, Chain in_chain, Chain out_chain,
                 Chain extra);

// Moebius transform between Maassen-Meyer kernels M(pm, cm, pc, theta) and kernels:
// K(.., N) = sum_{theta subset N} M(.., theta) (x) I^(N \ theta).
KernelTable mobius_to_kernel(const KernelTable& m);
KernelTable mobius_to_mm(const KernelTable& k);

// Exponential kernel of per-point triangular data (dim_h = 1, dim_K = d):
// K(P, A, C, N) = prod_P l (x) k^(C) (x) j^(N) (x) k*^(A).
KernelTable exponential_kernel(const GridPtr& grid, const std::vector<TriangularOp>& g);

// Pseudo-Fock space over per-point local states {absent, -, o (d legs), +}.
struct PseudoFock {
  GridPtr grid;
  int radix;
  Index dim;
};
PseudoFock pseudo_fock_space(const GridPtr& grid, Index max_dim = 4096);
Mat pseudo_fock_dilate(const PseudoFock& space, const std::vector<TriangularOp>& g);
Mat j_embed(const PseudoFock& space);
Mat j_project(const PseudoFock& space);
// Gram matrix of the pseudo-inner product: <f|h> = f^H eta h.
Mat pseudo_metric(const PseudoFock& space);

// Normally ordered factors (corner)(column)(diagonal)(row) of a triangular operator.
std::array<TriangularOp, 4> normal_order_factor(const TriangularOp& g);

// Finite superposition sum_i c_i exp{k_i} of exponential vectors.
struct ExpSuperposition {
  std::vector<cplx> coeffs;
  std::vector<std::vector<Vec>> labels;
};
ExpSuperposition pi_rep(const Grid& grid, const std::vector<TriangularOp>& g, const ExpSuperposition& v);
ExpSuperposition pi_rep(const Grid& grid, const TriangularRep& rep, const std::vector<AlgebraElement>& g,
                        const ExpSuperposition& v);
FockVector to_fock(const GridPtr& grid, const ExpSuperposition& v);
cplx vacuum_expectation(const Grid& grid, const std::vector<TriangularOp>& g);

struct NormQuadruple {
  RVec pm;
  RVec cm;
  RVec pc;
  RVec cc;
};
// Reflected quadruple for the star kernel: cm and pc exchanged.
NormQuadruple reflect(const NormQuadruple& a);

double norm_alpha(const KernelTable& k, const NormQuadruple& alpha);
// ||K||_p(r) = sum_P w(P) (sum_{C,A} w(C) w(A) (max_N ||K|| / p(N))^2 r(C | A))^{1/2}.
double projective_norm(const KernelTable& k, const WeightFunction& p, const WeightFunction& r);

struct AlphaBound {
  double product_bound;      // middle expression with discrete sums
  double exponential_bound;  // exp{ sum dx (alpha_pm + r (alpha_pc^2 + alpha_cm^2) / 2) }
  double cc_ratio;           // sup alpha_cc / p, must be <= 1
};
AlphaBound bound_pr(const Grid& grid, const NormQuadruple& alpha, const WeightFunction& r,
                    const WeightFunction& p);

}  // namespace qsc
