#pragma once

#include <functional>
#include <vector>

#include "qsc/qs_integral.hpp"

namespace qsc {

// Germ of an operator at a grid point x, split by the role of x:
//   eps(K) = e + dx pm + dx cm a(x) + a*(x) pc + a*(x) cc a(x)
// with e, pm : D x D, cm : D x Dd, pc : Dd x D, cc : Dd x Dd.
// As a triangular matrix it reads [[e, cm, pm], [0, cc, pc], [0, 0, e]].
struct GermMatrix {
  GridPtr grid;
  int dim_h = 1;
  int x = 0;
  Mat e;
  Mat pm;
  Mat cm;
  Mat pc;
  Mat cc;

  double weight() const { return grid->weight(x); }
  PointIntegrand off_corner() const { return {pm, cm, pc, cc}; }
};

// Germ of eps(K) at x: e from the entries without x, the other blocks from
// the entries with x in the given role with x removed.
GermMatrix germ_of(const KernelTable& k, int x);
// Germ of the identity kernel (the neutral element of germ_mul).
GermMatrix germ_identity(const GridPtr& grid, int dim_h, int x);

// Product of germs matching the kernel product: the block-triangular product
// plus dx (pm, cm of A) times (pm, cm of B) on the (+) row / (-) column pairs.
// With deformed = false the dx terms are dropped.
GermMatrix germ_mul(const GermMatrix& a, const GermMatrix& b, bool deformed = true);
GermMatrix germ_dagger(const GermMatrix& a);
GermMatrix germ_add(const GermMatrix& a, const GermMatrix& b, cplx scale_b = 1.0);
double germ_distance(const GermMatrix& a, const GermMatrix& b);
// Dense eps(K) rebuilt from its germ.
Mat germ_assemble(const GermMatrix& g);

using KernelProcess = std::function<KernelTable(double)>;

// Cut just after x: the next grid time, or past the last point.
double next_cut(const Grid& grid, int x);
double first_cut(const Grid& grid);

struct GermPair {
  GermMatrix t;  // germ of K at t(x)
  GermMatrix g;  // germ of K at the next cut
  GermMatrix d() const;
};
GermPair germs(const KernelProcess& k, const GridPtr& grid, int x);

// Both sides of T_t T_t* - T_0 T_0* (or T_t* T_t - T_0* T_0 with adjoint_first).
struct ItoResidual {
  double exact = 0.0;    // deformed germ product
  double literal = 0.0;  // dx terms dropped in the germ product
  double scale = 0.0;    // max entry of the left side
};
ItoResidual ito_check_strong(const KernelProcess& k, const GridPtr& grid, int dim_h, double t,
                             bool adjoint_first = false);

// Weak form for T_t = T_0 + i_0^t(D) on a vector h.
struct WeakResidual {
  double lhs = 0.0;      // ||T_t h||^2 - ||T_0 h||^2
  double exact = 0.0;    // |lhs - (literal + correction)|
  double literal = 0.0;  // |lhs - literal|
};
WeakResidual ito_check_weak(const IntegrandQuadruple& d, const Mat& t0, const FockVector& h, double t);

// Three-argument kernel k(C, N, A) = sum_P w(P) K(P, A, C, N), which determines eps(K).
std::map<std::array<Chain, 3>, Mat> kernel_k3(const KernelTable& k);
// Largest violation of the adapted pattern for points with t(y) >= t: no
// creation or annihilation there and identity action on the preserved legs.
double adaptedness_residual(const KernelTable& k, double t);

struct AdaptedReport {
  double adaptedness = 0.0;  // max over cuts of adaptedness_residual
  double germ_structure = 0.0;
  ItoResidual ito;
};
AdaptedReport ito_check_adapted(const KernelProcess& k, const GridPtr& grid, int dim_h, double t);

// Functional Ito formula for the pseudo-Poisson product on A (x) (C + a):
// (X, D)(Y, E) = (XY, X E_j + D_j Y + sum_ik c_j(i, k) D_i E_k).
struct PolyIncrement {
  std::vector<Mat> recursion;  // D^(m)_j from the recursion
  std::vector<Mat> direct;     // from repeated right multiplication
  double residual = 0.0;
};
PolyIncrement functional_ito_poly(const ItoAlgebra& alg, const Mat& x, const std::vector<Mat>& d, int m);

}  // namespace qsc
