#pragma once

#include <map>
#include <vector>

#include "qsc/kernel_calc.hpp"

namespace qsc {

// Operator values of an integrand at one grid point x, with D the dimension
// of H (x) F and d the dimension of K_x:
//   pm : D x D, cm : D x Dd, pc : Dd x D, cc : Dd x Dd.
struct PointIntegrand {
  Mat pm;
  Mat cm;
  Mat pc;
  Mat cc;
};

struct IntegrandQuadruple {
  GridPtr grid;
  int dim_h = 1;
  std::vector<PointIntegrand> points;

  static IntegrandQuadruple zero(const GridPtr& grid, int dim_h);
  void validate() const;
};

enum class MeasureKind { preservation, creation, annihilation, exchange };

// Dense matrix of the increment at x:
//   dx pm + dx cm a(x) + a*(x) pc + a*(x) cc a(x).
Mat one_point_term(const Grid& grid, int dim_h, int x, const PointIntegrand& d);

// The component of one kind summed over the points of delta.
Mat lambda_measure_matrix(MeasureKind kind, const IntegrandQuadruple& d, Chain delta);
FockVector lambda_measure(MeasureKind kind, const IntegrandQuadruple& d, Chain delta, const FockVector& h);

// i_0^t(D): sum of one_point_term over the points with t(x) < t.
Mat single_integral_matrix(const IntegrandQuadruple& d, double t);
FockVector single_integral(const IntegrandQuadruple& d, double t, const FockVector& h);

// Table integrand B(P, A, C, N): a map
//   H (x) F (x) K^(A|N) (x) K^ei  ->  H (x) F (x) K^(N|C) (x) K^eo
// with the chain legs sorted by grid order and ei / eo trailing extra legs.
struct TableIntegrand {
  GridPtr grid;
  int dim_h = 1;
  int extra_in = 0;
  int extra_out = 0;
  std::map<Quad, Mat> blocks;

  Index rows(const Quad& q) const;
  Index cols(const Quad& q) const;
  void add(const Quad& q, const Mat& block);
};

// iota_0^t(B) = sum over tables inside X^t of w(P) w(A) a*(N|C) B a(A|N).
Mat multiple_integral_matrix(const TableIntegrand& b, double t);
FockVector multiple_integral(const TableIntegrand& b, double t, const FockVector& h);

// B*(P, A, C, N) = weighted adjoint of B(P, C, A, N).
TableIntegrand table_star(const TableIntegrand& b);

// Atomic tables of a single integrand: B({x} in role) = D_role(x).
TableIntegrand atomic_table(const IntegrandQuadruple& d);

// Derivatives D(x) = iota_0^t(x)(B(. + x)) as a quadruple over all grid points.
IntegrandQuadruple qs_derivatives(const TableIntegrand& b);
PointIntegrand qs_derivative_at(const TableIntegrand& b, int x);
// Block B(empty table), zero when absent.
Mat table_constant(const TableIntegrand& b);

// Kernel-valued integrand M(theta, .): the kernel stored at theta carries the
// extra chains in = A|N and out = N|C of theta.
using MIntegrand = std::map<Quad, KernelTable>;
void add_m_entry(MIntegrand& m, const GridPtr& grid, int dim_h, const Quad& theta, const Quad& upsilon,
                 const Mat& block);
// nu_0^t(M)(theta + upsilon) = sum over theta inside X^t of M(theta, upsilon).
KernelTable counting_integral(const MIntegrand& m, const GridPtr& grid, int dim_h, double t);
// Table integrand theta -> eps(M(theta)).
TableIntegrand epsilon_table(const MIntegrand& m, const GridPtr& grid, int dim_h);

struct NormEstimate {
  double bound = 0.0;
  double measured = 0.0;
};
// ||B||_{p,t}^s(r) and the dense norm ||iota_0^t(B)||_q with q = 1/r + p + 1/s.
NormEstimate table_norm_estimate(const TableIntegrand& b, const WeightFunction& p, const WeightFunction& r,
                                 const WeightFunction& s, double t);
NormEstimate single_norm_estimate(const IntegrandQuadruple& d, const WeightFunction& p,
                                  const WeightFunction& r, const WeightFunction& s, double t);

}  // namespace qsc
