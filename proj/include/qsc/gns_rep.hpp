#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "qsc/ito_algebra.hpp"

namespace qsc {

using RowVec = Eigen::RowVectorXcd;

// Block upper-triangular operator on C (+) K (+) C in the order (-, o, +):
//   [[1, k_row, l], [0, j, k_col], [0, 0, 1]].
struct TriangularOp {
  cplx l = 0.0;
  RowVec k_row;
  Vec k_col;
  Mat j;

  int dim_k() const { return static_cast<int>(j.rows()); }
  static TriangularOp identity(int dim_k);
  Mat to_matrix() const;
  static TriangularOp from_matrix(const Mat& m, double tol = 1e-12);
};

// Anti-diagonal metric g on C (+) K (+) C.
Mat metric(int dim_k);
// B^dagger = g B^H g for any square matrix in the (-, o, +) layout.
Mat pseudo_adjoint_matrix(const Mat& b);

TriangularOp pseudo_adjoint(const TriangularOp& t);
TriangularOp tri_mul(const TriangularOp& a, const TriangularOp& b);
double tri_distance(const TriangularOp& a, const TriangularOp& b);

// Canonical triangular representation of the unitalized monoid generated by a
// sample. K is the quotient of the span of the sample (closed under products
// and star) by the null space of the Gram form (b, c) -> l(b* c).
class TriangularRep {
 public:
  TriangularRep(AlgebraPtr alg, Mat span_basis, Mat r, Mat r_pinv);
  TriangularRep(const TriangularRep& other);

  int dim_k() const { return static_cast<int>(r_.rows()); }
  const AlgebraPtr& algebra() const { return alg_; }
  // Orthonormal basis (columns, algebra coordinates) of the closed span.
  const Mat& span_basis() const { return span_basis_; }
  Vec e_vector() const;

  bool in_span(const AlgebraElement& b, double tol = 1e-9) const;
  Vec k(const AlgebraElement& b) const;
  RowVec k_star(const AlgebraElement& b) const;
  Mat j(const AlgebraElement& b) const;
  cplx l(const AlgebraElement& b) const { return l_value(b); }

  // Cached lookup; the table is keyed by coefficients rounded to 12 digits.
  TriangularOp get(const AlgebraElement& b) const;
  std::size_t table_size() const;

 private:
  TriangularOp evaluate(const AlgebraElement& b) const;

  AlgebraPtr alg_;
  Mat span_basis_;
  Mat r_;       // dim_K x dim(alg)
  Mat r_pinv_;  // dim(alg) x dim_K
  mutable std::mutex mu_;
  mutable std::map<std::vector<long long>, TriangularOp> table_;
};

struct GnsOptions {
  double tol = 1e-9;
};

// Throws CheckFailure("not conditionally positive") when the Gram form or the
// conditional-positivity matrix of the sample has a negative eigenvalue below -tol.
TriangularRep gns_construct(const AlgebraPtr& alg, const std::vector<AlgebraElement>& sample,
                            const GnsOptions& opts = {});

// Orthonormal basis of the smallest subspace containing the sample that is
// closed under products and star.
Mat closed_span(const AlgebraPtr& alg, const std::vector<AlgebraElement>& sample, double tol = 1e-10);

struct CocycleReport {
  double j_k = 0.0;          // j(a) k(b) = k(a o b) - k(a)
  double k_star_j = 0.0;     // k*(a) j(b) = k*(a o b) - k*(b)
  double pairing = 0.0;      // k*(a) k(b) = l(a o b) - l(a) - l(b)
  double homomorphism = 0.0; // T(a) T(b) = T(a o b)
  double star = 0.0;         // T(a)^dagger = T(a*)
  bool pass = false;
};
CocycleReport verify_cocycles(const TriangularRep& rep, const AlgebraElement& a,
                              const AlgebraElement& b, double tol = 1e-10);

struct CanonicalReduction {
  Mat s;                      // pseudo-isometry on C (+) K (+) C
  double isometry_residual;   // || S^dagger S - I ||
  double e_residual;          // || S^dagger eps - (0, ..., 0, 1) ||
};
// e_row = (1, e_o, e_+) with ||e_o||^2 = -2 Re e_+ ; U unitary on K.
CanonicalReduction reduce_to_canonical(const Vec& e_row, const Mat& u, double tol = 1e-10);

// Four-component representation of an Ito algebra element.
struct Quadruple {
  cplx l = 0.0;
  RowVec k_row;
  Vec k_col;
  Mat i;
  int dim() const { return static_cast<int>(i.rows()); }
};

Quadruple quadruple_mul(const Quadruple& p, const Quadruple& q);
Quadruple quadruple_star(const Quadruple& p);
Quadruple quadruple_add(const Quadruple& p, const Quadruple& q);
double quadruple_distance(const Quadruple& p, const Quadruple& q);
TriangularOp to_triangular(const Quadruple& q);
Quadruple from_triangular(const TriangularOp& t);
// Quadruple of b read from a triangular representation (i = j - I).
Quadruple quadruple_of(const TriangularRep& rep, const AlgebraElement& b);

// Poisson chaotic state: i = B, k = B e, k* = e^H B, l = e^H B e.
Quadruple poisson_state_rep(const Mat& b, const Vec& e);

// Gaussian chaotic state over H with Hermitian PSD form G, mean vector theta
// and antiunitary involution eta -> eta# = J conj(eta).
class GaussianState {
 public:
  GaussianState(Mat g, Vec theta, Mat j_involution, double tol = 1e-10);
  // Element b = (beta, eta): l = beta + (eta, theta), k = G^{1/2} eta,
  // k* = (G^{1/2} eta#)^H, i = 0.
  Quadruple rep(cplx beta, const Vec& eta) const;
  Vec sharp(const Vec& eta) const;
  cplx pairing(const Vec& eta) const;
  const Mat& form() const { return g_; }

 private:
  Mat g_;
  Mat g_sqrt_;
  Vec theta_;
  Mat j_;
};

}  // namespace qsc
