#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qsc/core.hpp"

namespace qsc {

// Finite-dimensional Ito *-algebra on a self-adjoint basis (e_0 = d_t, e_1, ...).
// Structure constants are stored as one matrix per output index:
// c(j)(i, k) is the coefficient of e_j in the product e_i e_k.
class ItoAlgebra {
 public:
  ItoAlgebra(std::vector<std::string> names, std::vector<Mat> c, double lambda = 0.0);

  int dim() const { return static_cast<int>(c_.size()); }
  const Mat& c(int j) const { return c_.at(static_cast<std::size_t>(j)); }
  const std::vector<Mat>& tensor() const { return c_; }
  const std::vector<std::string>& names() const { return names_; }
  // Intensity parameter carried for presets that have one (Poisson lambda).
  double lambda() const { return lambda_; }

 private:
  std::vector<std::string> names_;
  std::vector<Mat> c_;
  double lambda_;
};

using AlgebraPtr = std::shared_ptr<const ItoAlgebra>;

AlgebraPtr hp_vacuum();
AlgebraPtr wiener();
AlgebraPtr poisson(double lambda);

// Element a = sum_j coeffs_j e_j of a given algebra.
struct AlgebraElement {
  AlgebraPtr parent;
  Vec coeffs;
};

AlgebraElement zero(const AlgebraPtr& alg);
AlgebraElement basis(const AlgebraPtr& alg, int j);
AlgebraElement element(const AlgebraPtr& alg, const Vec& coeffs);

AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement star(const AlgebraElement& a);
cplx l_value(const AlgebraElement& a);
// Unitalized product a o b = a + b + ab (the unit corresponds to 0).
AlgebraElement monoid_mul(const AlgebraElement& a, const AlgebraElement& b);
// a * b := a + star(b) + a star(b).
AlgebraElement star_comp(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator*(cplx s, const AlgebraElement& a);

struct AxiomCheck {
  std::string name;
  double max_violation = 0.0;
  bool pass = true;
};

struct ValidationReport {
  AxiomCheck hermitianity;
  AxiomCheck associativity;
  AxiomCheck degeneracy;
  // The ideal {b : l(b) = l(ab) = l(bc) = l(abc) = 0 for all a, c} is the null
  // space of the stacked functionals; ideal_rank is their numerical rank.
  int ideal_rank = 0;
  bool ideal_trivial = false;
  bool all_pass() const { return hermitianity.pass && associativity.pass && degeneracy.pass; }
};

ValidationReport validate(const ItoAlgebra& alg, double tol = 1e-12);

struct PositivityResult {
  bool positive = false;
  double min_eigenvalue = 0.0;
};

// Conditional positivity of l on the sample with the unit adjoined: the matrix
// L[a][c] = l(a * c) is compressed to {kappa : sum kappa = 0} and tested for PSD.
PositivityResult conditional_positivity_check(const AlgebraPtr& alg,
                                              const std::vector<AlgebraElement>& sample,
                                              double tol = 1e-9);

}  // namespace qsc
