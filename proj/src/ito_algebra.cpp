#include "qsc/ito_algebra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace qsc {

ItoAlgebra::ItoAlgebra(std::vector<std::string> names, std::vector<Mat> c, double lambda)
    : names_(std::move(names)), c_(std::move(c)), lambda_(lambda) {
  const auto n = static_cast<Eigen::Index>(c_.size());
  if (n < 1) throw InvalidArgument("ItoAlgebra: dim must be positive");
  for (const auto& m : c_) {
    if (m.rows() != n || m.cols() != n)
      throw InvalidArgument("ItoAlgebra: structure tensor must have shape [dim][dim][dim]");
  }
  if (names_.empty()) {
    names_.emplace_back("dt");
    for (Eigen::Index j = 1; j < n; ++j) names_.push_back("e" + std::to_string(j));
  }
  if (static_cast<Eigen::Index>(names_.size()) != n)
    throw InvalidArgument("ItoAlgebra: names length must equal dim");
}

AlgebraPtr hp_vacuum() {
  const cplx i = I_UNIT;
  std::vector<Mat> c(4, Mat::Zero(4, 4));
  c[0](1, 1) = 1.0;
  c[0](1, 2) = -i;
  c[0](2, 1) = i;
  c[0](2, 2) = 1.0;
  // Indices 1..3 of the 3x3 matrices printed for c_1, c_2, c_3.
  c[1](1, 3) = 0.5;
  c[1](2, 3) = 0.5 * i;
  c[1](3, 1) = 0.5;
  c[1](3, 2) = -0.5 * i;
  c[2](1, 3) = -0.5 * i;
  c[2](2, 3) = 0.5;
  c[2](3, 1) = 0.5 * i;
  c[2](3, 2) = 0.5;
  c[3](3, 3) = 1.0;
  return std::make_shared<const ItoAlgebra>(std::vector<std::string>{"dt", "M1", "M2", "M3"},
                                            std::move(c));
}

AlgebraPtr wiener() {
  std::vector<Mat> c(2, Mat::Zero(2, 2));
  c[0](1, 1) = 1.0;
  return std::make_shared<const ItoAlgebra>(std::vector<std::string>{"dt", "e"}, std::move(c));
}

AlgebraPtr poisson(double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("poisson: lambda must be nonnegative");
  std::vector<Mat> c(2, Mat::Zero(2, 2));
  c[0](1, 1) = lambda;
  c[1](1, 1) = 1.0;
  return std::make_shared<const ItoAlgebra>(std::vector<std::string>{"dt", "e"}, std::move(c),
                                            lambda);
}

AlgebraElement zero(const AlgebraPtr& alg) { return {alg, Vec::Zero(alg->dim())}; }

AlgebraElement basis(const AlgebraPtr& alg, int j) {
  if (j < 0 || j >= alg->dim()) throw InvalidArgument("basis: index out of range");
  AlgebraElement e = zero(alg);
  e.coeffs(j) = 1.0;
  return e;
}

AlgebraElement element(const AlgebraPtr& alg, const Vec& coeffs) {
  if (coeffs.size() != alg->dim())
    throw InvalidArgument("element: coefficient length does not match algebra dim");
  return {alg, coeffs};
}

namespace {
void require_same(const AlgebraElement& a, const AlgebraElement& b) {
  if (!a.parent || a.parent != b.parent) throw InvalidArgument("algebra elements have different parents");
}
}  // namespace

AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a, b);
  const ItoAlgebra& alg = *a.parent;
  Vec out(alg.dim());
  for (int j = 0; j < alg.dim(); ++j) out(j) = a.coeffs.transpose() * alg.c(j) * b.coeffs;
  return {a.parent, out};
}

AlgebraElement star(const AlgebraElement& a) { return {a.parent, a.coeffs.conjugate()}; }

cplx l_value(const AlgebraElement& a) { return a.coeffs(0); }

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a, b);
  return {a.parent, a.coeffs + b.coeffs};
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a, b);
  return {a.parent, a.coeffs - b.coeffs};
}

AlgebraElement operator*(cplx s, const AlgebraElement& a) { return {a.parent, s * a.coeffs}; }

AlgebraElement monoid_mul(const AlgebraElement& a, const AlgebraElement& b) {
  return a + b + mul(a, b);
}

AlgebraElement star_comp(const AlgebraElement& a, const AlgebraElement& b) {
  const AlgebraElement bs = star(b);
  return a + bs + mul(a, bs);
}

ValidationReport validate(const ItoAlgebra& alg, double tol) {
  ValidationReport rep;
  const int n = alg.dim();
  rep.hermitianity.name = "hermitianity";
  rep.associativity.name = "associativity";
  rep.degeneracy.name = "degeneracy";

  for (int j = 0; j < n; ++j) {
    const Mat& c = alg.c(j);
    rep.hermitianity.max_violation =
        std::max(rep.hermitianity.max_violation, max_abs(Mat(c - c.adjoint())));
    rep.degeneracy.max_violation =
        std::max({rep.degeneracy.max_violation, c.row(0).cwiseAbs().maxCoeff(),
                  c.col(0).cwiseAbs().maxCoeff()});
  }

  // (e_a e_b) e_m versus e_a (e_b e_m), componentwise.
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int m = 0; m < n; ++m) {
        for (int i = 0; i < n; ++i) {
          cplx left = 0.0, right = 0.0;
          for (int j = 0; j < n; ++j) {
            left += alg.c(j)(a, b) * alg.c(i)(j, m);
            right += alg.c(j)(b, m) * alg.c(i)(a, j);
          }
          rep.associativity.max_violation =
              std::max(rep.associativity.max_violation, std::abs(left - right));
        }
      }
    }
  }
  rep.hermitianity.pass = rep.hermitianity.max_violation <= tol;
  rep.associativity.pass = rep.associativity.max_violation <= tol;
  rep.degeneracy.pass = rep.degeneracy.max_violation <= tol;

  // Stack the linear functionals b -> l(b), l(e_a b), l(b e_c), l(e_a b e_c).
  const Mat& c0 = alg.c(0);
  Mat phi(1 + 2 * n + n * n, n);
  phi.setZero();
  phi(0, 0) = 1.0;
  for (int a = 0; a < n; ++a) {
    phi.row(1 + a) = c0.row(a);
    phi.row(1 + n + a) = c0.col(a).transpose();
  }
  for (int a = 0; a < n; ++a) {
    for (int cidx = 0; cidx < n; ++cidx) {
      auto row = phi.row(1 + 2 * n + a * n + cidx);
      for (int k = 0; k < n; ++k) {
        cplx v = 0.0;
        for (int j = 0; j < n; ++j) v += alg.c(j)(a, k) * c0(j, cidx);
        row(k) = v;
      }
    }
  }
  Eigen::JacobiSVD<Mat> svd(phi);
  const RVec sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
  rep.ideal_rank = static_cast<int>((sv.array() > cutoff).count());
  rep.ideal_trivial = rep.ideal_rank == n;
  return rep;
}

PositivityResult conditional_positivity_check(const AlgebraPtr& alg,
                                              const std::vector<AlgebraElement>& sample,
                                              double tol) {
  std::vector<AlgebraElement> pts;
  pts.push_back(zero(alg));
  for (const auto& s : sample) {
    if (s.parent != alg) throw InvalidArgument("conditional_positivity_check: parent mismatch");
    pts.push_back(s);
  }
  const auto m = static_cast<Eigen::Index>(pts.size());
  Mat L(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index c = 0; c < m; ++c)
      L(a, c) = l_value(star_comp(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(c)]));
  L = 0.5 * (L + L.adjoint()).eval();

  // Orthonormal basis of {v : sum v = 0} from the differences e_i - e_{i+1}.
  Mat diff = Mat::Zero(m, m - 1);
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    diff(i, i) = 1.0;
    diff(i + 1, i) = -1.0;
  }
  PositivityResult res;
  if (m == 1) {
    res.positive = true;
    res.min_eigenvalue = 0.0;
    return res;
  }
  Eigen::HouseholderQR<Mat> qr(diff);
  const Mat q = qr.householderQ() * Mat::Identity(m, m - 1);
  const Mat compressed = q.adjoint() * L * q;
  Eigen::SelfAdjointEigenSolver<Mat> es(compressed);
  res.min_eigenvalue = es.eigenvalues().minCoeff();
  res.positive = res.min_eigenvalue >= -tol;
  return res;
}

}  // namespace qsc
