#include "qsc/gns_rep.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace qsc {

TriangularOp TriangularOp::identity(int dim_k) {
  TriangularOp t;
  t.l = 0.0;
  t.k_row = RowVec::Zero(dim_k);
  t.k_col = Vec::Zero(dim_k);
  t.j = Mat::Identity(dim_k, dim_k);
  return t;
}

Mat TriangularOp::to_matrix() const {
  const int n = dim_k();
  Mat m = Mat::Zero(n + 2, n + 2);
  m(0, 0) = 1.0;
  m(n + 1, n + 1) = 1.0;
  m(0, n + 1) = l;
  m.block(0, 1, 1, n) = k_row;
  m.block(1, n + 1, n, 1) = k_col;
  m.block(1, 1, n, n) = j;
  return m;
}

TriangularOp TriangularOp::from_matrix(const Mat& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw InvalidArgument("TriangularOp: matrix must be square of size >= 2");
  const Index n = m.rows() - 2;
  double below = std::max(std::abs(m(0, 0) - 1.0), std::abs(m(n + 1, n + 1) - 1.0));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < r; ++c) below = std::max(below, std::abs(m(r, c)));
  if (n > 0) below = std::max(below, max_abs(Mat(m.block(n + 1, 1, 1, n))));
  if (below > tol) throw InvalidArgument("TriangularOp: matrix is not unit upper triangular");
  TriangularOp t;
  t.l = m(0, n + 1);
  t.k_row = m.block(0, 1, 1, n);
  t.k_col = m.block(1, n + 1, n, 1);
  t.j = m.block(1, 1, n, n);
  return t;
}

Mat metric(int dim_k) {
  Mat g = Mat::Zero(dim_k + 2, dim_k + 2);
  g(0, dim_k + 1) = 1.0;
  g(dim_k + 1, 0) = 1.0;
  g.block(1, 1, dim_k, dim_k).setIdentity();
  return g;
}

Mat pseudo_adjoint_matrix(const Mat& b) {
  if (b.rows() != b.cols() || b.rows() < 2)
    throw InvalidArgument("pseudo_adjoint_matrix: square matrix of size >= 2 required");
  const Mat g = metric(static_cast<int>(b.rows()) - 2);
  return g * b.adjoint() * g;
}

TriangularOp pseudo_adjoint(const TriangularOp& t) {
  TriangularOp r;
  r.l = std::conj(t.l);
  r.k_row = t.k_col.adjoint();
  r.k_col = t.k_row.adjoint();
  r.j = t.j.adjoint();
  return r;
}

TriangularOp tri_mul(const TriangularOp& a, const TriangularOp& b) {
  if (a.dim_k() != b.dim_k()) throw InvalidArgument("tri_mul: dimension mismatch");
  TriangularOp r;
  r.l = b.l + (a.k_row * b.k_col)(0, 0) + a.l;
  r.k_row = b.k_row + a.k_row * b.j;
  r.k_col = a.k_col + a.j * b.k_col;
  r.j = a.j * b.j;
  return r;
}

double tri_distance(const TriangularOp& a, const TriangularOp& b) {
  if (a.dim_k() != b.dim_k()) return INFINITY;
  return max_abs(Mat(a.to_matrix() - b.to_matrix()));
}

Mat closed_span(const AlgebraPtr& alg, const std::vector<AlgebraElement>& sample, double tol) {
  const int n = alg->dim();
  Mat basis(n, 0);
  auto try_add = [&](const Vec& v) {
    const double scale = std::max(1.0, v.norm());
    Vec r = v;
    for (int pass = 0; pass < 2; ++pass) r -= basis * (basis.adjoint() * r);
    if (r.norm() <= tol * scale) return false;
    basis.conservativeResize(n, basis.cols() + 1);
    basis.col(basis.cols() - 1) = r / r.norm();
    return true;
  };
  for (const auto& s : sample) {
    if (s.parent != alg) throw InvalidArgument("closed_span: sample element from another algebra");
    try_add(s.coeffs);
  }
  bool grew = true;
  while (grew) {
    grew = false;
    const Mat current = basis;
    for (Index p = 0; p < current.cols(); ++p) {
      const AlgebraElement bp = element(alg, current.col(p));
      grew |= try_add(star(bp).coeffs);
      for (Index q = 0; q < current.cols(); ++q)
        grew |= try_add(mul(bp, element(alg, current.col(q))).coeffs);
    }
  }
  return basis;
}

namespace {

// Left multiplication by b in algebra coordinates: (b x)_j = sum_{i,k} b_i c_j(i,k) x_k.
Mat left_mult(const AlgebraElement& b) {
  const ItoAlgebra& alg = *b.parent;
  const int n = alg.dim();
  Mat m(n, n);
  for (int j = 0; j < n; ++j) m.row(j) = b.coeffs.transpose() * alg.c(j);
  return m;
}

std::vector<long long> key_of(const Vec& v) {
  std::vector<long long> key;
  key.reserve(static_cast<std::size_t>(2 * v.size()));
  for (Index i = 0; i < v.size(); ++i) {
    key.push_back(std::llround(v(i).real() * 1e12));
    key.push_back(std::llround(v(i).imag() * 1e12));
  }
  return key;
}

}  // namespace

TriangularRep::TriangularRep(AlgebraPtr alg, Mat span_basis, Mat r, Mat r_pinv)
    : alg_(std::move(alg)), span_basis_(std::move(span_basis)), r_(std::move(r)),
      r_pinv_(std::move(r_pinv)) {}

TriangularRep::TriangularRep(const TriangularRep& other)
    : alg_(other.alg_), span_basis_(other.span_basis_), r_(other.r_), r_pinv_(other.r_pinv_) {
  std::lock_guard<std::mutex> lock(other.mu_);
  table_ = other.table_;
}

Vec TriangularRep::e_vector() const {
  Vec e = Vec::Zero(dim_k() + 2);
  e(dim_k() + 1) = 1.0;
  return e;
}

bool TriangularRep::in_span(const AlgebraElement& b, double tol) const {
  if (b.parent != alg_) return false;
  const Vec resid = b.coeffs - span_basis_ * (span_basis_.adjoint() * b.coeffs);
  return resid.norm() <= tol * std::max(1.0, b.coeffs.norm());
}

Vec TriangularRep::k(const AlgebraElement& b) const {
  if (!in_span(b)) throw InvalidArgument("TriangularRep: element outside the sampled span");
  return r_ * b.coeffs;
}

RowVec TriangularRep::k_star(const AlgebraElement& b) const { return k(star(b)).adjoint(); }

Mat TriangularRep::j(const AlgebraElement& b) const {
  if (!in_span(b)) throw InvalidArgument("TriangularRep: element outside the sampled span");
  return Mat::Identity(dim_k(), dim_k()) + r_ * left_mult(b) * r_pinv_;
}

TriangularOp TriangularRep::evaluate(const AlgebraElement& b) const {
  TriangularOp t;
  t.l = l_value(b);
  t.k_row = k_star(b);
  t.k_col = k(b);
  t.j = j(b);
  return t;
}

TriangularOp TriangularRep::get(const AlgebraElement& b) const {
  const auto key = key_of(b.coeffs);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
  }
  TriangularOp t = evaluate(b);
  std::lock_guard<std::mutex> lock(mu_);
  return table_.emplace(key, std::move(t)).first->second;
}

std::size_t TriangularRep::table_size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return table_.size();
}

TriangularRep gns_construct(const AlgebraPtr& alg, const std::vector<AlgebraElement>& sample,
                            const GnsOptions& opts) {
  const PositivityResult cp = conditional_positivity_check(alg, sample, opts.tol);
  if (!cp.positive)
    throw CheckFailure("not conditionally positive: min eigenvalue " + std::to_string(cp.min_eigenvalue));

  const Mat basis = closed_span(alg, sample);
  const Index m = basis.cols();
  Mat gram(m, m);
  for (Index p = 0; p < m; ++p) {
    const AlgebraElement sp = star(element(alg, basis.col(p)));
    for (Index q = 0; q < m; ++q) gram(p, q) = l_value(mul(sp, element(alg, basis.col(q))));
  }
  gram = 0.5 * (gram + gram.adjoint()).eval();

  Mat u(alg->dim(), 0);
  RVec lambda(0);
  if (m > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    const RVec ev = es.eigenvalues();
    const double lmax = std::max(ev.maxCoeff(), 0.0);
    if (ev.minCoeff() < -opts.tol * std::max(1.0, lmax))
      throw CheckFailure("not conditionally positive: Gram form has eigenvalue " +
                         std::to_string(ev.minCoeff()));
    std::vector<Index> keep;
    for (Index i = m - 1; i >= 0; --i)
      if (ev(i) > opts.tol * std::max(1.0, lmax) && ev(i) > 0.0) keep.push_back(i);
    u.resize(alg->dim(), static_cast<Index>(keep.size()));
    lambda.resize(static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
      Vec col = basis * es.eigenvectors().col(keep[c]);
      Index arg = 0;
      const double top = col.cwiseAbs().maxCoeff();
      for (Index i = 0; i < col.size(); ++i)
        if (std::abs(col(i)) >= top - 1e-12) {
          arg = i;
          break;
        }
      col *= std::conj(col(arg)) / std::abs(col(arg));
      u.col(static_cast<Index>(c)) = col;
      lambda(static_cast<Index>(c)) = ev(keep[c]);
    }
  }
  const Mat r = lambda.cwiseSqrt().cast<cplx>().asDiagonal() * u.adjoint();
  const Mat r_pinv = u * lambda.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal();
  return TriangularRep(alg, basis, r, r_pinv);
}

CocycleReport verify_cocycles(const TriangularRep& rep, const AlgebraElement& a,
                              const AlgebraElement& b, double tol) {
  CocycleReport r;
  const AlgebraElement ab = monoid_mul(a, b);
  const TriangularOp ta = rep.get(a), tb = rep.get(b), tab = rep.get(ab);
  r.j_k = max_abs(Vec(ta.j * tb.k_col - (tab.k_col - ta.k_col)));
  r.k_star_j = max_abs(Mat(ta.k_row * tb.j - (tab.k_row - tb.k_row)));
  r.pairing = std::abs((ta.k_row * tb.k_col)(0, 0) - (tab.l - ta.l - tb.l));
  r.homomorphism = tri_distance(tri_mul(ta, tb), tab);
  r.star = tri_distance(pseudo_adjoint(ta), rep.get(star(a)));
  r.pass = r.j_k <= tol && r.k_star_j <= tol && r.pairing <= tol && r.homomorphism <= tol &&
           r.star <= tol;
  return r;
}

CanonicalReduction reduce_to_canonical(const Vec& e_row, const Mat& u, double tol) {
  const Index n = u.rows();
  if (u.cols() != n) throw InvalidArgument("reduce_to_canonical: U must be square");
  if (e_row.size() != n + 2) throw InvalidArgument("reduce_to_canonical: e must have size dim_K + 2");
  if (max_abs(Mat(u.adjoint() * u - Mat::Identity(n, n))) > tol)
    throw InvalidArgument("reduce_to_canonical: U is not unitary");
  if (std::abs(e_row(0) - 1.0) > tol)
    throw InvalidArgument("reduce_to_canonical: first component of e must be 1");
  const RowVec e_o = e_row.segment(1, n).transpose();
  const cplx e_p = e_row(n + 1);
  if (std::abs(e_o.squaredNorm() + 2.0 * e_p.real()) > tol)
    throw InvalidArgument("reduce_to_canonical: e must satisfy ||e_o||^2 = -2 Re e_+");

  Mat s = Mat::Zero(n + 2, n + 2);
  s(0, 0) = 1.0;
  s(n + 1, n + 1) = 1.0;
  s.block(0, 1, 1, n) = e_o * u;
  s(0, n + 1) = std::conj(e_p);
  s.block(1, 1, n, n) = -u;
  s.block(1, n + 1, n, 1) = e_o.adjoint();

  const Mat sd = pseudo_adjoint_matrix(s);
  Vec eps(n + 2);
  eps(0) = std::conj(e_p);
  eps.segment(1, n) = e_o.adjoint();
  eps(n + 1) = 1.0;
  Vec target = Vec::Zero(n + 2);
  target(n + 1) = 1.0;
  CanonicalReduction red;
  red.s = s;
  red.isometry_residual = max_abs(Mat(sd * s - Mat::Identity(n + 2, n + 2)));
  red.e_residual = max_abs(Vec(sd * eps - target));
  return red;
}

Quadruple quadruple_mul(const Quadruple& p, const Quadruple& q) {
  if (p.dim() != q.dim()) throw InvalidArgument("quadruple_mul: dimension mismatch");
  Quadruple r;
  r.l = (p.k_row * q.k_col)(0, 0);
  r.k_row = p.k_row * q.i;
  r.k_col = p.i * q.k_col;
  r.i = p.i * q.i;
  return r;
}

Quadruple quadruple_star(const Quadruple& p) {
  Quadruple r;
  r.l = std::conj(p.l);
  r.k_row = p.k_col.adjoint();
  r.k_col = p.k_row.adjoint();
  r.i = p.i.adjoint();
  return r;
}

Quadruple quadruple_add(const Quadruple& p, const Quadruple& q) {
  if (p.dim() != q.dim()) throw InvalidArgument("quadruple_add: dimension mismatch");
  return {p.l + q.l, p.k_row + q.k_row, p.k_col + q.k_col, p.i + q.i};
}

double quadruple_distance(const Quadruple& p, const Quadruple& q) {
  if (p.dim() != q.dim()) return INFINITY;
  return std::max({std::abs(p.l - q.l), max_abs(Mat(p.k_row - q.k_row)), max_abs(Vec(p.k_col - q.k_col)),
                   max_abs(Mat(p.i - q.i))});
}

TriangularOp to_triangular(const Quadruple& q) {
  TriangularOp t;
  t.l = q.l;
  t.k_row = q.k_row;
  t.k_col = q.k_col;
  t.j = Mat::Identity(q.dim(), q.dim()) + q.i;
  return t;
}

Quadruple from_triangular(const TriangularOp& t) {
  return {t.l, t.k_row, t.k_col, t.j - Mat::Identity(t.dim_k(), t.dim_k())};
}

Quadruple quadruple_of(const TriangularRep& rep, const AlgebraElement& b) {
  return from_triangular(rep.get(b));
}

Quadruple poisson_state_rep(const Mat& b, const Vec& e) {
  if (b.rows() != b.cols() || b.rows() != e.size())
    throw InvalidArgument("poisson_state_rep: B must be square with size of e");
  Quadruple q;
  q.i = b;
  q.k_col = b * e;
  q.k_row = e.adjoint() * b;
  q.l = (e.adjoint() * b * e)(0, 0);
  return q;
}

GaussianState::GaussianState(Mat g, Vec theta, Mat j_involution, double tol)
    : g_(std::move(g)), theta_(std::move(theta)), j_(std::move(j_involution)) {
  const Index n = g_.rows();
  if (g_.cols() != n || theta_.size() != n || j_.rows() != n || j_.cols() != n)
    throw InvalidArgument("GaussianState: G, theta and J must share the dimension of H");
  if (max_abs(Mat(g_ - g_.adjoint())) > tol) throw InvalidArgument("GaussianState: G must be Hermitian");
  if (max_abs(Mat(j_ * j_.conjugate() - Mat::Identity(n, n))) > tol)
    throw InvalidArgument("GaussianState: eta -> J conj(eta) must be an involution");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g_ + g_.adjoint()));
  const RVec ev = es.eigenvalues();
  if (n > 0 && ev.minCoeff() < -tol * std::max(1.0, ev.cwiseAbs().maxCoeff()))
    throw CheckFailure("GaussianState: form is indefinite");
  const RVec root = ev.cwiseMax(0.0).cwiseSqrt();
  g_sqrt_ = es.eigenvectors() * root.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

Vec GaussianState::sharp(const Vec& eta) const { return j_ * eta.conjugate(); }

cplx GaussianState::pairing(const Vec& eta) const {
  const cplx a = theta_.dot(eta);
  const cplx b = theta_.dot(sharp(eta));
  return 0.5 * (a + std::conj(b));
}

Quadruple GaussianState::rep(cplx beta, const Vec& eta) const {
  if (eta.size() != g_.rows()) throw InvalidArgument("GaussianState: eta has wrong dimension");
  Quadruple q;
  q.l = beta + pairing(eta);
  q.k_col = g_sqrt_ * eta;
  q.k_row = (g_sqrt_ * sharp(eta)).adjoint();
  q.i = Mat::Zero(g_.rows(), g_.rows());
  return q;
}

}  // namespace qsc
