#pragma once

#include <random>
#include <vector>

#include <Eigen/QR>

#include "qsc/ito_formula.hpp"
#include "qsc/qsde_solver.hpp"

namespace qsc::testing {

// Seeded source of Gaussian complex data for randomized suites.
class Rng {
 public:
  explicit Rng(unsigned seed) : gen_(seed) {}

  double real() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  cplx complex() { return {real(), real()}; }

  Mat mat(Index rows, Index cols, double scale = 1.0) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = scale * complex();
    return m;
  }
  Vec vec(Index n, double scale = 1.0) { return mat(n, 1, scale); }
  Mat hermitian(Index n, double scale = 1.0) {
    const Mat m = mat(n, n, scale);
    return 0.5 * (m + m.adjoint());
  }
  Mat unitary(Index n) {
    Eigen::HouseholderQR<Mat> qr(mat(n, n));
    return qr.householderQ() * Mat::Identity(n, n);
  }

  // Each point takes one of the four roles or stays absent with equal odds.
  Quad quad(int n) {
    Quad q;
    for (int x = 0; x < n; ++x) {
      switch (integer(0, 4)) {
        case 1: q.pm |= point(x); break;
        case 2: q.cm |= point(x); break;
        case 3: q.pc |= point(x); break;
        case 4: q.cc |= point(x); break;
        default: break;
      }
    }
    return q;
  }

  // Random kernel whose entries all have admissible input and output chains.
  KernelTable kernel(const GridPtr& grid, int dim_h, int count, double scale = 1.0) {
    KernelTable k(grid, dim_h);
    int added = 0;
    while (added < count) {
      const Quad q = quad(grid->n());
      if (!grid->admissible(q.in()) || !grid->admissible(q.out())) continue;
      k.add(q, mat(k.block_rows(q), k.block_cols(q), scale));
      ++added;
    }
    return k;
  }

  std::mt19937& engine() { return gen_; }

 private:
  std::mt19937 gen_;
  std::normal_distribution<double> normal_;
};

inline Mat identity_like(const Mat& m) { return Mat::Identity(m.rows(), m.cols()); }

// Dense operator of a kernel with d = 1, built entry by entry from the
// definition: an output chain k = cc + pc receives w(pm) w(cm) K(pm, cm, pc, cc)
// h(cc + cm) for every pm, cm outside k.
inline Mat epsilon_oracle(const KernelTable& k) {
  const Grid& g = *k.grid();
  if (g.d() != 1) throw InvalidArgument("epsilon_oracle: d = 1 only");
  const int dh = k.dim_h();
  Mat out = Mat::Zero(g.fock_dim(dh), g.fock_dim(dh));
  for (Chain kappa : g.chains()) {
    for (const auto& [q, blk] : k.entries()) {
      if (q.out() != kappa) continue;
      const Chain source = q.cc | q.cm;
      if (!g.admissible(source)) continue;
      const double w = g.chain_weight(q.pm) * g.chain_weight(q.cm);
      for (int a = 0; a < dh; ++a)
        for (int b = 0; b < dh; ++b)
          out(g.fock_index(kappa, dh, a, 0), g.fock_index(source, dh, b, 0)) += w * blk(a, b);
    }
  }
  return out;
}

// Adjoint with respect to the chain-weighted inner product: W^-1 T* W.
inline Mat weighted_adjoint_oracle(const Grid& grid, int dim_h, const Mat& t) {
  const RVec w = grid.weight_diagonal(dim_h);
  return w.cwiseInverse().cast<cplx>().asDiagonal() * t.adjoint() * w.cast<cplx>().asDiagonal();
}

inline Mat weighted_gram(const Grid& grid, int dim_h) {
  return grid.weight_diagonal(dim_h).cast<cplx>().asDiagonal();
}

inline TableIntegrand random_table(Rng& rng, const GridPtr& grid, int dim_h, int count, double scale = 1.0) {
  TableIntegrand b{grid, dim_h, 0, 0, {}};
  for (int i = 0; i < count; ++i) {
    const Quad q = rng.quad(grid->n());
    b.add(q, rng.mat(b.rows(q), b.cols(q), scale));
  }
  return b;
}

inline IntegrandQuadruple random_integrand(Rng& rng, const GridPtr& grid, int dim_h, double scale = 1.0) {
  IntegrandQuadruple d = IntegrandQuadruple::zero(grid, dim_h);
  for (auto& p : d.points) {
    p.pm = rng.mat(p.pm.rows(), p.pm.cols(), scale);
    p.cm = rng.mat(p.cm.rows(), p.cm.cols(), scale);
    p.pc = rng.mat(p.pc.rows(), p.pc.cols(), scale);
    p.cc = rng.mat(p.cc.rows(), p.cc.cols(), scale);
  }
  return d;
}

// Kernel-valued integrand with count random (theta, upsilon) entries.
inline MIntegrand random_m(Rng& rng, const GridPtr& grid, int dim_h, int count, double scale = 1.0) {
  MIntegrand m;
  for (int i = 0; i < count; ++i) {
    const Quad theta = rng.quad(grid->n());
    const Quad u = rng.quad(grid->n());
    const Chain free = ~theta.all();
    const Quad upsilon{u.pm & free, u.cm & free, u.pc & free, u.cc & free};
    const KernelTable shape(grid, dim_h, theta.in(), theta.out());
    add_m_entry(m, grid, dim_h, theta, upsilon,
                rng.mat(shape.block_rows(upsilon), shape.block_cols(upsilon), scale));
  }
  return m;
}

inline FockVector random_fock(Rng& rng, const GridPtr& grid, int dim_h) {
  FockVector h = FockVector::zero(grid, dim_h);
  h.data = rng.vec(h.data.size());
  return h;
}

// Random pseudo-unitary generator at mass dx from a random Hamiltonian.
inline GeneratorS random_unitary_generator(Rng& rng, const GridPtr& grid, int dim_h, double scale = 0.7) {
  const int nd = dim_h * grid->d();
  GeneratorS s{grid, dim_h, {}};
  for (int x = 0; x < grid->n(); ++x) {
    HamiltonianBlocks h{rng.hermitian(nd, scale), rng.mat(nd, dim_h, scale), rng.hermitian(dim_h, scale)};
    s.points.push_back(exp_generator(h, grid->weight(x)));
  }
  return s;
}

// Adapted counting-integral data: past roles in theta, identity on every
// other point through number legs.
inline MIntegrand adapted_m(Rng& rng, const GridPtr& grid, int dim_h, double scale = 0.5) {
  if (grid->d() != 1) throw InvalidArgument("adapted_m: d = 1 only");
  MIntegrand m;
  const Chain all = grid->full();
  for_each_subset(all, [&](Chain s) {
    if (grid->admissible(s)) add_m_entry(m, grid, dim_h, Quad{}, Quad{0, 0, 0, s}, Mat::Identity(dim_h, dim_h));
  });
  for (int x = 0; x < grid->n(); ++x) {
    for (int role = 0; role < 4; ++role) {
      Quad theta;
      Chain* slot[4] = {&theta.pm, &theta.cm, &theta.pc, &theta.cc};
      *slot[role] = point(x);
      const Mat block = rng.mat(dim_h, dim_h, scale);
      for_each_subset(all & ~point(x), [&](Chain s) {
        if (grid->admissible(s | point(x))) add_m_entry(m, grid, dim_h, theta, Quad{0, 0, 0, s}, block);
      });
    }
  }
  return m;
}

// Adds entries whose upsilon carries creation or annihilation roles, so the
// resulting process depends on the future.
inline void add_future_roles(Rng& rng, MIntegrand& m, const GridPtr& grid, int dim_h, double scale = 0.5) {
  const int last = grid->n() - 1;
  add_m_entry(m, grid, dim_h, Quad{}, Quad{0, 0, point(last), 0}, rng.mat(dim_h, dim_h, scale));
  add_m_entry(m, grid, dim_h, Quad{0, 0, point(0), 0}, Quad{0, point(last), 0, 0}, rng.mat(dim_h, dim_h, scale));
  if (last >= 2)
    add_m_entry(m, grid, dim_h, Quad{0, point(1), 0, 0}, Quad{point(last), 0, 0, 0}, rng.mat(dim_h, dim_h, scale));
}

}  // namespace qsc::testing
