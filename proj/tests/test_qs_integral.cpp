#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qsc/qs_integral.hpp"

using namespace qsc;
using qsc::testing::random_fock;
using qsc::testing::random_integrand;
using qsc::testing::random_m;
using qsc::testing::random_table;
using qsc::testing::Rng;

namespace {

GridPtr grid3(int d = 1, int n_max = -1) { return make_grid({0.1, 0.3, 0.7}, {0.2, 0.5, 0.3}, d, n_max); }

Mat id(Index n) { return Mat::Identity(n, n); }

}  // namespace

TEST(LambdaMeasure, CreationOnVacuumMatchesFirstOrderExponential) {
  auto g = make_grid({0.1, 0.2}, {0.5, 0.25});
  const Index dim = g->fock_dim(1);
  const std::vector<cplx> k{cplx(0.3, 0.1), cplx(-0.7, 0.4)};
  IntegrandQuadruple d = IntegrandQuadruple::zero(g, 1);
  for (int x = 0; x < 2; ++x) d.points[x].pc = k[x] * id(dim);
  const FockVector vac = FockVector::vacuum(g, Vec::Ones(1));
  const FockVector out = lambda_measure(MeasureKind::creation, d, g->full(), vac);
  const FockVector ev = exp_vector(g, {Vec::Constant(1, k[0]), Vec::Constant(1, k[1])});
  for (Chain c : g->chains()) {
    const cplx want = chain_size(c) == 1 ? ev.data(g->fock_index(c, 1, 0, 0)) : cplx(0.0);
    EXPECT_EQ(out.data(g->fock_index(c, 1, 0, 0)), want) << "chain " << c;
  }
}

TEST(LambdaMeasure, AnnihilationKillsVacuum) {
  Rng rng(70);
  auto g = grid3();
  const IntegrandQuadruple d = random_integrand(rng, g, 2);
  const FockVector vac = FockVector::vacuum(g, rng.vec(2));
  EXPECT_EQ(max_abs(lambda_measure(MeasureKind::annihilation, d, g->full(), vac).data), 0.0);
  EXPECT_EQ(max_abs(lambda_measure(MeasureKind::exchange, d, g->full(), vac).data), 0.0);
}

TEST(LambdaMeasure, ScalarPreservation) {
  Rng rng(71);
  auto g = grid3();
  IntegrandQuadruple d = IntegrandQuadruple::zero(g, 1);
  const cplx c(1.5, -0.25);
  for (auto& p : d.points) p.pm = c * id(p.pm.rows());
  const FockVector h = random_fock(rng, g, 1);
  const Chain delta = point(0) | point(2);
  const FockVector out = lambda_measure(MeasureKind::preservation, d, delta, h);
  EXPECT_LE(max_abs(Vec(out.data - c * (0.2 + 0.3) * h.data)), 1e-15);
}

TEST(SingleIntegral, ZeroIntegrand) {
  auto g = grid3();
  EXPECT_EQ(max_abs(single_integral_matrix(IntegrandQuadruple::zero(g, 2), 1.0)), 0.0);
}

TEST(SingleIntegral, WienerIntegralIsSelfAdjoint) {
  auto g = grid3();
  IntegrandQuadruple d = IntegrandQuadruple::zero(g, 1);
  for (auto& p : d.points) {
    p.cm = id(p.cm.rows());
    p.pc = id(p.pc.rows());
  }
  const Mat w = single_integral_matrix(d, 1.0);
  EXPECT_GT(max_abs(w), 0.0);
  EXPECT_LE(max_abs(Mat(w - weighted_adjoint(*g, 1, w))), 1e-15);
}

TEST(SingleIntegral, CutIsStrict) {
  Rng rng(72);
  auto g = grid3();
  const IntegrandQuadruple d = random_integrand(rng, g, 1);
  EXPECT_EQ(max_abs(single_integral_matrix(d, 0.1)), 0.0);
  const Mat first = one_point_term(*g, 1, 0, d.points[0]);
  EXPECT_EQ(max_abs(Mat(single_integral_matrix(d, 0.3) - first)), 0.0);
}

TEST(MultipleIntegral, ConstantTableOnly) {
  Rng rng(73);
  auto g = grid3();
  TableIntegrand b{g, 2, 0, 0, {}};
  const Mat t0 = rng.mat(g->fock_dim(2), g->fock_dim(2));
  b.add(Quad{}, t0);
  EXPECT_EQ(max_abs(Mat(multiple_integral_matrix(b, 1.0) - t0)), 0.0);
}

TEST(MultipleIntegral, AtomicTablesReduceToSingleIntegral) {
  Rng rng(74);
  for (int d : {1, 2}) {
    auto g = grid3(d);
    const IntegrandQuadruple q = random_integrand(rng, g, 2);
    for (double t : {0.2, 0.5, 1.0})
      EXPECT_LE(max_abs(Mat(multiple_integral_matrix(atomic_table(q), t) - single_integral_matrix(q, t))), 1e-13);
  }
}

TEST(MultipleIntegral, AdjointRule) {
  Rng rng(75);
  for (int d : {1, 2})
    for (int n_max : {-1, 2}) {
      auto g = grid3(d, n_max);
      for (int trial = 0; trial < 5; ++trial) {
        const TableIntegrand b = random_table(rng, g, 2, 12);
        const Mat i = multiple_integral_matrix(b, 0.8);
        EXPECT_LE(max_abs(Mat(multiple_integral_matrix(table_star(b), 0.8) - weighted_adjoint(*g, 2, i))), 1e-12);
      }
    }
}

TEST(MultipleIntegral, AdjointOnVectors) {
  Rng rng(76);
  auto g = grid3();
  const TableIntegrand b = random_table(rng, g, 2, 12);
  const FockVector f = random_fock(rng, g, 2), h = random_fock(rng, g, 2);
  const cplx lhs = inner(f, multiple_integral(b, 1.0, h));
  const cplx rhs = inner(multiple_integral(table_star(b), 1.0, f), h);
  EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
}

TEST(Derivatives, AtomicTableGivesItsBlocks) {
  Rng rng(77);
  auto g = grid3(2);
  const IntegrandQuadruple q = random_integrand(rng, g, 1);
  const IntegrandQuadruple d = qs_derivatives(atomic_table(q));
  for (int x = 0; x < g->n(); ++x) {
    EXPECT_EQ(max_abs(Mat(d.points[x].pm - q.points[x].pm)), 0.0);
    EXPECT_EQ(max_abs(Mat(d.points[x].cm - q.points[x].cm)), 0.0);
    EXPECT_EQ(max_abs(Mat(d.points[x].pc - q.points[x].pc)), 0.0);
    EXPECT_EQ(max_abs(Mat(d.points[x].cc - q.points[x].cc)), 0.0);
  }
}

TEST(Derivatives, Reconstruction) {
  Rng rng(78);
  for (int d : {1, 2})
    for (int n_max : {-1, 2}) {
      auto g = grid3(d, n_max);
      for (int trial = 0; trial < 5; ++trial) {
        const TableIntegrand b = random_table(rng, g, 2, 12);
        const IntegrandQuadruple der = qs_derivatives(b);
        for (double t : {0.2, 0.5, 1.0}) {
          const Mat rec = table_constant(b) + single_integral_matrix(der, t);
          EXPECT_LE(max_abs(Mat(rec - multiple_integral_matrix(b, t))), 1e-12);
        }
      }
    }
}

TEST(CountingIntegral, BeforeAllPointsKeepsEmptyTheta) {
  Rng rng(79);
  auto g = grid3();
  MIntegrand m = random_m(rng, g, 2, 10);
  qsc::add_m_entry(m, g, 2, Quad{}, Quad{point(1), 0, 0, 0}, rng.mat(2, 2));
  EXPECT_EQ(kernel_distance(counting_integral(m, g, 2, 0.05), m.at(Quad{})), 0.0);
}

TEST(CountingIntegral, AtomicInsertions) {
  auto g = make_grid({0.1, 0.2}, {0.5, 0.25});
  MIntegrand m;
  Mat a(1, 1), b(1, 1);
  a << 2.0;
  b << 3.0;
  add_m_entry(m, g, 1, Quad{0, 0, point(0), 0}, Quad{}, a);
  add_m_entry(m, g, 1, Quad{point(1), 0, 0, 0}, Quad{}, b);
  const KernelTable k = counting_integral(m, g, 1, 1.0);
  EXPECT_EQ(k.size(), 2u);
  EXPECT_EQ((*k.find(Quad{0, 0, point(0), 0}))(0, 0), cplx(2.0));
  EXPECT_EQ((*k.find(Quad{point(1), 0, 0, 0}))(0, 0), cplx(3.0));
  EXPECT_EQ(counting_integral(m, g, 1, 0.15).size(), 1u);
}

TEST(CountingIntegral, IntertwinesWithEpsilon) {
  Rng rng(80);
  for (int d : {1, 2})
    for (int n_max : {-1, 2}) {
      auto g = grid3(d, n_max);
      for (int trial = 0; trial < 5; ++trial) {
        const MIntegrand m = random_m(rng, g, 2, 15);
        for (double t : {0.2, 0.5, 1.0}) {
          const Mat lhs = epsilon(counting_integral(m, g, 2, t));
          const Mat rhs = multiple_integral_matrix(epsilon_table(m, g, 2), t);
          EXPECT_LE(max_abs(Mat(lhs - rhs)), 1e-12);
        }
      }
    }
}

TEST(NormEstimate, ZeroTable) {
  auto g = grid3();
  const RVec w = RVec::Constant(3, 1.5);
  const NormEstimate e = table_norm_estimate(TableIntegrand{g, 1, 0, 0, {}}, w, w, w, 1.0);
  EXPECT_EQ(e.bound, 0.0);
  EXPECT_EQ(e.measured, 0.0);
}

TEST(NormEstimate, Homogeneity) {
  Rng rng(81);
  auto g = grid3();
  const TableIntegrand b = random_table(rng, g, 1, 10);
  TableIntegrand b2{g, 1, 0, 0, {}};
  for (const auto& [q, blk] : b.blocks) b2.add(q, 2.0 * blk);
  const RVec p = RVec::Constant(3, 1.3), r = RVec::Constant(3, 0.7), s = RVec::Constant(3, 2.0);
  const NormEstimate e1 = table_norm_estimate(b, p, r, s, 1.0), e2 = table_norm_estimate(b2, p, r, s, 1.0);
  EXPECT_NEAR(e2.bound, 2.0 * e1.bound, 1e-12 * e1.bound);
  EXPECT_NEAR(e2.measured, 2.0 * e1.measured, 1e-12 * e1.measured);
}

TEST(NormEstimate, BoundDominatesOnRandomTables) {
  Rng rng(82);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = grid3(trial % 2 == 0 ? 1 : 2);
    const TableIntegrand b = random_table(rng, g, 2, 10);
    RVec p(3), r(3), s(3);
    for (int x = 0; x < 3; ++x) {
      p(x) = rng.uniform(1.0, 3.0);
      r(x) = rng.uniform(0.3, 2.0);
      s(x) = rng.uniform(0.3, 2.0);
    }
    const NormEstimate e = table_norm_estimate(b, p, r, s, rng.uniform(0.0, 1.0));
    EXPECT_LE(e.measured, e.bound * (1 + 1e-12));
  }
}

TEST(NormEstimate, SingleIntegralBoundDominates) {
  Rng rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = grid3();
    const IntegrandQuadruple d = random_integrand(rng, g, 1);
    const RVec p = RVec::Constant(3, rng.uniform(1.0, 3.0)), r = RVec::Constant(3, rng.uniform(0.3, 2.0)),
               s = RVec::Constant(3, rng.uniform(0.3, 2.0));
    const NormEstimate e = single_norm_estimate(d, p, r, s, 1.0);
    EXPECT_LE(e.measured, e.bound * (1 + 1e-12));
  }
}
