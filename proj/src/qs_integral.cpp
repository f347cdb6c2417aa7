#include "qsc/qs_integral.hpp"

#include <array>
#include <cmath>

namespace qsc {

IntegrandQuadruple IntegrandQuadruple::zero(const GridPtr& grid, int dim_h) {
  IntegrandQuadruple q;
  q.grid = grid;
  q.dim_h = dim_h;
  const Index dim = grid->fock_dim(dim_h);
  const Index dd = dim * grid->d();
  q.points.assign(static_cast<std::size_t>(grid->n()),
                  PointIntegrand{Mat::Zero(dim, dim), Mat::Zero(dim, dd), Mat::Zero(dd, dim), Mat::Zero(dd, dd)});
  return q;
}

void IntegrandQuadruple::validate() const {
  if (!grid) throw InvalidArgument("IntegrandQuadruple: grid required");
  if (static_cast<int>(points.size()) != grid->n())
    throw InvalidArgument("IntegrandQuadruple: one entry per grid point required");
  const Index dim = grid->fock_dim(dim_h);
  const Index dd = dim * grid->d();
  for (const auto& p : points) {
    if (p.pm.rows() != dim || p.pm.cols() != dim || p.cm.rows() != dim || p.cm.cols() != dd ||
        p.pc.rows() != dd || p.pc.cols() != dim || p.cc.rows() != dd || p.cc.cols() != dd)
      throw InvalidArgument("IntegrandQuadruple: block shape mismatch");
  }
}

Mat one_point_term(const Grid& grid, int dim_h, int x, const PointIntegrand& d) {
  const Mat a = annihilation_matrix(grid, dim_h, point(x));
  const Mat ad = a.transpose();
  const double w = grid.weight(x);
  return w * d.pm + w * d.cm * a + ad * d.pc + ad * d.cc * a;
}

Mat lambda_measure_matrix(MeasureKind kind, const IntegrandQuadruple& d, Chain delta) {
  d.validate();
  const Grid& grid = *d.grid;
  const Index dim = grid.fock_dim(d.dim_h);
  Mat out = Mat::Zero(dim, dim);
  for (int x : chain_points(delta & grid.full())) {
    const PointIntegrand& p = d.points[static_cast<std::size_t>(x)];
    const double w = grid.weight(x);
    switch (kind) {
      case MeasureKind::preservation:
        out += w * p.pm;
        break;
      case MeasureKind::creation:
        out += creation_matrix(grid, d.dim_h, point(x)) * p.pc;
        break;
      case MeasureKind::annihilation:
        out += w * p.cm * annihilation_matrix(grid, d.dim_h, point(x));
        break;
      case MeasureKind::exchange: {
        const Mat a = annihilation_matrix(grid, d.dim_h, point(x));
        out += a.transpose() * p.cc * a;
        break;
      }
    }
  }
  return out;
}

FockVector lambda_measure(MeasureKind kind, const IntegrandQuadruple& d, Chain delta, const FockVector& h) {
  FockVector out = FockVector::zero(h.grid, h.dim_h);
  out.data = lambda_measure_matrix(kind, d, delta) * h.data;
  return out;
}

Mat single_integral_matrix(const IntegrandQuadruple& d, double t) {
  d.validate();
  const Grid& grid = *d.grid;
  const Index dim = grid.fock_dim(d.dim_h);
  Mat out = Mat::Zero(dim, dim);
  for (int x : chain_points(grid.before(t)))
    out += one_point_term(grid, d.dim_h, x, d.points[static_cast<std::size_t>(x)]);
  return out;
}

FockVector single_integral(const IntegrandQuadruple& d, double t, const FockVector& h) {
  FockVector out = FockVector::zero(h.grid, h.dim_h);
  out.data = single_integral_matrix(d, t) * h.data;
  return out;
}

Index TableIntegrand::rows(const Quad& q) const {
  return grid->fock_dim(dim_h) * ipow(grid->d(), chain_size(q.out()) + extra_out);
}

Index TableIntegrand::cols(const Quad& q) const {
  return grid->fock_dim(dim_h) * ipow(grid->d(), chain_size(q.in()) + extra_in);
}

void TableIntegrand::add(const Quad& q, const Mat& block) {
  if (!q.disjoint()) throw InvalidArgument("TableIntegrand: chains of a table must be disjoint");
  if (q.all() & ~grid->full()) throw InvalidArgument("TableIntegrand: chain outside the grid");
  if (block.rows() != rows(q) || block.cols() != cols(q))
    throw InvalidArgument("TableIntegrand: block shape mismatch");
  auto it = blocks.find(q);
  if (it == blocks.end())
    blocks.emplace(q, block);
  else
    it->second += block;
}

Mat multiple_integral_matrix(const TableIntegrand& b, double t) {
  const Grid& grid = *b.grid;
  const Index dim = grid.fock_dim(b.dim_h);
  const Chain past = grid.before(t);
  const Mat eye_in = Mat::Identity(ipow(grid.d(), b.extra_in), ipow(grid.d(), b.extra_in));
  const Mat eye_out = Mat::Identity(ipow(grid.d(), b.extra_out), ipow(grid.d(), b.extra_out));
  Mat out = Mat::Zero(dim * eye_out.rows(), dim * eye_in.rows());
  for (const auto& [q, blk] : b.blocks) {
    if (q.all() & ~past) continue;
    const double w = grid.chain_weight(q.pm) * grid.chain_weight(q.cm);
    const Mat left = kron(creation_matrix(grid, b.dim_h, q.out()), eye_out);
    const Mat right = kron(annihilation_matrix(grid, b.dim_h, q.in()), eye_in);
    out += w * (left * blk * right);
  }
  return out;
}

FockVector multiple_integral(const TableIntegrand& b, double t, const FockVector& h) {
  if (b.extra_in || b.extra_out) throw InvalidArgument("multiple_integral: integrand has extra legs");
  FockVector out = FockVector::zero(h.grid, h.dim_h);
  out.data = multiple_integral_matrix(b, t) * h.data;
  return out;
}

TableIntegrand table_star(const TableIntegrand& b) {
  TableIntegrand s{b.grid, b.dim_h, b.extra_out, b.extra_in, {}};
  for (const auto& [q, blk] : b.blocks) {
    Quad r = q;
    std::swap(r.cm, r.pc);
    const int out_legs = chain_size(q.out()) + b.extra_out;
    const int in_legs = chain_size(q.in()) + b.extra_in;
    s.add(r, weighted_adjoint(*b.grid, b.dim_h, blk, out_legs, in_legs));
  }
  return s;
}

TableIntegrand atomic_table(const IntegrandQuadruple& d) {
  d.validate();
  TableIntegrand b{d.grid, d.dim_h, 0, 0, {}};
  for (int x = 0; x < d.grid->n(); ++x) {
    const PointIntegrand& p = d.points[static_cast<std::size_t>(x)];
    b.add(Quad{point(x), 0, 0, 0}, p.pm);
    b.add(Quad{0, point(x), 0, 0}, p.cm);
    b.add(Quad{0, 0, point(x), 0}, p.pc);
    b.add(Quad{0, 0, 0, point(x)}, p.cc);
  }
  return b;
}

PointIntegrand qs_derivative_at(const TableIntegrand& b, int x) {
  if (b.extra_in || b.extra_out) throw InvalidArgument("qs_derivatives: integrand has extra legs");
  const Grid& grid = *b.grid;
  if (x < 0 || x >= grid.n()) throw InvalidArgument("qs_derivatives: point outside the grid");
  const Chain px = point(x);
  const Chain earlier = px - 1;
  TableIntegrand parts[4] = {{b.grid, b.dim_h, 0, 0, {}},
                             {b.grid, b.dim_h, 1, 0, {}},
                             {b.grid, b.dim_h, 0, 1, {}},
                             {b.grid, b.dim_h, 1, 1, {}}};
  // x is the latest point of every contributing table, so its leg is already
  // the innermost one and the block carries over unchanged.
  for (const auto& [q, blk] : b.blocks) {
    if (!(q.all() & px) || ((q.all() & ~px) & ~earlier)) continue;
    Quad r{q.pm & ~px, q.cm & ~px, q.pc & ~px, q.cc & ~px};
    const int role = (q.pm & px) ? 0 : (q.cm & px) ? 1 : (q.pc & px) ? 2 : 3;
    parts[role].add(r, blk);
  }
  const double t = grid.time(x);
  return {multiple_integral_matrix(parts[0], t), multiple_integral_matrix(parts[1], t),
          multiple_integral_matrix(parts[2], t), multiple_integral_matrix(parts[3], t)};
}

IntegrandQuadruple qs_derivatives(const TableIntegrand& b) {
  IntegrandQuadruple d;
  d.grid = b.grid;
  d.dim_h = b.dim_h;
  for (int x = 0; x < b.grid->n(); ++x) d.points.push_back(qs_derivative_at(b, x));
  return d;
}

Mat table_constant(const TableIntegrand& b) {
  auto it = b.blocks.find(Quad{});
  if (it != b.blocks.end()) return it->second;
  const Index dim = b.grid->fock_dim(b.dim_h);
  return Mat::Zero(dim * ipow(b.grid->d(), b.extra_out), dim * ipow(b.grid->d(), b.extra_in));
}

void add_m_entry(MIntegrand& m, const GridPtr& grid, int dim_h, const Quad& theta, const Quad& upsilon,
                 const Mat& block) {
  if (!theta.disjoint()) throw InvalidArgument("M integrand: table chains must be disjoint");
  if (theta.all() & upsilon.all()) throw InvalidArgument("M integrand: kernel argument overlaps the table");
  auto it = m.find(theta);
  if (it == m.end()) it = m.emplace(theta, KernelTable(grid, dim_h, theta.in(), theta.out())).first;
  it->second.add(upsilon, block);
}

namespace {

void require_m_space(const MIntegrand& m, const GridPtr& grid, int dim_h) {
  for (const auto& [theta, k] : m) {
    if (!k.grid()->same_as(*grid) || k.dim_h() != dim_h)
      throw InvalidArgument("M integrand: kernel lives on a different space");
    if (k.in_extra() != theta.in() || k.out_extra() != theta.out())
      throw InvalidArgument("M integrand: kernel legs do not match its table");
    for (const auto& [u, blk] : k.entries())
      if (u.all() & theta.pm) throw InvalidArgument("M integrand: kernel argument overlaps the table");
  }
}

}  // namespace

KernelTable counting_integral(const MIntegrand& m, const GridPtr& grid, int dim_h, double t) {
  require_m_space(m, grid, dim_h);
  const Chain past = grid->before(t);
  KernelTable out(grid, dim_h);
  for (const auto& [theta, k] : m) {
    if (theta.all() & ~past) continue;
    for (const auto& [u, blk] : k.entries())
      out.add(Quad{theta.pm | u.pm, theta.cm | u.cm, theta.pc | u.pc, theta.cc | u.cc}, blk);
  }
  return out;
}

TableIntegrand epsilon_table(const MIntegrand& m, const GridPtr& grid, int dim_h) {
  require_m_space(m, grid, dim_h);
  TableIntegrand b{grid, dim_h, 0, 0, {}};
  for (const auto& [theta, k] : m) b.add(theta, epsilon(k));
  return b;
}

NormEstimate table_norm_estimate(const TableIntegrand& b, const WeightFunction& p, const WeightFunction& r,
                                 const WeightFunction& s, double t) {
  const Grid& grid = *b.grid;
  require_weight(grid, p, "table_norm_estimate");
  require_weight(grid, r, "table_norm_estimate");
  require_weight(grid, s, "table_norm_estimate");
  const Chain past = grid.before(t);
  std::map<std::array<Chain, 3>, double> sup_n;
  for (const auto& [q, blk] : b.blocks) {
    if (q.all() & ~past) continue;
    const int out_legs = chain_size(q.out()) + b.extra_out;
    const int in_legs = chain_size(q.in()) + b.extra_in;
    const double v = grid.product(s, q.cc) * q_norm(grid, b.dim_h, blk, p, out_legs, in_legs);
    auto& slot = sup_n[{q.pm, q.pc, q.cm}];
    slot = std::max(slot, v);
  }
  std::map<Chain, double> inner;
  for (const auto& [key, v] : sup_n) {
    const Chain ca = key[1] | key[2];
    inner[key[0]] += grid.chain_weight(ca) * v * v * grid.product(r, ca);
  }
  NormEstimate e;
  for (const auto& [pm, sum] : inner) e.bound += grid.chain_weight(pm) * std::sqrt(sum);
  const RVec q = (r.cwiseInverse() + p + s.cwiseInverse()).eval();
  e.measured = q_norm(grid, b.dim_h, multiple_integral_matrix(b, t), q, b.extra_out, b.extra_in);
  return e;
}

NormEstimate single_norm_estimate(const IntegrandQuadruple& d, const WeightFunction& p,
                                  const WeightFunction& r, const WeightFunction& s, double t) {
  return table_norm_estimate(atomic_table(d), p, r, s, t);
}

}  // namespace qsc
