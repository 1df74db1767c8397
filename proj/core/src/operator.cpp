#include "nhl/operator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace nhl {

std::string to_string(OperatorMode m) {
  return m == OperatorMode::full_space ? "full_space" : "regional";
}

void DiscreteOperator::build(const Grid& g, OperatorMode mode,
                             const std::function<double(double)>& profile, double reach,
                             const std::function<double(double)>& tail_mass,
                             const std::string& desc) {
  g.validate();
  mode_ = mode;
  grid_ = g;
  desc_ = desc;

  const int n0 = g.count[0], n1 = g.count[1];
  const double vol = g.cell_volume();
  const bool two_d = g.n == 2;

  // Lattice reach per axis, capped at the box span: beyond the span every
  // target lies outside the box from every row, so that mass is carried by
  // the analytic remainder instead.
  auto cap = [&](double spacing, int span) {
    if (!std::isfinite(reach)) return span;
    const auto k = static_cast<long long>(std::ceil(reach / spacing - 1e-12));
    return static_cast<int>(std::min<long long>(k, span));
  };
  const int ka = cap(g.h[0], n0);
  const int kb = two_d ? cap(g.h[1], n1) : 0;

  stencil_.clear();
  for (int da = -ka; da <= ka; ++da) {
    for (int db = -kb; db <= kb; ++db) {
      if (da == 0 && db == 0) continue;
      const double r = two_d ? std::hypot(da * g.h[0], db * g.h[1]) : std::abs(da * g.h[0]);
      const double w = profile(r) * vol;
      if (w > 0.0 && std::isfinite(w)) stencil_.push_back({da, db, w});
    }
  }
  if (stencil_.empty()) throw std::runtime_error("kernel unresolved by grid");

  // Mass beyond the covered radius, carried into the far-field tails
  // (full_space mode only; the regional operator never sees it).
  const double covered =
      two_d ? std::min((ka + 0.5) * g.h[0], (kb + 0.5) * g.h[1]) : (ka + 0.5) * g.h[0];
  remainder_mass_ = 0.0;
  if (mode == OperatorMode::full_space && covered < reach)
    remainder_mass_ = std::max(tail_mass(covered), 0.0);

  const int size = g.size();
  row_mass_.assign(size, 0.0);
  if (mode == OperatorMode::full_space) {
    tail_left_.assign(size, 0.5 * remainder_mass_);
    tail_right_.assign(size, 0.5 * remainder_mass_);
  }

  for (int ia = 0; ia < n0; ++ia) {
    for (int ib = 0; ib < n1; ++ib) {
      const int i = ia * n1 + ib;
      double m = 0.0, tl = 0.0, tr = 0.0;
      for (const Entry& e : stencil_) {
        const int ja = ia + e.da;
        if (ja < 0) {
          tl += e.w;
          continue;
        }
        if (ja >= n0) {
          tr += e.w;
          continue;
        }
        if (two_d && mode == OperatorMode::regional) {
          const int jb = ib + e.db;
          if (jb < 0 || jb >= n1) continue;  // truncated at the boundary
        }
        m += e.w;
      }
      if (mode == OperatorMode::full_space) {
        tail_left_[i] += tl;
        tail_right_[i] += tr;
        row_mass_[i] = m + tail_left_[i] + tail_right_[i];
      } else {
        row_mass_[i] = m;
      }
    }
  }
  max_row_mass_ = *std::max_element(row_mass_.begin(), row_mass_.end());
}

void DiscreteOperator::apply_into(const ScalarField& u, std::vector<double>& rate) const {
  if (!u.grid.same_layout(grid_))
    throw std::invalid_argument("apply_operator: field grid does not match operator grid");
  if (mode_ == OperatorMode::full_space && !u.far_field)
    throw std::invalid_argument("apply_operator: full-space operator requires far-field values");

  const int n0 = grid_.count[0], n1 = grid_.count[1];
  const bool two_d = grid_.n == 2;
  const bool full = mode_ == OperatorMode::full_space;
  const double um = full ? u.far_field->first : 0.0;
  const double up = full ? u.far_field->second : 0.0;
  const double* v = u.values.data();

  rate.assign(u.values.size(), 0.0);
  for (int ia = 0; ia < n0; ++ia) {
    for (int ib = 0; ib < n1; ++ib) {
      const int i = ia * n1 + ib;
      const double ui = v[i];
      double acc = 0.0;
      for (const Entry& e : stencil_) {
        const int ja = ia + e.da;
        if (ja < 0 || ja >= n0) continue;  // covered by tails in full_space mode
        int jb = ib + e.db;
        if (two_d) {
          if (jb < 0 || jb >= n1) {
            if (!full) continue;
            jb = jb < 0 ? 0 : n1 - 1;  // constant transverse extension
          }
        } else {
          jb = 0;
        }
        acc += e.w * (v[ja * n1 + jb] - ui);
      }
      if (full) acc += tail_left_[i] * (um - ui) + tail_right_[i] * (up - ui);
      rate[i] = acc;
    }
  }
}

ScalarField DiscreteOperator::apply(const ScalarField& u) const {
  ScalarField out;
  out.grid = u.grid;
  out.t = u.t;
  apply_into(u, out.values);
  return out;
}

double DiscreteOperator::weight(int i, int j) const {
  const int n1 = grid_.count[1];
  const int ia = i / n1, ib = i % n1;
  const int ja = j / n1, jb = j % n1;
  for (const Entry& e : stencil_)
    if (e.da == ja - ia && e.db == jb - ib) return e.w;
  return 0.0;
}

DiscreteOperator assemble_operator(const RadialKernel& k, const Grid& g, OperatorMode mode) {
  if (k.dimension() != g.n)
    throw std::invalid_argument("assemble_operator: kernel dimension does not match grid");
  DiscreteOperator op;
  op.build(
      g, mode, [&k](double r) { return k.profile(r); }, k.reach(),
      [&k](double r) { return k.tail_mass(r); }, to_string(mode) + " " + k.describe());
  return op;
}

DiscreteOperator assemble_operator(const MarginalKernel1D& k, const Grid& g, OperatorMode mode) {
  if (g.n != 1)
    throw std::invalid_argument("assemble_operator: marginal kernels are one-dimensional");
  DiscreteOperator op;
  op.build(
      g, mode, [&k](double w) { return k.eval(w); }, k.reach(),
      [&k](double r) { return k.tail_mass(r); }, to_string(mode) + " " + k.describe());
  return op;
}

ScalarField apply_operator(const DiscreteOperator& op, const ScalarField& u) {
  return op.apply(u);
}

}  // namespace nhl
