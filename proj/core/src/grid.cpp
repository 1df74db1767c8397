#include "nhl/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nhl {

namespace {

int axis_count(double lo, double hi, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("grid: spacing must be > 0");
  if (!(hi > lo)) throw std::invalid_argument("grid: upper bound must exceed lower bound");
  const double steps = (hi - lo) / spacing;
  const auto k = static_cast<int>(std::llround(steps));
  if (std::abs(steps - k) > 1e-9 * std::max(1.0, std::abs(steps)))
    throw std::invalid_argument("grid: bounds are not an integer multiple of the spacing");
  return k + 1;
}

}  // namespace

Grid::Grid(double lo, double hi, double spacing) {
  n = 1;
  h = {spacing, spacing};
  lower = {lo, 0.0};
  count = {axis_count(lo, hi, spacing), 1};
  validate();
}

Grid::Grid(const Vec& lo, const Vec& hi, double spacing) {
  n = 2;
  h = {spacing, spacing};
  lower = lo;
  count = {axis_count(lo[0], hi[0], spacing), axis_count(lo[1], hi[1], spacing)};
  validate();
}

double Grid::diameter() const {
  const double d0 = (count[0] - 1) * h[0];
  if (n == 1) return d0;
  return std::hypot(d0, (count[1] - 1) * h[1]);
}

bool Grid::same_layout(const Grid& other) const {
  if (n != other.n) return false;
  for (int a = 0; a < n; ++a) {
    if (count[a] != other.count[a]) return false;
    if (std::abs(h[a] - other.h[a]) > 1e-12 * h[a]) return false;
    if (std::abs(lower[a] - other.lower[a]) > 1e-9 * h[a]) return false;
  }
  return true;
}

void Grid::validate() const {
  if (n != 1 && n != 2) throw std::invalid_argument("grid: dimension must be 1 or 2");
  for (int a = 0; a < n; ++a) {
    if (!(h[a] > 0.0)) throw std::invalid_argument("grid: spacing must be > 0");
    if (count[a] < 3) throw std::invalid_argument("grid: need at least 3 points per axis");
  }
  if (n == 1 && count[1] != 1) throw std::invalid_argument("grid: 1D grid must have count[1] == 1");
}

ScalarField sample_function_to_field(const std::function<double(const Vec&)>& f, const Grid& g,
                                     std::optional<std::pair<double, double>> far_field) {
  g.validate();
  ScalarField u;
  u.grid = g;
  u.t = 0.0;
  u.far_field = far_field;
  u.values.resize(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const double v = f(g.coord(i));
    if (!std::isfinite(v))
      throw std::runtime_error("sample_function_to_field: non-finite sample at node " +
                               std::to_string(i));
    u.values[i] = v;
  }
  return u;
}

double max_abs(const ScalarField& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

double mean(const ScalarField& u) {
  double acc = 0.0;
  for (double v : u.values) acc += v;
  return acc / static_cast<double>(u.values.size());
}

}  // namespace nhl
