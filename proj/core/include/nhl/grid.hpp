#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nhl/geometry.hpp"

namespace nhl {

// Uniform grid on a box in R^n, n in {1,2}. Nodes sit at lower + i*h per
// axis; spacing may differ between axes. Flat index is axis-0 major.
struct Grid {
  int n = 1;
  std::array<double, 2> h{1.0, 1.0};
  std::array<double, 2> lower{0.0, 0.0};
  std::array<int, 2> count{0, 1};

  Grid() = default;
  // 1D grid on [lo, hi]; (hi - lo) must be an integer multiple of spacing.
  Grid(double lo, double hi, double spacing);
  // 2D grid on [lo0, hi0] x [lo1, hi1] with common spacing.
  Grid(const Vec& lo, const Vec& hi, double spacing);

  int size() const { return count[0] * count[1]; }
  double upper(int axis) const { return lower[axis] + (count[axis] - 1) * h[axis]; }
  int flat(int ia, int ib) const { return ia * count[1] + ib; }
  Vec coord(int i) const {
    const int ia = i / count[1], ib = i % count[1];
    return {lower[0] + ia * h[0], n == 2 ? lower[1] + ib * h[1] : 0.0};
  }
  // Largest distance between two grid nodes (the box diagonal).
  double diameter() const;
  double cell_volume() const { return n == 1 ? h[0] : h[0] * h[1]; }
  bool same_layout(const Grid& other) const;

  void validate() const;
};

// Grid-sampled solution u(.,t). In full-space mode far_field holds the
// constant values (u-, u+) used beyond the box along the first axis.
struct ScalarField {
  Grid grid;
  std::vector<double> values;
  double t = 0.0;
  std::optional<std::pair<double, double>> far_field;
};

ScalarField sample_function_to_field(const std::function<double(const Vec&)>& f, const Grid& g,
                                     std::optional<std::pair<double, double>> far_field = {});

double max_abs(const ScalarField& u);
double mean(const ScalarField& u);

}  // namespace nhl
