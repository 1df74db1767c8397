#pragma once

#include <string>
#include <vector>

#include "nhl/grid.hpp"
#include "nhl/kernels.hpp"

namespace nhl {

enum class OperatorMode { full_space, regional };

std::string to_string(OperatorMode m);

// Midpoint-rule discretization of Lu(x) = ∫ rho(z-x)(u(z)-u(x)) dz on a
// uniform grid. Weights w_ij = rho(x_j - x_i) * cell_volume are translation
// invariant, so a single symmetric stencil is stored.
//
// full_space mode: kernel mass beyond the box along the first axis couples
// each row to the field's far-field constants (u-, u+); in 2D, targets that
// leave the box transversally are clamped to the nearest in-box node
// (constant transverse extension). Constants are annihilated exactly.
//
// regional mode: integration is truncated at the domain boundary; no tail
// terms exist.
class DiscreteOperator {
 public:
  struct Entry {
    int da, db;
    double w;
  };

  OperatorMode mode() const { return mode_; }
  const Grid& grid() const { return grid_; }
  const std::vector<Entry>& stencil() const { return stencil_; }
  double row_mass(int i) const { return row_mass_[i]; }
  double max_row_mass() const { return max_row_mass_; }
  double tail_left(int i) const { return mode_ == OperatorMode::full_space ? tail_left_[i] : 0.0; }
  double tail_right(int i) const { return mode_ == OperatorMode::full_space ? tail_right_[i] : 0.0; }
  const std::string& describe() const { return desc_; }

  // (Lu)_i = sum_j w_ij (u_j - u_i) + tail terms. Rates are written into
  // `rate`, resized as needed.
  void apply_into(const ScalarField& u, std::vector<double>& rate) const;
  ScalarField apply(const ScalarField& u) const;

  // Coupling weight between two nodes (tests / small grids only).
  double weight(int i, int j) const;

  friend DiscreteOperator assemble_operator(const RadialKernel& k, const Grid& g,
                                            OperatorMode mode);
  friend DiscreteOperator assemble_operator(const MarginalKernel1D& k, const Grid& g,
                                            OperatorMode mode);

 private:
  void build(const Grid& g, OperatorMode mode, const std::function<double(double)>& profile,
             double reach, const std::function<double(double)>& tail_mass,
             const std::string& desc);

  OperatorMode mode_ = OperatorMode::full_space;
  Grid grid_;
  std::vector<Entry> stencil_;
  double remainder_mass_ = 0.0;
  std::vector<double> row_mass_;
  std::vector<double> tail_left_, tail_right_;
  double max_row_mass_ = 0.0;
  std::string desc_;
};

DiscreteOperator assemble_operator(const RadialKernel& k, const Grid& g, OperatorMode mode);
DiscreteOperator assemble_operator(const MarginalKernel1D& k, const Grid& g, OperatorMode mode);

ScalarField apply_operator(const DiscreteOperator& op, const ScalarField& u);

}  // namespace nhl
