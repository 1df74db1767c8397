#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nhl/grid.hpp"

namespace nhl {

// Sampled modulus-of-continuity profile phi(s, t) on an increasing s-grid
// starting at 0. Constructed profiles interpolate linearly between nodes;
// empirical profiles evaluate as right-continuous steps so that the defining
// pair of each bin reproduces the recorded value exactly. Beyond the resolved
// range the odd extension is constant, so eval returns far_value.
struct ModulusProfile {
  enum class Interp { linear, step };

  std::vector<double> s;
  std::vector<double> value;
  double t = 0.0;
  Interp interp = Interp::linear;
  double far_value = 1.0;

  // construction metadata
  std::string family;  // "tanh", "empirical", "evolved"
  double lambda = 0.0;
  double majorization_margin = 0.0;
  bool evolution_certified = false;  // produced by evolve_phi with a matched kernel
  std::string kernel_id;

  // empirical profiles: per-bin raw maximum and smallest observed pair
  // half-distance (used by the majorization loop)
  std::vector<double> bin_raw;
  std::vector<double> bin_min_s;

  double eval(double at) const;
  double spacing() const;  // node spacing; uniform grids only
};

struct PairScanResult {
  double max_value = 0.0;
  int i = -1, j = -1;  // argmax node indices, u(j) >= u(i)
  double t = 0.0;
  long long pairs_scanned = 0;
  bool sampled = false;
  long long pairs_overlap = 0;      // |x-y| <  2*delta (when delta given)
  long long pairs_separated = 0;    // |x-y| >= 2*delta
};

// Empirical modulus: bins all node pairs by s = |y-x|/2, takes half the
// largest |u(y)-u(x)| per bin, then applies the least non-decreasing
// majorant.
ModulusProfile empirical_modulus(const ScalarField& u, double bin_width);

// Smallest lambda in {lambda_init * 2^k} such that phi0(s) = tanh(lambda s)
// majorizes the empirical modulus of u0 bin by bin. The profile is sampled
// on [0, r_phi] at the given spacing.
ModulusProfile construct_initial_phi(const ScalarField& u0, double lambda_init, double r_phi,
                                     double node_spacing);

struct AdmissibilityReport {
  bool zero_at_origin = false;
  bool strictly_increasing = false;
  bool in_unit_range = false;
  bool tail_reaches_one = false;
  bool evolution_certified = false;
  double min_forward_difference = 0.0;
  double tail_value = 0.0;
  bool pass() const {
    return zero_at_origin && strictly_increasing && in_unit_range && tail_reaches_one;
  }
};

AdmissibilityReport check_admissible(const ModulusProfile& phi, double tail_tol = 1e-3);

// Exact maximum of Z_eps(x,y) = u(y)-u(x) - 2 phi(|y-x|/2) - eps e^{ct}(1+|x|^2+|y|^2)
// over ordered node pairs (x = y included). Exhaustive up to 10^7 pairs;
// larger grids use distance-stratified sampling plus an exhaustive scan of a
// coarse sublattice, both driven by the seed.
PairScanResult z_epsilon_max(const ScalarField& u, const ModulusProfile& phi, double eps,
                             double c = 1.0, std::uint64_t seed = 0);

struct SnapshotVerdict {
  double t = 0.0;
  double margin = 0.0;  // max over distinct pairs of |u(y)-u(x)| - 2 phi(|y-x|/2)
  int margin_i = -1, margin_j = -1;
  std::vector<double> z_max;  // per epsilon
  long long pairs_scanned = 0;
  bool sampled = false;
  long long pairs_overlap = 0, pairs_separated = 0;
};

struct PreservationReport {
  bool pass = false;
  double tol_num = 0.0;
  std::vector<double> eps_list;
  double c = 1.0;
  std::vector<SnapshotVerdict> snapshots;
  double worst_margin = 0.0;
  double worst_margin_t = 0.0;
  double worst_z = 0.0;  // max over snapshots and epsilons
};

// Per matched snapshot: margin and max Z_eps for every epsilon. Passes when
// every margin is <= tol_num and every Z_eps maximum is strictly negative.
PreservationReport verify_preservation(const std::vector<ScalarField>& traj_u,
                                       const std::vector<ModulusProfile>& traj_phi,
                                       const std::vector<double>& eps_list, double c,
                                       double tol_num, std::uint64_t seed = 0,
                                       std::optional<double> indicator_delta = {});

}  // namespace nhl
