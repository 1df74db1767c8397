#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhl/modulus.hpp"
#include "nhl/operator.hpp"

namespace nhl {

enum class Scheme { euler, rk4 };

std::string to_string(Scheme s);

// Non-linear forcing q(p, w), odd and concave non-decreasing in p for p >= 0,
// with |dq/dp| bounded by c. Families:
//   tanh_p          q(p, w) = kappa * tanh(p)
//   tanh_p_times_w  q(p, w) = (kappa + mu * min(w, w_max)) * tanh(p)
struct NonlinearTerm {
  enum class Family { tanh_p, tanh_p_times_w };
  Family family = Family::tanh_p;
  double kappa = 0.0;
  double mu = 0.0;
  double w_max = 1.0;
  double c = 1.0;

  void validate() const;
  double operator()(double p, double w) const;
  double slope_bound() const { return kappa + mu * w_max; }  // sup |dq/dp|
};

struct EvolutionProblem {
  const DiscreteOperator* op = nullptr;
  ScalarField initial;
  Scheme scheme = Scheme::euler;
  double dt = 0.0;
  double t_end = 0.0;
  std::optional<NonlinearTerm> nonlinear;
  int snapshot_stride = 1;
};

struct Trajectory {
  std::vector<ScalarField> snapshots;
  Scheme scheme = Scheme::euler;
  double dt = 0.0;
  std::string operator_desc;
};

// Explicit-scheme stability bound safety / max_i m_i; row masses include the
// far-field tails.
double stable_dt(const DiscreteOperator& op, double safety = 0.5);

Trajectory evolve_linear(const EvolutionProblem& problem);

// u <- u + dt (Lu + q(u, |Du|)). Far-field values follow the spatially
// constant solution v' = q(v, 0), which keeps constants-at-infinity exact
// solutions of the non-linear equation; with kappa = mu = 0 the run is
// bitwise equal to evolve_linear.
Trajectory evolve_nonlinear(const EvolutionProblem& problem);

// |Du| by central differences (one-sided at the boundary).
std::vector<double> gradient_magnitude(const ScalarField& u);

enum class PhiEquation { proof_consistent, literal };

// Evolves the odd extension of phi0 on [-R, R] under the 1D marginal-kernel
// heat equation with far field +-1, re-antisymmetrizing each step, and
// returns the restriction to r >= 0 at snapshot times. With a non-linear
// term, steps phi_t = L phi + q(phi, phi') (proof_consistent) or the plain
// linear equation (literal); the far field then follows v' = q(v, 0).
std::vector<ModulusProfile> evolve_phi(const MarginalKernel1D& kernel, const ModulusProfile& phi0,
                                       double dt, double t_end,
                                       std::optional<NonlinearTerm> nonlinear = {},
                                       int snapshot_stride = 1,
                                       PhiEquation equation = PhiEquation::proof_consistent);

}  // namespace nhl
