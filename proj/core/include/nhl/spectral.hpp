#pragma once

#include <limits>
#include <string>
#include <vector>

#include "nhl/evolve.hpp"
#include "nhl/grid.hpp"

namespace nhl {

// Regional fractional Dirichlet form E[u,u] = (c_n/2) ∬ (u(x)-u(y))^2 / |x-y|^{n+2s}
// on a box, discretized with piecewise-constant nodal functions on a
// cell-centered grid (diagonal cells excluded).
struct FormSpec {
  int n = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  std::array<int, 2> cells{0, 1};
  double s = 0.5;
  double c_n = 1.0;

  static FormSpec interval(double a, double b, int cells, double s, double c_n = 1.0);
  static FormSpec rectangle(const Vec& lo, const Vec& hi, int cx, int cy, double s,
                            double c_n = 1.0);

  Grid grid() const;  // cell-centered sampling grid
  double cell_volume() const;
  void validate() const;
  std::string describe() const;
};

struct SpectralReport {
  // form evaluation
  double energy = std::numeric_limits<double>::quiet_NaN();
  double raw_energy = std::numeric_limits<double>::quiet_NaN();  // prefactor 1
  double norm_sq = std::numeric_limits<double>::quiet_NaN();
  double mean_integral = std::numeric_limits<double>::quiet_NaN();
  double quotient = std::numeric_limits<double>::quiet_NaN();
  // eigen structure (M-orthonormal eigenvectors, ascending eigenvalues)
  std::vector<double> lambda;
  std::vector<std::vector<double>> eigenvectors;
  double cell_volume = 0.0;
  bool iterative_solve = false;
  // counterexample bookkeeping
  double L = std::numeric_limits<double>::quiet_NaN();
  double bound_value = std::numeric_limits<double>::quiet_NaN();  // 4 L^2 eps^2
  bool bound_flag = false;  // raw_energy <= bound_value
  double quotient_at_eigen_resolution = std::numeric_limits<double>::quiet_NaN();
  // metadata
  double s = std::numeric_limits<double>::quiet_NaN();
  double c_n = 1.0;
  std::string domain;
};

double energy_form(const ScalarField& u, const FormSpec& spec);

// E[u,u] / ||u||^2 for mean-zero u; throws "inadmissible trial function"
// otherwise.
double rayleigh_quotient(const ScalarField& u, const FormSpec& spec);

// First k eigenvalues of the generalized problem A v = lambda M v with
// M = cell_volume * I. Dense solve up to 1500 nodes, deflated Lanczos up to
// 4096 (dense fallback on non-convergence).
SpectralReport lambda2(const FormSpec& spec, int k);

// Thin-rectangle study on [0,L] x [-eps,eps]: Rayleigh quotients of
// u(x,y) = y per L (upper bounds for lambda_2), the discrete lambda_2 at an
// affordable resolution, and the 4 L^2 eps^2 bound flag.
std::vector<SpectralReport> counterexample_report(double eps, const std::vector<double>& L_list,
                                                  double s, int nx, int ny, int eigen_nx,
                                                  int eigen_ny, double c_n = 1.0);

// Coefficients alpha_i = <f, v_i>_M against the report's eigenvectors; the
// reconstruction residual ||f - sum alpha_i v_i||_M is written when asked.
std::vector<double> expand_in_eigenbasis(const std::vector<double>& f,
                                         const SpectralReport& eig,
                                         double* reconstruction_residual = nullptr);

struct DecayFit {
  double rate = 0.0;       // osc(u(t)) ~ amplitude * exp(-rate * t)
  double amplitude = 0.0;
  double residual = 0.0;   // rms of the log-linear fit
  int points = 0;
};

// Least-squares fit of log osc(u(t)) over [window_lo, window_hi] (fractions
// of the trajectory length; defaults to the final half).
DecayFit oscillation_decay_rate(const Trajectory& traj, double window_lo = 0.5,
                                double window_hi = 1.0);

}  // namespace nhl
