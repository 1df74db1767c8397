#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhl/geometry.hpp"

namespace nhl {

enum class KernelFamily { indicator, gaussian, fractional_truncated };

std::string to_string(KernelFamily f);

struct KernelParams {
  KernelFamily family = KernelFamily::indicator;
  int n = 1;                     // ambient dimension, 1 or 2
  double delta = 0.0;            // indicator: support radius
  double sigma = 0.0;            // gaussian: width
  double s = 0.0;                // fractional: order in (0,1)
  std::optional<double> r_min;   // fractional: inner cutoff (> 0)
  std::optional<double> r_max;   // fractional: outer cutoff
  std::optional<double> c;       // normalization; when absent, unit mass if integrable
};

// Rotationally symmetric, non-negative, non-increasing kernel rho. Immutable
// after construction; all evaluation is pure.
//
// Families:
//   indicator   rho(r) = c / |B_delta|        on |r| <= delta
//   gaussian    rho(r) = c * N_sigma(r)       truncated where density < 1e-16 of peak
//   fractional  rho(r) = c * |r|^-(n+2s)      on r_min <= |r| <= r_max
//
// The gaussian and indicator parameterizations carry unit mass at c = 1; the
// fractional default c is chosen for unit mass when r_min is present.
class RadialKernel {
 public:
  explicit RadialKernel(const KernelParams& p);

  static RadialKernel indicator(int n, double delta, std::optional<double> c = {});
  static RadialKernel gaussian(int n, double sigma, std::optional<double> c = {});
  static RadialKernel fractional(int n, double s, std::optional<double> r_min,
                                 std::optional<double> r_max = {},
                                 std::optional<double> c = {});

  // Radial profile rho(|r|); exactly 0 outside support / cutoffs.
  double profile(double radius) const;
  double eval(const Vec& r) const { return profile(norm(r, p_.n)); }

  // Total mass over the support. Throws "non-integrable kernel" for a
  // fractional kernel without inner cutoff.
  double mass() const;
  // Mass in {|r| > radius}.
  double tail_mass(double radius) const;
  // Support radius (infinity for a fractional kernel without outer cutoff).
  double reach() const;

  KernelFamily family() const { return p_.family; }
  int dimension() const { return p_.n; }
  double normalization() const { return c_; }
  const KernelParams& params() const { return p_; }
  std::string describe() const;

 private:
  KernelParams p_;
  double c_ = 1.0;
  double gauss_reach_ = 0.0;  // truncation radius for the gaussian family
};

// 1D marginal rho~(w) = ∫ rho(w, p) dp over the transverse coordinate,
// optionally restricted to |p| <= slice_half_width. For n = 1 this is the
// kernel itself. Closed forms are used for the gaussian (separable) and the
// disk indicator (chord length); other cases are tabulated by adaptive
// quadrature and evaluated with linear interpolation.
class MarginalKernel1D {
 public:
  double eval(double w) const;
  double mass() const;
  double tail_mass(double radius) const;
  double reach() const;
  bool sliced() const { return slice_.has_value(); }
  std::string describe() const;

  friend MarginalKernel1D marginal_1d(const RadialKernel& k,
                                      std::optional<double> slice_half_width,
                                      double table_spacing);

 private:
  enum class Form { identity, gaussian_line, disk_chord, tabulated };
  Form form_ = Form::identity;
  std::optional<RadialKernel> source_;
  std::optional<double> slice_;
  double c_ = 1.0;
  double delta_ = 0.0;       // disk_chord
  double sigma_ = 0.0;       // gaussian_line
  double erf_factor_ = 1.0;  // gaussian_line slice factor
  double reach_ = 0.0;
  double table_dw_ = 0.0;    // tabulated
  std::vector<double> table_;
  double table_mass_ = 0.0;
};

MarginalKernel1D marginal_1d(const RadialKernel& k,
                             std::optional<double> slice_half_width = {},
                             double table_spacing = 1e-3);

}  // namespace nhl
