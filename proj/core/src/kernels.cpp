#include "nhl/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nhl/quadrature.hpp"

namespace nhl {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Gaussian truncation radius, in units of sigma: density equals 1e-16 of the
// peak at sqrt(32 ln 10) sigma.
const double kGaussReachSigmas = std::sqrt(32.0 * std::log(10.0));

double ball_volume(int n, double radius) {
  return n == 1 ? 2.0 * radius : kPi * radius * radius;
}

}  // namespace

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::indicator: return "indicator";
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::fractional_truncated: return "fractional-truncated";
  }
  return "?";
}

RadialKernel::RadialKernel(const KernelParams& p) : p_(p) {
  if (p_.n != 1 && p_.n != 2) throw std::invalid_argument("kernel: dimension must be 1 or 2");
  if (p_.c && *p_.c <= 0.0) throw std::invalid_argument("kernel: normalization c must be > 0");
  switch (p_.family) {
    case KernelFamily::indicator:
      if (!(p_.delta > 0.0)) throw std::invalid_argument("kernel: indicator requires delta > 0");
      break;
    case KernelFamily::gaussian:
      if (!(p_.sigma > 0.0)) throw std::invalid_argument("kernel: gaussian requires sigma > 0");
      gauss_reach_ = kGaussReachSigmas * p_.sigma;
      break;
    case KernelFamily::fractional_truncated:
      if (!(p_.s > 0.0 && p_.s < 1.0))
        throw std::invalid_argument("kernel: fractional order s must lie in (0,1)");
      if (p_.r_min && !(*p_.r_min > 0.0))
        throw std::invalid_argument("kernel: fractional inner cutoff r_min must be > 0");
      if (p_.r_max) {
        const double lo = p_.r_min.value_or(0.0);
        if (!(*p_.r_max > lo))
          throw std::invalid_argument("kernel: fractional outer cutoff r_max must exceed r_min");
      }
      break;
  }
  if (p_.c) {
    c_ = *p_.c;
  } else if (p_.family == KernelFamily::fractional_truncated) {
    // Unit mass requires an inner cutoff; otherwise fall back to c = 1.
    if (p_.r_min) {
      c_ = 1.0;
      const double raw = mass();
      c_ = 1.0 / raw;
    } else {
      c_ = 1.0;
    }
  } else {
    c_ = 1.0;
  }
}

RadialKernel RadialKernel::indicator(int n, double delta, std::optional<double> c) {
  KernelParams p;
  p.family = KernelFamily::indicator;
  p.n = n;
  p.delta = delta;
  p.c = c;
  return RadialKernel(p);
}

RadialKernel RadialKernel::gaussian(int n, double sigma, std::optional<double> c) {
  KernelParams p;
  p.family = KernelFamily::gaussian;
  p.n = n;
  p.sigma = sigma;
  p.c = c;
  return RadialKernel(p);
}

RadialKernel RadialKernel::fractional(int n, double s, std::optional<double> r_min,
                                      std::optional<double> r_max, std::optional<double> c) {
  KernelParams p;
  p.family = KernelFamily::fractional_truncated;
  p.n = n;
  p.s = s;
  p.r_min = r_min;
  p.r_max = r_max;
  p.c = c;
  return RadialKernel(p);
}

double RadialKernel::profile(double radius) const {
  const double r = std::abs(radius);
  switch (p_.family) {
    case KernelFamily::indicator:
      return r <= p_.delta ? c_ / ball_volume(p_.n, p_.delta) : 0.0;
    case KernelFamily::gaussian: {
      if (r > gauss_reach_) return 0.0;
      const double s2 = p_.sigma * p_.sigma;
      const double norm = p_.n == 1 ? std::sqrt(2.0 * kPi * s2) : 2.0 * kPi * s2;
      return c_ * std::exp(-0.5 * r * r / s2) / norm;
    }
    case KernelFamily::fractional_truncated: {
      if (p_.r_min && r < *p_.r_min) return 0.0;
      if (p_.r_max && r > *p_.r_max) return 0.0;
      if (r == 0.0) return std::numeric_limits<double>::infinity();
      return c_ * std::pow(r, -(p_.n + 2.0 * p_.s));
    }
  }
  return 0.0;
}

double RadialKernel::mass() const {
  switch (p_.family) {
    case KernelFamily::indicator:
      return c_;
    case KernelFamily::gaussian: {
      const double r = gauss_reach_;
      if (p_.n == 1) return c_ * std::erf(r / (p_.sigma * std::sqrt(2.0)));
      return c_ * (1.0 - std::exp(-0.5 * r * r / (p_.sigma * p_.sigma)));
    }
    case KernelFamily::fractional_truncated: {
      if (!p_.r_min) throw std::domain_error("non-integrable kernel: fractional family without inner cutoff");
      const double lo = *p_.r_min;
      const double two_s = 2.0 * p_.s;
      const double hi_term = p_.r_max ? std::pow(*p_.r_max, -two_s) : 0.0;
      const double radial = (std::pow(lo, -two_s) - hi_term) / p_.s;
      return p_.n == 1 ? c_ * radial : c_ * kPi * radial;
    }
  }
  return c_;
}

double RadialKernel::tail_mass(double radius) const {
  const double r = std::max(radius, 0.0);
  switch (p_.family) {
    case KernelFamily::indicator: {
      if (r >= p_.delta) return 0.0;
      if (p_.n == 1) return c_ * (p_.delta - r) / p_.delta;
      return c_ * (p_.delta * p_.delta - r * r) / (p_.delta * p_.delta);
    }
    case KernelFamily::gaussian: {
      if (r >= gauss_reach_) return 0.0;
      if (p_.n == 1) return c_ * std::erfc(r / (p_.sigma * std::sqrt(2.0)));
      return c_ * std::exp(-0.5 * r * r / (p_.sigma * p_.sigma));
    }
    case KernelFamily::fractional_truncated: {
      if (!p_.r_min) throw std::domain_error("non-integrable kernel: fractional family without inner cutoff");
      const double lo = std::max(r, *p_.r_min);
      if (p_.r_max && lo >= *p_.r_max) return 0.0;
      const double two_s = 2.0 * p_.s;
      const double hi_term = p_.r_max ? std::pow(*p_.r_max, -two_s) : 0.0;
      const double radial = (std::pow(lo, -two_s) - hi_term) / p_.s;
      return p_.n == 1 ? c_ * radial : c_ * kPi * radial;
    }
  }
  return 0.0;
}

double RadialKernel::reach() const {
  switch (p_.family) {
    case KernelFamily::indicator: return p_.delta;
    case KernelFamily::gaussian: return gauss_reach_;
    case KernelFamily::fractional_truncated:
      return p_.r_max ? *p_.r_max : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

std::string RadialKernel::describe() const {
  std::string d = to_string(p_.family) + " n=" + std::to_string(p_.n);
  switch (p_.family) {
    case KernelFamily::indicator: d += " delta=" + std::to_string(p_.delta); break;
    case KernelFamily::gaussian: d += " sigma=" + std::to_string(p_.sigma); break;
    case KernelFamily::fractional_truncated:
      d += " s=" + std::to_string(p_.s);
      if (p_.r_min) d += " rmin=" + std::to_string(*p_.r_min);
      if (p_.r_max) d += " rmax=" + std::to_string(*p_.r_max);
      break;
  }
  return d;
}

// --- marginals ---------------------------------------------------------

double MarginalKernel1D::eval(double w) const {
  const double a = std::abs(w);
  switch (form_) {
    case Form::identity:
      return source_->profile(a);
    case Form::gaussian_line: {
      if (a > reach_) return 0.0;
      const double s2 = sigma_ * sigma_;
      return c_ * erf_factor_ * std::exp(-0.5 * a * a / s2) / std::sqrt(2.0 * kPi * s2);
    }
    case Form::disk_chord: {
      if (a > delta_) return 0.0;
      const double half_chord = std::sqrt(std::max(delta_ * delta_ - a * a, 0.0));
      const double half = slice_ ? std::min(half_chord, *slice_) : half_chord;
      return c_ * 2.0 * half / (kPi * delta_ * delta_);
    }
    case Form::tabulated: {
      if (a >= reach_) return 0.0;
      const double x = a / table_dw_;
      const auto j = static_cast<std::size_t>(x);
      if (j + 1 >= table_.size()) return table_.back();
      const double f = x - static_cast<double>(j);
      return table_[j] + f * (table_[j + 1] - table_[j]);
    }
  }
  return 0.0;
}

double MarginalKernel1D::mass() const {
  switch (form_) {
    case Form::identity:
      return source_->mass();
    case Form::gaussian_line:
      return c_ * erf_factor_;
    case Form::disk_chord: {
      if (!slice_ || *slice_ >= delta_) return c_;
      // Chord capped at the slice: split at |w| = sqrt(delta^2 - a^2).
      const double a = *slice_;
      const double w0 = std::sqrt(delta_ * delta_ - a * a);
      auto arc = [this](double w) {  // antiderivative of sqrt(delta^2 - w^2)
        const double root = std::sqrt(std::max(delta_ * delta_ - w * w, 0.0));
        return 0.5 * (w * root + delta_ * delta_ * std::asin(w / delta_));
      };
      const double inner = 2.0 * a * w0;                  // min = a on |w| <= w0
      const double outer = 2.0 * (arc(delta_) - arc(w0));  // min = chord beyond
      return c_ * 2.0 * (inner + outer) / (kPi * delta_ * delta_);
    }
    case Form::tabulated:
      return table_mass_;
  }
  return 0.0;
}

double MarginalKernel1D::tail_mass(double radius) const {
  const double r = std::max(radius, 0.0);
  if (r >= reach()) return 0.0;
  switch (form_) {
    case Form::identity:
      return source_->tail_mass(r);
    case Form::gaussian_line:
      return c_ * erf_factor_ * std::erfc(r / (sigma_ * std::sqrt(2.0)));
    case Form::disk_chord:
    case Form::tabulated: {
      // Quadrature of the profile; both forms have bounded support.
      const double hi = reach();
      return 2.0 * integrate([this](double w) { return eval(w); }, r, hi, 1e-12);
    }
  }
  return 0.0;
}

double MarginalKernel1D::reach() const {
  return form_ == Form::identity ? source_->reach() : reach_;
}

std::string MarginalKernel1D::describe() const {
  std::string base = source_ ? source_->describe() : std::string("?");
  std::string d = "marginal of [" + base + "]";
  if (slice_) d += " slice_half_width=" + std::to_string(*slice_);
  return d;
}

MarginalKernel1D marginal_1d(const RadialKernel& k, std::optional<double> slice_half_width,
                             double table_spacing) {
  if (k.dimension() > 2) throw std::invalid_argument("marginal_1d: n > 2 unsupported");
  if (slice_half_width && !(*slice_half_width > 0.0))
    throw std::invalid_argument("marginal_1d: slice_half_width must be > 0");

  MarginalKernel1D m;
  m.source_ = k;
  if (k.dimension() == 1) {
    m.form_ = MarginalKernel1D::Form::identity;
    return m;
  }

  m.slice_ = slice_half_width;
  m.c_ = k.normalization();
  const auto& p = k.params();
  if (k.family() == KernelFamily::gaussian) {
    m.form_ = MarginalKernel1D::Form::gaussian_line;
    m.sigma_ = p.sigma;
    m.reach_ = k.reach();
    m.erf_factor_ =
        slice_half_width ? std::erf(*slice_half_width / (p.sigma * std::sqrt(2.0))) : 1.0;
    return m;
  }
  if (k.family() == KernelFamily::indicator) {
    m.form_ = MarginalKernel1D::Form::disk_chord;
    m.delta_ = p.delta;
    m.reach_ = p.delta;
    return m;
  }

  // Fractional disk annulus: tabulate w -> ∫ rho(w,p) dp by adaptive
  // quadrature over the admissible transverse range.
  if (!p.r_min) throw std::domain_error("non-integrable kernel: fractional family without inner cutoff");
  if (!p.r_max)
    throw std::domain_error("marginal_1d: fractional marginal requires an outer cutoff");
  const double r_min = *p.r_min;
  const double r_out = *p.r_max;
  const double w_reach = r_out;
  if (!(table_spacing > 0.0)) throw std::invalid_argument("marginal_1d: table spacing must be > 0");

  m.form_ = MarginalKernel1D::Form::tabulated;
  m.table_dw_ = table_spacing;
  m.reach_ = w_reach;
  const auto count = static_cast<std::size_t>(std::ceil(w_reach / table_spacing)) + 2;
  m.table_.resize(count);
  const double exponent = 1.0 + p.s;  // rho = c (w^2 + p^2)^-(1+s) for n = 2
  for (std::size_t j = 0; j < count; ++j) {
    const double w = static_cast<double>(j) * table_spacing;
    const double p_hi_sq = r_out * r_out - w * w;
    if (p_hi_sq <= 0.0) {
      m.table_[j] = 0.0;
      continue;
    }
    double p_hi = std::sqrt(p_hi_sq);
    if (slice_half_width) p_hi = std::min(p_hi, *slice_half_width);
    const double p_lo = w < r_min ? std::sqrt(r_min * r_min - w * w) : 0.0;
    if (p_hi <= p_lo) {
      m.table_[j] = 0.0;
      continue;
    }
    const double w2 = w * w;
    m.table_[j] = 2.0 * m.c_ *
                  integrate([&](double q) { return std::pow(w2 + q * q, -exponent); }, p_lo,
                            p_hi, 1e-13);
  }
  // Mass of the linear interpolant (trapezoid on the table).
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < count; ++j)
    acc += 0.5 * (m.table_[j] + m.table_[j + 1]) * table_spacing;
  m.table_mass_ = 2.0 * acc;
  return m;
}

}  // namespace nhl
