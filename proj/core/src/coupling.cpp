#include "nhl/coupling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace nhl {

CouplingFrame::CouplingFrame(int dim, const Vec& x_, const Vec& y_) : n(dim), x(x_), y(y_) {
  if (n != 1 && n != 2) throw std::invalid_argument("coupling frame: dimension must be 1 or 2");
  const Vec d = sub(y, x);
  gap = norm(d, n);
  if (!(gap > 0.0)) throw std::invalid_argument("coupling frame: x and y must be distinct");
  e1 = scale(d, 1.0 / gap);
  half_gap = 0.5 * gap;
}

Vec reflect(const Vec& r, const CouplingFrame& frame) {
  const double r1 = dot(r, frame.e1, frame.n);
  return sub(r, scale(frame.e1, 2.0 * r1));
}

Vec conjugate_vector(const Vec& r, const CouplingFrame& frame) {
  // Unique solution of both pairing equations: r' = Rr + (y - x).
  const Vec conj = add(reflect(r, frame), sub(frame.y, frame.x));
  const double tol = 1e-12 * std::max(1.0, frame.gap + norm(r, frame.n));
  const Vec lhs1 = add(frame.x, r);
  const Vec rhs1 = add(frame.y, reflect(conj, frame));
  const Vec lhs2 = add(frame.y, reflect(r, frame));
  const Vec rhs2 = add(frame.x, conj);
  if (norm(sub(lhs1, rhs1), frame.n) > tol || norm(sub(lhs2, rhs2), frame.n) > tol)
    throw std::logic_error("conjugate_vector: pairing identities violated");
  const double c1 = dot(conj, frame.e1, frame.n);
  const double r1 = dot(r, frame.e1, frame.n);
  if (std::abs(c1 - (frame.gap - r1)) > tol)
    throw std::logic_error("conjugate_vector: first-coordinate identity violated");
  return conj;
}

std::string to_string(HalfSpace h) {
  switch (h) {
    case HalfSpace::S: return "S";
    case HalfSpace::L: return "L";
    case HalfSpace::R: return "R";
  }
  return "?";
}

HalfSpace partition(const Vec& r, const CouplingFrame& frame) {
  const double r1 = dot(r, frame.e1, frame.n);
  const double tol = 1e-12 * frame.gap;
  if (std::abs(r1 - frame.half_gap) <= tol) return HalfSpace::S;
  return r1 > frame.half_gap ? HalfSpace::R : HalfSpace::L;
}

InvarianceResidual reflection_invariance_residual(const std::function<double(const Vec&)>& rho,
                                                  double reach,
                                                  const std::function<double(const Vec&)>& u,
                                                  const CouplingFrame& frame, int resolution) {
  if (resolution < 2) throw std::invalid_argument("invariance residual: resolution too small");
  const int m = resolution;
  const double step = 2.0 * reach / m;
  const int mb = frame.n == 2 ? m : 1;
  const double w = frame.n == 2 ? step * step : step;

  double direct = 0.0, reflected = 0.0, nodewise = 0.0;
  for (int ka = 0; ka < m; ++ka) {
    for (int kb = 0; kb < mb; ++kb) {
      Vec r{-reach + (ka + 0.5) * step, 0.0};
      if (frame.n == 2) r[1] = -reach + (kb + 0.5) * step;
      const double rho_r = rho(r);
      const Vec rr = reflect(r, frame);
      nodewise = std::max(nodewise, std::abs(rho_r - rho(rr)));
      direct += rho_r * u(add(frame.y, r)) * w;
      reflected += rho_r * u(add(frame.y, rr)) * w;
    }
  }
  return {std::abs(direct - reflected), nodewise};
}

InvarianceResidual reflection_invariance_residual(const RadialKernel& kernel,
                                                  const std::function<double(const Vec&)>& u,
                                                  const CouplingFrame& frame, int resolution) {
  if (kernel.dimension() != frame.n)
    throw std::invalid_argument("invariance residual: kernel dimension mismatch");
  return reflection_invariance_residual([&](const Vec& r) { return kernel.eval(r); },
                                        kernel.reach(), u, frame, resolution);
}

IndicatorCaseReport indicator_case_check(double x, double y, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("indicator case: delta must be > 0");
  if (!(y > x)) throw std::invalid_argument("indicator case: requires y > x");
  IndicatorCaseReport rep;
  const double d = y - x;
  rep.overlap = d < 2.0 * delta;  // the tie d == 2 delta classifies as separated
  rep.midpoint = 0.5 * (x + y);
  if (rep.overlap) {
    rep.l1_lo = d - delta;
    rep.l1_hi = 0.5 * d;
    rep.l2_lo = -delta;
    rep.l2_hi = 0.5 * d;
    rep.l1_subset_of_l2 = rep.l1_lo >= rep.l2_lo && rep.l1_hi <= rep.l2_hi;
    rep.difference_nonnegative = rep.l1_subset_of_l2;
    rep.measure_difference = rep.l1_lo - rep.l2_lo;  // equals y - x
  }
  return rep;
}

namespace {

double smooth_bump(const Vec& p, int n) {
  // Entire, rapidly decaying test function; midpoint sums of rho * bump are
  // then spectrally accurate.
  const double q = n == 1 ? p[0] * p[0] : p[0] * p[0] + p[1] * p[1];
  return std::exp(-0.35 * q) * (1.0 + 0.3 * std::sin(1.7 * p[0] + (n == 2 ? 0.9 * p[1] : 0.0)));
}

}  // namespace

CouplingSuiteReport run_coupling_suite(const RadialKernel& kernel, int frames, int resolution,
                                       double shift, std::uint64_t seed) {
  const int n = kernel.dimension();
  std::mt19937_64 rng(seed ^ 0xc0fefeULL);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_real_distribution<double> wide(-3.0, 3.0);

  auto random_vec = [&](std::uniform_real_distribution<double>& d) {
    Vec v{d(rng), 0.0};
    if (n == 2) v[1] = d(rng);
    return v;
  };

  // Thresholds pinned by the refinement study in tests/coupling: residuals
  // shrink with resolution for smooth kernels and sit at rounding level for
  // the 1D indicator; 100x safety margins applied.
  const bool smooth = kernel.family() == KernelFamily::gaussian;
  const double invariance_threshold = smooth ? 1e-8 : (n == 1 ? 1e-10 : 5e-2);
  const double nodewise_threshold = n == 1 ? 1e-13 : 1e-9;

  CouplingCheck involution{"reflection_involution", 0.0, 1e-13, true};
  CouplingCheck conj_involution{"conjugate_involution", 0.0, 1e-12, true};
  CouplingCheck pairing{"pairing_identities", 0.0, 1e-12, true};
  CouplingCheck first_coord{"first_coordinate_identity", 0.0, 1e-12, true};
  CouplingCheck exchange{"partition_L_R_exchange", 0.0, 0.5, true};  // violation count
  CouplingCheck s_pointwise{"s_set_integrand_vanishes", 0.0, 1e-12, true};
  CouplingCheck weight{"weight_difference_nonnegative_on_L", 0.0, 1e-12, true};
  CouplingCheck invariance{"reflection_invariance_integral", 0.0, invariance_threshold, true};
  CouplingCheck nodewise{"kernel_reflection_symmetry_nodewise", 0.0, nodewise_threshold, true};

  const Vec offset = shift != 0.0 ? Vec{shift, 0.0} : Vec{0.0, 0.0};
  auto rho = [&](const Vec& r) { return kernel.eval(sub(r, offset)); };
  const double reach = kernel.reach() + std::abs(shift);
  auto u = [&](const Vec& p) { return smooth_bump(p, n); };

  for (int f = 0; f < frames; ++f) {
    Vec x = random_vec(box), y = random_vec(box);
    while (norm(sub(y, x), n) < 0.05) y = random_vec(box);
    const CouplingFrame frame(n, x, y);

    for (int trial = 0; trial < 10; ++trial) {
      const Vec r = random_vec(wide);
      const Vec rr = reflect(reflect(r, frame), frame);
      involution.residual = std::max(involution.residual, norm(sub(rr, r), n));

      const Vec conj = conjugate_vector(r, frame);
      const Vec back = conjugate_vector(conj, frame);
      conj_involution.residual = std::max(conj_involution.residual, norm(sub(back, r), n));

      const Vec lhs1 = add(frame.x, r);
      const Vec rhs1 = add(frame.y, reflect(conj, frame));
      const Vec lhs2 = add(frame.y, reflect(r, frame));
      const Vec rhs2 = add(frame.x, conj);
      pairing.residual = std::max(pairing.residual,
                                  std::max(norm(sub(lhs1, rhs1), n), norm(sub(lhs2, rhs2), n)));

      const double r1 = dot(r, frame.e1, n);
      const double c1 = dot(conj, frame.e1, n);
      first_coord.residual =
          std::max(first_coord.residual, std::abs(c1 - (frame.gap - r1)));

      const HalfSpace side = partition(r, frame);
      const HalfSpace conj_side = partition(conj, frame);
      if (side == HalfSpace::L && conj_side != HalfSpace::R) exchange.residual += 1.0;
      if (side == HalfSpace::R && conj_side != HalfSpace::L) exchange.residual += 1.0;

      // points on the S hyperplane: y + Rr and x + r coincide
      Vec rs = scale(frame.e1, frame.half_gap);
      if (n == 2) {
        const Vec perp{-frame.e1[1], frame.e1[0]};
        rs = add(rs, scale(perp, wide(rng)));
      }
      s_pointwise.residual = std::max(
          s_pointwise.residual,
          norm(sub(add(frame.y, reflect(rs, frame)), add(frame.x, rs)), n));

      // weight inequality on L for the map g : L -> R, g(r) = y - x + Rr
      if (side == HalfSpace::L && shift == 0.0) {
        const Vec g_r = add(sub(frame.y, frame.x), reflect(r, frame));
        weight.residual =
            std::max(weight.residual, std::max(0.0, kernel.eval(g_r) - kernel.eval(r)));
      }
    }

    const auto inv = reflection_invariance_residual(rho, reach, u, frame, resolution);
    invariance.residual = std::max(invariance.residual, inv.integral);
    nodewise.residual = std::max(nodewise.residual, inv.nodewise);
  }

  CouplingSuiteReport rep;
  rep.frames = frames;
  for (CouplingCheck* c : {&involution, &conj_involution, &pairing, &first_coord, &exchange,
                           &s_pointwise, &weight, &invariance, &nodewise}) {
    c->pass = c->residual <= c->threshold;
    rep.pass = rep.pass && c->pass;
    rep.checks.push_back(*c);
  }
  return rep;
}

}  // namespace nhl
