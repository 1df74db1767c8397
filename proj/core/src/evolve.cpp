#include "nhl/evolve.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nhl {

std::string to_string(Scheme s) { return s == Scheme::euler ? "euler" : "rk4"; }

void NonlinearTerm::validate() const {
  if (kappa < 0.0) throw std::invalid_argument("nonlinear: kappa must be >= 0");
  if (mu < 0.0) throw std::invalid_argument("nonlinear: mu must be >= 0");
  if (!(w_max > 0.0)) throw std::invalid_argument("nonlinear: w_max must be > 0");
  if (!(c > kappa + mu * w_max))
    throw std::invalid_argument("nonlinear: derivative bound c must exceed kappa + mu*w_max");
}

double NonlinearTerm::operator()(double p, double w) const {
  switch (family) {
    case Family::tanh_p:
      return kappa * std::tanh(p);
    case Family::tanh_p_times_w:
      return (kappa + mu * std::min(w, w_max)) * std::tanh(p);
  }
  return 0.0;
}

double stable_dt(const DiscreteOperator& op, double safety) {
  if (!(safety > 0.0 && safety <= 1.0))
    throw std::invalid_argument("stable_dt: safety factor must lie in (0, 1]");
  return safety / op.max_row_mass();
}

std::vector<double> gradient_magnitude(const ScalarField& u) {
  const Grid& g = u.grid;
  g.validate();
  const int n0 = g.count[0], n1 = g.count[1];
  const double* v = u.values.data();
  std::vector<double> out(u.values.size());
  auto axis0 = [&](int ia, int ib) {
    const int i = ia * n1 + ib;
    if (ia == 0) return (v[i + n1] - v[i]) / g.h[0];
    if (ia == n0 - 1) return (v[i] - v[i - n1]) / g.h[0];
    return (v[i + n1] - v[i - n1]) / (2.0 * g.h[0]);
  };
  auto axis1 = [&](int ia, int ib) {
    const int i = ia * n1 + ib;
    if (ib == 0) return (v[i + 1] - v[i]) / g.h[1];
    if (ib == n1 - 1) return (v[i] - v[i - 1]) / g.h[1];
    return (v[i + 1] - v[i - 1]) / (2.0 * g.h[1]);
  };
  for (int ia = 0; ia < n0; ++ia)
    for (int ib = 0; ib < n1; ++ib) {
      const double d0 = axis0(ia, ib);
      out[ia * n1 + ib] = g.n == 1 ? std::abs(d0) : std::hypot(d0, axis1(ia, ib));
    }
  return out;
}

namespace {

// State advanced by the explicit stepper: node values plus the two far-field
// constants (appended so rk4 treats everything uniformly) and the
// comparison-ODE envelope for the non-linear instability check.
struct StepState {
  ScalarField u;
  double envelope = 1.0;
};

struct StageRate {
  std::vector<double> rate;
  double d_far_lo = 0.0, d_far_hi = 0.0;
  double d_env = 0.0;
};

class Stepper {
 public:
  Stepper(const DiscreteOperator& op, std::optional<NonlinearTerm> q)
      : op_(op), q_(std::move(q)) {}

  void rhs(const ScalarField& u, StageRate& out, double envelope) const {
    op_.apply_into(u, out.rate);
    out.d_far_lo = out.d_far_hi = out.d_env = 0.0;
    if (!q_) return;
    const auto grad = gradient_magnitude(u);
    for (std::size_t i = 0; i < out.rate.size(); ++i)
      out.rate[i] += (*q_)(u.values[i], grad[i]);
    if (u.far_field) {
      out.d_far_lo = (*q_)(u.far_field->first, 0.0);
      out.d_far_hi = (*q_)(u.far_field->second, 0.0);
    }
    out.d_env = (*q_)(envelope, q_->w_max);
  }

  void blend(const StepState& base, const StageRate& k, double a, StepState& out) const {
    out.u.grid = base.u.grid;
    out.u.t = base.u.t;
    out.u.values.resize(base.u.values.size());
    for (std::size_t i = 0; i < base.u.values.size(); ++i)
      out.u.values[i] = base.u.values[i] + a * k.rate[i];
    out.u.far_field = base.u.far_field;
    if (base.u.far_field)
      out.u.far_field = std::make_pair(base.u.far_field->first + a * k.d_far_lo,
                                       base.u.far_field->second + a * k.d_far_hi);
    out.envelope = base.envelope + a * k.d_env;
  }

  void step_euler(StepState& st, double dt) const {
    rhs(st.u, k1_, st.envelope);
    for (std::size_t i = 0; i < st.u.values.size(); ++i) st.u.values[i] += dt * k1_.rate[i];
    if (st.u.far_field)
      st.u.far_field = std::make_pair(st.u.far_field->first + dt * k1_.d_far_lo,
                                      st.u.far_field->second + dt * k1_.d_far_hi);
    st.envelope += dt * k1_.d_env;
  }

  void step_rk4(StepState& st, double dt) const {
    rhs(st.u, k1_, st.envelope);
    blend(st, k1_, 0.5 * dt, tmp_);
    rhs(tmp_.u, k2_, tmp_.envelope);
    blend(st, k2_, 0.5 * dt, tmp_);
    rhs(tmp_.u, k3_, tmp_.envelope);
    blend(st, k3_, dt, tmp_);
    rhs(tmp_.u, k4_, tmp_.envelope);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < st.u.values.size(); ++i)
      st.u.values[i] +=
          w * (k1_.rate[i] + 2.0 * k2_.rate[i] + 2.0 * k3_.rate[i] + k4_.rate[i]);
    if (st.u.far_field)
      st.u.far_field = std::make_pair(
          st.u.far_field->first +
              w * (k1_.d_far_lo + 2.0 * k2_.d_far_lo + 2.0 * k3_.d_far_lo + k4_.d_far_lo),
          st.u.far_field->second +
              w * (k1_.d_far_hi + 2.0 * k2_.d_far_hi + 2.0 * k3_.d_far_hi + k4_.d_far_hi));
    st.envelope += w * (k1_.d_env + 2.0 * k2_.d_env + 2.0 * k3_.d_env + k4_.d_env);
  }

 private:
  const DiscreteOperator& op_;
  std::optional<NonlinearTerm> q_;
  mutable StageRate k1_, k2_, k3_, k4_;
  mutable StepState tmp_;
};

Trajectory run(const EvolutionProblem& p, bool nonlinear) {
  if (p.op == nullptr) throw std::invalid_argument("evolve: missing operator");
  if (!(p.dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
  if (p.t_end < 0.0) throw std::invalid_argument("evolve: t_end must be >= 0");
  if (p.snapshot_stride < 1) throw std::invalid_argument("evolve: snapshot stride must be >= 1");
  const double limit = stable_dt(*p.op, 0.5);
  if (p.dt > limit * (1.0 + 1e-12))
    throw std::invalid_argument("evolve: dt exceeds the stability bound " + std::to_string(limit));

  std::optional<NonlinearTerm> q;
  if (nonlinear) {
    if (!p.nonlinear) throw std::invalid_argument("evolve_nonlinear: missing non-linear term");
    p.nonlinear->validate();
    if (p.dt * p.nonlinear->c > 0.25 * (1.0 + 1e-12))
      throw std::invalid_argument("evolve_nonlinear: require dt * c <= 0.25");
    q = p.nonlinear;
  } else if (p.nonlinear) {
    throw std::invalid_argument("evolve_linear: non-linear term present; use evolve_nonlinear");
  }

  StepState st;
  st.u = p.initial;
  st.u.t = 0.0;
  double start_sup = max_abs(st.u);
  if (st.u.far_field)
    start_sup = std::max({start_sup, std::abs(st.u.far_field->first),
                          std::abs(st.u.far_field->second)});
  st.envelope = start_sup;
  const bool linear_guard = !nonlinear && start_sup <= 1.0 + 1e-12;
  const double guard_c = q ? q->c : 0.0;

  const auto steps = static_cast<long long>(std::ceil(p.t_end / p.dt - 1e-9));
  Stepper stepper(*p.op, q);

  Trajectory traj;
  traj.scheme = p.scheme;
  traj.dt = p.dt;
  traj.operator_desc = p.op->describe();
  traj.snapshots.push_back(st.u);

  for (long long k = 1; k <= steps; ++k) {
    if (p.scheme == Scheme::euler)
      stepper.step_euler(st, p.dt);
    else
      stepper.step_rk4(st, p.dt);
    const double t = static_cast<double>(k) * p.dt;
    st.u.t = t;

    const double sup = max_abs(st.u);
    if (linear_guard && sup > 1.0 + 1e-6)
      throw std::runtime_error("evolve: instability detected at t=" + std::to_string(t) +
                               " (sup |u| = " + std::to_string(sup) + " > 1 + 1e-6)");
    if (q && sup > st.envelope * (1.0 + 1e-6) + guard_c * t * 1e-3)
      throw std::runtime_error("evolve: non-linear growth exceeds the comparison envelope at t=" +
                               std::to_string(t) + " (sup |u| = " + std::to_string(sup) +
                               ", envelope = " + std::to_string(st.envelope) + ")");

    if (k % p.snapshot_stride == 0 || k == steps) traj.snapshots.push_back(st.u);
  }
  return traj;
}

}  // namespace

Trajectory evolve_linear(const EvolutionProblem& problem) { return run(problem, false); }

Trajectory evolve_nonlinear(const EvolutionProblem& problem) { return run(problem, true); }

std::vector<ModulusProfile> evolve_phi(const MarginalKernel1D& kernel,
                                       const ModulusProfile& phi0, double dt, double t_end,
                                       std::optional<NonlinearTerm> nonlinear,
                                       int snapshot_stride, PhiEquation equation) {
  if (phi0.s.size() < 3) throw std::invalid_argument("evolve_phi: profile too short");
  if (phi0.s.front() != 0.0 || std::abs(phi0.value.front()) > 1e-14)
    throw std::invalid_argument("evolve_phi: profile must start at phi(0) = 0");
  const double w = phi0.spacing();
  const auto m = static_cast<int>(phi0.s.size()) - 1;
  for (std::size_t j = 0; j + 1 < phi0.value.size(); ++j)
    if (!(phi0.value[j + 1] - phi0.value[j] > 0.0))
      throw std::invalid_argument("evolve_phi: initial profile must be strictly increasing");
  if (nonlinear) nonlinear->validate();

  // Odd extension on [-R, R] with far field +-1.
  Grid g(-phi0.s.back(), phi0.s.back(), w);
  ScalarField ext;
  ext.grid = g;
  ext.t = 0.0;
  ext.far_field = std::make_pair(-1.0, 1.0);
  ext.values.resize(2 * m + 1);
  for (int j = -m; j <= m; ++j)
    ext.values[m + j] = j >= 0 ? phi0.value[j] : -phi0.value[-j];

  const DiscreteOperator op = assemble_operator(kernel, g, OperatorMode::full_space);
  const double limit = stable_dt(op, 0.5);
  if (dt > limit * (1.0 + 1e-12))
    throw std::invalid_argument("evolve_phi: dt exceeds the stability bound " +
                                std::to_string(limit));

  const bool with_q = nonlinear && equation == PhiEquation::proof_consistent;
  std::vector<double> rate;
  const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));

  auto snapshot = [&](double t) {
    ModulusProfile out;
    out.s = phi0.s;
    out.value.assign(ext.values.begin() + m, ext.values.end());
    out.t = t;
    out.interp = ModulusProfile::Interp::linear;
    out.far_value = ext.far_field->second;
    out.family = "evolved";
    out.lambda = phi0.lambda;
    out.evolution_certified = true;
    out.kernel_id = kernel.describe();
    return out;
  };

  std::vector<ModulusProfile> result;
  result.push_back(snapshot(0.0));

  for (long long k = 1; k <= steps; ++k) {
    op.apply_into(ext, rate);
    if (with_q) {
      const auto grad = gradient_magnitude(ext);
      for (std::size_t i = 0; i < rate.size(); ++i)
        rate[i] += (*nonlinear)(ext.values[i], grad[i]);
    }
    for (std::size_t i = 0; i < rate.size(); ++i) ext.values[i] += dt * rate[i];
    if (nonlinear) {
      const double v = ext.far_field->second + dt * (*nonlinear)(ext.far_field->second, 0.0);
      ext.far_field = std::make_pair(-v, v);
    }

    // Exact enforcement of the odd extension.
    ext.values[m] = 0.0;
    for (int j = 1; j <= m; ++j) {
      const double a = 0.5 * (ext.values[m + j] - ext.values[m - j]);
      ext.values[m + j] = a;
      ext.values[m - j] = -a;
    }

    const double t = static_cast<double>(k) * dt;
    ext.t = t;
    for (int j = 0; j < 2 * m; ++j)
      if ((ext.values[j + 1] - ext.values[j]) / w < -1e-8)
        throw std::runtime_error("profile degenerated: phi' < -1e-8 at r=" +
                                 std::to_string(g.lower[0] + j * w) + ", t=" + std::to_string(t));

    if (k % snapshot_stride == 0 || k == steps) result.push_back(snapshot(t));
  }
  return result;
}

}  // namespace nhl
