#include "nhl/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nhl {

FormSpec FormSpec::interval(double a, double b, int cells, double s, double c_n) {
  FormSpec f;
  f.n = 1;
  f.lo = {a, 0.0};
  f.hi = {b, 0.0};
  f.cells = {cells, 1};
  f.s = s;
  f.c_n = c_n;
  f.validate();
  return f;
}

FormSpec FormSpec::rectangle(const Vec& lo, const Vec& hi, int cx, int cy, double s, double c_n) {
  FormSpec f;
  f.n = 2;
  f.lo = lo;
  f.hi = hi;
  f.cells = {cx, cy};
  f.s = s;
  f.c_n = c_n;
  f.validate();
  return f;
}

void FormSpec::validate() const {
  if (n != 1 && n != 2) throw std::invalid_argument("form: dimension must be 1 or 2");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("form: order s must lie in (0,1)");
  if (!(c_n > 0.0)) throw std::invalid_argument("form: c_n must be > 0");
  for (int a = 0; a < n; ++a) {
    if (!(hi[a] > lo[a])) throw std::invalid_argument("form: empty domain");
    if (cells[a] < 2) throw std::invalid_argument("form: need at least 2 cells per axis");
  }
  if (n == 1 && cells[1] != 1) throw std::invalid_argument("form: 1D spec must have cells[1] == 1");
}

Grid FormSpec::grid() const {
  validate();
  Grid g;
  g.n = n;
  for (int a = 0; a < n; ++a) {
    g.h[a] = (hi[a] - lo[a]) / cells[a];
    g.lower[a] = lo[a] + 0.5 * g.h[a];
    g.count[a] = cells[a];
  }
  if (n == 1) {
    g.h[1] = g.h[0];
    g.count[1] = 1;
  }
  return g;
}

double FormSpec::cell_volume() const {
  double v = (hi[0] - lo[0]) / cells[0];
  if (n == 2) v *= (hi[1] - lo[1]) / cells[1];
  return v;
}

std::string FormSpec::describe() const {
  std::string d = "[" + std::to_string(lo[0]) + "," + std::to_string(hi[0]) + "]";
  if (n == 2) d += "x[" + std::to_string(lo[1]) + "," + std::to_string(hi[1]) + "]";
  d += " s=" + std::to_string(s) + " cells=" + std::to_string(cells[0]);
  if (n == 2) d += "x" + std::to_string(cells[1]);
  return d;
}

namespace {

// 1 / |x-y|^{n+2s} from the squared distance, with fast paths for the common
// exponents.
struct InverseDistancePower {
  double e;  // (n + 2s) / 2, applied to d^2
  explicit InverseDistancePower(const FormSpec& f) : e(0.5 * (f.n + 2.0 * f.s)) {}
  double operator()(double d2) const {
    if (e == 1.5) return 1.0 / (d2 * std::sqrt(d2));
    if (e == 1.0) return 1.0 / d2;
    if (e == 0.5) return 1.0 / std::sqrt(d2);
    return std::pow(d2, -e);
  }
};

void check_grid(const ScalarField& u, const FormSpec& spec) {
  if (!u.grid.same_layout(spec.grid()))
    throw std::invalid_argument("spectral: field is not sampled on the spec's grid");
}

std::vector<Vec> node_coords(const Grid& g) {
  std::vector<Vec> xs(g.size());
  for (int i = 0; i < g.size(); ++i) xs[i] = g.coord(i);
  return xs;
}

double squared_distance(const Vec& a, const Vec& b, int n) {
  const double dx = a[0] - b[0];
  if (n == 1) return dx * dx;
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

// Raw double sum  sum_{i != j} (u_i - u_j)^2 K_ij V^2  (no prefactor).
double raw_double_sum(const ScalarField& u, const FormSpec& spec) {
  const Grid g = spec.grid();
  const auto xs = node_coords(g);
  const InverseDistancePower kernel(spec);
  const double v2 = spec.cell_volume() * spec.cell_volume();
  const int size = g.size();
  const double* f = u.values.data();
  double acc = 0.0;
  for (int i = 0; i < size; ++i) {
    double row = 0.0;
    for (int j = i + 1; j < size; ++j) {
      const double du = f[i] - f[j];
      row += du * du * kernel(squared_distance(xs[i], xs[j], g.n));
    }
    acc += row;
  }
  return 2.0 * acc * v2;
}

struct DenseForm {
  Eigen::MatrixXd b;  // A / V, symmetric PSD, constants in the kernel
  double volume = 0.0;
};

DenseForm assemble_dense(const FormSpec& spec) {
  const Grid g = spec.grid();
  const int size = g.size();
  if (size > 4096) throw std::runtime_error("assembly too large: " + std::to_string(size) + " nodes");
  const auto xs = node_coords(g);
  const InverseDistancePower kernel(spec);
  const double volume = spec.cell_volume();
  const double scale = spec.c_n * volume;  // (c_n V^2 K) / V

  DenseForm out;
  out.volume = volume;
  out.b.setZero(size, size);
  for (int i = 0; i < size; ++i) {
    for (int j = i + 1; j < size; ++j) {
      const double k = scale * kernel(squared_distance(xs[i], xs[j], g.n));
      out.b(i, j) = -k;
      out.b(j, i) = -k;
    }
  }
  for (int i = 0; i < size; ++i) {
    double row = 0.0;
    for (int j = 0; j < size; ++j)
      if (j != i) row -= out.b(i, j);
    out.b(i, i) = row;
  }
  return out;
}

SpectralReport eigen_from_dense(const DenseForm& form, const FormSpec& spec, int k) {
  const int size = static_cast<int>(form.b.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(form.b);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral: dense eigensolver failed");
  SpectralReport rep;
  rep.cell_volume = form.volume;
  rep.s = spec.s;
  rep.c_n = spec.c_n;
  rep.domain = spec.describe();
  const int kk = std::min(k, size);
  const double mscale = 1.0 / std::sqrt(form.volume);
  for (int m = 0; m < kk; ++m) {
    rep.lambda.push_back(solver.eigenvalues()(m));
    std::vector<double> v(size);
    for (int i = 0; i < size; ++i) v[i] = solver.eigenvectors()(i, m) * mscale;
    rep.eigenvectors.push_back(std::move(v));
  }
  return rep;
}

// Lanczos with full reorthogonalization on sigma*I - B; extremal Ritz pairs
// of that operator are the smallest eigenpairs of B. Deterministic start.
bool eigen_lanczos(const DenseForm& form, const FormSpec& spec, int k, SpectralReport& rep) {
  const int size = static_cast<int>(form.b.rows());
  const double sigma = 2.0 * form.b.diagonal().maxCoeff();
  const int steps = std::min(size, std::max(4 * k + 48, 160));

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd basis(size, steps);
  Eigen::VectorXd alpha(steps), beta(steps);

  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v(i) = gauss(rng);
  v.normalize();
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(size);
  double beta_prev = 0.0;
  int done = 0;
  for (int m = 0; m < steps; ++m) {
    basis.col(m) = v;
    Eigen::VectorXd w = sigma * v - form.b * v;
    w -= beta_prev * prev;
    alpha(m) = v.dot(w);
    w -= alpha(m) * v;
    // full reorthogonalization
    for (int r = 0; r <= m; ++r) w -= basis.col(r).dot(w) * basis.col(r);
    beta_prev = w.norm();
    beta(m) = beta_prev;
    done = m + 1;
    if (beta_prev < 1e-13 * sigma) break;
    prev = v;
    v = w / beta_prev;
  }

  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(done, done);
  for (int m = 0; m < done; ++m) {
    tri(m, m) = alpha(m);
    if (m + 1 < done) tri(m, m + 1) = tri(m + 1, m) = beta(m);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ts(tri);
  if (ts.info() != Eigen::Success) return false;

  // Largest Ritz values of sigma*I - B, converged when the residual bound is
  // small relative to sigma.
  const int kk = std::min(k, done);
  const double mscale = 1.0 / std::sqrt(form.volume);
  std::vector<std::pair<double, int>> order;
  for (int m = 0; m < done; ++m) order.push_back({ts.eigenvalues()(m), m});
  std::sort(order.rbegin(), order.rend());
  for (int m = 0; m < kk; ++m) {
    const int idx = order[m].second;
    const double resid = std::abs(beta(done - 1) * ts.eigenvectors()(done - 1, idx));
    if (resid > 1e-8 * sigma) return false;
    rep.lambda.push_back(sigma - order[m].first);
    Eigen::VectorXd y = basis.leftCols(done) * ts.eigenvectors().col(idx);
    std::vector<double> vec(size);
    for (int i = 0; i < size; ++i) vec[i] = y(i) * mscale;
    rep.eigenvectors.push_back(std::move(vec));
  }
  rep.cell_volume = form.volume;
  rep.s = spec.s;
  rep.c_n = spec.c_n;
  rep.domain = spec.describe();
  rep.iterative_solve = true;
  return true;
}

}  // namespace

double energy_form(const ScalarField& u, const FormSpec& spec) {
  check_grid(u, spec);
  return 0.5 * spec.c_n * raw_double_sum(u, spec);
}

double rayleigh_quotient(const ScalarField& u, const FormSpec& spec) {
  check_grid(u, spec);
  const double volume = spec.cell_volume();
  double integral = 0.0, abs_integral = 0.0, norm_sq = 0.0;
  for (double v : u.values) {
    integral += v * volume;
    abs_integral += std::abs(v) * volume;
    norm_sq += v * v * volume;
  }
  if (std::abs(integral) > 1e-8 * abs_integral)
    throw std::runtime_error("inadmissible trial function: mean-zero constraint violated");
  if (norm_sq == 0.0) throw std::runtime_error("inadmissible trial function: zero norm");
  return energy_form(u, spec) / norm_sq;
}

SpectralReport lambda2(const FormSpec& spec, int k) {
  spec.validate();
  if (k < 1) throw std::invalid_argument("lambda2: need k >= 1");
  const DenseForm form = assemble_dense(spec);
  const int size = static_cast<int>(form.b.rows());
  if (size > 1500) {
    SpectralReport rep;
    if (eigen_lanczos(form, spec, k, rep)) return rep;
    // fallback: dense solve
  }
  return eigen_from_dense(form, spec, k);
}

std::vector<SpectralReport> counterexample_report(double eps, const std::vector<double>& L_list,
                                                  double s, int nx, int ny, int eigen_nx,
                                                  int eigen_ny, double c_n) {
  if (!(eps > 0.0)) throw std::invalid_argument("counterexample: eps must be > 0");
  std::vector<SpectralReport> out;
  for (double L : L_list) {
    if (!(L > 0.0 && L < eps))
      throw std::invalid_argument("counterexample: thin-rectangle regime requires 0 < L < eps");
    const FormSpec fine = FormSpec::rectangle({0.0, -eps}, {L, eps}, nx, ny, s, c_n);
    const ScalarField u =
        sample_function_to_field([](const Vec& x) { return x[1]; }, fine.grid());

    SpectralReport rep;
    rep.L = L;
    rep.s = s;
    rep.c_n = c_n;
    rep.domain = fine.describe();
    rep.energy = energy_form(u, fine);
    rep.raw_energy = raw_double_sum(u, fine);
    double norm_sq = 0.0, integral = 0.0;
    for (int i = 0; i < fine.grid().size(); ++i) {
      norm_sq += u.values[i] * u.values[i];
      integral += u.values[i];
    }
    rep.norm_sq = norm_sq * fine.cell_volume();
    rep.mean_integral = integral * fine.cell_volume();
    rep.quotient = rayleigh_quotient(u, fine);
    rep.bound_value = 4.0 * L * L * eps * eps;
    rep.bound_flag = rep.raw_energy <= rep.bound_value;

    const FormSpec coarse = FormSpec::rectangle({0.0, -eps}, {L, eps}, eigen_nx, eigen_ny, s, c_n);
    const SpectralReport eig = lambda2(coarse, 2);
    rep.lambda = eig.lambda;
    rep.cell_volume = eig.cell_volume;
    rep.iterative_solve = eig.iterative_solve;
    const ScalarField uc =
        sample_function_to_field([](const Vec& x) { return x[1]; }, coarse.grid());
    rep.quotient_at_eigen_resolution = rayleigh_quotient(uc, coarse);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<double> expand_in_eigenbasis(const std::vector<double>& f, const SpectralReport& eig,
                                         double* reconstruction_residual) {
  if (eig.eigenvectors.empty()) throw std::invalid_argument("expand: no eigenvectors available");
  if (f.size() != eig.eigenvectors.front().size())
    throw std::invalid_argument("expand: dimension mismatch");
  const double volume = eig.cell_volume;
  std::vector<double> alpha(eig.eigenvectors.size(), 0.0);
  for (std::size_t m = 0; m < eig.eigenvectors.size(); ++m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * eig.eigenvectors[m][i];
    alpha[m] = acc * volume;
  }
  if (reconstruction_residual != nullptr) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      double r = f[i];
      for (std::size_t m = 0; m < alpha.size(); ++m) r -= alpha[m] * eig.eigenvectors[m][i];
      acc += r * r;
    }
    *reconstruction_residual = std::sqrt(acc * volume);
  }
  return alpha;
}

DecayFit oscillation_decay_rate(const Trajectory& traj, double window_lo, double window_hi) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 10)
    throw std::invalid_argument("oscillation fit: need at least 10 snapshots");
  auto osc = [](const ScalarField& u) {
    double lo = u.values[0], hi = u.values[0];
    for (double v : u.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  };
  if (osc(snaps.back()) <= 1e-12)
    throw std::runtime_error("no oscillation to fit: trajectory is constant at the final time");

  const auto first = static_cast<std::size_t>(window_lo * (snaps.size() - 1));
  const auto last = static_cast<std::size_t>(window_hi * (snaps.size() - 1));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = first; k <= last && k < snaps.size(); ++k) {
    const double o = osc(snaps[k]);
    if (o <= 0.0) continue;
    const double x = snaps[k].t, y = std::log(o);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::runtime_error("no oscillation to fit: window too small");
  const double det = m * sxx - sx * sx;
  const double slope = (m * sxy - sx * sy) / det;
  const double intercept = (sy * sxx - sx * sxy) / det;

  DecayFit fit;
  fit.rate = -slope;
  fit.amplitude = std::exp(intercept);
  fit.points = m;
  double acc = 0.0;
  for (std::size_t k = first; k <= last && k < snaps.size(); ++k) {
    const double o = osc(snaps[k]);
    if (o <= 0.0) continue;
    const double r = std::log(o) - (intercept + slope * snaps[k].t);
    acc += r * r;
  }
  fit.residual = std::sqrt(acc / m);
  return fit;
}

}  // namespace nhl
