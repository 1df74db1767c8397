#include "nhl/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace nhl {

namespace {

constexpr long long kExhaustiveLimit = 10'000'000;  // ordered-pair budget

long long bin_of(double s, double w) {
  if (!(s > 0.0)) return 0;
  const auto b = static_cast<long long>(std::ceil(s / w)) - 1;
  return std::max<long long>(b, 0);
}

}  // namespace

double ModulusProfile::spacing() const {
  if (s.size() < 2) throw std::logic_error("modulus profile: need at least two nodes");
  const double ds = s[1] - s[0];
  for (std::size_t k = 0; k + 1 < s.size(); ++k)
    if (std::abs(s[k + 1] - s[k] - ds) > 1e-9 * ds)
      throw std::logic_error("modulus profile: non-uniform node spacing");
  return ds;
}

double ModulusProfile::eval(double at) const {
  if (at <= s.front()) return value.front();
  if (interp == Interp::step) {
    const double w = s.size() > 1 ? s[1] - s[0] : 1.0;
    const auto b = bin_of(at, w);
    if (b + 1 >= static_cast<long long>(value.size())) return far_value;
    return value[static_cast<std::size_t>(b + 1)];
  }
  if (at > s.back()) return far_value;
  const double ds = s[1] - s[0];
  auto k = static_cast<std::size_t>((at - s.front()) / ds);
  if (k + 1 >= s.size()) k = s.size() - 2;
  const double f = (at - s[k]) / ds;
  return value[k] + f * (value[k + 1] - value[k]);
}

ModulusProfile empirical_modulus(const ScalarField& u, double bin_width) {
  const Grid& g = u.grid;
  g.validate();
  const double h_min = g.n == 1 ? g.h[0] : std::min(g.h[0], g.h[1]);
  if (!(bin_width >= 0.5 * h_min * (1.0 - 1e-12)))
    throw std::invalid_argument("empirical_modulus: bin width below h/2");

  const int size = g.size();
  const double smax = 0.5 * g.diameter();
  const auto bins = static_cast<std::size_t>(bin_of(smax, bin_width)) + 1;

  std::vector<double> raw(bins, 0.0);
  std::vector<double> min_s(bins, std::numeric_limits<double>::infinity());
  std::vector<Vec> xs(size);
  for (int i = 0; i < size; ++i) xs[i] = g.coord(i);

  for (int i = 0; i < size; ++i) {
    for (int j = i + 1; j < size; ++j) {
      const double s = 0.5 * norm(sub(xs[j], xs[i]), g.n);
      const auto b = static_cast<std::size_t>(bin_of(s, bin_width));
      const double half_diff = 0.5 * std::abs(u.values[j] - u.values[i]);
      if (half_diff > raw[b]) raw[b] = half_diff;
      if (s < min_s[b]) min_s[b] = s;
    }
  }

  ModulusProfile out;
  out.t = u.t;
  out.interp = ModulusProfile::Interp::step;
  out.family = "empirical";
  out.bin_raw = raw;
  out.bin_min_s = min_s;
  out.s.resize(bins + 1);
  out.value.resize(bins + 1);
  out.s[0] = 0.0;
  out.value[0] = 0.0;
  double running = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    running = std::max(running, raw[b]);
    out.s[b + 1] = static_cast<double>(b + 1) * bin_width;
    out.value[b + 1] = running;
  }
  out.far_value = running;
  return out;
}

ModulusProfile construct_initial_phi(const ScalarField& u0, double lambda_init, double r_phi,
                                     double node_spacing) {
  if (!(lambda_init > 0.0)) throw std::invalid_argument("construct_initial_phi: lambda_init must be > 0");
  if (!(node_spacing > 0.0 && r_phi > node_spacing))
    throw std::invalid_argument("construct_initial_phi: bad profile range");
  const double sup = max_abs(u0);
  if (sup > 1.0 - 1e-6)
    throw std::runtime_error("initial data not majorizable: sup |u0| = " + std::to_string(sup) +
                             " too close to 1");

  const ModulusProfile emp = empirical_modulus(u0, node_spacing);

  double lambda = lambda_init;
  double margin = 0.0;
  bool found = false;
  for (int k = 0; k <= 20; ++k, lambda *= 2.0) {
    margin = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < emp.bin_raw.size(); ++b) {
      if (!(emp.bin_min_s[b] < std::numeric_limits<double>::infinity())) continue;
      const double gap = 2.0 * std::tanh(lambda * emp.bin_min_s[b]) - 2.0 * emp.bin_raw[b];
      margin = std::min(margin, gap);
    }
    if (margin >= 0.0) {
      found = true;
      break;
    }
  }
  if (!found)
    throw std::runtime_error("initial data not majorizable: no tanh profile up to 2^20 * lambda_init");

  const auto count = static_cast<std::size_t>(std::llround(r_phi / node_spacing)) + 1;
  ModulusProfile out;
  out.t = u0.t;
  out.interp = ModulusProfile::Interp::linear;
  out.family = "tanh";
  out.lambda = lambda;
  out.majorization_margin = margin;
  out.far_value = 1.0;
  out.s.resize(count);
  out.value.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.s[k] = static_cast<double>(k) * node_spacing;
    out.value[k] = std::tanh(lambda * out.s[k]);
  }
  return out;
}

AdmissibilityReport check_admissible(const ModulusProfile& phi, double tail_tol) {
  AdmissibilityReport r;
  r.zero_at_origin = phi.s.front() == 0.0 && std::abs(phi.value.front()) <= 1e-14;
  double min_diff = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < phi.value.size(); ++k)
    min_diff = std::min(min_diff, phi.value[k + 1] - phi.value[k]);
  r.min_forward_difference = min_diff;
  r.strictly_increasing = min_diff > 0.0;
  r.in_unit_range = true;
  for (double v : phi.value)
    if (v < 0.0 || v >= 1.0) r.in_unit_range = false;
  r.tail_value = phi.value.back();
  r.tail_reaches_one = phi.value.back() >= 1.0 - tail_tol;
  r.evolution_certified = phi.evolution_certified;
  return r;
}

namespace {

// One pass over node pairs accumulating the distinct-pair margin and the
// Z_eps maxima (diagonal included). Ties resolve to the lexicographically
// smallest pair.
struct Accum {
  double margin = -std::numeric_limits<double>::infinity();
  int mi = -1, mj = -1;
  std::vector<double> z;
  std::vector<std::pair<int, int>> z_arg;
  long long pairs = 0, overlap = 0, separated = 0;

  explicit Accum(std::size_t eps_count)
      : z(eps_count, -std::numeric_limits<double>::infinity()),
        z_arg(eps_count, {-1, -1}) {}
};

class PairScanner {
 public:
  PairScanner(const ScalarField& u, const ModulusProfile& phi, const std::vector<double>& eps,
              double c, std::optional<double> delta)
      : u_(u), phi_(phi), delta_(delta), g_(u.grid) {
    const int size = g_.size();
    xs_.resize(size);
    sq_.resize(size);
    for (int i = 0; i < size; ++i) {
      xs_[i] = g_.coord(i);
      sq_[i] = dot(xs_[i], xs_[i], g_.n);
    }
    eps_scaled_.reserve(eps.size());
    for (double e : eps) eps_scaled_.push_back(e * std::exp(c * u.t));
  }

  void visit(int i, int j, Accum& a) const {
    ++a.pairs;
    const double s = 0.5 * norm(sub(xs_[j], xs_[i]), g_.n);
    const double adiff = std::abs(u_.values[j] - u_.values[i]);
    const double base = adiff - 2.0 * phi_.eval(s);
    if (i != j) {
      if (delta_) {
        if (2.0 * s < 2.0 * *delta_)
          ++a.overlap;
        else
          ++a.separated;
      }
      if (base > a.margin || (base == a.margin && better_pair(i, j, a.mi, a.mj))) {
        a.margin = base;
        a.mi = i;
        a.mj = j;
      }
    }
    const double pen = 1.0 + sq_[i] + sq_[j];
    for (std::size_t e = 0; e < eps_scaled_.size(); ++e) {
      const double z = base - eps_scaled_[e] * pen;
      if (z > a.z[e] || (z == a.z[e] && better_pair(i, j, a.z_arg[e].first, a.z_arg[e].second))) {
        a.z[e] = z;
        a.z_arg[e] = {i, j};
      }
    }
  }

  const Grid& grid() const { return g_; }

 private:
  static bool better_pair(int i, int j, int pi, int pj) {
    return pi < 0 || i < pi || (i == pi && j < pj);
  }

  const ScalarField& u_;
  const ModulusProfile& phi_;
  std::optional<double> delta_;
  Grid g_;
  std::vector<Vec> xs_;
  std::vector<double> sq_;
  std::vector<double> eps_scaled_;
};

void scan_exhaustive(const PairScanner& sc, int size, Accum& a) {
  for (int i = 0; i < size; ++i)
    for (int j = i; j < size; ++j) sc.visit(i, j, a);
}

// Distance-stratified sampling for grids whose ordered-pair count exceeds the
// exhaustive budget: per offset-distance class either a full enumeration
// (small classes) or a seeded weighted sample, plus an exhaustive scan of a
// coarse sublattice and of the diagonal.
void scan_sampled(const PairScanner& sc, std::uint64_t seed, Accum& a) {
  const Grid& g = sc.grid();
  const int n0 = g.count[0], n1 = g.count[1];
  const int size = g.size();

  for (int i = 0; i < size; ++i) sc.visit(i, i, a);

  int stride = 1;
  auto sub_nodes = [&](int k) {
    const int c0 = (n0 + k - 1) / k, c1 = (n1 + k - 1) / k;
    return static_cast<long long>(c0) * c1;
  };
  while (sub_nodes(stride) * sub_nodes(stride) > kExhaustiveLimit / 2) ++stride;
  std::vector<int> coarse;
  for (int ia = 0; ia < n0; ia += stride)
    for (int ib = 0; ib < n1; ib += stride) coarse.push_back(ia * n1 + ib);
  // keep the far box corner in the coarse set
  if ((n0 - 1) % stride != 0 || (n1 - 1) % stride != 0)
    coarse.push_back((n0 - 1) * n1 + (n1 - 1));
  for (std::size_t p = 0; p < coarse.size(); ++p)
    for (std::size_t q = p + 1; q < coarse.size(); ++q) sc.visit(coarse[p], coarse[q], a);

  constexpr int kClasses = 32;
  const double dmax = g.diameter();
  struct Offset {
    int da, db;
    long long bases;
  };
  std::vector<std::vector<Offset>> classes(kClasses);
  std::vector<long long> class_pairs(kClasses, 0);
  for (int da = 0; da < n0; ++da) {
    for (int db = -(n1 - 1); db < n1; ++db) {
      if (da == 0 && db <= 0) continue;  // unordered: da > 0, or da == 0 && db > 0
      const double d = g.n == 1 ? da * g.h[0] : std::hypot(da * g.h[0], db * g.h[1]);
      int cls = static_cast<int>(d / dmax * kClasses);
      cls = std::min(cls, kClasses - 1);
      const long long bases =
          static_cast<long long>(n0 - da) * (db >= 0 ? n1 - db : n1 + db);
      classes[cls].push_back({da, db, bases});
      class_pairs[cls] += bases;
    }
  }

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const long long budget = kExhaustiveLimit / (2 * kClasses);
  for (int cls = 0; cls < kClasses; ++cls) {
    const auto& offs = classes[cls];
    if (offs.empty()) continue;
    if (class_pairs[cls] <= budget) {
      for (const Offset& o : offs) {
        const int b0 = o.db >= 0 ? 0 : -o.db;
        const int b1 = o.db >= 0 ? n1 - o.db : n1;
        for (int ia = 0; ia + o.da < n0; ++ia)
          for (int ib = b0; ib < b1; ++ib)
            sc.visit(ia * n1 + ib, (ia + o.da) * n1 + ib + o.db, a);
      }
      continue;
    }
    std::vector<long long> cum(offs.size());
    long long total = 0;
    for (std::size_t k = 0; k < offs.size(); ++k) {
      total += offs[k].bases;
      cum[k] = total;
    }
    std::uniform_int_distribution<long long> pick(0, total - 1);
    for (long long draw = 0; draw < budget; ++draw) {
      const auto it = std::upper_bound(cum.begin(), cum.end(), pick(rng));
      const Offset& o = offs[static_cast<std::size_t>(it - cum.begin())];
      const int b0 = o.db >= 0 ? 0 : -o.db;
      const int span1 = o.db >= 0 ? n1 - o.db : n1 + o.db;
      std::uniform_int_distribution<int> pick_a(0, n0 - o.da - 1);
      std::uniform_int_distribution<int> pick_b(0, span1 - 1);
      const int ia = pick_a(rng), ib = b0 + pick_b(rng);
      sc.visit(ia * n1 + ib, (ia + o.da) * n1 + ib + o.db, a);
    }
  }
}

Accum scan_snapshot(const ScalarField& u, const ModulusProfile& phi,
                    const std::vector<double>& eps, double c, std::uint64_t seed,
                    std::optional<double> delta, bool& sampled) {
  PairScanner sc(u, phi, eps, c, delta);
  const int size = u.grid.size();
  Accum a(eps.size());
  const long long ordered = static_cast<long long>(size) * size;
  sampled = ordered > kExhaustiveLimit;
  if (!sampled)
    scan_exhaustive(sc, size, a);
  else
    scan_sampled(sc, seed, a);
  return a;
}

}  // namespace

PairScanResult z_epsilon_max(const ScalarField& u, const ModulusProfile& phi, double eps,
                             double c, std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("z_epsilon_max: eps must be > 0");
  bool sampled = false;
  Accum a = scan_snapshot(u, phi, {eps}, c, seed, {}, sampled);
  PairScanResult r;
  r.max_value = a.z[0];
  r.i = a.z_arg[0].first;
  r.j = a.z_arg[0].second;
  // report the ordered pair with u(j) >= u(i)
  if (r.i >= 0 && u.values[r.j] < u.values[r.i]) std::swap(r.i, r.j);
  r.t = u.t;
  r.pairs_scanned = a.pairs;
  r.sampled = sampled;
  return r;
}

PreservationReport verify_preservation(const std::vector<ScalarField>& traj_u,
                                       const std::vector<ModulusProfile>& traj_phi,
                                       const std::vector<double>& eps_list, double c,
                                       double tol_num, std::uint64_t seed,
                                       std::optional<double> indicator_delta) {
  if (traj_u.size() != traj_phi.size())
    throw std::invalid_argument("verify_preservation: trajectory lengths differ");
  if (traj_u.empty()) throw std::invalid_argument("verify_preservation: empty trajectory");
  for (double e : eps_list)
    if (!(e > 0.0)) throw std::invalid_argument("verify_preservation: eps must be > 0");

  PreservationReport rep;
  rep.tol_num = tol_num;
  rep.eps_list = eps_list;
  rep.c = c;
  rep.pass = true;
  rep.worst_margin = -std::numeric_limits<double>::infinity();
  rep.worst_z = -std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < traj_u.size(); ++k) {
    const double t = traj_u[k].t;
    if (std::abs(t - traj_phi[k].t) > 1e-9 * std::max(1.0, std::abs(t)))
      throw std::invalid_argument("verify_preservation: snapshot times mismatched at index " +
                                  std::to_string(k));
    bool sampled = false;
    Accum a = scan_snapshot(traj_u[k], traj_phi[k], eps_list, c, seed + k, indicator_delta,
                            sampled);
    SnapshotVerdict v;
    v.t = t;
    v.margin = a.margin;
    v.margin_i = a.mi;
    v.margin_j = a.mj;
    v.z_max = a.z;
    v.pairs_scanned = a.pairs;
    v.sampled = sampled;
    v.pairs_overlap = a.overlap;
    v.pairs_separated = a.separated;
    rep.snapshots.push_back(v);

    if (v.margin > rep.worst_margin) {
      rep.worst_margin = v.margin;
      rep.worst_margin_t = t;
    }
    if (v.margin > tol_num) rep.pass = false;
    for (double z : v.z_max) {
      rep.worst_z = std::max(rep.worst_z, z);
      if (!(z < 0.0)) rep.pass = false;
    }
  }
  return rep;
}

}  // namespace nhl
