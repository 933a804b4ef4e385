#include "talbot/bohm.hpp"

#include "parallel.hpp"
#include "talbot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace talbot {

namespace {

struct Integrator {
  const VelocityField& vf;
  const StepPolicy& policy;
  double floor_density;
  double v_limit;
  Trajectory& out;

  VelocitySample stage(double t, double x) const
  {
    VelocitySample s = velocity_sample(vf, x, t);
    s.vx = std::clamp(s.vx, -v_limit, v_limit);
    s.near_node = s.density < floor_density;
    return s;
  }

  // Depth that the previous base step needed; the next one starts one level
  // shallower so that resolved stretches do not repay rejected attempts.
  int depth_hint = 0;

  double base(double t, double x, double h)
  {
    // Common pieces first: the time-only chirp bound splits the step the same
    // way for every trajectory, which keeps the RK4 map shared by neighbours.
    const auto common = std::max(1L, static_cast<long>(std::ceil(h / chirp_step(t))));
    const double piece = h / double(common);
    for (long c = 0; c < common; ++c) {
      const double tc = t + double(c) * piece;
      const int start = std::max(0, depth_hint - 1);
      depth_hint = 0;
      const int pieces = 1 << start;
      const double sub = piece / pieces;
      for (int i = 0; i < pieces; ++i) x = step(tc + i * sub, x, sub, start);
    }
    return x;
  }

  // Largest step with h |dv_x/dx| <= chirp_limit under the edge-wave bound
  // |dv_x/dx| <= (hbar / m) edge_sum / (tau sqrt(2 pi tau)).
  double chirp_step(double t) const
  {
    if (!(edge_sum > 0) || !(policy.chirp_limit > 0)) return INFINITY;
    const double tau = vf.field.beam().spreading(t);
    return policy.chirp_limit * t * std::sqrt(2 * std::numbers::pi * tau) / edge_sum;
  }
  double edge_sum = 0;

  double step(double t, double x, double h, int depth)
  {
    const VelocitySample s1 = stage(t, x);
    const VelocitySample s2 = stage(t + h / 2, x + h / 2 * s1.vx);
    const VelocitySample s3 = stage(t + h / 2, x + h / 2 * s2.vx);
    const VelocitySample s4 = stage(t + h, x + h * s3.vx);
    const double gradient = std::max({std::abs(s1.dvx_dx), std::abs(s2.dvx_dx), std::abs(s3.dvx_dx),
                                      std::abs(s4.dvx_dx)});
    const bool node = s1.near_node || s2.near_node || s3.near_node || s4.near_node;
    const bool rough = node || h * gradient > policy.gradient_limit;
    if (rough && depth < policy.max_halvings) {
      const double mid = step(t, x, h / 2, depth + 1);
      return step(t + h / 2, mid, h / 2, depth + 1);
    }
    if (rough) {
      if (node) out.node_stalled = true;
      ++out.unresolved_steps;
    }
    depth_hint = std::max(depth_hint, depth);
    ++out.substeps;
    return x + h / 6 * (s1.vx + 2 * s2.vx + 2 * s3.vx + s4.vx);
  }
};

// Sum over slit edges e of the largest |x - e| with x on the grating; zero for
// smooth openings, which carry no edge waves.
double edge_sum(const GratingSpec& g)
{
  if (g.window != Window::Square) return 0;
  const double reach = g.half_extent();
  double sum = 0;
  for (int i = 0; i < g.n; ++i)
    for (double e : {g.left_edge(i), g.right_edge(i)}) sum += reach + std::abs(e - g.midpoint());
  return sum;
}

}  // namespace

double VelocityField::reference_density() const
{
  const GratingSpec& g = field.grating();
  if (g.window == Window::Square) return 1.0 / (g.n * g.width);
  double peak = 0;
  for (int i = 0; i < g.n; ++i) peak = std::max(peak, std::pow(initial_amplitude(g, g.center(i)), 2));
  return peak;
}

VelocitySample velocity_sample(const VelocityField& vf, double x, double t)
{
  const FieldSample f = evaluate(vf.field, x, t);
  const double hbar_m = kHbar / vf.field.beam().mass;
  VelocitySample s;
  s.density = std::norm(f.psi);
  if (s.density == 0) {
    s.near_node = true;
    return s;
  }
  const std::complex<double> ratio = f.dpsi / f.psi;
  s.vx = hbar_m * ratio.imag();
  s.dvx_dx = hbar_m * (f.d2psi / f.psi - ratio * ratio).imag();
  s.near_node = s.density < vf.epsilon_node * vf.reference_density();
  return s;
}

double velocity_x_spectral(const VelocityField& vf, double x, double t)
{
  const std::complex<double> psi = psi_spectral(vf.field, x, t);
  if (std::norm(psi) == 0) throw DomainError("velocity undefined at an exact node");
  return kHbar / vf.field.beam().mass * (dpsi_spectral(vf.field, x, t) / psi).imag();
}

double start_time(const VelocityField& vf, const StepPolicy& policy)
{
  const double lt = talbot_length(vf.field.grating(), vf.field.beam());
  return vf.field.time_at(policy.start_fraction * lt);
}

double base_step(const VelocityField& vf, const StepPolicy& policy)
{
  if (policy.steps_per_talbot < 1) throw ConfigError("steps_per_talbot must be >= 1");
  const double lt = talbot_length(vf.field.grating(), vf.field.beam());
  return vf.field.time_at(lt / policy.steps_per_talbot);
}

Trajectory integrate_trajectory(const VelocityField& vf, double x0, const std::vector<double>& record_times,
                                const StepPolicy& policy)
{
  return integrate_from(vf, start_time(vf, policy), x0, record_times, policy);
}

Trajectory integrate_from(const VelocityField& vf, double t0, double x0, const std::vector<double>& record_times,
                          const StepPolicy& policy)
{
  const double h = base_step(vf, policy);
  if (record_times.empty() || !std::is_sorted(record_times.begin(), record_times.end()) ||
      !(record_times.front() > t0) || !(t0 > 0))
    throw DomainError("record times must be ascending and later than a positive start time");

  Trajectory traj;
  traj.x0 = x0;
  Integrator rk{vf, policy, vf.epsilon_node * vf.reference_density(), vf.speed_limit(), traj};
  rk.edge_sum = edge_sum(vf.field.grating());
  auto record = [&](double t, double x) { traj.samples.push_back({t, x, rk.stage(t, x).vx}); };

  double t = t0, x = x0;
  record(t, x);
  long base_steps = 0;
  for (double target : record_times) {
    while (target - t > 1e-9 * h) {
      const double dt = std::min(h, target - t);
      x = rk.base(t, x, dt);
      t = target - t <= h ? target : t + dt;
      ++base_steps;
      if (t != target && policy.record_stride > 0 && base_steps % policy.record_stride == 0) record(t, x);
    }
    t = target;
    record(t, x);
  }
  return traj;
}

std::size_t TrajectoryEnsemble::stalled_count() const
{
  return std::count_if(records.begin(), records.end(), [](const Trajectory& r) { return r.node_stalled; });
}

Eigen::VectorXd TrajectoryEnsemble::positions(std::size_t j) const
{
  Eigen::VectorXd x(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) x(i) = records[i].samples.at(j).x;
  return x;
}

Eigen::VectorXd TrajectoryEnsemble::velocities(std::size_t j) const
{
  Eigen::VectorXd v(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) v(i) = records[i].samples.at(j).vx;
  return v;
}

std::size_t TrajectoryEnsemble::sample_index(double t) const
{
  if (times.empty()) throw DomainError("ensemble has no samples");
  std::size_t best = 0;
  for (std::size_t j = 1; j < times.size(); ++j)
    if (std::abs(times[j] - t) < std::abs(times[best] - t)) best = j;
  return best;
}

Eigen::VectorXd launch_points(const GratingSpec& g, std::size_t n_traj, Sampling sampling, std::uint64_t seed)
{
  g.validate();
  if (n_traj < 2) throw ConfigError("an ensemble needs at least two trajectories");
  Eigen::VectorXd x0(static_cast<Eigen::Index>(n_traj));
  std::mt19937_64 rng(seed);

  if (g.window == Window::Square) {
    // Quantile q in [0, 1) maps to slit floor(q n) and the matching offset inside it.
    for (std::size_t j = 0; j < n_traj; ++j) {
      const double q = sampling == Sampling::Equispaced ? (double(j) + 0.5) / double(n_traj) : uniform01(rng);
      const double scaled = q * g.n;
      const int slit = std::min(g.n - 1, static_cast<int>(scaled));
      x0(j) = g.left_edge(slit) + (scaled - slit) * g.width;
    }
  } else if (sampling == Sampling::UniformDensity) {
    // Rejection from the mixture of per-opening |psi|^2 profiles; the
    // acceptance ratio (sum e_i)^2 / (n sum e_i^2) is at most 1.
    const double a = g.gaussian_width;
    for (std::size_t j = 0; j < n_traj;) {
      const int slit = std::min(g.n - 1, static_cast<int>(uniform01(rng) * g.n));
      const double u1 = 1.0 - uniform01(rng), u2 = uniform01(rng);
      const double x = g.center(slit) + 0.5 * a * std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
      double sum = 0, sum_sq = 0;
      for (int i = 0; i < g.n; ++i) {
        const double u = (x - g.center(i)) / a;
        const double e = std::exp(-u * u);
        sum += e;
        sum_sq += e * e;
      }
      if (uniform01(rng) * g.n * sum_sq < sum * sum) x0(j++) = x;
    }
  } else {
    // Inverse of the tabulated cumulative of |psi(x, 0)|^2.
    const double lo = g.support(0).first, hi = g.support(g.n - 1).second;
    const auto cells = static_cast<Eigen::Index>(std::ceil((hi - lo) / g.gaussian_width * 256));
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(cells + 1, lo, hi);
    Eigen::VectorXd cum = Eigen::VectorXd::Zero(cells + 1);
    for (Eigen::Index i = 1; i <= cells; ++i) {
      const double f0 = std::pow(initial_amplitude(g, grid(i - 1)), 2);
      const double f1 = std::pow(initial_amplitude(g, grid(i)), 2);
      cum(i) = cum(i - 1) + 0.5 * (f0 + f1) * (grid(i) - grid(i - 1));
    }
    cum /= cum(cells);
    for (std::size_t j = 0; j < n_traj; ++j) {
      const double q = (double(j) + 0.5) / double(n_traj);
      const auto it = std::upper_bound(cum.data(), cum.data() + cum.size(), q);
      const Eigen::Index i = std::clamp<Eigen::Index>(it - cum.data(), 1, cells);
      const double w = (q - cum(i - 1)) / (cum(i) - cum(i - 1));
      x0(j) = grid(i - 1) + w * (grid(i) - grid(i - 1));
    }
  }
  std::sort(x0.data(), x0.data() + x0.size());
  return x0;
}

TrajectoryEnsemble integrate_ensemble(const VelocityField& vf, const Eigen::VectorXd& x0,
                                      const std::vector<double>& record_times, const StepPolicy& policy)
{
  if (x0.size() < 1) throw ConfigError("ensemble needs at least one launch point");
  if (!std::is_sorted(x0.data(), x0.data() + x0.size())) throw ConfigError("launch points must be ascending");
  TrajectoryEnsemble ens;
  ens.records.resize(static_cast<std::size_t>(x0.size()));
  detail::parallel_for(ens.records.size(), [&](std::size_t i) {
    ens.records[i] = integrate_trajectory(vf, x0(static_cast<Eigen::Index>(i)), record_times, policy);
  });
  for (const TrajectorySample& s : ens.records.front().samples) ens.times.push_back(s.t);
  return ens;
}

TrajectoryEnsemble launch_ensemble(const VelocityField& vf, std::size_t n_traj, Sampling sampling,
                                   std::uint64_t seed, const std::vector<double>& record_times,
                                   const StepPolicy& policy)
{
  TrajectoryEnsemble ens =
      integrate_ensemble(vf, launch_points(vf.field.grating(), n_traj, sampling, seed), record_times, policy);
  ens.seed = seed;
  return ens;
}

std::size_t count_order_violations(const TrajectoryEnsemble& ensemble)
{
  std::size_t violations = 0;
  for (std::size_t j = 0; j < ensemble.times.size(); ++j)
    for (std::size_t i = 1; i < ensemble.records.size(); ++i)
      if (!(ensemble.records[i - 1].samples[j].x < ensemble.records[i].samples[j].x)) ++violations;
  return violations;
}

}  // namespace talbot
