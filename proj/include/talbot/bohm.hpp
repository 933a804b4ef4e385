#ifndef TALBOT_BOHM_HPP
#define TALBOT_BOHM_HPP

#include "talbot/wavefield.hpp"

#include <cstdint>
#include <vector>

namespace talbot {

/// Guidance field v = (hbar / m) (k e_y + Im(d_x psi / psi) e_x).
struct VelocityField {
  WaveField field;
  /// Density floor relative to the peak of |psi(x, 0)|^2; below it a point
  /// counts as node-proximal.
  double epsilon_node = 1e-8;

  double longitudinal_speed() const { return field.beam().speed; }
  /// hbar k_max / m, the bound applied to |v_x|.
  double speed_limit() const { return kHbar * field.spectrum().k_max / field.beam().mass; }
  /// max |psi(x, 0)|^2, the reference for epsilon_node.
  double reference_density() const;
};

struct VelocitySample {
  double vx = 0;       // m/s
  double dvx_dx = 0;   // 1/s
  double density = 0;  // 1/m
  bool near_node = false;
};

/// v_x and its x-derivative from the closed-form psi, d_x psi and d_x^2 psi;
/// no finite differencing is involved.
VelocitySample velocity_sample(const VelocityField& vf, double x, double t);

inline double velocity_x(const VelocityField& vf, double x, double t)
{
  return velocity_sample(vf, x, t).vx;
}

/// v_x with psi and d_x psi synthesized from the k-grid (d_x inserts ik).
double velocity_x_spectral(const VelocityField& vf, double x, double t);

/// Fixed-step RK4 schedule. Behind sharp edges each base step is first cut
/// into equal pieces no longer than chirp_limit t sqrt(2 pi tau) / S, with S
/// the summed edge distances: a time-only bound on h |dv_x/dx| in the early
/// edge-wave regime, identical for all trajectories. Each piece is then split
/// in half, recursively up to max_halvings times, while h |dv_x/dx| >
/// gradient_limit at any stage or a stage lands below the node floor.
struct StepPolicy {
  int steps_per_talbot = 4000;
  int max_halvings = 12;
  double gradient_limit = 0.5;
  double chirp_limit = 0.25;  // 0 disables the common early split
  double start_fraction = 1e-3;  // t_eps = start_fraction L_T / v
  int record_stride = 0;         // also record every record_stride base steps (0: never)
};

struct TrajectorySample {
  double t = 0;   // s
  double x = 0;   // m
  double vx = 0;  // m/s
};

struct Trajectory {
  double x0 = 0;
  std::vector<TrajectorySample> samples;
  /// Reached the halving limit while a stage sat below the node floor.
  bool node_stalled = false;
  /// Steps accepted at the halving limit with h |dv_x/dx| still above the bound.
  std::int64_t unresolved_steps = 0;
  std::int64_t substeps = 0;
};

/// Start time t_eps and base step for a policy.
double start_time(const VelocityField& vf, const StepPolicy& policy);
double base_step(const VelocityField& vf, const StepPolicy& policy);

/// Integrates dx/dt = v_x from (t_eps, x0) to the last entry of `record_times`
/// (ascending, all > t_eps), landing exactly on each one. The first sample is
/// the launch point at t_eps.
Trajectory integrate_trajectory(const VelocityField& vf, double x0,
                                const std::vector<double>& record_times, const StepPolicy& policy = {});

/// Same schedule from an arbitrary state (t0 > 0, x0), e.g. to continue a
/// recorded path.
Trajectory integrate_from(const VelocityField& vf, double t0, double x0, const std::vector<double>& record_times,
                          const StepPolicy& policy = {});

enum class Sampling { UniformDensity, Equispaced };

struct TrajectoryEnsemble {
  std::vector<Trajectory> records;  // sorted by x0
  std::vector<double> times;        // shared sample times
  std::uint64_t seed = 0;
  double y0 = 0;

  std::size_t stalled_count() const;
  /// Positions of every trajectory at sample index j.
  Eigen::VectorXd positions(std::size_t j) const;
  Eigen::VectorXd velocities(std::size_t j) const;
  /// Index of the sample time closest to t.
  std::size_t sample_index(double t) const;
};

/// Launch points drawn from |psi(x, 0)|^2 (square openings: uniform over the
/// union of slits) or spread evenly in probability, sorted ascending.
Eigen::VectorXd launch_points(const GratingSpec& grating, std::size_t n_traj, Sampling sampling,
                              std::uint64_t seed);

/// Integrates every launch point (ascending) in parallel; records stay in
/// launch order.
TrajectoryEnsemble integrate_ensemble(const VelocityField& vf, const Eigen::VectorXd& x0,
                                      const std::vector<double>& record_times, const StepPolicy& policy = {});

TrajectoryEnsemble launch_ensemble(const VelocityField& vf, std::size_t n_traj, Sampling sampling,
                                   std::uint64_t seed, const std::vector<double>& record_times,
                                   const StepPolicy& policy = {});

/// Adjacent pairs out of x0 order, summed over all sample times.
std::size_t count_order_violations(const TrajectoryEnsemble& ensemble);

/// Deterministic uniform double in [0, 1) from the top 53 bits.
template <typename Engine>
double uniform01(Engine& rng)
{
  return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace talbot

#endif
