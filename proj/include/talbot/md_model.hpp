#ifndef TALBOT_MD_MODEL_HPP
#define TALBOT_MD_MODEL_HPP

#include "talbot/spectrum.hpp"
#include "talbot/wavefield.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace talbot {

/// Cum(k) = \int_{-inf}^k |c|^2 dk'. Inside the grid it is the running
/// trapezoid sum, interpolated by cubic Hermite with slopes |c|^2 (monotone,
/// since each slope is at most twice the cell average); outside, the
/// closed-form tail mass when the spectrum carries its grating, zero mass
/// otherwise.
class CumulativeSpectrum {
 public:
  explicit CumulativeSpectrum(const MomentumSpectrum& spectrum);

  double operator()(double k) const;
  /// k with Cum(k) = u, for u in (0, total()).
  double inverse(double u) const;
  double total() const { return total_; }

 private:
  double tail_above(double k) const;  // \int_k^inf |c|^2, k >= k_max
  double cell(Eigen::Index i, double w) const;  // grid part at k_i + w dk

  const MomentumSpectrum* spectrum_;
  Eigen::VectorXd cum_;
  double lower_tail_ = 0;
  double total_ = 0;
};

/// Screen arrival probability of straight-line transport from each slit.
struct ArrivalProbability {
  double y = 0;
  Eigen::VectorXd x_grid;
  Eigen::VectorXd total;      // 1/m
  Eigen::MatrixXd per_slit;   // n rows, one per opening
  double grid_mass = 0;       // trapezoid of total over x_grid
  double outside_mass = 0;    // mass beyond the grid ends (square openings)

  double mass() const { return grid_mass + outside_mass; }
};

/// P_i(x) = (1 / n delta) [Cum((x - x_l)/tau) - Cum((x - x_r)/tau)], tau = hbar t / m,
/// for square openings; Gaussian openings use the weight psi0(x') times the
/// i-th Gaussian in the convolution with |c|^2 / tau. t must be positive.
ArrivalProbability arrival_probability(const MomentumSpectrum& spectrum, const GratingSpec& grating,
                                       const ParticleBeam& beam, double t, const Eigen::VectorXd& x_grid);

/// Straight path x(t) = x0 + hbar k_x t / m.
struct MDTrajectory {
  double x0 = 0;
  double kx = 0;
  double position(const ParticleBeam& beam, double t) const { return x0 + kx * beam.spreading(t); }
};

/// x0 from |psi(x, 0)|^2 and k_x from |c|^2, independent; deterministic per seed.
std::vector<MDTrajectory> sample_md_ensemble(const MomentumSpectrum& spectrum, const GratingSpec& grating,
                                             std::size_t n_traj, std::uint64_t seed);

/// Two paths from the centers of openings a and b that reach x_star at time t.
std::pair<MDTrajectory, MDTrajectory> meeting_pair(const GratingSpec& grating, const ParticleBeam& beam,
                                                   int slit_a, int slit_b, double x_star, double t);

/// Shared grid for MD and quantum profiles at distance y: |x| up to the
/// openings plus tau times 64 diffraction orders, 8192 points.
Eigen::VectorXd discrepancy_grid(const WaveField& field, double y);

/// L1 distance between P and |psi|^2 at distance y, both normalized to
/// unit mass on the grid.
double near_field_discrepancy(const WaveField& field, double y,
                              const std::optional<Eigen::VectorXd>& x_grid = std::nullopt);

}  // namespace talbot

#endif
