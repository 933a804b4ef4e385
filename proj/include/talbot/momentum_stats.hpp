#ifndef TALBOT_MOMENTUM_STATS_HPP
#define TALBOT_MOMENTUM_STATS_HPP

#include "talbot/bohm.hpp"
#include "talbot/spectrum.hpp"

#include <Eigen/Dense>

namespace talbot {

/// Unit-mass histogram over bins symmetric about zero. Samples outside the
/// range are counted but carry no mass.
struct Histogram {
  Eigen::VectorXd bin_edges;
  Eigen::VectorXd density;
  std::size_t sample_count = 0;  // samples inside the range
  std::size_t outside = 0;
  std::size_t excluded = 0;  // node-stalled trajectories left out

  Eigen::VectorXd centers() const;
  double width() const { return bin_edges(1) - bin_edges(0); }
};

struct MomentumHistogram : Histogram {
  double y = 0;
};

/// `bins` equal bins on [-half_width, half_width].
Eigen::VectorXd symmetric_edges(double half_width, int bins);

/// Unit-mass histogram of `samples` on the given edges.
Histogram histogram(const Eigen::VectorXd& samples, const Eigen::VectorXd& edges);

/// 81 bins over +-4 (2 pi hbar / d), the default for momentum plots.
Eigen::VectorXd default_momentum_edges(const GratingSpec& grating, int bins = 81);

/// Histogram of p_x = m v_x(x_i(t_y), t_y) at the stored sample nearest to
/// t_y = y / v. Node-stalled trajectories are excluded and tallied.
MomentumHistogram bohm_momentum_histogram(const TrajectoryEnsemble& ensemble, const VelocityField& vf,
                                          double y, const Eigen::VectorXd& edges);

/// |c(p / hbar)|^2 / hbar at each p (units s / (kg m)).
Eigen::VectorXd quantum_momentum_density(const MomentumSpectrum& spectrum, const Eigen::VectorXd& p_grid);

/// Bin averages of |c(p / hbar)|^2 / hbar from the cumulative, rescaled to
/// unit mass over the histogram range so they compare with a Histogram.
Eigen::VectorXd binned_quantum_density(const MomentumSpectrum& spectrum, const Eigen::VectorXd& edges);

struct JacobianDensity {
  Eigen::VectorXd density;
  /// False when the dropped kernel phase exceeds pi / 4, where the map
  /// x -> p = m x / t is no longer the Bohmian one.
  bool valid = false;
};

/// |psi(p t / m, t)|^2 t / m, the far-field change of variables from position
/// to momentum with d^2 S / dx^2 = m / t.
JacobianDensity farfield_jacobian_density(const WaveField& field, double t, const Eigen::VectorXd& p_grid);

/// t dv_x/dx from a central difference of v_x with step h (m).
double velocity_gradient_probe(const VelocityField& vf, double x, double t, double h);

/// L1 distance of two densities on a common uniform grid of spacing dx,
/// each first scaled to unit mass. In [0, 2].
double distribution_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double dx);

}  // namespace talbot

#endif
