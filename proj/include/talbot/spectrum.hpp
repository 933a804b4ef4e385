#ifndef TALBOT_SPECTRUM_HPP
#define TALBOT_SPECTRUM_HPP

#include "talbot/beam_grating.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>

namespace talbot {

/// Momentum amplitude c(k) = (2 pi)^{-1/2} \int psi(x,0) exp(-ikx) dx (units m^{1/2}).
///
/// The grid holds the sampled amplitude; `tail_mass` is the part of
/// \int |c|^2 dk lying outside [-k_max, k_max], so grid_mass() + tail_mass is
/// the full Parseval mass. When `grating` is set, amplitude() evaluates the
/// closed form anywhere; otherwise it interpolates the grid.
struct MomentumSpectrum {
  Eigen::VectorXd k_grid;
  Eigen::VectorXcd c_values;
  double k_max = 0;
  double dk = 0;
  bool analytic = false;
  double tail_mass = 0;
  std::optional<GratingSpec> grating;

  std::complex<double> amplitude(double k) const;
  double density(double k) const { return std::norm(amplitude(k)); }
  /// Trapezoid mass of |c|^2 over the grid.
  double grid_mass() const;
  double total_mass() const { return grid_mass() + tail_mass; }
};

/// 2*half_count + 1 uniformly spaced points on [-k_max, k_max].
Eigen::VectorXd symmetric_grid(double half_width, Eigen::Index half_count);

/// Default grid: 2^14 + 1 points out to 64 diffraction orders (k_max = 128 pi / d).
Eigen::VectorXd default_k_grid(const GratingSpec& grating);

/// Grid sized for spectral synthesis at distance y that is accurate on
/// |x - midpoint| <= x_half: k_max reaches ten times the largest stationary
/// wavenumber x_half / (hbar t / m) and the alias window 2 pi / dk holds the
/// whole band after propagation. The cut-off error inside the window falls
/// as 1 / (t k_max^2); ten times keeps it below 1e-6 relative at L_T / 4.
Eigen::VectorXd k_grid_for_window(const GratingSpec& grating, const ParticleBeam& beam, double y,
                                  double x_half);

/// Closed form of c(k): the n-slit sinc expression for square openings,
/// the Gaussian envelope times the grating factor otherwise. Poles of the
/// grating factor are replaced by their limits.
std::complex<double> momentum_amplitude(const GratingSpec& grating, double k);

/// \int_{|k| > k_cut} |c(k)|^2 dk, from the cosine expansion of |c|^2 for
/// square openings and Gauss-Legendre quadrature for Gaussian ones.
double spectral_tail_mass(const GratingSpec& grating, double k_cut);

MomentumSpectrum spectrum_analytic(const GratingSpec& grating, const ParticleBeam& beam,
                                   const Eigen::VectorXd& k_grid);

/// Discrete Fourier transform of sampled psi(x,0). Samples are treated as
/// cell averages of a piecewise-constant function, which makes the result
/// exact for square openings whose edges fall on cell boundaries. The k-grid
/// is the natural FFT grid refined by `oversample` (zero padding).
MomentumSpectrum spectrum_numeric(const Eigen::VectorXcd& psi0, const Eigen::VectorXd& x_grid,
                                  int oversample = 1);

}  // namespace talbot

#endif
