#ifndef TALBOT_BEAM_GRATING_HPP
#define TALBOT_BEAM_GRATING_HPP

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace talbot {

/// Reduced Planck constant, J s (CODATA 2018, exact by SI definition of h).
inline constexpr double kHbar = 1.054571817e-34;

/// Incident plane wave moving along +y. Immutable after construction; the
/// speed is derived from the wavenumber so that hbar*k = m*v holds exactly.
struct ParticleBeam {
  double mass = 0;        // kg
  double speed = 0;       // m/s
  double wavenumber = 0;  // 1/m
  double wavelength = 0;  // m
  double omega = 0;       // 1/s, hbar k^2 / 2m (global phase only)
  double norm_b = 1;      // amplitude of the longitudinal plane wave

  static ParticleBeam from_wavenumber(double mass, double wavenumber);
  static ParticleBeam from_wavelength(double mass, double wavelength);
  static ParticleBeam from_speed(double mass, double speed);

  /// Flight time to the plane at distance y behind the grating: t = y m / (hbar k).
  double time_at(double y) const { return y / speed; }
  double distance_at(double t) const { return speed * t; }
  /// hbar t / m, the free-spreading parameter (m^2).
  double spreading(double t) const { return kHbar * t / mass; }
};

enum class Window { Square, Gaussian };

std::string to_string(Window w);
Window window_from_string(const std::string& s);

/// n identical openings with period d. Square openings have width delta;
/// Gaussian openings are exp(-(x-x_c)^2/a^2) around each slit center.
struct GratingSpec {
  int n = 1;
  double period = 0;  // d, m
  double width = 0;   // delta, m
  Window window = Window::Square;
  double gaussian_width = 0;  // a, m
  bool centered = true;

  void validate() const;
  double center(int i) const;
  double left_edge(int i) const { return center(i) - width / 2; }
  double right_edge(int i) const { return center(i) + width / 2; }
  /// Support of opening i used for quadrature (square: the slit, Gaussian: +-6.5 a).
  std::pair<double, double> support(int i) const;
  /// Half-width of the smallest symmetric interval around the grating midpoint
  /// that holds every opening.
  double half_extent() const;
  double midpoint() const;
};

/// Normalization constant of the Gaussian window, chosen so that \int |psi0|^2 = 1.
double gaussian_norm(const GratingSpec& grating);

/// Mass carried by cross terms between different Gaussian openings.
double gaussian_cross_mass(const GratingSpec& grating);

/// psi(x, 0) at a single point (real; the common phase is fixed to zero).
double initial_amplitude(const GratingSpec& grating, double x);

struct SampledWavefunction {
  Eigen::VectorXcd values;
  std::vector<std::string> warnings;
};

/// Samples psi(x, 0) on a uniform grid and rescales to unit discrete norm
/// sum |psi_i|^2 dx = 1. Throws ResolutionError below 16 samples per opening.
SampledWavefunction build_initial_wavefunction(const GratingSpec& grating,
                                               const Eigen::VectorXd& x_grid);

/// L_T = d^2 / lambda.
double talbot_length(const GratingSpec& grating, const ParticleBeam& beam);

/// Uniform spacing of a grid; throws ConfigError if the grid is not uniform.
double uniform_spacing(const Eigen::VectorXd& grid, double rel_tol = 1e-9);

}  // namespace talbot

#endif
