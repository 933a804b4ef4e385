#ifndef TALBOT_WAVEFIELD_HPP
#define TALBOT_WAVEFIELD_HPP

#include "talbot/beam_grating.hpp"
#include "talbot/spectrum.hpp"

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

namespace talbot {

/// Transverse wave function psi(x, t) behind the grating. Immutable and
/// cheap to copy (the spectrum is shared).
class WaveField {
 public:
  WaveField(MomentumSpectrum spectrum, ParticleBeam beam, GratingSpec grating);

  const MomentumSpectrum& spectrum() const { return *spectrum_; }
  const ParticleBeam& beam() const { return beam_; }
  const GratingSpec& grating() const { return grating_; }

  double time_at(double y) const { return beam_.time_at(y); }
  /// Half-width of the window |x - midpoint| <= pi / dk on which the spectral
  /// quadrature is free of aliasing.
  double alias_half_window() const { return std::numbers::pi / spectrum_->dk; }

 private:
  std::shared_ptr<const MomentumSpectrum> spectrum_;
  ParticleBeam beam_;
  GratingSpec grating_;
};

/// psi and its first two x-derivatives at one point.
struct FieldSample {
  std::complex<double> psi;
  std::complex<double> dpsi;
  std::complex<double> d2psi;
};

/// Free-particle propagator integrated in closed form over each opening:
/// Fresnel integrals for square slits, the spreading Gaussian otherwise.
/// Exact for the idealized window; t = 0 returns the initial state.
FieldSample evaluate(const WaveField& field, double x, double t);

inline std::complex<double> psi_kernel(const WaveField& field, double x, double t)
{
  return evaluate(field, x, t).psi;
}

/// Quadrature of psi(x,t) = (2 pi)^{-1/2} \int c(k) exp(ikx - i hbar k^2 t / 2m) dk
/// over the spectrum's k-grid (trapezoid rule).
std::complex<double> psi_spectral(const WaveField& field, double x, double t);

/// Spatial derivative by the same quadrature with the factor ik inserted.
std::complex<double> dpsi_spectral(const WaveField& field, double x, double t);

/// Spectral synthesis on many points; uniform grids use a chirp-z transform.
Eigen::VectorXcd psi_spectral(const WaveField& field, const Eigen::VectorXd& x, double t);

/// One full alias period of the spectral field sampled at the FFT-conjugate
/// spacing, so that sum |psi|^2 dx is the discrete Parseval mass.
struct SpectralPeriod {
  Eigen::VectorXd x;
  Eigen::VectorXcd psi;
  double dx = 0;
};
SpectralPeriod spectral_period(const WaveField& field, double t);

struct FresnelOptions {
  double max_phase_step = std::numbers::pi / 8;  // per panel
  double rel_tol = 1e-11;
  int max_depth = 24;
  std::size_t max_panels = std::size_t(1) << 22;
};

/// Direct quadrature of the Fresnel kernel against psi(x', 0):
/// psi(x,t) = (m / 2 pi i hbar t)^{1/2} \int psi(x',0) exp(i m (x-x')^2 / 2 hbar t) dx'.
/// Panels are laid out so the kernel phase changes by at most
/// max_phase_step across each one, then bisected until Gauss-Legendre
/// estimates agree. Throws DomainError for t <= 0 and QuadratureError when
/// the panel budget runs out.
std::complex<double> psi_fresnel(const WaveField& field, double x, double t,
                                 const FresnelOptions& options = {});

/// Far-field form psi = (m / 2 pi i hbar t)^{1/2} exp(i m x^2 / 2 hbar t) sqrt(2 pi) c(x m / hbar t),
/// whose density is (m / hbar t) |c(x m / hbar t)|^2.
std::complex<double> psi_farfield(const WaveField& field, double x, double t);

/// Largest kernel phase dropped by the far-field form, max x'^2 m / (2 hbar t)
/// over the openings. The form is trustworthy when this is well below 1.
double farfield_phase_error(const WaveField& field, double t);

enum class Propagator { Spectral, Kernel, Fresnel, FarField };

struct IntensityProfile {
  double y = 0;
  Eigen::VectorXd x_grid;
  Eigen::VectorXd density;
  std::optional<Eigen::VectorXd> md_density;

  /// Trapezoid mass over the grid.
  double mass() const;
};

/// 4096 points on |x - midpoint| <= max(3 n d, (hbar t / m) k_max).
Eigen::VectorXd default_profile_grid(const WaveField& field, double y);

IntensityProfile intensity_profile(const WaveField& field, double y, const Eigen::VectorXd& x_grid,
                                   Propagator method = Propagator::Spectral);

std::vector<IntensityProfile> carpet(const WaveField& field, const std::vector<double>& y_list,
                                     const Eigen::VectorXd& x_grid,
                                     Propagator method = Propagator::Spectral);

/// Trapezoid integral of samples on a uniform grid.
double trapezoid(const Eigen::VectorXd& values, double dx);

}  // namespace talbot

#endif
