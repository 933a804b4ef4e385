#include "talbot/beam_grating.hpp"

#include "talbot/errors.hpp"

#include <cmath>
#include <numbers>

namespace talbot {

namespace {

void require_positive(double value, const char* name)
{
  if (!(value > 0) || !std::isfinite(value))
    throw ConfigError(std::string(name) + " must be positive and finite");
}

}  // namespace

ParticleBeam ParticleBeam::from_wavenumber(double mass, double wavenumber)
{
  require_positive(mass, "mass");
  require_positive(wavenumber, "wavenumber");
  ParticleBeam beam;
  beam.mass = mass;
  beam.wavenumber = wavenumber;
  beam.wavelength = 2 * std::numbers::pi / wavenumber;
  beam.speed = kHbar * wavenumber / mass;
  beam.omega = kHbar * wavenumber * wavenumber / (2 * mass);
  return beam;
}

ParticleBeam ParticleBeam::from_wavelength(double mass, double wavelength)
{
  require_positive(wavelength, "wavelength");
  ParticleBeam beam = from_wavenumber(mass, 2 * std::numbers::pi / wavelength);
  beam.wavelength = wavelength;
  return beam;
}

ParticleBeam ParticleBeam::from_speed(double mass, double speed)
{
  require_positive(mass, "mass");
  require_positive(speed, "speed");
  ParticleBeam beam = from_wavenumber(mass, mass * speed / kHbar);
  beam.speed = speed;
  return beam;
}

std::string to_string(Window w)
{
  return w == Window::Square ? "square" : "gaussian";
}

Window window_from_string(const std::string& s)
{
  if (s == "square") return Window::Square;
  if (s == "gaussian") return Window::Gaussian;
  throw ConfigError("unknown window '" + s + "' (expected square or gaussian)");
}

void GratingSpec::validate() const
{
  if (n < 1) throw ConfigError("slit count n must be >= 1");
  require_positive(period, "period d");
  if (window == Window::Square) {
    require_positive(width, "slit width delta");
    if (n > 1 && !(width < period)) throw ConfigError("slit width must be smaller than the period");
  } else {
    require_positive(gaussian_width, "gaussian width a");
  }
}

double GratingSpec::midpoint() const
{
  return centered ? 0.0 : 0.5 * (n - 1) * period;
}

double GratingSpec::center(int i) const
{
  return centered ? (i - 0.5 * (n - 1)) * period : i * period;
}

std::pair<double, double> GratingSpec::support(int i) const
{
  const double c = center(i);
  const double half = window == Window::Square ? width / 2 : 6.5 * gaussian_width;
  return {c - half, c + half};
}

double GratingSpec::half_extent() const
{
  const double half = window == Window::Square ? width / 2 : 3 * gaussian_width;
  return 0.5 * (n - 1) * period + half;
}

double gaussian_norm(const GratingSpec& g)
{
  // \int exp(-(x-xi)^2/a^2 - (x-xj)^2/a^2) dx = sqrt(pi/2) a exp(-(xi-xj)^2/(2a^2))
  const double a = g.gaussian_width;
  double sum = 0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double s = (i - j) * g.period;
      sum += std::exp(-s * s / (2 * a * a));
    }
  return 1.0 / std::sqrt(std::sqrt(std::numbers::pi / 2) * a * sum);
}

double gaussian_cross_mass(const GratingSpec& g)
{
  if (g.window != Window::Gaussian || g.n < 2) return 0;
  const double a = g.gaussian_width;
  const double norm = gaussian_norm(g);
  double cross = 0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      if (i == j) continue;
      const double s = (i - j) * g.period;
      cross += std::exp(-s * s / (2 * a * a));
    }
  return norm * norm * std::sqrt(std::numbers::pi / 2) * a * cross;
}

double initial_amplitude(const GratingSpec& g, double x)
{
  if (g.window == Window::Square) {
    for (int i = 0; i < g.n; ++i)
      if (x >= g.left_edge(i) && x <= g.right_edge(i)) return 1.0 / std::sqrt(g.n * g.width);
    return 0;
  }
  const double a = g.gaussian_width;
  double sum = 0;
  for (int i = 0; i < g.n; ++i) {
    const double u = (x - g.center(i)) / a;
    sum += std::exp(-u * u);
  }
  return gaussian_norm(g) * sum;
}

double uniform_spacing(const Eigen::VectorXd& grid, double rel_tol)
{
  if (grid.size() < 2) throw ConfigError("grid needs at least two points");
  const double dx = (grid(grid.size() - 1) - grid(0)) / double(grid.size() - 1);
  if (!(dx > 0)) throw ConfigError("grid must be increasing");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    if (std::abs(grid(i) - grid(i - 1) - dx) > rel_tol * std::max(1.0, std::abs(grid(i)) / dx) * dx)
      throw ConfigError("grid is not uniform");
  return dx;
}

SampledWavefunction build_initial_wavefunction(const GratingSpec& g, const Eigen::VectorXd& x_grid)
{
  g.validate();
  const double dx = uniform_spacing(x_grid);
  const double feature = g.window == Window::Square ? g.width : g.gaussian_width;
  if (feature / dx < 16)
    throw ResolutionError("grid too coarse: " + std::to_string(feature / dx) +
                          " samples per opening, need >= 16");
  for (int i = 0; i < g.n; ++i) {
    const auto [lo, hi] = g.window == Window::Square ? std::pair{g.left_edge(i), g.right_edge(i)}
                                                     : std::pair{g.center(i) - 3 * g.gaussian_width,
                                                                 g.center(i) + 3 * g.gaussian_width};
    if (lo < x_grid(0) || hi > x_grid(x_grid.size() - 1))
      throw ResolutionError("grid does not span opening " + std::to_string(i));
  }

  SampledWavefunction out;
  out.values = x_grid.unaryExpr([&](double x) { return std::complex<double>(initial_amplitude(g, x)); });
  const double mass = out.values.squaredNorm() * dx;
  if (!(mass > 0)) throw ResolutionError("no grid sample falls inside an opening");
  out.values /= std::sqrt(mass);

  const double cross = gaussian_cross_mass(g);
  if (cross > 1e-6)
    out.warnings.push_back("gaussian openings overlap: cross-term mass " + std::to_string(cross));
  return out;
}

double talbot_length(const GratingSpec& g, const ParticleBeam& beam)
{
  return g.period * g.period / beam.wavelength;
}

}  // namespace talbot
