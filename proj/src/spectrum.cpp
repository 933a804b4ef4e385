#include "talbot/spectrum.hpp"

#include "talbot/errors.hpp"
#include "talbot/special_functions.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace talbot {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(n u) / sin(u) evaluated on the reduced argument so that the ratio stays
// accurate next to the principal maxima u = j pi.
double grating_factor(int n, double u)
{
  const double j = std::round(u / kPi);
  const double r = u - j * kPi;
  const double sign = (static_cast<long long>(j) * (n - 1)) % 2 == 0 ? 1.0 : -1.0;
  if (std::abs(std::sin(r)) < 1e-12) return sign * n * std::cos(n * r) / std::cos(r);
  return sign * std::sin(n * r) / std::sin(r);
}

}  // namespace

Eigen::VectorXd symmetric_grid(double half_width, Eigen::Index half_count)
{
  if (!(half_width > 0) || half_count < 1) throw ConfigError("symmetric grid needs positive extent");
  Eigen::VectorXd grid(2 * half_count + 1);
  const double step = half_width / double(half_count);
  for (Eigen::Index i = 0; i < grid.size(); ++i) grid(i) = double(i - half_count) * step;
  return grid;
}

Eigen::VectorXd default_k_grid(const GratingSpec& g)
{
  return symmetric_grid(128 * kPi / g.period, 8192);
}

Eigen::VectorXd k_grid_for_window(const GratingSpec& g, const ParticleBeam& beam, double y,
                                  double x_half)
{
  if (y < 0 || !(x_half > 0)) throw ConfigError("k-grid window needs y >= 0 and x_half > 0");
  const double tau = beam.spreading(beam.time_at(y));
  const double base = 128 * kPi / g.period;
  const double k_max = tau > 0 ? std::min(std::max(base, 10 * x_half / tau), 64 * base) : 8 * base;
  const double window = 2.4 * (tau * k_max + x_half + g.half_extent());
  const double dk = 2 * kPi / window;
  const auto half = static_cast<Eigen::Index>(std::ceil(k_max / dk));
  if (half > (Eigen::Index(1) << 23)) throw ResolutionError("k-grid for this window exceeds 2^24 points");
  return symmetric_grid(double(half) * dk, half);
}

std::complex<double> momentum_amplitude(const GratingSpec& g, double k)
{
  const double factor = grating_factor(g.n, k * g.period / 2);
  std::complex<double> c;
  if (g.window == Window::Square) {
    const double envelope = 0.5 * g.width * sinc(k * g.width / 2);
    c = std::sqrt(2 / (kPi * g.n * g.width)) * envelope * factor;
  } else {
    const double a = g.gaussian_width;
    c = gaussian_norm(g) * (a / std::sqrt(2.0)) * std::exp(-k * k * a * a / 4) * factor;
  }
  const double shift = g.midpoint();
  if (shift != 0) c *= std::polar(1.0, -k * shift);
  return c;
}

double spectral_tail_mass(const GratingSpec& g, double k_cut)
{
  g.validate();
  k_cut = std::abs(k_cut);
  if (g.window == Window::Square) {
    // |c|^2 = (pi n delta k^2)^{-1} sum_j A_j cos(a_j k), sum_j A_j = 0
    const int n = g.n;
    const double delta = g.width;
    const double d = g.period;
    if (k_cut == 0) return 1.0;
    auto cosine_tail = [k_cut](double a) {
      // \int_K^inf cos(a k) / k^2 dk
      if (a == 0) return 1.0 / k_cut;
      return std::cos(a * k_cut) / k_cut - a * sine_integral_tail(a * k_cut);
    };
    double sum = n * cosine_tail(0) - n * cosine_tail(delta);
    for (int s = 1; s < n; ++s) {
      const double w = n - s;
      sum += 2 * w * cosine_tail(s * d) - w * cosine_tail(s * d + delta) -
             w * cosine_tail(s * d - delta);
    }
    return 2 * sum / (kPi * n * delta);
  }

  const double a = g.gaussian_width;
  const double upper = k_cut + 14 / a;
  const double panel = std::min(0.5 / a, 0.25 / std::max(1.0, double(g.n - 1)) / g.period * 2 * kPi);
  const auto panels = static_cast<int>(std::ceil((upper - k_cut) / panel));
  const auto [nodes, weights] = gauss_legendre<double>(16);
  const double h = (upper - k_cut) / panels;
  double sum = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = k_cut + (p + 0.5) * h;
    for (std::size_t q = 0; q < nodes.size(); ++q)
      sum += weights[q] * std::norm(momentum_amplitude(g, mid + 0.5 * h * nodes[q]));
  }
  return 2 * sum * 0.5 * h;
}

std::complex<double> MomentumSpectrum::amplitude(double k) const
{
  if (grating) return momentum_amplitude(*grating, k);
  if (k < k_grid(0) || k > k_grid(k_grid.size() - 1)) return 0;
  const double pos = (k - k_grid(0)) / dk;
  const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), k_grid.size() - 2);
  const double w = pos - double(i);
  return (1 - w) * c_values(i) + w * c_values(i + 1);
}

double MomentumSpectrum::grid_mass() const
{
  const Eigen::Index n = c_values.size();
  if (n < 2) return 0;
  return (c_values.squaredNorm() - 0.5 * (std::norm(c_values(0)) + std::norm(c_values(n - 1)))) * dk;
}

MomentumSpectrum spectrum_analytic(const GratingSpec& g, const ParticleBeam& beam,
                                   const Eigen::VectorXd& k_grid)
{
  (void)beam;  // c(k) does not depend on the longitudinal motion
  g.validate();
  if (!g.centered) throw UnsupportedConfiguration("closed-form spectrum assumes a centered grating");
  MomentumSpectrum s;
  s.dk = uniform_spacing(k_grid);
  s.k_grid = k_grid;
  s.k_max = std::max(std::abs(k_grid(0)), std::abs(k_grid(k_grid.size() - 1)));
  if (std::abs(k_grid(0) + k_grid(k_grid.size() - 1)) > 1e-9 * s.k_max)
    throw ConfigError("k-grid must be symmetric about zero");
  s.c_values = k_grid.unaryExpr([&](double k) { return momentum_amplitude(g, k); });
  s.analytic = true;
  s.grating = g;
  s.tail_mass = spectral_tail_mass(g, s.k_max);
  return s;
}

MomentumSpectrum spectrum_numeric(const Eigen::VectorXcd& psi0, const Eigen::VectorXd& x_grid,
                                  int oversample)
{
  if (psi0.size() != x_grid.size()) throw ConfigError("psi0 and x_grid sizes differ");
  if (oversample < 1) throw ConfigError("oversample must be >= 1");
  const double dx = uniform_spacing(x_grid);
  const double x0 = x_grid(0);

  std::size_t n_fft = 1;
  while (n_fft < static_cast<std::size_t>(oversample) * static_cast<std::size_t>(psi0.size()))
    n_fft <<= 1;
  std::vector<std::complex<double>> in(n_fft, 0.0), out;
  for (Eigen::Index j = 0; j < psi0.size(); ++j) in[j] = psi0(j);
  Eigen::FFT<double> fft;
  fft.fwd(out, in);

  const auto half = static_cast<Eigen::Index>(n_fft / 2 - 1);
  const double dk = 2 * kPi / (double(n_fft) * dx);
  MomentumSpectrum s;
  s.k_grid = symmetric_grid(double(half) * dk, half);
  s.dk = dk;
  s.k_max = double(half) * dk;
  s.c_values.resize(s.k_grid.size());
  const double scale = dx / std::sqrt(2 * kPi);
  for (Eigen::Index i = -half; i <= half; ++i) {
    const double k = double(i) * dk;
    const std::size_t m = i >= 0 ? std::size_t(i) : n_fft - std::size_t(-i);
    s.c_values(i + half) = scale * sinc(k * dx / 2) * std::polar(1.0, -k * x0) * out[m];
  }

  const double edge_mass =
      (s.c_values.head(2).squaredNorm() + s.c_values.tail(2).squaredNorm()) * dk;
  if (edge_mass > 1e-6)
    throw ResolutionError("spectrum aliased: mass " + std::to_string(edge_mass) +
                          " within two bins of k_max");
  s.tail_mass = std::max(0.0, psi0.squaredNorm() * dx - s.grid_mass());
  s.analytic = false;
  return s;
}

}  // namespace talbot
