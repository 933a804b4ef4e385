#include "talbot/wavefield.hpp"

#include "parallel.hpp"
#include "talbot/errors.hpp"
#include "talbot/special_functions.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <utility>

namespace talbot {

namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// exp(i phase) with the phase reduced in extended precision; chirp phases
// reach 1e8 rad on large grids.
Complex unit_phasor(long double phase)
{
  constexpr long double two_pi = 6.283185307179586476925286766559L;
  const long double reduced = std::fmod(phase, two_pi);
  return std::polar(1.0, static_cast<double>(reduced));
}

// Trapezoid-weighted quadrature coefficients dk (2 pi)^{-1/2} c_i exp(-i tau k_i^2 / 2).
Eigen::VectorXcd propagated_coefficients(const WaveField& field, double t)
{
  const MomentumSpectrum& s = field.spectrum();
  const double tau = field.beam().spreading(t);
  const double scale = s.dk / std::sqrt(2 * kPi);
  Eigen::VectorXcd a(s.c_values.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const long double k = s.k_grid(i);
    a(i) = scale * s.c_values(i) * unit_phasor(-0.5L * tau * k * k);
  }
  a(0) *= 0.5;
  a(a.size() - 1) *= 0.5;
  return a;
}

// sum_i a_i exp(i k_i x) with the powers of exp(i dk x) generated by
// recurrence and re-anchored every 256 terms.
Complex synthesize(const MomentumSpectrum& s, const Eigen::VectorXcd& a, double x)
{
  const Complex step = std::polar(1.0, s.dk * x);
  Complex sum = 0;
  Complex power = 1;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (i % 256 == 0) power = unit_phasor(static_cast<long double>(i) * s.dk * x);
    sum += a(i) * power;
    power *= step;
  }
  return sum * unit_phasor(static_cast<long double>(s.k_grid(0)) * x);
}

void check_alias_window(const WaveField& field, double x)
{
  if (std::abs(x - field.grating().midpoint()) > field.alias_half_window())
    throw DomainError("x outside the alias-free window of the k-grid");
}

// Bluestein evaluation of psi_j = sum_i a_i exp(i (k0 + i dk)(x0 + j dx)), j < count.
Eigen::VectorXcd chirp_z(const Eigen::VectorXcd& a, double k0, double dk, double x0, double dx,
                         Eigen::Index count)
{
  const Eigen::Index n = a.size();
  std::size_t len = 1;
  while (len < static_cast<std::size_t>(n + count - 1)) len <<= 1;
  const long double theta = static_cast<long double>(dk) * dx;

  std::vector<Complex> u(len, 0.0), h(len, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const long double li = i;
    u[i] = a(i) * unit_phasor(static_cast<long double>(dk) * x0 * li + 0.5L * theta * li * li);
  }
  for (Eigen::Index m = 0; m < count; ++m) {
    const long double lm = m;
    h[m] = unit_phasor(-0.5L * theta * lm * lm);
  }
  for (Eigen::Index m = 1; m < n; ++m) {
    const long double lm = m;
    h[len - m] = unit_phasor(-0.5L * theta * lm * lm);
  }

  Eigen::FFT<double> fft;
  std::vector<Complex> uf, hf, conv;
  fft.fwd(uf, u);
  fft.fwd(hf, h);
  for (std::size_t i = 0; i < len; ++i) uf[i] *= hf[i];
  fft.inv(conv, uf);

  Eigen::VectorXcd out(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    const long double lj = j;
    const long double xj = static_cast<long double>(x0) + lj * dx;
    out(j) = conv[j] * unit_phasor(static_cast<long double>(k0) * xj + 0.5L * theta * lj * lj);
  }
  return out;
}

bool is_uniform(const Eigen::VectorXd& x)
{
  if (x.size() < 3) return false;
  try {
    uniform_spacing(x, 1e-12);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

// \int_lo^hi amp(x') exp(i (x - x')^2 / (2 tau)) dx' by phase-limited panels
// refined with Gauss-Legendre bisection.
template <typename Amplitude>
Complex kernel_integral(Amplitude&& amp, double lo, double hi, double x, double tau,
                        double panel_cap, const FresnelOptions& opt, double amp_scale,
                        std::size_t& panels, double& residual)
{
  static const auto rule = gauss_legendre<double>(10);
  const auto& [nodes, weights] = rule;
  auto gl = [&](double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Complex sum = 0;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double xp = mid + half * nodes[q];
      const double u = xp - x;
      sum += weights[q] * amp(xp) * std::polar(1.0, u * u / (2 * tau));
    }
    return sum * half;
  };

  auto refine = [&](auto&& self, double a, double b, Complex whole, int depth) -> Complex {
    const double m = 0.5 * (a + b);
    const Complex left = gl(a, m), right = gl(m, b);
    const double diff = std::abs(left + right - whole);
    const double tol = opt.rel_tol * amp_scale * (b - a);
    if (diff <= tol || depth >= opt.max_depth) {
      if (diff > tol) residual += diff;
      ++panels;
      return left + right;
    }
    if (panels > opt.max_panels) throw QuadratureError("Fresnel quadrature panel budget exhausted", residual);
    return self(self, a, m, left, depth + 1) + self(self, m, b, right, depth + 1);
  };

  // Panels of equal phase increment on each side of the stationary point.
  std::vector<std::pair<double, double>> pieces;
  if (lo < x && x < hi) {
    pieces = {{lo, x}, {x, hi}};
  } else {
    pieces = {{lo, hi}};
  }
  Complex total = 0;
  for (const auto& [a, b] : pieces) {
    const double sign = (a + b) / 2 >= x ? 1.0 : -1.0;
    const double phi_a = (a - x) * (a - x) / (2 * tau);
    const double phi_b = (b - x) * (b - x) / (2 * tau);
    const auto steps = std::max<long>(1, std::lround(std::ceil(std::abs(phi_b - phi_a) / opt.max_phase_step)));
    if (static_cast<std::size_t>(steps) > opt.max_panels)
      throw QuadratureError("Fresnel quadrature needs more panels than allowed", 0.0);
    double prev = a;
    for (long s = 1; s <= steps; ++s) {
      const double phi = phi_a + (phi_b - phi_a) * double(s) / double(steps);
      double next = s == steps ? b : x + sign * std::sqrt(2 * tau * phi);
      const auto sub = std::max<long>(1, std::lround(std::ceil(std::abs(next - prev) / panel_cap)));
      for (long k = 0; k < sub; ++k) {
        const double p = prev + (next - prev) * double(k) / double(sub);
        const double q = prev + (next - prev) * double(k + 1) / double(sub);
        total += refine(refine, p, q, gl(p, q), 0);
      }
      prev = next;
    }
  }
  return total;
}

}  // namespace

WaveField::WaveField(MomentumSpectrum spectrum, ParticleBeam beam, GratingSpec grating)
    : spectrum_(std::make_shared<const MomentumSpectrum>(std::move(spectrum))),
      beam_(beam),
      grating_(grating)
{
  grating_.validate();
  if (spectrum_->c_values.size() < 2 || spectrum_->c_values.size() != spectrum_->k_grid.size())
    throw ConfigError("wave field needs a sampled spectrum");
}

FieldSample evaluate(const WaveField& field, double x, double t)
{
  const GratingSpec& g = field.grating();
  if (t < 0) throw DomainError("evaluation time must be non-negative");
  FieldSample out{0, 0, 0};
  const double tau = field.beam().spreading(t);

  if (g.window == Window::Square) {
    const double amp = 1.0 / std::sqrt(g.n * g.width);
    if (tau == 0) {
      out.psi = initial_amplitude(g, x);
      return out;
    }
    // F(s) = sign(s) [(1 + i) / 2 - A(|s|) E] with E = exp(i pi s^2 / 2), which
    // is the kernel phase exp(i (x - edge)^2 / (2 tau)) already needed for d_x psi.
    const FresnelAuxTable& aux = FresnelAuxTable::instance();
    const double inv_r = 1 / std::sqrt(kPi * tau), inv_tau = 1 / tau;
    const Complex half(0.5, 0.5);
    auto edge_term = [&](double edge, const Complex& e) {
      const double s = (edge - x) * inv_r;
      const Complex f = half - aux(std::abs(s)) * e;
      return s < 0 ? -f : f;
    };
    // Left and right edges each step by d, so exp(i (x - e)^2 / 2 tau) follows
    // E_{j+1} = E_j R_j, R_{j+1} = R_j exp(i d^2 / tau): five sincos per call.
    const double d = g.period;
    const Complex q = std::polar(1.0, d * d * inv_tau);
    auto phase_run = [&](double e0) {
      const double u = x - e0;
      return std::pair{std::polar(1.0, 0.5 * u * u * inv_tau), std::polar(1.0, (0.5 * d - u) * d * inv_tau)};
    };
    auto [el, step_l] = phase_run(g.left_edge(0));
    auto [er, step_r] = phase_run(g.right_edge(0));
    const Complex kernel_norm = amp * std::polar(1.0 / std::sqrt(2 * kPi * tau), -kPi / 4);
    Complex sum_f = 0, sum_e = 0, sum_e2 = 0;
    for (int i = 0; i < g.n; ++i) {
      if (i > 0) {
        el *= step_l;
        er *= step_r;
        step_l *= q;
        step_r *= q;
      }
      const double l = g.left_edge(i), rr = g.right_edge(i);
      sum_f += edge_term(rr, er) - edge_term(l, el);
      sum_e += el - er;
      sum_e2 += Complex(0, (x - l) * inv_tau) * el - Complex(0, (x - rr) * inv_tau) * er;
    }
    out.psi = amp * sum_f / Complex(1, 1);
    out.dpsi = kernel_norm * sum_e;
    out.d2psi = kernel_norm * sum_e2;
    return out;
  }

  // Gaussian opening: exp(-u^2 / (4 s)) spreads to sqrt(s / sigma) exp(-u^2 / (4 sigma)),
  // sigma = s + i tau / 2, s = a^2 / 4.
  const double s0 = g.gaussian_width * g.gaussian_width / 4;
  const Complex sigma(s0, tau / 2);
  const Complex pre = gaussian_norm(g) * std::sqrt(s0 / sigma);
  for (int i = 0; i < g.n; ++i) {
    const double u = x - g.center(i);
    const Complex psi_i = pre * std::exp(-u * u / (4.0 * sigma));
    const Complex slope = -u / (2.0 * sigma);
    out.psi += psi_i;
    out.dpsi += slope * psi_i;
    out.d2psi += (slope * slope - 1.0 / (2.0 * sigma)) * psi_i;
  }
  return out;
}

std::complex<double> psi_spectral(const WaveField& field, double x, double t)
{
  if (t < 0) throw DomainError("evaluation time must be non-negative");
  check_alias_window(field, x);
  return synthesize(field.spectrum(), propagated_coefficients(field, t), x);
}

std::complex<double> dpsi_spectral(const WaveField& field, double x, double t)
{
  if (t < 0) throw DomainError("evaluation time must be non-negative");
  check_alias_window(field, x);
  const MomentumSpectrum& s = field.spectrum();
  Eigen::VectorXcd a = propagated_coefficients(field, t);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) *= Complex(0, s.k_grid(i));
  return synthesize(s, a, x);
}

Eigen::VectorXcd psi_spectral(const WaveField& field, const Eigen::VectorXd& x, double t)
{
  if (t < 0) throw DomainError("evaluation time must be non-negative");
  for (Eigen::Index j = 0; j < x.size(); ++j) check_alias_window(field, x(j));
  const MomentumSpectrum& s = field.spectrum();
  const Eigen::VectorXcd a = propagated_coefficients(field, t);
  if (is_uniform(x)) {
    const double dx = (x(x.size() - 1) - x(0)) / double(x.size() - 1);
    return chirp_z(a, s.k_grid(0), s.dk, x(0), dx, x.size());
  }
  Eigen::VectorXcd out(x.size());
  detail::parallel_for(static_cast<std::size_t>(x.size()),
                       [&](std::size_t j) { out(j) = synthesize(s, a, x(j)); });
  return out;
}

SpectralPeriod spectral_period(const WaveField& field, double t)
{
  const MomentumSpectrum& s = field.spectrum();
  Eigen::Index count = 1;
  while (count < s.k_grid.size()) count <<= 1;
  SpectralPeriod out;
  const double period = 2 * kPi / s.dk;
  out.dx = period / double(count);
  const double x0 = field.grating().midpoint() - period / 2;
  out.x = Eigen::VectorXd::LinSpaced(count, x0, x0 + out.dx * double(count - 1));
  out.psi = chirp_z(propagated_coefficients(field, t), s.k_grid(0), s.dk, x0, out.dx, count);
  return out;
}

std::complex<double> psi_fresnel(const WaveField& field, double x, double t, const FresnelOptions& opt)
{
  if (!(t > 0)) throw DomainError("Fresnel kernel is singular at t = 0");
  const GratingSpec& g = field.grating();
  const double tau = field.beam().spreading(t);
  std::size_t panels = 0;
  double residual = 0;
  Complex total = 0;
  if (g.window == Window::Square) {
    const double amp = 1.0 / std::sqrt(g.n * g.width);
    auto flat = [amp](double) { return amp; };
    for (int i = 0; i < g.n; ++i)
      total += kernel_integral(flat, g.left_edge(i), g.right_edge(i), x, tau, g.width, opt, amp,
                               panels, residual);
  } else {
    const double norm = gaussian_norm(g);
    const double a = g.gaussian_width;
    for (int i = 0; i < g.n; ++i) {
      const double c = g.center(i);
      auto bump = [=](double xp) {
        const double u = (xp - c) / a;
        return norm * std::exp(-u * u);
      };
      const auto [lo, hi] = g.support(i);
      total += kernel_integral(bump, lo, hi, x, tau, a / 4, opt, norm, panels, residual);
    }
  }
  const double budget = opt.rel_tol * 1e3 * std::sqrt(1.0 / (g.n * g.width > 0 ? g.n * g.width : 1.0));
  if (residual > budget) throw QuadratureError("Fresnel quadrature did not converge", residual);
  return std::polar(1.0 / std::sqrt(2 * kPi * tau), -kPi / 4) * total;
}

std::complex<double> psi_farfield(const WaveField& field, double x, double t)
{
  if (!(t > 0)) throw DomainError("far-field form needs t > 0");
  const double tau = field.beam().spreading(t);
  const Complex c = field.spectrum().amplitude(x / tau);
  return std::polar(1.0 / std::sqrt(tau), -kPi / 4) * unit_phasor(static_cast<long double>(x) * x / (2 * tau)) * c;
}

double farfield_phase_error(const WaveField& field, double t)
{
  const GratingSpec& g = field.grating();
  const double reach = std::abs(g.midpoint()) + g.half_extent();
  return reach * reach / (2 * field.beam().spreading(t));
}

double IntensityProfile::mass() const
{
  if (x_grid.size() < 2) return 0;
  return trapezoid(density, (x_grid(x_grid.size() - 1) - x_grid(0)) / double(x_grid.size() - 1));
}

double trapezoid(const Eigen::VectorXd& values, double dx)
{
  const Eigen::Index n = values.size();
  if (n < 2) return 0;
  return (values.sum() - 0.5 * (values(0) + values(n - 1))) * dx;
}

Eigen::VectorXd default_profile_grid(const WaveField& field, double y)
{
  const GratingSpec& g = field.grating();
  const double tau = field.beam().spreading(field.time_at(y));
  const double half = std::max(3.0 * g.n * g.period, tau * field.spectrum().k_max);
  return Eigen::VectorXd::LinSpaced(4096, g.midpoint() - half, g.midpoint() + half);
}

IntensityProfile intensity_profile(const WaveField& field, double y, const Eigen::VectorXd& x_grid,
                                   Propagator method)
{
  if (y < 0) throw DomainError("profile distance must be non-negative");
  const double t = field.time_at(y);
  IntensityProfile p;
  p.y = y;
  p.x_grid = x_grid;
  p.density.resize(x_grid.size());
  if (method == Propagator::Spectral) {
    p.density = psi_spectral(field, x_grid, t).cwiseAbs2();
    return p;
  }
  detail::parallel_for(static_cast<std::size_t>(x_grid.size()), [&](std::size_t j) {
    const double x = x_grid(j);
    Complex psi;
    switch (method) {
      case Propagator::Kernel: psi = psi_kernel(field, x, t); break;
      case Propagator::Fresnel: psi = psi_fresnel(field, x, t); break;
      case Propagator::FarField: psi = psi_farfield(field, x, t); break;
      case Propagator::Spectral: break;
    }
    p.density(j) = std::norm(psi);
  });
  return p;
}

std::vector<IntensityProfile> carpet(const WaveField& field, const std::vector<double>& y_list,
                                     const Eigen::VectorXd& x_grid, Propagator method)
{
  std::vector<IntensityProfile> out;
  out.reserve(y_list.size());
  for (double y : y_list) out.push_back(intensity_profile(field, y, x_grid, method));
  return out;
}

}  // namespace talbot
