#include "fixtures.hpp"
#include "talbot/errors.hpp"
#include "talbot/special_functions.hpp"

#include <doctest.h>

using namespace talbot;

namespace {

// Brute-force Gauss-Legendre integral of |c|^2 over [k0, k1], independent of
// the cosine expansion used by spectral_tail_mass.
double brute_mass(const GratingSpec& g, double k0, double k1, int panels)
{
  const auto [x, w] = gauss_legendre<double>(20);
  const double h = (k1 - k0) / panels;
  double sum = 0;
  for (int p = 0; p < panels; ++p)
    for (std::size_t q = 0; q < x.size(); ++q)
      sum += w[q] * std::norm(momentum_amplitude(g, k0 + (p + 0.5 + 0.5 * x[q]) * h));
  return sum * h / 2;
}

}  // namespace

TEST_SUITE("beamgrating")
{
  TEST_CASE("square amplitude at k = 0 and its symmetry")
  {
    const GratingSpec g = fixtures::five_slit();
    // c(0) = sqrt(2 / (pi n delta)) (delta / 2) n
    CHECK(momentum_amplitude(g, 0).real() ==
          doctest::Approx(std::sqrt(2 / (std::numbers::pi * g.n * g.width)) * g.width / 2 * g.n).epsilon(1e-14));
    for (double k : {1e6, 3.3e7, 6.2831853e7, 2e8}) {
      CAPTURE(k);
      CHECK(std::abs(momentum_amplitude(g, k) - momentum_amplitude(g, -k)) < 1e-18);
    }
  }

  TEST_CASE("grating factor is continuous through the principal maxima")
  {
    const GratingSpec g = fixtures::five_slit();
    const double k_order = 2 * std::numbers::pi / g.period;
    const auto at = momentum_amplitude(g, k_order);
    const auto near = momentum_amplitude(g, k_order * (1 + 1e-9));
    CHECK(std::abs(at - near) < 1e-6 * std::abs(at));
  }

  TEST_CASE("tail mass agrees with an independent quadrature")
  {
    const GratingSpec g = fixtures::five_slit();
    const double k_cut = 16 * std::numbers::pi / g.period;
    const double k_far = 4000 / g.period;
    // Beyond k_far the averaged density is 1 / (pi delta k^2) on each side.
    const double far = 2 / (std::numbers::pi * g.width * k_far);
    const double brute = 2 * brute_mass(g, k_cut, k_far, 40000) + far;
    CHECK(spectral_tail_mass(g, k_cut) == doctest::Approx(brute).epsilon(2e-6));
  }

  TEST_CASE("tail mass matches frozen reference values")
  {
    // Independent GL quadrature to 2e5 / d plus the averaged remainder, d = 1,
    // delta = 1/2; the remainder estimate is good to about 3e-11.
    const GratingSpec g = fixtures::five_slit();
    CHECK(std::abs(spectral_tail_mass(g, 128 * std::numbers::pi / g.period) - 0.00316605101357) < 5e-11);
    CHECK(std::abs(spectral_tail_mass(g, (16 * std::numbers::pi + 0.3) / g.period) - 0.0252094206684) < 5e-11);
  }

  TEST_CASE("Parseval: grid plus tail mass is one for square openings")
  {
    const GratingSpec g = fixtures::five_slit();
    const MomentumSpectrum s = spectrum_analytic(g, fixtures::five_slit_beam(), default_k_grid(g));
    CHECK(std::abs(s.total_mass() - 1) < 1e-8);
    CHECK(s.tail_mass > 1e-3);  // the 1/k^2 tail is not negligible
  }

  TEST_CASE("Parseval: Gaussian openings")
  {
    const GratingSpec g = fixtures::gaussian_grating(5, 1e-7, 2e-8);
    const MomentumSpectrum s = spectrum_analytic(g, fixtures::five_slit_beam(), default_k_grid(g));
    CHECK(std::abs(s.total_mass() - 1) < 1e-8);
  }

  TEST_CASE("FFT spectrum of cell-aligned samples equals the closed form")
  {
    const GratingSpec g = fixtures::five_slit();
    // Cells of width delta / 32 centred on x_j; slit edges fall on cell boundaries.
    const double dx = g.width / 32;
    const Eigen::Index count = 4096;
    Eigen::VectorXd x(count);
    for (Eigen::Index j = 0; j < count; ++j) x(j) = (double(j - count / 2) + 0.5) * dx;
    const SampledWavefunction psi = build_initial_wavefunction(g, x);
    const MomentumSpectrum s = spectrum_numeric(psi.values, x, 2);
    double worst = 0;
    for (Eigen::Index i = 0; i < s.k_grid.size(); i += 37)
      worst = std::max(worst, std::abs(s.c_values(i) - momentum_amplitude(g, s.k_grid(i))));
    CHECK(worst < 1e-12 * std::abs(momentum_amplitude(g, 0)));
    CHECK(std::abs(s.total_mass() - 1) < 1e-12);
  }

  TEST_CASE("FFT spectrum detects aliasing")
  {
    const GratingSpec g = fixtures::gaussian_grating(1, 1e-7, 2e-8);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(64, -2e-7, 2e-7);
    const Eigen::VectorXcd psi = x.unaryExpr([&](double v) { return std::complex<double>(
        initial_amplitude(g, v) * (1 + 0.3 * std::cos(std::numbers::pi * (v + 2e-7) / (x(1) - x(0))))); });
    CHECK_THROWS_AS(spectrum_numeric(psi, x), ResolutionError);
  }

  TEST_CASE("closed-form spectrum needs a centered grating")
  {
    GratingSpec g = fixtures::five_slit();
    g.centered = false;
    CHECK_THROWS_AS(spectrum_analytic(g, fixtures::five_slit_beam(), default_k_grid(g)), UnsupportedConfiguration);
  }

  TEST_CASE("window-sized grid keeps the band inside the alias period")
  {
    const GratingSpec g = fixtures::five_slit();
    const ParticleBeam b = fixtures::five_slit_beam();
    const double y = fixtures::at_lt(g, b, 0.25);
    const Eigen::VectorXd k = k_grid_for_window(g, b, y, 15 * g.period);
    const double dk = k(1) - k(0);
    const double tau = b.spreading(b.time_at(y));
    CHECK(2 * std::numbers::pi / dk > 2 * (tau * k(k.size() - 1) + 15 * g.period));
    CHECK(k(k.size() - 1) >= 5 * 15 * g.period / tau * (1 - 1e-9));
  }
}
