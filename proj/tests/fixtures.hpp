#ifndef TALBOT_TESTS_FIXTURES_HPP
#define TALBOT_TESTS_FIXTURES_HPP

#include "talbot/beam_grating.hpp"
#include "talbot/spectrum.hpp"
#include "talbot/wavefield.hpp"

#include <numbers>

namespace fixtures {

// Five-slit grating and beam of the near/far-field figures.
inline talbot::GratingSpec five_slit()
{
  talbot::GratingSpec g;
  g.n = 5;
  g.period = 0.1e-6;
  g.width = 0.05e-6;
  return g;
}

inline talbot::ParticleBeam five_slit_beam()
{
  return talbot::ParticleBeam::from_wavelength(1.19e-24, 2.53e-12);
}

inline talbot::GratingSpec ronchi30()
{
  talbot::GratingSpec g;
  g.n = 30;
  g.period = 0.2e-6;
  g.width = 0.1e-6;
  return g;
}

inline talbot::ParticleBeam ronchi_beam()
{
  return talbot::ParticleBeam::from_wavenumber(3.8189e-26, std::numbers::pi / 8 * 1e12);
}

inline talbot::GratingSpec gaussian_grating(int n, double d, double a)
{
  talbot::GratingSpec g;
  g.n = n;
  g.period = d;
  g.window = talbot::Window::Gaussian;
  g.gaussian_width = a;
  return g;
}

inline talbot::WaveField field(const talbot::GratingSpec& g, const talbot::ParticleBeam& beam)
{
  return talbot::WaveField(talbot::spectrum_analytic(g, beam, talbot::default_k_grid(g)), beam, g);
}

// Screen distance in units of the Talbot length.
inline double at_lt(const talbot::GratingSpec& g, const talbot::ParticleBeam& beam, double multiple)
{
  return multiple * talbot::talbot_length(g, beam);
}

}  // namespace fixtures

#endif
