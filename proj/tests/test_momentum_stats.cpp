#include "fixtures.hpp"
#include "talbot/errors.hpp"
#include "talbot/momentum_stats.hpp"

#include <doctest.h>

using namespace talbot;

TEST_SUITE("momstats")
{
  TEST_CASE("histogram has unit mass and tallies samples outside the range")
  {
    const Eigen::VectorXd edges = symmetric_edges(1.0, 10);
    CHECK(edges.size() == 11);
    CHECK(edges(5) == 0.0);
    const Eigen::VectorXd samples{{-0.95, -0.1, 0.05, 0.05, 0.3, 0.99, 1.5, -7.0}};
    const Histogram h = histogram(samples, edges);
    CHECK(std::abs(h.density.sum() * h.width() - 1) < 1e-12);
    CHECK(h.sample_count == 6);
    CHECK(h.outside == 2);
    CHECK(h.density(5) == doctest::Approx(2.0 / 6 / 0.2));
    CHECK(h.centers()(0) == doctest::Approx(-0.9));
    CHECK_THROWS_AS(symmetric_edges(0.0, 3), ConfigError);
  }

  TEST_CASE("default momentum bins cover four diffraction orders")
  {
    const GratingSpec g = fixtures::five_slit();
    const Eigen::VectorXd e = default_momentum_edges(g);
    CHECK(e.size() == 82);
    CHECK(e(81) == doctest::Approx(4 * 2 * std::numbers::pi * kHbar / g.period).epsilon(1e-14));
    CHECK(e(0) == -e(81));
  }

  TEST_CASE("quantum momentum density is even and has unit mass")
  {
    const GratingSpec g = fixtures::five_slit();
    const MomentumSpectrum s = spectrum_analytic(g, fixtures::five_slit_beam(), default_k_grid(g));
    const Eigen::VectorXd p = kHbar * s.k_grid;
    const Eigen::VectorXd rho = quantum_momentum_density(s, p);
    CHECK((rho - rho.reverse()).cwiseAbs().maxCoeff() < 1e-12 * rho.maxCoeff());
    // Grid mass plus the analytic tail.
    CHECK(std::abs(trapezoid(rho, p(1) - p(0)) + s.tail_mass - 1) < 1e-8);
  }

  TEST_CASE("binned quantum density has unit mass over the histogram range")
  {
    const GratingSpec g = fixtures::five_slit();
    const MomentumSpectrum s = spectrum_analytic(g, fixtures::five_slit_beam(), default_k_grid(g));
    const Eigen::VectorXd edges = default_momentum_edges(g);
    const Eigen::VectorXd b = binned_quantum_density(s, edges);
    CHECK(std::abs(b.sum() * (edges(1) - edges(0)) - 1) < 1e-9);
    CHECK((b - b.reverse()).cwiseAbs().maxCoeff() < 1e-9 * b.maxCoeff());
  }

  TEST_CASE("Jacobian density is flagged in the near field and exact far away")
  {
    const GratingSpec g = fixtures::five_slit();
    const ParticleBeam b = fixtures::five_slit_beam();
    const WaveField f = fixtures::field(g, b);
    const Eigen::VectorXd p = kHbar * Eigen::VectorXd::LinSpaced(801, -4, 4) * (2 * std::numbers::pi / g.period);
    const double dp = p(1) - p(0);
    CHECK_FALSE(farfield_jacobian_density(f, f.time_at(fixtures::at_lt(g, b, 0.25)), p).valid);
    const JacobianDensity far = farfield_jacobian_density(f, f.time_at(fixtures::at_lt(g, b, 1000)), p);
    CHECK(far.valid);
    const Eigen::VectorXd q = quantum_momentum_density(f.spectrum(), p);
    CHECK((far.density - q).norm() / q.norm() < 1e-3);
    // Mass over the full |p| range, compared with the spectrum on the same range.
    CHECK(trapezoid(far.density, dp) == doctest::Approx(trapezoid(q, dp)).epsilon(2e-3));
    CHECK_THROWS_AS(farfield_jacobian_density(f, 0.0, p), DomainError);
  }

  TEST_CASE("t dv_x/dx tends to one far from the grating")
  {
    const GratingSpec g = fixtures::five_slit();
    const ParticleBeam b = fixtures::five_slit_beam();
    const VelocityField vf{fixtures::field(g, b)};
    const double t = vf.field.time_at(fixtures::at_lt(g, b, 1000));
    const double tau = b.spreading(t);
    for (int order : {0, 1}) {
      CAPTURE(order);
      const double x = (order * 2 * std::numbers::pi / g.period + 0.1 / g.period) * tau;
      CHECK(velocity_gradient_probe(vf, x, t, 1e-3 * g.period) == doctest::Approx(1.0).epsilon(1e-3));
    }
  }

  TEST_CASE("distribution distance satisfies the metric axioms")
  {
    const Eigen::VectorXd a{{1, 2, 3, 0, 0}};
    const Eigen::VectorXd b{{0, 0, 0, 4, 1}};
    const Eigen::VectorXd c{{1, 1, 1, 1, 1}};
    CHECK(distribution_distance(a, a, 0.5) == 0.0);
    CHECK(distribution_distance(a, 3 * a, 0.5) < 1e-15);
    CHECK(distribution_distance(a, b, 0.5) == doctest::Approx(2.0));
    CHECK(distribution_distance(a, c, 0.5) == doctest::Approx(distribution_distance(c, a, 0.5)));
    CHECK(distribution_distance(a, b, 0.5) <= distribution_distance(a, c, 0.5) + distribution_distance(c, b, 0.5));
    CHECK_THROWS_AS(distribution_distance(a, Eigen::VectorXd::Zero(5), 0.5), DomainError);
    CHECK_THROWS_AS(distribution_distance(a, Eigen::VectorXd::Ones(4), 0.5), ConfigError);
  }

  TEST_CASE("Bohmian momenta vanish near a smooth grating and are symmetric")
  {
    // Smooth openings; sharp edges give v_x ~ t^(-1/2) oscillations instead.
    const GratingSpec g = fixtures::gaussian_grating(5, 1e-7, 2.5e-8);
    const ParticleBeam b = fixtures::five_slit_beam();
    const VelocityField vf{fixtures::field(g, b)};
    const double y = fixtures::at_lt(g, b, 1e-3);
    StepPolicy policy;
    policy.steps_per_talbot = 1000;
    policy.start_fraction = 5e-4;
    const TrajectoryEnsemble e = launch_ensemble(vf, 400, Sampling::UniformDensity, 2, {vf.field.time_at(y)}, policy);
    const Eigen::VectorXd edges = default_momentum_edges(g);
    const MomentumHistogram h = bohm_momentum_histogram(e, vf, y, edges);
    CHECK(h.excluded == 0);
    CHECK(std::abs(h.density.sum() * h.width() - 1) < 1e-9);
    // Bins covering |p| < 0.05 (2 pi hbar / d): the central bin spans +-0.05.
    const double limit = 0.05 * 2 * std::numbers::pi * kHbar / g.period;
    double central = 0;
    const Eigen::VectorXd centers = h.centers();
    for (Eigen::Index i = 0; i < centers.size(); ++i)
      if (std::abs(centers(i)) < limit) central += h.density(i) * h.width();
    CHECK(central * h.sample_count + h.outside >= 0.99 * (h.sample_count + h.outside));
    const Eigen::VectorXd v = e.velocities(1);
    const double mean_p = b.mass * v.mean();
    const double se = b.mass * std::sqrt((v.array() - v.mean()).square().sum() / (v.size() - 1) / v.size());
    CHECK(std::abs(mean_p) <= 4 * se + 1e-40);
  }
}
