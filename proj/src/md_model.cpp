#include "talbot/md_model.hpp"

#include "parallel.hpp"
#include "talbot/bohm.hpp"
#include "talbot/errors.hpp"
#include "talbot/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace talbot {

namespace {

// Gauss-Legendre integral of f over [lo, hi] on panels no wider than `panel`.
template <typename F>
double panel_integral(F&& f, double lo, double hi, double panel)
{
  static const auto rule = gauss_legendre<double>(16);
  if (!(hi > lo)) return 0;
  const auto count = std::max<long>(1, std::lround(std::ceil((hi - lo) / panel)));
  const double h = (hi - lo) / double(count);
  double sum = 0;
  for (long p = 0; p < count; ++p) {
    const double mid = lo + (double(p) + 0.5) * h;
    for (std::size_t q = 0; q < rule.first.size(); ++q) sum += rule.second[q] * f(mid + 0.5 * h * rule.first[q]);
  }
  return sum * 0.5 * h;
}

}  // namespace

CumulativeSpectrum::CumulativeSpectrum(const MomentumSpectrum& spectrum) : spectrum_(&spectrum)
{
  const Eigen::Index n = spectrum.k_grid.size();
  if (n < 2) throw ConfigError("cumulative spectrum needs a sampled grid");
  cum_.resize(n);
  cum_(0) = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    cum_(i) = cum_(i - 1) + 0.5 * (std::norm(spectrum.c_values(i - 1)) + std::norm(spectrum.c_values(i))) * spectrum.dk;
  lower_tail_ = spectrum.grating ? tail_above(-spectrum.k_grid(0)) : 0.0;
  total_ = lower_tail_ + cum_(n - 1) + (spectrum.grating ? tail_above(spectrum.k_grid(n - 1)) : 0.0);
}

double CumulativeSpectrum::tail_above(double k) const
{
  // |c|^2 is even because psi(x, 0) is real.
  return 0.5 * spectral_tail_mass(*spectrum_->grating, k);
}

double CumulativeSpectrum::operator()(double k) const
{
  const Eigen::VectorXd& grid = spectrum_->k_grid;
  const Eigen::Index n = grid.size();
  if (k <= grid(0)) return spectrum_->grating ? tail_above(-k) : 0.0;
  if (k >= grid(n - 1)) return spectrum_->grating ? total_ - tail_above(k) : total_;
  const double pos = (k - grid(0)) / spectrum_->dk;
  const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), n - 2);
  return lower_tail_ + cell(i, pos - double(i));
}

double CumulativeSpectrum::cell(Eigen::Index i, double w) const
{
  // Cubic Hermite on the node values and their exact slopes |c|^2: the
  // result is C^1 in k, so P is smooth enough for trapezoid sums on coarse x grids.
  const double f0 = std::norm(spectrum_->c_values(i)), f1 = std::norm(spectrum_->c_values(i + 1));
  const double h00 = (1 + 2 * w) * (1 - w) * (1 - w), h01 = w * w * (3 - 2 * w);
  const double h10 = w * (1 - w) * (1 - w), h11 = w * w * (w - 1);
  return h00 * cum_(i) + h01 * cum_(i + 1) + spectrum_->dk * (h10 * f0 + h11 * f1);
}

double CumulativeSpectrum::inverse(double u) const
{
  if (!(u > 0 && u < total_)) throw DomainError("cumulative inverse needs u in (0, total)");
  const Eigen::VectorXd& grid = spectrum_->k_grid;
  const Eigen::Index n = grid.size();
  const double grid_top = lower_tail_ + cum_(n - 1);
  if (u >= lower_tail_ && u <= grid_top) {
    const double target = u - lower_tail_;
    const auto it = std::lower_bound(cum_.data(), cum_.data() + n, target);
    const Eigen::Index i = std::clamp<Eigen::Index>(it - cum_.data(), 1, n - 1) - 1;
    // The cell polynomial is monotone; bisect it to full precision.
    double lo = 0, hi = 1;
    for (int iter = 0; iter < 60; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (cell(i, mid) < target ? lo : hi) = mid;
    }
    return grid(i) + 0.5 * (lo + hi) * spectrum_->dk;
  }
  // Analytic tails: bracket geometrically, then bisect on the tail mass.
  const bool lower = u < lower_tail_;
  const double mass = lower ? u : total_ - u;
  double lo = lower ? -grid(0) : grid(n - 1), hi = 2 * lo;
  while (tail_above(hi) > mass && hi < 1e30) hi *= 2;
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (tail_above(mid) > mass ? lo : hi) = mid;
  }
  const double k = 0.5 * (lo + hi);
  return lower ? -k : k;
}

ArrivalProbability arrival_probability(const MomentumSpectrum& spectrum, const GratingSpec& g,
                                       const ParticleBeam& beam, double t, const Eigen::VectorXd& x_grid)
{
  if (!(t > 0)) throw DomainError("arrival probability needs t > 0");
  g.validate();
  const double tau = beam.spreading(t);
  const Eigen::Index m = x_grid.size();
  ArrivalProbability p;
  p.y = beam.distance_at(t);
  p.x_grid = x_grid;
  p.per_slit.resize(g.n, m);

  if (g.window == Window::Square) {
    const CumulativeSpectrum cum(spectrum);
    const double scale = 1.0 / (g.n * g.width);
    detail::parallel_for(static_cast<std::size_t>(m), [&](std::size_t j) {
      const double x = x_grid(static_cast<Eigen::Index>(j));
      for (int i = 0; i < g.n; ++i)
        p.per_slit(i, j) = scale * (cum((x - g.left_edge(i)) / tau) - cum((x - g.right_edge(i)) / tau));
    });

    // Mass beyond each grid end. Integrating P_i over x turns each Cum into its
    // integral: beyond hi it is tau \int (1 - Cum) over [(hi - r)/tau, (hi - l)/tau],
    // below lo tau \int Cum over [(lo - r)/tau, (lo - l)/tau].
    if (m >= 2) {
      const double lo = x_grid(0), hi = x_grid(m - 1);
      // Panels of 8 grid cells inside the grid, growing geometrically in the tails.
      const double min_panel = 8 * spectrum.dk;
      const auto integrate = [&](auto&& f, double a, double b) {
        static const auto rule = gauss_legendre<double>(16);
        double sum = 0;
        for (double u = a; u < b;) {
          const double h = std::min(b - u, std::max(min_panel, 0.05 * std::abs(u)));
          for (std::size_t q = 0; q < rule.first.size(); ++q)
            sum += rule.second[q] * 0.5 * h * f(u + 0.5 * h * (1 + rule.first[q]));
          u += h;
        }
        return sum;
      };
      double outside = 0;
      for (int i = 0; i < g.n; ++i) {
        const double l = g.left_edge(i), r = g.right_edge(i);
        outside += integrate([&](double u) { return cum.total() - cum(u); }, (hi - r) / tau, (hi - l) / tau);
        outside += integrate([&](double u) { return cum(u); }, (lo - r) / tau, (lo - l) / tau);
      }
      p.outside_mass = scale * tau * outside;
    }
  } else {
    // P_i(x) = \int psi0(x') N exp(-(x'-x_i)^2/a^2) |c((x - x')/tau)|^2 / tau dx'
    const double a = g.gaussian_width;
    const double norm = gaussian_norm(g);
    const double kernel_scale = tau * std::numbers::pi / (4 * std::max(1, g.n) * g.period);
    const double panel = std::min(a / 8, std::max(kernel_scale, a / 512));
    detail::parallel_for(static_cast<std::size_t>(m), [&](std::size_t j) {
      const double x = x_grid(static_cast<Eigen::Index>(j));
      for (int i = 0; i < g.n; ++i) {
        const auto [lo, hi] = g.support(i);
        const double c = g.center(i);
        p.per_slit(i, j) = panel_integral(
            [&](double xp) {
              const double u = (xp - c) / a;
              return initial_amplitude(g, xp) * norm * std::exp(-u * u) * spectrum.density((x - xp) / tau) / tau;
            },
            lo, hi, panel);
      }
    });
  }
  p.total = p.per_slit.colwise().sum().transpose();
  if (m >= 2) p.grid_mass = trapezoid(p.total, uniform_spacing(x_grid, 1e-6));
  return p;
}

std::vector<MDTrajectory> sample_md_ensemble(const MomentumSpectrum& spectrum, const GratingSpec& g,
                                             std::size_t n_traj, std::uint64_t seed)
{
  const Eigen::VectorXd x0 = launch_points(g, n_traj, Sampling::UniformDensity, seed);
  const CumulativeSpectrum cum(spectrum);
  // A second stream, decorrelated from the launch points by a fixed offset.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<MDTrajectory> out(n_traj);
  for (std::size_t j = 0; j < n_traj; ++j) {
    double u = uniform01(rng);
    while (u == 0) u = uniform01(rng);
    out[j] = {x0(static_cast<Eigen::Index>(j)), cum.inverse(u * cum.total())};
  }
  return out;
}

std::pair<MDTrajectory, MDTrajectory> meeting_pair(const GratingSpec& g, const ParticleBeam& beam, int slit_a,
                                                   int slit_b, double x_star, double t)
{
  if (slit_a == slit_b || slit_a < 0 || slit_b < 0 || slit_a >= g.n || slit_b >= g.n)
    throw ConfigError("meeting pair needs two distinct openings");
  if (!(t > 0)) throw DomainError("meeting time must be positive");
  const double tau = beam.spreading(t);
  MDTrajectory a{g.center(slit_a), (x_star - g.center(slit_a)) / tau};
  MDTrajectory b{g.center(slit_b), (x_star - g.center(slit_b)) / tau};
  return {a, b};
}

Eigen::VectorXd discrepancy_grid(const WaveField& field, double y)
{
  const GratingSpec& g = field.grating();
  const double tau = field.beam().spreading(field.time_at(y));
  const double half = g.half_extent() + tau * 64 * 2 * std::numbers::pi / g.period;
  return Eigen::VectorXd::LinSpaced(8192, g.midpoint() - half, g.midpoint() + half);
}

double near_field_discrepancy(const WaveField& field, double y, const std::optional<Eigen::VectorXd>& x_grid)
{
  if (!(y > 0)) throw DomainError("discrepancy needs y > 0");
  const Eigen::VectorXd grid = x_grid ? *x_grid : discrepancy_grid(field, y);
  const double dx = uniform_spacing(grid, 1e-6);
  const ArrivalProbability md =
      arrival_probability(field.spectrum(), field.grating(), field.beam(), field.time_at(y), grid);
  const IntensityProfile qm = intensity_profile(field, y, grid, Propagator::Kernel);
  const double md_mass = trapezoid(md.total, dx), qm_mass = trapezoid(qm.density, dx);
  if (!(md_mass > 0 && qm_mass > 0)) throw ResolutionError("discrepancy grid holds no probability");
  return trapezoid((md.total / md_mass - qm.density / qm_mass).cwiseAbs(), dx);
}

}  // namespace talbot
