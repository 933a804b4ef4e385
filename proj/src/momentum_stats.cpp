#include "talbot/momentum_stats.hpp"

#include "talbot/errors.hpp"
#include "talbot/md_model.hpp"

#include <cmath>
#include <numbers>

namespace talbot {

Eigen::VectorXd Histogram::centers() const
{
  const Eigen::Index bins = bin_edges.size() - 1;
  return 0.5 * (bin_edges.head(bins) + bin_edges.tail(bins));
}

Eigen::VectorXd symmetric_edges(double half_width, int bins)
{
  if (!(half_width > 0) || bins < 1) throw ConfigError("histogram needs a positive range and >= 1 bin");
  return Eigen::VectorXd::LinSpaced(bins + 1, -half_width, half_width);
}

Histogram histogram(const Eigen::VectorXd& samples, const Eigen::VectorXd& edges)
{
  const Eigen::Index bins = edges.size() - 1;
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  const double lo = edges(0), width = (edges(bins) - edges(0)) / double(bins);
  Histogram h;
  h.bin_edges = edges;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const double pos = (samples(i) - lo) / width;
    if (!(pos >= 0 && pos < double(bins))) {
      ++h.outside;
      continue;
    }
    counts(static_cast<Eigen::Index>(pos)) += 1;
    ++h.sample_count;
  }
  h.density = h.sample_count > 0 ? Eigen::VectorXd(counts / (double(h.sample_count) * width))
                                 : Eigen::VectorXd::Zero(bins);
  return h;
}

Eigen::VectorXd default_momentum_edges(const GratingSpec& g, int bins)
{
  return symmetric_edges(4 * 2 * std::numbers::pi * kHbar / g.period, bins);
}

MomentumHistogram bohm_momentum_histogram(const TrajectoryEnsemble& ensemble, const VelocityField& vf, double y,
                                          const Eigen::VectorXd& edges)
{
  const std::size_t j = ensemble.sample_index(vf.field.time_at(y));
  const double mass = vf.field.beam().mass;
  std::vector<double> p;
  p.reserve(ensemble.records.size());
  std::size_t excluded = 0;
  for (const Trajectory& r : ensemble.records) {
    if (r.node_stalled) {
      ++excluded;
      continue;
    }
    p.push_back(mass * r.samples.at(j).vx);
  }
  MomentumHistogram out;
  static_cast<Histogram&>(out) = histogram(Eigen::Map<const Eigen::VectorXd>(p.data(), Eigen::Index(p.size())), edges);
  out.excluded = excluded;
  out.y = vf.field.beam().distance_at(ensemble.times[j]);
  return out;
}

Eigen::VectorXd quantum_momentum_density(const MomentumSpectrum& spectrum, const Eigen::VectorXd& p_grid)
{
  return p_grid.unaryExpr([&](double p) { return spectrum.density(p / kHbar) / kHbar; });
}

Eigen::VectorXd binned_quantum_density(const MomentumSpectrum& spectrum, const Eigen::VectorXd& edges)
{
  const CumulativeSpectrum cum(spectrum);
  const Eigen::Index bins = edges.size() - 1;
  Eigen::VectorXd mass(bins);
  for (Eigen::Index i = 0; i < bins; ++i) mass(i) = cum(edges(i + 1) / kHbar) - cum(edges(i) / kHbar);
  const double width = (edges(bins) - edges(0)) / double(bins);
  return mass / (mass.sum() * width);
}

JacobianDensity farfield_jacobian_density(const WaveField& field, double t, const Eigen::VectorXd& p_grid)
{
  if (!(t > 0)) throw DomainError("jacobian density needs t > 0");
  const double m = field.beam().mass;
  JacobianDensity out;
  out.density = p_grid.unaryExpr([&](double p) { return std::norm(psi_kernel(field, p * t / m, t)) * t / m; });
  out.valid = farfield_phase_error(field, t) <= std::numbers::pi / 4;
  return out;
}

double velocity_gradient_probe(const VelocityField& vf, double x, double t, double h)
{
  if (!(h > 0)) throw ConfigError("probe step must be positive");
  return t * (velocity_x(vf, x + h, t) - velocity_x(vf, x - h, t)) / (2 * h);
}

double distribution_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double dx)
{
  if (a.size() != b.size()) throw ConfigError("distributions live on different grids");
  const double ma = a.sum() * dx, mb = b.sum() * dx;
  if (!(ma > 0 && mb > 0)) throw DomainError("distribution has no mass");
  return (a / ma - b / mb).cwiseAbs().sum() * dx;
}

}  // namespace talbot
