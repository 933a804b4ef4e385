// Acceptance run: one PASS/FAIL line per criterion, with diagnostics.
// Exit status is the number of failed criteria (capped at 1).

#include "talbot/bohm.hpp"
#include "talbot/md_model.hpp"
#include "talbot/momentum_stats.hpp"
#include "talbot/scenario.hpp"
#include "talbot/special_functions.hpp"
#include "talbot/wavefield.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace talbot;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

int g_failures = 0;

class Stopwatch {
 public:
  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void verdict(const std::string& id, bool pass, const std::string& text)
{
  std::printf("[%s] %s %s\n", pass ? "PASS" : "FAIL", id.c_str(), text.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void note(const std::string& text)
{
  std::printf("       %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Gauss-Legendre integral of f over [a, b] in `count` equal panels.
double gl_integral(const std::function<double(double)>& f, double a, double b, long count)
{
  static const auto rule = gauss_legendre<double>(8);
  const double h = (b - a) / double(count);
  double sum = 0;
  for (long p = 0; p < count; ++p) {
    const double mid = a + (double(p) + 0.5) * h;
    for (std::size_t q = 0; q < rule.first.size(); ++q) sum += rule.second[q] * f(mid + 0.5 * h * rule.first[q]);
  }
  return 0.5 * h * sum;
}

// Widest panel that still resolves |psi|^2: for square openings every beat in
// |psi|^2 has wavenumber at most (2 x half_extent) / tau, at any x.
double density_panel(const WaveField& f, double t)
{
  const GratingSpec& g = f.grating();
  const double tau = f.beam().spreading(t);
  return std::min(g.width / 4, kPi * tau / (4 * g.half_extent()));
}

// \int |psi|^2 over the line: quadrature of the closed form on [-X, X] plus the
// incoherent edge-wave tail tau / (2 pi n delta) sum_e 1 / (X -+ e) beyond.
double kernel_mass(const WaveField& f, double t)
{
  const GratingSpec& g = f.grating();
  const double tau = f.beam().spreading(t);
  const double mid = g.midpoint();
  const double reach = g.half_extent() + std::max(40 * g.width, 4e3 * tau / g.width);
  const double panel = density_panel(f, t);
  const auto count = static_cast<long>(std::ceil(2 * reach / panel));
  const double inner = gl_integral([&](double x) { return std::norm(psi_kernel(f, x, t)); }, mid - reach,
                                   mid + reach, count);
  double tail = 0;
  for (int i = 0; i < g.n; ++i)
    for (double e : {g.left_edge(i), g.right_edge(i)}) tail += 1 / (mid + reach - e) + 1 / (e - (mid - reach));
  return inner + tau / (2 * kPi * g.n * g.width) * tail;
}

// Bin averages of |psi|^2 on uniform edges, scaled to unit mass over the range.
Eigen::VectorXd binned_density(const WaveField& f, double t, const Eigen::VectorXd& edges)
{
  const Eigen::Index bins = edges.size() - 1;
  const double w = edges(1) - edges(0);
  const auto sub = static_cast<long>(std::ceil(w / density_panel(f, t)));
  Eigen::VectorXd out(bins);
  for (Eigen::Index i = 0; i < bins; ++i)
    out(i) = gl_integral([&](double x) { return std::norm(psi_kernel(f, x, t)); }, edges(i), edges(i + 1), sub);
  return out / (out.sum() * w);
}

double relative_l2(const Eigen::VectorXcd& a, const Eigen::VectorXcd& reference)
{
  return (a - reference).norm() / reference.norm();
}

WaveField make_field(const GratingSpec& g, const ParticleBeam& b, const Eigen::VectorXd& k_grid)
{
  return WaveField(spectrum_analytic(g, b, k_grid), b, g);
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Central-third L2 distance between |psi(., t)| and |psi(. - shift, 0)|,
// relative to the norm of the latter.
double revival_error(const WaveField& f, double t, double shift)
{
  const GratingSpec& g = f.grating();
  const double third = g.n * g.period / 6;
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(40001, g.midpoint() - third, g.midpoint() + third);
  double diff = 0, ref = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a0 = std::abs(initial_amplitude(g, x(i) - shift));
    diff += std::pow(std::abs(psi_kernel(f, x(i), t)) - a0, 2);
    ref += a0 * a0;
  }
  return std::sqrt(diff / ref);
}

}  // namespace

int main()
{
  std::printf("talbot acceptance, %u hardware thread(s)\n", std::thread::hardware_concurrency());

  const Scenario fig1 = preset("fig1");
  const GratingSpec g = fig1.grating;
  const ParticleBeam beam = fig1.beam();
  const double lt = fig1.talbot_length();
  const WaveField field = make_field(g, beam, default_k_grid(g));
  const VelocityField vf{field, fig1.epsilon_node};
  const auto t_at = [&](double multiple) { return field.time_at(multiple * lt); };
  const auto order_spread = [&](double t) { return beam.spreading(t) * 2 * kPi / g.period; };

  // 1. Normalization.
  {
    Stopwatch clock;
    double worst = 0;
    std::string detail;
    double m0 = 0;
    for (int i = 0; i < g.n; ++i)
      m0 += gl_integral([&](double x) { return std::pow(initial_amplitude(g, x), 2); }, g.left_edge(i),
                        g.right_edge(i), 1);
    worst = std::abs(m0 - 1);
    detail += fmt("y=0: %.3e", m0 - 1);
    for (double m : {1.0 / 40, 0.25, 1.25, 12.5}) {
      const double err = kernel_mass(field, t_at(m)) - 1;
      worst = std::max(worst, std::abs(err));
      detail += fmt(", %g LT: %.3e", m, err);
    }
    const double s = clock.seconds();
    verdict("1 normalization", worst < 1e-6 && s < 10,
            fmt("max |mass - 1| = %.3e (tol 1e-6), %.2f s (limit 10 s)", worst, s));
    note(detail);
  }

  // 2. Parseval.
  {
    Stopwatch clock;
    GratingSpec gauss = g;
    gauss.window = Window::Gaussian;
    gauss.gaussian_width = g.width / 2;
    const MomentumSpectrum sq = spectrum_analytic(g, beam, default_k_grid(g));
    const MomentumSpectrum ga = spectrum_analytic(gauss, beam, default_k_grid(gauss));
    const double es = sq.total_mass() - 1, eg = ga.total_mass() - 1;
    const double s = clock.seconds();
    verdict("2 Parseval", std::max(std::abs(es), std::abs(eg)) < 1e-8 && s < 1,
            fmt("square %.3e, Gaussian %.3e (tol 1e-8), %.2f s (limit 1 s)", es, eg, s));
    note(fmt("square: grid %.10f + tail %.3e; Gaussian: grid %.12f + tail %.3e", sq.grid_mass(), sq.tail_mass,
             ga.grid_mass(), ga.tail_mass));
  }

  // 3. Talbot revival.
  {
    Stopwatch clock;
    const Scenario fig3 = preset("fig3");
    const WaveField f3 = make_field(fig3.grating, fig3.beam(), default_k_grid(fig3.grating));
    const double l3 = fig3.talbot_length();
    const double e2 = revival_error(f3, f3.time_at(2 * l3), 0);
    const double e1 = revival_error(f3, f3.time_at(l3), fig3.grating.period / 2);
    const double s = clock.seconds();
    verdict("3 Talbot revival", e2 < 0.05 && e1 < 0.05 && s < 60,
            fmt("2 L_T: %.4f, L_T shifted: %.4f (tol 0.05), %.1f s (limit 60 s)", e2, e1, s));
    for (int n : {120, 480}) {
      GratingSpec wide = fig3.grating;
      wide.n = n;
      const WaveField fw = make_field(wide, fig3.beam(), default_k_grid(wide));
      note(fmt("n = %d: 2 L_T %.4f, L_T shifted %.4f", n, revival_error(fw, fw.time_at(2 * l3), 0),
               revival_error(fw, fw.time_at(l3), wide.period / 2)));
    }
  }

  // 4. No crossing, on the ensemble shared by 5, 6 and 7.
  const std::size_t n_traj = 10000;
  StepPolicy policy;
  policy.steps_per_talbot = 1000;
  const std::vector<double> lt_marks{1.0 / 40, 0.25, 1.25, 12.5};
  std::vector<double> record;
  for (double m : lt_marks) record.push_back(t_at(m));
  Stopwatch ensemble_clock;
  const TrajectoryEnsemble ens = launch_ensemble(vf, n_traj, Sampling::Equispaced, fig1.seed, record, policy);
  const double ensemble_seconds = ensemble_clock.seconds();
  {
    const std::size_t violations = count_order_violations(ens);
    std::int64_t unresolved = 0, substeps = 0;
    for (const Trajectory& tr : ens.records) {
      unresolved += tr.unresolved_steps;
      substeps += tr.substeps;
    }
    verdict("4 no crossing", violations == 0 && ensemble_seconds < 600,
            fmt("%zu trajectories to 12.5 L_T: %zu order violations, %.0f s (limit 600 s)", n_traj, violations,
                ensemble_seconds));
    note(fmt("%zu base steps per L_T, chirp limit %.2f, gradient limit %.2f; %zu node-stalled, %lld unresolved "
             "of %lld substeps",
             std::size_t(policy.steps_per_talbot), policy.chirp_limit, policy.gradient_limit, ens.stalled_count(),
             (long long)unresolved, (long long)substeps));
  }

  // 5. Density transport.
  {
    std::string detail;
    bool pass = true;
    for (double m : {1.25, 12.5}) {
      const double t = t_at(m);
      const double half = g.half_extent() + 4 * order_spread(t);
      const Eigen::VectorXd edges = symmetric_edges(half, 64);
      const Histogram h = histogram(ens.positions(ens.sample_index(t)), edges);
      const double l1 = distribution_distance(h.density, binned_density(field, t, edges), h.width());
      pass = pass && l1 < 0.08;
      detail += fmt("%s%g L_T: L1 = %.4f (%zu outside)", detail.empty() ? "" : ", ", m, l1, h.outside);
    }
    verdict("5 density transport", pass, detail + " (tol 0.08, 64 bins)");
  }

  // 6. Far-field law.
  {
    const double t1 = t_at(12.5), t2 = t_at(25);
    const std::size_t j1 = ens.sample_index(t1);
    int tested = 0, within = 0;
    double worst = 0;
    std::vector<double> errors;
    for (std::size_t i = 0; i < ens.records.size(); i += 10) {
      const Trajectory& tr = ens.records[i];
      const double x1 = tr.samples[j1].x;
      if (tr.node_stalled || std::abs(x1) < 1e-3 * g.period) continue;
      const Trajectory more = integrate_from(vf, t1, x1, {t2}, policy);
      const double err = std::abs(more.samples.back().x / x1 / (t2 / t1) - 1);
      errors.push_back(err);
      ++tested;
      within += err < 0.005;
      worst = std::max(worst, err);
    }
    std::sort(errors.begin(), errors.end());
    // The five central orders that carry intensity; missing orders are nodes
    // of the far field, where t dv/dx has no limit.
    std::vector<int> orders{0};
    const double peak = field.spectrum().density(0);
    for (int m = 1; orders.size() < 5; ++m)
      if (field.spectrum().density(2 * kPi * m / g.period) > 1e-3 * peak) orders.insert(orders.end(), {-m, m});
    double probe_worst = 0;
    std::string probes;
    for (int m : orders) {
      const double p = velocity_gradient_probe(vf, m * order_spread(t1), t1, 1e-3 * g.period);
      probe_worst = std::max(probe_worst, std::abs(p - 1));
      probes += fmt(" %d:%.4f", m, p);
    }
    verdict("6 far-field law", within == tested && probe_worst < 0.01,
            fmt("slope 25/12.5 L_T: %d of %d within 0.5%% (median %.3e, max %.3e); max |t dv/dx - 1| = %.3e "
                "(tol 0.01)",
                within, tested, errors[errors.size() / 2], worst, probe_worst));
    note("t dv/dx by order at 12.5 L_T:" + probes);
    for (double m : {50.0, 200.0, 1000.0}) {
      std::string row;
      for (int k : orders)
        row += fmt(" %.5f", velocity_gradient_probe(vf, k * order_spread(t_at(m)), t_at(m), 1e-3 * g.period));
      note(fmt("t dv/dx at %g L_T:", m) + row);
    }
    // Far slope on a subset: coarse steps suffice once v_x ~ x / t.
    StepPolicy coarse = policy;
    coarse.steps_per_talbot = 20;
    int far_within = 0, far_tested = 0;
    for (std::size_t i = 5; i < ens.records.size(); i += 50) {
      const double x1 = ens.records[i].samples[j1].x;
      if (ens.records[i].node_stalled || std::abs(x1) < 1e-3 * g.period) continue;
      const Trajectory far = integrate_from(vf, t1, x1, {t_at(200), t_at(400)}, coarse);
      const double r = far.samples[2].x / far.samples[1].x;
      ++far_tested;
      far_within += std::abs(r / 2 - 1) < 0.005;
    }
    note(fmt("slope 400/200 L_T: %d of %d within 0.5%%", far_within, far_tested));
  }

  // 7. Momentum distribution.
  {
    const Eigen::VectorXd edges = default_momentum_edges(g);
    const Eigen::VectorXd quantum = binned_quantum_density(field.spectrum(), edges);
    const auto distance_at = [&](double m) {
      const MomentumHistogram h = bohm_momentum_histogram(ens, vf, m * lt, edges);
      return distribution_distance(h.density, quantum, h.width());
    };
    const double near = distance_at(1.0 / 40), far = distance_at(12.5);
    verdict("7 momentum distribution", far < 0.08 && near >= 5 * far,
            fmt("L1 at 12.5 L_T = %.4f (tol 0.08); L_T/40: %.4f, ratio %.2f (need >= 5)", far, near, near / far));
    note(fmt("L1 at L_T/4 = %.4f, 1.25 L_T = %.4f", distance_at(0.25), distance_at(1.25)));
    // Every 5th path carried on to larger y with coarse steps.
    StepPolicy coarse = policy;
    coarse.steps_per_talbot = 20;
    const std::vector<double> later{t_at(50), t_at(200)};
    const std::size_t j1 = ens.sample_index(t_at(12.5));
    std::vector<Eigen::VectorXd> p(later.size(), Eigen::VectorXd(ens.records.size() / 5));
    for (std::size_t i = 0; i < ens.records.size() / 5; ++i) {
      const Trajectory more = integrate_from(vf, t_at(12.5), ens.records[5 * i].samples[j1].x, later, coarse);
      for (std::size_t j = 0; j < later.size(); ++j) p[j](Eigen::Index(i)) = beam.mass * more.samples[j + 1].vx;
    }
    note(fmt("subset of %zu: L1 at 12.5 L_T = %.4f, 50 L_T = %.4f, 200 L_T = %.4f", ens.records.size() / 5,
             distribution_distance(histogram(beam.mass * ens.velocities(j1)(Eigen::seq(0, Eigen::last, 5)), edges).density,
                                   quantum, edges(1) - edges(0)),
             distribution_distance(histogram(p[0], edges).density, quantum, edges(1) - edges(0)),
             distribution_distance(histogram(p[1], edges).density, quantum, edges(1) - edges(0))));
  }

  // 8. MD far-field agreement.
  {
    Stopwatch clock;
    std::vector<double> ys, dist;
    for (int i = 0; i < 5; ++i) ys.push_back(0.25 * std::pow(50.0, i / 4.0));
    bool monotone = true;
    std::string row;
    for (double m : ys) {
      dist.push_back(near_field_discrepancy(field, m * lt));
      if (dist.size() > 1) monotone = monotone && dist.back() < dist[dist.size() - 2];
      row += fmt(" %.3g:%.4f", m, dist.back());
    }
    verdict("8 MD far field", dist.back() < 0.05 && monotone,
            fmt("L1 at 12.5 L_T = %.4f (tol 0.05); monotone over 5 log-spaced y: %s", dist.back(),
                monotone ? "yes" : "no"));
    note("L1 by y/L_T:" + row);
    note(fmt("L1 at 50 L_T = %.4f, 200 L_T = %.4f; %.1f s", near_field_discrepancy(field, 50 * lt),
             near_field_discrepancy(field, 200 * lt), clock.seconds()));
  }

  // 9. MD crossing.
  {
    const double t = t_at(12.5);
    const double x_star = 3.1 * g.period;
    const auto [a, b] = meeting_pair(g, beam, 0, 4, x_star, t);
    const double xa = a.position(beam, t), xb = b.position(beam, t);
    const double ulp = std::nextafter(x_star, INFINITY) - x_star;
    const bool distinct = a.x0 != b.x0 && a.position(beam, t / 2) != b.position(beam, t / 2);
    verdict("9 MD crossing", std::abs(xa - xb) <= 4 * ulp && std::abs(xa - x_star) <= 4 * ulp && distinct,
            fmt("slits 0 and 4 meet at x = %.17g and %.17g (target %.17g)", xa, xb, x_star));
  }

  // 10. Propagator cross-validation.
  {
    const double ya = 0.25 * lt;
    const double half_a = g.half_extent() + 8 * order_spread(t_at(0.25));
    const Eigen::VectorXd xa = Eigen::VectorXd::LinSpaced(2001, -half_a, half_a);
    const WaveField fa = make_field(g, beam, k_grid_for_window(g, beam, ya, half_a));
    Eigen::VectorXcd fresnel(xa.size());
    for (Eigen::Index i = 0; i < xa.size(); ++i) fresnel(i) = psi_fresnel(fa, xa(i), fa.time_at(ya));
    const double ea = relative_l2(psi_spectral(fa, xa, fa.time_at(ya)), fresnel);

    // Reference: spectral synthesis, or the closed form where the k-grid
    // for the window would be too large.
    const auto farfield_error = [&](double m, bool spectral) {
      const double y = m * lt;
      const double half = g.half_extent() + 8 * order_spread(t_at(m));
      const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(4001, -half, half);
      const WaveField f = spectral ? make_field(g, beam, k_grid_for_window(g, beam, y, half)) : field;
      const double t = f.time_at(y);
      Eigen::VectorXcd ff(x.size()), ref(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        ff(i) = psi_farfield(f, x(i), t);
        if (!spectral) ref(i) = psi_kernel(f, x(i), t);
      }
      return relative_l2(ff, spectral ? psi_spectral(f, x, t) : ref);
    };
    const double eb = farfield_error(12.5, true);
    verdict("10 cross-validation", ea < 1e-4 && eb < 1e-3,
            fmt("spectral vs Fresnel at L_T/4: %.3e (tol 1e-4); spectral vs far field at 12.5 L_T: %.3e (tol 1e-3)",
                ea, eb));
    note(fmt("far-field phase error at 12.5 L_T = %.3f rad", farfield_phase_error(field, t_at(12.5))));
    note(fmt("closed form vs far field at 12.5 L_T: %.3e", farfield_error(12.5, false)));
    for (double m : {100.0, 1000.0, 10000.0})
      note(fmt("closed form vs far field at %g L_T: %.3e (phase error %.4f rad)", m, farfield_error(m, false),
               farfield_phase_error(field, t_at(m))));
  }

  // 11. Determinism.
  {
    Scenario s = fig1;
    s.outputs = {Output::Spectrum, Output::Intensity, Output::Carpet, Output::Trajectories, Output::Momentum,
                 Output::MD};
    s.sampling = Sampling::UniformDensity;
    s.steps_per_talbot = 1000;
    const fs::path root = fs::temp_directory_path() / "talbot_acceptance";
    fs::remove_all(root);
    const RunResult ra = run_scenario(s, root / "a");
    const RunResult rb = run_scenario(s, root / "b");
    bool same = ra.files.size() == rb.files.size();
    std::size_t csv = 0;
    for (std::size_t i = 0; same && i < ra.files.size(); ++i) {
      same = slurp(ra.files[i]) == slurp(rb.files[i]);
      csv += ra.files[i].extension() == ".csv";
    }
    verdict("11 determinism", same && csv > 0, fmt("%zu CSV files byte-identical across two runs: %s", csv,
                                                  same ? "yes" : "no"));
    fs::remove_all(root);
  }

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures > 0 ? 1 : 0;
}
