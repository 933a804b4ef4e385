#include "talbot/scenario.hpp"

#include "talbot/errors.hpp"
#include "talbot/md_model.hpp"
#include "talbot/momentum_stats.hpp"
#include "talbot/spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#ifndef TALBOT_VERSION
#define TALBOT_VERSION "unknown"
#endif

namespace talbot {

namespace {

std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Leading number and trailing unit of "0.1 um" or "0.1um".
std::pair<double, std::string> number_and_unit(const std::string& text)
{
  const std::string t = trim(text);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr == t.data()) throw ConfigError("expected a number, got '" + t + "'");
  if (!std::isfinite(value)) throw ConfigError("value '" + t + "' is not finite");
  return {value, trim(std::string(ptr, t.data() + t.size()))};
}

double length_scale(const std::string& unit)
{
  static const std::map<std::string, double> scale{{"", 1.0},    {"m", 1.0},   {"cm", 1e-2}, {"mm", 1e-3},
                                                   {"um", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12}};
  const auto it = scale.find(unit);
  if (it == scale.end()) throw ConfigError("unknown length unit '" + unit + "'");
  return it->second;
}

double parse_length(const std::string& text)
{
  const auto [v, unit] = number_and_unit(text);
  return v * length_scale(unit);
}

double parse_with_unit(const std::string& text, const std::string& unit_name)
{
  const auto [v, unit] = number_and_unit(text);
  if (!unit.empty() && unit != unit_name)
    throw ConfigError("unit '" + unit + "' not accepted here (expected " + unit_name + ")");
  return v;
}

template <typename Int>
Int parse_integer(const std::string& text)
{
  const std::string t = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("expected an integer, got '" + t + "'");
  return value;
}

bool parse_bool(const std::string& text)
{
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError("expected true or false, got '" + t + "'");
}

std::string to_string(Sampling s)
{
  return s == Sampling::Equispaced ? "equispaced" : "uniform";
}

Sampling sampling_from_string(const std::string& s)
{
  if (s == "equispaced") return Sampling::Equispaced;
  if (s == "uniform") return Sampling::UniformDensity;
  throw ConfigError("unknown sampling '" + s + "' (expected uniform or equispaced)");
}

std::string to_string(Propagator p)
{
  switch (p) {
    case Propagator::Spectral: return "spectral";
    case Propagator::Kernel: return "kernel";
    case Propagator::Fresnel: return "fresnel";
    case Propagator::FarField: return "farfield";
  }
  return "kernel";
}

Propagator propagator_from_string(const std::string& s)
{
  for (Propagator p : {Propagator::Spectral, Propagator::Kernel, Propagator::Fresnel, Propagator::FarField})
    if (to_string(p) == s) return p;
  throw ConfigError("unknown propagator '" + s + "'");
}

std::string format_distance(const Distance& d)
{
  return format_double(d.value) + (d.talbot_units ? " LT" : " m");
}

// Collects output files so that a failed run can remove them.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  ~OutputSet()
  {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) std::filesystem::remove(f, ec);
  }

  void write(const std::string& name, const std::string& content)
  {
    const std::filesystem::path path = dir_ / name;
    files_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }

  const std::vector<std::filesystem::path>& files() const { return files_; }
  void commit() { committed_ = true; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  bool committed_ = false;
};

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header)
  {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += '\n';
  }
  template <typename... Values>
  void row(const Values&... values)
  {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(values), first = false), ...);
    text_ += '\n';
  }
  void row(const std::vector<double>& values)
  {
    for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + format_double(values[i]);
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  std::string text_;
};

Eigen::VectorXd profile_grid(const Scenario& s, const WaveField& field, double y)
{
  const GratingSpec& g = field.grating();
  const double tau = field.beam().spreading(field.time_at(y));
  const double half = std::max(3.0 * g.n * g.period, tau * field.spectrum().k_max);
  return Eigen::VectorXd::LinSpaced(s.n_grid, g.midpoint() - half, g.midpoint() + half);
}

}  // namespace

std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(Output o)
{
  switch (o) {
    case Output::Spectrum: return "spectrum";
    case Output::Intensity: return "intensity";
    case Output::Carpet: return "carpet";
    case Output::Trajectories: return "trajectories";
    case Output::Momentum: return "momentum";
    case Output::MD: return "md";
  }
  return "intensity";
}

Output output_from_string(const std::string& s)
{
  for (Output o : {Output::Spectrum, Output::Intensity, Output::Carpet, Output::Trajectories, Output::Momentum,
                   Output::MD})
    if (to_string(o) == s) return o;
  throw ConfigError("unknown output '" + s + "'");
}

Distance parse_distance(const std::string& text)
{
  const auto [v, unit] = number_and_unit(text);
  if (unit == "LT") return {v, true};
  return {v * length_scale(unit), false};
}

ParticleBeam Scenario::beam() const
{
  if (wavenumber) return ParticleBeam::from_wavenumber(mass, *wavenumber);
  if (wavelength) return ParticleBeam::from_wavelength(mass, *wavelength);
  if (speed) return ParticleBeam::from_speed(mass, *speed);
  throw ConfigError("beam needs one of wavelength, speed, wavenumber");
}

double Scenario::talbot_length() const
{
  return talbot::talbot_length(grating, beam());
}

std::vector<double> Scenario::y_meters() const
{
  const double lt = talbot_length();
  std::vector<double> out;
  for (const Distance& d : y) out.push_back(d.meters(lt));
  return out;
}

void Scenario::validate() const
{
  if (!(mass > 0)) throw ConfigError("mass must be positive");
  const ParticleBeam b = beam();
  auto agree = [](double a, double ref) { return std::abs(a - ref) <= 1e-3 * std::abs(ref); };
  if (wavelength && !agree(*wavelength, b.wavelength))
    throw ConfigError("wavelength inconsistent with the beam (" + format_double(b.wavelength) + " m)");
  if (speed && !agree(*speed, b.speed))
    throw ConfigError("speed inconsistent with hbar k / m (" + format_double(b.speed) + " m/s)");
  grating.validate();
  if (y.empty()) throw ConfigError("at least one y is required");
  for (const Distance& d : y)
    if (!(d.value >= 0)) throw ConfigError("y must be non-negative");
  if (outputs.empty()) throw ConfigError("no outputs requested");
  if (n_traj < 2) throw ConfigError("n_traj must be >= 2");
  if (n_grid < 2) throw ConfigError("n_grid must be >= 2");
  if (k_points < 16) throw ConfigError("k_points must be >= 16");
  if (bins < 1) throw ConfigError("bins must be >= 1");
  if (steps_per_talbot < 1) throw ConfigError("steps_per_talbot must be >= 1");
  if (carpet_rows < 1) throw ConfigError("carpet_rows must be >= 1");
  if (!(epsilon_node >= 0 && epsilon_node < 1)) throw ConfigError("epsilon_node must lie in [0, 1)");
}

bool Scenario::operator==(const Scenario& o) const
{
  const GratingSpec &a = grating, &b = o.grating;
  return name == o.name && mass == o.mass && wavelength == o.wavelength && speed == o.speed &&
         wavenumber == o.wavenumber && a.n == b.n && a.period == b.period && a.width == b.width &&
         a.window == b.window && a.gaussian_width == b.gaussian_width && a.centered == b.centered && y == o.y &&
         outputs == o.outputs && n_traj == o.n_traj && sampling == o.sampling && half_plane == o.half_plane &&
         n_grid == o.n_grid && k_points == o.k_points && bins == o.bins && seed == o.seed &&
         steps_per_talbot == o.steps_per_talbot && epsilon_node == o.epsilon_node &&
         propagator == o.propagator && carpet_rows == o.carpet_rows;
}

Scenario parse_scenario(const std::string& text)
{
  Scenario s;
  s.outputs.clear();
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string content = trim(raw.substr(0, raw.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line);
    try {
      if (key == "name") s.name = value;
      else if (key == "mass") s.mass = parse_with_unit(value, "kg");
      else if (key == "wavelength") s.wavelength = parse_length(value);
      else if (key == "speed") s.speed = parse_with_unit(value, "m/s");
      else if (key == "wavenumber") s.wavenumber = parse_with_unit(value, "1/m");
      else if (key == "n") s.grating.n = parse_integer<int>(value);
      else if (key == "d") s.grating.period = parse_length(value);
      else if (key == "delta") s.grating.width = parse_length(value);
      else if (key == "window") s.grating.window = window_from_string(value);
      else if (key == "a") s.grating.gaussian_width = parse_length(value);
      else if (key == "centered") s.grating.centered = parse_bool(value);
      else if (key == "y") {
        for (const std::string& item : split_list(value)) s.y.push_back(parse_distance(item));
      } else if (key == "outputs") {
        for (const std::string& item : split_list(value)) s.outputs.push_back(output_from_string(item));
      } else if (key == "n_traj") s.n_traj = parse_integer<std::size_t>(value);
      else if (key == "sampling") s.sampling = sampling_from_string(value);
      else if (key == "half_plane") s.half_plane = parse_bool(value);
      else if (key == "n_grid") s.n_grid = parse_integer<int>(value);
      else if (key == "k_points") s.k_points = parse_integer<Eigen::Index>(value);
      else if (key == "bins") s.bins = parse_integer<int>(value);
      else if (key == "seed") s.seed = parse_integer<std::uint64_t>(value);
      else if (key == "steps_per_talbot") s.steps_per_talbot = parse_integer<int>(value);
      else if (key == "epsilon_node") s.epsilon_node = parse_with_unit(value, "");
      else if (key == "propagator") s.propagator = propagator_from_string(value);
      else if (key == "carpet_rows") s.carpet_rows = parse_integer<int>(value);
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      if (e.line() > 0) throw;
      throw ConfigError(e.what(), line);
    }
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s)
{
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  put("name", s.name);
  put("mass", format_double(s.mass) + " kg");
  if (s.wavelength) put("wavelength", format_double(*s.wavelength) + " m");
  if (s.speed) put("speed", format_double(*s.speed) + " m/s");
  if (s.wavenumber) put("wavenumber", format_double(*s.wavenumber) + " 1/m");
  put("n", std::to_string(s.grating.n));
  put("d", format_double(s.grating.period) + " m");
  put("window", to_string(s.grating.window));
  if (s.grating.window == Window::Square) put("delta", format_double(s.grating.width) + " m");
  else put("a", format_double(s.grating.gaussian_width) + " m");
  put("centered", s.grating.centered ? "true" : "false");
  std::string ys, outs;
  for (const Distance& d : s.y) ys += (ys.empty() ? "" : ", ") + format_distance(d);
  for (Output o : s.outputs) outs += (outs.empty() ? "" : ", ") + to_string(o);
  put("y", ys);
  put("outputs", outs);
  put("n_traj", std::to_string(s.n_traj));
  put("sampling", to_string(s.sampling));
  put("half_plane", s.half_plane ? "true" : "false");
  put("n_grid", std::to_string(s.n_grid));
  put("k_points", std::to_string(s.k_points));
  put("bins", std::to_string(s.bins));
  put("seed", std::to_string(s.seed));
  put("steps_per_talbot", std::to_string(s.steps_per_talbot));
  put("epsilon_node", format_double(s.epsilon_node));
  put("propagator", to_string(s.propagator));
  put("carpet_rows", std::to_string(s.carpet_rows));
  return out;
}

std::vector<std::string> preset_names()
{
  return {"fig1", "fig2", "fig3", "fig5", "fig6"};
}

Scenario preset(const std::string& name)
{
  Scenario s;
  s.name = name;
  // Five-slit grating of the near- and far-field figures.
  auto five_slit = [&s] {
    s.mass = 1.19e-24;
    s.wavelength = 2.53e-12;
    s.speed = 220;
    s.grating.n = 5;
    s.grating.period = 0.1e-6;
    s.grating.width = 0.05e-6;
  };
  // Thirty-slit Ronchi grating.
  auto ronchi = [&s] {
    s.mass = 3.8189e-26;
    s.wavenumber = std::numbers::pi / 8 * 1e12;
    s.speed = 1084;
    s.grating.n = 30;
    s.grating.period = 0.2e-6;
    s.grating.width = 0.1e-6;
  };
  if (name == "fig1" || name == "fig2") {
    five_slit();
    s.y = {{name == "fig1" ? 1.25 : 12.5, true}};
    s.outputs = {Output::Intensity, Output::Trajectories};
  } else if (name == "fig3") {
    ronchi();
    s.y = {{2.0, true}};
    s.half_plane = true;
    s.outputs = {Output::Trajectories, Output::Carpet};
  } else if (name == "fig5") {
    five_slit();
    s.y = {{1.0 / 40, true}, {0.25, true}, {1.25, true}, {12.5, true}};
    s.outputs = {Output::Momentum};
    s.n_traj = 10000;
    s.sampling = Sampling::UniformDensity;
  } else if (name == "fig6") {
    ronchi();
    s.y = {{0.25, true}, {0.5, true}, {0.75, true}, {1.0, true}};
    s.outputs = {Output::Momentum};
    s.n_traj = 10000;
    s.sampling = Sampling::UniformDensity;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  s.validate();
  return s;
}

std::string file_checksum(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

RunResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir)
{
  s.validate();
  std::filesystem::create_directories(out_dir);
  OutputSet files(out_dir);
  RunResult result;

  const ParticleBeam beam = s.beam();
  const GratingSpec& g = s.grating;
  const double lt = talbot::talbot_length(g, beam);
  const std::vector<double> ys = s.y_meters();
  const double k_max = 128 * std::numbers::pi / g.period;
  const MomentumSpectrum spectrum = spectrum_analytic(g, beam, symmetric_grid(k_max, s.k_points));
  const WaveField field(spectrum, beam, g);
  const VelocityField vf{field, s.epsilon_node};
  StepPolicy policy;
  policy.steps_per_talbot = s.steps_per_talbot;
  policy.record_stride = std::max(1, s.steps_per_talbot / 50);
  const auto wants = [&s](Output o) { return std::find(s.outputs.begin(), s.outputs.end(), o) != s.outputs.end(); };
  const double cross = gaussian_cross_mass(g);
  if (cross > 1e-6) result.warnings.push_back("gaussian openings overlap: cross-term mass " + format_double(cross));

  if (wants(Output::Spectrum)) {
    Csv csv({"k_per_m", "c_real_m_half", "c_imag_m_half", "density_m"});
    for (Eigen::Index i = 0; i < spectrum.k_grid.size(); ++i)
      csv.row(spectrum.k_grid(i), spectrum.c_values(i).real(), spectrum.c_values(i).imag(),
              std::norm(spectrum.c_values(i)));
    files.write("spectrum.csv", csv.str());
  }

  if (wants(Output::Intensity)) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const Eigen::VectorXd x = profile_grid(s, field, ys[j]);
      IntensityProfile p;
      if (s.propagator == Propagator::Spectral && ys[j] > 0) {
        const double half = (x(x.size() - 1) - x(0)) / 2;
        const WaveField wide(spectrum_analytic(g, beam, k_grid_for_window(g, beam, ys[j], half)), beam, g);
        p = intensity_profile(wide, ys[j], x, Propagator::Spectral);
      } else {
        p = intensity_profile(field, ys[j], x, ys[j] > 0 ? s.propagator : Propagator::Kernel);
      }
      Csv csv({"x_m", "density_per_m"});
      for (Eigen::Index i = 0; i < x.size(); ++i) csv.row(x(i), p.density(i));
      files.write("intensity_y" + std::to_string(j) + ".csv", csv.str());
    }
  }

  if (wants(Output::Carpet)) {
    const double y_max = *std::max_element(ys.begin(), ys.end());
    const double tau_max = beam.spreading(beam.time_at(y_max));
    const double half = std::max(g.half_extent() + 2 * g.period, tau_max * 4 * std::numbers::pi / g.period);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(s.n_grid, g.midpoint() - half, g.midpoint() + half);
    std::vector<double> rows;
    for (int r = 1; r <= s.carpet_rows; ++r) rows.push_back(y_max * r / s.carpet_rows);
    Csv csv({"y_m", "x_m", "density_per_m"});
    for (const IntensityProfile& p : carpet(field, rows, x, Propagator::Kernel))
      for (Eigen::Index i = 0; i < x.size(); ++i) csv.row(p.y, x(i), p.density(i));
    files.write("carpet.csv", csv.str());
  }

  if (wants(Output::Trajectories) || wants(Output::Momentum)) {
    std::vector<double> times;
    const double t_start = start_time(vf, policy);
    for (double y : ys)
      if (beam.time_at(y) > t_start) times.push_back(beam.time_at(y));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.empty()) throw DomainError("trajectories need a y beyond the start distance");

    Eigen::VectorXd x0 = launch_points(g, s.n_traj, s.sampling, s.seed);
    if (s.half_plane) {
      std::vector<double> kept;
      for (Eigen::Index i = 0; i < x0.size(); ++i)
        if (x0(i) >= g.midpoint()) kept.push_back(x0(i));
      x0 = Eigen::Map<Eigen::VectorXd>(kept.data(), Eigen::Index(kept.size()));
    }
    TrajectoryEnsemble ens = integrate_ensemble(vf, x0, times, policy);
    ens.seed = s.seed;
    if (const std::size_t stalled = ens.stalled_count())
      result.warnings.push_back(std::to_string(stalled) + " trajectories node-stalled");

    if (wants(Output::Trajectories)) {
      Csv csv({"traj_id", "t_s", "x_m", "y_m", "vx_m_per_s"});
      for (std::size_t i = 0; i < ens.records.size(); ++i)
        for (const TrajectorySample& p : ens.records[i].samples) csv.row(i, p.t, p.x, beam.distance_at(p.t), p.vx);
      files.write("trajectories.csv", csv.str());
    }
    if (wants(Output::Momentum)) {
      const Eigen::VectorXd edges = default_momentum_edges(g, s.bins);
      const Eigen::VectorXd quantum = binned_quantum_density(spectrum, edges);
      for (std::size_t j = 0; j < ys.size(); ++j) {
        if (!(beam.time_at(ys[j]) > t_start)) continue;
        const MomentumHistogram h = bohm_momentum_histogram(ens, vf, ys[j], edges);
        const Eigen::VectorXd centers = h.centers();
        Csv csv({"bin_center_kgm_s", "bohm_density", "quantum_density"});
        for (Eigen::Index i = 0; i < centers.size(); ++i) csv.row(centers(i), h.density(i), quantum(i));
        files.write("momentum_y" + std::to_string(j) + ".csv", csv.str());
      }
    }
  }

  if (wants(Output::MD)) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (!(ys[j] > 0)) continue;
      const Eigen::VectorXd x = profile_grid(s, field, ys[j]);
      const ArrivalProbability p = arrival_probability(spectrum, g, beam, beam.time_at(ys[j]), x);
      std::vector<std::string> header{"x_m", "p_total_per_m"};
      for (int i = 1; i <= g.n; ++i) header.push_back("p_slit_" + std::to_string(i));
      Csv csv(header);
      std::vector<double> row(2 + g.n);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        row[0] = x(i);
        row[1] = p.total(i);
        for (int k = 0; k < g.n; ++k) row[2 + k] = p.per_slit(k, i);
        csv.row(row);
      }
      files.write("md_y" + std::to_string(j) + ".csv", csv.str());
    }
  }

  std::string manifest = "# resolved scenario\n" + serialize_scenario(s);
  auto put = [&manifest](const std::string& key, const std::string& value) {
    manifest += key + " = " + value + "\n";
  };
  manifest += "# derived\n";
  put("version", TALBOT_VERSION);
  put("hbar", format_double(kHbar) + " J s");
  put("beam.wavelength", format_double(beam.wavelength) + " m");
  put("beam.speed", format_double(beam.speed) + " m/s");
  put("beam.wavenumber", format_double(beam.wavenumber) + " 1/m");
  put("talbot_length", format_double(lt) + " m");
  for (std::size_t j = 0; j < ys.size(); ++j) put("y" + std::to_string(j), format_double(ys[j]) + " m");
  put("k_grid.k_max", format_double(spectrum.k_max) + " 1/m");
  put("k_grid.dk", format_double(spectrum.dk) + " 1/m");
  put("k_grid.tail_mass", format_double(spectrum.tail_mass));
  put("integrator.start_time", format_double(start_time(vf, policy)) + " s");
  put("integrator.base_step", format_double(base_step(vf, policy)) + " s");
  put("integrator.max_halvings", std::to_string(policy.max_halvings));
  put("integrator.gradient_limit", format_double(policy.gradient_limit));
  put("integrator.record_stride", std::to_string(policy.record_stride));
  put("integrator.speed_limit", format_double(vf.speed_limit()) + " m/s");
  put("profile.half_width", "max(3 n d, hbar t k_max / m)");
  put("carpet.propagator", "kernel");
  put("momentum.range", "+-4 (2 pi hbar / d)");
  put("rng", "mt19937_64, u = (r >> 11) 2^-53");
  manifest += "# outputs\n";
  for (const auto& f : files.files())
    put("checksum." + f.filename().string(),
        "fnv1a64:" + file_checksum(f) + " bytes:" + std::to_string(std::filesystem::file_size(f)));
  for (const std::string& w : result.warnings) put("warning", w);
  files.write("manifest.txt", manifest);

  files.commit();
  result.files = files.files();
  return result;
}

}  // namespace talbot
