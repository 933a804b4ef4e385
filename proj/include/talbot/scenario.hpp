#ifndef TALBOT_SCENARIO_HPP
#define TALBOT_SCENARIO_HPP

#include "talbot/beam_grating.hpp"
#include "talbot/bohm.hpp"
#include "talbot/wavefield.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace talbot {

/// A screen distance, either in metres or in units of the Talbot length.
struct Distance {
  double value = 0;
  bool talbot_units = false;

  double meters(double talbot_length) const { return talbot_units ? value * talbot_length : value; }
  bool operator==(const Distance&) const = default;
};

enum class Output { Spectrum, Intensity, Carpet, Trajectories, Momentum, MD };

std::string to_string(Output o);
Output output_from_string(const std::string& s);

/// Everything needed to reproduce one run. The beam may be given by any of
/// wavelength, speed or wavenumber; when several are present they must agree
/// to 1e-3 (figure captions quote rounded values) and the first of
/// wavenumber, wavelength, speed defines the beam.
struct Scenario {
  std::string name = "custom";
  double mass = 0;
  std::optional<double> wavelength;
  std::optional<double> speed;
  std::optional<double> wavenumber;
  GratingSpec grating;

  std::vector<Distance> y;
  std::vector<Output> outputs;
  std::size_t n_traj = 200;
  Sampling sampling = Sampling::Equispaced;
  bool half_plane = false;  // keep only trajectories launched at x0 >= midpoint
  int n_grid = 4096;
  Eigen::Index k_points = 8192;  // k-grid half count over |k| <= 128 pi / d
  int bins = 81;
  std::uint64_t seed = 1;
  int steps_per_talbot = 4000;
  double epsilon_node = 1e-8;
  Propagator propagator = Propagator::Kernel;
  int carpet_rows = 200;

  ParticleBeam beam() const;
  double talbot_length() const;
  std::vector<double> y_meters() const;
  /// Throws ConfigError when the parameters are inconsistent.
  void validate() const;
  bool operator==(const Scenario&) const;
};

/// Parses `key = value` lines; '#' starts a comment. Lengths accept the
/// suffixes m, cm, mm, um, nm, pm; screen distances also accept LT.
/// Unknown keys and malformed values raise ConfigError with the line number.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// Parses one screen distance such as "1.25 LT" or "3 mm".
Distance parse_distance(const std::string& text);

std::vector<std::string> preset_names();
Scenario preset(const std::string& name);

struct RunResult {
  std::vector<std::filesystem::path> files;  // written outputs, manifest last
  std::vector<std::string> warnings;
};

/// Runs every requested output into `out_dir` and writes manifest.txt with
/// the resolved parameters and FNV-1a checksums of the outputs. On failure the
/// files written so far are removed and the exception propagates.
RunResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

/// printf-style "%.17g".
std::string format_double(double v);

}  // namespace talbot

#endif
