#include "talbot/errors.hpp"
#include "talbot/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Overrides {
  std::string config;
  std::string out = "talbot_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_traj;
  std::optional<int> bins;
  std::vector<std::string> y;
  bool dump_config = false;
};

void add_common(CLI::App* cmd, Overrides& o)
{
  cmd->add_option("--config", o.config, "scenario file (key = value)");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--n-traj", o.n_traj, "number of trajectories");
  cmd->add_option("--bins", o.bins, "momentum histogram bins");
  cmd->add_option("--y", o.y, "screen distances, e.g. 1.25LT,3mm")->delimiter(',');
  cmd->add_flag("--dump-config", o.dump_config, "print the resolved scenario and exit");
}

talbot::Scenario resolve(talbot::Scenario s, const Overrides& o)
{
  if (o.seed) s.seed = *o.seed;
  if (o.n_traj) s.n_traj = *o.n_traj;
  if (o.bins) s.bins = *o.bins;
  if (!o.y.empty()) {
    s.y.clear();
    for (const std::string& item : o.y) s.y.push_back(talbot::parse_distance(item));
  }
  s.validate();
  return s;
}

int execute(const talbot::Scenario& s, const Overrides& o)
{
  if (o.dump_config) {
    std::cout << talbot::serialize_scenario(s);
    return 0;
  }
  const talbot::RunResult r = talbot::run_scenario(s, o.out);
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : r.files) std::cout << f.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Talbot-effect wave field, Bohmian and momentum-distribution trajectories"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TALBOT_CLI_VERSION);

  Overrides o;
  std::string preset_name;
  const std::vector<std::pair<std::string, talbot::Output>> products{
      {"spectrum", talbot::Output::Spectrum},     {"intensity", talbot::Output::Intensity},
      {"carpet", talbot::Output::Carpet},         {"trajectories", talbot::Output::Trajectories},
      {"momentum", talbot::Output::Momentum},     {"md-compare", talbot::Output::MD}};
  std::vector<std::pair<CLI::App*, talbot::Output>> product_cmds;
  for (const auto& [name, output] : products) {
    CLI::App* cmd = app.add_subcommand(name, "write " + talbot::to_string(output) + " output (default scenario: fig1)");
    add_common(cmd, o);
    product_cmds.emplace_back(cmd, output);
  }
  CLI::App* preset_cmd = app.add_subcommand("preset", "run a figure preset");
  preset_cmd->add_option("name", preset_name, "fig1, fig2, fig3, fig5 or fig6")->required();
  add_common(preset_cmd, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (preset_cmd->parsed()) return execute(resolve(talbot::preset(preset_name), o), o);
    for (const auto& [cmd, output] : product_cmds) {
      if (!cmd->parsed()) continue;
      talbot::Scenario s = o.config.empty() ? talbot::preset("fig1") : talbot::load_scenario(o.config);
      s.outputs = {output};
      if (output == talbot::Output::MD) s.outputs.push_back(talbot::Output::Intensity);
      return execute(resolve(s, o), o);
    }
  } catch (const talbot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
