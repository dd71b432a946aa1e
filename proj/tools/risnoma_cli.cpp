// Command-line runner for sweep experiments.
//
//   risnoma run --preset fig4 --trials 2000 --out fig4.csv
//   risnoma run --config my.cfg --override d_U1=1.5
//   risnoma validate --config my.cfg
//   risnoma list-presets
//   risnoma show-preset fig8

#include "risnoma/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_io = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided NOMA secrecy simulations"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed, trials;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "Run an experiment and write its CSV");
  auto* cfg_opt = run->add_option("--config", config_path, "Config file (key = value lines)");
  auto* preset_opt = run->add_option("--preset", preset_name, "Built-in preset name");
  cfg_opt->excludes(preset_opt);
  run->add_option("--override", overrides, "key=value applied after the config/preset");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--trials", trials, "Trials per sweep point and series");
  run->add_option("--out", out_path, "CSV output path (stdout when absent)");
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a config file");
  validate_cmd->add_option("--config", validate_path, "Config file")->required();

  app.add_subcommand("list-presets", "Print the built-in preset names");

  std::string show_name;
  auto* show = app.add_subcommand("show-preset", "Print a preset as a config file");
  show->add_option("name", show_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  try {
    if (app.got_subcommand("list-presets")) {
      for (const auto& n : risnoma::preset_names()) std::cout << n << "\n";
      return exit_ok;
    }
    if (app.got_subcommand(show)) {
      std::cout << risnoma::serialize_config(risnoma::preset(show_name));
      return exit_ok;
    }
    if (app.got_subcommand(validate_cmd)) {
      risnoma::validate(risnoma::parse_config(read_file(validate_path)));
      std::cout << "ok\n";
      return exit_ok;
    }

    risnoma::Experiment exp;
    if (!config_path.empty()) {
      exp = risnoma::parse_config(read_file(config_path));
    } else if (!preset_name.empty()) {
      exp = risnoma::preset(preset_name);
    } else {
      std::cerr << "error: run needs --config or --preset\n";
      return exit_invalid;
    }
    for (const auto& o : overrides) risnoma::apply_override(exp, o);
    if (seed) exp.seed = *seed;
    if (trials) exp.trials = *trials;
    if (!out_path.empty()) exp.output = out_path;
    risnoma::validate(exp);

    const std::string csv = risnoma::to_csv(risnoma::run_experiment(exp, workers));
    if (exp.output.empty())
      std::cout << csv;
    else
      risnoma::write_text(exp.output, csv);
    return exit_ok;
  } catch (const risnoma::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const risnoma::OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  }
}
