#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"
#include "sos/core/error.hpp"

using sos::cli::ConfigError;
using sos::cli::RunConfig;

namespace {

struct Command {
  const char* name;
  const char* help;
};

constexpr Command kCommands[] = {
    {"check", "catalog validation and the invariant suite on tiny instances"},
    {"simulate", "one trajectory of the jump process"},
    {"exit-time", "Monte Carlo exit times from A, with the exact law when the box is small"},
    {"couple", "one basic-coupling trajectory of the constrained and auxiliary processes"},
    {"gap", "spectral gap of the generator"},
    {"killed", "killed operator: gap ordering, survival curve, mean exit time"},
    {"identities", "variance decomposition, derivative identity and ratio bounds on the gradient space"},
    {"scaling-exit", "median exit time against L"},
    {"scaling-gap", "normalized spectral gaps over an (L, M) grid"},
    {"coupling-fidelity", "decoupling probability against L"},
    {"rn-bound", "Radon-Nikodym bound between the box measure and the auxiliary measure"},
};

void add_common(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
  sub->add_option("--config", config_path, "JSON file supplying any flag; the command line wins");
  sub->add_option("--L", cfg.L, "interface length")->check(CLI::PositiveNumber);
  sub->add_option("--M", cfg.M, "height bound: integer, inf, or auto for max(1, L/2)");
  sub->add_option("--beta", cfg.beta, "inverse temperature");
  sub->add_option("--kind", cfg.kind, "measure kind: constrained or auxiliary");
  sub->add_option("--eps", cfg.eps, "region A = {|phi| <= (1 - eps) L / 2}");
  sub->add_option("--alpha", cfg.alpha, "region B = {|phi| <= alpha L}");
  sub->add_option("--catalog", cfg.catalog_file, "potential catalog JSON file");
  sub->add_flag("--phi0", cfg.phi0, "zero long-range potential");
  sub->add_option("--preset", cfg.preset, "built-in catalog: small or bars");
  sub->add_option("--mass", cfg.mass, "decay mass m of the built-in catalog");
  sub->add_option("--bars", cfg.bars, "longest bar of the bars catalog");
  sub->add_option("--R", cfg.R, "truncation |eta_i| <= R of the auxiliary space");
  sub->add_option("--horizon", cfg.horizon, "time horizon");
  sub->add_option("--replicas", cfg.replicas, "Monte Carlo replicas");
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--t", cfg.t, "coupling time window");
  sub->add_option("--Ls", cfg.Ls, "list of lengths for the scaling harnesses");
  sub->add_option("--grid", cfg.grid, "grid entries L:M for scaling-gap");
  sub->add_option("--start", cfg.start, "initial heights (default flat)");
  sub->add_option("--tests", cfg.tests, "random test functions for identities");
  sub->add_option("--times", cfg.times, "survival curve points for killed");
  sub->add_option("--slope-lo", cfg.slope_lo, "lower end of the accepted exit-time slope");
  sub->add_option("--slope-hi", cfg.slope_hi, "upper end of the accepted exit-time slope");
  sub->add_option("--out", cfg.out, "output directory");
}

std::string key_of(const CLI::Option* opt) {
  std::string name = opt->get_name(false, true);
  while (!name.empty() && name.front() == '-') name.erase(name.begin());
  for (char& c : name)
    if (c == '-') c = '_';
  return name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solid-on-solid interface laboratory: simulation, spectral computations and scaling harnesses"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;
  for (const auto& c : kCommands) add_common(app.add_subcommand(c.name, c.help), cfg, config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("config: cannot open " + config_path);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
      std::set<std::string> given;
      for (const CLI::Option* opt : sub->get_options())
        if (opt->count() > 0) given.insert(key_of(opt));
      if (given.count("catalog")) given.insert("phi0");
      sos::cli::merge_config_file(cfg, doc, given);
    }
    const auto result = sos::cli::run_command(cfg);
    std::cout << result.line << (result.pass ? "" : "  [FAIL]") << '\n';
    for (const auto& f : result.failures) std::cerr << cfg.command << ": " << f << '\n';
    return result.pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sos::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sos::SizeCapError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
