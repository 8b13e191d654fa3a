#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sos/core/error.hpp"
#include "sos/core/numeric.hpp"
#include "sos/dynamics/coupling.hpp"
#include "sos/dynamics/simulate.hpp"
#include "sos/experiments/harness.hpp"
#include "sos/experiments/pool.hpp"
#include "sos/experiments/report.hpp"
#include "sos/experiments/stats.hpp"
#include "sos/model/energy.hpp"
#include "sos/model/gibbs.hpp"
#include "sos/model/state_space.hpp"
#include "sos/spectral/generator.hpp"
#include "sos/spectral/gradient.hpp"
#include "sos/spectral/killed.hpp"

namespace sos::cli {

using model::Configuration;
using model::MeasureKind;
using model::ModelParams;
namespace ex = sos::experiments;

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Configuration start_of(const RunConfig& cfg, const ModelParams& p) {
  if (cfg.start.empty()) return Configuration(std::vector<int>(static_cast<std::size_t>(p.L), 0));
  if (static_cast<int>(cfg.start.size()) != p.L) throw ConfigError("start: expected L = " + std::to_string(p.L) + " heights");
  Configuration c(cfg.start);
  if (!model::has_mass(c, p)) throw ConfigError("start: configuration has zero mass under the measure");
  return c;
}

// Collects named pass/fail items.
struct Checklist {
  nlohmann::json items = nlohmann::json::array();
  std::vector<std::string> failures;
  void add(const std::string& name, bool ok, nlohmann::json detail = nlohmann::json::object()) {
    items.push_back({{"name", name}, {"pass", ok}, {"detail", std::move(detail)}});
    if (!ok) failures.push_back(name);
  }
};

ModelParams tiny(const model::PotentialCatalog& cat, double beta, int L, int M, MeasureKind kind, double eps = 0.1) {
  ModelParams p;
  p.L = L;
  p.M = M;
  p.beta = beta;
  p.catalog = cat;
  p.kind = kind;
  p.eps = eps;
  return p;
}

CommandResult cmd_check(const RunConfig& cfg) {
  const auto cat = resolve_catalog(cfg);
  const double beta = cfg.beta;
  Checklist list;
  const auto decay = model::validate_catalog(cat);
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : decay.levels) levels.push_back({{"k", lv.k}, {"mass", lv.mass}, {"bound", lv.bound}});
  list.add("catalog decay", decay.pass, {{"levels", levels}});

  double worst_rev = 0.0;
  long long pairs = 0;
  for (auto kind : {MeasureKind::constrained, MeasureKind::auxiliary})
    for (int L = 1; L <= 3; ++L)
      for (int M = 1; M <= 2; ++M) {
        const auto rev = spectral::check_reversibility(spectral::build_generator(tiny(cat, beta, L, M, kind), 2));
        worst_rev = std::max(worst_rev, rev.max_log_violation);
        pairs += rev.pairs;
      }
  list.add("detailed balance", worst_rev < 1e-12, {{"max_log_violation", worst_rev}, {"pairs", pairs}});

  for (auto kind : {MeasureKind::constrained, MeasureKind::auxiliary}) {
    const auto g = spectral::spectral_gap(spectral::build_generator(tiny(cat, beta, 3, 1, kind), 2));
    list.add("rayleigh sandwich (" + model::to_string(kind) + ")", g.random_rayleigh_min >= g.value * (1.0 - 1e-9),
             {{"gap", g.value}, {"random_rayleigh_min", g.random_rayleigh_min}});
  }

  {
    const auto gen = spectral::build_generator(tiny(cat, beta, 4, 2, MeasureKind::constrained, 0.5), 0);
    const auto killed = spectral::killed_operator(gen, 0.5);
    const double l1 = spectral::spectral_gap(gen).value;
    const double kg = killed.killed_gap();
    list.add("killed gap ordering", kg >= l1 - 1e-10, {{"killed_gap", kg}, {"gap", l1}});
    Eigen::VectorXd s = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(killed.dimension()), 1.0);
    s /= s.sum();
    const auto curve = spectral::survival_curve(killed, s, {0.0});
    list.add("survival at t = 0", std::abs(curve.survival[0] - 1.0) < 1e-12, {{"value", curve.survival[0]}});
  }

  {
    const auto p = tiny(cat, beta, 3, 1, MeasureKind::auxiliary);
    const spectral::GradientSpace gs(p, 2);
    double var_res = 0.0, der_res = 0.0;
    for (const auto& f : spectral::test_functions(gs, 10, cfg.seed)) {
      var_res = std::max(var_res, spectral::variance_decomposition(gs, f).residual);
      for (int i = 2; i <= 3; ++i) der_res = std::max(der_res, spectral::derivative_identity(gs, f, i));
    }
    list.add("variance decomposition", var_res < 1e-10, {{"max_residual", var_res}});
    list.add("derivative identity", der_res < 1e-10, {{"max_residual", der_res}});
    const auto rb = spectral::ratio_bounds(gs);
    if (decay.pass) list.add("conditional ratio bounds", rb.pass, spectral::to_json(rb));

    const model::GibbsTable table(tiny(cat, beta, 3, 2, MeasureKind::auxiliary), 3);
    std::vector<double> lw(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) lw[i] = model::gradient_log_weight(table.space().gradient(i), table.params());
    const double lz = log_sum_exp(lw);
    double tv = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) tv += std::abs(std::exp(lw[i] - lz) - table.probability(i));
    list.add("gradient pushforward", 0.5 * tv < 1e-12, {{"tv", 0.5 * tv}});
  }

  const auto echo = to_json(cfg);
  ex::write_report(cfg.out, "check", echo, {{"items", list.items}, {"pass", list.failures.empty()}});
  CommandResult r;
  r.pass = list.failures.empty();
  r.failures = list.failures;
  r.line = "check: " + std::to_string(list.items.size() - list.failures.size()) + "/" +
           std::to_string(list.items.size()) + " invariant suites pass";
  return r;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
  const auto p = resolve_params(cfg);
  const auto start = start_of(cfg, p);
  const double horizon = horizon_or(cfg, 100.0);
  if (!std::isfinite(horizon)) throw ConfigError("horizon: simulate needs a finite horizon");
  const auto traj = dynamics::simulate(start, horizon, p, {cfg.seed, 0});
  const auto echo = to_json(cfg);
  std::filesystem::create_directories(cfg.out);
  const auto path = std::filesystem::path(cfg.out) / (ex::report_stem("simulate", echo) + ".jsonl");
  std::ofstream out(path);
  dynamics::write_trajectory(out, traj, echo);
  std::ostringstream line;
  line << "simulate: " << traj.jumps << " jumps up to t = " << fmt(horizon) << ", written to " << path.string();
  return {true, line.str(), {}};
}

CommandResult cmd_couple(const RunConfig& cfg) {
  auto p = resolve_params(cfg);
  p.kind = MeasureKind::constrained;
  const auto start = start_of(cfg, p);
  const double horizon = horizon_or(cfg, 100.0);
  if (!std::isfinite(horizon)) throw ConfigError("horizon: couple needs a finite horizon");
  const auto trace = dynamics::couple(start, horizon, p, {cfg.seed, 0});
  const auto echo = to_json(cfg);
  std::filesystem::create_directories(cfg.out);
  const auto path = std::filesystem::path(cfg.out) / (ex::report_stem("couple", echo) + ".jsonl");
  std::ofstream out(path);
  dynamics::write_coupling(out, trace, echo);
  auto opt = [](const std::optional<double>& x) { return x ? fmt(*x) : std::string("none"); };
  return {true,
          "couple: sigma = " + opt(trace.sigma) + ", tau = " + opt(trace.tau) + ", taubar = " + opt(trace.tau_bar) +
              ", written to " + path.string(),
          {}};
}

CommandResult cmd_exit_time(const RunConfig& cfg) {
  auto p = resolve_params(cfg);
  const auto start = start_of(cfg, p);
  if (!p.in_region_a(start)) throw ConfigError("start: must lie in region A");
  const int n = replicas_or(cfg, 1000);
  const double horizon = horizon_or(cfg, std::numeric_limits<double>::infinity());
  const auto samples = ex::parallel_map(static_cast<std::size_t>(n), [&](std::size_t r) {
    return dynamics::exit_time(start, p, {cfg.seed, r}, horizon);
  });
  std::vector<double> times;
  std::size_t censored = 0;
  ex::CsvTable table{{"replica", "time", "censored", "jumps"}, {}};
  for (std::size_t r = 0; r < samples.size(); ++r) {
    times.push_back(samples[r].time);
    censored += samples[r].censored;
    table.rows.push_back(std::vector<nlohmann::json>{r, samples[r].time, samples[r].censored, samples[r].jumps});
  }
  double mean = 0.0;
  for (double x : times) mean += x / double(times.size());
  nlohmann::json result = {{"median", ex::median(times)}, {"mean", mean}, {"censored", censored}, {"replicas", n}};
  bool pass = true;
  std::vector<std::string> failures;
  // exact comparison when the box is small enough for the killed operator
  if (p.kind == MeasureKind::constrained && std::pow(2.0 * p.height_bound() + 1.0, p.L) <= 20000.0 && censored == 0) {
    const auto gen = spectral::build_generator(p, 0);
    const auto killed = spectral::killed_operator(gen, p.eps);
    const auto local = killed.local_index(*gen.space()->index_of(start));
    Eigen::VectorXd s0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(killed.dimension()));
    s0[static_cast<Eigen::Index>(local)] = 1.0;
    std::vector<double> sorted = times;
    std::sort(sorted.begin(), sorted.end());
    const auto curve = spectral::survival_curve(killed, s0, sorted);
    std::map<double, double> cdf;
    for (std::size_t k = 0; k < sorted.size(); ++k) cdf[sorted[k]] = 1.0 - curve.survival[k];
    const auto ks = ex::ks_one_sample(times, [&](double x) { return cdf.at(x); });
    const double exact_mean = killed.mean_exit_times()[static_cast<Eigen::Index>(local)];
    result["exact"] = {{"mean", exact_mean}, {"ks_statistic", ks.statistic}, {"ks_p_value", ks.p_value},
                       {"method", curve.method}};
    pass = ks.p_value >= 0.01;
    if (!pass) failures.push_back("KS test against the killed survival curve (p = " + fmt(ks.p_value) + ")");
  }
  result["pass"] = pass;
  ex::write_report(cfg.out, "exit-time", to_json(cfg), result, table);
  return {pass,
          "exit-time: median " + fmt(result["median"].get<double>()) + ", mean " + fmt(mean) + " over " +
              std::to_string(n) + " replicas" +
              (result.contains("exact") ? ", exact mean " + fmt(result["exact"]["mean"].get<double>()) : ""),
          failures};
}

CommandResult cmd_gap(const RunConfig& cfg) {
  const auto p = resolve_params(cfg);
  const auto gen = spectral::build_generator(p, cfg.R);
  const auto g = spectral::spectral_gap(gen);
  spectral::FormReport r;
  r.name = "spectral_gap";
  r.value = g.value;
  r.L = p.L;
  r.M = p.height_bound();
  r.beta = p.beta;
  r.R = p.kind == MeasureKind::auxiliary ? cfg.R : 0;
  r.space_size = gen.dimension();
  r.pass = g.random_rayleigh_min >= g.value * (1.0 - 1e-9) && g.residual < 1e-6;
  r.details = {{"residual", g.residual}, {"dense", g.dense}, {"iterations", g.iterations},
               {"random_rayleigh_min", g.random_rayleigh_min}};
  ex::write_report(cfg.out, "gap", to_json(cfg), spectral::to_json(r));
  CommandResult out{r.pass, "lambda1 = " + fmt(g.value) + " (n = " + std::to_string(gen.dimension()) + ")", {}};
  if (!r.pass) out.failures.push_back("Rayleigh sandwich or eigen-residual");
  return out;
}

CommandResult cmd_killed(const RunConfig& cfg) {
  const auto p = resolve_params(cfg);
  const auto gen = spectral::build_generator(p, cfg.R);
  const auto killed = spectral::killed_operator(gen, p.eps);
  const double l1 = spectral::spectral_gap(gen).value;
  const double kg = killed.killed_gap();
  const double bottom = killed.bottom_eigenvalue();
  Configuration start = start_of(cfg, p);
  std::size_t parent = 0;
  if (p.kind == MeasureKind::auxiliary) {
    const auto idx = gen.space()->index_of(start);
    if (!idx) throw ConfigError("start: outside the truncation");
    parent = *idx;
  } else {
    parent = *gen.space()->index_of(start);
  }
  const auto local = killed.local_index(parent);
  if (local == spectral::KilledOperator::npos) throw ConfigError("start: must lie in region A");
  const double mean_exit = killed.mean_exit_times()[static_cast<Eigen::Index>(local)];
  const double horizon = horizon_or(cfg, 5.0 * mean_exit);
  std::vector<double> times;
  const int count = std::max(2, cfg.times);
  for (int k = 0; k < count; ++k) times.push_back(horizon * k / (count - 1));
  Eigen::VectorXd s0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(killed.dimension()));
  s0[static_cast<Eigen::Index>(local)] = 1.0;
  const auto curve = spectral::survival_curve(killed, s0, times);
  Checklist list;
  list.add("killed gap ordering", kg >= l1 - 1e-10, {{"killed_gap", kg}, {"gap", l1}});
  bool monotone = true, bounded = true;
  ex::CsvTable table{{"t", "survival", "bound"}, {}};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double bound = curve.norm_factor * std::exp(-curve.decay_rate * times[k]);
    if (k && curve.survival[k] > curve.survival[k - 1] + 1e-12) monotone = false;
    if (curve.survival[k] > bound + 1e-12) bounded = false;
    table.rows.push_back(std::vector<nlohmann::json>{times[k], curve.survival[k], bound});
  }
  list.add("survival monotone", monotone);
  list.add("survival below the spectral bound", bounded);
  nlohmann::json result = {{"gap", l1},
                           {"killed_gap", kg},
                           {"bottom_eigenvalue", bottom},
                           {"region_size", killed.dimension()},
                           {"space_size", gen.dimension()},
                           {"mean_exit_time", mean_exit},
                           {"method", curve.method},
                           {"error_estimate", curve.error_estimate},
                           {"norm_factor", curve.norm_factor},
                           {"items", list.items}};
  ex::write_report(cfg.out, "killed", to_json(cfg), result, table);
  return {list.failures.empty(),
          "killed: gap " + fmt(l1) + ", killed gap " + fmt(kg) + ", decay rate " + fmt(bottom) + ", mean exit " +
              fmt(mean_exit),
          list.failures};
}

CommandResult cmd_identities(const RunConfig& cfg) {
  auto p = resolve_params(cfg);
  p.kind = MeasureKind::auxiliary;
  const spectral::GradientSpace gs(p, cfg.R);
  const auto tests = spectral::test_functions(gs, cfg.tests, cfg.seed);
  double var_res = 0.0, der_res = 0.0;
  for (const auto& f : tests) {
    var_res = std::max(var_res, spectral::variance_decomposition(gs, f).residual);
    for (int i = 2; i <= p.L; ++i) der_res = std::max(der_res, spectral::derivative_identity(gs, f, i));
  }
  const bool decay_ok = model::validate_catalog(p.catalog).pass;
  const auto rb = spectral::ratio_bounds(gs);
  const auto dom = spectral::form_domination(gs, tests);
  const auto eq = spectral::gap_equivalence(p, cfg.R);
  const auto pc = spectral::poincare_constant(gs);
  Checklist list;
  list.add("variance decomposition", var_res < 1e-10, {{"max_residual", var_res}});
  list.add("derivative identity", der_res < 1e-10, {{"max_residual", der_res}});
  list.add("gap equivalence", eq.pass, spectral::to_json(eq));
  // the ratio bounds need a decay-valid catalog; domination by 4 is a large-beta statement
  if (decay_ok) list.add("conditional ratio bounds", rb.pass, spectral::to_json(rb));
  if (p.beta >= 2.0) list.add("form domination", dom.pass, spectral::to_json(dom));
  nlohmann::json result = {{"space_size", gs.size()},
                           {"tests", tests.size()},
                           {"items", list.items},
                           {"ratio_bounds", spectral::to_json(rb)},
                           {"form_domination", spectral::to_json(dom)},
                           {"poincare", spectral::to_json(pc)}};
  ex::write_report(cfg.out, "identities", to_json(cfg), result);
  return {list.failures.empty(),
          "identities: variance residual " + fmt(var_res) + ", derivative residual " + fmt(der_res) +
              ", ratio bound usage " + fmt(rb.value) + ", domination " + fmt(dom.value),
          list.failures};
}

CommandResult from_scaling(const RunConfig& cfg, const std::string& name, const ex::ScalingReport& rep) {
  ex::write_report(cfg.out, name, to_json(cfg), ex::to_json(rep), ex::to_table(rep));
  CommandResult r{rep.pass, name + ": " + rep.verdict, {}};
  if (!rep.pass) r.failures.push_back(rep.verdict);
  for (const auto& w : rep.warnings) r.failures.push_back("warning: " + w);
  return r;
}

CommandResult cmd_scaling_exit(const RunConfig& cfg) {
  ex::ExitScalingConfig c;
  if (!cfg.Ls.empty()) c.Ls = cfg.Ls;
  c.beta = cfg.beta;
  c.eps = cfg.eps;
  c.alpha = cfg.alpha;
  c.replicas = replicas_or(cfg, 200);
  c.seed = cfg.seed;
  c.horizon = horizon_or(cfg, std::numeric_limits<double>::infinity());
  c.catalog = resolve_catalog(cfg);
  c.slope_lo = cfg.slope_lo;
  c.slope_hi = cfg.slope_hi;
  return from_scaling(cfg, "scaling-exit", ex::exit_time_scaling(c));
}

CommandResult cmd_scaling_gap(const RunConfig& cfg) {
  ex::GapScalingConfig c;
  c.grid = cfg.grid.empty() ? ex::default_gap_grid() : resolve_grid(cfg);
  c.beta = cfg.beta;
  c.R = cfg.R;
  c.catalog = resolve_catalog(cfg);
  return from_scaling(cfg, "scaling-gap", ex::gap_scaling(c));
}

CommandResult cmd_coupling_fidelity(const RunConfig& cfg) {
  ex::CouplingFidelityConfig c;
  if (!cfg.Ls.empty()) c.Ls = cfg.Ls;
  c.beta = cfg.beta;
  c.eps = cfg.eps;
  c.t = cfg.t;
  c.replicas = replicas_or(cfg, 2000);
  c.seed = cfg.seed;
  c.catalog = resolve_catalog(cfg);
  return from_scaling(cfg, "coupling-fidelity", ex::coupling_fidelity(c));
}

CommandResult cmd_rn_bound(const RunConfig& cfg) {
  ex::RadonNikodymConfig c;
  c.L = cfg.L;
  c.beta = cfg.beta;
  c.eps = cfg.eps;
  c.alpha = cfg.alpha;
  c.catalog = resolve_catalog(cfg);
  c.R = cfg.R;
  const auto r = ex::radon_nikodym_bound(c);
  ex::write_report(cfg.out, "rn-bound", to_json(cfg), spectral::to_json(r));
  CommandResult out{r.pass,
                    "rn-bound: sup ratio " + fmt(r.value) + " against bound " +
                        fmt(r.details["bound"].get<double>()),
                    {}};
  if (!r.pass) out.failures.push_back("supremum exceeds exp(w) / mubar(B)");
  return out;
}

}  // namespace

CommandResult run_command(const RunConfig& cfg) {
  static const std::map<std::string, std::function<CommandResult(const RunConfig&)>> table{
      {"check", cmd_check},
      {"simulate", cmd_simulate},
      {"exit-time", cmd_exit_time},
      {"couple", cmd_couple},
      {"gap", cmd_gap},
      {"killed", cmd_killed},
      {"identities", cmd_identities},
      {"scaling-exit", cmd_scaling_exit},
      {"scaling-gap", cmd_scaling_gap},
      {"coupling-fidelity", cmd_coupling_fidelity},
      {"rn-bound", cmd_rn_bound}};
  const auto it = table.find(cfg.command);
  if (it == table.end()) throw ConfigError("command: unknown '" + cfg.command + "'");
  return it->second(cfg);
}

}  // namespace sos::cli
