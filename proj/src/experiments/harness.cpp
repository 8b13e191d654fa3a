#include "sos/experiments/harness.hpp"

#include <algorithm>
#include <cmath>

#include "sos/core/error.hpp"
#include "sos/core/numeric.hpp"
#include "sos/dynamics/coupling.hpp"
#include "sos/dynamics/rates.hpp"
#include "sos/dynamics/simulate.hpp"
#include "sos/experiments/pool.hpp"
#include "sos/experiments/sampler.hpp"
#include "sos/model/energy.hpp"
#include "sos/model/gibbs.hpp"
#include "sos/model/state_space.hpp"
#include "sos/spectral/generator.hpp"
#include "sos/spectral/killed.hpp"

namespace sos::experiments {

using model::Configuration;
using model::ModelParams;

namespace {

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

nlohmann::json fit_json(const std::optional<LinearFit>& fit) {
  if (!fit) return nullptr;
  return {{"slope", fit->slope}, {"intercept", fit->intercept}, {"slope_se", fit->slope_se},
          {"slope_ci95", {fit->slope_lo, fit->slope_hi}}, {"r2", fit->r2}, {"points", fit->n}};
}

// stream layout: high bits carry L, low bits the replica and purpose
std::uint64_t stream_id(int L, int replica, int purpose) {
  return (static_cast<std::uint64_t>(L) << 40) | (static_cast<std::uint64_t>(replica) << 2) |
         static_cast<std::uint64_t>(purpose);
}

double exact_median(const spectral::KilledOperator& killed, const Eigen::VectorXd& start) {
  auto surv = [&](const std::vector<double>& t) { return spectral::survival_curve(killed, start, t).survival; };
  double hi = 1.0;
  while (surv({hi})[0] > 0.5) hi *= 2.0;
  double lo = 0.0;
  // refine on a 64-point grid per call
  for (int round = 0; round < 8 && hi - lo > 1e-12 * hi; ++round) {
    std::vector<double> grid;
    for (int k = 1; k < 64; ++k) grid.push_back(lo + (hi - lo) * k / 64.0);
    const auto s = surv(grid);
    double new_lo = lo, new_hi = hi;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (s[k] > 0.5) new_lo = grid[k];
      else {
        new_hi = grid[k];
        break;
      }
    }
    lo = new_lo;
    hi = new_hi;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

nlohmann::json to_json(const ScalingPoint& p) {
  return {{"L", p.L},           {"M", p.M},         {"beta", p.beta},         {"metric", p.metric},
          {"metric_se", finite_or_null(p.metric_se)}, {"samples", p.samples}, {"censored", p.censored},
          {"excluded", p.excluded}, {"extra", p.extra}};
}

nlohmann::json to_json(const ScalingReport& r) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : r.points) points.push_back(to_json(p));
  return {{"name", r.name}, {"points", points}, {"fit", fit_json(r.fit)},
          {"warnings", r.warnings}, {"pass", r.pass}, {"verdict", r.verdict}};
}

CsvTable to_table(const ScalingReport& r) {
  CsvTable t;
  t.header = {"L", "M", "beta", "metric", "metric_se", "samples", "censored", "excluded"};
  std::vector<std::string> extra_keys;
  if (!r.points.empty())
    for (const auto& [k, v] : r.points.front().extra.items())
      if (v.is_primitive()) extra_keys.push_back(k);
  for (const auto& k : extra_keys) t.header.push_back(k);
  for (const auto& p : r.points) {
    std::vector<nlohmann::json> row{p.L, p.M, p.beta, p.metric, finite_or_null(p.metric_se), p.samples, p.censored,
                                    p.excluded};
    for (const auto& k : extra_keys) row.push_back(p.extra.value(k, nlohmann::json(nullptr)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

nlohmann::json to_json(const ExitScalingConfig& c) {
  return {{"Ls", c.Ls},         {"beta", c.beta},   {"eps", c.eps},           {"alpha", c.alpha},
          {"replicas", c.replicas}, {"seed", c.seed}, {"horizon", finite_or_null(c.horizon)},
          {"catalog", model::catalog_to_json(c.catalog)}, {"slope_band", {c.slope_lo, c.slope_hi}},
          {"exact_max_L", c.exact_max_L}};
}

ScalingReport exit_time_scaling(const ExitScalingConfig& config) {
  if (config.replicas < 1) throw PreconditionError("replicas must be positive");
  ScalingReport report;
  report.name = "exit_time_scaling";
  report.config = to_json(config);
  if (config.beta < 2.0) report.warnings.push_back("beta below 2: outside the low-temperature regime");
  for (int L : config.Ls) {
    const ModelParams params = ModelParams::half_box(L, config.beta, config.catalog, config.eps, config.alpha);
    params.validate();
    const int b = params.region_b_bound();
    const ConditionedSampler sampler(params, b, config.seed);
    const auto samples = parallel_map(static_cast<std::size_t>(config.replicas), [&](std::size_t r) {
      const Configuration start = sampler.draw({config.seed, stream_id(L, int(r), 0)});
      return dynamics::exit_time(start, params, {config.seed, stream_id(L, int(r), 1)}, config.horizon);
    });
    ScalingPoint pt;
    pt.L = L;
    pt.M = params.height_bound();
    pt.beta = config.beta;
    std::vector<double> times;
    double jumps = 0.0;
    for (const auto& s : samples) {
      times.push_back(s.time);
      pt.censored += s.censored ? 1 : 0;
      jumps += double(s.jumps);
    }
    pt.samples = times.size();
    // censored times equal the horizon, above every observed exit, so the
    // median is identified while fewer than half are censored
    pt.excluded = 2 * pt.censored >= pt.samples;
    pt.metric = median(times);
    pt.metric_se = median_standard_error(times);
    pt.extra = {{"A_bound", params.region_a_bound()}, {"B_bound", b},
                {"mean_jumps", jumps / double(samples.size())}, {"sampler", to_json(sampler.diagnostics())}};
    if (L <= config.exact_max_L) {
      const auto gen = spectral::build_generator(params, 0);
      const auto killed = spectral::killed_operator(gen, params.eps);
      Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(killed.dimension()));
      for (std::size_t k = 0; k < killed.dimension(); ++k) {
        const auto cfg = gen.space()->configuration(killed.region()[k]);
        if (cfg.within(b)) start[static_cast<Eigen::Index>(k)] = killed.stationary()[static_cast<Eigen::Index>(k)];
      }
      start /= start.sum();
      const double m = exact_median(killed, start);
      pt.extra["exact_median"] = m;
      pt.extra["exact_agrees"] = std::abs(pt.metric - m) <= 3.0 * pt.metric_se;
    }
    if (pt.excluded) report.warnings.push_back("L=" + std::to_string(L) + ": half or more replicas censored, excluded");
    report.points.push_back(std::move(pt));
  }
  std::vector<double> x, y;
  for (const auto& p : report.points) {
    if (p.excluded) continue;
    x.push_back(std::log(double(p.L)));
    y.push_back(std::log(p.metric));
  }
  if (x.size() >= 4) {
    report.fit = ols(x, y);
    report.pass = report.fit->slope >= config.slope_lo && report.fit->slope <= config.slope_hi;
    report.verdict = "slope " + std::to_string(report.fit->slope) + (report.pass ? " inside " : " outside ") + "[" +
                     std::to_string(config.slope_lo) + ", " + std::to_string(config.slope_hi) + "]";
  } else {
    report.pass = false;
    report.verdict = "fewer than 4 uncensored grid points, no slope";
  }
  return report;
}

nlohmann::json to_json(const GapScalingConfig& c) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& [L, M] : c.grid) grid.push_back({L, M});
  return {{"grid", grid}, {"beta", c.beta}, {"R", c.R}, {"catalog", model::catalog_to_json(c.catalog)},
          {"band_factor", c.band_factor}, {"truncation_tolerance", c.truncation_tolerance},
          {"check_truncation", c.check_truncation}};
}

std::vector<std::pair<int, int>> default_gap_grid() {
  std::vector<std::pair<int, int>> grid;
  for (int L = 2; L <= 6; ++L)
    for (int M = 1; M <= 3; ++M) grid.emplace_back(L, M);
  return grid;
}

ScalingReport gap_scaling(const GapScalingConfig& config) {
  ScalingReport report;
  report.name = "gap_scaling";
  report.config = to_json(config);
  if (config.beta < 2.0) report.warnings.push_back("beta below 2: outside the low-temperature regime");
  // every grid point is independent; parallel over points
  const auto points = parallel_map(config.grid.size(), [&](std::size_t g) {
    const auto [L, M] = config.grid[g];
    ModelParams p;
    p.L = L;
    p.M = M;
    p.beta = config.beta;
    p.catalog = config.catalog;
    p.kind = model::MeasureKind::auxiliary;
    p.validate();
    const auto gen = spectral::build_generator(p, config.R);
    const auto gap = spectral::spectral_gap(gen);
    ScalingPoint pt;
    pt.L = L;
    pt.M = M;
    pt.beta = config.beta;
    const double scale = double(L) * std::max<double>(L, double(M) * M);
    pt.metric = gap.value * scale;
    pt.samples = gen.dimension();
    pt.extra = {{"lambda1", gap.value}, {"scale", scale}, {"R", config.R}, {"space_size", gen.dimension()},
                {"residual", gap.residual}, {"dense", gap.dense}, {"iterations", gap.iterations}};
    if (config.check_truncation && config.R - 1 >= 1) {
      const auto coarse = spectral::spectral_gap(spectral::build_generator(p, config.R - 1));
      const double change = std::abs(gap.value - coarse.value) / gap.value;
      pt.extra["lambda1_R_minus_1"] = coarse.value;
      pt.extra["truncation_change"] = change;
      pt.extra["flagged"] = change > config.truncation_tolerance;
    }
    return pt;
  });
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::vector<double> x, y;
  for (const auto& pt : points) {
    lo = std::min(lo, pt.metric);
    hi = std::max(hi, pt.metric);
    x.push_back(std::log(pt.extra["scale"].get<double>()));
    y.push_back(std::log(pt.extra["lambda1"].get<double>()));
    if (pt.extra.value("flagged", false))
      report.warnings.push_back("L=" + std::to_string(pt.L) + " M=" + std::to_string(pt.M) +
                                ": gap not converged in the truncation");
    report.points.push_back(pt);
  }
  if (x.size() >= 4 && lo > 0.0) report.fit = ols(x, y);
  report.pass = !points.empty() && lo > 0.0 && hi <= config.band_factor * lo;
  report.verdict = "normalized gaps in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], ratio " +
                   std::to_string(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
  return report;
}

nlohmann::json to_json(const CouplingFidelityConfig& c) {
  return {{"Ls", c.Ls},     {"beta", c.beta},         {"eps", c.eps},
          {"t", c.t},       {"replicas", c.replicas}, {"seed", c.seed},
          {"catalog", model::catalog_to_json(c.catalog)}, {"rate_ratio_samples", c.rate_ratio_samples},
          {"rate_ratio_enumeration_cap", c.rate_ratio_enumeration_cap}};
}

ScalingReport coupling_fidelity(const CouplingFidelityConfig& config) {
  if (config.replicas < 1) throw PreconditionError("replicas must be positive");
  if (!(config.t > 0.0)) throw PreconditionError("t must be positive");
  ScalingReport report;
  report.name = "coupling_fidelity";
  report.config = to_json(config);
  std::vector<int> Ls = config.Ls;
  std::sort(Ls.begin(), Ls.end());
  for (int L : Ls) {
    const ModelParams params = ModelParams::half_box(L, config.beta, config.catalog, config.eps);
    params.validate();
    const ConditionedSampler sampler(params, params.region_a_bound(), config.seed);
    dynamics::CouplingOptions opts;
    opts.record_events = false;
    opts.need_tau = false;
    const auto hits = parallel_map(static_cast<std::size_t>(config.replicas), [&](std::size_t r) {
      const Configuration start = sampler.draw({config.seed, stream_id(L, int(r), 2)});
      const auto trace = dynamics::couple(start, config.t, params, {config.seed, stream_id(L, int(r), 3)}, opts);
      return trace.sigma && *trace.sigma <= config.t && (!trace.tau_bar || *trace.sigma <= *trace.tau_bar) ? 1 : 0;
    });
    std::size_t k = 0;
    for (int h : hits) k += static_cast<std::size_t>(h);
    const auto n = static_cast<std::size_t>(config.replicas);
    const Interval ci = k > 0 ? wilson_interval(k, n) : rule_of_three(n);
    const double norm = double(L) * config.t;
    const auto rr = dynamics::rate_ratio_deviation(params, config.rate_ratio_samples, config.rate_ratio_enumeration_cap, config.seed);
    ScalingPoint pt;
    pt.L = L;
    pt.M = params.height_bound();
    pt.beta = config.beta;
    pt.metric = ci.estimate / norm;
    pt.metric_se = std::sqrt(ci.estimate * (1.0 - ci.estimate) / double(n)) / norm;
    pt.samples = n;
    pt.extra = {{"decoupled", k},
                {"estimate", ci.estimate},
                {"ci95_lo", ci.lo},
                {"ci95_hi", ci.hi},
                {"upper_bound_only", k == 0},
                {"eps_L", config.eps * L},
                {"rate_ratio_deviation", rr.deviation},
                {"rate_ratio_exhaustive", rr.exhaustive},
                {"sampler", to_json(sampler.diagnostics())}};
    if (k == 0) report.warnings.push_back("L=" + std::to_string(L) + ": no decoupling observed, rule-of-three bound");
    report.points.push_back(std::move(pt));
  }
  bool decreasing = report.points.size() >= 2;
  for (std::size_t i = 1; i < report.points.size(); ++i)
    decreasing = decreasing && report.points[i].metric < report.points[i - 1].metric;
  std::vector<double> x, y;
  for (const auto& p : report.points) {
    if (p.metric <= 0.0) continue;
    x.push_back(config.eps * p.L);
    y.push_back(std::log(p.metric));
  }
  if (x.size() >= 4) report.fit = ols(x, y);
  report.pass = decreasing;
  report.verdict = decreasing ? "P(sigma <= t, sigma <= taubar) / (L t) decreases in L"
                              : "normalized decoupling estimate does not decrease in L";
  return report;
}

nlohmann::json to_json(const RadonNikodymConfig& c) {
  return {{"L", c.L},         {"beta", c.beta}, {"eps", c.eps}, {"alpha", c.alpha},
          {"catalog", model::catalog_to_json(c.catalog)}, {"R", c.R}};
}

spectral::FormReport radon_nikodym_bound(const RadonNikodymConfig& config) {
  const ModelParams p = ModelParams::half_box(config.L, config.beta, config.catalog, config.eps, config.alpha);
  p.validate();
  const ModelParams pbar = p.with_kind(model::MeasureKind::auxiliary);
  const int b = p.region_b_bound();
  const auto box_b = model::StateSpace::height_box(config.L, b);
  if (box_b.size() == 0) throw PreconditionError("alpha: B is empty");
  const auto z_bar = model::partition_function(pbar, config.R);

  std::vector<double> lw, lw_bar;
  for (std::size_t k = 0; k < box_b.size(); ++k) {
    const auto cfg = box_b.configuration(k);
    lw.push_back(model::log_weight(cfg, p));
    lw_bar.push_back(model::log_weight(cfg, pbar));
  }
  const double log_zb = log_sum_exp(lw);
  const double log_mubar_b = log_sum_exp(lw_bar) - z_bar.log_value;
  double d_lo = std::numeric_limits<double>::infinity(), d_hi = -d_lo, d_abs = 0.0;
  double log_sup = -std::numeric_limits<double>::infinity();
  std::size_t argmax = 0;
  for (std::size_t k = 0; k < lw.size(); ++k) {
    // D = W^inf - W^{L/2}
    const double d = lw[k] - lw_bar[k];
    d_lo = std::min(d_lo, d);
    d_hi = std::max(d_hi, d);
    d_abs = std::max(d_abs, std::abs(d));
    const double log_ratio = (lw[k] - log_zb) - (lw_bar[k] - z_bar.log_value);
    if (log_ratio > log_sup) {
      log_sup = log_ratio;
      argmax = k;
    }
  }
  const double w_hat = d_hi - d_lo;
  const double log_bound = w_hat - log_mubar_b;
  spectral::FormReport r;
  r.name = "radon_nikodym_bound";
  r.L = config.L;
  r.M = p.height_bound();
  r.beta = config.beta;
  r.R = config.R;
  r.space_size = box_b.size();
  r.value = std::exp(log_sup);
  r.pass = log_sup <= log_bound + 1e-12;
  const auto a_box = std::pow(2.0 * p.region_a_bound() + 1.0, config.L);
  r.details = {{"sup_ratio", std::exp(log_sup)},
               {"argmax", box_b.configuration(argmax).heights()},
               {"bound", std::exp(log_bound)},
               {"slack", log_bound - log_sup},
               {"w_hat", w_hat},
               {"sup_abs_w_difference", d_abs},
               {"mubar_B", std::exp(log_mubar_b)},
               {"K1_over_alpha", std::exp(log_bound) / config.alpha},
               {"A_size", a_box},
               {"B_size", box_b.size()},
               {"partition_converged", z_bar.converged}};
  return r;
}

}  // namespace sos::experiments
