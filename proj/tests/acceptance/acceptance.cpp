// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sos/core/numeric.hpp"
#include "sos/dynamics/coupling.hpp"
#include "sos/dynamics/simulate.hpp"
#include "sos/experiments/harness.hpp"
#include "sos/experiments/pool.hpp"
#include "sos/experiments/stats.hpp"
#include "sos/model/catalog.hpp"
#include "sos/model/energy.hpp"
#include "sos/model/gibbs.hpp"
#include "sos/spectral/generator.hpp"
#include "sos/spectral/gradient.hpp"
#include "sos/spectral/killed.hpp"

using namespace sos;
using model::MeasureKind;
using model::ModelParams;
using model::PotentialCatalog;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

ModelParams params(const PotentialCatalog& cat, double beta, int L, int M, MeasureKind kind, double eps = 0.1) {
  ModelParams p;
  p.L = L;
  p.M = M;
  p.beta = beta;
  p.catalog = cat;
  p.kind = kind;
  p.eps = eps;
  return p;
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

std::vector<std::pair<std::string, PotentialCatalog>> both_catalogs() {
  return {{"zero", PotentialCatalog::zero()}, {"small", model::catalogs::small(3.0)}};
}

Outcome detailed_balance() {
  double worst = 0.0;
  long long pairs = 0;
  for (const auto& [name, cat] : both_catalogs())
    for (auto kind : {MeasureKind::constrained, MeasureKind::auxiliary})
      for (int L = 1; L <= 4; ++L)
        for (int M = 1; M <= 2; ++M) {
          const auto rev = spectral::check_reversibility(spectral::build_generator(params(cat, 2.0, L, M, kind), 3));
          worst = std::max(worst, rev.max_log_violation);
          pairs += rev.pairs;
        }
  return {worst < 1e-12, "max |log(pi_i G_ij) - log(pi_j G_ji)| = " + num(worst) + " over " +
                             std::to_string(pairs) + " pairs"};
}

Outcome pushforward() {
  double worst = 0.0;
  for (const auto& [name, cat] : both_catalogs()) {
    const model::GibbsTable table(params(cat, 2.0, 3, 2, MeasureKind::auxiliary), 4);
    std::vector<double> lw(table.size());
    for (std::size_t i = 0; i < table.size(); ++i)
      lw[i] = model::gradient_log_weight(table.space().gradient(i), table.params());
    const double lz = log_sum_exp(lw);
    double tv = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) tv += std::abs(std::exp(lw[i] - lz) - table.probability(i));
    worst = std::max(worst, 0.5 * tv);
  }
  return {worst < 1e-12, "TV = " + num(worst)};
}

Outcome identities() {
  double var_res = 0.0, der_res = 0.0;
  int functions = 0;
  for (const auto& [name, cat] : both_catalogs())
    for (int M = 1; M <= 2; ++M) {
      const spectral::GradientSpace gs(params(cat, 2.0, 3, M, MeasureKind::auxiliary), 2);
      for (const auto& f : spectral::test_functions(gs, 100, 17)) {
        ++functions;
        var_res = std::max(var_res, spectral::variance_decomposition(gs, f).residual);
        for (int i = 1; i <= 3; ++i) der_res = std::max(der_res, spectral::derivative_identity(gs, f, i));
      }
    }
  return {var_res < 1e-10 && der_res < 1e-10, "martingale residual " + num(var_res) + ", derivative residual " +
                                                   num(der_res) + " over " + std::to_string(functions) +
                                                   " functions"};
}

Outcome ratio_bounds() {
  const auto cat = model::catalogs::small(3.0);
  const auto decay = model::validate_catalog(cat);
  bool pass = decay.pass;
  double worst = 0.0;
  long long checks = 0;
  for (int M = 1; M <= 2; ++M) {
    const spectral::GradientSpace gs(params(cat, 4.0, 4, M, MeasureKind::auxiliary), 3);
    const auto r = spectral::ratio_bounds(gs);
    pass = pass && r.pass;
    worst = std::max(worst, r.value);
    checks += r.details.value("checks", 0LL);
  }
  return {pass, std::string("catalog decay ") + (decay.pass ? "ok" : "FAILS") + ", worst deviation/bound " +
                    num(worst) + " over " + std::to_string(checks) + " ratios"};
}

Outcome gap_scaling() {
  experiments::GapScalingConfig c;
  c.grid = experiments::default_gap_grid();
  const auto r = experiments::gap_scaling(c);
  return {r.pass, r.verdict + (r.warnings.empty() ? "" : " (" + std::to_string(r.warnings.size()) + " warnings)")};
}

Outcome exact_exit_law() {
  const auto p = params(PotentialCatalog::zero(), 2.0, 3, 2, MeasureKind::constrained);
  const auto start = model::Configuration::flat(3);
  const std::size_t n = 10000;
  const auto samples = experiments::parallel_map(n, [&](std::size_t r) {
    return dynamics::exit_time(start, p, {2024, r}).time;
  });
  const auto gen = spectral::build_generator(p, 0);
  const auto killed = spectral::killed_operator(gen, p.eps);
  const auto local = killed.local_index(*gen.space()->index_of(start));
  Eigen::VectorXd s0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(killed.dimension()));
  s0[static_cast<Eigen::Index>(local)] = 1.0;
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const auto curve = spectral::survival_curve(killed, s0, sorted);
  const auto ks = experiments::ks_one_sample(samples, [&](double x) {
    const auto k = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
    return 1.0 - curve.survival[k];
  });
  return {ks.p_value >= 0.01, "KS D = " + num(ks.statistic) + ", p = " + num(ks.p_value) + " (" + curve.method + ")"};
}

Outcome exit_scaling() {
  experiments::ExitScalingConfig c;
  const auto r = experiments::exit_time_scaling(c);
  std::string medians;
  for (const auto& pt : r.points) medians += " L" + std::to_string(pt.L) + ":" + num(pt.metric);
  return {r.pass, r.verdict + ";" + medians};
}

Outcome coupling() {
  // Marginal: exit time of the phi component of the coupling against plain simulation.
  const auto cat = model::catalogs::vertical_bars(1.0, 6);
  const auto p = params(cat, 2.0, 4, 2, MeasureKind::constrained);
  const auto start = model::Configuration::flat(4);
  const std::size_t n = 10000;
  dynamics::CouplingOptions opt;
  opt.record_events = false;
  opt.need_sigma = false;
  opt.need_tau_bar = false;
  const double inf = std::numeric_limits<double>::infinity();
  const auto coupled = experiments::parallel_map(n, [&](std::size_t r) {
    return *dynamics::couple(start, inf, p, {77, r}, opt).tau;
  });
  const auto plain = experiments::parallel_map(n, [&](std::size_t r) {
    return dynamics::exit_time(start, p, {78, r}).time;
  });
  const auto ks = experiments::ks_two_sample(coupled, plain);

  experiments::CouplingFidelityConfig c;
  const auto fid = experiments::coupling_fidelity(c);
  std::string est;
  for (const auto& pt : fid.points) est += " L" + std::to_string(pt.L) + ":" + num(pt.metric);
  return {ks.p_value >= 0.01 && fid.pass,
          "marginal KS p = " + num(ks.p_value) + "; decoupling/(L t)" + est + (fid.pass ? " decreasing" : " not decreasing")};
}

Outcome radon_nikodym() {
  bool pass = true;
  std::string detail;
  for (const auto& cat : {model::catalogs::small(3.0), model::catalogs::vertical_bars(1.0, 6)}) {
    experiments::RadonNikodymConfig c;
    c.catalog = cat;
    const auto r = experiments::radon_nikodym_bound(c);
    pass = pass && r.pass;
    detail += (detail.empty() ? "" : "; ") + std::string("sup ratio ") + num(r.details["sup_ratio"].get<double>()) +
              " <= bound " + num(r.details["bound"].get<double>());
  }
  return {pass, detail};
}

Outcome truncation() {
  double worst_gap = 0.0, worst_c = 0.0;
  for (const auto& [name, cat] : both_catalogs())
    for (int M = 1; M <= 2; ++M) {
      const auto p = params(cat, 2.0, 3, M, MeasureKind::auxiliary);
      const double g4 = spectral::spectral_gap(spectral::build_generator(p, 4)).value;
      const double g6 = spectral::spectral_gap(spectral::build_generator(p, 6)).value;
      const double c4 = spectral::poincare_constant(spectral::GradientSpace(p, 4)).value;
      const double c6 = spectral::poincare_constant(spectral::GradientSpace(p, 6)).value;
      worst_gap = std::max(worst_gap, std::abs(g6 - g4) / g6);
      worst_c = std::max(worst_c, std::abs(c6 - c4) / c6);
    }
  return {worst_gap < 0.01 && worst_c < 0.01,
          "relative change R 4->6: gap " + num(worst_gap) + ", Poincare constant " + num(worst_c)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"detailed balance", detailed_balance},
      {"gradient pushforward", pushforward},
      {"martingale and derivative identities", identities},
      {"conditional ratio bounds", ratio_bounds},
      {"gap scaling band", gap_scaling},
      {"exact vs Monte Carlo exit law", exact_exit_law},
      {"exit time scaling", exit_scaling},
      {"coupling soundness", coupling},
      {"Radon-Nikodym bound", radon_nikodym},
      {"truncation convergence", truncation},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %2d %s: %s  [%s, %.1fs]\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
