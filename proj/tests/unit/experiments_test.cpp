#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "sos/core/error.hpp"
#include "sos/core/numeric.hpp"
#include "sos/experiments/harness.hpp"
#include "sos/experiments/pool.hpp"
#include "sos/experiments/report.hpp"
#include "sos/experiments/sampler.hpp"
#include "sos/experiments/stats.hpp"
#include "sos/model/energy.hpp"
#include "sos/model/state_space.hpp"

using namespace sos;
using namespace sos::experiments;
using namespace sos::model;

TEST_CASE("median and order statistics") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median({}), PreconditionError);
}

TEST_CASE("kolmogorov distribution") {
  // classical critical values
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_q(1.6276) == doctest::Approx(0.01).epsilon(2e-3));
  CHECK(kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("ks tests") {
  // hand computed: sample {0.1, 0.4, 0.7} against U(0,1): D = max(1/3-0.1, 2/3-0.4, 1-0.7, 0.1, 0.4-1/3, 0.7-2/3) = 0.3
  const auto r = ks_one_sample({0.7, 0.1, 0.4}, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(r.statistic == doctest::Approx(0.3));

  std::mt19937_64 rng(4);
  std::exponential_distribution<double> ex(2.0);
  std::vector<double> a, b, c;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(ex(rng));
    b.push_back(ex(rng));
    c.push_back(1.3 * ex(rng));
  }
  CHECK(ks_one_sample(a, [](double x) { return 1.0 - std::exp(-2.0 * x); }).p_value > 0.01);
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  // two-sample statistic on disjoint samples is 1
  CHECK(ks_two_sample({1, 2, 3}, {4, 5}).statistic == doctest::Approx(1.0));
}

TEST_CASE("least squares and intervals") {
  const auto f = ols({1, 2, 3, 4, 5}, {3, 5, 7, 9, 11});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0));

  // y = {1, 3, 2, 5}: slope 1.1, residual SS 2.7 -> se = sqrt(2.7/2/5); t(0.975, 2) = 4.302653
  const auto g = ols({1, 2, 3, 4}, {1, 3, 2, 5});
  CHECK(g.slope == doctest::Approx(1.1));
  CHECK(g.slope_se == doctest::Approx(std::sqrt(2.7 / 2.0 / 5.0)));
  CHECK(g.slope_hi - g.slope == doctest::Approx(4.302653 * g.slope_se).epsilon(1e-6));

  const auto w = wilson_interval(5, 10);
  CHECK(w.lo == doctest::Approx(0.2366).epsilon(1e-3));
  CHECK(w.hi == doctest::Approx(0.7634).epsilon(1e-3));
  CHECK(rule_of_three(300).hi == doctest::Approx(0.01));
}

TEST_CASE("worker pool keeps index order") {
  setenv("SOS_WORKERS", "4", 1);
  CHECK(worker_count() == 4);
  const auto out = parallel_map(1000, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
  CHECK_THROWS_AS(parallel_map(10, [](std::size_t i) -> int {
                    if (i == 7) throw PreconditionError("boom");
                    return 0;
                  }),
                  PreconditionError);
  unsetenv("SOS_WORKERS");
}

namespace {

// exact law of a statistic of phi under mu(. | ||phi|| <= b) by enumeration
std::map<long long, double> exact_law(const ModelParams& p, int b, long long (*stat)(const Configuration&)) {
  const auto sp = StateSpace::height_box(p.L, b);
  std::vector<double> lw;
  for (std::size_t k = 0; k < sp.size(); ++k) lw.push_back(log_weight(sp.configuration(k), p));
  const double z = log_sum_exp(lw);
  std::map<long long, double> law;
  for (std::size_t k = 0; k < sp.size(); ++k) law[stat(sp.configuration(k))] += std::exp(lw[k] - z);
  return law;
}

long long first_height(const Configuration& c) { return c[0]; }
long long energy_stat(const Configuration& c) { return hamiltonian(c); }

void check_sampler(const ConditionedSampler& s, const ModelParams& p, int b, long long (*stat)(const Configuration&),
                   int draws) {
  const auto law = exact_law(p, b, stat);
  std::map<long long, double> seen;
  for (int r = 0; r < draws; ++r) {
    const auto cfg = s.draw({99, std::uint64_t(r)});
    CHECK(cfg.within(b));
    seen[stat(cfg)] += 1.0 / draws;
  }
  for (const auto& [v, prob] : law) {
    const double se = std::sqrt(prob * (1.0 - prob) / draws);
    CHECK(std::abs(seen[v] - prob) <= 4.5 * se + 1e-12);
  }
}

}  // namespace

TEST_CASE("conditioned sampler matches the enumerated law") {
  {
    const auto p = ModelParams::half_box(5, 1.0, PotentialCatalog::zero());
    const ConditionedSampler s(p, 2);
    CHECK(s.diagnostics().method == SamplerMethod::transfer_matrix);
    check_sampler(s, p, 2, first_height, 20000);
    check_sampler(s, p, 2, energy_stat, 20000);
  }
  {
    const auto p = ModelParams::half_box(4, 1.0, catalogs::small(3.0));
    const ConditionedSampler s(p, 1);
    CHECK(s.diagnostics().method == SamplerMethod::enumeration);
    CHECK(s.diagnostics().support == 81);
    check_sampler(s, p, 1, energy_stat, 20000);
  }
  {
    const auto p = ModelParams::half_box(7, 1.0, catalogs::small(3.0));
    const ConditionedSampler s(p, 1, 5);
    CHECK(s.diagnostics().method == SamplerMethod::metropolis);
    CHECK(s.diagnostics().converged);
    CHECK(s.diagnostics().r_hat < 1.05);
    check_sampler(s, p, 1, energy_stat, 4000);
  }
  CHECK_THROWS_AS(ConditionedSampler(ModelParams::half_box(4, 1.0, PotentialCatalog::zero()), 3), PreconditionError);
}

TEST_CASE("report files") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  const auto dir = std::filesystem::temp_directory_path() / "sos_report_test";
  std::filesystem::remove_all(dir);
  const nlohmann::json cfg = {{"L", 3}, {"seed", 7}};
  CsvTable t{{"x", "y"}, {{1, "a,b"}, {2, 0.5}}};
  const auto paths = write_report(dir, "demo", cfg, {{"ok", true}}, t);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].filename().string() == report_stem("demo", cfg) + ".json");
  std::ifstream csv(paths[1]);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "# config: " + cfg.dump());
  std::getline(csv, line);
  CHECK(line == "x,y");
  std::getline(csv, line);
  CHECK(line == "1,\"a,b\"");
  std::ifstream js(paths[0]);
  const auto doc = nlohmann::json::parse(js);
  CHECK(doc["config"] == cfg);
  CHECK(doc.begin().key() == "config");
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit time harness") {
  ExitScalingConfig c;
  c.Ls = {4, 5, 6, 7};
  c.beta = 1.0;
  c.eps = 0.3;
  c.replicas = 400;
  c.seed = 3;
  c.exact_max_L = 5;
  const auto r = exit_time_scaling(c);
  REQUIRE(r.points.size() == 4);
  REQUIRE(r.fit);
  for (const auto& p : r.points) {
    CHECK(p.censored == 0);
    CHECK(p.metric > 0.0);
    if (p.L <= 5) CHECK(p.extra["exact_agrees"].get<bool>());
  }
  const auto again = exit_time_scaling(c);
  for (std::size_t i = 0; i < r.points.size(); ++i) CHECK(again.points[i].metric == r.points[i].metric);

  // a horizon below every exit censors the grid
  c.Ls = {4};
  c.horizon = 1e-9;
  c.exact_max_L = 0;
  const auto cens = exit_time_scaling(c);
  CHECK(cens.points[0].excluded);
  CHECK_FALSE(cens.pass);
  CHECK_FALSE(cens.fit);

  // L = 3, M = 1: A is the whole box
  c.Ls = {3};
  c.horizon = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(exit_time_scaling(c), PreconditionError);
}

TEST_CASE("gap harness") {
  GapScalingConfig c;
  c.grid = {{1, 1}, {2, 1}, {2, 2}, {3, 1}};
  c.beta = 2.0;
  c.R = 3;
  const auto r = gap_scaling(c);
  REQUIRE(r.points.size() == 4);
  // L = 1: three states with unit rates
  CHECK(r.points[0].extra["lambda1"].get<double>() == doctest::Approx(1.0));
  CHECK(r.points[0].metric == doctest::Approx(1.0));
  CHECK(r.pass);
  CHECK(to_table(r).rows.size() == 4);
}

TEST_CASE("coupling harness with zero potential never decouples before exit") {
  CouplingFidelityConfig c;
  c.Ls = {4, 6};
  c.beta = 1.0;
  c.eps = 0.3;
  c.t = 30.0;
  c.replicas = 200;
  c.catalog = PotentialCatalog::zero();
  c.rate_ratio_samples = 100;
  const auto r = coupling_fidelity(c);
  for (const auto& p : r.points) {
    CHECK(p.extra["decoupled"].get<std::size_t>() == 0);
    CHECK(p.extra["upper_bound_only"].get<bool>());
    CHECK(p.extra["ci95_hi"].get<double>() == doctest::Approx(3.0 / 200));
  }
  CHECK_FALSE(r.pass);
}

TEST_CASE("radon-nikodym bound") {
  RadonNikodymConfig c;
  c.L = 4;
  c.beta = 2.0;
  c.alpha = 0.25;
  const auto zero = radon_nikodym_bound(c);
  CHECK(zero.pass);
  CHECK(zero.details["w_hat"].get<double>() == 0.0);
  CHECK(zero.details["bound"].get<double>() ==
        doctest::Approx(1.0 / zero.details["mubar_B"].get<double>()));

  c.catalog = catalogs::vertical_bars(1.0, 3);
  const auto r = radon_nikodym_bound(c);
  CHECK(r.pass);
  CHECK(r.details["w_hat"].get<double>() > 0.0);
  c.alpha = 0.5;
  const auto wider = radon_nikodym_bound(c);
  CHECK(wider.details["mubar_B"].get<double>() > r.details["mubar_B"].get<double>());
}
