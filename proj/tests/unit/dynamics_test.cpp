#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "sos/core/error.hpp"
#include "sos/core/numeric.hpp"
#include "sos/dynamics/coupling.hpp"
#include "sos/dynamics/rates.hpp"
#include "sos/dynamics/simulate.hpp"
#include "sos/model/catalog.hpp"
#include "sos/model/energy.hpp"
#include "sos/model/gibbs.hpp"
#include "sos/model/state_space.hpp"

using namespace sos;
using namespace sos::model;
using namespace sos::dynamics;

namespace {

ModelParams make(int L, int M, double beta, PotentialCatalog cat, MeasureKind kind = MeasureKind::constrained,
                 double eps = 0.1) {
  ModelParams p;
  p.L = L;
  p.M = M;
  p.beta = beta;
  p.catalog = std::move(cat);
  p.kind = kind;
  p.eps = eps;
  return p;
}

PotentialCatalog reflected(const PotentialCatalog& cat) {
  std::vector<PotentialShape> shapes;
  for (const auto& s : cat.shapes()) {
    std::vector<DualSite> sites;
    for (auto p : s.sites()) sites.push_back({p.x2, -p.y2});
    shapes.emplace_back(sites, s.weight(), s.name());
  }
  return PotentialCatalog(shapes, cat.decay_mass());
}

}  // namespace

TEST_CASE("jump rate examples") {
  const double beta = 1.7;
  const auto p = make(3, 2, beta, PotentialCatalog::zero());
  CHECK(jump_rate(Configuration({0, 0, 0}), {2, 1}, p) == doctest::Approx(std::exp(-beta)));
  CHECK(jump_rate(Configuration({0, 1, 0}), {2, -1}, p) == doctest::Approx(std::exp(beta)));
  CHECK(jump_rate(Configuration({0, 2, 0}), {2, 1}, p) == 0.0);
  CHECK(jump_rate(Configuration({0, 3, 0}), {2, -1}, p) == 0.0);  // out of a zero-mass state
}

TEST_CASE("rate bound") {
  CHECK(rate_bound(make(3, 1, 2.0, PotentialCatalog::zero())) == doctest::Approx(std::exp(2.0)));
  auto p0 = make(3, 1, 2.0, PotentialCatalog::zero());
  p0.beta = 0.0;
  CHECK(rate_bound(p0) == 1.0);

  for (const auto& cat : {catalogs::small(1.0), catalogs::vertical_bars(1.0, 4)}) {
    for (int L = 1; L <= 4; ++L) {
      for (int M = 1; M <= 2; ++M) {
        for (auto kind : {MeasureKind::constrained, MeasureKind::auxiliary}) {
          const auto p = make(L, M, 1.5, cat, kind);
          const double bound = rate_bound(p);
          const StateSpace space = StateSpace::for_params(p, 2);
          for (std::size_t i = 0; i < space.size(); ++i) {
            const auto c = space.configuration(i);
            for (int k = 1; k <= L; ++k)
              for (int d : {1, -1}) REQUIRE(jump_rate(c, {k, d}, p) <= bound);
          }
        }
      }
    }
  }
}

TEST_CASE("detailed balance on enumerated spaces") {
  for (const auto& cat : {PotentialCatalog::zero(), catalogs::small(2.0)}) {
    for (auto kind : {MeasureKind::constrained, MeasureKind::auxiliary}) {
      const auto p = make(3, 2, 2.0, cat, kind);
      const StateSpace space = StateSpace::for_params(p, 2);
      for (std::size_t i = 0; i < space.size(); ++i) {
        const auto c = space.configuration(i);
        const double lw = log_weight(c, p);
        for (int k = 1; k <= 3; ++k) {
          for (int d : {1, -1}) {
            Configuration m = c;
            m[k - 1] += d;
            const double fwd = jump_rate(c, {k, d}, p);
            const double back = jump_rate(m, {k, -d}, p);
            const double lm = log_weight(m, p);
            if (lw == kNegInf || lm == kNegInf) {
              REQUIRE(fwd == 0.0);
              REQUIRE(back == 0.0);
              continue;
            }
            REQUIRE(std::abs((lw + std::log(fwd)) - (lm + std::log(back))) < 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("incremental rates stay equal to recomputed rates") {
  for (const auto& cat : {PotentialCatalog::zero(), catalogs::small(1.0), catalogs::vertical_bars(1.0, 4)}) {
    for (auto kind : {MeasureKind::constrained, MeasureKind::auxiliary}) {
      const auto p = make(9, 4, 1.0, cat, kind);
      GillespieChain chain(Configuration::flat(9), p);
      CounterRng rng({5, 1});
      for (int s = 0; s < 400; ++s) {
        REQUIRE(chain.step(rng));
        const auto fresh = chain.fresh_rates();
        for (std::size_t i = 0; i < fresh.size(); ++i) REQUIRE(chain.rates()[i] == fresh[i]);
      }
    }
  }
}

TEST_CASE("simulate") {
  const auto p = make(2, 1, 1.0, PotentialCatalog::zero());
  SUBCASE("zero horizon") {
    const auto t = simulate(Configuration({1, 0}), 0.0, p, {3, 0});
    CHECK(t.events.empty());
    CHECK(t.final_state == Configuration({1, 0}));
  }
  SUBCASE("determinism") {
    const auto a = simulate(Configuration({0, 0}), 200.0, p, {7, 2});
    const auto b = simulate(Configuration({0, 0}), 200.0, p, {7, 2});
    const auto c = simulate(Configuration({0, 0}), 200.0, p, {7, 3});
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      REQUIRE(a.events[i].time == b.events[i].time);
      REQUIRE(a.events[i].move == b.events[i].move);
    }
    CHECK(a.events.size() != c.events.size());
    for (std::size_t i = 1; i < a.events.size(); ++i) REQUIRE(a.events[i].time > a.events[i - 1].time);
  }
  SUBCASE("occupation times match the Gibbs measure") {
    // Time-weighted occupation over batches; 3 standard errors of the batch means.
    const GibbsTable gibbs(p, 0);
    const int batches = 50;
    const double batch_len = 10000.0;
    std::vector<std::vector<double>> occ(batches, std::vector<double>(gibbs.size(), 0.0));
    GillespieChain chain(Configuration({0, 0}), p);
    CounterRng rng({11, 0});
    long long events = 0;
    for (int b = 0; b < batches; ++b) {
      double t = 0.0;
      while (t < batch_len) {
        const auto here = *gibbs.space().index_of(chain.state());
        const auto ev = chain.step(rng);
        const double dt = std::min(ev->first, batch_len - t);
        occ[b][here] += dt / batch_len;
        t += ev->first;
        ++events;
      }
    }
    CHECK(events > 1'000'000);
    for (std::size_t i = 0; i < gibbs.size(); ++i) {
      double m = 0.0, v = 0.0;
      for (int b = 0; b < batches; ++b) m += occ[b][i] / batches;
      for (int b = 0; b < batches; ++b) v += (occ[b][i] - m) * (occ[b][i] - m) / (batches - 1);
      const double se = std::sqrt(v / batches);
      CHECK(std::abs(m - gibbs.probability(i)) < 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("exit time") {
  const double beta = 1.0;
  auto p = make(2, 1, beta, PotentialCatalog::zero());
  REQUIRE(p.region_a_bound() == 0);
  CHECK_THROWS_AS(exit_time(Configuration({1, 0}), p, {1, 0}), PreconditionError);
  // From (0,0) every move exits A; total rate 4 exp(-beta/2).
  const double lambda = 4.0 * std::exp(-beta / 2.0);
  const int n = 20000;
  double s = 0.0;
  for (int r = 0; r < n; ++r) {
    const auto e = exit_time(Configuration({0, 0}), p, {42, std::uint64_t(r)});
    REQUIRE(e.jumps == 1);
    s += e.time;
  }
  const double mean = s / n;
  CHECK(std::abs(mean - 1.0 / lambda) < 3.0 * (1.0 / lambda) / std::sqrt(double(n)));

  const auto cens = exit_time(Configuration({0, 0}), p, {1, 1}, 1e-9);
  CHECK(cens.censored);
}

TEST_CASE("coupling") {
  SUBCASE("identical rates never decouple") {
    auto p = make(6, 3, 3.0, PotentialCatalog::zero());
    CouplingOptions opt;
    opt.need_tau = opt.need_tau_bar = false;
    const auto tr = couple(Configuration::flat(6), 20.0, p, {9, 0}, opt);
    CHECK_FALSE(tr.sigma.has_value());
    CHECK(tr.phi == tr.phibar);
  }
  SUBCASE("profiles agree before sigma, and replay is deterministic") {
    auto p = make(4, 2, 1.0, catalogs::vertical_bars(2.5, 4), MeasureKind::constrained, 0.1);
    int decoupled = 0;
    for (std::uint64_t r = 0; r < 50; ++r) {
      CouplingOptions opt;
      const auto tr = couple(Configuration::flat(4), 20.0, p, {1, r}, opt);
      const auto again = couple(Configuration::flat(4), 20.0, p, {1, r}, opt);
      REQUIRE(tr.events.size() == again.events.size());
      Configuration a = Configuration::flat(4), b = a;
      for (const auto& e : tr.events) {
        if (!tr.sigma || e.time < *tr.sigma) REQUIRE(a == b);
        if (!tr.sigma || e.time < *tr.sigma) REQUIRE(e.mover == Mover::both);
        if (e.mover != Mover::phibar) a[e.move.site - 1] += e.move.direction;
        if (e.mover != Mover::phi) b[e.move.site - 1] += e.move.direction;
      }
      REQUIRE(a == tr.phi);
      REQUIRE(b == tr.phibar);
      decoupled += tr.sigma.has_value();
    }
    CHECK(decoupled > 0);
  }
}

TEST_CASE("rate ratio deviation") {
  SUBCASE("zero potential away from the box edge") {
    const auto r = rate_ratio_deviation(ModelParams::half_box(6, 2.0, PotentialCatalog::zero()), 0);
    CHECK(r.exhaustive);
    CHECK(r.deviation == 0.0);
    CHECK(r.edge_moves == 0);
  }
  SUBCASE("reflection symmetry") {
    const auto cat = catalogs::small(1.0);
    const auto a = rate_ratio_deviation(ModelParams::half_box(5, 2.0, cat, 0.3), 0);
    const auto b = rate_ratio_deviation(ModelParams::half_box(5, 2.0, reflected(cat), 0.3), 0);
    CHECK(a.deviation > 0.0);
    CHECK(a.deviation == doctest::Approx(b.deviation).epsilon(1e-12));
  }
  SUBCASE("shrinks as L doubles") {
    const auto cat = catalogs::vertical_bars(2.0, 6);
    const auto small = rate_ratio_deviation(ModelParams::half_box(6, 2.0, cat, 0.4), 2000);
    const auto large = rate_ratio_deviation(ModelParams::half_box(12, 2.0, cat, 0.4), 2000);
    CHECK(small.exhaustive);
    CHECK_FALSE(large.exhaustive);
    CHECK(small.deviation > 0.0);
    CHECK(large.deviation < small.deviation);
  }
}
