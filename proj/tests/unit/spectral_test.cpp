#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "sos/core/error.hpp"
#include "sos/dynamics/rates.hpp"
#include "sos/dynamics/simulate.hpp"
#include "sos/model/catalog.hpp"
#include "sos/model/energy.hpp"
#include "sos/model/state_space.hpp"
#include "sos/spectral/eigen.hpp"
#include "sos/spectral/form.hpp"
#include "sos/spectral/generator.hpp"
#include "sos/spectral/gradient.hpp"
#include "sos/spectral/killed.hpp"

using namespace sos;
using namespace sos::model;
using namespace sos::spectral;

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

// Dense generator assembled directly from jump_rate over the enumerated space.
Eigen::MatrixXd dense_oracle(const ModelParams& p, const StateSpace& sp) {
  const auto n = static_cast<Eigen::Index>(sp.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const auto cfg = sp.configuration(i);
    for (int k = 1; k <= p.L; ++k) {
      for (int d : {-1, 1}) {
        auto next = cfg;
        next[static_cast<std::size_t>(k - 1)] += d;
        const auto j = sp.index_of(next);
        if (!j) continue;
        const double r = dynamics::jump_rate(cfg, {k, d}, p);
        Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j)) += r;
        Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= r;
      }
    }
  }
  return Q;
}

// Smallest nonzero |Re| eigenvalue of -Q via the general (non-symmetric) solver.
double general_gap(const Eigen::MatrixXd& Q) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(-Q);
  std::vector<double> ev;
  for (Eigen::Index k = 0; k < Q.rows(); ++k) ev.push_back(es.eigenvalues()[k].real());
  std::sort(ev.begin(), ev.end());
  return ev[1];
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = normal(rng);
  return v;
}

}  // namespace

TEST_CASE("form gap on small graphs") {
  // path 0-1-2 with unit rates: -G has eigenvalues 0, 1, 3
  const Eigen::VectorXd pi = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  const SymmetricForm path(pi, {{0, 1, 1.0 / 3.0}, {1, 2, 1.0 / 3.0}});
  const auto g = form_gap(path);
  CHECK(g.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.random_rayleigh_min >= g.value - 1e-12);
  CHECK(g.residual < 1e-9);

  // two disconnected edges: gap 0
  const Eigen::VectorXd pi4 = Eigen::VectorXd::Constant(4, 0.25);
  const SymmetricForm split(pi4, {{0, 1, 0.25}, {2, 3, 0.25}});
  CHECK(std::abs(form_gap(split).value) < 1e-12);

  const SymmetricForm single(Eigen::VectorXd::Constant(1, 1.0), {});
  CHECK(std::isinf(form_gap(single).value));
}

TEST_CASE("lanczos agrees with the dense solver") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  // random weighted cycle with chords, non-uniform measure
  const std::size_t n = 300;
  Eigen::VectorXd pi(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < pi.size(); ++k) pi[k] = u(rng);
  pi /= pi.sum();
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < n; ++k) {
    edges.push_back({k, (k + 1) % n, u(rng) * 1e-3});
    if (k % 7 == 0) edges.push_back({k, (k * 13 + 5) % n, u(rng) * 1e-3});
  }
  const SymmetricForm form(pi, edges);
  const SparseMatrix S = form.symmetric_matrix();
  const auto dense = lowest_eigenpair(S, form.ground());
  const auto lanczos = lowest_eigenpair(S, form.ground(), 1e-10, 0);
  CHECK(dense.dense);
  CHECK_FALSE(lanczos.dense);
  CHECK(lanczos.value == doctest::Approx(dense.value).epsilon(1e-8));
  CHECK(lanczos.residual < 1e-7);
  CHECK(std::abs(lanczos.vector.dot(form.ground())) < 1e-8);
}

TEST_CASE("krylov exponential action") {
  std::mt19937_64 rng(9);
  const Eigen::Index n = 120;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double w = 0.5 + 0.01 * double(k % 17);
    A(k, k) += w;
    A(k + 1, k + 1) += w;
    A(k, k + 1) -= w;
    A(k + 1, k) -= w;
  }
  A.diagonal().array() += 0.05;
  const SparseMatrix S = A.sparseView();
  const Eigen::VectorXd b = random_vector(n, rng);
  const std::vector<double> times{0.0, 0.5, 3.0, 20.0};
  const auto kr = krylov_expm_action(S, b, times, 1e-11);
  for (std::size_t t = 0; t < times.size(); ++t) {
    const Eigen::MatrixXd E = (-times[t] * A).exp();
    CHECK((kr.values[t] - E * b).norm() < 1e-8 * std::max(1.0, b.norm()));
  }
}

TEST_CASE("model generator matches a dense oracle") {
  for (auto cat : {PotentialCatalog::zero(), catalogs::small(3.0)}) {
    const auto p = make(3, 1, 1.3, cat);
    const auto gen = build_generator(p, 0);
    const auto& sp = *gen.space();
    const Eigen::MatrixXd Q = dense_oracle(p, sp);
    CHECK((gen.dense() - Q).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd rows = gen.dense().rowwise().sum();
    CHECK(rows.cwiseAbs().maxCoeff() < 1e-12);

    const auto rev = check_reversibility(gen);
    CHECK(rev.reversible);
    CHECK(rev.pairs > 0);

    // pi Q = 0
    CHECK((gen.stationary().transpose() * Q).cwiseAbs().maxCoeff() < 1e-12);

    const auto g = spectral_gap(gen);
    CHECK(g.value == doctest::Approx(general_gap(Q)).epsilon(1e-9));
  }
}

TEST_CASE("spectral gap is invariant under relabeling") {
  const auto p = make(4, 1, 0.9, catalogs::small(3.0));
  const auto gen = build_generator(p, 0);
  std::vector<std::size_t> perm(gen.dimension());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto moved = gen.relabeled(perm);
  CHECK(spectral_gap(moved).value == doctest::Approx(spectral_gap(gen).value).epsilon(1e-10));
  CHECK(moved.rate(perm[0], perm[1]) == gen.rate(0, 1));
}

TEST_CASE("non-reversible input is rejected") {
  // cyclic rates 0->1->2->0 with uniform law
  std::vector<Eigen::Triplet<double>> t{{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {1, 0, 0.5}, {2, 1, 0.5}, {0, 2, 0.5}};
  const GeneratorOperator gen(3, t, Eigen::VectorXd::Zero(3));
  CHECK_FALSE(check_reversibility(gen).reversible);
  CHECK_THROWS_AS(spectral_gap(gen), NotReversibleError);
}

TEST_CASE("killed operator basics") {
  const auto p = make(3, 1, 1.0, catalogs::small(3.0));
  const auto gen = build_generator(p, 0);
  const double lambda1 = spectral_gap(gen).value;

  // A = whole space: nothing is lost
  std::vector<std::size_t> all(gen.dimension());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  const KilledOperator whole(gen, all);
  CHECK(whole.escape_rates().cwiseAbs().maxCoeff() == 0.0);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(all.size()));
  start[0] = 1.0;
  const auto s_all = survival_curve(whole, start, {0.0, 1.0, 10.0});
  for (double s : s_all.survival) CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(whole.killed_gap() == doctest::Approx(lambda1).epsilon(1e-9));

  // single state: P(tau > t) = exp(-r t)
  const KilledOperator one(gen, {0});
  const double r = -gen.diagonal()[0];
  CHECK(one.escape_rates()[0] == doctest::Approx(r));
  const auto s_one = survival_curve(one, Eigen::VectorXd::Constant(1, 1.0), {0.0, 0.7, 2.0});
  CHECK(s_one.survival[1] == doctest::Approx(std::exp(-0.7 * r)).epsilon(1e-10));
  CHECK(s_one.survival[2] == doctest::Approx(std::exp(-2.0 * r)).epsilon(1e-10));
  CHECK(one.mean_exit_times()[0] == doctest::Approx(1.0 / r));
}

TEST_CASE("killed gap, survival and exit times") {
  const auto p = make(4, 2, 1.2, catalogs::small(3.0), MeasureKind::constrained, 0.5);
  const auto gen = build_generator(p, 0);
  const auto killed = killed_operator(gen, p.eps);
  REQUIRE(killed.dimension() < gen.dimension());
  const double lambda1 = spectral_gap(gen).value;
  CHECK(killed.killed_gap() >= lambda1 - 1e-10);

  // the decay rate is the smallest eigenvalue of the dense killed generator
  const Eigen::MatrixXd GA = killed.dense_generator();
  Eigen::EigenSolver<Eigen::MatrixXd> es(-GA);
  double lo = 1e300;
  for (Eigen::Index k = 0; k < GA.rows(); ++k) lo = std::min(lo, es.eigenvalues()[k].real());
  CHECK(killed.bottom_eigenvalue() == doctest::Approx(lo).epsilon(1e-9));

  // exit times: dense solve of -G_A u = 1
  const Eigen::VectorXd u = (-GA).partialPivLu().solve(Eigen::VectorXd::Ones(GA.rows()));
  CHECK((killed.mean_exit_times() - u).cwiseAbs().maxCoeff() < 1e-8 * u.maxCoeff());

  const auto& sp = *gen.space();
  const auto flat = sp.index_of(Configuration(std::vector<int>(4, 0)));
  REQUIRE(flat);
  const auto local = killed.local_index(*flat);
  REQUIRE(local != KilledOperator::npos);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(killed.dimension()));
  start[static_cast<Eigen::Index>(local)] = 1.0;
  std::vector<double> times;
  for (int k = 0; k <= 40; ++k) times.push_back(0.25 * k * u.maxCoeff());
  const auto curve = survival_curve(killed, start, times);
  CHECK(curve.survival[0] == doctest::Approx(1.0));
  for (std::size_t k = 1; k < times.size(); ++k) {
    CHECK(curve.survival[k] <= curve.survival[k - 1] + 1e-12);
    CHECK(curve.survival[k] <= curve.norm_factor * std::exp(-curve.decay_rate * times[k]) + 1e-12);
  }
  CHECK(curve.cross_check < 1e-9);
  // survival matches exp(t G_A) directly
  const Eigen::VectorXd direct = (times[7] * GA).exp().row(static_cast<Eigen::Index>(local)).transpose();
  CHECK(curve.survival[7] == doctest::Approx(direct.sum()).epsilon(1e-9));

  // Monte Carlo exit times from the flat profile
  const int reps = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto e = dynamics::exit_time(Configuration(std::vector<int>(4, 0)), p, {77, std::uint64_t(r)});
    sum += e.time;
    sum2 += e.time * e.time;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
  CHECK(std::abs(mean - killed.mean_exit_times()[static_cast<Eigen::Index>(local)]) < 4.0 * se);
}

TEST_CASE("gradient space: conditional structure") {
  const auto p = make(4, 1, 1.1, catalogs::small(3.0), MeasureKind::auxiliary);
  const GradientSpace gs(p, 2);
  const auto& pi = gs.measure();
  CHECK(pi.sum() == doctest::Approx(1.0));
  // measure agrees with the normalised gradient weight
  double z = 0.0;
  for (std::size_t k = 0; k < gs.size(); ++k) z += std::exp(gradient_log_weight(gs.space().gradient(k), p));
  for (std::size_t k = 0; k < gs.size(); k += 17)
    CHECK(pi[static_cast<Eigen::Index>(k)] ==
          doctest::Approx(std::exp(gradient_log_weight(gs.space().gradient(k), p)) / z).epsilon(1e-12));

  // product of the F_j is the measure
  Eigen::VectorXd prod = Eigen::VectorXd::Ones(pi.size());
  for (int j = 1; j <= 4; ++j) prod = prod.cwiseProduct(gs.F(j));
  CHECK((prod - pi).cwiseAbs().maxCoeff() < 1e-14);

  const auto tests = test_functions(gs, 6, 11);
  for (const auto& f : tests) {
    // tower property and the brute-force conditional expectation
    for (int j = 1; j <= 5; ++j) {
      const auto fj = gs.conditional_expectation(f, j);
      CHECK(pi.dot(fj) == doctest::Approx(pi.dot(f)).epsilon(1e-12));
    }
    const auto f3 = gs.conditional_expectation(f, 3);
    const std::size_t probe = gs.size() / 3;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < gs.size(); ++k) {
      if (gs.eta(k, 3) == gs.eta(probe, 3) && gs.eta(k, 4) == gs.eta(probe, 4)) {
        num += pi[static_cast<Eigen::Index>(k)] * f[static_cast<Eigen::Index>(k)];
        den += pi[static_cast<Eigen::Index>(k)];
      }
    }
    CHECK(f3[static_cast<Eigen::Index>(probe)] == doctest::Approx(num / den).epsilon(1e-12));

    const auto vd = variance_decomposition(gs, f);
    CHECK(vd.summands.size() == 4);
    for (double s : vd.summands) CHECK(s >= -1e-14);
    CHECK(vd.residual < 1e-12 * std::max(1.0, vd.variance));

    for (int i = 1; i <= 4; ++i) CHECK(derivative_identity(gs, f, i) < 1e-11 * std::max(1.0, f.cwiseAbs().maxCoeff()));
  }

  const auto dom = form_domination(gs, tests);
  CHECK(dom.pass);
  CHECK(dom.value <= 4.0);

  CHECK_THROWS_AS(GradientSpace(make(3, 1, 1.0, PotentialCatalog::zero()), 1), PreconditionError);
}

TEST_CASE("gradient form against brute force") {
  const auto p = make(3, 1, 0.8, catalogs::small(3.0), MeasureKind::auxiliary);
  const int R = 2;
  auto fn = [](const GradientConfiguration& g) { return double(g[0] * g[0] - 2 * g[1] + g[2] * g[0]); };
  const auto sp = StateSpace::gradient_box(3, 1, R);
  double z = 0.0;
  for (std::size_t k = 0; k < sp.size(); ++k) z += std::exp(gradient_log_weight(sp.gradient(k), p));
  double oracle = 0.0;
  for (std::size_t k = 0; k < sp.size(); ++k) {
    const auto g = sp.gradient(k);
    const double w = std::exp(gradient_log_weight(g, p)) / z;
    for (int site = 1; site <= 3; ++site) {
      auto h = g;
      h[static_cast<std::size_t>(site - 1)] += 1;
      if (site < 3) h[static_cast<std::size_t>(site)] -= 1;
      bool inside = std::abs(h[0]) <= 1;
      for (int i = 1; i < 3; ++i) inside = inside && std::abs(h[static_cast<std::size_t>(i)]) <= R;
      if (!inside) continue;
      const double d = fn(h) - fn(g);
      oracle += w * d * d;
    }
  }
  CHECK(gradient_form(p, R, fn) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("one-site gap against a dense birth-death oracle") {
  const auto p = make(4, 1, 0.7, catalogs::small(3.0), MeasureKind::auxiliary);
  const GradientSpace gs(p, 2);
  for (int j = 1; j <= 4; ++j) {
    std::vector<int> tail(static_cast<std::size_t>(4 - j), 1);
    const auto og = one_site_gap(gs, j, tail);
    const auto& law = og.conditional_law;
    const auto n = static_cast<Eigen::Index>(law.size());
    // generator: up-rate 1, down-rate law[x-1]/law[x]
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index x = 0; x + 1 < n; ++x) {
      Q(x, x + 1) = 1.0;
      Q(x + 1, x) = law[static_cast<std::size_t>(x)] / law[static_cast<std::size_t>(x + 1)];
    }
    for (Eigen::Index x = 0; x < n; ++x) Q(x, x) = -Q.row(x).sum();
    CHECK(og.gap == doctest::Approx(general_gap(Q)).epsilon(1e-9));
    CHECK(og.worst_ratio <= 1.0 + 1e-9);
  }
}

TEST_CASE("ratio bounds") {
  // zero potential: F_j are one-site marginals and the ratios are exact
  const auto p0 = make(4, 1, 1.5, PotentialCatalog::zero(2.0), MeasureKind::auxiliary);
  const GradientSpace g0(p0, 2);
  const auto r0 = ratio_bounds(g0);
  CHECK(r0.pass);
  CHECK(r0.details["worst_drift_deviation"].get<double>() < 1e-12);
  CHECK(r0.details["worst_tail_deviation"].get<double>() < 1e-12);

  const auto p = make(4, 1, 1.5, catalogs::small(3.0), MeasureKind::auxiliary);
  const auto r = ratio_bounds(GradientSpace(p, 2));
  CHECK(r.pass);
  CHECK(r.details["checks"].get<long long>() > 0);
}

TEST_CASE("gap equivalence and poincare constant") {
  const auto p = make(3, 1, 1.0, catalogs::small(3.0), MeasureKind::auxiliary);
  const auto eq = gap_equivalence(p, 2);
  CHECK(eq.pass);
  CHECK(eq.details["C1"].get<double>() <= eq.details["C2"].get<double>());

  const GradientSpace gs(p, 2);
  const auto pc = poincare_constant(gs);
  CHECK(pc.value == doctest::Approx(1.0 / eq.details["form_gap"].get<double>()).epsilon(1e-9));
  // any test function obeys Var <= C * form
  const auto form = gs.gradient_form();
  for (const auto& f : test_functions(gs, 8, 2)) {
    const double e = form.energy(f);
    if (e > 0.0) CHECK(form.variance(f) <= pc.value * e * (1.0 + 1e-9));
  }
  CHECK(pc.details["conditional_constant"].get<double>() > 0.0);
}
