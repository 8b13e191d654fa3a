#include "sos/spectral/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sos/core/error.hpp"
#include "sos/spectral/generator.hpp"

namespace sos::spectral {

using model::GradientConfiguration;
using model::MeasureKind;
using model::ModelParams;

nlohmann::json to_json(const FormReport& r) {
  return {{"name", r.name},   {"value", r.value}, {"L", r.L},
          {"M", r.M},         {"beta", r.beta},   {"R", r.R},
          {"space_size", r.space_size}, {"pass", r.pass}, {"details", r.details}};
}

namespace {

FormReport make_report(const GradientSpace& gs, std::string name) {
  FormReport r;
  r.name = std::move(name);
  r.L = gs.length();
  r.M = gs.params().height_bound();
  r.beta = gs.params().beta;
  r.R = gs.truncation();
  r.space_size = gs.size();
  return r;
}

ModelParams auxiliary(const ModelParams& p) {
  if (p.kind != MeasureKind::auxiliary) throw PreconditionError("kind: the gradient measure needs the auxiliary kind");
  return p;
}

}  // namespace

GradientSpace::GradientSpace(const ModelParams& params, int R, std::size_t cap) : table_(auxiliary(params), R, cap) {
  const auto n = static_cast<Eigen::Index>(table_.size());
  pi_ = Eigen::Map<const Eigen::VectorXd>(table_.probabilities().data(), n);
  const int L = params.L;
  const auto& sp = table_.space();
  block_mass_.resize(static_cast<std::size_t>(L) + 1);
  for (int c = 0; c <= L; ++c) {
    const std::size_t stride = c < L ? sp.stride(c) : sp.size();
    auto& mass = block_mass_[static_cast<std::size_t>(c)];
    mass.assign(sp.size() / stride, 0.0);
    for (std::size_t i = 0; i < sp.size(); ++i) mass[i / stride] += pi_[static_cast<Eigen::Index>(i)];
  }
  F_.resize(static_cast<std::size_t>(L));
  for (int j = 1; j <= L; ++j) {
    Eigen::VectorXd F(n);
    const std::size_t s_in = sp.stride(j - 1);
    const std::size_t s_out = j < L ? sp.stride(j) : sp.size();
    const auto& inner = block_mass_[static_cast<std::size_t>(j - 1)];
    const auto& outer = block_mass_[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < sp.size(); ++i) F[static_cast<Eigen::Index>(i)] = inner[i / s_in] / outer[i / s_out];
    F_[static_cast<std::size_t>(j - 1)] = std::move(F);
  }
}

Eigen::VectorXd GradientSpace::tabulate(const std::function<double(const GradientConfiguration&)>& f) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) v[static_cast<Eigen::Index>(i)] = f(space().gradient(i));
  return v;
}

Eigen::VectorXd GradientSpace::conditional_expectation(const Eigen::VectorXd& f, int j) const {
  const int L = length();
  if (j < 1 || j > L + 1) throw PreconditionError("conditioning level out of range");
  if (j == 1) return f;
  const std::size_t c = static_cast<std::size_t>(j - 1);
  const std::size_t stride = j - 1 < L ? space().stride(j - 1) : size();
  std::vector<double> acc(block_mass_[c].size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    acc[i / stride] += pi_[k] * f[k];
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) out[static_cast<Eigen::Index>(i)] = acc[i / stride] / block_mass_[c][i / stride];
  return out;
}

std::optional<std::size_t> GradientSpace::shift(std::size_t idx, int i) const {
  if (space().coord(idx, i - 1) >= space().hi(i - 1)) return std::nullopt;
  return idx + space().stride(i - 1);
}

Eigen::VectorXd GradientSpace::forward_difference(const Eigen::VectorXd& f, int i) const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(f.size());
  for (std::size_t k = 0; k < size(); ++k) {
    if (const auto up = shift(k, i)) {
      d[static_cast<Eigen::Index>(k)] = f[static_cast<Eigen::Index>(*up)] - f[static_cast<Eigen::Index>(k)];
    }
  }
  return d;
}

Eigen::VectorXd GradientSpace::step_allowed(int i) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (std::size_t k = 0; k < size(); ++k)
    if (shift(k, i)) a[static_cast<Eigen::Index>(k)] = 1.0;
  return a;
}

SymmetricForm GradientSpace::gradient_form() const {
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < size(); ++k) {
    for (int site = 1; site <= length(); ++site) {
      // phi_site + 1 is eta_site + 1 and, below L, eta_{site+1} - 1
      if (const auto to = space().neighbor(k, site, +1)) edges.push_back({k, *to, pi_[static_cast<Eigen::Index>(k)]});
    }
  }
  return SymmetricForm(pi_, std::move(edges));
}

SymmetricForm GradientSpace::coordinate_form() const {
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < size(); ++k)
    for (int i = 1; i <= length(); ++i)
      if (const auto to = shift(k, i)) edges.push_back({k, *to, pi_[static_cast<Eigen::Index>(k)]});
  return SymmetricForm(pi_, std::move(edges));
}

double gradient_form(const GradientSpace& gs, const Eigen::VectorXd& f) { return gs.gradient_form().energy(f); }

double gradient_form(const ModelParams& params, int R, const std::function<double(const GradientConfiguration&)>& f) {
  const GradientSpace gs(params, R);
  return gradient_form(gs, gs.tabulate(f));
}

FormReport gap_equivalence(const ModelParams& params, int R, std::size_t cap) {
  const GradientSpace gs(params, R, cap);
  const GeneratorOperator gen = build_generator(gs.params(), R, cap);
  const GapResult g_gen = spectral_gap(gen);
  const GapResult g_form = form_gap(gs.gradient_form());
  double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
  for (std::size_t k = 0; k < gs.size(); ++k) {
    for (int site = 1; site <= gs.length(); ++site) {
      if (const auto to = gs.space().neighbor(k, site, +1)) {
        const double c = gen.rate(k, *to);
        c1 = std::min(c1, c);
        c2 = std::max(c2, c);
      }
    }
  }
  FormReport r = make_report(gs, "gap_equivalence");
  r.value = g_gen.value / g_form.value;
  const double slack = 1e-9;
  r.pass = r.value >= c1 * (1.0 - slack) && r.value <= c2 * (1.0 + slack);
  r.details = {{"generator_gap", g_gen.value}, {"form_gap", g_form.value}, {"C1", c1}, {"C2", c2},
               {"generator_residual", g_gen.residual}, {"form_residual", g_form.residual}};
  return r;
}

VarianceDecomposition variance_decomposition(const GradientSpace& gs, const Eigen::VectorXd& f) {
  const int L = gs.length();
  VarianceDecomposition out;
  const Eigen::VectorXd& pi = gs.measure();
  const double mean = pi.dot(f);
  out.variance = pi.dot((f.array() - mean).square().matrix());
  Eigen::VectorXd fj = f;
  for (int j = 1; j <= L; ++j) {
    const Eigen::VectorXd next = gs.conditional_expectation(fj, j + 1);
    // Var(f_j | eta_{alpha_{j+1}}) = E(f_j^2 | .) - f_{j+1}^2
    const Eigen::VectorXd second = gs.conditional_expectation(fj.cwiseProduct(fj), j + 1);
    const Eigen::VectorXd cv = second - next.cwiseProduct(next);
    out.summands.push_back(pi.dot(cv));
    fj = next;
  }
  double total = 0.0;
  for (double s : out.summands) total += s;
  out.residual = std::abs(total - out.variance);
  return out;
}

OneSiteGap one_site_gap(const GradientSpace& gs, int j, const std::vector<int>& tail, int probes) {
  const int L = gs.length();
  if (j < 1 || j > L) throw PreconditionError("site j out of range");
  if (static_cast<int>(tail.size()) != L - j) throw PreconditionError("tail must hold eta_{j+1}..eta_L");
  const auto& sp = gs.space();
  std::vector<int> coords(static_cast<std::size_t>(L));
  for (int c = 0; c < j - 1; ++c) coords[static_cast<std::size_t>(c)] = sp.lo(c);
  for (int c = j; c < L; ++c) coords[static_cast<std::size_t>(c)] = tail[static_cast<std::size_t>(c - j)];
  const int lo = sp.lo(j - 1), hi = sp.hi(j - 1);
  std::vector<double> law;
  double z = 0.0;
  for (int x = lo; x <= hi; ++x) {
    coords[static_cast<std::size_t>(j - 1)] = x;
    const auto idx = sp.index_of_coords(coords);
    if (!idx) throw PreconditionError("tail lies outside the truncated box");
    // eta_{j..L} fixed: mass of this block at level j-1
    double m = 0.0;
    const std::size_t stride = sp.stride(j - 1);
    const std::size_t base = (*idx / stride) * stride;
    for (std::size_t k = base; k < base + stride; ++k) m += gs.measure()[static_cast<Eigen::Index>(k)];
    law.push_back(m);
    z += m;
  }
  for (double& p : law) p /= z;
  OneSiteGap out;
  out.conditional_law = law;
  if (law.size() < 2) {
    out.gap = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<Edge> edges;
  for (std::size_t x = 0; x + 1 < law.size(); ++x) edges.push_back({x, x + 1, law[x]});
  const SymmetricForm chain(Eigen::Map<const Eigen::VectorXd>(law.data(), static_cast<Eigen::Index>(law.size())),
                            std::move(edges));
  out.gap = form_gap(chain).value;
  std::mt19937_64 rng(static_cast<std::uint64_t>(j) * 7919 + law.size());
  std::normal_distribution<double> normal;
  for (int p = 0; p < probes; ++p) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(law.size()));
    for (Eigen::Index x = 0; x < f.size(); ++x) f[x] = p == 0 ? double(x) : normal(rng);
    const double e = chain.energy(f);
    if (e > 0.0) out.worst_ratio = std::max(out.worst_ratio, out.gap * chain.variance(f) / e);
  }
  return out;
}

FormReport ratio_bounds(const GradientSpace& gs) {
  const int L = gs.length();
  const double beta = gs.params().beta;
  const double m = gs.params().catalog.decay_mass();
  const double b1 = 8.0 * std::exp(-m);
  FormReport r = make_report(gs, "ratio_bounds");
  long long checks = 0, violations = 0;
  double worst1 = 0.0, worst2 = 0.0, worst_fraction = 0.0;
  nlohmann::json first_violation;
  const double tiny = 1e-12;
  for (int j = 2; j <= L; ++j) {
    const Eigen::VectorXd& F = gs.F(j);
    for (std::size_t k = 0; k < gs.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      if (const auto up = gs.shift(k, j)) {
        const int x = gs.eta(k, j);
        const double sgn = std::abs(x + 1) - std::abs(x);
        const double dev = std::abs(std::log(F[static_cast<Eigen::Index>(*up)] / F[kk]) + beta * sgn);
        ++checks;
        worst1 = std::max(worst1, dev);
        worst_fraction = std::max(worst_fraction, dev / b1);
        if (dev > b1 + tiny && violations++ == 0) first_violation = {{"kind", "drift"}, {"j", j}, {"state", k}};
      }
      for (int i = j + 1; i <= L; ++i) {
        const auto up = gs.shift(k, i);
        if (!up) continue;
        const double b2 = 16.0 * std::exp(-m * (i - j));
        const double dev = std::abs(std::log(F[static_cast<Eigen::Index>(*up)] / F[kk]));
        ++checks;
        worst2 = std::max(worst2, dev);
        worst_fraction = std::max(worst_fraction, dev / b2);
        if (dev > b2 + tiny && violations++ == 0) {
          first_violation = {{"kind", "tail"}, {"i", i}, {"j", j}, {"state", k}};
        }
      }
    }
  }
  r.value = worst_fraction;
  r.pass = violations == 0;
  r.details = {{"checks", checks},        {"violations", violations}, {"worst_drift_deviation", worst1},
               {"drift_bound", b1},       {"worst_tail_deviation", worst2}, {"decay_mass", m}};
  if (violations) r.details["first_violation"] = first_violation;
  return r;
}

double derivative_identity(const GradientSpace& gs, const Eigen::VectorXd& f, int i) {
  const int L = gs.length();
  if (i < 1 || i > L) throw PreconditionError("i must lie in 1..L");
  const auto n = static_cast<Eigen::Index>(gs.size());
  const std::size_t stride = gs.space().stride(i - 1);
  auto shifted = [&](const Eigen::VectorXd& g) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < gs.size(); ++k)
      if (gs.shift(k, i)) s[static_cast<Eigen::Index>(k)] = g[static_cast<Eigen::Index>(k + stride)];
    return s;
  };
  const Eigen::VectorXd allowed = gs.step_allowed(i);
  const Eigen::VectorXd fi = gs.conditional_expectation(f, i);
  const Eigen::VectorXd lhs = shifted(fi) - fi.cwiseProduct(allowed);
  Eigen::VectorXd rhs = gs.conditional_expectation(shifted(f) - f.cwiseProduct(allowed), i);
  Eigen::VectorXd fj = f;
  for (int j = 1; j < i; ++j) {
    const Eigen::VectorXd& F = gs.F(j);
    const Eigen::VectorXd plus = shifted(fj);
    Eigen::VectorXd V = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < gs.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      if (allowed[kk] > 0.0) V[kk] = F[static_cast<Eigen::Index>(k + stride)] / F[kk] - 1.0;
    }
    const Eigen::VectorXd cov = gs.conditional_expectation(plus.cwiseProduct(V), i) -
                                gs.conditional_expectation(plus, i).cwiseProduct(gs.conditional_expectation(V, i));
    rhs += cov;
    fj = gs.conditional_expectation(fj, j + 1);
  }
  double worst = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    if (allowed[k] > 0.0) worst = std::max(worst, std::abs(lhs[k] - rhs[k]));
  return worst;
}

FormReport form_domination(const GradientSpace& gs, const std::vector<Eigen::VectorXd>& tests) {
  const int L = gs.length();
  const Eigen::VectorXd& pi = gs.measure();
  FormReport r = make_report(gs, "form_domination");
  double worst = 0.0;
  int counted = 0;
  for (const auto& f : tests) {
    double lhs = 0.0, rhs = 0.0;
    for (int i = 1; i <= L; ++i) {
      lhs += pi.dot(gs.forward_difference(gs.conditional_expectation(f, i), i).array().square().matrix());
      rhs += pi.dot(gs.forward_difference(f, i).array().square().matrix());
    }
    if (rhs <= 1e-300) continue;
    ++counted;
    worst = std::max(worst, lhs / rhs);
  }
  r.value = worst;
  r.pass = worst <= 4.0;
  r.details = {{"test_functions", tests.size()}, {"nonconstant", counted}, {"constant", 4.0}};
  return r;
}

FormReport poincare_constant(const GradientSpace& gs) {
  const int L = gs.length();
  const int M = gs.params().height_bound();
  const GapResult g = form_gap(gs.gradient_form());
  FormReport r = make_report(gs, "poincare_constant");
  const double C = 1.0 / g.value;
  r.value = C;
  const double scale = double(L) * std::max<double>(L, double(M) * M);
  r.details = {{"gap", g.value}, {"normalized", C / scale}, {"scale", scale}, {"residual", g.residual}};

  // conditional constant: slices eta_1 = v with single-coordinate moves k >= 2
  if (L >= 2) {
    const auto& sp = gs.space();
    const std::size_t s1 = sp.stride(1);
    const std::size_t slice = gs.size() / s1;
    double worst = 0.0;
    std::vector<double> per;
    for (int v = sp.lo(0); v <= sp.hi(0); ++v) {
      const auto off = static_cast<std::size_t>(v - sp.lo(0));
      Eigen::VectorXd law(static_cast<Eigen::Index>(slice));
      for (std::size_t b = 0; b < slice; ++b) law[static_cast<Eigen::Index>(b)] = gs.measure()[static_cast<Eigen::Index>(off + b * s1)];
      law /= law.sum();
      std::vector<Edge> edges;
      for (std::size_t b = 0; b < slice; ++b) {
        const std::size_t k = off + b * s1;
        for (int site = 2; site <= L; ++site)
          if (const auto up = gs.shift(k, site)) edges.push_back({b, (*up - off) / s1, law[static_cast<Eigen::Index>(b)]});
      }
      const double c = 1.0 / form_gap(SymmetricForm(law, std::move(edges))).value;
      per.push_back(c);
      worst = std::max(worst, c);
    }
    r.details["conditional_constant"] = worst;
    r.details["conditional_by_eta1"] = per;
  }
  return r;
}

std::vector<Eigen::VectorXd> test_functions(const GradientSpace& gs, int random_count, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> out;
  const int L = gs.length();
  out.push_back(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(gs.size()), 1.0));
  out.push_back(gs.tabulate([](const GradientConfiguration& g) { return double(g[0]); }));
  out.push_back(gs.tabulate([L](const GradientConfiguration& g) { return double(g[static_cast<std::size_t>(L - 1)]); }));
  out.push_back(gs.tabulate([](const GradientConfiguration& g) {
    double s = 0.0;
    for (int v : g.steps()) s += v;
    return s;
  }));
  out.push_back(gs.tabulate([](const GradientConfiguration& g) {
    double s = 0.0;
    for (int v : g.steps()) s += std::abs(v);
    return s;
  }));
  out.push_back(gs.tabulate([](const GradientConfiguration& g) {
    // the height profile's maximum
    int h = 0, best = std::numeric_limits<int>::min();
    for (int v : g.steps()) best = std::max(best, h += v);
    return double(best);
  }));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int r = 0; r < random_count; ++r) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(gs.size()));
    for (Eigen::Index k = 0; k < f.size(); ++k) f[k] = normal(rng);
    out.push_back(f);
  }
  return out;
}

}  // namespace sos::spectral
