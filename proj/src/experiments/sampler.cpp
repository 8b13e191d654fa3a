#include "sos/experiments/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "sos/core/error.hpp"
#include "sos/core/numeric.hpp"
#include "sos/model/energy.hpp"
#include "sos/model/state_space.hpp"

namespace sos::experiments {

using model::Configuration;

std::string to_string(SamplerMethod m) {
  switch (m) {
    case SamplerMethod::transfer_matrix: return "transfer_matrix";
    case SamplerMethod::enumeration: return "enumeration";
    case SamplerMethod::metropolis: return "metropolis";
  }
  return "unknown";
}

nlohmann::json to_json(const SamplerDiagnostics& d) {
  return {{"method", to_string(d.method)}, {"support", d.support},   {"chains", d.chains},
          {"burn_in_sweeps", d.burn_in_sweeps}, {"r_hat", d.r_hat}, {"converged", d.converged}};
}

namespace {

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  const double m = double(chains.size());
  const std::size_t n = chains.front().size();
  std::vector<double> means;
  double w = 0.0;
  for (const auto& c : chains) {
    double mu = 0.0;
    for (double x : c) mu += x;
    mu /= double(n);
    double s2 = 0.0;
    for (double x : c) s2 += (x - mu) * (x - mu);
    w += s2 / double(n - 1);
    means.push_back(mu);
  }
  w /= m;
  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= m;
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= double(n) / (m - 1.0);
  if (w <= 0.0) return b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  const double var = (double(n) - 1.0) / double(n) * w + b / double(n);
  return std::sqrt(var / w);
}

}  // namespace

ConditionedSampler::ConditionedSampler(const model::ModelParams& params, int bound, std::uint64_t seed,
                                       double r_hat_target)
    : params_(params), bound_(bound) {
  params_.validate();
  if (params_.kind != model::MeasureKind::constrained) throw PreconditionError("kind: sampler needs the constrained measure");
  if (bound < 0 || bound > params_.height_bound()) throw PreconditionError("bound must lie in [0, M]");
  const int L = params_.L;
  const int width = 2 * bound + 1;

  transfer_.assign(static_cast<std::size_t>(L), std::vector<double>(static_cast<std::size_t>(width), 1.0));
  for (int i = L - 2; i >= 0; --i) {
    auto& v = transfer_[static_cast<std::size_t>(i)];
    const auto& next = transfer_[static_cast<std::size_t>(i + 1)];
    double top = 0.0;
    for (int h = 0; h < width; ++h) {
      double s = 0.0;
      for (int g = 0; g < width; ++g) s += std::exp(-params_.beta * std::abs(h - g)) * next[static_cast<std::size_t>(g)];
      v[static_cast<std::size_t>(h)] = s;
      top = std::max(top, s);
    }
    for (double& x : v) x /= top;
  }
  if (params_.catalog.is_zero()) {
    diag_.method = SamplerMethod::transfer_matrix;
    return;
  }

  if (L <= 6) {
    diag_.method = SamplerMethod::enumeration;
    const auto space = model::StateSpace::height_box(L, bound);
    std::vector<double> lw;
    for (std::size_t k = 0; k < space.size(); ++k) {
      states_.push_back(space.configuration(k));
      lw.push_back(model::log_weight(states_.back(), params_));
    }
    const double top = *std::max_element(lw.begin(), lw.end());
    double acc = 0.0;
    for (double x : lw) cumulative_.push_back(acc += std::exp(x - top));
    for (double& c : cumulative_) c /= acc;
    diag_.support = states_.size();
    return;
  }

  diag_.method = SamplerMethod::metropolis;
  diag_.chains = 4;
  long long sweeps = 25;
  const long long max_sweeps = 25 * 4096;
  for (;;) {
    std::vector<std::vector<double>> traces;
    for (int c = 0; c < diag_.chains; ++c) {
      // dispersed starts: flat, top, bottom, alternating
      std::vector<int> h(static_cast<std::size_t>(L), 0);
      for (int i = 0; i < L; ++i) {
        const int sgn = c == 1 ? 1 : c == 2 ? -1 : c == 3 ? (i % 2 ? 1 : -1) : 0;
        h[static_cast<std::size_t>(i)] = sgn * bound;
      }
      dynamics::CounterRng rng({seed, 0xd1a6'0000ULL + static_cast<std::uint64_t>(c)});
      std::vector<double> trace;
      metropolis(Configuration(h), 2 * sweeps, rng, &trace);
      traces.emplace_back(trace.begin() + static_cast<std::ptrdiff_t>(trace.size() / 2), trace.end());
    }
    diag_.r_hat = gelman_rubin(traces);
    diag_.burn_in_sweeps = 2 * sweeps;
    if (diag_.r_hat < r_hat_target) break;
    if (sweeps >= max_sweeps) {
      diag_.converged = false;
      break;
    }
    sweeps *= 2;
  }
}

Configuration ConditionedSampler::metropolis(Configuration cfg, long long sweeps, dynamics::CounterRng& rng,
                                             std::vector<double>* trace) const {
  const int L = params_.L;
  double w_now = model::long_range_energy(cfg, params_);
  for (long long s = 0; s < sweeps; ++s) {
    // independence proposal from the zero-potential law on the box: the
    // acceptance ratio reduces to exp(W(old) - W(new))
    {
      Configuration prop = free_draw(rng);
      const double w_prop = model::long_range_energy(prop, params_);
      if (rng.uniform() < std::exp(w_now - w_prop)) {
        cfg = std::move(prop);
        w_now = w_prop;
      }
    }
    for (int step = 0; step < L; ++step) {
      const int site = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(L)));
      const int dir = rng.uniform() < 0.5 ? -1 : 1;
      const double u = rng.uniform();
      if (std::abs(cfg[static_cast<std::size_t>(site - 1)] + dir) > bound_) continue;
      const double delta = model::log_weight_change(cfg, site, dir, params_);
      if (delta >= 0.0 || u < std::exp(delta)) {
        w_now += model::long_range_energy_change(cfg, site, dir, params_.catalog, params_.strip());
        cfg[static_cast<std::size_t>(site - 1)] += dir;
      }
    }
    if (trace) {
      double sum = 0.0;
      for (int i = 0; i < L; ++i) sum += cfg[static_cast<std::size_t>(i)];
      trace->push_back(sum + static_cast<double>(model::hamiltonian(cfg)));
    }
  }
  return cfg;
}

Configuration ConditionedSampler::free_draw(dynamics::CounterRng& rng) const {
  const int L = params_.L;
  const int width = 2 * bound_ + 1;
  std::vector<int> h(static_cast<std::size_t>(L));
  std::vector<double> w(static_cast<std::size_t>(width));
  for (int i = 0; i < L; ++i) {
    const auto& v = transfer_[static_cast<std::size_t>(i)];
    for (int g = 0; g < width; ++g) {
      const double link = i == 0 ? 1.0 : std::exp(-params_.beta * std::abs(h[static_cast<std::size_t>(i - 1)] + bound_ - g));
      w[static_cast<std::size_t>(g)] = link * v[static_cast<std::size_t>(g)];
    }
    double total = 0.0;
    for (double x : w) total += x;
    double u = rng.uniform() * total;
    int g = 0;
    while (g + 1 < width && (u -= w[static_cast<std::size_t>(g)]) > 0.0) ++g;
    h[static_cast<std::size_t>(i)] = g - bound_;
  }
  return Configuration(h);
}

Configuration ConditionedSampler::draw(dynamics::RngSpec spec) const {
  dynamics::CounterRng rng(spec);
  const int L = params_.L;
  switch (diag_.method) {
    case SamplerMethod::transfer_matrix:
      return free_draw(rng);
    case SamplerMethod::enumeration: {
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), rng.uniform());
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), states_.size() - 1);
      return states_[k];
    }
    case SamplerMethod::metropolis:
      return metropolis(Configuration(std::vector<int>(static_cast<std::size_t>(L), 0)), diag_.burn_in_sweeps, rng,
                        nullptr);
  }
  throw std::logic_error("unreachable");
}

}  // namespace sos::experiments
