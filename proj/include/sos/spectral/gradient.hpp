#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sos/model/configuration.hpp"
#include "sos/model/gibbs.hpp"
#include "sos/model/params.hpp"
#include "sos/spectral/form.hpp"

namespace sos::spectral {

/// Named numerical result together with the truncation that produced it.
struct FormReport {
  std::string name;
  double value = 0.0;
  int L = 0;
  int M = 0;
  double beta = 0.0;
  int R = 0;
  std::size_t space_size = 0;
  bool pass = true;
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const FormReport& r);

/// The gradient measure on the truncated box |eta_1| <= M, |eta_i| <= R,
/// with the tail marginals needed for conditional expectations.
///
/// Sites are 1-based as in eta_1..eta_L; tail set alpha_j = {j, ..., L}.
class GradientSpace {
 public:
  GradientSpace(const model::ModelParams& params, int R, std::size_t cap = model::kDefaultSizeCap);

  const model::ModelParams& params() const noexcept { return table_.params(); }
  const model::StateSpace& space() const noexcept { return table_.space(); }
  int truncation() const noexcept { return table_.truncation(); }
  std::size_t size() const noexcept { return table_.size(); }
  int length() const noexcept { return params().L; }
  const Eigen::VectorXd& measure() const noexcept { return pi_; }
  int eta(std::size_t idx, int site) const { return space().coord(idx, site - 1); }

  /// f evaluated on every enumerated state.
  Eigen::VectorXd tabulate(const std::function<double(const model::GradientConfiguration&)>& f) const;

  /// E(f | eta_{alpha_j}) as a function on the full space; j = 1 returns f,
  /// j = L + 1 the constant mean.
  Eigen::VectorXd conditional_expectation(const Eigen::VectorXd& f, int j) const;

  /// F_j(eta) = nu(eta_j | eta_{alpha_{j+1}}) for j = 1..L.
  const Eigen::VectorXd& F(int j) const { return F_[static_cast<std::size_t>(j - 1)]; }

  /// Index of eta + delta_i (unit step of coordinate i), if inside the box.
  std::optional<std::size_t> shift(std::size_t idx, int i) const;

  /// (delta_i^+ f)(eta) = f(eta + delta_i) - f(eta), zero where the step leaves the box.
  Eigen::VectorXd forward_difference(const Eigen::VectorXd& f, int i) const;
  /// Indicator of states where eta + delta_i stays inside the box.
  Eigen::VectorXd step_allowed(int i) const;

  /// The gradient form: exchange moves eta_k -> eta_k + 1, eta_{k+1} -> eta_{k+1} - 1
  /// for k = 1..L-1 (the k = 1 move needs eta_1 < M) and eta_L -> eta_L + 1,
  /// each with conductance nu(eta).
  SymmetricForm gradient_form() const;
  /// sum_i E[(delta_i^+ f)^2] as a form (single-coordinate increments, i = 1..L).
  SymmetricForm coordinate_form() const;

 private:
  model::GibbsTable table_;
  Eigen::VectorXd pi_;
  std::vector<std::vector<double>> block_mass_;  // block_mass_[c][b]: mass of tail block b at coordinate c
  std::vector<Eigen::VectorXd> F_;
};

/// Ebar(f, f) on the truncated gradient space.
double gradient_form(const GradientSpace& gs, const Eigen::VectorXd& f);
double gradient_form(const model::ModelParams& params, int R,
                     const std::function<double(const model::GradientConfiguration&)>& f);

/// inf Ebar/Var against lambda_1 of the auxiliary generator, with the rate
/// extremes C1 = min cbar, C2 = max cbar over the up-moves bounding the ratio.
FormReport gap_equivalence(const model::ModelParams& params, int R, std::size_t cap = model::kDefaultSizeCap);

struct VarianceDecomposition {
  std::vector<double> summands;  // E[Var(f_j | eta_{alpha_{j+1}})], j = 1..L
  double variance = 0.0;
  double residual = 0.0;  // |sum - variance|
};

VarianceDecomposition variance_decomposition(const GradientSpace& gs, const Eigen::VectorXd& f);

struct OneSiteGap {
  double gap = 0.0;
  double worst_ratio = 0.0;  // max over probes of gap * Var(f|.) / E[(delta_j^+ f)^2|.], must be <= 1
  std::vector<double> conditional_law;
};

/// Birth-death chain on eta_j under nu(. | eta_{alpha_{j+1}} = tail), up-rate 1.
/// tail holds eta_{j+1}, ..., eta_L.
OneSiteGap one_site_gap(const GradientSpace& gs, int j, const std::vector<int>& tail, int probes = 32);

/// Conditional-ratio bounds: F_j(eta + delta_j)/F_j(eta) against
/// exp(-beta sgn(eta_j) +- 8 e^{-m}) with sgn(x) = |x+1| - |x|, and
/// F_j(eta + delta_i)/F_j(eta), i > j, against exp(+-16 e^{-m(i-j)}); j = 2..L.
FormReport ratio_bounds(const GradientSpace& gs);

/// Max |lhs - rhs| of
/// delta_i^+ f_i = E(delta_i^+ f | eta_{alpha_i}) + sum_{j<i} Cov(f_j(. + delta_i), V_{i,j} | eta_{alpha_i})
/// with V_{i,j} = F_j(eta + delta_i)/F_j(eta) - 1, over states where the step stays in the box.
double derivative_identity(const GradientSpace& gs, const Eigen::VectorXd& f, int i);

/// Worst ratio sum_i E[(delta_i^+ f_i)^2] / sum_i E[(delta_i^+ f)^2] over the test functions;
/// pass when it is at most 4.
FormReport form_domination(const GradientSpace& gs, const std::vector<Eigen::VectorXd>& tests);

/// C(L, M) = sup Var/Ebar, its normalisation C / (L (L v M^2)), and the
/// conditional constant sup_{eta_1} sup_f Var(f|eta_1) / sum_{k>=2} E[(delta_k^+ f)^2 | eta_1].
FormReport poincare_constant(const GradientSpace& gs);

/// Random and structured test functions used by the identity checks.
std::vector<Eigen::VectorXd> test_functions(const GradientSpace& gs, int random_count, std::uint64_t seed);

}  // namespace sos::spectral
