#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sos/model/params.hpp"
#include "sos/model/state_space.hpp"
#include "sos/spectral/form.hpp"

namespace sos::spectral {

/// Sparse generator with its stationary law. Only off-diagonal rates are
/// stored; the diagonal is always the negative row sum.
class GeneratorOperator {
 public:
  /// rates: (i, j, G_ij) with i != j, G_ij > 0. log_stationary need not be normalised.
  GeneratorOperator(std::size_t n, const std::vector<Eigen::Triplet<double>>& rates, Eigen::VectorXd log_stationary);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(log_pi_.size()); }
  const SparseMatrix& off_diagonal() const noexcept { return off_; }
  const Eigen::VectorXd& diagonal() const noexcept { return diag_; }
  const Eigen::VectorXd& stationary() const noexcept { return pi_; }
  const Eigen::VectorXd& log_stationary() const noexcept { return log_pi_; }
  double rate(std::size_t i, std::size_t j) const;

  Eigen::MatrixXd dense() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return off_ * f + diag_.cwiseProduct(f); }

  /// The Dirichlet form <f, -G f>_pi; requires reversibility.
  SymmetricForm dirichlet_form() const;

  /// Present when built from model parameters.
  const std::optional<model::StateSpace>& space() const noexcept { return space_; }
  const std::optional<model::ModelParams>& params() const noexcept { return params_; }
  int truncation() const noexcept { return R_; }

  /// Same generator with states renumbered: new index of old state i is perm[i].
  GeneratorOperator relabeled(const std::vector<std::size_t>& perm) const;

 private:
  friend GeneratorOperator build_generator(const model::ModelParams&, int, std::size_t);
  SparseMatrix off_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd log_pi_;
  Eigen::VectorXd pi_;
  std::optional<model::StateSpace> space_;
  std::optional<model::ModelParams> params_;
  int R_ = 0;
};

/// Generator of the dynamics in params on its truncated space (heights for the
/// constrained kind, gradients with |eta_i| <= R for the auxiliary kind).
/// Transitions leaving the truncation are dropped.
GeneratorOperator build_generator(const model::ModelParams& params, int R,
                                  std::size_t cap = model::kDefaultSizeCap);

struct ReversibilityReport {
  double max_log_violation = 0.0;  // max |log(pi_i G_ij) - log(pi_j G_ji)|
  long long pairs = 0;
  bool reversible = true;
};

ReversibilityReport check_reversibility(const GeneratorOperator& gen, double tol = 1e-12);

/// lambda_1: the smallest nonzero eigenvalue of -G (the gap of the Dirichlet form).
/// Throws NotReversibleError when detailed balance fails.
GapResult spectral_gap(const GeneratorOperator& gen);

/// Debug dump in coordinate format, one "i j rate" line per off-diagonal entry.
void write_matrix(std::ostream& out, const GeneratorOperator& gen);

}  // namespace sos::spectral
