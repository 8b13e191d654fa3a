#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sos/spectral/form.hpp"
#include "sos/spectral/generator.hpp"

namespace sos::spectral {

/// The generator restricted to a region, keeping the full diagonal so that
/// attempted exits are lost mass (the process is killed).
class KilledOperator {
 public:
  KilledOperator(const GeneratorOperator& gen, std::vector<std::size_t> region);

  std::size_t dimension() const noexcept { return region_.size(); }
  /// Indices (into the parent generator) of the retained states, ascending.
  const std::vector<std::size_t>& region() const noexcept { return region_; }
  /// Position of parent state i in the region, or npos.
  std::size_t local_index(std::size_t parent) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// pi restricted to the region (not renormalised).
  const Eigen::VectorXd& stationary() const noexcept { return pi_; }
  /// Rate of leaving the region from each state.
  const Eigen::VectorXd& escape_rates() const noexcept { return escape_; }
  /// D^{1/2} (-G_A) D^{-1/2}, symmetric.
  const SparseMatrix& symmetric_matrix() const noexcept { return S_; }
  Eigen::MatrixXd dense_generator() const;

  /// inf over f with sum_A pi f = 0 of G(fhat, fhat) / sum_A pi f^2, fhat = f on A
  /// and 0 outside; never below the gap of the full generator.
  double killed_gap() const;
  /// Smallest eigenvalue of -G_A: the exponential decay rate of survival.
  double bottom_eigenvalue() const;

  /// Expected exit time from each state of the region: solves (-G_A) u = 1.
  Eigen::VectorXd mean_exit_times() const;

 private:
  struct Spectrum;
  const Spectrum& spectrum() const;

  std::vector<std::size_t> region_;
  std::vector<std::size_t> local_;
  Eigen::VectorXd pi_;
  Eigen::VectorXd escape_;
  SparseMatrix S_;
  mutable std::shared_ptr<Spectrum> spectrum_;
};

/// Restriction of a model-built generator to A = {||phi||_inf <= (1-eps) L / 2}.
KilledOperator killed_operator(const GeneratorOperator& gen, double region_eps);

struct SurvivalCurve {
  std::vector<double> times;
  std::vector<double> survival;  // P(tau > t)
  std::string method;            // "dense-eigen" or "krylov"
  double error_estimate = 0.0;   // a posteriori bound on the curve
  /// max deviation between the eigen route and scaling-and-squaring (dense only)
  double cross_check = 0.0;
  double decay_rate = 0.0;    // bottom eigenvalue
  double norm_factor = 0.0;   // C with P(tau > t) <= C exp(-decay_rate t)
};

/// P(tau > t) when the killed process starts from `start` (a law on the region).
SurvivalCurve survival_curve(const KilledOperator& killed, const Eigen::VectorXd& start,
                             const std::vector<double>& times);

}  // namespace sos::spectral
