#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sos::spectral {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// One unordered pair {i, j} of a quadratic form with its conductance.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0;
};

/// Q(f) = sum over edges of weight * (f_i - f_j)^2, paired with a probability
/// measure pi. Both reversible generators (weight pi_i G_ij) and the gradient
/// forms are expressed this way, so one set of eigen-routines serves all.
class SymmetricForm {
 public:
  SymmetricForm(Eigen::VectorXd measure, std::vector<Edge> edges);

  std::size_t size() const noexcept { return static_cast<std::size_t>(pi_.size()); }
  const Eigen::VectorXd& measure() const noexcept { return pi_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  double energy(const Eigen::VectorXd& f) const;
  double mean(const Eigen::VectorXd& f) const { return pi_.dot(f); }
  double variance(const Eigen::VectorXd& f) const;
  /// energy / variance; +infinity for constant f.
  double rayleigh(const Eigen::VectorXd& f) const;

  /// S = D^{-1/2} Lap D^{-1/2}, D = diag(pi); its spectrum is that of the form.
  SparseMatrix symmetric_matrix() const;
  /// sqrt(pi): the ground state of symmetric_matrix().
  Eigen::VectorXd ground() const { return pi_.cwiseSqrt(); }

 private:
  Eigen::VectorXd pi_;
  std::vector<Edge> edges_;
};

/// inf over non-constant f of Q(f) / Var(f), by eigensolve of the symmetrised matrix.
struct GapResult {
  double value = 0.0;
  double residual = 0.0;  // ||S x - value x|| for the returned unit vector
  int iterations = 0;
  bool dense = true;
  /// smallest Rayleigh quotient over random test functions (must be >= value)
  double random_rayleigh_min = 0.0;
  Eigen::VectorXd minimizer;  // in function coordinates (D^{-1/2} x)
};

GapResult form_gap(const SymmetricForm& form, int random_checks = 16);

}  // namespace sos::spectral
