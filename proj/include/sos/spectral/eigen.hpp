#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "sos/spectral/form.hpp"

namespace sos::spectral {

inline constexpr std::size_t kDenseLimit = 2000;

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;  // unit norm
  double residual = 0.0;
  int iterations = 0;
  bool dense = true;
};

/// Smallest eigenvalue of the symmetric matrix S on the orthogonal complement
/// of `deflate` (unit vector), or on the whole space when none is given.
/// Dense solve below kDenseLimit, thick-restart Lanczos otherwise.
Eigenpair lowest_eigenpair(const SparseMatrix& S, const std::optional<Eigen::VectorXd>& deflate,
                           double tol = 1e-10, std::size_t dense_limit = kDenseLimit);

/// Lanczos approximation of exp(-t S) b for each t, with a posteriori error
/// estimates; the Krylov dimension grows until every estimate is below tol.
struct KrylovExp {
  std::vector<Eigen::VectorXd> values;
  double max_error_estimate = 0.0;
  int dimension = 0;
};
KrylovExp krylov_expm_action(const SparseMatrix& S, const Eigen::VectorXd& b, const std::vector<double>& times,
                             double tol = 1e-10, int max_dimension = 400);

}  // namespace sos::spectral
