#include "sos/spectral/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "sos/core/error.hpp"

namespace sos::spectral {

namespace {

Eigen::VectorXd start_vector(Eigen::Index n, const std::optional<Eigen::VectorXd>& deflate) {
  std::mt19937_64 rng(0x1a2c305);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  if (deflate) v -= deflate->dot(v) * *deflate;
  return v.normalized();
}

void project_out(Eigen::VectorXd& w, const std::optional<Eigen::VectorXd>& deflate) {
  if (deflate) w -= deflate->dot(w) * *deflate;
}

Eigenpair dense_lowest(const SparseMatrix& S, const std::optional<Eigen::VectorXd>& deflate) {
  Eigen::MatrixXd A = Eigen::MatrixXd(S);
  if (deflate) {
    // push the known ground state above the rest of the spectrum
    const double shift = 2.0 * A.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    A += shift * (*deflate) * deflate->transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw Error("dense eigensolve failed");
  Eigenpair out;
  out.value = es.eigenvalues()[0];
  out.vector = es.eigenvectors().col(0);
  Eigen::VectorXd r = S * out.vector - out.value * out.vector;
  out.residual = r.norm();
  out.dense = true;
  return out;
}

// Thick-restart Lanczos for the smallest eigenvalue.
Eigenpair lanczos_lowest(const SparseMatrix& S, const std::optional<Eigen::VectorXd>& deflate, double tol) {
  const Eigen::Index n = S.rows();
  const Eigen::Index m = std::min<Eigen::Index>(60, n - 1);
  const Eigen::Index keep = std::min<Eigen::Index>(15, m / 2);
  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  V.col(0) = start_vector(n, deflate);
  Eigen::Index j0 = 0;
  double scale = 1.0;
  Eigenpair out;
  out.dense = false;
  for (int cycle = 0; cycle < 2000; ++cycle) {
    Eigen::Index used = m;
    double beta = 0.0;
    for (Eigen::Index j = j0; j < m; ++j) {
      Eigen::VectorXd w = S * V.col(j);
      project_out(w, deflate);
      Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h;
      const Eigen::VectorXd h2 = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h2;
      h += h2;
      project_out(w, deflate);
      T.block(0, j, j + 1, 1) = h;
      T.block(j, 0, 1, j + 1) = h.transpose();
      beta = w.norm();
      ++out.iterations;
      scale = std::max(scale, std::abs(h[j]));
      if (beta <= 1e-13 * scale) {
        used = j + 1;
        break;
      }
      V.col(j + 1) = w / beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(used, used));
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& Y = es.eigenvectors();
    scale = std::max({scale, std::abs(theta[0]), std::abs(theta[used - 1])});
    const double ritz_residual = beta * std::abs(Y(used - 1, 0));
    if (ritz_residual <= tol * scale || used < m) {
      out.value = theta[0];
      out.vector = (V.leftCols(used) * Y.col(0)).normalized();
      out.residual = (S * out.vector - out.value * out.vector).norm();
      return out;
    }
    const Eigen::MatrixXd kept = V.leftCols(m) * Y.leftCols(keep);
    V.leftCols(keep) = kept;
    V.col(keep) = V.col(m);
    T.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) T(i, i) = theta[i];
    j0 = keep;
  }
  throw Error("Lanczos did not converge");
}

}  // namespace

Eigenpair lowest_eigenpair(const SparseMatrix& S, const std::optional<Eigen::VectorXd>& deflate, double tol,
                           std::size_t dense_limit) {
  if (S.rows() != S.cols() || S.rows() == 0) throw PreconditionError("square nonempty matrix required");
  if (static_cast<std::size_t>(S.rows()) < dense_limit || S.rows() < 4) return dense_lowest(S, deflate);
  return lanczos_lowest(S, deflate, tol);
}

KrylovExp krylov_expm_action(const SparseMatrix& S, const Eigen::VectorXd& b, const std::vector<double>& times,
                             double tol, int max_dimension) {
  KrylovExp out;
  const double bnorm = b.norm();
  const Eigen::Index n = S.rows();
  if (bnorm == 0.0) {
    out.values.assign(times.size(), Eigen::VectorXd::Zero(n));
    return out;
  }
  const Eigen::Index cap = std::min<Eigen::Index>(max_dimension, n);
  Eigen::MatrixXd V(n, cap + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(cap, cap);
  V.col(0) = b / bnorm;
  Eigen::Index built = 0;
  double beta = 0.0;
  bool invariant = false;
  Eigen::Index target = std::min<Eigen::Index>(30, cap);
  while (true) {
    for (Eigen::Index j = built; j < target; ++j) {
      Eigen::VectorXd w = S * V.col(j);
      Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h;
      const Eigen::VectorXd h2 = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h2;
      h += h2;
      T.block(0, j, j + 1, 1) = h;
      T.block(j, 0, 1, j + 1) = h.transpose();
      beta = w.norm();
      built = j + 1;
      if (beta <= 1e-14 * std::max(1.0, std::abs(h[j]))) {
        invariant = true;
        break;
      }
      V.col(j + 1) = w / beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(built, built));
    const Eigen::MatrixXd& Y = es.eigenvectors();
    out.values.clear();
    out.max_error_estimate = 0.0;
    for (double t : times) {
      const Eigen::VectorXd decay = (-t * es.eigenvalues().array()).exp().matrix();
      const Eigen::VectorXd coeff = Y * decay.cwiseProduct(Y.row(0).transpose());
      out.values.push_back(bnorm * (V.leftCols(built) * coeff));
      if (!invariant) out.max_error_estimate = std::max(out.max_error_estimate, bnorm * beta * std::abs(coeff[built - 1]));
    }
    out.dimension = static_cast<int>(built);
    if (invariant || out.max_error_estimate <= tol || built >= cap) return out;
    target = std::min<Eigen::Index>(2 * target, cap);
  }
}

}  // namespace sos::spectral
