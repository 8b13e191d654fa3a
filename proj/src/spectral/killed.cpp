#include "sos/spectral/killed.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/MatrixFunctions>

#include "sos/core/error.hpp"
#include "sos/spectral/eigen.hpp"

namespace sos::spectral {

struct KilledOperator::Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

KilledOperator::KilledOperator(const GeneratorOperator& gen, std::vector<std::size_t> region)
    : region_(std::move(region)) {
  if (region_.empty()) throw PreconditionError("region A is empty");
  std::sort(region_.begin(), region_.end());
  region_.erase(std::unique(region_.begin(), region_.end()), region_.end());
  const std::size_t n = gen.dimension();
  local_.assign(n, npos);
  for (std::size_t a = 0; a < region_.size(); ++a) {
    if (region_[a] >= n) throw PreconditionError("region index out of range");
    local_[region_[a]] = a;
  }
  const auto m = static_cast<Eigen::Index>(region_.size());
  pi_.resize(m);
  escape_.setZero(m);
  const auto& off = gen.off_diagonal();
  const auto& pi = gen.stationary();
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto i = static_cast<Eigen::Index>(region_[static_cast<std::size_t>(a)]);
    pi_[a] = pi[i];
    trip.emplace_back(a, a, -gen.diagonal()[i]);
    for (SparseMatrix::InnerIterator it(off, i); it; ++it) {
      const std::size_t b = local_[static_cast<std::size_t>(it.col())];
      if (b == npos) {
        escape_[a] += it.value();
        continue;
      }
      const double w = 0.5 * (pi[i] * it.value() + pi[it.col()] * off.coeff(it.col(), i));
      trip.emplace_back(a, static_cast<Eigen::Index>(b), -w / std::sqrt(pi[i] * pi[it.col()]));
    }
  }
  S_.resize(m, m);
  S_.setFromTriplets(trip.begin(), trip.end());
}

std::size_t KilledOperator::local_index(std::size_t parent) const {
  return parent < local_.size() ? local_[parent] : npos;
}

Eigen::MatrixXd KilledOperator::dense_generator() const {
  const Eigen::VectorXd s = pi_.cwiseSqrt();
  Eigen::MatrixXd G = -Eigen::MatrixXd(S_);
  return s.cwiseInverse().asDiagonal() * G * s.asDiagonal();
}

const KilledOperator::Spectrum& KilledOperator::spectrum() const {
  if (!spectrum_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(S_)};
    if (es.info() != Eigen::Success) throw Error("killed eigensolve failed");
    spectrum_ = std::make_shared<Spectrum>(Spectrum{es.eigenvalues(), es.eigenvectors()});
  }
  return *spectrum_;
}

double KilledOperator::killed_gap() const {
  if (dimension() == 1) return escape_[0];
  const Eigen::VectorXd g = pi_.cwiseSqrt().normalized();
  return lowest_eigenpair(S_, g).value;
}

double KilledOperator::bottom_eigenvalue() const {
  if (dimension() < kDenseLimit) return spectrum().values[0];
  return lowest_eigenpair(S_, std::nullopt).value;
}

Eigen::VectorXd KilledOperator::mean_exit_times() const {
  if (escape_.sum() <= 0.0) throw PreconditionError("region has no exit: mean exit time is infinite");
  const Eigen::VectorXd s = pi_.cwiseSqrt();
  Eigen::VectorXd w;
  if (dimension() < kDenseLimit) {
    Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(S_)};
    if (llt.info() != Eigen::Success) throw Error("killed operator is not positive definite");
    w = llt.solve(s);
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg(S_);
    cg.setTolerance(1e-13);
    cg.setMaxIterations(100000);
    w = cg.solve(s);
    if (cg.info() != Eigen::Success) throw Error("conjugate gradient did not converge");
  }
  return w.cwiseQuotient(s);
}

KilledOperator killed_operator(const GeneratorOperator& gen, double region_eps) {
  if (!gen.space() || !gen.params()) throw PreconditionError("generator was not built from model parameters");
  model::ModelParams p = *gen.params();
  p.eps = region_eps;
  const int a = p.region_a_bound();
  std::vector<std::size_t> region;
  for (std::size_t i = 0; i < gen.dimension(); ++i)
    if (gen.space()->configuration(i).within(a)) region.push_back(i);
  return KilledOperator(gen, std::move(region));
}

SurvivalCurve survival_curve(const KilledOperator& killed, const Eigen::VectorXd& start,
                             const std::vector<double>& times) {
  const auto m = static_cast<Eigen::Index>(killed.dimension());
  if (start.size() != m) throw PreconditionError("start law must live on the region");
  if ((start.array() < 0.0).any() || std::abs(start.sum() - 1.0) > 1e-9) {
    throw PreconditionError("start must be a probability vector on the region");
  }
  SurvivalCurve out;
  out.times = times;
  const Eigen::VectorXd& pi = killed.stationary();
  const Eigen::VectorXd s = pi.cwiseSqrt();
  // P(tau > t) = start^T D^{-1/2} exp(-t S) D^{1/2} 1
  const Eigen::VectorXd left = start.cwiseQuotient(s);
  const Eigen::VectorXd right = s;
  out.decay_rate = killed.bottom_eigenvalue();
  // Cauchy-Schwarz in L^2(pi): ||start/pi||_pi ||1_A||_pi
  out.norm_factor = std::sqrt(start.cwiseProduct(start).cwiseQuotient(pi).sum()) * std::sqrt(pi.sum());
  if (killed.dimension() < kDenseLimit) {
    out.method = "dense-eigen";
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(killed.symmetric_matrix())};
    const Eigen::VectorXd a = es.eigenvectors().transpose() * left;
    const Eigen::VectorXd b = es.eigenvectors().transpose() * right;
    const Eigen::VectorXd ab = a.cwiseProduct(b);
    for (double t : times) {
      const double v = ab.dot((-t * es.eigenvalues().array()).exp().matrix());
      out.survival.push_back(std::clamp(v, 0.0, 1.0));
    }
    // independent route: scaling-and-squaring on the (non-symmetric) generator
    const Eigen::MatrixXd G = killed.dense_generator();
    const std::vector<double> probe = times.empty() ? std::vector<double>{} : std::vector<double>{times.front(), times[times.size() / 2], times.back()};
    for (double t : probe) {
      const Eigen::MatrixXd E = (t * G).exp();
      const double v = start.dot(E * Eigen::VectorXd::Ones(m));
      const auto it = std::find(times.begin(), times.end(), t);
      out.cross_check = std::max(out.cross_check, std::abs(v - out.survival[static_cast<std::size_t>(it - times.begin())]));
    }
    out.error_estimate = out.cross_check;
  } else {
    out.method = "krylov";
    const KrylovExp k = krylov_expm_action(killed.symmetric_matrix(), right, times, 1e-10);
    for (const auto& v : k.values) out.survival.push_back(std::clamp(left.dot(v), 0.0, 1.0));
    out.error_estimate = k.max_error_estimate * left.norm();
  }
  return out;
}

}  // namespace sos::spectral
