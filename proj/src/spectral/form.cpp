#include "sos/spectral/form.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "sos/core/error.hpp"
#include "sos/spectral/eigen.hpp"

namespace sos::spectral {

SymmetricForm::SymmetricForm(Eigen::VectorXd measure, std::vector<Edge> edges)
    : pi_(std::move(measure)), edges_(std::move(edges)) {
  if (pi_.size() == 0) throw PreconditionError("form needs a nonempty space");
  if ((pi_.array() <= 0.0).any()) throw PreconditionError("form measure must be strictly positive");
  if (std::abs(pi_.sum() - 1.0) > 1e-9) throw PreconditionError("form measure must be normalised");
  const auto n = static_cast<std::size_t>(pi_.size());
  for (const auto& e : edges_) {
    if (e.i >= n || e.j >= n || e.i == e.j || e.weight < 0.0) throw PreconditionError("bad form edge");
  }
}

double SymmetricForm::energy(const Eigen::VectorXd& f) const {
  double q = 0.0;
  for (const auto& e : edges_) {
    const double d = f[static_cast<Eigen::Index>(e.i)] - f[static_cast<Eigen::Index>(e.j)];
    q += e.weight * d * d;
  }
  return q;
}

double SymmetricForm::variance(const Eigen::VectorXd& f) const {
  const double m = mean(f);
  return pi_.dot((f.array() - m).square().matrix());
}

double SymmetricForm::rayleigh(const Eigen::VectorXd& f) const {
  const double v = variance(f);
  if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
  return energy(f) / v;
}

SparseMatrix SymmetricForm::symmetric_matrix() const {
  const Eigen::VectorXd s = pi_.cwiseSqrt();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * edges_.size() + size());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(pi_.size());
  for (const auto& e : edges_) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    const double off = -e.weight / (s[i] * s[j]);
    trip.emplace_back(i, j, off);
    trip.emplace_back(j, i, off);
    diag[i] += e.weight / pi_[i];
    diag[j] += e.weight / pi_[j];
  }
  for (Eigen::Index i = 0; i < diag.size(); ++i) trip.emplace_back(i, i, diag[i]);
  SparseMatrix S(pi_.size(), pi_.size());
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

GapResult form_gap(const SymmetricForm& form, int random_checks) {
  GapResult out;
  if (form.size() == 1) {
    out.value = std::numeric_limits<double>::infinity();
    out.random_rayleigh_min = out.value;
    return out;
  }
  const SparseMatrix S = form.symmetric_matrix();
  const Eigen::VectorXd g = form.ground().normalized();
  const Eigenpair ep = lowest_eigenpair(S, g);
  out.value = std::max(ep.value, 0.0);
  out.residual = ep.residual;
  out.iterations = ep.iterations;
  out.dense = ep.dense;
  out.minimizer = ep.vector.cwiseQuotient(form.ground());

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < random_checks; ++r) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(form.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = normal(rng);
    // half of the probes are perturbations of the minimiser, which is where
    // a wrong eigenvalue would show up
    if (r % 2 == 1) f = out.minimizer + 1e-3 * f.norm() / std::sqrt(double(f.size())) * f;
    best = std::min(best, form.rayleigh(f));
  }
  out.random_rayleigh_min = best;
  return out;
}

}  // namespace sos::spectral
