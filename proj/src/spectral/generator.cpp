#include "sos/spectral/generator.hpp"

#include <cmath>
#include <iomanip>

#include "sos/core/error.hpp"
#include "sos/core/numeric.hpp"
#include "sos/model/gibbs.hpp"

namespace sos::spectral {

GeneratorOperator::GeneratorOperator(std::size_t n, const std::vector<Eigen::Triplet<double>>& rates,
                                     Eigen::VectorXd log_stationary)
    : log_pi_(std::move(log_stationary)) {
  if (static_cast<std::size_t>(log_pi_.size()) != n) throw PreconditionError("stationary vector has wrong length");
  for (const auto& t : rates) {
    if (t.row() == t.col() || !(t.value() > 0.0) || t.row() < 0 || t.col() < 0 ||
        static_cast<std::size_t>(std::max(t.row(), t.col())) >= n) {
      throw PreconditionError("generator rates must be positive off-diagonal entries");
    }
  }
  const auto N = static_cast<Eigen::Index>(n);
  off_.resize(N, N);
  off_.setFromTriplets(rates.begin(), rates.end());
  diag_ = -(off_ * Eigen::VectorXd::Ones(N));
  const double lz = log_sum_exp(std::span<const double>(log_pi_.data(), n));
  log_pi_.array() -= lz;
  pi_ = log_pi_.array().exp().matrix();
}

double GeneratorOperator::rate(std::size_t i, std::size_t j) const {
  return off_.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

Eigen::MatrixXd GeneratorOperator::dense() const {
  Eigen::MatrixXd G = Eigen::MatrixXd(off_);
  G.diagonal() += diag_;
  return G;
}

SymmetricForm GeneratorOperator::dirichlet_form() const {
  const auto rep = check_reversibility(*this, 1e-9);
  if (!rep.reversible) throw NotReversibleError("generator fails detailed balance");
  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < off_.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(off_, i); it; ++it) {
      if (it.col() <= i) continue;
      // symmetric conductance pi_i G_ij = pi_j G_ji, averaged to remove round-off
      const double w = 0.5 * (pi_[i] * it.value() + pi_[it.col()] * off_.coeff(it.col(), i));
      edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(it.col()), w});
    }
  }
  return SymmetricForm(pi_, std::move(edges));
}

GeneratorOperator GeneratorOperator::relabeled(const std::vector<std::size_t>& perm) const {
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < off_.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(off_, i); it; ++it) {
      trip.emplace_back(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]),
                        static_cast<Eigen::Index>(perm[static_cast<std::size_t>(it.col())]), it.value());
    }
  }
  Eigen::VectorXd lp(log_pi_.size());
  for (Eigen::Index i = 0; i < lp.size(); ++i) lp[static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)])] = log_pi_[i];
  return GeneratorOperator(dimension(), trip, lp);
}

GeneratorOperator build_generator(const model::ModelParams& params, int R, std::size_t cap) {
  const model::GibbsTable table(params, R, cap);
  const auto& space = table.space();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * static_cast<std::size_t>(params.L) * space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double li = table.log_weight(i);
    if (li == kNegInf) continue;
    for (int k = 1; k <= params.L; ++k) {
      for (int d : {1, -1}) {
        const auto j = space.neighbor(i, k, d);
        if (!j) continue;
        const double lj = table.log_weight(*j);
        if (lj == kNegInf) continue;
        trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j), std::exp(0.5 * (lj - li)));
      }
    }
  }
  Eigen::VectorXd lw = Eigen::Map<const Eigen::VectorXd>(table.log_weights().data(),
                                                         static_cast<Eigen::Index>(table.size()));
  GeneratorOperator gen(space.size(), trip, lw);
  gen.space_ = space;
  gen.params_ = params;
  gen.R_ = R;
  return gen;
}

ReversibilityReport check_reversibility(const GeneratorOperator& gen, double tol) {
  ReversibilityReport rep;
  const auto& off = gen.off_diagonal();
  const auto& lp = gen.log_stationary();
  for (Eigen::Index i = 0; i < off.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(off, i); it; ++it) {
      const Eigen::Index j = it.col();
      if (j <= i) continue;
      ++rep.pairs;
      const double back = off.coeff(j, i);
      if (back <= 0.0) {
        rep.max_log_violation = std::numeric_limits<double>::infinity();
        continue;
      }
      const double v = std::abs((lp[i] + std::log(it.value())) - (lp[j] + std::log(back)));
      rep.max_log_violation = std::max(rep.max_log_violation, v);
    }
  }
  // a reverse edge without a forward partner is also a violation
  for (Eigen::Index i = 0; i < off.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(off, i); it; ++it) {
      if (it.col() < i && off.coeff(it.col(), i) <= 0.0) rep.max_log_violation = std::numeric_limits<double>::infinity();
    }
  }
  rep.reversible = rep.max_log_violation < tol;
  return rep;
}

GapResult spectral_gap(const GeneratorOperator& gen) {
  const SymmetricForm form = gen.dirichlet_form();
  return form_gap(form);
}

void write_matrix(std::ostream& out, const GeneratorOperator& gen) {
  const auto& off = gen.off_diagonal();
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < off.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(off, i); it; ++it) out << i << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace sos::spectral
