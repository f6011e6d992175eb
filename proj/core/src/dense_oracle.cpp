#include "shl/dense_oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "shl/errors.hpp"

namespace shl {

std::vector<double> DensePropagator::apply(std::span<const double> W) const {
  if (static_cast<int>(W.size()) != size_) throw DomainError("propagator size mismatch");
  std::vector<double> out(offset_);
  for (int i = 0; i < size_; ++i) {
    for (int j = 0; j < size_; ++j) out[i] += matrix_[i * size_ + j] * W[j];
  }
  return out;
}

RadialField DensePropagator::apply(const RadialField& field) const {
  RadialField out = field;
  out.W = apply(std::span<const double>(field.W));
  out.t = field.t + t_;
  return out;
}

DensePropagator dense_oracle(const RadialOperator& op, double t) {
  const int M = op.size();
  if (M > 128) throw DomainError("dense oracle is limited to 128 nodes");
  if (!(t >= 0.0)) throw DomainError("dense oracle requires t >= 0");
  const int K = op.right_pinned() ? M - 1 : M;  // free nodes

  const auto lower = op.lower();
  const auto diag = op.diag();
  const auto upper = op.upper();
  const auto mass = op.mass();

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(K, K);
  Eigen::VectorXd root(K);
  for (int i = 0; i < K; ++i) root(i) = std::sqrt(mass[i]);
  for (int i = 0; i < K; ++i) {
    S(i, i) = diag[i];
    if (i > 0) S(i, i - 1) = lower[i] * root(i) / root(i - 1);
    if (i + 1 < K) S(i, i + 1) = upper[i] * root(i) / root(i + 1);
  }
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  const double scale = S.cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw EigenError("symmetrized operator residual " + std::to_string(asym / scale));
  }
  const Eigen::MatrixXd Ssym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Ssym);
  if (eig.info() != Eigen::Success) throw EigenError("eigendecomposition failed");
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const Eigen::MatrixXd& Q = eig.eigenvectors();

  Eigen::VectorXd expo(K), phi1(K);
  for (int k = 0; k < K; ++k) {
    const double x = lam(k) * t;
    expo(k) = std::exp(x);
    // (e^{lam t} - 1) / lam, finite at lam = 0.
    phi1(k) = std::abs(x) < 1e-8 ? t * (1.0 + 0.5 * x) : std::expm1(x) / lam(k);
  }
  const Eigen::MatrixXd Dinv = root.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd Dsq = root.asDiagonal();
  const Eigen::MatrixXd E = Dinv * Q * expo.asDiagonal() * Q.transpose() * Dsq;
  const Eigen::MatrixXd F = Dinv * Q * phi1.asDiagonal() * Q.transpose() * Dsq;

  // Forcing on the free nodes: affine part plus coupling to the pinned node.
  Eigen::VectorXd aff(K);
  for (int i = 0; i < K; ++i) aff(i) = op.affine()[i];
  Eigen::VectorXd couple = Eigen::VectorXd::Zero(K);
  if (K < M) couple(K - 1) = upper[K - 1];

  std::vector<double> P(static_cast<std::size_t>(M) * M, 0.0);
  std::vector<double> offset(M, 0.0);
  const Eigen::VectorXd f_aff = F * aff;
  const Eigen::VectorXd f_pin = F * couple;
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) P[i * M + j] = E(i, j);
    if (K < M) P[i * M + K] = f_pin(i);
    offset[i] = f_aff(i);
  }
  if (K < M) P[static_cast<std::size_t>(K) * M + K] = 1.0;
  return DensePropagator(M, t, std::move(P), std::move(offset));
}

DensePropagator dense_oracle(const LogGrid& grid, const ExponentSet& exps, double t,
                             BoundaryConditions bc) {
  return dense_oracle(assemble_operator(grid, exps, bc), t);
}

}  // namespace shl
