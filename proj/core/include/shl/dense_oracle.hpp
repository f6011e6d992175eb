#pragma once

#include <span>
#include <vector>

#include "shl/exponents.hpp"
#include "shl/radial_pde.hpp"

namespace shl {

/// Exact propagator of dW/dt = A W + affine on a small grid:
/// W(t) = P W(0) + offset. A pinned right node is carried unchanged.
class DensePropagator {
 public:
  DensePropagator(int size, double t, std::vector<double> matrix, std::vector<double> offset)
      : size_(size), t_(t), matrix_(std::move(matrix)), offset_(std::move(offset)) {}

  [[nodiscard]] int size() const { return size_; }
  [[nodiscard]] double t() const { return t_; }
  /// Row-major size x size.
  [[nodiscard]] std::span<const double> matrix() const { return matrix_; }
  [[nodiscard]] std::span<const double> offset() const { return offset_; }

  [[nodiscard]] std::vector<double> apply(std::span<const double> W) const;
  [[nodiscard]] RadialField apply(const RadialField& field) const;

 private:
  int size_;
  double t_;
  std::vector<double> matrix_;
  std::vector<double> offset_;
};

/// Diagonalizes D^{1/2} A D^{-1/2} (D = operator mass) and exponentiates.
/// Throws DomainError above 128 nodes and EigenError when the symmetrized
/// matrix is asymmetric beyond 1e-10 relative.
DensePropagator dense_oracle(const RadialOperator& op, double t);

DensePropagator dense_oracle(const LogGrid& grid, const ExponentSet& exps, double t,
                             BoundaryConditions bc = {});

}  // namespace shl
