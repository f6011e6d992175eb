#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "shl/exponents.hpp"

namespace shl {

/// Uniform grid in s = ln r.
struct LogGrid {
  double s_min = 0.0;
  double s_max = 1.0;
  int points = 16;

  /// Throws DomainError unless s_min < s_max and points >= 16.
  void validate() const;
  [[nodiscard]] double h() const { return (s_max - s_min) / (points - 1); }
  [[nodiscard]] double s(int i) const { return s_min + i * h(); }
  [[nodiscard]] double r(int i) const;
  [[nodiscard]] double r_min() const;
  [[nodiscard]] double r_max() const;
};

/// Boundary data of the log-radial problem.
///
/// Left end: W_s = alpha W - beta. alpha = beta = 0 is homogeneous Neumann,
/// which selects the r^{-sigma} profile of the linear flow. alpha = sigma
/// encodes a regular (flat) unknown w at the origin.
/// Right end: Dirichlet pinned to the initial value, or homogeneous Neumann.
struct BoundaryConditions {
  enum class Right { dirichlet, neumann };

  double left_alpha = 0.0;
  double left_beta = 0.0;
  Right right = Right::dirichlet;

  static BoundaryConditions neumann_both() { return {0.0, 0.0, Right::neumann}; }
};

/// Regularized unknown W(s) = r^sigma w(r) on a log grid.
struct RadialField {
  LogGrid grid;
  std::vector<double> W;
  double sigma = 0.0;
  double t = 0.0;

  [[nodiscard]] int size() const { return static_cast<int>(W.size()); }
  /// Unscaled value w(r_i) = e^{-sigma s_i} W_i.
  [[nodiscard]] double w(int i) const;
  [[nodiscard]] std::vector<double> w_values() const;
  [[nodiscard]] double max_abs() const;

  /// Samples a w-profile onto the grid.
  static RadialField from_w(const LogGrid& grid, double sigma, double t,
                            const std::function<double(double)>& w_of_r);
};

/// Tridiagonal flux-form discretization of
///   L W = e^{-2s} (W_ss + (n - 2 - 2 sigma) W_s)
///       = e^{-(n - 2 sigma) s} (e^{(n - 2 - 2 sigma) s} W_s)_s,
/// which is the operator Δ + lambda |x|^{-2} acting on w = e^{-sigma s} W once
/// sigma (n - 2 - sigma) = lambda. Row i reads
///   (A W)_i = lower_i W_{i-1} + diag_i W_i + upper_i W_{i+1} + affine_i.
/// A is self-adjoint in the inner product sum_i mass_i f_i g_i.
class RadialOperator {
 public:
  RadialOperator(const LogGrid& grid, int n, double sigma, BoundaryConditions bc);

  [[nodiscard]] const LogGrid& grid() const { return grid_; }
  [[nodiscard]] int size() const { return grid_.points; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] double sigma() const { return sigma_; }
  [[nodiscard]] double drift() const { return n_ - 2.0 - 2.0 * sigma_; }
  [[nodiscard]] const BoundaryConditions& boundary() const { return bc_; }
  [[nodiscard]] bool right_pinned() const {
    return bc_.right == BoundaryConditions::Right::dirichlet;
  }

  [[nodiscard]] std::span<const double> lower() const { return lower_; }
  [[nodiscard]] std::span<const double> diag() const { return diag_; }
  [[nodiscard]] std::span<const double> upper() const { return upper_; }
  [[nodiscard]] std::span<const double> affine() const { return affine_; }
  /// Control-volume weights e^{(n - 2 sigma) s_i} h (halved at boundary nodes).
  [[nodiscard]] std::span<const double> mass() const { return mass_; }

  /// out = A W + affine.
  void apply(std::span<const double> W, std::span<double> out) const;
  [[nodiscard]] std::vector<double> apply(std::span<const double> W) const;

 private:
  LogGrid grid_;
  int n_;
  double sigma_;
  BoundaryConditions bc_;
  std::vector<double> lower_, diag_, upper_, affine_, mass_;
};

/// Throws AdmissibilityError for inadmissible (n, p) (sigma not real).
RadialOperator assemble_operator(const LogGrid& grid, const ExponentSet& exps,
                                 BoundaryConditions bc = {});

/// Node-wise reaction term and its diagonal Jacobian with respect to W,
/// evaluated at the previous iterate. The Jacobian should be <= 0 so the
/// linearly implicit system stays an M-matrix.
using Reaction = std::function<void(std::span<const double> W, double t,
                                    std::span<double> value, std::span<double> jacobian)>;

/// Solves a tridiagonal system in place (Thomas algorithm). rhs is
/// overwritten by the solution. Throws SolveError on a zero pivot.
void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// One linearly implicit theta-step:
///   (I - theta dt A - dt J) W_new
///     = W_old + dt ((1 - theta) A W_old + affine + R(W_old) - J W_old).
RadialField step_implicit(const RadialField& field, const RadialOperator& op,
                          const Reaction& reaction, double dt, double theta = 1.0);

struct EvolutionConfig {
  double t0 = 0.0;
  double t1 = 1.0;
  double dt0 = 1e-4;
  double growth = 1.05;
  double theta = 1.0;
  double dt_max = std::numeric_limits<double>::infinity();
  std::vector<double> snapshot_times;

  void validate() const;
};

struct StepDiagnostic {
  double t = 0.0;
  double dt = 0.0;
  double max_norm = 0.0;
  bool nonnegative = true;
};

struct Trajectory {
  std::vector<RadialField> snapshots;
  std::vector<StepDiagnostic> steps;

  /// Snapshot whose time equals t (to 1e-12 relative); throws RangeError.
  [[nodiscard]] const RadialField& at(double t) const;
};

/// Grid plus time schedule of one evolution.
struct SolverConfig {
  LogGrid grid{std::log(1e-6), std::log(1e4), 2048};
  EvolutionConfig time;

  /// Copy whose grid reaches r_max with the node spacing unchanged.
  [[nodiscard]] SolverConfig extended_to(double r_max) const;
};

using StepObserver = std::function<void(const RadialField&)>;

/// Marches from config.t0 to config.t1 with the geometric step schedule
/// dt_k = dt0 growth^k, shortening steps to land on every snapshot time.
/// Throws NonFiniteError if a node becomes non-finite.
Trajectory evolve(RadialField field, const RadialOperator& op, const Reaction& reaction,
                  const EvolutionConfig& config, const StepObserver& observer = {});

/// Log-spaced times from t_lo to t_hi inclusive, per_decade samples per decade.
std::vector<double> log_spaced_times(double t_lo, double t_hi, int per_decade);

}  // namespace shl
