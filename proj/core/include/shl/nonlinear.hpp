#pragma once

#include <string_view>
#include <vector>

#include "shl/exponents.hpp"
#include "shl/radial_pde.hpp"
#include "shl/steady_states.hpp"

namespace shl {

enum class DataKind { power_tail, sigma_tail, annulus, psi_k_gap };

std::string_view to_string(DataKind kind);
/// Accepts "power-tail", "sigma-tail", "annulus", "psi-k" (or underscores).
DataKind parse_data_kind(std::string_view text);

/// Initial gap w0 = v_inf - u0 (or psi_k - u0 for psi_k_gap).
struct InitialDataSpec {
  DataKind kind = DataKind::power_tail;
  double b = 0.0;
  double ell = 5.0;
  double r_lo = 1.0;
  double r_hi = 2.0;
  double k = 1.0;

  static InitialDataSpec power_tail(double b, double ell);
  static InitialDataSpec sigma_tail(double b);
  static InitialDataSpec annulus(double b, double r_lo, double r_hi);
  /// Deficit b * bump on [r_lo, r_hi] below psi_k.
  static InitialDataSpec psi_k_gap(double k, double b, double r_lo, double r_hi);

  /// Throws DomainError when the spec violates its invariants (b in [0, L],
  /// ell in (m, n - sigma), 0 < r_lo < r_hi, k > 0).
  void validate(const ExponentSet& exps) const;

  /// w0(r). For psi_k_gap this is the deficit below psi_k.
  [[nodiscard]] double operator()(double r, const ExponentSet& exps) const;
};

/// C-infinity bump exp(1 - 1/(1 - xi^2)) on (r_lo, r_hi), peak 1 at the midpoint.
double smooth_bump(double r, double r_lo, double r_hi);

/// (base - w)^p - base^p + p base^{p-1} w, evaluated without cancellation for
/// w << base. Valid for any w >= 0; the derivative is returned in slope.
double convexity_defect(double w, double base, double p, double* slope = nullptr);

/// N(w) = (v_inf - w)^p - v_inf^p + p v_inf^{p-1} w. Throws DomainError for
/// w outside [0, v_inf(r)] beyond 1e-10 relative.
double nonlinear_defect(double w_value, double r, const ExponentSet& exps);

/// Operator of the w-flow: left boundary encodes u_r(0) = 0, i.e.
/// W_s = sigma W - m V_inf.
RadialOperator nonlinear_operator(const LogGrid& grid, const ExponentSet& exps);

/// Reaction -e^{sigma s} N(e^{-sigma s} W) with node scale factors that make
/// W = r^sigma v_inf an exact discrete steady state of the w-flow.
Reaction nonlinear_reaction(const RadialOperator& op, const ExponentSet& exps);

/// Samples w0 of the spec on the grid at t = 0 (the deficit for psi_k_gap).
RadialField sample_initial(const InitialDataSpec& spec, const ExponentSet& exps,
                           const LogGrid& grid);

/// Nonlinear w-flow. Every step is checked against 0 <= w <= v_inf with
/// comparison_tol relative slack; ComparisonViolation otherwise. The first
/// step is capped at 0.1 r_min^2. Zero data is the steady state v_inf and is
/// returned unchanged.
Trajectory evolve_nonlinear(const InitialDataSpec& spec, const ExponentSet& exps,
                            const SolverConfig& solver, double comparison_tol = 1e-8);

/// Linear flow e^{-tH} w0 with the default boundary data, same snapshots.
Trajectory evolve_linear(const RadialField& w0, const ExponentSet& exps, const SolverConfig& solver);

struct ComparisonResult {
  double max_violation = 0.0;     ///< max over snapshots/nodes of w_nonlinear - w_linear
  double max_w0 = 0.0;
  std::vector<double> times;
  std::vector<double> violation;  ///< per snapshot
  std::vector<double> min_gap;    ///< per snapshot, min of w_linear - w_nonlinear
};

ComparisonResult compare_snapshots(const Trajectory& nonlinear, const Trajectory& linear,
                                   double max_w0);

ComparisonResult comparison_monitor(const InitialDataSpec& spec, const ExponentSet& exps,
                                    const SolverConfig& solver);

struct PsiKTrajectory {
  Trajectory v;       ///< v = psi_k - u
  Trajectory linear;  ///< e^{-tH} v(0)
  double max_excess = 0.0;  ///< max over snapshots of v - e^{-tH} v(0), node-wise
  double min_value = 0.0;   ///< min over snapshots of v
};

/// Evolves v = psi_k - u. Requires p > p_JL and a psi_k_gap spec whose
/// deficit stays below psi_k. psi1 must cover k^{(p-1)/2} r_max.
PsiKTrajectory evolve_near_psik(const InitialDataSpec& spec, const ExponentSet& exps,
                                const RadialProfile& psi1, const SolverConfig& solver,
                                double comparison_tol = 1e-8);

}  // namespace shl
