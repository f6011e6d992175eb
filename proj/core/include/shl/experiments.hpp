#pragma once

#include <utility>

#include "shl/config.hpp"
#include "shl/nonlinear.hpp"
#include "shl/report.hpp"

namespace shl {

/// sup_{r <= sqrt t} r^sigma w(r) over nodes. Throws EmptyRegionError when
/// sqrt(t) lies outside the grid.
double inner_weighted_sup(const RadialField& w, double t);
/// sup_{r >= sqrt t} w(r) over nodes. Same error contract.
double outer_sup(const RadialField& w, double t);

/// Snapshot times of an experiment: per_decade log-spaced samples on
/// [window_lo, t1], and the grid widened to s_max >= ln(20 sqrt(t1)).
SolverConfig experiment_solver(const ExperimentConfig& config, double window_lo, double t1);

/// Linear weighted decay of e^{-tH} w0 for power-tail data against -ell/2
/// (default tolerance 10%).
Report run_linear_decay(ExperimentConfig config);

/// Nonlinear power-tail run: inner series against -(ell - sigma)/2 and outer
/// series against -ell/2 (default tolerance 15%). For ell <= sigma the inner
/// report instead requires slope >= -0.05. Both carry the comparison check
/// w_nonlinear <= w_linear up to 1e-6 max w0.
std::pair<Report, Report> run_theorem_half_l(ExperimentConfig config);

/// Sigma-tail run (or power tail with ell = sigma when kind = power-tail):
/// inner weighted sup and t^{sigma/2} outer sup must both decrease with
/// final/initial <= 0.2. Power-tail data report Inconclusive on failure.
Report run_theorem_mth2(ExperimentConfig config);

/// Small-b growth of ||u(t)||_inf on [1e2, 1e6]: strictly increasing, slope
/// in [0, 2 theory]; lower bound u >= v_inf - w_linear; argmax of
/// v_inf - w_linear against the envelope exponent (20%). ell = sigma switches
/// to the final >= 2 initial rule.
Report run_corollary_small_b(ExperimentConfig config);

/// ||w(t)||_2 for annulus data against -(n - 2 sigma)/4 (15%), with the
/// two-term bound constant reported as metrics.
Report run_l2_stability(ExperimentConfig config);

/// ||psi_k - u(t)||_2 for an annulus deficit below psi_k: slope against
/// -(n - 2 sigma)/4 and snapshot-wise non-increase.
Report run_psik_stability(ExperimentConfig config);

/// Kernel bound sweep over c in {1, 2, 4} and t in {0.1, 1, 10, 100}, plus the
/// near-origin slope check (5% of sigma).
Report run_kernel_check(ExperimentConfig config);

/// smoothing_ratio(q = 2, r = 1) over t in {1, 10, 100, 1000} for annulus data;
/// max/min must stay below 3.
Report run_smoothing_check(ExperimentConfig config);

/// Stepper against the dense propagator on a 64-node grid at t = 1.
Report run_oracle_check(ExperimentConfig config);

}  // namespace shl
