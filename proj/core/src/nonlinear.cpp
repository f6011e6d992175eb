#include "shl/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "shl/errors.hpp"

namespace shl {

namespace {

// sum_{k>=2} binom(p, k) (-x)^k, i.e. (1 - x)^p - 1 + p x for small |x|.
double binomial_tail(double x, double p) {
  double coeff = p;
  double power = -x;
  double sum = 0.0;
  for (int k = 2; k < 40; ++k) {
    coeff *= (p - k + 1.0) / k;
    power *= -x;
    const double term = coeff * power;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

std::vector<double> v_inf_nodes(const LogGrid& grid, const ExponentSet& exps) {
  std::vector<double> v(grid.points);
  for (int i = 0; i < grid.points; ++i) v[i] = exps.L * std::exp(-exps.m * grid.s(i));
  return v;
}

void check_order(const RadialField& f, const std::vector<double>& upper, double tol,
                 const char* what) {
  for (int i = 0; i < f.size(); ++i) {
    const double w = f.w(i);
    if (w < -tol * upper[i] || w > upper[i] * (1.0 + tol)) {
      throw ComparisonViolation(std::string(what) + " left [0, upper] at r = " +
                                std::to_string(f.grid.r(i)) + ", t = " + std::to_string(f.t) +
                                " (value " + std::to_string(w) + ", upper " +
                                std::to_string(upper[i]) + ")");
    }
  }
}

double max_value(const RadialField& f) {
  double out = 0.0;
  for (int i = 0; i < f.size(); ++i) out = std::max(out, f.w(i));
  return out;
}

}  // namespace

std::string_view to_string(DataKind kind) {
  switch (kind) {
    case DataKind::power_tail: return "power-tail";
    case DataKind::sigma_tail: return "sigma-tail";
    case DataKind::annulus: return "annulus";
    case DataKind::psi_k_gap: return "psi-k";
  }
  return "unknown";
}

DataKind parse_data_kind(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "power-tail") return DataKind::power_tail;
  if (s == "sigma-tail") return DataKind::sigma_tail;
  if (s == "annulus") return DataKind::annulus;
  if (s == "psi-k" || s == "psi-k-gap") return DataKind::psi_k_gap;
  throw ConfigError("unknown data kind '" + s + "'");
}

InitialDataSpec InitialDataSpec::power_tail(double b, double ell) {
  InitialDataSpec s;
  s.kind = DataKind::power_tail;
  s.b = b;
  s.ell = ell;
  return s;
}

InitialDataSpec InitialDataSpec::sigma_tail(double b) {
  InitialDataSpec s;
  s.kind = DataKind::sigma_tail;
  s.b = b;
  return s;
}

InitialDataSpec InitialDataSpec::annulus(double b, double r_lo, double r_hi) {
  InitialDataSpec s;
  s.kind = DataKind::annulus;
  s.b = b;
  s.r_lo = r_lo;
  s.r_hi = r_hi;
  return s;
}

InitialDataSpec InitialDataSpec::psi_k_gap(double k, double b, double r_lo, double r_hi) {
  InitialDataSpec s = annulus(b, r_lo, r_hi);
  s.kind = DataKind::psi_k_gap;
  s.k = k;
  return s;
}

void InitialDataSpec::validate(const ExponentSet& exps) const {
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("amplitude b must be >= 0");
  switch (kind) {
    case DataKind::power_tail:
      if (b > exps.L) throw DomainError("b must not exceed L so that u0 >= 0");
      if (!(ell > exps.m && ell < exps.n() - exps.sigma)) {
        throw DomainError("ell = " + std::to_string(ell) + " outside (2/(p-1), n - sigma) = (" +
                          std::to_string(exps.m) + ", " + std::to_string(exps.n() - exps.sigma) +
                          ")");
      }
      break;
    case DataKind::sigma_tail:
      if (b > exps.L) throw DomainError("b must not exceed L so that u0 >= 0");
      break;
    case DataKind::annulus:
    case DataKind::psi_k_gap:
      if (!(r_lo > 0.0 && r_hi > r_lo)) throw DomainError("annulus requires 0 < r_lo < r_hi");
      if (kind == DataKind::annulus && b > exps.L * std::pow(r_hi, -exps.m)) {
        throw DomainError("annulus amplitude exceeds v_inf(r_hi)");
      }
      if (kind == DataKind::psi_k_gap && !(k > 0.0)) throw DomainError("psi_k requires k > 0");
      break;
  }
}

double InitialDataSpec::operator()(double r, const ExponentSet& exps) const {
  switch (kind) {
    case DataKind::power_tail:
      return r <= 1.0 ? b * std::pow(r, -exps.m) : b * std::pow(r, -ell);
    case DataKind::sigma_tail:
      return b * std::min(std::pow(r, -exps.m),
                          std::pow(r, -exps.sigma) / std::log(std::numbers::e + r));
    case DataKind::annulus:
    case DataKind::psi_k_gap:
      return b * smooth_bump(r, r_lo, r_hi);
  }
  return 0.0;
}

double smooth_bump(double r, double r_lo, double r_hi) {
  if (r <= r_lo || r >= r_hi) return 0.0;
  const double xi = (2.0 * r - r_lo - r_hi) / (r_hi - r_lo);
  return std::exp(1.0 - 1.0 / (1.0 - xi * xi));
}

double convexity_defect(double w, double base, double p, double* slope) {
  const double x = w / base;
  double g;
  if (std::abs(x) < 0.1) {
    g = binomial_tail(x, p);
  } else if (x < 1.0) {
    g = std::pow(1.0 - x, p) - 1.0 + p * x;
  } else {
    g = p * x - 1.0;  // u = base - w clipped at 0
  }
  if (slope) {
    const double lin = p * std::pow(base, p - 1.0);
    *slope = x < 1.0 ? -lin * std::expm1((p - 1.0) * std::log1p(-x)) : lin;
  }
  return std::pow(base, p) * g;
}

double nonlinear_defect(double w_value, double r, const ExponentSet& exps) {
  const double v = v_infinity(r, exps.params);
  if (w_value < -1e-10 * v || w_value > v * (1.0 + 1e-10)) {
    throw DomainError("w = " + std::to_string(w_value) + " outside [0, v_inf(r)] at r = " +
                      std::to_string(r));
  }
  return convexity_defect(std::clamp(w_value, 0.0, v), v, exps.p());
}

RadialOperator nonlinear_operator(const LogGrid& grid, const ExponentSet& exps) {
  if (hardy_admissible(exps.params) == HardyBranch::inadmissible) {
    throw AdmissibilityError("operator requires a Hardy-admissible (n, p)");
  }
  const double V0 = exps.L * std::exp((exps.sigma - exps.m) * grid.s_min);
  return RadialOperator(grid, exps.n(), exps.sigma,
                        {exps.sigma, exps.m * V0, BoundaryConditions::Right::dirichlet});
}

Reaction nonlinear_reaction(const RadialOperator& op, const ExponentSet& exps) {
  const LogGrid& grid = op.grid();
  const int M = grid.points;
  const double p = exps.p();
  const double sigma = exps.sigma;
  std::vector<double> v = v_inf_nodes(grid, exps);
  std::vector<double> lift(M), V(M), scale(M, 1.0);
  for (int i = 0; i < M; ++i) {
    lift[i] = std::exp(sigma * grid.s(i));
    V[i] = lift[i] * v[i];
  }
  // Balance the discrete diffusion of V against the reaction at w = v_inf.
  const std::vector<double> AV = op.apply(V);
  const int last = op.right_pinned() ? M - 1 : M;
  for (int i = 0; i < last; ++i) {
    scale[i] = AV[i] / (lift[i] * (p - 1.0) * std::pow(v[i], p));
  }
  return [p, v = std::move(v), lift = std::move(lift), scale = std::move(scale)](
             std::span<const double> W, double, std::span<double> value,
             std::span<double> jacobian) {
    for (std::size_t i = 0; i < W.size(); ++i) {
      double slope = 0.0;
      const double N = convexity_defect(W[i] / lift[i], v[i], p, &slope);
      value[i] = -scale[i] * lift[i] * N;
      jacobian[i] = -scale[i] * slope;
    }
  };
}

RadialField sample_initial(const InitialDataSpec& spec, const ExponentSet& exps,
                           const LogGrid& grid) {
  spec.validate(exps);
  return RadialField::from_w(grid, exps.sigma, 0.0, [&](double r) { return spec(r, exps); });
}

Trajectory evolve_nonlinear(const InitialDataSpec& spec, const ExponentSet& exps,
                            const SolverConfig& solver, double comparison_tol) {
  if (hardy_admissible(exps.params) != HardyBranch::JL_branch) {
    throw AdmissibilityError("the nonlinear flow requires p >= p_JL");
  }
  const RadialField w0 = sample_initial(spec, exps, solver.grid);
  const RadialOperator op = nonlinear_operator(solver.grid, exps);
  const Reaction reaction = nonlinear_reaction(op, exps);
  const std::vector<double> v = v_inf_nodes(solver.grid, exps);
  check_order(w0, v, comparison_tol, "initial gap");
  // u = v_inf is the singular steady state; the left boundary row assumes a
  // regular u and would move it, so zero data is returned unchanged.
  if (std::all_of(w0.W.begin(), w0.W.end(), [](double W) { return W == 0.0; })) {
    Trajectory traj;
    for (double t : solver.time.snapshot_times) {
      traj.snapshots.push_back(w0);
      traj.snapshots.back().t = t;
    }
    return traj;
  }
  // Data that is not flat at the origin relaxes on the time scale r^2 there;
  // the linearly implicit step overshoots v_inf if dt exceeds it.
  EvolutionConfig time = solver.time;
  time.dt0 = std::min(time.dt0, 0.1 * solver.grid.r_min() * solver.grid.r_min());
  return evolve(w0, op, reaction, time,
                [&](const RadialField& f) { check_order(f, v, comparison_tol, "gap w"); });
}

Trajectory evolve_linear(const RadialField& w0, const ExponentSet& exps, const SolverConfig& solver) {
  return evolve(w0, assemble_operator(solver.grid, exps), {}, solver.time);
}

ComparisonResult compare_snapshots(const Trajectory& nonlinear, const Trajectory& linear,
                                   double max_w0) {
  if (nonlinear.snapshots.size() != linear.snapshots.size()) {
    throw DomainError("trajectories hold different snapshot counts");
  }
  ComparisonResult out;
  out.max_w0 = max_w0;
  for (std::size_t k = 0; k < nonlinear.snapshots.size(); ++k) {
    const RadialField& a = nonlinear.snapshots[k];
    const RadialField& b = linear.snapshots[k];
    double viol = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < a.size(); ++i) viol = std::max(viol, a.w(i) - b.w(i));
    out.times.push_back(a.t);
    out.violation.push_back(std::max(viol, 0.0));
    out.min_gap.push_back(-viol);
    out.max_violation = std::max(out.max_violation, viol);
  }
  return out;
}

ComparisonResult comparison_monitor(const InitialDataSpec& spec, const ExponentSet& exps,
                                    const SolverConfig& solver) {
  const RadialField w0 = sample_initial(spec, exps, solver.grid);
  const Trajectory nl = evolve_nonlinear(spec, exps, solver);
  const Trajectory lin = evolve_linear(w0, exps, solver);
  return compare_snapshots(nl, lin, max_value(w0));
}

PsiKTrajectory evolve_near_psik(const InitialDataSpec& spec, const ExponentSet& exps,
                                const RadialProfile& psi1, const SolverConfig& solver,
                                double comparison_tol) {
  if (spec.kind != DataKind::psi_k_gap) throw DomainError("evolve_near_psik needs psi_k_gap data");
  if (!(exps.p() > exps.p_JL)) throw DomainError("evolve_near_psik requires p > p_JL");
  const LogGrid& grid = solver.grid;
  const int M = grid.points;
  const double p = exps.p();
  const double sigma = exps.sigma;

  const RadialField v0 = sample_initial(spec, exps, grid);
  std::vector<double> psi(M), lift(M), potential(M);
  for (int i = 0; i < M; ++i) {
    psi[i] = psi_k(psi1, spec.k, grid.r(i));
    lift[i] = std::exp(sigma * grid.s(i));
    // p psi^{p-1} - lambda / r^2 <= 0 since psi_k < v_inf.
    potential[i] = p * std::pow(psi[i], p - 1.0) - exps.lambda * std::exp(-2.0 * grid.s(i));
  }
  check_order(v0, psi, 0.0, "initial deficit");

  const RadialOperator op(grid, exps.n(), sigma, {sigma, 0.0, BoundaryConditions::Right::dirichlet});
  Reaction reaction = [&](std::span<const double> W, double, std::span<double> value,
                          std::span<double> jacobian) {
    for (int i = 0; i < M; ++i) {
      double slope = 0.0;
      const double N = convexity_defect(W[i] / lift[i], psi[i], p, &slope);
      value[i] = potential[i] * W[i] - lift[i] * N;
      jacobian[i] = potential[i] - slope;
    }
  };

  PsiKTrajectory out;
  out.v = evolve(v0, op, reaction, solver.time,
                 [&](const RadialField& f) { check_order(f, psi, comparison_tol, "deficit v"); });
  out.linear = evolve_linear(v0, exps, solver);
  const ComparisonResult cmp = compare_snapshots(out.v, out.linear, max_value(v0));
  out.max_excess = cmp.max_violation;
  out.min_value = std::numeric_limits<double>::infinity();
  for (const auto& snap : out.v.snapshots) {
    for (int i = 0; i < snap.size(); ++i) out.min_value = std::min(out.min_value, snap.w(i));
  }
  if (out.max_excess > 1e-6 * cmp.max_w0) {
    throw ComparisonViolation("deficit exceeds the linear flow by " +
                              std::to_string(out.max_excess));
  }
  return out;
}

}  // namespace shl
