#include "shl/radial_pde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shl/errors.hpp"

namespace shl {

void LogGrid::validate() const {
  if (!(s_min < s_max) || !std::isfinite(s_min) || !std::isfinite(s_max)) {
    throw DomainError("log grid requires finite s_min < s_max");
  }
  if (points < 16) throw DomainError("log grid requires at least 16 points");
}

double LogGrid::r(int i) const { return std::exp(s(i)); }
double LogGrid::r_min() const { return std::exp(s_min); }
double LogGrid::r_max() const { return std::exp(s_max); }

double RadialField::w(int i) const { return std::exp(-sigma * grid.s(i)) * W[i]; }

std::vector<double> RadialField::w_values() const {
  std::vector<double> out(W.size());
  for (int i = 0; i < size(); ++i) out[i] = w(i);
  return out;
}

double RadialField::max_abs() const {
  double m = 0.0;
  for (double v : W) m = std::max(m, std::abs(v));
  return m;
}

RadialField RadialField::from_w(const LogGrid& grid, double sigma, double t,
                                const std::function<double(double)>& w_of_r) {
  grid.validate();
  RadialField f{grid, std::vector<double>(grid.points), sigma, t};
  for (int i = 0; i < grid.points; ++i) {
    f.W[i] = std::exp(sigma * grid.s(i)) * w_of_r(grid.r(i));
  }
  return f;
}

RadialOperator::RadialOperator(const LogGrid& grid, int n, double sigma, BoundaryConditions bc)
    : grid_(grid), n_(n), sigma_(sigma), bc_(bc) {
  grid_.validate();
  if (!std::isfinite(sigma)) throw AdmissibilityError("weight exponent sigma is not real");
  const int M = grid_.points;
  const double h = grid_.h();
  const double d = drift();
  const double weight_exp = n_ - 2.0 * sigma_;
  const double up = std::exp(0.5 * d * h);
  const double down = std::exp(-0.5 * d * h);

  lower_.assign(M, 0.0);
  diag_.assign(M, 0.0);
  upper_.assign(M, 0.0);
  affine_.assign(M, 0.0);
  mass_.assign(M, 0.0);

  for (int i = 0; i < M; ++i) {
    const double s = grid_.s(i);
    const double c = std::exp(-2.0 * s) / (h * h);
    mass_[i] = std::exp(weight_exp * s) * h;
    if (i == 0) {
      // Half control volume; boundary flux a(s_0) (alpha W_0 - beta).
      mass_[i] *= 0.5;
      upper_[i] = 2.0 * c * up;
      diag_[i] = -upper_[i] - 2.0 * bc_.left_alpha * std::exp(-2.0 * s) / h;
      affine_[i] = 2.0 * bc_.left_beta * std::exp(-2.0 * s) / h;
    } else if (i == M - 1) {
      mass_[i] *= 0.5;
      if (!right_pinned()) {
        lower_[i] = 2.0 * c * down;
        diag_[i] = -lower_[i];
      }
    } else {
      lower_[i] = c * down;
      upper_[i] = c * up;
      diag_[i] = -(lower_[i] + upper_[i]);
    }
  }
}

void RadialOperator::apply(std::span<const double> W, std::span<double> out) const {
  const int M = size();
  for (int i = 0; i < M; ++i) {
    double v = diag_[i] * W[i] + affine_[i];
    if (i > 0) v += lower_[i] * W[i - 1];
    if (i + 1 < M) v += upper_[i] * W[i + 1];
    out[i] = v;
  }
}

std::vector<double> RadialOperator::apply(std::span<const double> W) const {
  std::vector<double> out(W.size());
  apply(W, out);
  return out;
}

RadialOperator assemble_operator(const LogGrid& grid, const ExponentSet& exps,
                                 BoundaryConditions bc) {
  if (hardy_admissible(exps.params) == HardyBranch::inadmissible) {
    throw AdmissibilityError("operator requires a Hardy-admissible (n, p)");
  }
  return RadialOperator(grid, exps.n(), exps.sigma, bc);
}

void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t M = diag.size();
  for (std::size_t i = 1; i < M; ++i) {
    if (diag[i - 1] == 0.0 || !std::isfinite(diag[i - 1])) {
      throw SolveError("zero or non-finite pivot in tridiagonal solve at row " +
                       std::to_string(i - 1));
    }
    const double f = lower[i] / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  if (diag[M - 1] == 0.0 || !std::isfinite(diag[M - 1])) {
    throw SolveError("zero or non-finite pivot in tridiagonal solve");
  }
  rhs[M - 1] /= diag[M - 1];
  for (std::size_t i = M - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

namespace {

struct StepWorkspace {
  std::vector<double> sub, main, sup, rhs, applied, value, jac;

  explicit StepWorkspace(int M)
      : sub(M), main(M), sup(M), rhs(M), applied(M), value(M), jac(M) {}
};

void step_in_place(RadialField& field, const RadialOperator& op, const Reaction& reaction,
                   double dt, double theta, StepWorkspace& ws) {
  const int M = op.size();
  if (!(dt > 0.0)) throw SolveError("time step must be positive");
  std::fill(ws.value.begin(), ws.value.end(), 0.0);
  std::fill(ws.jac.begin(), ws.jac.end(), 0.0);
  if (reaction) reaction(field.W, field.t, ws.value, ws.jac);

  const auto lower = op.lower();
  const auto diag = op.diag();
  const auto upper = op.upper();
  const auto affine = op.affine();
  for (int i = 0; i < M; ++i) {
    double aw = diag[i] * field.W[i];
    if (i > 0) aw += lower[i] * field.W[i - 1];
    if (i + 1 < M) aw += upper[i] * field.W[i + 1];
    ws.applied[i] = aw;
  }
  const int last = op.right_pinned() ? M - 1 : M;
  for (int i = 0; i < last; ++i) {
    ws.sub[i] = -theta * dt * lower[i];
    ws.sup[i] = -theta * dt * upper[i];
    ws.main[i] = 1.0 - theta * dt * diag[i] - dt * ws.jac[i];
    ws.rhs[i] = field.W[i] + dt * ((1.0 - theta) * ws.applied[i] + affine[i] + ws.value[i] -
                                   ws.jac[i] * field.W[i]);
  }
  if (op.right_pinned()) {
    ws.sub[M - 1] = 0.0;
    ws.sup[M - 1] = 0.0;
    ws.main[M - 1] = 1.0;
    ws.rhs[M - 1] = field.W[M - 1];
  }
  solve_tridiagonal(ws.sub, ws.main, ws.sup, ws.rhs);
  field.W.swap(ws.rhs);
  field.t += dt;
}

}  // namespace

RadialField step_implicit(const RadialField& field, const RadialOperator& op,
                          const Reaction& reaction, double dt, double theta) {
  if (field.size() != op.size()) throw DomainError("field and operator sizes differ");
  if (!(theta >= 0.5 && theta <= 1.0)) throw DomainError("theta must lie in [0.5, 1]");
  RadialField out = field;
  StepWorkspace ws(op.size());
  step_in_place(out, op, reaction, dt, theta, ws);
  return out;
}

void EvolutionConfig::validate() const {
  if (!(t0 >= 0.0) || !(t1 > t0)) throw DomainError("evolution requires 0 <= t0 < t1");
  if (!(dt0 > 0.0)) throw DomainError("evolution requires dt0 > 0");
  if (!(growth >= 1.0 && growth <= 1.1)) throw DomainError("growth must lie in [1, 1.1]");
  if (!(theta >= 0.5 && theta <= 1.0)) throw DomainError("theta must lie in [0.5, 1]");
  if (!(dt_max > 0.0)) throw DomainError("dt_max must be positive");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    const double ts = snapshot_times[i];
    if (ts < t0 || ts > t1) throw DomainError("snapshot time outside [t0, t1]");
    if (i > 0 && !(ts > snapshot_times[i - 1])) {
      throw DomainError("snapshot times must be strictly increasing");
    }
  }
}

const RadialField& Trajectory::at(double t) const {
  for (const auto& snap : snapshots) {
    if (std::abs(snap.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return snap;
  }
  throw RangeError("no snapshot at t = " + std::to_string(t));
}

Trajectory evolve(RadialField field, const RadialOperator& op, const Reaction& reaction,
                  const EvolutionConfig& config, const StepObserver& observer) {
  config.validate();
  if (field.size() != op.size()) throw DomainError("field and operator sizes differ");
  field.t = config.t0;

  Trajectory traj;
  StepWorkspace ws(op.size());
  std::size_t next_snap = 0;
  auto take_snapshots = [&] {
    while (next_snap < config.snapshot_times.size() &&
           std::abs(config.snapshot_times[next_snap] - field.t) <=
               1e-12 * std::max(1.0, field.t)) {
      traj.snapshots.push_back(field);
      traj.snapshots.back().t = config.snapshot_times[next_snap];
      ++next_snap;
    }
  };
  take_snapshots();

  double scheduled = config.dt0;
  while (field.t < config.t1 * (1.0 - 1e-15)) {
    double target = config.t1;
    if (next_snap < config.snapshot_times.size()) {
      target = std::min(target, config.snapshot_times[next_snap]);
    }
    double dt = std::min(scheduled, config.dt_max);
    bool lands = false;
    if (field.t + dt >= target * (1.0 - 1e-13)) {
      dt = target - field.t;
      lands = true;
    }
    step_in_place(field, op, reaction, dt, config.theta, ws);
    if (lands) field.t = target;
    scheduled *= config.growth;

    StepDiagnostic diag{field.t, dt, 0.0, true};
    for (double v : field.W) {
      if (!std::isfinite(v)) {
        throw NonFiniteError("non-finite value in field at t = " + std::to_string(field.t));
      }
      diag.max_norm = std::max(diag.max_norm, std::abs(v));
      if (v < 0.0) diag.nonnegative = false;
    }
    traj.steps.push_back(diag);
    if (observer) observer(field);
    take_snapshots();
  }
  return traj;
}

SolverConfig SolverConfig::extended_to(double r_max) const {
  SolverConfig out = *this;
  const double s_max = std::log(r_max);
  if (s_max <= grid.s_max) return out;
  const int extra = static_cast<int>(std::ceil((s_max - grid.s_max) / grid.h()));
  out.grid.points = grid.points + extra;
  out.grid.s_max = grid.s_max + extra * grid.h();
  return out;
}

std::vector<double> log_spaced_times(double t_lo, double t_hi, int per_decade) {
  if (!(t_lo > 0.0 && t_hi > t_lo) || per_decade < 1) {
    throw DomainError("log_spaced_times requires 0 < t_lo < t_hi and per_decade >= 1");
  }
  const double decades = std::log10(t_hi / t_lo);
  const int count = std::max(1, static_cast<int>(std::lround(decades * per_decade)));
  std::vector<double> out(count + 1);
  for (int i = 0; i <= count; ++i) {
    out[i] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / count);
  }
  out.front() = t_lo;
  out.back() = t_hi;
  return out;
}

}  // namespace shl
