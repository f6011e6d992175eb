#include "shl/semigroup.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/statistics/linear_regression.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "shl/errors.hpp"

namespace shl {

namespace {

struct GaussRule {
  std::vector<double> x, w;  // on [-1, 1]
};

const GaussRule& gauss_rule(int nodes) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(nodes);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  for (double z : boost::math::legendre_p_zeros<double>(nodes)) {
    const double dp = boost::math::legendre_p_prime(nodes, z);
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.x.push_back(z);
    rule.w.push_back(weight);
    if (z != 0.0) {
      rule.x.push_back(-z);
      rule.w.push_back(weight);
    }
  }
  return cache.emplace(nodes, std::move(rule)).first->second;
}

// int_0^theta_c exp(kappa (cos - 1)) sin^{n-2} over int_0^pi sin^{n-2}.
double angular_mean(int n, double kappa, double theta_c, int nodes) {
  const GaussRule& rule = gauss_rule(nodes);
  const double half = 0.5 * theta_c;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double theta = half * (rule.x[i] + 1.0);
    sum += rule.w[i] * std::exp(-2.0 * kappa * std::pow(std::sin(0.5 * theta), 2)) *
           std::pow(std::sin(theta), n - 2);
  }
  const double norm = std::sqrt(std::numbers::pi) * boost::math::tgamma_ratio(0.5 * (n - 1), 0.5 * n);
  return half * sum / norm;
}

std::vector<RadialField> linear_snapshots(const RadialField& w0, const RadialOperator& op,
                                          std::span<const double> times, EvolutionConfig time) {
  if (times.empty()) return {};
  time.t0 = w0.t;
  time.t1 = times.back();
  time.snapshot_times.assign(times.begin(), times.end());
  return evolve(w0, op, {}, time).snapshots;
}

}  // namespace

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double weighted_norm(const RadialField& f, int n, const WeightedNormSpec& spec) {
  if (!(spec.t > 0.0)) throw DomainError("weighted norm requires t > 0");
  if (!(spec.q >= 1.0)) throw DomainError("weighted norm requires q >= 1");
  if (std::isinf(spec.q)) return weighted_sup(f, spec.t);

  const int M = f.size();
  const double h = f.grid.h();
  std::vector<double> integrand(M);
  double peak = 0.0;
  for (int i = 0; i < M; ++i) {
    const double r = f.grid.r(i);
    const double weight = phi(r, spec.t, f.sigma);
    // |w phi^{-1}|^q phi^2 = |w|^q phi^{2-q}; exact for q = 2.
    integrand[i] = std::pow(std::abs(f.w(i)), spec.q) * std::pow(weight, 2.0 - spec.q) *
                   std::exp(n * f.grid.s(i));
    if (!std::isfinite(integrand[i])) {
      throw NonFiniteError("weighted norm integrand is not finite at r = " + std::to_string(r));
    }
    peak = std::max(peak, integrand[i]);
  }
  if (peak == 0.0) return 0.0;
  if (std::max(integrand.front(), integrand.back()) > 1e-3 * peak) {
    throw NonFiniteError("weighted norm integrand does not decay at the grid ends");
  }
  double sum = 0.5 * (integrand.front() + integrand.back());
  for (int i = 1; i + 1 < M; ++i) sum += integrand[i];
  return std::pow(sphere_area(n) * sum * h, 1.0 / spec.q);
}

double weighted_sup(const RadialField& f, double t) {
  if (!(t > 0.0)) throw DomainError("weighted sup requires t > 0");
  double out = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    out = std::max(out, std::abs(f.w(i)) / phi(f.grid.r(i), t, f.sigma));
  }
  return out;
}

RadialField apply_semigroup(const RadialField& w0, const RadialOperator& op, double t,
                            EvolutionConfig time) {
  if (!(t > 0.0)) return w0;
  const double target = w0.t + t;
  return linear_snapshots(w0, op, std::span<const double>(&target, 1), std::move(time)).front();
}

std::vector<RadialField> semigroup_snapshots(const RadialField& w0, const RadialOperator& op,
                                             std::span<const double> times, EvolutionConfig time) {
  return linear_snapshots(w0, op, times, std::move(time));
}

Series decay_series_linear(const RadialField& w0, const RadialOperator& op,
                           std::span<const double> times, EvolutionConfig time) {
  Series out;
  for (const auto& snap : linear_snapshots(w0, op, times, std::move(time))) {
    out.push(snap.t, weighted_sup(snap, snap.t));
  }
  return out;
}

Series vanishing_series_linear(const RadialField& w0, const RadialOperator& op,
                               std::span<const double> times, EvolutionConfig time) {
  Series out;
  for (const auto& snap : linear_snapshots(w0, op, times, std::move(time))) {
    out.push(snap.t, std::pow(snap.t, 0.5 * snap.sigma) * weighted_sup(snap, snap.t));
  }
  return out;
}

std::optional<double> smoothing_ratio(const RadialField& w0, const RadialOperator& op, double t,
                                      double q, double r, EvolutionConfig time) {
  if (!(t > 0.0)) throw DomainError("smoothing ratio requires t > 0");
  if (!(r >= 1.0 && q >= r)) throw DomainError("smoothing ratio requires 1 <= r <= q");
  const RadialField evolved = apply_semigroup(w0, op, t, std::move(time));
  const double num = weighted_norm(evolved, op.n(), {q, t});
  const double den = weighted_norm(w0, op.n(), {r, t});
  if (den == 0.0) {
    if (num == 0.0) return std::nullopt;
    throw DivisionError("data norm vanishes while the evolved norm does not");
  }
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return num / (std::pow(t, -0.5 * op.n() * (1.0 / r - inv_q)) * den);
}

double spherical_exponential_mean(int n, double kappa, int nodes) {
  if (n < 2) throw DomainError("spherical mean requires n >= 2");
  if (!(kappa >= 0.0)) throw DomainError("spherical mean requires kappa >= 0");
  // Beyond theta_c the integrand is below e^{-60} of its peak.
  const double pi = std::numbers::pi;
  const double theta_c =
      kappa > 0.0
          ? std::min(pi, pi * std::sqrt((60.0 + 0.5 * (n - 1) * std::log1p(kappa)) / (2.0 * kappa)))
          : pi;
  double coarse = angular_mean(n, kappa, theta_c, nodes);
  for (int k = 2 * nodes; k <= 1024; k *= 2) {
    const double fine = angular_mean(n, kappa, theta_c, k);
    if (std::abs(fine - coarse) <= 1e-8 * std::abs(fine)) return fine;
    coarse = fine;
  }
  throw QuadratureError("angular quadrature did not settle for kappa = " + std::to_string(kappa));
}

double radial_gaussian(int n, double r, double rho, double tau, int nodes) {
  if (!(tau > 0.0)) throw DomainError("radial gaussian requires tau > 0");
  const double kappa = r * rho / (2.0 * tau);
  return std::pow(4.0 * std::numbers::pi * tau, -0.5 * n) *
         std::exp(-(r - rho) * (r - rho) / (4.0 * tau)) * spherical_exponential_mean(n, kappa, nodes);
}

RadialField annular_bump(const LogGrid& grid, int n, double sigma, double rho) {
  grid.validate();
  const double h = grid.h();
  const int center = static_cast<int>(std::lround((std::log(rho) - grid.s_min) / h));
  if (center < 2 || center > grid.points - 3) {
    throw RangeError("bump radius " + std::to_string(rho) + " is outside the grid");
  }
  const double sc = grid.s(center);
  RadialField f{grid, std::vector<double>(grid.points, 0.0), sigma, 0.0};
  double mass = 0.0;
  for (int i = center - 2; i <= center + 2; ++i) {
    const double c = std::cos(0.25 * std::numbers::pi * (grid.s(i) - sc) / h);
    const double b = c * c;
    f.W[i] = b;
    mass += b * std::exp(n * grid.s(i)) * h;
  }
  const double scale = 1.0 / (sphere_area(n) * mass);
  for (int i = center - 2; i <= center + 2; ++i) f.W[i] *= scale * std::exp(sigma * grid.s(i));
  return f;
}

KernelCheckResult kernel_bound_check(double rho, std::span<const double> times,
                                     std::span<const double> c_values, const ExponentSet& exps,
                                     const SolverConfig& solver, double variation_limit) {
  if (times.empty() || c_values.empty()) throw DomainError("kernel check needs times and c values");
  const int n = exps.n();
  const double sigma = exps.sigma;
  const RadialOperator op(solver.grid, n, sigma, BoundaryConditions{});
  const RadialField bump = annular_bump(solver.grid, n, sigma, rho);
  const auto snaps = linear_snapshots(bump, op, times, solver.time);

  KernelCheckResult out;
  out.rho = rho;
  out.times.assign(times.begin(), times.end());
  std::vector<double> cs(c_values.begin(), c_values.end());
  std::sort(cs.begin(), cs.end());
  for (double c : cs) out.sweeps.push_back({c, {}, 0.0});

  for (const auto& snap : snaps) {
    const double t = snap.t;
    std::vector<double> reduced(snap.size());
    double peak = 0.0;
    for (int i = 0; i < snap.size(); ++i) {
      reduced[i] = snap.w(i) / phi(snap.grid.r(i), t, sigma);
      peak = std::max(peak, reduced[i]);
    }
    for (auto& sweep : out.sweeps) {
      double worst = 0.0;
      for (int i = 0; i < snap.size(); ++i) {
        if (reduced[i] < 1e-8 * peak) continue;
        const double bound =
            phi(rho, t, sigma) * radial_gaussian(n, snap.grid.r(i), rho, sweep.c * t);
        worst = std::max(worst, reduced[i] / bound);
      }
      sweep.max_ratio.push_back(worst);
    }
    out.origin_slopes.push_back(near_origin_slope(snap, t));
  }

  for (auto& sweep : out.sweeps) {
    const auto [lo, hi] = std::minmax_element(sweep.max_ratio.begin(), sweep.max_ratio.end());
    sweep.variation = *hi / *lo;
    if (!out.best_c && sweep.variation <= variation_limit) out.best_c = sweep.c;
  }
  return out;
}

double near_origin_slope(const RadialField& w, double t, double lo, double hi) {
  const double root_t = std::sqrt(t);
  std::vector<double> x, y;
  for (int i = 0; i < w.size(); ++i) {
    const double r = w.grid.r(i);
    if (r < lo * root_t || r > hi * root_t) continue;
    const double v = w.w(i);
    if (!(v > 0.0)) throw DegenerateError("near-origin profile is not positive");
    x.push_back(std::log(r));
    y.push_back(std::log(v));
  }
  if (x.size() < 4) throw EmptyRegionError("too few nodes in the near-origin window");
  return boost::math::statistics::simple_ordinary_least_squares(x, y).second;
}

}  // namespace shl
