#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "shl/exponents.hpp"
#include "shl/radial_pde.hpp"
#include "shl/rate_fit.hpp"
#include "shl/weights.hpp"

namespace shl {

struct WeightEvaluator {
  double sigma = 0.0;

  [[nodiscard]] double operator()(double radius, double t) const { return phi(radius, t, sigma); }
};

struct WeightedNormSpec {
  double q = 2.0;  ///< in [1, inf]
  double t = 1.0;
};

/// Surface area of the unit sphere in R^n.
double sphere_area(int n);

/// (omega_{n-1} int |w phi^{-1}|^q phi^2 r^{n-1} dr)^{1/q} by the trapezoid
/// rule in s, or sup_r phi^{-1} |w| for q = inf. The weight exponent is
/// f.sigma. Throws NonFiniteError if the integrand is still significant at
/// either end of the grid.
double weighted_norm(const RadialField& f, int n, const WeightedNormSpec& spec);

/// sup over nodes of phi_sigma^{-1}(r, t) |w(r)|.
double weighted_sup(const RadialField& f, double t);

/// Linear flow (no reaction) from w0.t to w0.t + t.
RadialField apply_semigroup(const RadialField& w0, const RadialOperator& op, double t,
                            EvolutionConfig time = {});

/// Snapshots of the linear flow from w0 at each of the (increasing) times.
std::vector<RadialField> semigroup_snapshots(const RadialField& w0, const RadialOperator& op,
                                             std::span<const double> times,
                                             EvolutionConfig time = {});

/// (t, sup phi^{-1} |e^{-tH} w0|).
Series decay_series_linear(const RadialField& w0, const RadialOperator& op,
                           std::span<const double> times, EvolutionConfig time = {});

/// (t, t^{sigma/2} sup phi^{-1} |e^{-tH} w0|).
Series vanishing_series_linear(const RadialField& w0, const RadialOperator& op,
                               std::span<const double> times, EvolutionConfig time = {});

/// ||e^{-tH} w0||_{q} / (t^{-(n/2)(1/r - 1/q)} ||w0||_{r}), both norms
/// weighted with phi_sigma(., t). Returns nullopt when numerator and
/// denominator both vanish; throws DivisionError when only the denominator does.
std::optional<double> smoothing_ratio(const RadialField& w0, const RadialOperator& op, double t,
                                      double q, double r, EvolutionConfig time = {});

/// Angular mean of exp(kappa (cos theta - 1)) over S^{n-1}, Gauss-Legendre in
/// theta with at least `nodes` points. Doubles the node count until two
/// consecutive rules agree to 1e-8 relative; throws QuadratureError otherwise.
double spherical_exponential_mean(int n, double kappa, int nodes = 64);

/// Spherical average over |y| = rho of the heat kernel (4 pi tau)^{-n/2}
/// exp(-|x - y|^2 / (4 tau)) at |x| = r.
double radial_gaussian(int n, double r, double rho, double tau, int nodes = 64);

/// Bump of width 4h (in s) centered at ln rho, normalized so that
/// omega_{n-1} int b r^{n-1} dr = 1.
RadialField annular_bump(const LogGrid& grid, int n, double sigma, double rho);

struct KernelSweep {
  double c = 0.0;
  std::vector<double> max_ratio;  ///< one entry per time
  double variation = 0.0;         ///< max / min of max_ratio
};

struct KernelCheckResult {
  double rho = 0.0;
  std::vector<double> times;
  std::vector<KernelSweep> sweeps;
  std::optional<double> best_c;        ///< smallest c whose variation is <= the limit
  std::vector<double> origin_slopes;   ///< near-origin log slope at each time
};

/// Evolves a normalized bump at rho and compares it against
/// phi(x,t) phi(rho,t) G_rad(|x|, rho, c t) for every c and time. Nodes where
/// the evolved bump is below 1e-8 of its maximum are excluded from the ratio.
KernelCheckResult kernel_bound_check(double rho, std::span<const double> times,
                                     std::span<const double> c_values, const ExponentSet& exps,
                                     const SolverConfig& solver, double variation_limit = 3.0);

/// Least-squares slope of ln w against ln r on r in [lo sqrt(t), hi sqrt(t)].
double near_origin_slope(const RadialField& w, double t, double lo = 1e-4, double hi = 1e-1);

}  // namespace shl
