#include "shl/exponents.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "shl/errors.hpp"
#include "shl/weights.hpp"

namespace shl {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Differences y - root that are within a few ulps of the operands are the
// rounding of p itself; treat them as landing on the root.
double snapped_difference(double y, double root) {
  const double d = y - root;
  if (std::abs(d) <= 8.0 * kEps * std::max(std::abs(y), std::abs(root))) return 0.0;
  return d;
}

void require_p_above_one(const ProblemParams& params) {
  if (!(params.p > 1.0) || !std::isfinite(params.p)) {
    throw DomainError("nonlinearity exponent must satisfy p > 1, got p = " +
                      std::to_string(params.p));
  }
  if (params.n < 1) {
    throw DomainError("dimension must be positive, got n = " + std::to_string(params.n));
  }
}

}  // namespace

std::string_view to_string(HardyBranch branch) {
  switch (branch) {
    case HardyBranch::JL_branch: return "JL_branch";
    case HardyBranch::low_branch: return "low_branch";
    case HardyBranch::inadmissible: return "inadmissible";
  }
  return "unknown";
}

double fujita_exponent(int n) { return 1.0 + 2.0 / n; }

double singular_threshold_exponent(int n) {
  if (n <= 2) return std::numeric_limits<double>::infinity();
  return static_cast<double>(n) / (n - 2.0);
}

double sobolev_exponent(int n) {
  if (n <= 2) return std::numeric_limits<double>::infinity();
  return (n + 2.0) / (n - 2.0);
}

double joseph_lundgren_exponent(int n) {
  if (n < 11) return std::numeric_limits<double>::infinity();
  const double root = 2.0 * std::sqrt(n - 1.0);
  return (n - root) / (n - 4.0 - root);
}

std::pair<double, double> admissibility_roots(int n) {
  const double root = 2.0 * std::sqrt(static_cast<double>(n) - 1.0);
  return {(n - 4.0 - root) / 4.0, (n - 4.0 + root) / 4.0};
}

double hardy_coefficient(const ProblemParams& params) {
  require_p_above_one(params);
  const double m = 2.0 / (params.p - 1.0);
  return params.p * m * (params.n - 2.0 - m);
}

double hardy_gap(const ProblemParams& params) {
  require_p_above_one(params);
  const double y = 1.0 / (params.p - 1.0);
  const auto [lo, hi] = admissibility_roots(params.n);
  return 4.0 * snapped_difference(y, lo) * snapped_difference(y, hi);
}

double singular_prefactor(const ProblemParams& params) {
  require_p_above_one(params);
  if (params.n < 3) {
    throw DomainError("v_inf requires n >= 3, got n = " + std::to_string(params.n));
  }
  const double p_st = singular_threshold_exponent(params.n);
  if (!(params.p > p_st)) {
    throw DomainError("v_inf requires p > n/(n-2) = " + std::to_string(p_st) +
                      ", got p = " + std::to_string(params.p));
  }
  const double m = 2.0 / (params.p - 1.0);
  return std::pow(m * (params.n - 2.0 - m), 1.0 / (params.p - 1.0));
}

HardyBranch hardy_admissible(const ProblemParams& params) {
  require_p_above_one(params);
  const double y = 1.0 / (params.p - 1.0);
  const auto [lo, hi] = admissibility_roots(params.n);
  if (snapped_difference(y, lo) <= 0.0) return HardyBranch::JL_branch;
  if (snapped_difference(y, hi) >= 0.0) return HardyBranch::low_branch;
  return HardyBranch::inadmissible;
}

ExponentSet compute_exponents(const ProblemParams& params) {
  ExponentSet e;
  e.params = params;
  e.L = singular_prefactor(params);  // validates n >= 3, p > p_st
  e.p_F = fujita_exponent(params.n);
  e.p_st = singular_threshold_exponent(params.n);
  e.p_S = sobolev_exponent(params.n);
  e.p_JL = joseph_lundgren_exponent(params.n);
  e.m = 2.0 / (params.p - 1.0);
  e.lambda = hardy_coefficient(params);

  const double gap = hardy_gap(params);
  if (gap < 0.0 || hardy_admissible(params) == HardyBranch::inadmissible) {
    throw AdmissibilityError("lambda(n,p) = " + std::to_string(e.lambda) +
                             " exceeds (n-2)^2/4; sigma is not real");
  }
  const double half = (params.n - 2.0) / 2.0;
  const double root = std::sqrt(gap);
  // sigma * (n - 2 - sigma) = lambda with the larger root in the denominator.
  e.sigma = e.lambda / (half + root);
  e.lambda1 = 0.5 * ((params.n - 2.0 - 2.0 * e.m) - 2.0 * root);
  e.ell_window = {e.sigma, params.n - e.sigma};
  return e;
}

std::pair<double, double> envelope_scaling_exponents(const ExponentSet& exps, double ell) {
  const double denom = exps.sigma * (exps.p() - 1.0) - 2.0;
  return {0.5 * (exps.sigma - ell) * (exps.p() - 1.0) / denom, (ell - exps.sigma) / denom};
}

EnvelopeMax envelope_max(double b_eff, const ExponentSet& exps, double ell, double t) {
  if (!(t > 0.0)) throw DomainError("envelope_max requires t > 0");
  if (!(b_eff > 0.0)) throw DomainError("envelope_max requires b_eff > 0");
  if (!(ell >= exps.sigma && ell < exps.n() - exps.sigma)) {
    throw DomainError("envelope_max requires ell in [sigma, n - sigma)");
  }
  const double sigma = exps.sigma;
  const double m = exps.m;
  if (!(sigma > m)) throw DomainError("envelope_max requires sigma (p-1) > 2");

  const double root_t = std::sqrt(t);
  const double inner_coeff = b_eff * std::pow(t, 0.5 * (sigma - ell));
  auto envelope = [&](double r) {
    return exps.L * std::pow(r, -m) - b_eff * phi(r, t, sigma) * std::pow(t, -0.5 * ell);
  };

  EnvelopeMax out;
  const double r_inner = std::pow(sigma * inner_coeff / (m * exps.L), 1.0 / (sigma - m));
  if (r_inner <= root_t) {
    out.argmax_radius = r_inner;
    out.max_value = exps.L * (1.0 - m / sigma) * std::pow(r_inner, -m);
  } else {
    out.argmax_radius = root_t;
    out.max_value = envelope(root_t);
  }
  if (!(out.max_value > 0.0)) {
    throw DegenerateError("envelope maximum is not positive; b_eff too large");
  }

  // Unimodal in ln r; bracket generously around both candidate maximizers.
  const double lo = std::min(std::log(r_inner), std::log(root_t)) - 20.0;
  const double hi = std::max(std::log(r_inner), std::log(root_t)) + 20.0;
  const auto [x_best, neg_best] = boost::math::tools::brent_find_minima(
      [&](double x) { return -envelope(std::exp(x)); }, lo, hi,
      std::numeric_limits<double>::digits);
  out.search_argmax_radius = std::exp(x_best);
  out.search_max_value = -neg_best;

  if (std::abs(out.search_max_value - out.max_value) > 1e-8 * std::abs(out.max_value)) {
    throw DegenerateError("envelope closed form and 1-D search disagree");
  }
  return out;
}

}  // namespace shl
