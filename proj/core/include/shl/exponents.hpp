#pragma once

#include <string_view>
#include <utility>

namespace shl {

/// Spatial dimension and nonlinearity exponent of u_t = Δu + u^p.
struct ProblemParams {
  int n = 11;
  double p = 7.0;
};

/// Open interval (lo, hi).
struct OpenInterval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double x) const { return lo < x && x < hi; }
};

/// Every derived constant of the exponent algebra for a fixed (n, p).
struct ExponentSet {
  ProblemParams params;
  double p_F = 0.0;      ///< Fujita exponent 1 + 2/n
  double p_st = 0.0;     ///< n/(n-2), existence threshold of v_inf
  double p_S = 0.0;      ///< Sobolev exponent (n+2)/(n-2)
  double p_JL = 0.0;     ///< Joseph-Lundgren exponent, +inf for n <= 10
  double m = 0.0;        ///< 2/(p-1)
  double L = 0.0;        ///< prefactor of v_inf = L r^{-m}
  double lambda = 0.0;   ///< Hardy coefficient p L^{p-1}
  double sigma = 0.0;    ///< smaller root of sigma (n-2-sigma) = lambda
  double lambda1 = 0.0;  ///< sigma - m, root of the auxiliary quadratic
  OpenInterval ell_window;  ///< admissible tail exponents (sigma, n - sigma)

  [[nodiscard]] int n() const { return params.n; }
  [[nodiscard]] double p() const { return params.p; }
  /// n - 2 - 2 sigma; drift of the log-radial operator, >= 0.
  [[nodiscard]] double drift() const { return params.n - 2.0 - 2.0 * sigma; }
};

enum class HardyBranch { JL_branch, low_branch, inadmissible };

[[nodiscard]] std::string_view to_string(HardyBranch branch);

double fujita_exponent(int n);
double singular_threshold_exponent(int n);
double sobolev_exponent(int n);
/// +inf for n < 11.
double joseph_lundgren_exponent(int n);

/// (n-2)^2/4 - lambda(n, p), evaluated in the factored form
/// 4 (y - y_-)(y - y_+), y = 1/(p-1), which keeps full relative accuracy
/// away from the roots.
double hardy_gap(const ProblemParams& params);

/// lambda(n, p) = 2p/(p-1) (n - 2 - 2/(p-1)); no admissibility check.
double hardy_coefficient(const ProblemParams& params);

/// Prefactor L of v_inf. Throws DomainError unless n >= 3 and p > p_st.
double singular_prefactor(const ProblemParams& params);

/// Roots y_- <= y_+ of 16y^2 + (32-8n)y + n^2 - 12n + 20.
std::pair<double, double> admissibility_roots(int n);

/// Classifies (n, p) by the sign of the Hardy admissibility quadratic.
HardyBranch hardy_admissible(const ProblemParams& params);

/// Throws DomainError (n < 3 or p <= p_st) or AdmissibilityError.
ExponentSet compute_exponents(const ProblemParams& params);

/// Maximizer of the lower envelope F(r, t) = L r^{-m} - b_eff phi_sigma(r, t) t^{-ell/2}.
struct EnvelopeMax {
  double argmax_radius = 0.0;
  double max_value = 0.0;
  double search_argmax_radius = 0.0;  ///< from the numerical 1-D search
  double search_max_value = 0.0;
};

/// Closed-form maximizer of the envelope, cross-checked by a bracketing
/// 1-D search. Throws DegenerateError if the maximum is not positive.
EnvelopeMax envelope_max(double b_eff, const ExponentSet& exps, double ell, double t);

/// Time exponents (argmax, max) of the envelope maximizer for ell > sigma.
std::pair<double, double> envelope_scaling_exponents(const ExponentSet& exps, double ell);

}  // namespace shl
