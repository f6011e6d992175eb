#include "shl/steady_states.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <string>

#include "shl/errors.hpp"

namespace shl {

namespace {

constexpr double kSeriesStart = 1e-3;
constexpr int kSamplesPerDecade = 1000;

// psi = c + a2 r^2 + a4 r^4 about the regular center.
struct CenterSeries {
  double c, a2, a4;

  CenterSeries(const ProblemParams& params, double center) : c(center) {
    const double n = params.n;
    const double p = params.p;
    a2 = -std::pow(center, p) / (2.0 * n);
    a4 = p * std::pow(center, 2.0 * p - 1.0) / (8.0 * n * (n + 2.0));
  }
  [[nodiscard]] double value(double r) const { return c + r * r * (a2 + a4 * r * r); }
  [[nodiscard]] double slope(double r) const { return r * (2.0 * a2 + 4.0 * a4 * r * r); }
};

boost::math::interpolators::pchip<std::vector<double>> make_interp(std::vector<double> r,
                                                                   std::vector<double> v) {
  return {std::move(r), std::move(v)};
}

}  // namespace

RadialProfile::RadialProfile(ProblemParams params, std::vector<double> radii,
                             std::vector<double> values, double center_value)
    : params_(params),
      radii_(std::move(radii)),
      values_(std::move(values)),
      center_value_(center_value),
      interp_(make_interp(radii_, values_)) {}

double RadialProfile::operator()(double r) const {
  if (r > r_max() * (1.0 + 1e-14)) {
    throw RangeError("radius " + std::to_string(r) + " beyond profile range " +
                     std::to_string(r_max()));
  }
  if (r < r_min()) return CenterSeries(params_, center_value_).value(r);
  return interp_(std::min(r, r_max()));
}

double v_infinity(double r, const ProblemParams& params) {
  if (!(r > 0.0)) throw DomainError("v_inf is singular at r = 0");
  return singular_prefactor(params) * std::pow(r, -2.0 / (params.p - 1.0));
}

RadialProfile integrate_steady_state(const ProblemParams& params, double center_value,
                                     double r_max, double tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;

  if (!(center_value > 0.0)) throw DomainError("steady state center value must be positive");
  if (!(r_max > kSeriesStart)) throw DomainError("r_max must exceed the series start radius");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");

  const double n = params.n;
  const double p = params.p;
  auto rhs = [n, p](const State& y, State& dy, double r) {
    const double psi = y[0];
    const double source = psi >= 0.0 ? std::pow(psi, p) : -std::pow(-psi, p);
    dy[0] = y[1];
    dy[1] = -(n - 1.0) / r * y[1] - source;
  };

  const CenterSeries series(params, center_value);
  State y{series.value(kSeriesStart), series.slope(kSeriesStart)};

  const double decades = std::log10(r_max / kSeriesStart);
  const int samples = std::max(2, static_cast<int>(std::ceil(decades * kSamplesPerDecade)) + 1);
  std::vector<double> radii(samples);
  for (int i = 0; i < samples; ++i) {
    radii[i] = kSeriesStart * std::pow(r_max / kSeriesStart, static_cast<double>(i) / (samples - 1));
  }
  radii.front() = kSeriesStart;
  radii.back() = r_max;

  std::vector<double> values;
  values.reserve(samples);
  auto observer = [&values](const State& state, double r) {
    if (!(state[0] > 0.0) || !std::isfinite(state[0])) {
      throw BlowdownError("steady-state profile reaches zero near r = " + std::to_string(r));
    }
    values.push_back(state[0]);
  };

  auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
  const double dr0 = 1e-2 * kSeriesStart;
  odeint::integrate_times(stepper, rhs, y, radii.begin(), radii.end(), dr0, observer);

  return RadialProfile(params, std::move(radii), std::move(values), center_value);
}

RadialProfile integrate_psi1(const ProblemParams& params, double r_max, double tol) {
  if (params.n < 3) throw DomainError("psi_1 requires n >= 3");
  if (params.p < sobolev_exponent(params.n)) {
    throw DomainError("global positive steady states need p >= p_S = " +
                      std::to_string(sobolev_exponent(params.n)));
  }
  if (r_max < 10.0) throw DomainError("integrate_psi1 requires r_max >= 10");
  if (!(tol > 0.0 && tol <= 1e-4)) throw DomainError("integrate_psi1 requires tol in (0, 1e-4]");
  return integrate_steady_state(params, 1.0, r_max, tol);
}

double psi_k(const RadialProfile& psi1, double k, double r) {
  if (!(k > 0.0)) throw DomainError("psi_k requires k > 0");
  if (!(r >= 0.0)) throw DomainError("psi_k requires r >= 0");
  return k * psi1(std::pow(k, 0.5 * (psi1.params().p - 1.0)) * r);
}

std::vector<double> find_intersections(const RadialProfile& profile,
                                       const ProblemParams& params) {
  const auto radii = profile.radii();
  auto gap = [&](double r) { return profile(r) - v_infinity(r, params); };
  std::vector<double> out;
  double prev = gap(radii[0]);
  for (std::size_t i = 1; i < radii.size(); ++i) {
    const double cur = gap(radii[i]);
    if ((prev < 0.0) != (cur < 0.0)) {
      double lo = radii[i - 1];
      double hi = radii[i];
      const bool lo_negative = prev < 0.0;
      while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if ((gap(mid) < 0.0) == lo_negative) lo = mid; else hi = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  return out;
}

SteadyStateSummary summarize_steady_state(const RadialProfile& profile,
                                          const ProblemParams& params) {
  SteadyStateSummary s;
  const auto radii = profile.radii();
  const auto values = profile.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) s.positive = false;
    if (i > 0 && !(values[i] < values[i - 1])) s.strictly_decreasing = false;
    s.max_ratio_to_v_inf = std::max(s.max_ratio_to_v_inf, values[i] / v_infinity(radii[i], params));
  }
  s.intersections = find_intersections(profile, params);
  s.ordering = s.intersections.empty() && s.max_ratio_to_v_inf < 1.0 ? SteadyOrdering::below
                                                                      : SteadyOrdering::intersects;
  return s;
}

}  // namespace shl
