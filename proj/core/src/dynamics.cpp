#include "cayley/dynamics.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "cayley/quadrature.hpp"

namespace cayley {

namespace {

constexpr double kPi = std::numbers::pi;
using cdouble = std::complex<double>;

// Classic RK4 with a fixed step count.
template <class Deriv>
std::vector<double> rk4(const Deriv& deriv, std::vector<double> y, double t_total, long steps) {
  const double h = t_total / static_cast<double>(steps);
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
  for (long s = 0; s < steps; ++s) {
    deriv(y, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + 0.5 * h * k1[i];
    deriv(stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + 0.5 * h * k2[i];
    deriv(stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + h * k3[i];
    deriv(stage, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  return y;
}

// Step halving until two successive refinements agree to rel_tol in the
// sup norm; rate_scale sets the initial step so the first pass is already
// inside the RK4 stability region for the linear generator.
template <class Deriv>
std::vector<double> rk4_adaptive(const Deriv& deriv, const std::vector<double>& y0, double t,
                                 double rel_tol, double rate_scale) {
  if (t == 0.0) return y0;
  long steps = std::max<long>(16, static_cast<long>(std::ceil(t * rate_scale)));
  std::vector<double> coarse = rk4(deriv, y0, t, steps);
  for (int iter = 0; iter < 22; ++iter) {
    steps *= 2;
    std::vector<double> fine = rk4(deriv, y0, t, steps);
    double norm = 1.0, diff = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
      norm = std::max(norm, std::fabs(fine[i]));
      diff = std::max(diff, std::fabs(fine[i] - coarse[i]));
    }
    if (diff <= rel_tol * norm) return fine;
    coarse = std::move(fine);
  }
  throw std::runtime_error("step halving did not reach the requested ODE tolerance");
}

cdouble geometric_sum(cdouble z, int terms) {
  if (std::abs(z - 1.0) < 1e-9) {
    cdouble sum = 0.0, power = 1.0;
    for (int k = 0; k < terms; ++k) {
      sum += power;
      power *= z;
    }
    return sum;
  }
  return (std::pow(z, terms) - 1.0) / (z - 1.0);
}

}  // namespace

DensityField evolve_site_ode(const RateModel& model, const TruncatedTree& tree,
                             const DensityField& init, double t, double rel_tol) {
  if (init.kind != DensityField::Kind::per_site ||
      static_cast<int>(init.values.size()) != tree.sites()) {
    throw std::invalid_argument("site ODE needs a per-site field over the whole tree");
  }
  for (double v : init.values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("initial densities must lie in [0, 1]");
    }
  }
  const Coefficients c = derive_coefficients(model);

  const auto deriv = [&](const std::vector<double>& rho, std::vector<double>& out) {
    for (int i = 0; i < tree.sites(); ++i) {
      const auto& nbrs = tree.adjacency[i];
      double acc = c.alpha * static_cast<double>(nbrs.size());
      for (int j : nbrs) acc += c.beta * rho[j] - c.gamma * rho[i];
      out[i] = acc;
    }
  };
  const double rate_scale =
      2.0 * (std::fabs(c.gamma) + std::fabs(c.beta)) * static_cast<double>(tree.xi) + 1.0;
  DensityField out = DensityField::per_site(
      rk4_adaptive(deriv, init.values, t, rel_tol, rate_scale), init.time + t);
  return out;
}

DensityField evolve_shell_ode(const Coefficients& coeffs, const DensityField& init, double t,
                              int a_max, double rel_tol) {
  if (init.kind != DensityField::Kind::per_shell) {
    throw std::invalid_argument("shell ODE needs a per-shell field");
  }
  const double rho_st = coeffs.stationary_or(0.0);
  const int support = static_cast<int>(init.values.size()) - 1;
  if (a_max < 0) {
    a_max = std::max(ballistic_a_max(SpectralParams::from(coeffs), t, std::max(support, 0)),
                     support);
  }
  if (a_max < support) {
    throw std::invalid_argument("a_max must cover the initial support");
  }

  std::vector<double> dyn(static_cast<std::size_t>(a_max) + 1, 0.0);
  for (int a = 0; a <= support; ++a) dyn[a] = init.values[a] - rho_st;
  const double edge_before = std::fabs(dyn[a_max]);

  const double xi = coeffs.xi;
  const double beta = coeffs.beta;
  const double gxi = coeffs.gamma * xi;
  const auto deriv = [&](const std::vector<double>& y, std::vector<double>& out) {
    const int last = a_max;
    if (last == 0) {
      out[0] = -gxi * y[0];
      return;
    }
    out[0] = -gxi * y[0] + beta * xi * y[1];
    for (int a = 1; a < last; ++a) {
      out[a] = beta * y[a - 1] - gxi * y[a] + beta * (xi - 1.0) * y[a + 1];
    }
    // Truncation: the dynamic part is clamped to zero beyond a_max.
    out[last] = beta * y[last - 1] - gxi * y[last];
  };
  const double rate_scale = 2.0 * (std::fabs(coeffs.gamma) + std::fabs(beta)) * xi + 1.0;
  std::vector<double> evolved = rk4_adaptive(deriv, dyn, t, rel_tol, rate_scale);

  if (std::fabs(evolved[a_max]) > edge_before + 1e-8) {
    throw std::runtime_error("dynamic density reached the truncation shell a_max=" +
                             std::to_string(a_max) + "; rerun with a larger a_max");
  }

  for (double& v : evolved) v += rho_st;
  return DensityField::per_shell(std::move(evolved), init.time + t);
}

double solve_green(const GreenEvaluator& eval, const Coefficients& coeffs,
                   const DensityField& init, int a, double t) {
  if (init.kind != DensityField::Kind::per_shell) {
    throw std::invalid_argument("spectral solver needs a per-shell field");
  }
  const double rho_st = coeffs.stationary_or(0.0);
  double acc = 0.0;
  for (int b = 0; b < static_cast<int>(init.values.size()); ++b) {
    const double weight = init.values[b] - rho_st;
    if (weight == 0.0) continue;
    acc += eval.green(a, b, t).value() * weight;
  }
  return acc + rho_st;
}

double step_profile_solution(const GreenEvaluator& eval, const Coefficients& coeffs,
                             const StepProfile& profile, int a, double t) {
  if (a < 0 || profile.radius < 0) throw std::domain_error("indices must be >= 0");
  if (!(t >= 0.0)) throw std::domain_error("time must be >= 0");
  const SpectralParams p = SpectralParams::from(coeffs);
  const double eta = p.eta;
  const double exp_eta = std::exp(eta);
  const double x = 2.0 * p.beta * exp_eta * t;
  const double edge = std::exp(-eta) / (2.0 * std::cosh(eta));
  const int r = profile.radius;

  // Single quadrature of the propagator summed over the step support; the
  // geometric sums in b collapse the double sum to one integral.
  const auto integrand = [&](double theta) -> cdouble {
    const cdouble ratio = spectral_detail::sinh_ratio(eta, theta);
    const cdouble sum_minus = geometric_sum(std::exp(cdouble(eta, -theta)), r + 1);
    const cdouble sum_plus = geometric_sum(std::exp(cdouble(eta, theta)), r + 1);
    const cdouble bracket = sum_minus + sum_plus * ratio - edge * (1.0 + ratio);
    return bracket * std::exp(cdouble(0.0, a * theta)) *
           std::exp(x * std::cos(theta) - std::fabs(x));
  };

  std::size_t nodes = 64;
  const std::size_t frequency_floor = 2 * static_cast<std::size_t>(a + r) + 64;
  while (nodes < frequency_floor) nodes *= 2;
  const QuadratureResult q =
      integrate_periodic(integrand, nodes, eval.rel_tol(), GreenEvaluator::kMaxNodes);
  if (!q.converged) {
    throw std::runtime_error("step-profile quadrature did not converge");
  }

  const double log_pref =
      -a * eta + 2.0 * (std::fabs(p.beta) - p.gamma * std::cosh(eta)) * exp_eta * t;
  return profile.height / (2.0 * kPi) * q.value * std::exp(log_pref);
}

DensityField step_initial(const StepProfile& profile, const Coefficients& coeffs, int a_max) {
  const double rho_st = coeffs.stationary_or(0.0);
  std::vector<double> values(static_cast<std::size_t>(a_max) + 1, rho_st);
  for (int a = 0; a <= std::min(profile.radius, a_max); ++a) values[a] += profile.height;
  return DensityField::per_shell(std::move(values));
}

}  // namespace cayley
