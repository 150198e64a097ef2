#include "cayley/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cayley/bessel.hpp"
#include "cayley/quadrature.hpp"

namespace cayley {

namespace {

constexpr double kPi = std::numbers::pi;

using cdouble = std::complex<double>;

}  // namespace

namespace spectral_detail {

// Identically 1 for eta == 0 (removable 0/0 at theta in {0, +-pi});
// free of poles on the real axis for eta > 0.
cdouble sinh_ratio(double eta, double theta) {
  if (eta == 0.0) return 1.0;
  return std::sinh(cdouble(eta, theta)) / std::sinh(cdouble(-eta, theta));
}

double delta0_factor(double eta, int b) {
  return b == 0 ? 1.0 - std::exp(-eta) / (2.0 * std::cosh(eta)) : 1.0;
}

}  // namespace spectral_detail

using spectral_detail::delta0_factor;
using spectral_detail::sinh_ratio;

SpectralParams SpectralParams::make(double beta, double gamma, int xi) {
  if (xi < 2) throw std::invalid_argument("coordination number must be >= 2");
  return SpectralParams{beta, gamma, xi, 0.5 * std::log(static_cast<double>(xi - 1))};
}

std::complex<double> characteristic_function(const SpectralParams& p, std::complex<double> z) {
  return p.beta / z + p.beta * static_cast<double>(p.xi - 1) * z -
         p.gamma * static_cast<double>(p.xi);
}

double Mode::psi(int a) const {
  const double eta = params.eta;
  const double da = static_cast<double>(a);
  return 2.0 * std::exp(-da * eta) *
         (std::sinh(eta) * std::cos(theta) * std::sin(da * theta) +
          std::cosh(eta) * std::sin(theta) * std::cos(da * theta));
}

double Mode::phi(int b) const {
  const double eta = params.eta;
  const double db = static_cast<double>(b);
  const double denom = std::sinh(eta) * std::sinh(eta) + std::sin(theta) * std::sin(theta);
  return delta0_factor(eta, b) / kPi * std::exp(db * eta) *
         (std::cosh(eta) * std::sin(theta) * std::cos(db * theta) +
          std::sinh(eta) * std::cos(theta) * std::sin(db * theta)) /
         denom;
}

Mode mode(const SpectralParams& p, double theta) {
  if (!(theta > 0.0) || !(theta < kPi)) {
    throw std::domain_error("mode parameter theta must lie in (0, pi)");
  }
  Mode m;
  m.theta = theta;
  m.params = p;
  m.energy = 2.0 * p.beta * std::exp(p.eta) * std::cos(theta) -
             p.gamma * static_cast<double>(p.xi);
  m.z1 = std::exp(cdouble(-p.eta, theta));
  m.z2 = std::exp(cdouble(-p.eta, -theta));
  return m;
}

double GreenResult::value() const { return amplitude * std::exp(log_prefactor); }

double GreenResult::log_value() const {
  if (!(amplitude > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return log_prefactor + std::log(amplitude);
}

GreenEvaluator::GreenEvaluator(SpectralParams params, std::size_t initial_nodes, double rel_tol)
    : params_(params), initial_nodes_(initial_nodes), rel_tol_(rel_tol) {
  if (initial_nodes_ < 32) initial_nodes_ = 32;
  if (initial_nodes_ % 2 != 0) ++initial_nodes_;
  if (!(rel_tol_ > 0.0)) throw std::invalid_argument("rel_tol must be positive");
}

GreenResult GreenEvaluator::green(int a, int b, double t) const {
  if (a < 0 || b < 0) throw std::domain_error("shell indices must be >= 0");
  if (!(t >= 0.0)) throw std::domain_error("time must be >= 0");

  const double eta = params_.eta;
  const double exp_eta = std::exp(eta);
  const double x = 2.0 * params_.beta * exp_eta * t;

  // The theta-dependent exponential is normalized by its maximum so the
  // integrand stays in [0, 1] scale; the pulled-out part joins the decay
  // exponent in log_prefactor.
  const auto integrand = [&](double theta) -> cdouble {
    const cdouble osc =
        std::exp(cdouble(0.0, (a - b) * theta)) +
        sinh_ratio(eta, theta) * std::exp(cdouble(0.0, (a + b) * theta));
    return osc * std::exp(x * std::cos(theta) - std::fabs(x));
  };

  // Start above twice the highest oscillation frequency; otherwise two
  // consecutive aliased grids could agree on a wrong value.
  std::size_t nodes = initial_nodes_;
  const std::size_t frequency_floor = 2 * static_cast<std::size_t>(a + b) + 64;
  while (nodes < frequency_floor) nodes *= 2;

  const QuadratureResult q = integrate_periodic(integrand, nodes, rel_tol_, kMaxNodes);
  if (!q.converged) {
    std::ostringstream msg;
    msg << "green quadrature did not converge at " << q.nodes
        << " nodes; last estimates " << q.previous << " and " << q.value;
    throw std::runtime_error(msg.str());
  }
  const double scale = std::max({std::abs(q.value), 0.01 * q.l1, 1e-300});
  if (q.imag_residual > rel_tol_ * scale) {
    throw std::runtime_error("odd part of the integrand failed to cancel");
  }

  GreenResult g;
  g.log_prefactor = (b - a) * eta +
                    2.0 * (std::fabs(params_.beta) - params_.gamma * std::cosh(eta)) * exp_eta * t;
  g.amplitude = delta0_factor(eta, b) / (2.0 * kPi) * q.value;
  g.imag_residual = q.imag_residual;
  g.nodes = q.nodes;
  return g;
}

GreenResult green_chain(double beta, double gamma, int a, int b, double t) {
  if (a < 0 || b < 0) throw std::domain_error("shell indices must be >= 0");
  if (!(t >= 0.0)) throw std::domain_error("time must be >= 0");
  const double x = 2.0 * beta * t;
  GreenResult g;
  g.log_prefactor = 2.0 * (std::fabs(beta) - gamma) * t;
  g.amplitude = (b == 0 ? 0.5 : 1.0) * (bessel_i_scaled(a - b, x) + bessel_i_scaled(a + b, x));
  return g;
}

GreenResult green_large_time(const SpectralParams& p, int a, int b, double t) {
  if (!(p.beta > 0.0)) {
    throw std::domain_error("large-time form requires beta > 0 (saddle at theta = 0)");
  }
  if (!(t > 0.0)) throw std::domain_error("time must be > 0");

  GreenResult g;
  if (p.xi == 2) {
    g.log_prefactor = 2.0 * (p.beta - p.gamma) * t;
    g.amplitude = (b == 0 ? 0.5 : 1.0) / std::sqrt(kPi * p.beta * t);
    return g;
  }
  const double eta = p.eta;
  const double coth = std::cosh(eta) / std::sinh(eta);
  const double w = p.beta * std::exp(eta) * t;
  g.log_prefactor = (b - a) * eta + 2.0 * (p.beta - p.gamma * std::cosh(eta)) * std::exp(eta) * t;
  g.amplitude = (a + coth) * (b + coth) / (2.0 * std::sqrt(kPi * w * w * w)) *
                delta0_factor(eta, b);
  return g;
}

GreenResult green_large_xi(const SpectralParams& p, int a, int b, double t) {
  const double eta = p.eta;
  const double w = p.beta * std::exp(eta) * t;
  GreenResult g;
  g.log_prefactor =
      (b - a) * eta + (2.0 * p.beta * std::exp(eta) - p.gamma * std::exp(2.0 * eta)) * t;
  g.amplitude = (a + 1.0) * (b + 1.0) / (2.0 * std::sqrt(kPi * w * w * w));
  return g;
}

double crossover_time(const SpectralParams& p) {
  if (p.xi == 2) throw std::domain_error("no crossover on a chain");
  if (!(p.beta > 0.0)) throw std::domain_error("crossover time requires beta > 0");
  return 1.0 / (p.beta * p.eta * p.eta);
}

double bold_green(const GreenEvaluator& eval, const TruncatedTree& tree, int i, int j, double t) {
  return eval.green(distance(tree, i, j), 0, t).value();
}

int ballistic_a_max(const SpectralParams& p, double t, int support) {
  const double front = 2.0 * std::exp(p.eta) * std::fabs(p.beta) * t;
  return support + static_cast<int>(std::ceil(front)) + 40;
}

double conservation_sum(const GreenEvaluator& eval, double t, double term_tol) {
  const SpectralParams& p = eval.params();
  const int front =
      static_cast<int>(std::ceil(2.0 * std::exp(p.eta) * std::fabs(p.beta) * t)) + 3;
  // |N_a| grows like e^{2 a eta} while the quadrature noise in G_a^0 only
  // decays like e^{-a eta}, so the sum must stop once the true terms are
  // exhausted instead of marching into amplified rounding: past the front the
  // physical tail is superexponentially decreasing, and a term that grows
  // again is noise.
  detail::KahanSum sum;
  double shell = 1.0;
  double prev_mag = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (int a = 0; a <= front + 400; ++a) {
    if (a == 1) {
      shell = static_cast<double>(p.xi);
    } else if (a > 1) {
      shell *= static_cast<double>(p.xi - 1);
    }
    const double term = shell * eval.green(a, 0, t).value();
    sum.add(term);
    const double mag = std::fabs(term);
    if (a > front) {
      if (mag < term_tol) break;
      growing = mag > prev_mag ? growing + 1 : 0;
      if (growing >= 3) break;
    }
    prev_mag = mag;
  }
  return sum.sum;
}

}  // namespace cayley
