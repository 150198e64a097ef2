#pragma once

#include <complex>
#include <cstddef>

#include "cayley/rates.hpp"
#include "cayley/tree.hpp"

namespace cayley {

// Parameters of the shell generator for the dynamic density part:
//   row 0:   -gamma*xi, beta*xi
//   row a>0:  beta, -gamma*xi, beta*(xi-1)
struct SpectralParams {
  double beta = 0.0;
  double gamma = 0.0;
  int xi = 2;
  double eta = 0.0;  // ln(xi-1)/2

  static SpectralParams make(double beta, double gamma, int xi);
  static SpectralParams from(const Coefficients& c) { return make(c.beta, c.gamma, c.xi); }
};

// Characteristic rate function f(z) = beta/z + beta*(xi-1)*z - gamma*xi whose
// level sets define the eigenvector roots z1, z2 with z1*z2 = 1/(xi-1).
std::complex<double> characteristic_function(const SpectralParams& p, std::complex<double> z);

// One continuum eigenmode of the shell generator, parameterized by
// theta in (0, pi). psi is the column (left-index) eigenvector, phi the row
// eigenvector with the normalization folded in so that
// integral_0^pi psi(theta, a) phi(theta, b) dtheta = delta_ab.
// Both are returned in their real form (the i-factors of the conjugate pair
// cancel in every product that matters).
struct Mode {
  double theta = 0.0;
  double energy = 0.0;
  std::complex<double> z1, z2;  // exp(-eta +- i theta)
  SpectralParams params;

  double psi(int a) const;  // defined for any integer a; psi(-1) == psi(1)
  double phi(int b) const;  // b >= 0
};

// Throws std::domain_error unless 0 < theta < pi.
Mode mode(const SpectralParams& p, double theta);

// A Green's-function value split as value = amplitude * exp(log_prefactor).
// The amplitude stays O(1) while the prefactor carries the exponential decay,
// so large-time evaluations neither underflow nor overflow.
struct GreenResult {
  double log_prefactor = 0.0;
  double amplitude = 0.0;
  double imag_residual = 0.0;  // leftover odd-part quadrature, ~1e-16
  std::size_t nodes = 0;

  double value() const;
  double log_value() const;  // NaN when amplitude <= 0
};

// Shell Green's function G_a^b(t) of the generator above, evaluated by
// periodic trapezoid quadrature of the closed-form spectral integral with
// automatic node doubling.
class GreenEvaluator {
 public:
  explicit GreenEvaluator(SpectralParams params, std::size_t initial_nodes = 64,
                          double rel_tol = 1e-10);

  // Throws std::domain_error for negative arguments and std::runtime_error
  // (carrying the last two estimates) if the node cap is hit.
  GreenResult green(int a, int b, double t) const;
  double operator()(int a, int b, double t) const { return green(a, b, t).value(); }

  const SpectralParams& params() const { return params_; }
  double rel_tol() const { return rel_tol_; }

  static constexpr std::size_t kMaxNodes = std::size_t{1} << 20;

 private:
  SpectralParams params_;
  std::size_t initial_nodes_;
  double rel_tol_;
};

// Closed form for xi = 2 (the chain): (1 - delta_b0/2) e^{-2 gamma t}
// [I_{a-b}(2 beta t) + I_{a+b}(2 beta t)].
GreenResult green_chain(double beta, double gamma, int a, int b, double t);

// Leading large-time behavior; the xi = 2 and xi > 2 laws differ and the
// dispatch is on exact xi == 2 (the limits do not commute).
// Throws std::domain_error for beta <= 0.
GreenResult green_large_time(const SpectralParams& p, int a, int b, double t);

// Leading behavior for large coordination number.
GreenResult green_large_xi(const SpectralParams& p, int a, int b, double t);

// Order-of-magnitude crossover time 1/(beta*eta^2) separating chain-like
// from tree-like amplitude decay. Throws std::domain_error for xi == 2
// ("no crossover on a chain") or beta <= 0.
double crossover_time(const SpectralParams& p);

// Site-level Green's function: depends only on the distance d(i,j).
double bold_green(const GreenEvaluator& eval, const TruncatedTree& tree, int i, int j, double t);

// Shell index beyond which a disturbance started at `support` is negligible
// at time t: support + ceil(2 e^eta |beta| t) + a fixed margin.
int ballistic_a_max(const SpectralParams& p, double t, int support = 0);

// sum_a |N_a| G_a^0(t), accumulated until the terms pass the ballistic front
// and drop below term_tol. Equals 1 exactly when beta == gamma.
double conservation_sum(const GreenEvaluator& eval, double t, double term_tol = 1e-9);

namespace spectral_detail {

// sinh(i*theta + eta) / sinh(i*theta - eta); identically 1 for eta == 0.
std::complex<double> sinh_ratio(double eta, double theta);

// [1 - exp(-eta)/(2 cosh eta) delta_{b,0}]
double delta0_factor(double eta, int b);

}  // namespace spectral_detail

}  // namespace cayley
