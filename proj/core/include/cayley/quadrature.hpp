#pragma once

#include <complex>
#include <cstddef>
#include <numbers>

namespace cayley {

struct QuadratureResult {
  double value = 0.0;          // real part of the integral
  double imag_residual = 0.0;  // magnitude of the imaginary part (should vanish)
  double l1 = 0.0;             // integral of |f|, sets the error scale
  std::size_t nodes = 0;
  bool converged = false;
  double previous = 0.0;  // estimate before the last doubling
};

namespace detail {

// Compensated (Kahan) accumulator; the quadrature sums up to 2^20 terms and
// downstream shell sums amplify absolute error by the shell sizes.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

// Integrates a 2*pi-periodic complex integrand over [-pi, pi) with the
// equal-weight trapezoid rule, doubling the node count from initial_nodes
// until successive estimates of the real part agree to rel_tol relative to
// max(|I|, 0.01 * L1). Spectral accuracy for smooth periodic integrands.
// Never throws: the caller decides what a non-converged result means.
template <class F>
QuadratureResult integrate_periodic(F&& f, std::size_t initial_nodes, double rel_tol,
                                    std::size_t max_nodes) {
  constexpr double kPi = std::numbers::pi;
  std::size_t n = initial_nodes < 4 ? 4 : initial_nodes;

  detail::KahanSum re, im, l1;
  for (std::size_t k = 0; k < n; ++k) {
    const std::complex<double> v = f(-kPi + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
    re.add(v.real());
    im.add(v.imag());
    l1.add(std::abs(v));
  }

  QuadratureResult result;
  result.value = 2.0 * kPi * re.sum / static_cast<double>(n);
  result.nodes = n;

  while (n < max_nodes) {
    // Existing nodes are every second node of the doubled grid; only the
    // new midpoints are evaluated.
    const std::size_t n2 = 2 * n;
    for (std::size_t k = 1; k < n2; k += 2) {
      const std::complex<double> v =
          f(-kPi + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n2));
      re.add(v.real());
      im.add(v.imag());
      l1.add(std::abs(v));
    }
    n = n2;
    const double estimate = 2.0 * kPi * re.sum / static_cast<double>(n);
    const double l1_estimate = 2.0 * kPi * l1.sum / static_cast<double>(n);
    result.previous = result.value;
    result.value = estimate;
    result.imag_residual = std::abs(2.0 * kPi * im.sum / static_cast<double>(n));
    result.l1 = l1_estimate;
    result.nodes = n;

    const double scale = std::max({std::abs(estimate), 0.01 * l1_estimate, 1e-300});
    if (std::abs(estimate - result.previous) <= rel_tol * scale) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace cayley
