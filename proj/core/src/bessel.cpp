#include "cayley/bessel.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

namespace cayley {

namespace {

constexpr double kSeriesCutoff = 15.0;

// Power series sum_k (x/2)^{2k+n} / (k! (k+n)!), x >= 0.
double series_i(int n, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / static_cast<double>(k);
  double sum = term;
  const double quarter_sq = half * half;
  for (int k = 1; k < 400; ++k) {
    term *= quarter_sq / (static_cast<double>(k) * static_cast<double>(k + n));
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

// Downward (Miller) recurrence I_{k-1} = I_{k+1} + (2k/x) I_k from a
// trial order, renormalized through e^x = I_0 + 2 sum_{k>=1} I_k, so the
// returned value is already exp(-x) I_n(x). x > 0.
double miller_scaled(int n, double x) {
  const double m = std::max(static_cast<double>(n), x);
  const int start = n + static_cast<int>(std::sqrt(40.0 * m)) + 20;

  double above = 0.0;   // trial I_{k+1}
  double here = 1e-30;  // trial I_k
  double target = 0.0;
  double norm = 0.0;  // accumulates I_0 + 2 sum I_k
  for (int k = start; k >= 1; --k) {
    const double below = above + (2.0 * k / x) * here;
    above = here;
    here = below;
    if (k - 1 == n) target = here;
    norm += 2.0 * above;
    if (here > 1e280) {  // rescale before overflow
      here *= 1e-280;
      above *= 1e-280;
      target *= 1e-280;
      norm *= 1e-280;
    }
  }
  norm += here;
  if (n == 0) target = here;
  return target / norm;
}

}  // namespace

double bessel_i_scaled(int order, double x) {
  const int n = std::abs(order);
  const double ax = std::fabs(x);
  const double sign = (x < 0.0 && (n & 1)) ? -1.0 : 1.0;
  if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
  if (ax <= kSeriesCutoff) return sign * series_i(n, ax) * std::exp(-ax);
  return sign * miller_scaled(n, ax);
}

double bessel_i(int order, double x) {
  const int n = std::abs(order);
  const double ax = std::fabs(x);
  const double sign = (x < 0.0 && (n & 1)) ? -1.0 : 1.0;
  if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
  if (ax <= kSeriesCutoff) return sign * series_i(n, ax);
  return sign * miller_scaled(n, ax) * std::exp(ax);
}

}  // namespace cayley
