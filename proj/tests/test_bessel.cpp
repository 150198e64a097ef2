#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cayley/bessel.hpp"
#include "oracles.hpp"

using cayley::bessel_i;
using cayley::bessel_i_scaled;

TEST_CASE("matches the power-series oracle across both evaluation branches") {
  // Orders and arguments straddling the series/recurrence cutoff at 15.
  const int orders[] = {0, 1, 2, 5, 11, 24};
  const double args[] = {0.1, 0.9, 2.0, 7.5, 14.9, 15.1, 20.0, 42.0, 90.0};
  for (int n : orders) {
    for (double x : args) {
      const double expected = oracles::bessel_i_series(n, x);
      CHECK(bessel_i(n, x) == doctest::Approx(expected).epsilon(1e-13));
      CHECK(bessel_i_scaled(n, x) ==
            doctest::Approx(expected * std::exp(-x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("values at zero argument") {
  CHECK(bessel_i(0, 0.0) == 1.0);
  CHECK(bessel_i(1, 0.0) == 0.0);
  CHECK(bessel_i(10, 0.0) == 0.0);
}

TEST_CASE("known combination e^-2 I_0(2)") {
  CHECK(std::exp(-2.0) * bessel_i(0, 2.0) == doctest::Approx(0.308508).epsilon(1e-5));
  CHECK(bessel_i_scaled(0, 2.0) == doctest::Approx(0.30850832255367103).epsilon(1e-14));
}

TEST_CASE("negative order and negative argument symmetries") {
  for (int n : {0, 1, 2, 3, 8}) {
    for (double x : {0.5, 3.0, 19.0}) {
      CHECK(bessel_i(-n, x) == bessel_i(n, x));
      const double parity = (n % 2 == 0) ? 1.0 : -1.0;
      CHECK(bessel_i(n, -x) == doctest::Approx(parity * bessel_i(n, x)).epsilon(1e-14));
    }
  }
}
