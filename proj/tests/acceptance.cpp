// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Tolerances are fixed here and mirror the library's documented guarantees.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cayley/dynamics.hpp"
#include "cayley/gillespie.hpp"
#include "cayley/master.hpp"
#include "cayley/rates.hpp"
#include "cayley/spectral.hpp"
#include "cayley/tree.hpp"

using namespace cayley;

namespace {

int failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail) {
  std::printf("%s  %2d  %-18s %s\n", pass ? "PASS" : "FAIL", id, label, detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

void criterion_autonomy_closure() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> times{0.1, 0.5, 2.0};
  const WitnessReport closed = autonomy_witness(annihilation_creation_model(3, 1.0),
                                                build_tree(3, 2), times);

  RateModel annihilation_only;
  annihilation_only.xi = 3;
  annihilation_only.set_rate(1, 1, 0, 0, 1.0);
  const WitnessReport control =
      autonomy_witness(annihilation_only, build_tree(3, 1), std::vector<double>{1.0});

  const double elapsed = seconds_since(start);
  const bool pass = closed.max_gap <= 1e-6 && control.max_gap > 0.01 && elapsed < 60.0;
  report(1, "autonomy closure", pass,
         fmt("closed gap %.2e (<=1e-6), control gap %.3f (>0.01), %.1fs", closed.max_gap,
             control.max_gap, elapsed));
}

void criterion_chain_closed_form() {
  const auto start = std::chrono::steady_clock::now();
  const GreenEvaluator eval(SpectralParams::make(1.0, 1.0, 2));
  double worst = 0.0;
  for (double t : {0.1, 1.0, 10.0}) {
    for (int a = 0; a <= 10; ++a) {
      for (int b = 0; b <= 10; ++b) {
        worst = std::fmax(worst,
                          std::fabs(eval(a, b, t) - green_chain(1.0, 1.0, a, b, t).value()));
      }
    }
  }
  const double elapsed = seconds_since(start);
  report(2, "chain closed form", worst <= 1e-8 && elapsed < 10.0,
         fmt("max |quadrature - Bessel| %.2e (<=1e-8), %.1fs", worst, elapsed));
}

void criterion_identity_at_zero() {
  double worst = 0.0;
  for (int xi : {2, 3}) {
    const GreenEvaluator eval(SpectralParams::make(1.0, 1.0, xi));
    for (int a = 0; a <= 20; ++a) {
      for (int b = 0; b <= 20; ++b) {
        worst = std::fmax(worst, std::fabs(eval(a, b, 0.0) - (a == b ? 1.0 : 0.0)));
      }
    }
  }
  report(3, "identity at t=0", worst <= 1e-8, fmt("max |G(0) - delta| %.2e (<=1e-8)", worst));
}

void criterion_semigroup() {
  double worst = 0.0;
  for (int xi : {2, 3, 4}) {
    const SpectralParams p = SpectralParams::make(1.0, 1.0, xi);
    const GreenEvaluator eval(p);
    const int c_max = ballistic_a_max(p, 0.9);
    for (int a = 0; a <= 5; ++a) {
      for (int b = 0; b <= 5; ++b) {
        double composed = 0.0;
        for (int c = 0; c <= c_max; ++c) composed += eval(a, c, 0.2) * eval(c, b, 0.7);
        worst = std::fmax(worst, std::fabs(composed - eval(a, b, 0.9)));
      }
    }
  }
  report(4, "semigroup", worst <= 1e-6, fmt("max |G(.2)G(.7) - G(.9)| %.2e (<=1e-6)", worst));
}

void criterion_conservation() {
  double worst = 0.0;
  for (int xi : {2, 3, 5}) {
    const GreenEvaluator eval(SpectralParams::make(1.0, 1.0, xi));
    for (double t : {0.5, 2.0}) {
      worst = std::fmax(worst, std::fabs(conservation_sum(eval, t) - 1.0));
    }
  }
  report(5, "conservation", worst <= 1e-6, fmt("max |sum - 1| %.2e (<=1e-6)", worst));
}

void criterion_reciprocity() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> shell(0, 12);
  std::uniform_real_distribution<double> time(0.0, 5.0);
  const int xis[3] = {2, 3, 4};
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int xi = xis[trial % 3];
    const GreenEvaluator eval(SpectralParams::make(1.0, 1.0, xi), 64, 1e-11);
    const int a = shell(rng), b = shell(rng);
    const double t = time(rng);
    const double lhs = static_cast<double>(shell_size(xi, a)) * eval(a, b, t);
    const double rhs = static_cast<double>(shell_size(xi, b)) * eval(b, a, t);
    worst = std::fmax(worst, std::fabs(lhs - rhs));
  }
  report(6, "reciprocity", worst <= 1e-8,
         fmt("max ||N_a|G_ab - |N_b|G_ba| %.2e (<=1e-8) over 50 triples", worst));
}

void criterion_large_time() {
  const SpectralParams p = SpectralParams::make(1.0, 1.0, 3);
  const GreenEvaluator eval(p);

  double worst_rel = 0.0;
  for (double t : {50.0, 100.0, 150.0, 200.0}) {
    const double lg = eval.green(0, 0, t).log_value();
    const double la = green_large_time(p, 0, 0, t).log_value();
    worst_rel = std::fmax(worst_rel, std::fabs(lg - la) / std::fabs(lg));
  }

  // Local slope of the amplitude (the exponential factor lives entirely in
  // log_prefactor) in log-log coordinates.
  const auto slope_at = [&](double t) {
    const double h = 0.02;
    const double up = std::log(eval.green(0, 0, t * std::exp(h)).amplitude);
    const double down = std::log(eval.green(0, 0, t * std::exp(-h)).amplitude);
    return (up - down) / (2.0 * h);
  };
  const double slope_late = slope_at(100.0);
  const double slope_early = slope_at(0.3);
  const double t_c = crossover_time(p);

  const bool pass = worst_rel <= 0.05 && std::fabs(slope_late - (-1.5)) <= 0.15 &&
                    std::fabs(slope_early - (-0.5)) <= 0.15;
  report(7, "large-time law", pass,
         fmt("log-ratio dev %.3f (<=0.05), slope(100)=%.3f (-1.5+-0.15), "
             "slope(0.3)=%.3f (-0.5+-0.15), t_c=%.3f",
             worst_rel, slope_late, slope_early, t_c));
}

void criterion_large_xi() {
  const SpectralParams p = SpectralParams::make(1.0, 1.0, 26);
  const GreenEvaluator eval(p);
  // Time at which the closed-form exponent for (a,b) = (1,0) reaches -20.
  const double t = (20.0 - p.eta) / 15.0;
  const double lg = eval.green(1, 0, t).log_value();
  const double lx = green_large_xi(p, 1, 0, t).log_value();
  const double rel = std::fabs(lx - lg) / std::fabs(lg);
  report(8, "large-xi law", rel <= 0.10,
         fmt("ln(green) %.2f vs ln(closed form) %.2f, rel dev %.3f (<=0.10)", lg, lx, rel));
}

void criterion_monte_carlo() {
  const auto start = std::chrono::steady_clock::now();
  const TruncatedTree star = build_tree(3, 1);
  EnsembleConfig config;
  config.runs = 100000;
  config.master_seed = 20260810;
  config.t_samples = {0.5};

  config.threads = 1;
  const EnsembleResult serial =
      ensemble_mean(diffusion_model(3, 1.0), star, config, InitSpec::bitmask(0b0001));
  config.threads = 4;
  const EnsembleResult parallel =
      ensemble_mean(diffusion_model(3, 1.0), star, config, InitSpec::bitmask(0b0001));

  const double expected = 0.25 + 0.75 * std::exp(-2.0);
  const double mean = serial.mean(0, 0);
  const double se = serial.std_error(0, 0);
  const bool identical = serial.occupied_count == parallel.occupied_count;
  const double elapsed = seconds_since(start);
  const bool pass =
      std::fabs(mean - expected) <= 3.0 * se && identical && elapsed < 60.0;
  report(9, "monte carlo", pass,
         fmt("mean %.6f vs %.6f (3se %.6f), threads 1/4 %s, %.1fs", mean, expected,
             3.0 * se, identical ? "bit-identical" : "DIFFER", elapsed));
}

void criterion_step_profile() {
  const Coefficients c = derive_coefficients(diffusion_model(3, 1.0));
  const GreenEvaluator eval(SpectralParams::from(c));
  const StepProfile step{0.3, 2};
  const double t = 1.0;

  const DensityField shell = evolve_shell_ode(c, step_initial(step, c, 40), t, 60, 1e-10);
  double worst_naive = 0.0, worst_ode = 0.0;
  for (int a = 0; a <= 8; ++a) {
    const double collapsed = step_profile_solution(eval, c, step, a, t);
    double naive = 0.0;
    for (int b = 0; b <= step.radius; ++b) naive += eval(a, b, t);
    naive *= step.height;
    worst_naive = std::fmax(worst_naive, std::fabs(collapsed - naive));
    worst_ode = std::fmax(worst_ode, std::fabs(collapsed - shell.values[a]));
  }
  report(10, "step profile", worst_naive <= 1e-8 && worst_ode <= 1e-6,
         fmt("vs naive sum %.2e (<=1e-8), vs shell ODE %.2e (<=1e-6)", worst_naive,
             worst_ode));
}

void criterion_eigensystem() {
  const SpectralParams p = SpectralParams::make(1.0, 1.0, 3);

  // Orthonormality over (0, pi) by midpoint rule.
  const int a_max = 30;
  const std::size_t n = 1 << 15;
  std::vector<std::vector<double>> psi(a_max + 1, std::vector<double>(n));
  std::vector<std::vector<double>> phi(a_max + 1, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double theta =
        (static_cast<double>(k) + 0.5) * std::numbers::pi / static_cast<double>(n);
    const Mode m = mode(p, theta);
    for (int a = 0; a <= a_max; ++a) {
      psi[a][k] = m.psi(a);
      phi[a][k] = m.phi(a);
    }
  }
  double worst_ortho = 0.0;
  for (int a = 0; a <= a_max; ++a) {
    for (int b = 0; b <= a_max; ++b) {
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) sum += psi[a][k] * phi[b][k];
      const double integral = sum * std::numbers::pi / static_cast<double>(n);
      worst_ortho = std::fmax(worst_ortho, std::fabs(integral - (a == b ? 1.0 : 0.0)));
    }
  }

  // Eigen-residuals of both families, scaled by the local column magnitude.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1e-2, std::numbers::pi - 1e-2);
  const double gxi = p.gamma * p.xi;
  double worst_res = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Mode m = mode(p, u(rng));
    for (int a = 0; a <= 50; ++a) {
      const double row = a == 0 ? -gxi * m.psi(0) + p.beta * p.xi * m.psi(1)
                                : p.beta * m.psi(a - 1) - gxi * m.psi(a) +
                                      p.beta * (p.xi - 1.0) * m.psi(a + 1);
      worst_res = std::fmax(worst_res, std::fabs(row - m.energy * m.psi(a)));
    }
    for (int b = 0; b <= 50; ++b) {
      const double col = b == 0 ? -gxi * m.phi(0) + p.beta * m.phi(1)
                         : b == 1
                             ? p.beta * p.xi * m.phi(0) - gxi * m.phi(1) + p.beta * m.phi(2)
                             : p.beta * (p.xi - 1.0) * m.phi(b - 1) - gxi * m.phi(b) +
                                   p.beta * m.phi(b + 1);
      const double scale = std::max({1.0, std::fabs(m.phi(b)), std::fabs(m.phi(b + 1))}) *
                           std::max(1.0, std::fabs(m.energy));
      worst_res = std::fmax(worst_res, std::fabs(col - m.energy * m.phi(b)) / scale);
    }
  }

  report(11, "eigensystem", worst_ortho <= 1e-8 && worst_res <= 1e-12,
         fmt("orthonormality %.2e (<=1e-8), residual %.2e (<=1e-12)", worst_ortho,
             worst_res));
}

}  // namespace

int main() {
  criterion_autonomy_closure();
  criterion_chain_closed_form();
  criterion_identity_at_zero();
  criterion_semigroup();
  criterion_conservation();
  criterion_reciprocity();
  criterion_large_time();
  criterion_large_xi();
  criterion_monte_carlo();
  criterion_step_profile();
  criterion_eigensystem();

  std::printf("%d/11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
