#pragma once

#include <vector>

#include "cayley/rates.hpp"
#include "cayley/spectral.hpp"
#include "cayley/tree.hpp"

namespace cayley {

// Density values at one instant, indexed either by tree site or by shell.
struct DensityField {
  enum class Kind { per_site, per_shell };
  Kind kind = Kind::per_shell;
  std::vector<double> values;
  double time = 0.0;

  static DensityField per_shell(std::vector<double> v, double time = 0.0) {
    return {Kind::per_shell, std::move(v), time};
  }
  static DensityField per_site(std::vector<double> v, double time = 0.0) {
    return {Kind::per_site, std::move(v), time};
  }
};

// Initial dynamic-part profile that is height on shells 0..radius, 0 beyond.
struct StepProfile {
  double height = 0.0;
  int radius = 0;
};

// Full densities on the finite tree under
//   drho_i/dt = alpha*deg(i) + sum_{j in nbrs(i)} (beta*rho_j - gamma*rho_i),
// with the true degree at every site (1 at the leaves). Solves to relative
// tolerance rel_tol, verified by step halving; throws std::runtime_error if
// the halving does not settle.
DensityField evolve_site_ode(const RateModel& model, const TruncatedTree& tree,
                             const DensityField& init, double t, double rel_tol = 1e-8);

// Shell densities on the infinite tree, truncated at a_max with the dynamic
// part clamped to zero beyond. a_max < 0 selects the ballistic default.
// Throws std::runtime_error when the dynamic part reaches the truncation
// shell (advise a larger a_max).
DensityField evolve_shell_ode(const Coefficients& coeffs, const DensityField& init, double t,
                              int a_max = -1, double rel_tol = 1e-8);

// Spectral solution rho_a(t) = rho_st + sum_b G_a^b(t) (rho_b(0) - rho_st)
// over the finite support of init.
double solve_green(const GreenEvaluator& eval, const Coefficients& coeffs,
                   const DensityField& init, int a, double t);

// Dynamic part of the density evolved from a step profile, evaluated with a
// single quadrature of the geometric-sum-collapsed integrand. Equals
// height * sum_{b<=radius} G_a^b(t).
double step_profile_solution(const GreenEvaluator& eval, const Coefficients& coeffs,
                             const StepProfile& profile, int a, double t);

// Full initial shell field for a step profile: rho_st + height on a <= radius.
DensityField step_initial(const StepProfile& profile, const Coefficients& coeffs, int a_max);

}  // namespace cayley
