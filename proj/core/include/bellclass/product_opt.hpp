#pragma once

// Extremization of Bell-diagonal linear functionals over pure product states.
//
// For coefficients kappa, the objective is
//   f(a, b) = sum_{k,l} kappa_{k,l} |<Omega_{k,l}| a (x) b>|^2
// with unit vectors a, b in C^d. Each factor is parameterized by d-1 polar
// angles and d-1 relative phases (first component real, nonnegative).

#include <cstdint>
#include <vector>

#include "bellclass/rng.hpp"
#include "bellclass/weyl.hpp"

namespace bellclass {

struct ProductOptimizerConfig {
  int starts = 0;            // 0 selects 64 * d
  int max_iterations = 400;  // per local descent
  double tolerance = 1e-9;   // on step length and objective change
  int polish_sweeps = 50;    // alternating eigenvector refinement of the best candidates
  double agreement = 1e-8;   // two starts agree if their optima differ by less
  int min_agreeing = 2;      // starts that must reach the best value
};

struct ProductPoint {
  ComplexVector a;
  ComplexVector b;
  double value = 0.0;
};

struct ProductOptimum {
  ProductPoint best;
  int starts = 0;
  int converged = 0;  // local descents that met the tolerance
  int agreeing = 0;   // starts whose optimum matches the best within `agreement`
  bool certified = false;
};

/// f(a, b) for normalized a, b.
double product_objective(const std::vector<double>& kappa, const ComplexVector& a, const ComplexVector& b);

/// Maximizes f over product states by multi-start quasi-Newton descent in the
/// angle parameterization, then polishes with alternating eigenvector steps.
/// `seeds` are extra starting points evaluated before the random starts.
ProductOptimum maximize_over_products(const std::vector<double>& kappa, int d, Rng& rng,
                                      const ProductOptimizerConfig& cfg,
                                      const std::vector<ProductPoint>& seeds = {});

/// Haar-random unit vector.
ComplexVector random_unit_vector(int d, Rng& rng);

// Angle parameterization helpers (exposed for testing).
ComplexVector vector_from_angles(const double* theta, const double* phi, int d);
void angles_from_vector(const ComplexVector& v, double* theta, double* phi);

}  // namespace bellclass
