#pragma once

#include <functional>
#include <vector>

namespace rcbm {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval.  Nodes are interior,
// so integrands may be singular (but integrable) at the endpoints.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol = 1e-10,
                              double rel_tol = 1e-10, int max_depth = 30);

// Integral over [a, inf) via the rational substitution x = a + t/(1-t).
QuadResult integrate_to_infinity(const std::function<double(double)>& f,
                                 double a, double abs_tol = 1e-10,
                                 double rel_tol = 1e-10);

// Composite integral of tabulated values: Simpson when the grid is uniform
// (to ~1e-12 relative spacing) and trapezoid otherwise.
double integrate_grid(const std::vector<double>& x,
                      const std::vector<double>& y);

} // namespace rcbm
