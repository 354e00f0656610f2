#pragma once

// Drift function mu(.) of the coupled-Brownian model together with the
// diffusion coefficient sigma.  mu is strictly decreasing and continuous on
// (0, inf), diverges at 0+ and tends to mu_inf at infinity.  The SRPT family
// mu(a) = kappa + lambda * a^{-p} is the case of interest for the queueing
// application; a power-law family and tabulated drifts are supported for
// experiments.

#include <optional>
#include <string>
#include <vector>

namespace rcbm {

enum class DriftKind { Srpt, PowerLaw, Tabulated };

struct IntegrabilityReport {
  bool holds = false;
  double value = 0.0;  // +inf when divergent
};

class DriftSpec {
 public:
  // mu(a) = kappa + lambda * a^{-p}, p > 1; mu(inf) = kappa.
  static DriftSpec srpt(double sigma, double kappa, double lambda, double p);

  // mu(a) = c0 + c1 * a^{-q}, q > 0; mu(inf) = c0.
  static DriftSpec power_law(double sigma, double c0, double c1, double q);

  // Strictly decreasing knots (a_i, mu_i); piecewise-linear inside the knot
  // range, power-law extrapolation below the first knot, power decay toward
  // mu_inf above the last.
  static DriftSpec tabulated(double sigma, std::vector<double> a,
                             std::vector<double> mu, double mu_inf);

  DriftKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double mu_inf() const { return mu_inf_; }

  // a > 0 or a = +inf; a = 0 is a domain error (mu diverges there).
  double mu_at(double a) const;

  // Whether int_0^inf da / (a^2 mu(a)) is finite, and its value.
  IntegrabilityReport mass_integrability() const;

  // Whether int_0^1 dx/(x^{2g} mu^g) and int_1^inf dx/(x^g mu^g) are both
  // finite (gamma > 1); gamma = 1 falls back to mass_integrability().
  bool higher_moment_integrable(double gamma) const;

  // SRPT accessors (throw for other kinds).
  double kappa() const;
  double lambda() const;
  double p() const;

  // (lambda/kappa)^{1/p} for the SRPT family: the size scale at which the
  // two drift terms balance.
  double natural_scale() const;

  std::string describe() const;

 private:
  DriftSpec() = default;

  DriftKind kind_ = DriftKind::Srpt;
  double sigma_ = 1.0;
  double mu_inf_ = 0.0;
  // srpt: {kappa, lambda, p}; power_law: {c0, c1, q}
  double par_[3] = {0, 0, 0};
  std::vector<double> tab_a_;
  std::vector<double> tab_mu_;
  double below_slope_ = 1.0;  // power exponents for tabulated extrapolation
  double above_slope_ = 1.0;
};

} // namespace rcbm
