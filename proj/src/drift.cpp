#include "rcbm/drift.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rcbm/quadrature.hpp"

namespace rcbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadCap = 1e6;  // A_max for numeric integrability probes

// int_0^inf a^{p-2} / (c a^p + d) da for p > 1, c > 0, d > 0.  Substituting
// a = (d/c)^{1/p} s and then t = 1/(s^p + 1) turns this into a Beta integral
// with value (1/c) (c/d)^{1/p} (pi/p) / sin(pi/p).
double power_mass_integral(double c, double d, double p) {
  return (1.0 / c) * std::pow(c / d, 1.0 / p) * (M_PI / p) /
         std::sin(M_PI / p);
}

} // namespace

DriftSpec DriftSpec::srpt(double sigma, double kappa, double lambda, double p) {
  if (!(sigma > 0.0)) throw std::invalid_argument("drift: sigma must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("drift: kappa must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("drift: lambda must be positive");
  if (!(p > 1.0)) throw std::invalid_argument("drift: p must exceed 1");
  DriftSpec d;
  d.kind_ = DriftKind::Srpt;
  d.sigma_ = sigma;
  d.mu_inf_ = kappa;
  d.par_[0] = kappa;
  d.par_[1] = lambda;
  d.par_[2] = p;
  return d;
}

DriftSpec DriftSpec::power_law(double sigma, double c0, double c1, double q) {
  if (!(sigma > 0.0)) throw std::invalid_argument("drift: sigma must be positive");
  if (!(c0 >= 0.0)) throw std::invalid_argument("drift: c0 must be nonnegative");
  if (!(c1 > 0.0)) throw std::invalid_argument("drift: c1 must be positive");
  if (!(q > 0.0)) throw std::invalid_argument("drift: q must be positive");
  DriftSpec d;
  d.kind_ = DriftKind::PowerLaw;
  d.sigma_ = sigma;
  d.mu_inf_ = c0;
  d.par_[0] = c0;
  d.par_[1] = c1;
  d.par_[2] = q;
  return d;
}

DriftSpec DriftSpec::tabulated(double sigma, std::vector<double> a,
                               std::vector<double> mu, double mu_inf) {
  if (!(sigma > 0.0)) throw std::invalid_argument("drift: sigma must be positive");
  if (a.size() != mu.size() || a.size() < 2)
    throw std::invalid_argument("drift: tabulated needs >= 2 matched knots");
  if (!(mu_inf >= 0.0)) throw std::invalid_argument("drift: mu_inf must be >= 0");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !std::isfinite(a[i]))
      throw std::invalid_argument("drift: knot abscissae must be positive finite");
    if (!(mu[i] > mu_inf))
      throw std::invalid_argument("drift: knot values must exceed mu_inf");
    if (i > 0 && !(a[i] > a[i - 1] && mu[i] < mu[i - 1]))
      throw std::invalid_argument("drift: knots must be strictly decreasing");
  }
  DriftSpec d;
  d.kind_ = DriftKind::Tabulated;
  d.sigma_ = sigma;
  d.mu_inf_ = mu_inf;
  d.tab_a_ = std::move(a);
  d.tab_mu_ = std::move(mu);
  // Power exponent from the first two knots; must be positive so that mu
  // diverges at zero.
  const auto& ta = d.tab_a_;
  const auto& tm = d.tab_mu_;
  d.below_slope_ = std::log(tm[0] / tm[1]) / std::log(ta[1] / ta[0]);
  if (!(d.below_slope_ > 0.0))
    throw std::invalid_argument("drift: tabulated data must diverge toward 0");
  const std::size_t n = ta.size();
  const double e0 = tm[n - 2] - mu_inf;
  const double e1 = tm[n - 1] - mu_inf;
  d.above_slope_ = std::log(e0 / e1) / std::log(ta[n - 1] / ta[n - 2]);
  if (!(d.above_slope_ > 0.0)) d.above_slope_ = 1.0;
  return d;
}

double DriftSpec::mu_at(double a) const {
  if (a == 0.0)
    throw std::domain_error("mu_at: mu diverges at a = 0");
  if (!(a > 0.0)) throw std::domain_error("mu_at: a must be positive");
  if (std::isinf(a)) return mu_inf_;
  switch (kind_) {
    case DriftKind::Srpt:
    case DriftKind::PowerLaw:
      return par_[0] + par_[1] * std::pow(a, -par_[2]);
    case DriftKind::Tabulated: {
      const auto& ta = tab_a_;
      const auto& tm = tab_mu_;
      if (a <= ta.front())
        return tm.front() * std::pow(ta.front() / a, below_slope_);
      if (a >= ta.back())
        return mu_inf_ +
               (tm.back() - mu_inf_) * std::pow(ta.back() / a, above_slope_);
      std::size_t lo = 0, hi = ta.size() - 1;
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (ta[mid] <= a ? lo : hi) = mid;
      }
      const double w = (a - ta[lo]) / (ta[hi] - ta[lo]);
      return tm[lo] + w * (tm[hi] - tm[lo]);
    }
  }
  throw std::logic_error("mu_at: unreachable");
}

IntegrabilityReport DriftSpec::mass_integrability() const {
  switch (kind_) {
    case DriftKind::Srpt:
      // p > 1 handles the origin, kappa > 0 handles the tail.
      return {true, power_mass_integral(par_[0], par_[1], par_[2])};
    case DriftKind::PowerLaw: {
      const double c0 = par_[0], c1 = par_[1], q = par_[2];
      // Near 0 the integrand behaves like a^{q-2}/c1, near infinity like
      // 1/(a^2 mu_inf).
      if (!(q > 1.0) || !(c0 > 0.0)) return {false, kInf};
      return {true, power_mass_integral(c0, c1, q)};
    }
    case DriftKind::Tabulated: {
      if (!(below_slope_ > 1.0) || !(mu_inf_ > 0.0)) return {false, kInf};
      auto integrand = [this](double a) { return 1.0 / (a * a * mu_at(a)); };
      const QuadResult body =
          integrate_adaptive(integrand, 1e-12, kQuadCap, 1e-12, 1e-9);
      const double tail = 1.0 / (kQuadCap * mu_inf_);
      if (!body.converged || body.value > 1e12) return {false, kInf};
      return {true, body.value + tail};
    }
  }
  throw std::logic_error("mass_integrability: unreachable");
}

bool DriftSpec::higher_moment_integrable(double gamma) const {
  if (!(gamma >= 1.0))
    throw std::invalid_argument("higher_moment_integrable: gamma must be >= 1");
  if (gamma == 1.0) return mass_integrability().holds;
  switch (kind_) {
    case DriftKind::Srpt: {
      // Near 0 the integrand of the first condition is x^{(p-2)gamma}; near
      // infinity the second is x^{-gamma} / kappa^gamma.
      const double p = par_[2];
      return p >= 2.0 || gamma < 1.0 / (2.0 - p);
    }
    case DriftKind::PowerLaw: {
      const double c0 = par_[0], q = par_[2];
      if (!(c0 > 0.0)) return false;
      return (2.0 - q) * gamma < 1.0;
    }
    case DriftKind::Tabulated: {
      if (!(mu_inf_ > 0.0)) return false;
      return (2.0 - below_slope_) * gamma < 1.0;
    }
  }
  throw std::logic_error("higher_moment_integrable: unreachable");
}

double DriftSpec::kappa() const {
  if (kind_ != DriftKind::Srpt) throw std::logic_error("kappa: not an SRPT drift");
  return par_[0];
}

double DriftSpec::lambda() const {
  if (kind_ != DriftKind::Srpt) throw std::logic_error("lambda: not an SRPT drift");
  return par_[1];
}

double DriftSpec::p() const {
  if (kind_ != DriftKind::Srpt) throw std::logic_error("p: not an SRPT drift");
  return par_[2];
}

double DriftSpec::natural_scale() const {
  if (kind_ != DriftKind::Srpt)
    throw std::logic_error("natural_scale: not an SRPT drift");
  return std::pow(par_[1] / par_[0], 1.0 / par_[2]);
}

std::string DriftSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case DriftKind::Srpt:
      os << "srpt(kappa=" << par_[0] << ",lambda=" << par_[1] << ",p=" << par_[2]
         << ")";
      break;
    case DriftKind::PowerLaw:
      os << "power_law(c0=" << par_[0] << ",c1=" << par_[1] << ",q=" << par_[2]
         << ")";
      break;
    case DriftKind::Tabulated:
      os << "tabulated(" << tab_a_.size() << " knots)";
      break;
  }
  os << " sigma=" << sigma_;
  return os.str();
}

} // namespace rcbm
