#include "plgw/barenblatt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "plgw/numerics.hpp"

namespace plgw {

namespace {
constexpr double kRegimeTol = 1e-12;
constexpr double kQuadTol = 1e-10;

double regime_indicator(double k, double p) { return k * (p - 1.0) - 1.0; }
}  // namespace

SimilarityExponents similarity_exponents(int N, double k, double p) {
  if (N < 1) throw std::invalid_argument("similarity_exponents: N must be >= 1");
  if (!(k > 0.0)) throw std::invalid_argument("similarity_exponents: k must be positive");
  if (!(p > 1.0)) throw std::invalid_argument("similarity_exponents: p must exceed 1");
  const double denom = (N * k + 1.0) * (p - 1.0) + 1.0 - N;
  if (!(denom > 0.0))
    throw std::invalid_argument("similarity_exponents: no positive similarity exponent");
  SimilarityExponents e;
  e.lambda = 1.0 / denom;
  e.mu = N * k * e.lambda;
  return e;
}

ProfileParams profile_params(int N, double k, double p) {
  const auto exps = similarity_exponents(N, k, p);
  const double a = 1.0 / (k * (p - 1.0));
  const double coeff = ((p - 1.0) / p) * std::pow(exps.lambda, 1.0 / (p - 1.0));
  ProfileParams pp;
  const double ind = regime_indicator(k, p);
  if (std::abs(ind) <= kRegimeTol) {
    pp.regime = Regime::exponential;
    pp.gamma_exp = 0.0;
    pp.kappa = coeff;
  } else if (ind > 0.0) {
    pp.regime = Regime::compact;
    pp.gamma_exp = 1.0 / (1.0 - a);  // = k(p-1)/(k(p-1)-1) > 0
    pp.kappa = (1.0 - a) * coeff;
  } else {
    pp.regime = Regime::fat_tail;
    pp.gamma_exp = 1.0 / (1.0 - a);  // < 0
    pp.kappa = (a - 1.0) * coeff;
  }
  return pp;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::compact:
      return "compact";
    case Regime::exponential:
      return "exponential";
    case Regime::fat_tail:
      return "fat-tail";
  }
  return "?";
}

namespace {

double profile_value(const ProfileParams& pp, double C, double p, double s) {
  const double q = p / (p - 1.0);
  const double sq = std::pow(s, q);
  switch (pp.regime) {
    case Regime::compact: {
      const double z = C - pp.kappa * sq;
      return z > 0.0 ? std::pow(z, pp.gamma_exp) : 0.0;
    }
    case Regime::exponential:
      return C * std::exp(-pp.kappa * sq);
    case Regime::fat_tail:
      return std::pow(C + pp.kappa * sq, pp.gamma_exp);
  }
  return 0.0;
}

double profile_deriv(const ProfileParams& pp, double C, double p, double s) {
  const double q = p / (p - 1.0);
  if (s == 0.0) return 0.0;
  const double sq1 = q * std::pow(s, q - 1.0);
  switch (pp.regime) {
    case Regime::compact: {
      const double z = C - pp.kappa * std::pow(s, q);
      if (z <= 0.0) return 0.0;
      return -pp.gamma_exp * std::pow(z, pp.gamma_exp - 1.0) * pp.kappa * sq1;
    }
    case Regime::exponential:
      return -C * std::exp(-pp.kappa * std::pow(s, q)) * pp.kappa * sq1;
    case Regime::fat_tail:
      return pp.gamma_exp * std::pow(C + pp.kappa * std::pow(s, q), pp.gamma_exp - 1.0) * pp.kappa *
             sq1;
  }
  return 0.0;
}

double mass_integral(int N, double k, double p, const ProfileParams& pp, double C,
                     MassNormalization mode) {
  const double w = (mode == MassNormalization::conserved_mass) ? 1.0 / k : 1.0;
  const double q = p / (p - 1.0);
  auto integrand = [&](double s) {
    const double B = profile_value(pp, C, p, s);
    return std::pow(B, w) * std::pow(s, static_cast<double>(N - 1));
  };
  double upper;
  if (pp.regime == Regime::compact) {
    upper = std::pow(C / pp.kappa, 1.0 / q);
  } else {
    if (pp.regime == Regime::fat_tail) {
      // tail decays like s^{q gamma w + N - 1}; need q |gamma| w > N
      const double decay = q * std::abs(pp.gamma_exp) * w;
      if (!(decay > static_cast<double>(N)))
        throw std::runtime_error("normalize_mass: tail integral diverges for this regime");
    }
    // extend until the integrand falls below 1e-14 of its peak
    double peak = 0.0;
    for (double s = 0.0; s <= 4.0; s += 0.05) peak = std::max(peak, integrand(s));
    if (peak == 0.0) peak = 1.0;
    upper = 1.0;
    while (integrand(upper) > 1e-14 * peak && upper < 1e12) upper *= 2.0;
  }
  return adaptive_simpson(integrand, 0.0, upper, kQuadTol);
}

}  // namespace

double profile_mass(int N, double k, double p, double C, MassNormalization mode) {
  if (mode == MassNormalization::explicit_c)
    throw std::invalid_argument("profile_mass: explicit_c is not a mass functional");
  const auto pp = profile_params(N, k, p);
  return mass_integral(N, k, p, pp, C, mode);
}

double normalize_mass(int N, double k, double p, MassNormalization mode) {
  if (mode == MassNormalization::explicit_c)
    throw std::invalid_argument("normalize_mass: explicit_c requires no normalization");
  // The mass is strictly monotone in C (increasing for compact/exponential
  // profiles, decreasing in the fat-tail regime), so a sign-change bracket
  // can be grown geometrically in both directions.
  auto g = [&](double C) { return profile_mass(N, k, p, C, mode) - 1.0; };
  double lo = 0.5, hi = 2.0;
  double glo = g(lo), ghi = g(hi);
  int guard = 0;
  while ((glo > 0.0) == (ghi > 0.0) && guard++ < 200) {
    lo *= 0.5;
    hi *= 2.0;
    glo = g(lo);
    ghi = g(hi);
  }
  if (guard >= 200) throw std::runtime_error("normalize_mass: bisection bracket not found");
  return bisect_root(g, lo, hi, 1e-14, 400);
}

SelfSimilarSolution::SelfSimilarSolution(int N, double k, double p, MassNormalization mode,
                                         double explicit_c)
    : N_(N), k_(k), p_(p), exps_(similarity_exponents(N, k, p)), params_(profile_params(N, k, p)),
      mode_(mode) {
  if (mode == MassNormalization::explicit_c) {
    if (!(explicit_c > 0.0))
      throw std::invalid_argument("SelfSimilarSolution: explicit C must be positive");
    C_ = explicit_c;
  } else {
    C_ = normalize_mass(N, k, p, mode);
  }
}

double SelfSimilarSolution::profile(double s) const {
  if (s < 0.0) throw std::domain_error("SelfSimilarSolution::profile: negative similarity variable");
  return profile_value(params_, C_, p_, s);
}

double SelfSimilarSolution::profile_derivative(double s) const {
  if (s < 0.0) throw std::domain_error("SelfSimilarSolution::profile_derivative: negative argument");
  return profile_deriv(params_, C_, p_, s);
}

double SelfSimilarSolution::value(double r, double t) const {
  if (!(t > 0.0)) throw std::domain_error("SelfSimilarSolution::value: t must be positive");
  const double s = std::abs(r) * std::pow(t, -exps_.lambda);
  return std::pow(t, -exps_.mu) * profile_value(params_, C_, p_, s);
}

double SelfSimilarSolution::profile_support_end() const {
  if (params_.regime != Regime::compact)
    throw std::runtime_error("SelfSimilarSolution: no finite front outside the compact regime");
  return std::pow(C_ / params_.kappa, (p_ - 1.0) / p_);
}

double SelfSimilarSolution::front_radius(double t) const {
  if (!(t > 0.0)) throw std::domain_error("SelfSimilarSolution::front_radius: t must be positive");
  return std::pow(t, exps_.lambda) * profile_support_end();
}

double SelfSimilarSolution::mass(MassNormalization mode) const {
  return mass_integral(N_, k_, p_, params_, C_, mode);
}

double pde_residual(const SelfSimilarSolution& sol, std::span<const double> r_samples,
                    std::span<const double> t_samples, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("pde_residual: h must be positive");
  const double p = sol.p();
  const int N = sol.dim();
  const double invk = 1.0 / sol.k();
  auto w = [&](double r, double t) { return sol.value(std::abs(r), t); };
  auto flux = [&](double r, double t) {
    const double g = (w(r + h, t) - w(r - h, t)) / (2.0 * h);
    return std::pow(std::abs(r), static_cast<double>(N - 1)) * std::pow(std::abs(g), p - 2.0) * g;
  };
  double worst = 0.0;
  for (double t : t_samples) {
    if (!(t > h)) throw std::invalid_argument("pde_residual: need t > h for the time stencil");
    for (double r : r_samples) {
      if (r < h) throw std::invalid_argument("pde_residual: samples must keep r >= h");
      if (sol.regime() == Regime::compact) {
        const double fmin = sol.front_radius(t - h);
        const double fmax = sol.front_radius(t + h);
        if (r > fmin - 3.0 * h && r < fmax + 3.0 * h)
          throw std::invalid_argument("pde_residual: sample too close to the front");
      }
      const double dt_term =
          (std::pow(w(r, t + h), invk) - std::pow(w(r, t - h), invk)) / (2.0 * h);
      const double div_term =
          std::pow(r, static_cast<double>(1 - N)) * (flux(r + h, t) - flux(r - h, t)) / (2.0 * h);
      worst = std::max(worst, std::abs(dt_term - div_term));
    }
  }
  return worst;
}

ShiftedSolution::ShiftedSolution(SelfSimilarSolution sol, Domain domain, std::vector<double> x0,
                                 double sigma)
    : sol_(std::move(sol)), domain_(std::move(domain)), x0_(std::move(x0)), sigma_(sigma) {
  if (sol_.regime() != Regime::compact)
    throw std::invalid_argument("ShiftedSolution: requires the compact regime");
  if (static_cast<int>(x0_.size()) != domain_.coord_dim())
    throw std::invalid_argument("ShiftedSolution: center dimension does not match domain");
  if (domain_.kind() != Domain::Kind::radial && domain_.coord_dim() != sol_.dim())
    throw std::invalid_argument("ShiftedSolution: solution dimension does not match domain");
  const double dist = domain_.distance_to_boundary(x0_);
  if (!(dist > 0.0)) throw std::invalid_argument("ShiftedSolution: center must be interior");
  const double beta = 1.0 / sol_.lambda();
  // front_radius(sigma + t) < dist  <=>  sigma + t < (kappa/C)^{beta(p-1)/p} dist^beta
  const double t_max =
      std::pow(sol_.kappa() / sol_.C(), beta * (sol_.p() - 1.0) / sol_.p()) * std::pow(dist, beta);
  if (!(sigma_ > 0.0) || !(sigma_ < 0.5 * t_max)) {
    std::ostringstream os;
    os << "ShiftedSolution: sigma must lie in (0, " << 0.5 * t_max << ")";
    throw std::invalid_argument(os.str());
  }
  horizon_ = t_max - sigma_;
}

void ShiftedSolution::ensure_valid_until(double T) const {
  if (T > horizon_) {
    std::ostringstream os;
    os << "ShiftedSolution: front exits the domain before t = " << T
       << "; maximal admissible horizon is " << horizon_;
    throw std::runtime_error(os.str());
  }
}

double ShiftedSolution::value(std::span<const double> x, double t) const {
  double r2 = 0.0;
  for (size_t i = 0; i < x0_.size(); ++i) r2 += sqr(x[i] - x0_[i]);
  return sol_.value(std::sqrt(r2), t + sigma_);
}

double ShiftedSolution::initial(std::span<const double> x) const { return value(x, 0.0); }

double ShiftedSolution::support_radius(double t) const { return sol_.front_radius(t + sigma_); }

}  // namespace plgw
