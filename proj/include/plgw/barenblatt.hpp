#pragma once

#include <span>
#include <string>
#include <vector>

#include "plgw/domain.hpp"

namespace plgw {

enum class Regime { compact, exponential, fat_tail };

enum class MassNormalization {
  solution_mass,   // integral of B(s) s^{N-1} ds = 1
  conserved_mass,  // integral of B(s)^{1/k} s^{N-1} ds = 1 (the flow invariant)
  explicit_c
};

struct SimilarityExponents {
  double lambda;  // similarity length exponent, 1/beta
  double mu;      // time-decay exponent of the prefactor, mu = N k lambda
};

/// Exponents of the self-similar ansatz w(r,t) = t^{-mu} B(r t^{-lambda}) for
/// d/dt w^{1/k} = radial p-Laplacian of w in dimension N. Throws when
/// (Nk+1)(p-1)+1-N <= 0 (no positive similarity exponent exists).
SimilarityExponents similarity_exponents(int N, double k, double p);

struct ProfileParams {
  Regime regime;
  double gamma_exp;  // outer exponent; negative in the fat-tail regime, unused for exponential
  double kappa;      // profile coefficient (exponential: coefficient in the exponent)
};

ProfileParams profile_params(int N, double k, double p);

std::string to_string(Regime r);

/// Radially symmetric self-similar solution w(r,t) = t^{-mu} B(r t^{-lambda}),
/// with the profile determined by the exact first integral
/// |B'|^{p-2} B' + lambda s B^{1/k} = 0:
///   compact     (k(p-1) > 1): B = [max(0, C - kappa s^{p/(p-1)})]^{gamma}
///   exponential (k(p-1) = 1): B = C exp(-kappa s^{p/(p-1)})
///   fat-tail    (k(p-1) < 1): B = (C + kappa s^{p/(p-1)})^{gamma}, gamma < 0
class SelfSimilarSolution {
 public:
  SelfSimilarSolution(int N, double k, double p,
                      MassNormalization mode = MassNormalization::solution_mass,
                      double explicit_c = 1.0);

  int dim() const { return N_; }
  double k() const { return k_; }
  double p() const { return p_; }
  Regime regime() const { return params_.regime; }
  double lambda() const { return exps_.lambda; }
  double mu() const { return exps_.mu; }
  double gamma_exp() const { return params_.gamma_exp; }
  double kappa() const { return params_.kappa; }
  double C() const { return C_; }
  MassNormalization normalization() const { return mode_; }

  double profile(double s) const;             // B(s), s >= 0
  double profile_derivative(double s) const;  // B'(s)
  double value(double r, double t) const;     // w(r,t); t > 0 else domain error
  double front_radius(double t) const;        // compact regime only
  double profile_support_end() const;         // s* with B(s*) = 0; compact only

  /// Mass functional at the current C (t-invariant by construction).
  double mass(MassNormalization mode) const;

 private:
  int N_;
  double k_, p_;
  SimilarityExponents exps_;
  ProfileParams params_;
  MassNormalization mode_;
  double C_;
};

/// Profile mass as a function of C for the given (N,k,p); used by the
/// normalization bisection and exposed for tests.
double profile_mass(int N, double k, double p, double C, MassNormalization mode);

/// C such that the selected mass functional equals one, found by monotone
/// bisection with adaptive quadrature. Throws when the tail integral diverges.
double normalize_mass(int N, double k, double p, MassNormalization mode);

/// Max |d/dt w^{1/k} - r^{1-N} d/dr (r^{N-1} |dw/dr|^{p-2} dw/dr)| over the
/// sample product, evaluated by nested central differences of width h.
/// Samples must keep a distance of at least 3h from the front and h from r=0.
double pde_residual(const SelfSimilarSolution& sol, std::span<const double> r_samples,
                    std::span<const double> t_samples, double h);

/// The compactly supported solution recentred at x0 and started at time
/// sigma > 0: u(x,t) = w(|x - x0|, t + sigma). A classical solution of the
/// zero-source problem while the front stays inside the domain.
class ShiftedSolution {
 public:
  ShiftedSolution(SelfSimilarSolution sol, Domain domain, std::vector<double> x0, double sigma);

  /// Largest t with front_radius(sigma + t) < dist(x0, boundary).
  double horizon() const { return horizon_; }
  double sigma() const { return sigma_; }
  const SelfSimilarSolution& solution() const { return sol_; }
  const Domain& domain() const { return domain_; }

  /// Throws (reporting the admissible horizon) if the front leaves the
  /// domain before time T.
  void ensure_valid_until(double T) const;

  double value(std::span<const double> x, double t) const;
  double initial(std::span<const double> x) const;
  double support_radius(double t) const;  // front radius at solver time t

 private:
  SelfSimilarSolution sol_;
  Domain domain_;
  std::vector<double> x0_;
  double sigma_;
  double horizon_;
};

}  // namespace plgw
