#include "plgw/constitutive.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace plgw {

BFunction BFunction::identity() {
  BFunction b;
  b.kind_ = BKind::identity;
  return b;
}

BFunction BFunction::power_root(double scale, double k) {
  if (!(scale > 0.0) || !(k > 0.0))
    throw std::invalid_argument("BFunction::power_root: scale and k must be positive");
  BFunction b;
  b.kind_ = BKind::power_root;
  b.scale_ = scale;
  b.k_ = k;
  return b;
}

BFunction BFunction::aquifer_head(double phi_eff, double p, double H) {
  if (!(phi_eff > 0.0) || !(phi_eff <= 1.0))
    throw std::invalid_argument("BFunction::aquifer_head: phi_eff must lie in (0,1]");
  if (!(p > 1.0)) throw std::invalid_argument("BFunction::aquifer_head: p must exceed 1");
  if (!(H >= 0.0)) throw std::invalid_argument("BFunction::aquifer_head: H must be nonnegative");
  BFunction b;
  b.kind_ = BKind::aquifer_head;
  b.phi_ = phi_eff;
  b.p_ = p;
  b.H_ = H;
  b.Hpow_ = std::pow(H, p / (p - 1.0));
  return b;
}

BFunction BFunction::leibenson(double kappa) {
  if (!(kappa > 0.0) || !(kappa < 1.0))
    throw std::invalid_argument("BFunction::leibenson: kappa must lie in (0,1)");
  const double s = 1.0 / (1.0 - kappa);
  return power_root(s, s);
}

double BFunction::eval(double s) const {
  if (s < 0.0) throw std::domain_error("BFunction::eval: negative argument");
  switch (kind_) {
    case BKind::identity:
      return s;
    case BKind::power_root:
      return scale_ * std::pow(s, 1.0 / k_);
    case BKind::aquifer_head: {
      const double q = p_ / (p_ - 1.0);
      return phi_ * std::pow(q, p_ - 1.0) * (std::pow(s + Hpow_, 1.0 / q) - H_);
    }
  }
  return 0.0;
}

double BFunction::prime(double s) const {
  if (!(s > 0.0)) throw std::domain_error("BFunction::prime: argument must be positive");
  switch (kind_) {
    case BKind::identity:
      return 1.0;
    case BKind::power_root:
      return (scale_ / k_) * std::pow(s, 1.0 / k_ - 1.0);
    case BKind::aquifer_head:
      return phi_ * std::pow(p_ / (p_ - 1.0), p_ - 2.0) * std::pow(s + Hpow_, -1.0 / p_);
  }
  return 0.0;
}

double BFunction::inverse(double w) const {
  if (w < 0.0) throw std::domain_error("BFunction::inverse: negative argument");
  switch (kind_) {
    case BKind::identity:
      return w;
    case BKind::power_root:
      return std::pow(w / scale_, k_);
    case BKind::aquifer_head: {
      const double q = p_ / (p_ - 1.0);
      return std::pow(w / (phi_ * std::pow(q, p_ - 1.0)) + H_, q) - Hpow_;
    }
  }
  return 0.0;
}

double BFunction::prime_limit_at_zero() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case BKind::identity:
      return 1.0;
    case BKind::power_root:
      if (k_ > 1.0) return inf;
      if (k_ < 1.0) return 0.0;
      return scale_;
    case BKind::aquifer_head:
      if (H_ > 0.0)
        return phi_ * std::pow(p_ / (p_ - 1.0), p_ - 2.0) * std::pow(H_, -1.0 / (p_ - 1.0));
      return inf;
  }
  return 0.0;
}

double BFunction::prime_lower_bound(double s_max) const {
  if (!(s_max > 0.0))
    throw std::invalid_argument("BFunction::prime_lower_bound: s_max must be positive");
  switch (kind_) {
    case BKind::identity:
      return 1.0;
    case BKind::power_root:
      // b' = (scale/k) s^{1/k-1}: monotone, so the infimum sits at an endpoint.
      if (k_ > 1.0) return prime(s_max);
      if (k_ < 1.0) return 0.0;
      return scale_;
    case BKind::aquifer_head:
      return prime(s_max);  // decreasing in s
  }
  return 0.0;
}

bool BFunction::same_as(const BFunction& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case BKind::identity:
      return true;
    case BKind::power_root:
      return scale_ == other.scale_ && k_ == other.k_;
    case BKind::aquifer_head:
      return phi_ == other.phi_ && p_ == other.p_ && H_ == other.H_;
  }
  return false;
}

std::string BFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case BKind::identity:
      os << "identity";
      break;
    case BKind::power_root:
      os << "power_root(scale=" << scale_ << ", k=" << k_ << ")";
      break;
    case BKind::aquifer_head:
      os << "aquifer_head(phi_eff=" << phi_ << ", p=" << p_ << ", H=" << H_ << ")";
      break;
  }
  return os.str();
}

SmpVerdict smp_condition(const BFunction& b, double p) {
  if (!(p > 1.0) || !(p < 2.0))
    throw std::invalid_argument("smp_condition: requires 1 < p < 2");
  switch (b.kind()) {
    case BKind::identity:
      // s^{2-p} / |log s|^{p-1} -> 0.
      return SmpVerdict::holds;
    case BKind::power_root: {
      // g(s) = (scale/k) s^{(1 - k(p-1))/k} / |log s|^{p-1}.
      const double e = (1.0 - b.k() * (p - 1.0)) / b.k();
      if (e < 0.0) return SmpVerdict::fails;
      return SmpVerdict::holds;  // e > 0 -> 0; e = 0 -> 1/|log s|^{p-1} -> 0
    }
    case BKind::aquifer_head: {
      if (b.H() > 0.0) return SmpVerdict::holds;  // finite b'(0+)
      // H = 0: b' ~ s^{-1/p}, exponent 2 - p - 1/p = -(p-1)^2/p < 0.
      return SmpVerdict::fails;
    }
  }
  return SmpVerdict::inconclusive;
}

std::string to_string(SmpVerdict v) {
  switch (v) {
    case SmpVerdict::holds:
      return "holds";
    case SmpVerdict::fails:
      return "fails";
    case SmpVerdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

ConstitutiveLaw::ConstitutiveLaw(double c_, double m_) : c(c_), m(m_) {
  if (!(c > 0.0)) throw std::invalid_argument("ConstitutiveLaw: c must be positive");
  if (!(m > 0.0)) throw std::invalid_argument("ConstitutiveLaw: m must be positive");
}

std::vector<double> ConstitutiveLaw::flux_from_gradient(std::span<const double> grad) const {
  std::vector<double> q(grad.size(), 0.0);
  double norm2 = 0.0;
  for (double g : grad) {
    if (!std::isfinite(g)) throw std::domain_error("flux_from_gradient: non-finite gradient");
    norm2 += g * g;
  }
  if (norm2 == 0.0) return q;
  const double mag = std::sqrt(norm2);
  const double factor = -c * std::pow(mag, m - 1.0);
  for (size_t i = 0; i < q.size(); ++i) q[i] = factor * grad[i];
  return q;
}

HeadTransform::HeadTransform(double p, double H) : p_(p), H_(H) {
  if (!(p > 1.0)) throw std::invalid_argument("HeadTransform: p must exceed 1");
  if (!(H >= 0.0)) throw std::invalid_argument("HeadTransform: H must be nonnegative");
  Hpow_ = std::pow(H, p / (p - 1.0));
}

double HeadTransform::head_to_u(double hhat) const {
  if (hhat < 0.0) throw std::domain_error("HeadTransform::head_to_u: negative head");
  return std::pow(hhat, p_ / (p_ - 1.0)) - Hpow_;
}

double HeadTransform::u_to_head(double u) const {
  if (u < -Hpow_) throw std::domain_error("HeadTransform::u_to_head: argument below -H^{p/(p-1)}");
  return std::pow(u + Hpow_, (p_ - 1.0) / p_);
}

double source_to_f(double p, double ghat) {
  if (!(p > 1.0)) throw std::domain_error("source_to_f: p must exceed 1");
  return std::pow(p / (p - 1.0), p - 1.0) * ghat;
}

}  // namespace plgw
