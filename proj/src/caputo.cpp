#include "mchom/caputo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace mchom {

namespace {

void check_order(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw std::invalid_argument(fmt::format("fractional order {} outside the open interval (1,2)", alpha));
  }
}

}  // namespace

std::vector<double> caputo_weights(double alpha, int count) {
  check_order(alpha);
  if (count < 1) throw std::invalid_argument("caputo_weights: count must be positive");
  const double e = 2.0 - alpha;
  std::vector<double> a(count);
  for (int k = 0; k < count; ++k) a[k] = std::pow(k + 1.0, e) - std::pow(static_cast<double>(k), e);
  return a;
}

CaputoScheme::CaputoScheme(double alpha, double tau, int steps)
    : alpha_(alpha), tau_(tau), sigma_(0.0), a_(caputo_weights(alpha, steps)) {
  if (!(tau > 0.0)) throw std::invalid_argument("CaputoScheme: tau must be positive");
  sigma_ = std::pow(tau, 1.0 - alpha) / std::tgamma(3.0 - alpha);
}

Vector history_term(const CaputoScheme& scheme, const FractionalHistory& history, int n,
                    const Vector& psi) {
  if (n < 1 || history.size() != static_cast<std::size_t>(n - 1)) {
    throw std::invalid_argument(fmt::format("history_term: step {} needs {} stored increments, have {}",
                                            n, n - 1, history.size()));
  }
  if (n > scheme.steps()) throw std::invalid_argument("history_term: step beyond scheme horizon");
  Vector out = scheme.weight(n - 1) * psi;
  for (int k = 1; k <= n - 1; ++k) {
    out += (scheme.weight(n - k - 1) - scheme.weight(n - k)) * history[k - 1];
  }
  return out;
}

MixedCaputo::MixedCaputo(std::vector<CaputoScheme> schemes, std::vector<double> coefficients)
    : schemes_(std::move(schemes)), coefficients_(std::move(coefficients)) {
  if (schemes_.empty() || schemes_.size() != coefficients_.size()) {
    throw std::invalid_argument("MixedCaputo: need one coefficient per scheme");
  }
  for (const auto& s : schemes_) {
    if (s.tau() != schemes_.front().tau()) {
      throw std::invalid_argument("MixedCaputo: all orders must share the time step");
    }
  }
}

double MixedCaputo::implicit() const {
  double s = 0.0;
  for (std::size_t p = 0; p < schemes_.size(); ++p) s += coefficients_[p] * schemes_[p].implicit_coefficient();
  return s;
}

Vector MixedCaputo::explicit_term(const FractionalHistory& history, int n, const Vector& psi) const {
  Vector out = Vector::Zero(psi.size());
  for (std::size_t p = 0; p < schemes_.size(); ++p) {
    if (coefficients_[p] == 0.0) continue;
    out += coefficients_[p] * schemes_[p].sigma() * history_term(schemes_[p], history, n, psi);
  }
  return out;
}

std::vector<double> solve_scalar_fractional_ode(const std::vector<double>& alphas,
                                                const std::vector<double>& coefficients,
                                                double lambda, double tau, int steps,
                                                const std::function<double(double)>& g, double u0,
                                                double v0) {
  if (alphas.empty() || alphas.size() != coefficients.size()) {
    throw std::invalid_argument("solve_scalar_fractional_ode: one coefficient per order");
  }
  if (!(tau > 0.0) || steps < 1) throw std::invalid_argument("solve_scalar_fractional_ode: bad time grid");
  std::vector<std::vector<double>> a;
  std::vector<double> sigma;
  for (double alpha : alphas) {
    a.push_back(caputo_weights(alpha, steps));
    sigma.push_back(std::pow(tau, 1.0 - alpha) / std::tgamma(3.0 - alpha));
  }
  std::vector<double> u{u0};
  std::vector<double> du;  // du[k-1] = (u^k - u^{k-1}) / tau
  for (int n = 1; n <= steps; ++n) {
    // sum_p c_p sigma_p [a0 (u^n - u^{n-1})/tau - S_p] + lambda (u^n + u^{n-1})/2 = g
    double lhs = 0.5 * lambda;
    double rhs = g((n - 0.5) * tau) - 0.5 * lambda * u[n - 1];
    for (std::size_t p = 0; p < alphas.size(); ++p) {
      double s = a[p][n - 1] * v0;
      for (int k = 1; k <= n - 1; ++k) s += (a[p][n - k - 1] - a[p][n - k]) * du[k - 1];
      const double c = coefficients[p] * sigma[p];
      lhs += c * a[p][0] / tau;
      rhs += c * (a[p][0] / tau * u[n - 1] + s);
    }
    u.push_back(rhs / lhs);
    du.push_back((u[n] - u[n - 1]) / tau);
  }
  return u;
}

}  // namespace mchom
