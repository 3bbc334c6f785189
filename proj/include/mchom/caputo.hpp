#pragma once

#include <functional>
#include <vector>

#include "mchom/fem.hpp"

namespace mchom {

/// a_k = (k+1)^{2-alpha} - k^{2-alpha}, k = 0..count-1, for 1 < alpha < 2.
std::vector<double> caputo_weights(double alpha, int count);

/// L1-type discretization of the Caputo derivative of order 1 < alpha < 2:
///
///   D^alpha u(t_{n-1/2}) ~ sigma * [ a_0 du^n - sum_{k=1}^{n-1} (a_{n-k-1} - a_{n-k}) du^k
///                                    - a_{n-1} psi ],
///
/// with du^k = (u^k - u^{k-1}) / tau, sigma = tau^{1-alpha} / Gamma(3-alpha)
/// and psi the initial velocity.
class CaputoScheme {
 public:
  CaputoScheme(double alpha, double tau, int steps);

  double alpha() const { return alpha_; }
  double tau() const { return tau_; }
  int steps() const { return static_cast<int>(a_.size()); }
  double sigma() const { return sigma_; }
  double weight(int k) const { return a_.at(k); }
  const std::vector<double>& weights() const { return a_; }

  /// Coefficient multiplying u^n once the scheme is written as
  /// implicit * u^n - (implicit * u^{n-1} + sigma * history_term).
  double implicit_coefficient() const { return sigma_ * a_[0] / tau_; }

 private:
  double alpha_;
  double tau_;
  double sigma_;
  std::vector<double> a_;
};

/// Difference quotients du^k = (u^k - u^{k-1}) / tau for k = 1..n-1.
class FractionalHistory {
 public:
  void append(Vector increment) { increments_.push_back(std::move(increment)); }
  void push_step(const Vector& current, const Vector& previous, double tau) {
    increments_.push_back((current - previous) / tau);
  }
  std::size_t size() const { return increments_.size(); }
  const Vector& operator[](std::size_t k) const { return increments_[k]; }
  void clear() { increments_.clear(); }

 private:
  std::vector<Vector> increments_;
};

/// sum_{k=1}^{n-1} (a_{n-k-1} - a_{n-k}) du^k + a_{n-1} psi, requiring
/// history.size() == n - 1.
Vector history_term(const CaputoScheme& scheme, const FractionalHistory& history, int n,
                    const Vector& psi);

/// sum_p c_p D^{alpha_p} over a shared history of du. For step n the
/// combination equals implicit() * du^n ... written in the u^n form:
///
///   sum_p c_p D^{alpha_p} u ~ implicit() * (u^n - u^{n-1}) - explicit_term(n)
///
/// where explicit_term sums c_p sigma_p history_term_p.
class MixedCaputo {
 public:
  MixedCaputo(std::vector<CaputoScheme> schemes, std::vector<double> coefficients);

  std::size_t orders() const { return schemes_.size(); }
  const CaputoScheme& scheme(std::size_t p) const { return schemes_.at(p); }
  double coefficient(std::size_t p) const { return coefficients_.at(p); }

  double implicit() const;
  Vector explicit_term(const FractionalHistory& history, int n, const Vector& psi) const;

 private:
  std::vector<CaputoScheme> schemes_;
  std::vector<double> coefficients_;
};

/// Independent scalar solver for sum_p c_p D^{alpha_p} u + lambda u = g(t)
/// with the same scheme, the reaction averaged at t_{n-1/2} and g sampled
/// at t_{n-1/2}. Returns u^0..u^steps. History is re-summed directly.
std::vector<double> solve_scalar_fractional_ode(const std::vector<double>& alphas,
                                                const std::vector<double>& coefficients,
                                                double lambda, double tau, int steps,
                                                const std::function<double(double)>& g, double u0,
                                                double v0);

}  // namespace mchom
