#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "cpgates/su2.hpp"

namespace cpg {

/// Raised when a jet operation needs a nonzero (or positive) constant term.
class SingularJetError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr int kDefaultJetOrder = 6;

/// Truncated bivariate Taylor polynomial sum_{m+n<=K} c_{mn} eps^m delta^n.
///
/// Arithmetic is closed at order K: products drop every monomial of total
/// degree above K, so coefficients up to degree K are exact. The partial
/// derivative d^{m+n}/d eps^m d delta^n at the origin is m! n! c_{mn}.
template <typename Scalar>
class Jet2 {
 public:
  explicit Jet2(int order = kDefaultJetOrder) : order_(order), c_(size_for(order), Scalar(0)) {
    if (order < 0) throw std::invalid_argument("jet order must be >= 0");
  }

  static Jet2 constant(Scalar value, int order = kDefaultJetOrder) {
    Jet2 j(order);
    j.c_[0] = value;
    return j;
  }
  /// The coordinate function eps.
  static Jet2 epsilon(int order = kDefaultJetOrder) {
    Jet2 j(order);
    if (order >= 1) j(1, 0) = Scalar(1);
    return j;
  }
  /// The coordinate function delta.
  static Jet2 delta(int order = kDefaultJetOrder) {
    Jet2 j(order);
    if (order >= 1) j(0, 1) = Scalar(1);
    return j;
  }

  int order() const { return order_; }

  Scalar& operator()(int m, int n) { return c_[index(m, n)]; }
  const Scalar& operator()(int m, int n) const { return c_[index(m, n)]; }

  /// Coefficient, or zero when m + n exceeds the order.
  Scalar coeff(int m, int n) const {
    if (m < 0 || n < 0 || m + n > order_) return Scalar(0);
    return c_[index(m, n)];
  }

  Scalar value() const { return c_[0]; }

  Scalar derivative(int m, int n) const {
    if (m < 0 || n < 0 || m + n > order_) {
      throw std::invalid_argument("derivative order exceeds jet order");
    }
    return c_[index(m, n)] * (factorial(m) * factorial(n));
  }

  Jet2 operator-() const {
    Jet2 r(*this);
    for (auto& v : r.c_) v = -v;
    return r;
  }

  Jet2& operator+=(const Jet2& rhs) {
    check_order(rhs);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += rhs.c_[i];
    return *this;
  }
  Jet2& operator-=(const Jet2& rhs) {
    check_order(rhs);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= rhs.c_[i];
    return *this;
  }
  Jet2& operator*=(const Jet2& rhs) { return *this = *this * rhs; }
  Jet2& operator/=(const Jet2& rhs) { return *this = *this / rhs; }

  Jet2& operator+=(const Scalar& s) {
    c_[0] += s;
    return *this;
  }
  Jet2& operator-=(const Scalar& s) {
    c_[0] -= s;
    return *this;
  }
  Jet2& operator*=(const Scalar& s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Jet2 operator+(Jet2 lhs, const Jet2& rhs) { return lhs += rhs; }
  friend Jet2 operator-(Jet2 lhs, const Jet2& rhs) { return lhs -= rhs; }
  friend Jet2 operator+(Jet2 lhs, const Scalar& rhs) { return lhs += rhs; }
  friend Jet2 operator+(const Scalar& lhs, Jet2 rhs) { return rhs += lhs; }
  friend Jet2 operator-(Jet2 lhs, const Scalar& rhs) { return lhs -= rhs; }
  friend Jet2 operator-(const Scalar& lhs, const Jet2& rhs) { return (-rhs) += lhs; }
  friend Jet2 operator*(Jet2 lhs, const Scalar& rhs) { return lhs *= rhs; }
  friend Jet2 operator*(const Scalar& lhs, Jet2 rhs) { return rhs *= lhs; }

  /// Truncated Cauchy product.
  friend Jet2 operator*(const Jet2& lhs, const Jet2& rhs) {
    lhs.check_order(rhs);
    const int k = lhs.order_;
    Jet2 out(k);
    for (int d1 = 0; d1 <= k; ++d1) {
      for (int m1 = 0; m1 <= d1; ++m1) {
        const Scalar x = lhs(m1, d1 - m1);
        if (x == Scalar(0)) continue;
        for (int d2 = 0; d1 + d2 <= k; ++d2) {
          for (int m2 = 0; m2 <= d2; ++m2) {
            out(m1 + m2, d1 - m1 + d2 - m2) += x * rhs(m2, d2 - m2);
          }
        }
      }
    }
    return out;
  }

  friend Jet2 operator/(const Jet2& lhs, const Jet2& rhs) { return lhs * reciprocal(rhs); }
  friend Jet2 operator/(Jet2 lhs, const Scalar& rhs) { return lhs *= Scalar(1) / rhs; }

  /// Coefficient-wise complex conjugate; the expansion variables are real.
  friend Jet2 conj(const Jet2& x) {
    Jet2 r(x);
    if constexpr (!std::is_floating_point_v<Scalar>) {
      for (auto& v : r.c_) v = std::conj(v);
    }
    return r;
  }

  /// Returns f(x) given the Taylor coefficients f^{(k)}(x0)/k!, k = 0..K, of f
  /// about the constant term x0 of x.
  friend Jet2 compose_series(const Jet2& x, const std::vector<Scalar>& taylor) {
    Jet2 nil(x);
    nil.c_[0] = Scalar(0);
    const int k = x.order_;
    Jet2 out = constant(taylor[static_cast<std::size_t>(k)], k);
    for (int i = k - 1; i >= 0; --i) {
      out = out * nil;
      out.c_[0] += taylor[static_cast<std::size_t>(i)];
    }
    return out;
  }

  friend Jet2 reciprocal(const Jet2& x) {
    const Scalar x0 = x.value();
    if (x0 == Scalar(0)) throw SingularJetError("division by a jet with zero constant term");
    std::vector<Scalar> t(static_cast<std::size_t>(x.order_) + 1);
    Scalar p = Scalar(1) / x0;
    for (int i = 0; i <= x.order_; ++i) {
      t[static_cast<std::size_t>(i)] = p;
      p *= -Scalar(1) / x0;
    }
    return compose_series(x, t);
  }

  friend Jet2 sin(const Jet2& x) {
    using std::cos;
    using std::sin;
    const Scalar s = sin(x.value());
    const Scalar c = cos(x.value());
    const Scalar cycle[4] = {s, c, -s, -c};
    std::vector<Scalar> t(static_cast<std::size_t>(x.order_) + 1);
    for (int i = 0; i <= x.order_; ++i) t[static_cast<std::size_t>(i)] = cycle[i % 4] / factorial(i);
    return compose_series(x, t);
  }

  friend Jet2 cos(const Jet2& x) {
    using std::cos;
    using std::sin;
    const Scalar s = sin(x.value());
    const Scalar c = cos(x.value());
    const Scalar cycle[4] = {c, -s, -c, s};
    std::vector<Scalar> t(static_cast<std::size_t>(x.order_) + 1);
    for (int i = 0; i <= x.order_; ++i) t[static_cast<std::size_t>(i)] = cycle[i % 4] / factorial(i);
    return compose_series(x, t);
  }

  friend Jet2 exp(const Jet2& x) {
    using std::exp;
    const Scalar e = exp(x.value());
    std::vector<Scalar> t(static_cast<std::size_t>(x.order_) + 1);
    for (int i = 0; i <= x.order_; ++i) t[static_cast<std::size_t>(i)] = e / factorial(i);
    return compose_series(x, t);
  }

  friend Jet2 sqrt(const Jet2& x) {
    const Scalar x0 = x.value();
    double re = 0.0;
    if constexpr (std::is_floating_point_v<Scalar>) {
      re = x0;
    } else {
      if (x0.imag() != 0.0) throw SingularJetError("sqrt of a jet with non-real constant term");
      re = x0.real();
    }
    if (!(re > 0.0)) throw SingularJetError("sqrt of a jet with non-positive constant term");
    // binom(1/2, i) * x0^{1/2 - i}
    std::vector<Scalar> t(static_cast<std::size_t>(x.order_) + 1);
    double binom = 1.0;
    double pw = std::sqrt(re);
    for (int i = 0; i <= x.order_; ++i) {
      t[static_cast<std::size_t>(i)] = Scalar(binom * pw);
      binom *= (0.5 - i) / (i + 1.0);
      pw /= re;
    }
    return compose_series(x, t);
  }

 private:
  static std::size_t size_for(int order) {
    return static_cast<std::size_t>((order + 1) * (order + 2) / 2);
  }
  // Graded layout: all monomials of total degree d are contiguous.
  std::size_t index(int m, int n) const {
    const int d = m + n;
    return static_cast<std::size_t>(d * (d + 1) / 2 + n);
  }
  void check_order(const Jet2& rhs) const {
    if (rhs.order_ != order_) throw std::invalid_argument("jet order mismatch");
  }
  static double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }

  int order_;
  std::vector<Scalar> c_;
};

using ComplexJet = Jet2<Complex>;
using UnitaryJet = CayleyKlein<ComplexJet>;

/// Partial derivative order (m in eps, n in delta).
struct DerivativeOrder {
  int eps = 0;
  int delta = 0;

  int total() const { return eps + delta; }
  friend bool operator==(const DerivativeOrder&, const DerivativeOrder&) = default;
  /// Sorted by total degree, then by the eps order.
  friend bool operator<(const DerivativeOrder& l, const DerivativeOrder& r) {
    if (l.total() != r.total()) return l.total() < r.total();
    return l.eps < r.eps;
  }
};

/// Jet of a single pulse's Cayley-Klein pair about (eps, delta) = (0, 0).
UnitaryJet propagator_jet(const Pulse& pulse, int order = kDefaultJetOrder);

/// Jet of the composite propagator, pulse 0 rightmost.
UnitaryJet sequence_jet(std::span<const Pulse> pulses, int order = kDefaultJetOrder);
UnitaryJet sequence_jet(const CompositeSequence& seq, int order = kDefaultJetOrder);

/// D_{m,n} of the full 2x2 matrix represented by a Cayley-Klein jet.
GateMatrix derivative_matrix(const UnitaryJet& jet, int m, int n);

/// D_{m,n} of the composite propagator at the nominal point.
GateMatrix sequence_derivative(const CompositeSequence& seq, int m, int n, int order = kDefaultJetOrder);

}  // namespace cpg
