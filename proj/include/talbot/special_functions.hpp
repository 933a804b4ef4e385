#ifndef TALBOT_SPECIAL_FUNCTIONS_HPP
#define TALBOT_SPECIAL_FUNCTIONS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace talbot {

/// Complex Fresnel integral F(s) = C(s) + i S(s) = \int_0^s exp(i pi u^2 / 2) du.
///
/// Power series below |s| = 1.8, the Lentz continued fraction of the
/// complementary error function up to |s| = 6, and the asymptotic expansion
/// beyond. Accurate to a few ulp of max(|F|, 1) on the whole real line.
template <typename Real>
std::complex<Real> fresnel(Real s)
{
  using Complex = std::complex<Real>;
  constexpr Real pi = std::numbers::pi_v<Real>;
  constexpr Real eps = std::numeric_limits<Real>::epsilon();
  const Real ax = std::abs(s);
  Complex result;

  if (ax < Real(1.8)) {
    // F(s) = sum_m (i pi s^2 / 2)^m / m! * s / (2m + 1)
    const Complex w(Real(0), pi * ax * ax / Real(2));
    Complex power(1, 0);
    Complex sum(0, 0);
    for (int m = 0; m < 60; ++m) {
      const Complex term = power * (ax / Real(2 * m + 1));
      sum += term;
      if (std::abs(term) < eps * std::abs(sum)) break;
      power *= w / Real(m + 1);
    }
    result = sum;
  } else if (ax < Real(6)) {
    const Real tiny = std::numeric_limits<Real>::min() / eps;
    Complex b(Real(1), -pi * ax * ax);
    Complex c = Real(1) / tiny;
    Complex d = Real(1) / b;
    Complex h = d;
    int n = -1;
    for (int k = 2; k < 400; ++k) {
      n += 2;
      const Real a = -Real(n) * Real(n + 1);
      b += Real(4);
      d = Real(1) / (a * d + b);
      c = b + a / c;
      const Complex del = c * d;
      h *= del;
      if (std::abs(del.real() - Real(1)) + std::abs(del.imag()) < eps) break;
    }
    h *= Complex(ax, -ax);
    const Real phase = pi * ax * ax / Real(2);
    result = Complex(Real(0.5), Real(0.5)) *
             (Complex(1, 0) - Complex(std::cos(phase), std::sin(phase)) * h);
  } else {
    // \int_s^inf exp(i pi u^2/2) du = i exp(i pi s^2/2)/(pi s) * sum_m (2m-1)!! / (i pi s^2)^m
    const Complex w(Real(0), pi * ax * ax);
    Complex term(1, 0);
    Complex sum(1, 0);
    for (int m = 1; m < 80; ++m) {
      const Complex next = term * (Real(2 * m - 1) / w);
      if (std::abs(next) > std::abs(term)) break;
      term = next;
      sum += term;
      if (std::abs(term) < eps) break;
    }
    const Real phase = pi * ax * ax / Real(2);
    const Complex tail = Complex(0, 1) * Complex(std::cos(phase), std::sin(phase)) /
                         (pi * ax) * sum;
    result = Complex(Real(0.5), Real(0.5)) - tail;
  }
  return s < Real(0) ? -result : result;
}

/// Auxiliary function A(s) = exp(-i pi s^2 / 2) \int_s^inf exp(i pi u^2 / 2) du,
/// so that F(s) = (1 + i) / 2 - A(s) exp(i pi s^2 / 2) for s >= 0. A is smooth
/// and non-oscillatory, A(0) = (1 + i) / 2, A(s) ~ i / (pi s) for large s.
template <typename Real>
std::complex<Real> fresnel_aux(Real s)
{
  using Complex = std::complex<Real>;
  constexpr Real pi = std::numbers::pi_v<Real>;
  const Real phase = pi * s * s / Real(2);
  return (Complex(Real(0.5), Real(0.5)) - fresnel(s)) * Complex(std::cos(phase), -std::sin(phase));
}

/// Tabulated fresnel_aux for s >= 0: piecewise Chebyshev interpolants on
/// [0, 8] and the asymptotic series beyond. Agrees with the reference to
/// about 1e-15 absolute.
class FresnelAuxTable {
 public:
  static const FresnelAuxTable& instance()
  {
    static const FresnelAuxTable table;
    return table;
  }

  std::complex<double> operator()(double s) const
  {
    if (s >= kLimit) {
      // A(s) = i / (pi s) * sum_m (-i)^m a_m, a_m = (2m-1)!! / (pi s^2)^m.
      const double q = 1 / (std::numbers::pi * s * s);
      double a = 1, re = 1, im = 0;
      for (int m = 1; m < 30 && a > 1e-17; ++m) {
        a *= double(2 * m - 1) * q;
        switch (m % 4) {
          case 1: im -= a; break;
          case 2: re -= a; break;
          case 3: im += a; break;
          default: re += a;
        }
      }
      return std::complex<double>(-im, re) / (std::numbers::pi * s);
    }
    const int cell = std::min(kCells - 1, static_cast<int>(s * kCellsPerUnit));
    const double u = 2 * (s * kCellsPerUnit - cell) - 1;
    const std::complex<double>* c = &coeff_[std::size_t(cell) * kOrder];
    std::complex<double> b1 = 0, b2 = 0;
    for (int j = kOrder - 1; j >= 1; --j) {
      const std::complex<double> b0 = 2 * u * b1 - b2 + c[j];
      b2 = b1;
      b1 = b0;
    }
    return u * b1 - b2 + c[0];
  }

 private:
  static constexpr int kOrder = 14;
  static constexpr int kCellsPerUnit = 16;
  static constexpr double kLimit = 8;
  static constexpr int kCells = int(kLimit) * kCellsPerUnit;

  FresnelAuxTable() : coeff_(std::size_t(kCells) * kOrder)
  {
    constexpr double pi = std::numbers::pi;
    std::vector<std::complex<double>> values(kOrder);
    for (int cell = 0; cell < kCells; ++cell) {
      for (int k = 0; k < kOrder; ++k) {
        const double u = std::cos(pi * (k + 0.5) / kOrder);
        values[k] = fresnel_aux<long double>((cell + 0.5L * (u + 1)) / kCellsPerUnit);
      }
      for (int j = 0; j < kOrder; ++j) {
        std::complex<double> sum = 0;
        for (int k = 0; k < kOrder; ++k) sum += values[k] * std::cos(pi * j * (k + 0.5) / kOrder);
        coeff_[std::size_t(cell) * kOrder + j] = sum * (j == 0 ? 1.0 : 2.0) / double(kOrder);
      }
    }
  }

  std::vector<std::complex<double>> coeff_;
};

/// pi/2 - Si(x) for x >= 0, i.e. \int_x^inf sin(t)/t dt.
template <typename Real>
Real sine_integral_tail(Real x)
{
  using Complex = std::complex<Real>;
  constexpr Real pi = std::numbers::pi_v<Real>;
  constexpr Real eps = std::numeric_limits<Real>::epsilon();
  if (x < Real(0)) return pi - sine_integral_tail(-x);
  if (x < Real(2)) {
    Real sum = 0;
    Real power = x;  // x^(2n+1) / (2n+1)!
    for (int n = 0; n < 40; ++n) {
      const Real term = power / Real(2 * n + 1);
      sum += (n % 2 == 0) ? term : -term;
      if (term < eps * std::abs(sum)) break;
      power *= x * x / (Real(2 * n + 2) * Real(2 * n + 3));
    }
    return pi / Real(2) - sum;
  }
  const Real tiny = std::numeric_limits<Real>::min() / eps;
  Complex b(Real(1), x);
  Complex c = Real(1) / tiny;
  Complex d = Real(1) / b;
  Complex h = d;
  for (int i = 2; i < 400; ++i) {
    const Real a = -Real(i - 1) * Real(i - 1);
    b += Real(2);
    d = Real(1) / (a * d + b);
    c = b + a / c;
    const Complex del = c * d;
    h *= del;
    if (std::abs(del.real() - Real(1)) + std::abs(del.imag()) < eps) break;
  }
  h *= Complex(std::cos(x), -std::sin(x));
  return -h.imag();
}

/// sin(u)/u with the removable singularity filled in.
template <typename Real>
Real sinc(Real u)
{
  if (std::abs(u) < Real(1e-4)) return Real(1) - u * u / Real(6);
  return std::sin(u) / u;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
template <typename Real>
std::pair<std::vector<Real>, std::vector<Real>> gauss_legendre(int order)
{
  constexpr Real pi = std::numbers::pi_v<Real>;
  std::vector<Real> nodes(order), weights(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    Real z = std::cos(pi * (Real(i) + Real(0.75)) / (Real(order) + Real(0.5)));
    Real dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1, p1 = 0;
      for (int j = 0; j < order; ++j) {
        const Real p2 = p1;
        p1 = p0;
        p0 = (Real(2 * j + 1) * z * p1 - Real(j) * p2) / Real(j + 1);
      }
      dp = Real(order) * (z * p0 - p1) / (z * z - Real(1));
      const Real dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < Real(4) * std::numeric_limits<Real>::epsilon()) break;
    }
    nodes[i] = -z;
    nodes[order - 1 - i] = z;
    weights[i] = weights[order - 1 - i] = Real(2) / ((Real(1) - z * z) * dp * dp);
  }
  return {nodes, weights};
}

}  // namespace talbot

#endif
