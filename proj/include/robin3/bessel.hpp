#pragma once

namespace robin3 {

/// First positive zeros of J_1 and J_1'.
inline constexpr double kJ11 = 3.8317059702075123156;
inline constexpr double kJ11Prime = 1.8411837813406593026;
inline constexpr double kJ01 = 2.4048255576957727686;

/// Bessel function of the first kind J_n(x), n in {0, 1, 2}, 0 <= x <= 50.
/// Absolute error below 1e-14 on the whole range.
double bessel_j(int order, double x);

/// J_n'(x) for n in {0, 1, 2}; J_1'(0) = 1/2.
double bessel_j_prime(int order, double x);

/// J_n(x) / x^n, finite at the origin (1, 1/2, 1/8 for n = 0, 1, 2).
double bessel_j_scaled(int order, double x);

/// Modified Bessel function I_n(y), n in {0, 1}, 0 <= y <= 50.
double bessel_i(int order, double y);

}  // namespace robin3
