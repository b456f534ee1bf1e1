#include "robin3/bessel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace robin3 {
namespace {

constexpr double kSeriesLimit = 8.0;

void check_order(int order, int max_order) {
  if (order < 0 || order > max_order)
    throw std::invalid_argument("bessel: unsupported order " + std::to_string(order));
}

void check_arg(double x) {
  if (!(x >= 0.0 && x <= 50.0)) throw std::domain_error("bessel: argument outside [0, 50]");
}

// sum_k (-1)^k (x/2)^(2k) / (k! (k+n)!) * 2^-n, i.e. J_n(x) / x^n.
double scaled_series(int n, double x) {
  const double q = -0.25 * x * x;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term /= 2.0 * i;
  double sum = term;
  for (int k = 1; k < 80; ++k) {
    term *= q / (double(k) * double(k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's backward recurrence normalized by J_0 + 2 sum J_2k = 1.
void miller(double x, double out[3]) {
  int start = 2 * ((static_cast<int>(x) + 20 + static_cast<int>(std::sqrt(60.0 * x))) / 2);
  double jp1 = 0.0;
  double j = 1e-30;
  double norm = 0.0;
  double keep[3] = {0, 0, 0};
  for (int k = start; k > 0; --k) {
    const double jm1 = 2.0 * k / x * j - jp1;
    jp1 = j;
    j = jm1;
    if (k - 1 <= 2) keep[k - 1] = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp1 *= 1e-250;
      norm *= 1e-250;
      for (double& v : keep) v *= 1e-250;
    }
  }
  norm += j;
  for (int n = 0; n < 3; ++n) out[n] = keep[n] / norm;
}

}  // namespace

double bessel_j(int order, double x) {
  check_order(order, 2);
  check_arg(x);
  if (x <= kSeriesLimit) return scaled_series(order, x) * std::pow(x, order);
  double j[3];
  miller(x, j);
  return j[order];
}

double bessel_j_prime(int order, double x) {
  check_order(order, 2);
  check_arg(x);
  switch (order) {
    case 0:
      return -bessel_j(1, x);
    case 1:
      if (x <= kSeriesLimit) return bessel_j(0, x) - scaled_series(1, x);
      return bessel_j(0, x) - bessel_j(1, x) / x;
    default:
      if (x <= kSeriesLimit) return bessel_j(1, x) - 2.0 * x * scaled_series(2, x);
      return bessel_j(1, x) - 2.0 * bessel_j(2, x) / x;
  }
}

double bessel_j_scaled(int order, double x) {
  check_order(order, 2);
  check_arg(x);
  if (x <= kSeriesLimit) return scaled_series(order, x);
  return bessel_j(order, x) / std::pow(x, order);
}

double bessel_i(int order, double y) {
  check_order(order, 1);
  check_arg(y);
  const double q = 0.25 * y * y;
  double term = order == 0 ? 1.0 : 0.5 * y;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (double(k) * double(k + order));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace robin3
