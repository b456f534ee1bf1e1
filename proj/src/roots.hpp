#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace robin3::detail {

/// Root of f on [a, b] given f(a) f(b) <= 0.  Illinois regula falsi with a
/// bisection step whenever the bracket fails to shrink by half.
template <typename F>
double bracketed_root(F&& f, double a, double b, double fa, double fb, double xtol = 1e-14) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw std::invalid_argument("bracketed_root: no sign change");
  int side = 0;
  for (int it = 0; it < 400; ++it) {
    const double width = b - a;
    double c = (a * fb - b * fa) / (fb - fa);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc > 0) == (fa > 0)) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (b - a > 0.5 * width) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if (fm == 0.0) return m;
      if ((fm > 0) == (fa > 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
        fb = fm;
      }
      side = 0;
    }
    if (b - a <= xtol * std::max(1.0, std::abs(a))) break;
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

/// Scan [lo, hi] in `cells` uniform cells and return the k-th sign change root.
template <typename F>
std::optional<double> kth_root(F&& f, double lo, double hi, int cells, int k) {
  const double h = (hi - lo) / cells;
  double xa = lo;
  double fa = f(xa);
  int found = 0;
  for (int i = 1; i <= cells; ++i) {
    const double xb = lo + h * i;
    const double fb = f(xb);
    if ((fa > 0) != (fb > 0) || fb == 0.0) {
      if (++found == k) return bracketed_root(f, xa, xb, fa, fb);
      if (fb == 0.0) {
        // step past an exact zero at the cell end
        xa = xb + 1e-9 * h;
        fa = f(xa);
        continue;
      }
    }
    xa = xb;
    fa = fb;
  }
  return std::nullopt;
}

}  // namespace robin3::detail
