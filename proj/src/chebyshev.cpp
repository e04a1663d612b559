#include "sgraph/chebyshev.hpp"

#include <algorithm>

namespace sgraph {

double cheb_eval(const Cheb& c, double s) {
  // Clenshaw
  double b1 = 0.0, b2 = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
    const double b0 = 2.0 * s * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  const double c0 = c.empty() ? 0.0 : c[0];
  return s * b1 - b2 + c0;
}

namespace {

// multiply a Chebyshev series by s
Cheb times_s(const Cheb& c) {
  Cheb out(c.size() + 1, 0.0);
  for (size_t n = 0; n < c.size(); ++n) {
    if (n == 0) {
      out[1] += c[0];
    } else {
      out[n + 1] += 0.5 * c[n];
      out[n - 1] += 0.5 * c[n];
    }
  }
  return out;
}

}  // namespace

Cheb cheb_from_monomial(const std::vector<double>& m) {
  // Horner in t = (1 + s) / 2
  Cheb acc{0.0};
  for (int k = static_cast<int>(m.size()) - 1; k >= 0; --k) {
    Cheb s_acc = times_s(acc);
    Cheb next(std::max(acc.size(), s_acc.size()), 0.0);
    for (size_t i = 0; i < acc.size(); ++i) next[i] += 0.5 * acc[i];
    for (size_t i = 0; i < s_acc.size(); ++i) next[i] += 0.5 * s_acc[i];
    next[0] += m[k];
    acc = std::move(next);
  }
  while (acc.size() > 1 && acc.back() == 0.0) acc.pop_back();
  return acc;
}

Cheb cheb_axpy(double alpha, const Cheb& x, const Cheb& y) {
  Cheb out(std::max(x.size(), y.size()), 0.0);
  for (size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  for (size_t i = 0; i < y.size(); ++i) out[i] += y[i];
  return out;
}

Cheb cheb_scale(double alpha, const Cheb& x) {
  Cheb out(x);
  for (double& v : out) v *= alpha;
  return out;
}

bool cheb_is_zero(const Cheb& c) {
  return std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
}

}  // namespace sgraph
