#pragma once

#include <vector>

namespace sgraph {

// Spatial polynomials on an edge are stored as Chebyshev coefficients in
// s = 2t - 1, where t in [0,1] is the edge parameter (x / length).
using Cheb = std::vector<double>;

double cheb_eval(const Cheb& c, double s);
inline double cheb_eval_unit(const Cheb& c, double t) { return cheb_eval(c, 2.0 * t - 1.0); }

// Coefficients of p(t) = m[0] + m[1] t + m[2] t^2 + ...
Cheb cheb_from_monomial(const std::vector<double>& m);
Cheb cheb_axpy(double alpha, const Cheb& x, const Cheb& y);  // alpha*x + y
Cheb cheb_scale(double alpha, const Cheb& x);
bool cheb_is_zero(const Cheb& c);

}  // namespace sgraph
