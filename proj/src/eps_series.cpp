#include "sgraph/eps_series.hpp"

#include <algorithm>
#include <cmath>

namespace sgraph {

namespace {

double factorial(int l) {
  double f = 1.0;
  for (int i = 2; i <= l; ++i) f *= i;
  return f;
}

}  // namespace

double ScalarSeries::eval(double eps) const {
  double v = 0.0;
  for (int l = static_cast<int>(c.size()) - 1; l >= 0; --l) v = v * eps + c[l];
  if (sqrt_term != 0.0 && eps > 0.0) v += sqrt_term * std::sqrt(eps);
  return v;
}

double ScalarSeries::derivative(int l) const { return factorial(l) * coeff(l); }

EpsMatrixSeries::EpsMatrixSeries(std::vector<CMat> coeffs) : coeffs_(std::move(coeffs)) {
  for (const CMat& m : coeffs_) {
    if (m.rows() != coeffs_[0].rows() || m.cols() != coeffs_[0].cols())
      throw DimensionError("eps-series coefficients differ in size");
  }
}

EpsMatrixSeries EpsMatrixSeries::constant(const CMat& m) { return EpsMatrixSeries({m}); }

EpsMatrixSeries EpsMatrixSeries::diagonal(const std::vector<ScalarSeries>& entries) {
  const int d = static_cast<int>(entries.size());
  size_t order = 1;
  for (const auto& s : entries) order = std::max(order, s.c.size());
  std::vector<CMat> coeffs(order, CMat::Zero(d, d));
  for (int i = 0; i < d; ++i)
    for (size_t l = 0; l < entries[i].c.size(); ++l) coeffs[l](i, i) = entries[i].c[l];
  return EpsMatrixSeries(std::move(coeffs));
}

CMat EpsMatrixSeries::coeff(int l) const {
  if (l < static_cast<int>(coeffs_.size())) return coeffs_[l];
  return CMat::Zero(rows(), cols());
}

CMat EpsMatrixSeries::derivative(int l) const { return factorial(l) * coeff(l); }

CMat EpsMatrixSeries::eval(double eps) const {
  CMat v = CMat::Zero(rows(), cols());
  for (int l = order(); l >= 0; --l) v = v * eps + coeffs_[l];
  return v;
}

EpsMatrixSeries EpsMatrixSeries::operator*(const EpsMatrixSeries& other) const {
  if (cols() != other.rows()) throw DimensionError("eps-series product size mismatch");
  std::vector<CMat> out(coeffs_.size() + other.coeffs_.size() - 1, CMat::Zero(rows(), other.cols()));
  for (size_t a = 0; a < coeffs_.size(); ++a)
    for (size_t b = 0; b < other.coeffs_.size(); ++b) out[a + b] += coeffs_[a] * other.coeffs_[b];
  return EpsMatrixSeries(std::move(out));
}

EpsMatrixSeries EpsMatrixSeries::left_multiply(const CMat& m) const {
  std::vector<CMat> out;
  for (const CMat& c : coeffs_) out.push_back(m * c);
  return EpsMatrixSeries(std::move(out));
}

EpsMatrixSeries EpsMatrixSeries::right_multiply(const CMat& m) const {
  std::vector<CMat> out;
  for (const CMat& c : coeffs_) out.push_back(c * m);
  return EpsMatrixSeries(std::move(out));
}

EpsMatrixSeries EpsMatrixSeries::row_block(int start, int count) const {
  std::vector<CMat> out;
  for (const CMat& c : coeffs_) out.push_back(c.middleRows(start, count));
  return EpsMatrixSeries(std::move(out));
}

EpsMatrixSeries EpsMatrixSeries::divide_by_eps() const {
  if (coeffs_.empty()) return *this;
  if (coeffs_.size() == 1) return EpsMatrixSeries({CMat::Zero(rows(), cols())});
  return EpsMatrixSeries(std::vector<CMat>(coeffs_.begin() + 1, coeffs_.end()));
}

EpsMatrixSeries EpsMatrixSeries::multiply_by_eps() const {
  std::vector<CMat> out;
  out.push_back(CMat::Zero(rows(), cols()));
  for (const CMat& c : coeffs_) out.push_back(c);
  return EpsMatrixSeries(std::move(out));
}

EpsMatrixSeries EpsMatrixSeries::stack_rows(const EpsMatrixSeries& top, const EpsMatrixSeries& bottom) {
  const int cols = top.rows() > 0 ? top.cols() : bottom.cols();
  const int n = std::max(top.order(), bottom.order()) + 1;
  std::vector<CMat> out;
  for (int l = 0; l < n; ++l) {
    CMat m(top.rows() + bottom.rows(), cols);
    if (top.rows() > 0) m.topRows(top.rows()) = top.empty() ? CMat::Zero(0, cols) : top.coeff(l);
    if (bottom.rows() > 0) m.bottomRows(bottom.rows()) = bottom.coeff(l);
    out.push_back(m);
  }
  return EpsMatrixSeries(std::move(out));
}

}  // namespace sgraph
