#pragma once

#include <vector>

#include "sgraph/common.hpp"

namespace sgraph {

// Truncated power series sum_l c_l eps^l, optionally with an eps^{1/2} term
// (only used to build non-analytic negative controls).
struct ScalarSeries {
  std::vector<double> c;
  double sqrt_term = 0.0;

  double eval(double eps) const;
  double coeff(int l) const { return l < static_cast<int>(c.size()) ? c[l] : 0.0; }
  double derivative(int l) const;  // l-th eps-derivative at 0
};

// Matrix-valued truncated power series in eps.
class EpsMatrixSeries {
 public:
  EpsMatrixSeries() = default;
  explicit EpsMatrixSeries(std::vector<CMat> coeffs);
  static EpsMatrixSeries constant(const CMat& m);
  static EpsMatrixSeries diagonal(const std::vector<ScalarSeries>& entries);

  int rows() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_[0].rows()); }
  int cols() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_[0].cols()); }
  int dim() const { return rows(); }
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool empty() const { return coeffs_.empty(); }

  const std::vector<CMat>& coeffs() const { return coeffs_; }
  CMat coeff(int l) const;
  CMat derivative(int l) const;
  CMat eval(double eps) const;

  EpsMatrixSeries operator*(const EpsMatrixSeries& other) const;
  EpsMatrixSeries left_multiply(const CMat& m) const;
  EpsMatrixSeries right_multiply(const CMat& m) const;
  EpsMatrixSeries row_block(int start, int count) const;
  // Divide by eps; the constant coefficient must vanish.
  EpsMatrixSeries divide_by_eps() const;
  EpsMatrixSeries multiply_by_eps() const;
  static EpsMatrixSeries stack_rows(const EpsMatrixSeries& top, const EpsMatrixSeries& bottom);

 private:
  std::vector<CMat> coeffs_;
};

}  // namespace sgraph
