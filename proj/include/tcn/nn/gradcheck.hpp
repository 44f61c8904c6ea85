#pragma once

#include <algorithm>
#include <cmath>

#include "tcn/nn/tensor.hpp"

namespace tcn::nn {

/// Central finite differences of a scalar function with respect to every entry of `x`.
/// `x` is perturbed in place and restored.
template <typename Scalar, typename Fn>
Matrix<Scalar> numeric_gradient(Fn&& loss_of, Matrix<Scalar>& x, Scalar eps = Scalar(1e-5)) {
  Matrix<Scalar> grad(x.rows(), x.cols());
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar saved = x.data()[i];
    x.data()[i] = saved + eps;
    const Scalar up = loss_of();
    x.data()[i] = saved - eps;
    const Scalar down = loss_of();
    x.data()[i] = saved;
    grad.data()[i] = (up - down) / (Scalar(2) * eps);
  }
  return grad;
}

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps exact zeros from dividing by zero.
template <typename Scalar>
Scalar max_relative_error(const Matrix<Scalar>& a, const Matrix<Scalar>& b,
                          Scalar floor = Scalar(1e-8)) {
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "max_relative_error: shape mismatch");
  Scalar worst = Scalar(0);
  for (Index i = 0; i < a.size(); ++i) {
    const Scalar x = a.data()[i];
    const Scalar y = b.data()[i];
    const Scalar denom = std::max({std::abs(x), std::abs(y), floor});
    worst = std::max(worst, std::abs(x - y) / denom);
  }
  return worst;
}

}  // namespace tcn::nn
