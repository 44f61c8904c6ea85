#pragma once

#include <algorithm>
#include <random>
#include <span>
#include <string>

#include "tcn/nn/tensor.hpp"

namespace tcn::nn {

/// Valid temporal convolution, kernel 5, stride 1:
///   out[t, o] = bias[o] + sum_{tau, c} w[o, c, tau] * x[t + tau, c]
/// The weight is stored as out_channels x (5 * in_channels) with column tau * in_channels + c,
/// which is the memory order of five consecutive input rows.
template <typename Scalar>
class TemporalConv {
 public:
  static constexpr Index kKernel = 5;

  TemporalConv() = default;
  TemporalConv(Index in_channels, Index out_channels)
      : weight(out_channels, kKernel * in_channels, true),
        bias(1, out_channels, false),
        in_channels_(in_channels) {}

  Index in_channels() const { return in_channels_; }
  Index out_channels() const { return weight.value.rows(); }

  void init(std::mt19937_64& rng) {
    glorot_uniform(weight.value, kKernel * in_channels_, kKernel * out_channels(), rng);
    bias.value.setZero();
  }

  SequenceBatch<Scalar> apply(const SequenceBatch<Scalar>& x) const {
    const Matrix<Scalar> cols = unfold(x);
    SequenceBatch<Scalar> out;
    out.batch = x.batch;
    out.length = x.length - kKernel + 1;
    out.values = cols * weight.value.transpose();
    out.values.rowwise() += bias.value.row(0);
    return out;
  }

  SequenceBatch<Scalar> forward(const SequenceBatch<Scalar>& x) {
    cols_ = unfold(x);
    in_batch_ = x.batch;
    in_length_ = x.length;
    SequenceBatch<Scalar> out;
    out.batch = x.batch;
    out.length = x.length - kKernel + 1;
    out.values = cols_ * weight.value.transpose();
    out.values.rowwise() += bias.value.row(0);
    return out;
  }

  SequenceBatch<Scalar> backward(const SequenceBatch<Scalar>& grad_out) {
    if (in_batch_ < 0) throw Error(ErrorCode::kStateError, "TemporalConv::backward before forward");
    const Index out_len = in_length_ - kKernel + 1;
    require_shape(grad_out.batch == in_batch_ && grad_out.length == out_len &&
                      grad_out.channels() == out_channels(),
                  "TemporalConv::backward: gradient shape does not match forward output");

    weight.grad.noalias() += grad_out.values.transpose() * cols_;
    bias.grad.row(0) += grad_out.values.colwise().sum();

    const Matrix<Scalar> dcols = grad_out.values * weight.value;
    SequenceBatch<Scalar> grad_in(in_batch_, in_length_, in_channels_);
    grad_in.values.setZero();
    const Index width = kKernel * in_channels_;
    for (Index b = 0; b < in_batch_; ++b) {
      for (Index t = 0; t < out_len; ++t) {
        Eigen::Map<RowVector<Scalar>>(grad_in.values.data() + (b * in_length_ + t) * in_channels_,
                                      width) += dcols.row(b * out_len + t);
      }
    }
    return grad_in;
  }

  Parameter<Scalar> weight;
  Parameter<Scalar> bias;

 private:
  Matrix<Scalar> unfold(const SequenceBatch<Scalar>& x) const {
    require_shape(x.length >= kKernel, "TemporalConv: sequence length " +
                                           std::to_string(x.length) + " is shorter than kernel 5");
    require_shape(x.channels() == in_channels_,
                  "TemporalConv: expected " + std::to_string(in_channels_) + " channels, got " +
                      std::to_string(x.channels()));
    const Index out_len = x.length - kKernel + 1;
    const Index width = kKernel * in_channels_;
    Matrix<Scalar> cols(x.batch * out_len, width);
    for (Index b = 0; b < x.batch; ++b) {
      for (Index t = 0; t < out_len; ++t) {
        cols.row(b * out_len + t) = Eigen::Map<const RowVector<Scalar>>(
            x.values.data() + (b * x.length + t) * in_channels_, width);
      }
    }
    return cols;
  }

  Index in_channels_ = 0;
  Index in_batch_ = -1;
  Index in_length_ = 0;
  Matrix<Scalar> cols_;
};

/// Temporal average pooling, window 3, stride 1.
template <typename Scalar>
class AvgPool3 {
 public:
  static constexpr Index kWindow = 3;

  SequenceBatch<Scalar> apply(const SequenceBatch<Scalar>& x) const {
    require_shape(x.length >= kWindow, "AvgPool3: sequence length " + std::to_string(x.length) +
                                           " is shorter than window 3");
    const Index out_len = x.length - kWindow + 1;
    SequenceBatch<Scalar> out(x.batch, out_len, x.channels());
    for (Index b = 0; b < x.batch; ++b) {
      const auto in = x.sequence(b);
      out.sequence(b) = (in.topRows(out_len) + in.middleRows(1, out_len) +
                         in.middleRows(2, out_len)) / Scalar(3);
    }
    return out;
  }

  SequenceBatch<Scalar> forward(const SequenceBatch<Scalar>& x) {
    in_batch_ = x.batch;
    in_length_ = x.length;
    in_channels_ = x.channels();
    return apply(x);
  }

  SequenceBatch<Scalar> backward(const SequenceBatch<Scalar>& grad_out) const {
    if (in_batch_ < 0) throw Error(ErrorCode::kStateError, "AvgPool3::backward before forward");
    const Index out_len = in_length_ - kWindow + 1;
    require_shape(grad_out.batch == in_batch_ && grad_out.length == out_len &&
                      grad_out.channels() == in_channels_,
                  "AvgPool3::backward: gradient shape does not match forward output");
    SequenceBatch<Scalar> grad_in(in_batch_, in_length_, in_channels_);
    grad_in.values.setZero();
    for (Index b = 0; b < in_batch_; ++b) {
      auto g = grad_in.sequence(b);
      const auto go = grad_out.sequence(b) / Scalar(3);
      g.topRows(out_len) += go;
      g.middleRows(1, out_len) += go;
      g.middleRows(2, out_len) += go;
    }
    return grad_in;
  }

 private:
  Index in_batch_ = -1;
  Index in_length_ = 0;
  Index in_channels_ = 0;
};

template <typename Scalar>
class Relu {
 public:
  static Matrix<Scalar> apply(const Matrix<Scalar>& x) { return x.cwiseMax(Scalar(0)); }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) {
    mask_ = (x.array() > Scalar(0)).template cast<Scalar>();
    has_forward_ = true;
    return apply(x);
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& grad_out) const {
    if (!has_forward_) throw Error(ErrorCode::kStateError, "Relu::backward before forward");
    require_shape(grad_out.rows() == mask_.rows() && grad_out.cols() == mask_.cols(),
                  "Relu::backward: gradient shape does not match forward output");
    return grad_out.cwiseProduct(mask_);
  }

 private:
  Matrix<Scalar> mask_;
  bool has_forward_ = false;
};

/// Fully connected layer on row-vector batches: y = x W^T + b, W is out x in.
template <typename Scalar>
class Linear {
 public:
  Linear() = default;
  Linear(Index in_features, Index out_features)
      : weight(out_features, in_features, true), bias(1, out_features, false) {}

  Index in_features() const { return weight.value.cols(); }
  Index out_features() const { return weight.value.rows(); }

  void init(std::mt19937_64& rng) {
    glorot_uniform(weight.value, in_features(), out_features(), rng);
    bias.value.setZero();
  }

  Matrix<Scalar> apply(const Matrix<Scalar>& x) const {
    require_shape(x.cols() == in_features(), "Linear: expected " + std::to_string(in_features()) +
                                                 " inputs, got " + std::to_string(x.cols()));
    Matrix<Scalar> y = x * weight.value.transpose();
    y.rowwise() += bias.value.row(0);
    return y;
  }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) {
    input_ = x;
    has_forward_ = true;
    return apply(x);
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& grad_out) {
    if (!has_forward_) throw Error(ErrorCode::kStateError, "Linear::backward before forward");
    require_shape(grad_out.rows() == input_.rows() && grad_out.cols() == out_features(),
                  "Linear::backward: gradient shape does not match forward output");
    weight.grad.noalias() += grad_out.transpose() * input_;
    bias.grad.row(0) += grad_out.colwise().sum();
    return grad_out * weight.value;
  }

  Parameter<Scalar> weight;
  Parameter<Scalar> bias;

 private:
  Matrix<Scalar> input_;
  bool has_forward_ = false;
};

template <typename Scalar>
struct SoftmaxXent {
  Scalar loss;
  Vector<Scalar> probs;
};

/// Max-shifted softmax followed by -log probs[label].
template <typename Scalar>
SoftmaxXent<Scalar> softmax_xent(const Eigen::Ref<const Vector<Scalar>>& logits, Index label) {
  require_shape(label >= 0 && label < logits.size(),
                "softmax_xent: label " + std::to_string(label) + " out of range");
  const Scalar top = logits.maxCoeff();
  const Vector<Scalar> shifted = logits.array() - top;
  const Scalar log_norm = std::log(shifted.array().exp().sum());
  SoftmaxXent<Scalar> out;
  out.probs = (shifted.array() - log_norm).exp();
  out.loss = log_norm - shifted(label);
  return out;
}

template <typename Scalar>
Matrix<Scalar> softmax_rows(const Matrix<Scalar>& logits) {
  Matrix<Scalar> out = logits.colwise() - logits.rowwise().maxCoeff();
  out = out.array().exp();
  out.array().colwise() /= out.rowwise().sum().array();
  return out;
}

template <typename Scalar>
struct BatchLoss {
  Scalar loss;           // mean cross-entropy over the batch
  Matrix<Scalar> probs;  // batch x classes
  Matrix<Scalar> grad;   // d loss / d logits
};

template <typename Scalar>
BatchLoss<Scalar> softmax_xent_batch(const Matrix<Scalar>& logits, std::span<const int> labels) {
  require_shape(static_cast<Index>(labels.size()) == logits.rows(),
                "softmax_xent_batch: one label per row required");
  BatchLoss<Scalar> out;
  out.loss = Scalar(0);
  out.probs.resize(logits.rows(), logits.cols());
  out.grad.resize(logits.rows(), logits.cols());
  const Scalar inv_batch = Scalar(1) / static_cast<Scalar>(std::max<Index>(1, logits.rows()));
  for (Index r = 0; r < logits.rows(); ++r) {
    const Vector<Scalar> row = logits.row(r).transpose();
    const auto sx = softmax_xent<Scalar>(row, labels[static_cast<std::size_t>(r)]);
    out.loss += sx.loss * inv_batch;
    out.probs.row(r) = sx.probs.transpose();
    out.grad.row(r) = sx.probs.transpose() * inv_batch;
    out.grad(r, labels[static_cast<std::size_t>(r)]) -= inv_batch;
  }
  return out;
}

}  // namespace tcn::nn
