#pragma once

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Core>

#include "tcn/error.hpp"

namespace tcn::nn {

using Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A batch of equal-length sequences. Sequence b occupies rows [b*length, (b+1)*length)
/// of `values`; columns are channels. A single time x channel tensor is a batch of one.
template <typename Scalar>
struct SequenceBatch {
  Index batch = 0;
  Index length = 0;
  Matrix<Scalar> values;

  SequenceBatch() = default;
  SequenceBatch(Index batch_size, Index seq_length, Index channels)
      : batch(batch_size), length(seq_length), values(batch_size * seq_length, channels) {}

  static SequenceBatch single(Matrix<Scalar> x) {
    SequenceBatch out;
    out.batch = 1;
    out.length = x.rows();
    out.values = std::move(x);
    return out;
  }

  Index channels() const { return values.cols(); }
  auto sequence(Index b) { return values.middleRows(b * length, length); }
  auto sequence(Index b) const { return values.middleRows(b * length, length); }

  /// Each sequence flattened time-major into one row: batch x (length * channels).
  Matrix<Scalar> flattened() const {
    Matrix<Scalar> out(batch, length * channels());
    for (Index b = 0; b < batch; ++b) {
      out.row(b) = Eigen::Map<const RowVector<Scalar>>(values.data() + b * length * channels(),
                                                       length * channels());
    }
    return out;
  }

  static SequenceBatch unflatten(const Matrix<Scalar>& flat, Index seq_length, Index channels) {
    SequenceBatch out(flat.rows(), seq_length, channels);
    for (Index b = 0; b < flat.rows(); ++b) {
      Eigen::Map<RowVector<Scalar>>(out.values.data() + b * seq_length * channels,
                                    seq_length * channels) = flat.row(b);
    }
    return out;
  }
};

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kShapeError, what);
}

/// Weights plus their gradient and momentum buffers, all of one fixed shape.
template <typename Scalar>
struct Parameter {
  Matrix<Scalar> value;
  Matrix<Scalar> grad;
  Matrix<Scalar> velocity;
  bool decay = true;  // weight decay applies to weights, not biases

  Parameter() = default;
  Parameter(Index rows, Index cols, bool with_decay)
      : value(Matrix<Scalar>::Zero(rows, cols)),
        grad(Matrix<Scalar>::Zero(rows, cols)),
        velocity(Matrix<Scalar>::Zero(rows, cols)),
        decay(with_decay) {}

  void zero_grad() { grad.setZero(); }
};

/// Glorot-uniform fill: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
template <typename Scalar>
void glorot_uniform(Matrix<Scalar>& w, Index fan_in, Index fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(dist(rng));
}

}  // namespace tcn::nn
