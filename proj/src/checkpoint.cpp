#include "tcn/nn/checkpoint.hpp"

#include <fstream>
#include <limits>

#include "binary_io.hpp"

namespace tcn::nn {

namespace {

// Largest tensor we are willing to allocate from an untrusted header (1 GiB of doubles).
constexpr std::uint64_t kMaxTensorValues = std::uint64_t{1} << 27;
constexpr std::uint32_t kMaxMetadataBytes = 1u << 20;

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kCheckpointMagic, 4);
  detail::put_le<std::uint32_t>(out, kCheckpointVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.metadata.size()));
  out.write(ckpt.metadata.data(), static_cast<std::streamsize>(ckpt.metadata.size()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows()));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols()));
    for (Index i = 0; i < t.size(); ++i) detail::put_f64(out, t.data()[i]);
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed to write checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[4] = {};
  if (!in.read(magic, 4)) throw Error(ErrorCode::kTruncatedFile, "checkpoint shorter than its magic");
  if (!std::equal(magic, magic + 4, kCheckpointMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a TCNW checkpoint");
  }
  const auto version = detail::get_le<std::uint32_t>(in, "checkpoint version");
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kParseError, "unsupported checkpoint version " + std::to_string(version));
  }

  Checkpoint ckpt;
  const auto meta_len = detail::get_le<std::uint32_t>(in, "metadata length");
  if (meta_len > kMaxMetadataBytes) {
    throw Error(ErrorCode::kDimOverflow, "checkpoint metadata length " + std::to_string(meta_len));
  }
  ckpt.metadata.resize(meta_len);
  if (!in.read(ckpt.metadata.data(), meta_len)) {
    throw Error(ErrorCode::kTruncatedFile, "unexpected end of file while reading metadata");
  }

  const auto count = detail::get_le<std::uint32_t>(in, "tensor count");
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto rows = detail::get_le<std::uint32_t>(in, "tensor rows");
    const auto cols = detail::get_le<std::uint32_t>(in, "tensor cols");
    if (static_cast<std::uint64_t>(rows) * cols > kMaxTensorValues) {
      throw Error(ErrorCode::kDimOverflow, "tensor " + std::to_string(k) + " declares " +
                                               std::to_string(rows) + "x" + std::to_string(cols));
    }
    Matrix<double> t(rows, cols);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = detail::get_f64(in, "tensor values");
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace tcn::nn
