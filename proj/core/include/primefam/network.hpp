// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace primefam::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

enum class ArchKind : std::uint8_t { residual = 0, shallow = 1 };

/*
 * Residual multi-head MLP:
 *
 *   h0  = GELU(LN(W0 x + b0))                                    width
 *   h'  = GELU(LN(W2 Dropout(GELU(LN(W1 h + b1))) + b2) + h)     x residual_blocks
 *   z   = narrowing stages, each GELU(LN(W h + b))               512 -> 256 -> 128
 *   y_k = sigmoid(w_k^T GELU(W_k z + b_k) + c_k)                 k = 1..heads
 *
 * The shallow baseline is sigmoid(W_b ReLU(W_a x + a) + b) with head_hidden
 * hidden units; it ignores width, residual_blocks and narrowing.
 */
struct Architecture {
  ArchKind kind = ArchKind::residual;
  int input_dim = 25;
  int width = 512;
  int residual_blocks = 2;
  std::vector<int> narrowing = {256, 128};
  int head_hidden = 32;
  int heads = 7;
  double dropout = 0.15;
  double ln_eps = 1e-5;

  static Architecture residual_net(int input_dim);
  static Architecture shallow_net(int input_dim, int hidden = 64);

  int embedding_dim() const noexcept { return narrowing.empty() ? width : narrowing.back(); }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct LinearSlot {
  std::size_t weight = 0;  // in x out, row-major
  std::size_t bias = 0;
  int in = 0;
  int out = 0;
};

struct NormSlot {
  std::size_t scale = 0;
  std::size_t shift = 0;
  int dim = 0;
};

struct TensorInfo {
  std::string name;
  std::size_t offset;
  std::size_t size;
};

/// Offsets of every tensor inside the flat parameter vector, in schema order.
struct Layout {
  struct Block {
    LinearSlot first;
    NormSlot first_norm;
    LinearSlot second;
    NormSlot second_norm;
  };
  struct Stage {
    LinearSlot linear;
    NormSlot norm;
  };
  struct Head {
    LinearSlot hidden;
    LinearSlot out;
  };

  Stage input;
  std::vector<Block> blocks;
  std::vector<Stage> stages;
  std::vector<Head> heads;
  LinearSlot shallow_hidden;
  LinearSlot shallow_out;

  std::vector<TensorInfo> tensors;
  std::size_t total = 0;

  static Layout build(const Architecture& arch);
};

/// Storage with Eigen's maximum alignment. Eigen picks vectorisation paths by
/// runtime address, so heap-dependent alignment would change rounding between runs.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

/// All weights, biases and LayerNorm parameters as one flat vector. Gradients
/// use the same type, so optimizer state and clipping work on `values`.
template <typename T>
struct NetworkParams {
  Architecture arch;
  Layout layout;
  AlignedVector<T> values;

  /// Every scalar zero, including LayerNorm scales.
  static NetworkParams zeros(const Architecture& arch);
  /// Fan-in scaled uniform init from the seed's init stream; LayerNorm scale 1, shift 0.
  static NetworkParams initialized(const Architecture& arch, std::uint64_t seed);

  Eigen::Map<Matrix<T>> weight(const LinearSlot& s) {
    return {values.data() + s.weight, s.in, s.out};
  }
  Eigen::Map<const Matrix<T>> weight(const LinearSlot& s) const {
    return {values.data() + s.weight, s.in, s.out};
  }
  Eigen::Map<RowVector<T>> bias(const LinearSlot& s) { return {values.data() + s.bias, s.out}; }
  Eigen::Map<const RowVector<T>> bias(const LinearSlot& s) const { return {values.data() + s.bias, s.out}; }
  Eigen::Map<RowVector<T>> scale(const NormSlot& s) { return {values.data() + s.scale, s.dim}; }
  Eigen::Map<const RowVector<T>> scale(const NormSlot& s) const { return {values.data() + s.scale, s.dim}; }
  Eigen::Map<RowVector<T>> shift(const NormSlot& s) { return {values.data() + s.shift, s.dim}; }
  Eigen::Map<const RowVector<T>> shift(const NormSlot& s) const { return {values.data() + s.shift, s.dim}; }

  template <typename U>
  NetworkParams<U> cast() const {
    NetworkParams<U> out{arch, layout, AlignedVector<U>(values.size())};
    for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = static_cast<U>(values[i]);
    return out;
  }
};

/// Cached activations of one forward call; everything backward needs.
template <typename T>
struct ForwardTrace {
  struct NormCache {
    Matrix<T> xhat;
    Vector<T> rstd;
  };
  struct StageCache {
    Matrix<T> in;
    NormCache norm;
    Matrix<T> pre;  // LayerNorm output, GELU input
  };
  struct BlockCache {
    Matrix<T> in;
    NormCache norm1;
    Matrix<T> pre1;
    Matrix<T> mask;  // inverted-dropout multipliers; empty in eval mode
    Matrix<T> dropped;
    NormCache norm2;
    Matrix<T> sum;  // LN2 output + skip, GELU input
  };
  struct HeadCache {
    Matrix<T> pre;
    Matrix<T> act;
  };

  Architecture arch;
  Eigen::Index rows = 0;
  bool train_mode = false;
  StageCache input;
  std::vector<BlockCache> blocks;
  std::vector<StageCache> stages;
  Matrix<T> embedding;
  std::vector<HeadCache> heads;
  Matrix<T> predictions;
};

/// Full forward pass. Dropout is applied only when train_mode is set, with
/// masks drawn from the dropout stream of `dropout_seed`.
/// Throws DimensionMismatch if batch.cols() != arch.input_dim.
template <typename T>
std::pair<Matrix<T>, ForwardTrace<T>> forward(const NetworkParams<T>& params, const Matrix<T>& batch,
                                              bool train_mode, std::uint64_t dropout_seed);

/// Inference only: dropout off, no trace kept, rows processed in chunks.
template <typename T>
Matrix<T> predict(const NetworkParams<T>& params, const Matrix<T>& batch, Eigen::Index chunk = 4096);

/// Exact gradients of sum(grad_out .* predictions) with respect to every parameter.
/// Throws InvalidArgument if the trace does not belong to `params` or the shapes disagree.
template <typename T>
NetworkParams<T> backward(const NetworkParams<T>& params, const ForwardTrace<T>& trace, const Matrix<T>& grad_out);

/// Shallow baseline forward; throws InvalidArgument for a residual architecture.
template <typename T>
Matrix<T> shallow_forward(const NetworkParams<T>& params, const Matrix<T>& batch);

std::size_t count_params(const Architecture& arch);

template <typename T>
std::size_t count_params(const NetworkParams<T>& params) {
  return params.values.size();
}

inline constexpr char kCheckpointMagic[6] = {'P', 'F', 'N', 'E', 'T', '1'};

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::string loss;
  std::uint32_t epoch = 0;

  friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

struct Checkpoint {
  NetworkParams<float> params;
  CheckpointMeta meta;
};

/// Little-endian: magic "PFNET1", architecture, meta, parameter count, float32 tensors.
void save_checkpoint(const NetworkParams<float>& params, const CheckpointMeta& meta, const std::filesystem::path& path);

/// Throws SchemaError on bad magic or shape, DimensionMismatch if expected_dim > 0
/// and differs from the stored input dimension, IoError if the file cannot be read.
Checkpoint load_checkpoint(const std::filesystem::path& path, int expected_dim = 0);

}  // namespace primefam::nn
