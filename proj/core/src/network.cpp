// SPDX-License-Identifier: Apache-2.0
#include "primefam/network.hpp"

#include <unsupported/Eigen/SpecialFunctions>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "primefam/error.hpp"
#include "primefam/rng.hpp"

namespace primefam::nn {
namespace {

using Eigen::Index;

// ---------------------------------------------------------------- layout

class LayoutBuilder {
 public:
  explicit LayoutBuilder(Layout& layout) : layout_(layout) {}

  LinearSlot linear(const std::string& name, int in, int out) {
    LinearSlot s{0, 0, in, out};
    s.weight = add(name + ".weight", static_cast<std::size_t>(in) * out);
    s.bias = add(name + ".bias", static_cast<std::size_t>(out));
    return s;
  }

  NormSlot norm(const std::string& name, int dim) {
    NormSlot s{0, 0, dim};
    s.scale = add(name + ".scale", static_cast<std::size_t>(dim));
    s.shift = add(name + ".shift", static_cast<std::size_t>(dim));
    return s;
  }

 private:
  std::size_t add(std::string name, std::size_t size) {
    const std::size_t offset = layout_.total;
    layout_.tensors.push_back({std::move(name), offset, size});
    layout_.total += size;
    return offset;
  }

  Layout& layout_;
};

void check_arch(const Architecture& a) {
  if (a.input_dim <= 0 || a.heads <= 0 || a.head_hidden <= 0)
    throw InvalidArgument("architecture: dimensions must be positive");
  if (a.kind == ArchKind::residual) {
    if (a.width <= 0 || a.residual_blocks < 0) throw InvalidArgument("architecture: bad width/blocks");
    for (int d : a.narrowing)
      if (d <= 0) throw InvalidArgument("architecture: bad narrowing dimension");
  }
  if (!(a.dropout >= 0.0 && a.dropout < 1.0)) throw InvalidArgument("architecture: dropout must be in [0,1)");
}

// ---------------------------------------------------------------- elementwise

template <typename T>
Matrix<T> gelu(const Matrix<T>& x) {
  const T inv_sqrt2 = static_cast<T>(0.70710678118654752440);
  return (static_cast<T>(0.5) * x.array() * (static_cast<T>(1) + (x.array() * inv_sqrt2).erf())).matrix();
}

// d/dx GELU(x) = Phi(x) + x phi(x)
template <typename T>
Matrix<T> gelu_grad(const Matrix<T>& x) {
  const T inv_sqrt2 = static_cast<T>(0.70710678118654752440);
  const T inv_sqrt2pi = static_cast<T>(0.39894228040143267794);
  auto a = x.array();
  return (static_cast<T>(0.5) * (static_cast<T>(1) + (a * inv_sqrt2).erf()) +
          a * inv_sqrt2pi * (static_cast<T>(-0.5) * a.square()).exp())
      .matrix();
}

template <typename T>
Matrix<T> sigmoid(const Matrix<T>& x) {
  return (static_cast<T>(1) / (static_cast<T>(1) + (-x.array()).exp())).matrix();
}

// ---------------------------------------------------------------- layers

template <typename T>
Matrix<T> linear(const NetworkParams<T>& p, const LinearSlot& s, const Matrix<T>& x) {
  Matrix<T> out(x.rows(), s.out);
  out.noalias() = x * p.weight(s);
  out.rowwise() += p.bias(s);
  return out;
}

// Writes weight/bias gradients into `g`, returns the input gradient.
template <typename T>
Matrix<T> linear_backward(const NetworkParams<T>& p, NetworkParams<T>& g, const LinearSlot& s, const Matrix<T>& x,
                          const Matrix<T>& dy, bool need_input_grad = true) {
  g.weight(s).noalias() = x.transpose() * dy;
  g.bias(s) = dy.colwise().sum();
  Matrix<T> dx;
  if (need_input_grad) dx.noalias() = dy * p.weight(s).transpose();
  return dx;
}

template <typename T>
Matrix<T> layer_norm(const NetworkParams<T>& p, const NormSlot& s, const Matrix<T>& x, T eps,
                     typename ForwardTrace<T>::NormCache* cache) {
  const Index n = x.rows();
  const Index d = x.cols();
  Matrix<T> xhat(n, d);
  Vector<T> rstd(n);
  for (Index i = 0; i < n; ++i) {
    const T mean = x.row(i).mean();
    xhat.row(i) = x.row(i).array() - mean;
    const T var = xhat.row(i).squaredNorm() / static_cast<T>(d);
    rstd(i) = static_cast<T>(1) / std::sqrt(var + eps);
    xhat.row(i) *= rstd(i);
  }
  Matrix<T> out = (xhat.array().rowwise() * p.scale(s).array()).matrix();
  out.rowwise() += p.shift(s);
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->rstd = std::move(rstd);
  }
  return out;
}

template <typename T>
Matrix<T> layer_norm_backward(const NetworkParams<T>& p, NetworkParams<T>& g, const NormSlot& s,
                              const typename ForwardTrace<T>::NormCache& cache, const Matrix<T>& dy) {
  const Index n = dy.rows();
  const auto d = static_cast<T>(dy.cols());
  g.scale(s) = (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  g.shift(s) = dy.colwise().sum();
  const Matrix<T> dxhat = (dy.array().rowwise() * p.scale(s).array()).matrix();
  Matrix<T> dx(n, dy.cols());
  for (Index i = 0; i < n; ++i) {
    const T sum = dxhat.row(i).sum();
    const T dot = dxhat.row(i).dot(cache.xhat.row(i));
    dx.row(i) = (cache.rstd(i) / d) * (d * dxhat.row(i).array() - sum - cache.xhat.row(i).array() * dot);
  }
  return dx;
}

template <typename T>
Matrix<T> dropout_mask(Index rows, Index cols, double rate, std::uint64_t seed, std::size_t block) {
  const CounterRng rng = CounterRng::derive(seed, Stream::dropout, {block});
  const double keep = 1.0 - rate;
  const auto threshold = static_cast<std::uint64_t>(keep * 9007199254740992.0);  // keep * 2^53
  const T scale = static_cast<T>(1.0 / keep);
  Matrix<T> mask(rows, cols);
  T* m = mask.data();
  const auto total = static_cast<std::uint64_t>(rows * cols);
  for (std::uint64_t i = 0; i < total; ++i) m[i] = (rng.at(i) >> 11) < threshold ? scale : T(0);
  return mask;
}

void check_batch(const Architecture& arch, Index cols) {
  if (cols != arch.input_dim)
    throw DimensionMismatch("network expects " + std::to_string(arch.input_dim) + " input features, batch has " +
                            std::to_string(cols));
}

template <typename T>
Matrix<T> forward_impl(const NetworkParams<T>& p, const Matrix<T>& x, bool train_mode, std::uint64_t seed,
                       ForwardTrace<T>* tr) {
  const Architecture& a = p.arch;
  const Layout& L = p.layout;
  check_batch(a, x.cols());
  const Index n = x.rows();
  const T eps = static_cast<T>(a.ln_eps);
  if (tr) {
    tr->arch = a;
    tr->rows = n;
    tr->train_mode = train_mode;
  }

  if (a.kind == ArchKind::shallow) {
    Matrix<T> pre = linear(p, L.shallow_hidden, x);
    Matrix<T> act = pre.cwiseMax(T(0));
    Matrix<T> y = sigmoid<T>(linear(p, L.shallow_out, act));
    if (tr) {
      tr->input.in = x;
      tr->input.pre = std::move(pre);
      tr->embedding = std::move(act);
      tr->predictions = y;
    }
    return y;
  }

  auto stage = [&](const Layout::Stage& s, const Matrix<T>& in, typename ForwardTrace<T>::StageCache* c) {
    Matrix<T> pre = layer_norm(p, s.norm, linear(p, s.linear, in), eps, c ? &c->norm : nullptr);
    Matrix<T> out = gelu(pre);
    if (c) {
      c->in = in;
      c->pre = std::move(pre);
    }
    return out;
  };

  Matrix<T> h = stage(L.input, x, tr ? &tr->input : nullptr);

  if (tr) tr->blocks.resize(L.blocks.size());
  for (std::size_t b = 0; b < L.blocks.size(); ++b) {
    const auto& blk = L.blocks[b];
    typename ForwardTrace<T>::BlockCache* c = tr ? &tr->blocks[b] : nullptr;
    Matrix<T> pre1 = layer_norm(p, blk.first_norm, linear(p, blk.first, h), eps, c ? &c->norm1 : nullptr);
    Matrix<T> dropped = gelu(pre1);
    Matrix<T> mask;
    if (train_mode && a.dropout > 0.0) {
      mask = dropout_mask<T>(n, dropped.cols(), a.dropout, seed, b);
      dropped.array() *= mask.array();
    }
    Matrix<T> sum = layer_norm(p, blk.second_norm, linear(p, blk.second, dropped), eps, c ? &c->norm2 : nullptr);
    sum += h;
    Matrix<T> out = gelu(sum);
    if (c) {
      c->in = std::move(h);
      c->pre1 = std::move(pre1);
      c->mask = std::move(mask);
      c->dropped = std::move(dropped);
      c->sum = std::move(sum);
    }
    h = std::move(out);
  }

  if (tr) tr->stages.resize(L.stages.size());
  for (std::size_t s = 0; s < L.stages.size(); ++s) h = stage(L.stages[s], h, tr ? &tr->stages[s] : nullptr);

  Matrix<T> y(n, a.heads);
  if (tr) tr->heads.resize(L.heads.size());
  for (std::size_t k = 0; k < L.heads.size(); ++k) {
    Matrix<T> pre = linear(p, L.heads[k].hidden, h);
    Matrix<T> act = gelu(pre);
    y.col(static_cast<Index>(k)) = sigmoid<T>(linear(p, L.heads[k].out, act));
    if (tr) {
      tr->heads[k].pre = std::move(pre);
      tr->heads[k].act = std::move(act);
    }
  }
  if (tr) {
    tr->embedding = std::move(h);
    tr->predictions = y;
  }
  return y;
}

// ---------------------------------------------------------------- checkpoint I/O

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename U>
  void put(U v) {
    static_assert(std::is_trivially_copyable_v<U>);
    std::array<char, sizeof(U)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out_.write(bytes.data(), sizeof(U));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}
  template <typename U>
  U get() {
    std::array<char, sizeof(U)> bytes;
    if (!in_.read(bytes.data(), sizeof(U))) throw SchemaError(source_ + ": truncated checkpoint");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    U v;
    std::memcpy(&v, bytes.data(), sizeof(U));
    return v;
  }

 private:
  std::istream& in_;
  std::string source_;
};

}  // namespace

// ---------------------------------------------------------------- public API

Architecture Architecture::residual_net(int input_dim) {
  Architecture a;
  a.input_dim = input_dim;
  return a;
}

Architecture Architecture::shallow_net(int input_dim, int hidden) {
  Architecture a;
  a.kind = ArchKind::shallow;
  a.input_dim = input_dim;
  a.width = 0;
  a.residual_blocks = 0;
  a.narrowing.clear();
  a.head_hidden = hidden;
  a.dropout = 0.0;
  return a;
}

Layout Layout::build(const Architecture& a) {
  check_arch(a);
  Layout L;
  LayoutBuilder b(L);
  if (a.kind == ArchKind::shallow) {
    L.shallow_hidden = b.linear("hidden", a.input_dim, a.head_hidden);
    L.shallow_out = b.linear("out", a.head_hidden, a.heads);
    return L;
  }
  L.input.linear = b.linear("input", a.input_dim, a.width);
  L.input.norm = b.norm("input.norm", a.width);
  for (int i = 0; i < a.residual_blocks; ++i) {
    const std::string base = "block" + std::to_string(i);
    Block blk;
    blk.first = b.linear(base + ".fc1", a.width, a.width);
    blk.first_norm = b.norm(base + ".norm1", a.width);
    blk.second = b.linear(base + ".fc2", a.width, a.width);
    blk.second_norm = b.norm(base + ".norm2", a.width);
    L.blocks.push_back(blk);
  }
  int prev = a.width;
  for (std::size_t i = 0; i < a.narrowing.size(); ++i) {
    const std::string base = "narrow" + std::to_string(i);
    Stage s;
    s.linear = b.linear(base, prev, a.narrowing[i]);
    s.norm = b.norm(base + ".norm", a.narrowing[i]);
    L.stages.push_back(s);
    prev = a.narrowing[i];
  }
  for (int k = 0; k < a.heads; ++k) {
    const std::string base = "head" + std::to_string(k);
    Head h;
    h.hidden = b.linear(base + ".fc1", prev, a.head_hidden);
    h.out = b.linear(base + ".fc2", a.head_hidden, 1);
    L.heads.push_back(h);
  }
  return L;
}

std::size_t count_params(const Architecture& arch) { return Layout::build(arch).total; }

template <typename T>
NetworkParams<T> NetworkParams<T>::zeros(const Architecture& arch) {
  NetworkParams p{arch, Layout::build(arch), {}};
  p.values.assign(p.layout.total, T(0));
  return p;
}

template <typename T>
NetworkParams<T> NetworkParams<T>::initialized(const Architecture& arch, std::uint64_t seed) {
  NetworkParams p = zeros(arch);
  auto fill_linear = [&](const LinearSlot& s, std::uint64_t tag) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(s.in));
    const CounterRng rng = CounterRng::derive(seed, Stream::init, {tag});
    const std::size_t nw = static_cast<std::size_t>(s.in) * s.out;
    for (std::size_t i = 0; i < nw; ++i)
      p.values[s.weight + i] = static_cast<T>(bound * (2.0 * CounterRng::to_unit(rng.at(i)) - 1.0));
    for (std::size_t j = 0; j < static_cast<std::size_t>(s.out); ++j)
      p.values[s.bias + j] = static_cast<T>(bound * (2.0 * CounterRng::to_unit(rng.at(nw + j)) - 1.0));
  };
  auto fill_norm = [&](const NormSlot& s) { p.scale(s).setOnes(); };

  const Layout& L = p.layout;
  std::uint64_t tag = 0;
  if (arch.kind == ArchKind::shallow) {
    fill_linear(L.shallow_hidden, tag++);
    fill_linear(L.shallow_out, tag++);
    return p;
  }
  fill_linear(L.input.linear, tag++);
  fill_norm(L.input.norm);
  for (const auto& blk : L.blocks) {
    fill_linear(blk.first, tag++);
    fill_norm(blk.first_norm);
    fill_linear(blk.second, tag++);
    fill_norm(blk.second_norm);
  }
  for (const auto& s : L.stages) {
    fill_linear(s.linear, tag++);
    fill_norm(s.norm);
  }
  for (const auto& h : L.heads) {
    fill_linear(h.hidden, tag++);
    fill_linear(h.out, tag++);
  }
  return p;
}

template <typename T>
std::pair<Matrix<T>, ForwardTrace<T>> forward(const NetworkParams<T>& params, const Matrix<T>& batch, bool train_mode,
                                              std::uint64_t dropout_seed) {
  ForwardTrace<T> trace;
  Matrix<T> y = forward_impl(params, batch, train_mode, dropout_seed, &trace);
  return {std::move(y), std::move(trace)};
}

template <typename T>
Matrix<T> predict(const NetworkParams<T>& params, const Matrix<T>& batch, Index chunk) {
  check_batch(params.arch, batch.cols());
  Matrix<T> out(batch.rows(), params.arch.heads);
  for (Index r = 0; r < batch.rows(); r += chunk) {
    const Index len = std::min(chunk, batch.rows() - r);
    Matrix<T> part = batch.middleRows(r, len);
    out.middleRows(r, len) = forward_impl<T>(params, part, false, 0, nullptr);
  }
  return out;
}

template <typename T>
Matrix<T> shallow_forward(const NetworkParams<T>& params, const Matrix<T>& batch) {
  if (params.arch.kind != ArchKind::shallow) throw InvalidArgument("shallow_forward: parameters are not a shallow net");
  return forward_impl<T>(params, batch, false, 0, nullptr);
}

template <typename T>
NetworkParams<T> backward(const NetworkParams<T>& p, const ForwardTrace<T>& tr, const Matrix<T>& dy) {
  if (!(tr.arch == p.arch)) throw InvalidArgument("backward: trace was produced by a different architecture");
  if (dy.rows() != tr.rows || dy.cols() != p.arch.heads || tr.predictions.rows() != tr.rows)
    throw InvalidArgument("backward: gradient shape " + std::to_string(dy.rows()) + "x" + std::to_string(dy.cols()) +
                          " does not match trace " + std::to_string(tr.rows) + "x" + std::to_string(p.arch.heads));
  const Layout& L = p.layout;
  NetworkParams<T> g = NetworkParams<T>::zeros(p.arch);

  // dL/dlogit = dL/dy * y (1 - y)
  const Matrix<T> dlogit = (dy.array() * tr.predictions.array() * (T(1) - tr.predictions.array())).matrix();

  if (p.arch.kind == ArchKind::shallow) {
    Matrix<T> dact = linear_backward(p, g, L.shallow_out, tr.embedding, dlogit);
    Matrix<T> dpre = (dact.array() * (tr.input.pre.array() > T(0)).template cast<T>()).matrix();
    linear_backward(p, g, L.shallow_hidden, tr.input.in, dpre, false);
    return g;
  }

  Matrix<T> dz = Matrix<T>::Zero(tr.rows, p.arch.embedding_dim());
  for (std::size_t k = 0; k < L.heads.size(); ++k) {
    const auto& head = L.heads[k];
    const auto& c = tr.heads[k];
    Matrix<T> dl = dlogit.col(static_cast<Index>(k));
    Matrix<T> dact = linear_backward(p, g, head.out, c.act, dl);
    Matrix<T> dpre = (dact.array() * gelu_grad(c.pre).array()).matrix();
    dz += linear_backward(p, g, head.hidden, tr.embedding, dpre);
  }

  auto stage_backward = [&](const Layout::Stage& s, const typename ForwardTrace<T>::StageCache& c, const Matrix<T>& dout,
                            bool need_input) {
    Matrix<T> dpre = (dout.array() * gelu_grad(c.pre).array()).matrix();
    Matrix<T> dlin = layer_norm_backward(p, g, s.norm, c.norm, dpre);
    return linear_backward(p, g, s.linear, c.in, dlin, need_input);
  };

  Matrix<T> dh = std::move(dz);
  for (std::size_t s = L.stages.size(); s-- > 0;) dh = stage_backward(L.stages[s], tr.stages[s], dh, true);

  for (std::size_t b = L.blocks.size(); b-- > 0;) {
    const auto& blk = L.blocks[b];
    const auto& c = tr.blocks[b];
    Matrix<T> dsum = (dh.array() * gelu_grad(c.sum).array()).matrix();
    Matrix<T> da2 = layer_norm_backward(p, g, blk.second_norm, c.norm2, dsum);
    Matrix<T> ddrop = linear_backward(p, g, blk.second, c.dropped, da2);
    if (c.mask.size() > 0) ddrop.array() *= c.mask.array();
    Matrix<T> dpre1 = (ddrop.array() * gelu_grad(c.pre1).array()).matrix();
    Matrix<T> da1 = layer_norm_backward(p, g, blk.first_norm, c.norm1, dpre1);
    dh = linear_backward(p, g, blk.first, c.in, da1);
    dh += dsum;
  }

  stage_backward(L.input, tr.input, dh, false);
  return g;
}

void save_checkpoint(const NetworkParams<float>& params, const CheckpointMeta& meta, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const Architecture& a = params.arch;
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  Writer w(out);
  w.put(static_cast<std::uint8_t>(a.kind));
  w.put(static_cast<std::uint32_t>(a.input_dim));
  w.put(static_cast<std::uint32_t>(a.width));
  w.put(static_cast<std::uint32_t>(a.residual_blocks));
  w.put(static_cast<std::uint32_t>(a.narrowing.size()));
  for (int d : a.narrowing) w.put(static_cast<std::uint32_t>(d));
  w.put(static_cast<std::uint32_t>(a.head_hidden));
  w.put(static_cast<std::uint32_t>(a.heads));
  w.put(a.dropout);
  w.put(a.ln_eps);
  w.put(meta.seed);
  w.put(static_cast<std::uint32_t>(meta.loss.size()));
  out.write(meta.loss.data(), static_cast<std::streamsize>(meta.loss.size()));
  w.put(meta.epoch);
  w.put(static_cast<std::uint64_t>(params.values.size()));
  for (float v : params.values) w.put(v);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, int expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string src = path.string();
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw SchemaError(src + ": not a PFNET1 checkpoint (bad magic bytes)");
  Reader r(in, src);
  Architecture a;
  const auto kind = r.get<std::uint8_t>();
  if (kind > 1) throw SchemaError(src + ": unknown architecture kind " + std::to_string(kind));
  a.kind = static_cast<ArchKind>(kind);
  a.input_dim = static_cast<int>(r.get<std::uint32_t>());
  a.width = static_cast<int>(r.get<std::uint32_t>());
  a.residual_blocks = static_cast<int>(r.get<std::uint32_t>());
  const auto stages = r.get<std::uint32_t>();
  if (stages > 64) throw SchemaError(src + ": implausible stage count");
  a.narrowing.clear();
  for (std::uint32_t i = 0; i < stages; ++i) a.narrowing.push_back(static_cast<int>(r.get<std::uint32_t>()));
  a.head_hidden = static_cast<int>(r.get<std::uint32_t>());
  a.heads = static_cast<int>(r.get<std::uint32_t>());
  a.dropout = r.get<double>();
  a.ln_eps = r.get<double>();

  if (expected_dim > 0 && a.input_dim != expected_dim)
    throw DimensionMismatch(src + ": checkpoint input dimension d=" + std::to_string(a.input_dim) +
                            " does not match expected d=" + std::to_string(expected_dim));

  CheckpointMeta meta;
  meta.seed = r.get<std::uint64_t>();
  const auto len = r.get<std::uint32_t>();
  if (len > 256) throw SchemaError(src + ": implausible loss-name length");
  meta.loss.resize(len);
  if (!in.read(meta.loss.data(), len)) throw SchemaError(src + ": truncated checkpoint");
  meta.epoch = r.get<std::uint32_t>();
  const auto count = r.get<std::uint64_t>();

  Checkpoint cp{NetworkParams<float>::zeros(a), meta};
  if (count != cp.params.values.size())
    throw SchemaError(src + ": stores " + std::to_string(count) + " parameters, architecture needs " +
                      std::to_string(cp.params.values.size()));
  for (float& v : cp.params.values) v = r.get<float>();
  if (in.peek() != std::char_traits<char>::eof()) throw SchemaError(src + ": trailing bytes after tensors");
  return cp;
}

#define PRIMEFAM_INSTANTIATE(T)                                                                                    \
  template struct NetworkParams<T>;                                                                                \
  template std::pair<Matrix<T>, ForwardTrace<T>> forward(const NetworkParams<T>&, const Matrix<T>&, bool,          \
                                                         std::uint64_t);                                           \
  template Matrix<T> predict(const NetworkParams<T>&, const Matrix<T>&, Index);                                    \
  template Matrix<T> shallow_forward(const NetworkParams<T>&, const Matrix<T>&);                                   \
  template NetworkParams<T> backward(const NetworkParams<T>&, const ForwardTrace<T>&, const Matrix<T>&);

PRIMEFAM_INSTANTIATE(float)
PRIMEFAM_INSTANTIATE(double)

#undef PRIMEFAM_INSTANTIATE

}  // namespace primefam::nn
