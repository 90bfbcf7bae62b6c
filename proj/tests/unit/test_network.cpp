// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "gradcheck.hpp"
#include "primefam/error.hpp"
#include "primefam/network.hpp"

using namespace primefam;
using namespace primefam::nn;

using gradcheck::random_matrix;
using gradcheck::tiny_arch;

TEST_CASE("parameter counts") {
  CHECK(count_params(Architecture::residual_net(25)) == 1'263'175);
  CHECK(count_params(Architecture::residual_net(29)) - count_params(Architecture::residual_net(25)) == 4 * 512);
  CHECK(count_params(Architecture::shallow_net(25)) == 2'119);
  const auto full = NetworkParams<float>::initialized(Architecture::residual_net(25), 42);
  CHECK(count_params(full) == 1'263'175);
  const double rel = std::abs(1'263'175.0 - 1'254'853.0) / 1'254'853.0;
  CHECK(rel < 0.01);
  std::size_t sum = 0;
  for (const auto& t : full.layout.tensors) sum += t.size;
  CHECK(sum == full.values.size());
}

TEST_CASE("zero parameters give 0.5 everywhere") {
  const auto p = NetworkParams<float>::zeros(Architecture::residual_net(25));
  const Matrix<float> x = random_matrix<float>(4, 25, 1);
  const Matrix<float> y = predict(p, x);
  CHECK((y.array() == 0.5f).all());
  const auto s = NetworkParams<float>::zeros(Architecture::shallow_net(25));
  CHECK((shallow_forward(s, x).array() == 0.5f).all());
}

TEST_CASE("outputs lie in (0, 1) and eval mode is deterministic") {
  const auto p = NetworkParams<float>::initialized(Architecture::residual_net(25), 7);
  const Matrix<float> x = random_matrix<float>(64, 25, 2, 3.0);
  const auto [y1, t1] = forward(p, x, false, 0);
  const auto [y2, t2] = forward(p, x, false, 99);
  CHECK(y1 == y2);
  CHECK((y1.array() > 0.0f).all());
  CHECK((y1.array() < 1.0f).all());
  // GEMM kernels may round edge rows differently for other batch shapes
  CHECK((predict(p, x, 10) - y1).cwiseAbs().maxCoeff() < 1e-6f);
  CHECK(predict(p, x, 10) == predict(p, x, 10));
  const auto s = NetworkParams<float>::initialized(Architecture::shallow_net(25), 7);
  const Matrix<float> ys = shallow_forward(s, x);
  CHECK(ys == shallow_forward(s, x));
  CHECK(((ys.array() > 0.0f) && (ys.array() < 1.0f)).all());
}

TEST_CASE("train mode dropout depends on the seed only") {
  const auto p = NetworkParams<float>::initialized(Architecture::residual_net(25), 7);
  const Matrix<float> x = random_matrix<float>(16, 25, 2);
  CHECK(forward(p, x, true, 5).first == forward(p, x, true, 5).first);
  CHECK_FALSE(forward(p, x, true, 5).first == forward(p, x, true, 6).first);
}

TEST_CASE("dimension mismatch") {
  const auto p = NetworkParams<float>::initialized(Architecture::residual_net(25), 7);
  CHECK_THROWS_AS(predict(p, random_matrix<float>(3, 29, 1)), DimensionMismatch);
}

TEST_CASE("backward matches central differences on a tiny network") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    CAPTURE(seed);
    for (bool train_mode : {false, true}) {
      const auto errs = gradcheck::network(seed, train_mode);
      for (const auto& e : errs)
        if (e.relative >= 1e-4) MESSAGE("tensor " << e.name << " relative error " << e.relative);
      CHECK(gradcheck::worst(errs) < 1e-4);
    }
  }
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  const auto p = NetworkParams<double>::initialized(tiny_arch(), 4);
  const Matrix<double> x = random_matrix<double>(5, 5, 1);
  auto [y, trace] = forward(p, x, true, 3);
  const Matrix<double> zero = Matrix<double>::Zero(5, 7);
  const auto g = backward(p, trace, zero);
  for (double v : g.values) REQUIRE(v == 0.0);
}

TEST_CASE("head independence") {
  const Architecture arch = tiny_arch();
  auto p = NetworkParams<double>::initialized(arch, 5);
  const Matrix<double> x = random_matrix<double>(5, 5, 1);
  auto [y, trace] = forward(p, x, false, 0);
  Matrix<double> dy = Matrix<double>::Zero(5, 7);
  dy.col(2).setOnes();
  const auto g = backward(p, trace, dy);
  for (int k = 0; k < arch.heads; ++k) {
    if (k == 2) continue;
    const auto& h = p.layout.heads[static_cast<std::size_t>(k)];
    CHECK(g.weight(h.hidden).isZero(0.0));
    CHECK(g.bias(h.hidden).isZero(0.0));
    CHECK(g.weight(h.out).isZero(0.0));
    CHECK(g.bias(h.out).isZero(0.0));
  }
  // perturbing head 4 moves only column 4
  auto q = p;
  q.weight(q.layout.heads[4].hidden).array() += 0.5;
  q.bias(q.layout.heads[4].out).array() += 0.5;
  const Matrix<double> y2 = predict(q, x);
  for (int k = 0; k < arch.heads; ++k) {
    if (k == 4) CHECK_FALSE(y2.col(k) == y.col(k));
    else CHECK(y2.col(k) == y.col(k));
  }
}

TEST_CASE("residual block with zero weights reduces to GELU of its input") {
  const Architecture arch = tiny_arch();
  auto p = NetworkParams<double>::initialized(arch, 6);
  for (const auto& b : p.layout.blocks) {
    p.weight(b.first).setZero();
    p.bias(b.first).setZero();
    p.weight(b.second).setZero();
    p.bias(b.second).setZero();
  }
  const Matrix<double> x = random_matrix<double>(4, 5, 2);
  auto [y, trace] = forward(p, x, false, 0);
  const auto gelu = [](double v) { return 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0))); };
  for (std::size_t b = 0; b + 1 < trace.blocks.size(); ++b) {
    const Matrix<double>& in = trace.blocks[b].in;
    const Matrix<double>& out = trace.blocks[b + 1].in;
    for (Eigen::Index i = 0; i < in.rows(); ++i)
      for (Eigen::Index j = 0; j < in.cols(); ++j) REQUIRE(out(i, j) == doctest::Approx(gelu(in(i, j))).epsilon(1e-12));
  }
}

TEST_CASE("inverted dropout keeps the expected activation") {
  const Architecture arch = tiny_arch();
  const auto p = NetworkParams<double>::initialized(arch, 8);
  const Matrix<double> x = random_matrix<double>(1, 5, 3);
  auto [ye, te] = forward(p, x, false, 0);
  Matrix<double> mean = Matrix<double>::Zero(1, arch.width);
  const int masks = 10'000;
  for (int s = 0; s < masks; ++s) {
    auto [y, t] = forward(p, x, true, static_cast<std::uint64_t>(s));
    mean += t.blocks[0].dropped;
  }
  mean /= masks;
  const Matrix<double>& eval_act = te.blocks[0].dropped;
  const double rel = (mean - eval_act).cwiseAbs().sum() / eval_act.cwiseAbs().sum();
  CHECK(rel < 0.01);
}

TEST_CASE("checkpoint round trip") {
  const auto p = NetworkParams<float>::initialized(Architecture::residual_net(29), 11);
  const auto path = std::filesystem::temp_directory_path() / "primefam_test_ckpt.bin";
  save_checkpoint(p, {11, "asl", 17}, path);
  const Checkpoint ck = load_checkpoint(path);
  CHECK(ck.params.arch == p.arch);
  CHECK(ck.params.values == p.values);
  CHECK(ck.meta == CheckpointMeta{11, "asl", 17});
  CHECK(load_checkpoint(path, 29).params.values == p.values);

  try {
    load_checkpoint(path, 25);
    FAIL("expected a dimension mismatch");
  } catch (const DimensionMismatch& e) {
    const std::string what = e.what();
    CHECK(what.find("25") != std::string::npos);
    CHECK(what.find("29") != std::string::npos);
  }

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
  }
  CHECK_THROWS_AS(load_checkpoint(path), SchemaError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path), IoError);

  const auto s = NetworkParams<float>::initialized(Architecture::shallow_net(25), 3);
  save_checkpoint(s, {3, "wbce", 0}, path);
  CHECK(load_checkpoint(path).params.values == s.values);
  std::filesystem::remove(path);
}

TEST_CASE("initialization") {
  const auto a = NetworkParams<float>::initialized(Architecture::residual_net(25), 42);
  const auto b = NetworkParams<float>::initialized(Architecture::residual_net(25), 42);
  const auto c = NetworkParams<float>::initialized(Architecture::residual_net(25), 43);
  CHECK(a.values == b.values);
  CHECK_FALSE(a.values == c.values);
  CHECK((a.scale(a.layout.input.norm).array() == 1.0f).all());
  CHECK((a.shift(a.layout.input.norm).array() == 0.0f).all());
  const float bound = 1.0f / std::sqrt(25.0f);
  CHECK((a.weight(a.layout.input.linear).array().abs() <= bound).all());
}

TEST_CASE("parameter storage has Eigen's maximum alignment") {
  for (int d : {25, 29}) {
    const auto p = nn::NetworkParams<float>::initialized(nn::Architecture::residual_net(d), 1);
    CHECK(reinterpret_cast<std::uintptr_t>(p.values.data()) % EIGEN_MAX_ALIGN_BYTES == 0);
    const auto copy = p.cast<double>();
    CHECK(reinterpret_cast<std::uintptr_t>(copy.values.data()) % EIGEN_MAX_ALIGN_BYTES == 0);
  }
}
