#include <gtest/gtest.h>

#include <random>

#include "minplus/minmax.hpp"
#include "test_support.hpp"

using namespace minplus;
using testing_support::random_rank_seq;
using testing_support::random_ranks;

namespace {

RankMatrix brute_product(const RankMatrix& a, const RankMatrix& b) {
  RankMatrix c(a.rows(), b.cols(), kRankMax);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t k = 0; k < a.cols(); ++k) c(i, j) = std::min(c(i, j), std::max(a(i, k), b(k, j)));
    }
  }
  return c;
}

RankSequence brute_conv(const RankSequence& a, const RankSequence& b) {
  RankSequence c(a.size(), kRankMax);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; i + j < a.size(); ++j) c[i + j] = std::min(c[i + j], std::max(a[i], b[j]));
  }
  return c;
}

RankMatrix from_rows(std::initializer_list<std::initializer_list<Rank>> rows) {
  RankMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (Rank v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST(MinmaxProduct, Examples) {
  for (auto backend : {ProductBackend::naive, ProductBackend::threshold}) {
    EXPECT_EQ(minmax_product(from_rows({{1}}), from_rows({{1}}), backend), from_rows({{1}}));
    const RankMatrix c = minmax_product(from_rows({{1, 4}, {2, 3}}), from_rows({{2, 1}, {1, 5}}), backend);
    EXPECT_EQ(c(0, 0), 2u);
    EXPECT_EQ(c(1, 1), 2u);  // min(max(2,1), max(3,5))
    const RankMatrix top(3, 3, 9);
    EXPECT_EQ(minmax_product(top, top, backend), top);
  }
}

TEST(MinmaxProduct, RejectsDimensionMismatch) {
  EXPECT_THROW(minmax_product(RankMatrix(2, 3), RankMatrix(2, 2)), std::invalid_argument);
}

TEST(MinmaxProduct, BackendsMatchBruteForce) {
  std::mt19937_64 rng(21);
  for (std::size_t n : {1u, 2u, 7u, 33u, 64u, 130u}) {
    for (Rank universe : {2u, 50u, 100000u}) {
      const RankMatrix a = random_ranks(rng, n, universe);
      const RankMatrix b = random_ranks(rng, n, universe);
      const RankMatrix oracle = brute_product(a, b);
      ASSERT_EQ(minmax_product(a, b, ProductBackend::naive), oracle);
      ASSERT_EQ(minmax_product(a, b, ProductBackend::threshold), oracle);
    }
  }
}

TEST(MinmaxProduct, BackendsAgreeAt512) {
  std::mt19937_64 rng(22);
  const RankMatrix a = random_ranks(rng, 512, 1u << 18);
  const RankMatrix b = random_ranks(rng, 512, 1u << 18);
  EXPECT_EQ(minmax_product(a, b, ProductBackend::naive), minmax_product(a, b, ProductBackend::threshold));
}

TEST(MinmaxProduct, RankInvariance) {
  std::mt19937_64 rng(23);
  const std::size_t n = 20;
  const auto av = testing_support::random_vector(rng, n * n, 0, 30, 0.1);
  const auto bv = testing_support::random_vector(rng, n * n, 0, 30, 0.1);
  WeightSequence all(av);
  all.insert(all.end(), bv.begin(), bv.end());
  const RankedValues r = rank_compress(all);
  RankMatrix a(n, n), b(n, n);
  for (std::size_t i = 0; i < n * n; ++i) {
    a.data()[i] = r.ranks[i];
    b.data()[i] = r.ranks[n * n + i];
  }
  const RankMatrix c = minmax_product(a, b, ProductBackend::threshold);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ExpFloat best = ExpFloat::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        const ExpFloat x = av[i * n + k], y = bv[k * n + j];
        const ExpFloat m = ExpFloat::raw_compare(x, y) < 0 ? y : x;
        if (ExpFloat::raw_compare(m, best) < 0) best = m;
      }
      ASSERT_EQ(r.map.decode(c(i, j)), best);
    }
  }
}

TEST(MinmaxProduct, Monotone) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 50; ++t) {
    RankMatrix a = random_ranks(rng, 12, 40);
    const RankMatrix b = random_ranks(rng, 12, 40);
    const RankMatrix before = minmax_product(a, b, ProductBackend::threshold);
    a.data()[rng() % a.size()] += 10;
    const RankMatrix after = minmax_product(a, b, ProductBackend::threshold);
    for (std::size_t idx = 0; idx < before.size(); ++idx) ASSERT_GE(after.data()[idx], before.data()[idx]);
  }
}

TEST(MinmaxConvolution, Examples) {
  for (auto backend : {ConvBackend::naive, ConvBackend::subquadratic}) {
    EXPECT_EQ(minmax_convolution({1, 4}, {2, 3}, backend), (RankSequence{2, 3}));
    EXPECT_EQ(minmax_convolution(RankSequence(9, 1), RankSequence(9, 1), backend), RankSequence(9, 1));
  }
}

TEST(MinmaxConvolution, RejectsLengthMismatch) {
  EXPECT_THROW(minmax_convolution({1, 2}, {1}), std::invalid_argument);
}

TEST(MinmaxConvolution, BackendsMatchBruteForce) {
  std::mt19937_64 rng(25);
  for (std::size_t n : {1u, 2u, 3u, 17u, 100u, 1024u}) {
    for (Rank universe : {2u, 30u, 1000000u}) {
      const RankSequence a = random_rank_seq(rng, n, universe);
      const RankSequence b = random_rank_seq(rng, n, universe);
      const RankSequence oracle = brute_conv(a, b);
      ASSERT_EQ(minmax_convolution(a, b, ConvBackend::naive), oracle) << n;
      ASSERT_EQ(minmax_convolution(a, b, ConvBackend::subquadratic), oracle) << n;
    }
  }
}

TEST(MinmaxConvolution, BackendsAgreeAt4096) {
  std::mt19937_64 rng(26);
  const RankSequence a = random_rank_seq(rng, 4096, 1u << 20);
  const RankSequence b = random_rank_seq(rng, 4096, 1u << 20);
  EXPECT_EQ(minmax_convolution(a, b, ConvBackend::naive), minmax_convolution(a, b, ConvBackend::subquadratic));
}

TEST(MinmaxConvolution, Monotone) {
  std::mt19937_64 rng(27);
  for (int t = 0; t < 50; ++t) {
    RankSequence a = random_rank_seq(rng, 64, 100);
    const RankSequence b = random_rank_seq(rng, 64, 100);
    const RankSequence before = minmax_convolution(a, b, ConvBackend::subquadratic);
    a[rng() % a.size()] += 50;
    const RankSequence after = minmax_convolution(a, b, ConvBackend::subquadratic);
    for (std::size_t k = 0; k < before.size(); ++k) ASSERT_GE(after[k], before[k]);
  }
}
