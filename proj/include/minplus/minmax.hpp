#pragma once

/**
 * @file minmax.hpp
 * Exact (min,max) product and convolution on rank-compressed inputs.
 *
 * Ranks come from rank_compress; the top rank stands for +inf and takes part
 * as an ordinary maximal value.
 */

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "minplus/detail/fft.hpp"
#include "minplus/matrix.hpp"
#include "minplus/numeric.hpp"

namespace minplus {

enum class ProductBackend { naive, threshold };
enum class ConvBackend { naive, subquadratic };

inline constexpr Rank kRankMax = std::numeric_limits<Rank>::max();

// ---------------------------------------------------------------------------
// Product

// C = min(C, A (min,max) B), entry-wise.
inline void minmax_product_naive_into(const RankMatrix& a, const RankMatrix& b, RankMatrix& c) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  const std::size_t p = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    Rank* __restrict crow = c.row(i);
    const Rank* arow = a.row(i);
    for (std::size_t k = 0; k < m; ++k) {
      const Rank av = arow[k];
      const Rank* __restrict brow = b.row(k);
      for (std::size_t j = 0; j < p; ++j) {
        const Rank v = std::max(av, brow[j]);
        crow[j] = std::min(crow[j], v);
      }
    }
  }
  charge_comparisons(2 * static_cast<std::uint64_t>(n) * m * p);
}

namespace detail {

// Boolean threshold search: C[i,j] <= tau iff row i of [A <= tau] meets
// column j of [B <= tau].  Up to 64 checkpoints over the rank universe are
// bit-packed; each entry binary-searches the first checkpoint with a common
// index and then takes the exact minimum among those indices.
inline void minmax_product_threshold_into(const RankMatrix& a, const RankMatrix& b, RankMatrix& c) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  const std::size_t p = b.cols();
  if (n == 0 || m == 0 || p == 0) return;

  std::vector<Rank> universe(a.data());
  universe.insert(universe.end(), b.data().begin(), b.data().end());
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  charge_comparisons(universe.size());

  const std::size_t g = std::min<std::size_t>(universe.size(), 64);
  std::vector<Rank> checkpoints(g);
  for (std::size_t c_i = 0; c_i < g; ++c_i) {
    checkpoints[c_i] = universe[((c_i + 1) * universe.size()) / g - 1];
  }

  const std::size_t words = (m + 63) / 64;
  // Masks indexed [checkpoint][row][word] and [checkpoint][col][word].
  std::vector<std::uint64_t> amask(g * n * words, 0), bmask(g * p * words, 0);
  std::vector<std::uint8_t> alevel(n * m), blevel(m * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      alevel[i * m + k] = static_cast<std::uint8_t>(
          std::lower_bound(checkpoints.begin(), checkpoints.end(), a(i, k)) - checkpoints.begin());
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < p; ++j) {
      blevel[k * p + j] = static_cast<std::uint8_t>(
          std::lower_bound(checkpoints.begin(), checkpoints.end(), b(k, j)) - checkpoints.begin());
    }
  }
  charge_comparisons((n * m + m * p) * static_cast<std::uint64_t>(std::bit_width(g)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t lv = alevel[i * m + k]; lv < g; ++lv) {
        amask[(lv * n + i) * words + k / 64] |= std::uint64_t{1} << (k % 64);
      }
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t lv = blevel[k * p + j]; lv < g; ++lv) {
        bmask[(lv * p + j) * words + k / 64] |= std::uint64_t{1} << (k % 64);
      }
    }
  }

  const auto meets = [&](std::size_t lv, std::size_t i, std::size_t j) {
    const std::uint64_t* ra = &amask[(lv * n + i) * words];
    const std::uint64_t* rb = &bmask[(lv * p + j) * words];
    for (std::size_t w = 0; w < words; ++w) {
      if (ra[w] & rb[w]) return true;
    }
    return false;
  };

  std::uint64_t evaluated = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      // The last checkpoint is the universe maximum, so it always meets.
      std::size_t lo = 0, hi = g - 1;
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (meets(mid, i, j)) hi = mid;
        else lo = mid + 1;
      }
      const std::uint64_t* ra = &amask[(lo * n + i) * words];
      const std::uint64_t* rb = &bmask[(lo * p + j) * words];
      Rank best = kRankMax;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = ra[w] & rb[w];
        while (bits) {
          const std::size_t k = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
          bits &= bits - 1;
          best = std::min(best, std::max(a(i, k), b(k, j)));
          ++evaluated;
        }
      }
      c(i, j) = std::min(c(i, j), best);
    }
  }
  charge_comparisons(2 * evaluated + n * p);
}

}  // namespace detail

inline void minmax_product_into(const RankMatrix& a, const RankMatrix& b, RankMatrix& c,
                                ProductBackend backend = ProductBackend::naive) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
    throw std::invalid_argument("minmax_product: dimension mismatch");
  }
  if (backend == ProductBackend::naive) minmax_product_naive_into(a, b, c);
  else detail::minmax_product_threshold_into(a, b, c);
}

// C[i,j] = min_k max{A[i,k], B[k,j]}.
inline RankMatrix minmax_product(const RankMatrix& a, const RankMatrix& b,
                                 ProductBackend backend = ProductBackend::naive) {
  if (a.cols() != b.rows()) throw std::invalid_argument("minmax_product: dimension mismatch");
  RankMatrix c(a.rows(), b.cols(), kRankMax);
  minmax_product_into(a, b, c, backend);
  return c;
}

// ---------------------------------------------------------------------------
// Convolution

// C[k] = min(C[k], min_{i+j=k} max{A[i], B[j]}) for k < |C|.
inline void minmax_convolution_naive_into(const RankSequence& a, const RankSequence& b, RankSequence& c) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 || m == 0) return;
  std::vector<Rank> rev(b.rbegin(), b.rend());  // rev[m-1-j] = b[j]
  std::uint64_t pairs = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    // i ranges over max(0, k-m+1) .. min(k, n-1); b[k-i] = rev[m-1-k+i].
    const std::size_t lo = k + 1 > m ? k + 1 - m : 0;
    const std::size_t hi = std::min(k, n - 1);
    if (lo > hi) continue;
    const Rank* ap = a.data();
    const Rank* rp = rev.data() + (m - 1 - k);
    Rank best = kRankMax;
    for (std::size_t i = lo; i <= hi; ++i) best = std::min(best, std::max(ap[i], rp[i]));
    c[k] = std::min(c[k], best);
    pairs += hi - lo + 1;
  }
  charge_comparisons(2 * pairs);
}

namespace detail {

// Thresholds split the sorted 2n values into buckets of ceil(sqrt(n log n))
// values.  A boolean convolution of [A <= theta] and [B <= theta] per
// threshold locates the bucket of each C[k]; the value itself is the
// smallest bucket element e that forms a pair with a partner <= e.
inline void minmax_convolution_subquadratic_into(const RankSequence& a, const RankSequence& b, RankSequence& c) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t out_len = c.size();
  if (n == 0 || m == 0 || out_len == 0) return;

  struct Item {
    Rank value;
    std::uint32_t index;
    bool from_a;
  };
  std::vector<Item> items;
  items.reserve(n + m);
  for (std::size_t i = 0; i < n; ++i) items.push_back({a[i], static_cast<std::uint32_t>(i), true});
  for (std::size_t j = 0; j < m; ++j) items.push_back({b[j], static_cast<std::uint32_t>(j), false});
  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.from_a != y.from_a) return x.from_a;
    return x.index < y.index;
  });
  const std::size_t total = items.size();
  charge_comparisons(total * static_cast<std::uint64_t>(std::bit_width(total)));

  const double nn = static_cast<double>(std::max(n, m));
  const auto step = static_cast<std::size_t>(std::ceil(std::sqrt(nn * std::max(1.0, std::log2(nn)))));

  // Bucket boundaries: ends[t] is one past the last item of bucket t.  A
  // bucket never splits a run of equal values.
  std::vector<std::size_t> ends;
  for (std::size_t pos = 0; pos < total;) {
    std::size_t end = std::min(total, pos + step);
    while (end < total && items[end].value == items[end - 1].value) ++end;
    ends.push_back(end);
    pos = end;
  }

  const std::size_t full_len = n + m - 1;
  const std::size_t len = std::min(out_len, full_len);
  std::vector<std::int64_t> bucket_of(len, -1);
  std::size_t unresolved = len;
  std::vector<double> ia(n, 0.0), ib(m, 0.0), conv;
  std::size_t begin = 0;
  for (std::size_t t = 0; t < ends.size() && unresolved > 0; ++t) {
    for (std::size_t q = begin; q < ends[t]; ++q) {
      if (items[q].from_a) ia[items[q].index] = 1.0;
      else ib[items[q].index] = 1.0;
    }
    begin = ends[t];
    detail::fft_plan_for(full_len).convolve(ia, ib, conv);
    for (std::size_t k = 0; k < len; ++k) {
      if (bucket_of[k] < 0 && conv[k] > 0.5) {
        bucket_of[k] = static_cast<std::int64_t>(t);
        --unresolved;
      }
    }
  }

  std::uint64_t checks = 0;
  for (std::size_t k = 0; k < len; ++k) {
    if (bucket_of[k] < 0) continue;
    const auto t = static_cast<std::size_t>(bucket_of[k]);
    const std::size_t lo = t == 0 ? 0 : ends[t - 1];
    Rank best = kRankMax;
    for (std::size_t q = lo; q < ends[t]; ++q) {
      const Item& e = items[q];
      if (e.value >= best) break;
      ++checks;
      if (e.from_a) {
        if (k >= e.index && k - e.index < m && b[k - e.index] <= e.value) best = e.value;
      } else {
        if (k >= e.index && k - e.index < n && a[k - e.index] <= e.value) best = e.value;
      }
    }
    c[k] = std::min(c[k], best);
  }
  charge_comparisons(2 * checks);
}

}  // namespace detail

inline void minmax_convolution_into(const RankSequence& a, const RankSequence& b, RankSequence& c,
                                    ConvBackend backend = ConvBackend::naive) {
  if (backend == ConvBackend::naive) minmax_convolution_naive_into(a, b, c);
  else detail::minmax_convolution_subquadratic_into(a, b, c);
}

// C[k] = min_{i+j=k} max{A[i], B[j]} for k in [0, n).
inline RankSequence minmax_convolution(const RankSequence& a, const RankSequence& b,
                                       ConvBackend backend = ConvBackend::naive) {
  if (a.size() != b.size()) throw std::invalid_argument("minmax_convolution: length mismatch");
  RankSequence c(a.size(), kRankMax);
  minmax_convolution_into(a, b, c, backend);
  return c;
}

}  // namespace minplus
