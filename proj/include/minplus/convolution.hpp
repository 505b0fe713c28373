#pragma once

/**
 * @file convolution.hpp
 * Min-plus convolution: the exact quadratic oracle, the covering-based
 * approximation, and the split into a distant part (covering of far pairs)
 * and a close part (scaling with small integers and an exact bounded
 * convolution per scale).  All outputs have the input length n.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "minplus/covering.hpp"
#include "minplus/detail/fft.hpp"
#include "minplus/matrix.hpp"
#include "minplus/minmax.hpp"
#include "minplus/numeric.hpp"
#include "minplus/product.hpp"

namespace minplus {

struct ConvOptions {
  ConvBackend minmax_backend = ConvBackend::naive;
};

enum class BoundedConvBackend { automatic, naive, kronecker };

namespace detail {

inline void require_same_length(const WeightSequence& a, const WeightSequence& b, const char* where) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(where) + ": length mismatch");
}

inline void require_positive_entries(const WeightSequence& v, const char* where) {
  for (const ExpFloat& x : v) {
    if (x.is_zero()) throw std::invalid_argument(std::string(where) + ": entries must be positive");
  }
}

// Distant layers on one global rank map of A and B; the minimum over layers
// is taken in rank space and decoded once into c.
inline void distant_layers_conv(const DistantVectorPlan& plan, const WeightSequence& a, const WeightSequence& b,
                                ConvBackend backend, WeightSequence& c) {
  const std::size_t n = a.size();
  WeightSequence all(a);
  all.insert(all.end(), b.begin(), b.end());
  const RankedValues ranked = rank_compress(all);
  const Rank top = ranked.map.top();
  RankSequence al(n, top), bl(n, top), cr(n, top);
  for (std::size_t l = 0; l < plan.layer_count(); ++l) {
    std::fill(al.begin(), al.end(), top);
    std::fill(bl.begin(), bl.end(), top);
    plan.for_each_a(l, [&](std::size_t i) { al[i] = ranked.ranks[i]; });
    plan.for_each_b(l, [&](std::size_t j) { bl[j] = ranked.ranks[n + j]; });
    minmax_convolution_into(al, bl, cr, backend);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const ExpFloat v = ranked.map.decode(cr[k]);
    if (v < c[k]) c[k] = v;
  }
}

// Close layers evaluated directly: A[i] lives in one layer, where it
// contributes max{(1+eps)^d, B^l[j]} to C[i+j].
inline void close_layers_conv(CloseCovering& cc, WeightSequence& c) {
  const std::size_t n = c.size();
  std::vector<std::pair<std::int64_t, std::size_t>> by_layer;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t l = cc.a_layer(i);
    if (l != 0) by_layer.emplace_back(l, i);
  }
  std::sort(by_layer.begin(), by_layer.end());
  std::vector<ExpFloat> bl(n);
  for (std::size_t pos = 0; pos < by_layer.size();) {
    const std::int64_t l = by_layer[pos].first;
    for (std::size_t j = 0; j < n; ++j) bl[j] = cc.b_value(j, l);
    for (; pos < by_layer.size() && by_layer[pos].first == l; ++pos) {
      const std::size_t i = by_layer[pos].second;
      const ExpFloat av = cc.a_value(i);
      for (std::size_t j = 0; i + j < n; ++j) {
        const ExpFloat m = av < bl[j] ? bl[j] : av;
        if (m < c[i + j]) c[i + j] = m;
      }
    }
  }
}

}  // namespace detail

// C[k] = min_{i+j=k} A[i] + B[j].
inline WeightSequence minconv_naive(const WeightSequence& a, const WeightSequence& b) {
  detail::require_same_length(a, b, "minconv_naive");
  const std::size_t n = a.size();
  WeightSequence c(n, ExpFloat::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; i + j < n; ++j) {
      const ExpFloat s = ef_add(a[i], b[j]);
      if (s < c[i + j]) c[i + j] = s;
    }
  }
  return c;
}

// C <= C~ <= (1+eps) C through the strong sum-to-max covering.
inline WeightSequence approx_minconv_simple(const WeightSequence& a, const WeightSequence& b, double eps,
                                            const ConvOptions& opts = {}) {
  validate_eps(eps, "approx_minconv_simple");
  detail::require_same_length(a, b, "approx_minconv_simple");
  detail::require_positive_entries(a, "approx_minconv_simple");
  detail::require_positive_entries(b, "approx_minconv_simple");
  const std::size_t n = a.size();
  WeightSequence c(n, ExpFloat::infinity());
  if (n == 0) return c;
  const double inner = eps / 5;
  DistantVectorPlan plan(a, b, inner);
  CloseCovering cc(a, b, inner);
  check_layer_budget(plan.layer_count() + static_cast<std::size_t>(cc.layer_count()), plan.n_pad(), inner,
                     "approx_minconv_simple");
  detail::distant_layers_conv(plan, a, b, opts.minmax_backend, c);
  detail::close_layers_conv(cc, c);
  const ExpFloat factor = strong_scale_factor(inner);
  for (ExpFloat& x : c) {
    if (!x.is_infinite()) x = ef_mul(x, factor);
  }
  return c;
}

// C~ >= C, and C~[k] <= (1+eps) C[k] whenever an optimal pair for k has
// A[i]/B[j] outside [eps/4, 4/eps].
inline WeightSequence distant_minconv(const WeightSequence& a, const WeightSequence& b, double eps,
                                      const ConvOptions& opts = {}) {
  validate_eps(eps, "distant_minconv");
  detail::require_same_length(a, b, "distant_minconv");
  detail::require_positive_entries(a, "distant_minconv");
  detail::require_positive_entries(b, "distant_minconv");
  WeightSequence c(a.size(), ExpFloat::infinity());
  if (a.empty()) return c;
  DistantVectorPlan plan(a, b, eps / 4);
  detail::distant_layers_conv(plan, a, b, opts.minmax_backend, c);
  const ExpFloat factor = ef_div(ExpFloat::one(), ExpFloat::from_double(1 - eps / 2));
  for (ExpFloat& x : c) {
    if (!x.is_infinite()) x = ef_mul(x, factor);
  }
  return c;
}

namespace detail {

// Sparse list of finite entries of a bounded sequence.
inline std::vector<std::pair<std::size_t, BoundedInt>> finite_entries(const BoundedSequence& v) {
  std::vector<std::pair<std::size_t, BoundedInt>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != kBoundedInf) out.emplace_back(i, v[i]);
  }
  return out;
}

inline BoundedSequence bounded_conv_sparse(const std::vector<std::pair<std::size_t, BoundedInt>>& a,
                                           const std::vector<std::pair<std::size_t, BoundedInt>>& b, std::size_t n) {
  BoundedSequence c(n, kBoundedInf);
  std::uint64_t work = 0;
  for (const auto& [i, x] : a) {
    for (const auto& [j, y] : b) {
      if (i + j >= n) continue;
      c[i + j] = std::min(c[i + j], x + y);
      ++work;
    }
  }
  charge_additions(work);
  charge_comparisons(work);
  return c;
}

// Entry (i, x) becomes the monomial z^((2M+1) i + x); in the product the
// smallest exponent with quotient k carries C[k] as its remainder.
inline BoundedSequence bounded_conv_kronecker(const std::vector<std::pair<std::size_t, BoundedInt>>& a,
                                              const std::vector<std::pair<std::size_t, BoundedInt>>& b, std::size_t n,
                                              BoundedInt bound) {
  BoundedSequence c(n, kBoundedInf);
  if (a.empty() || b.empty()) return c;
  const auto stride = static_cast<std::size_t>(2 * bound + 1);
  std::size_t max_i = 0, max_j = 0;
  for (const auto& e : a) max_i = std::max(max_i, e.first);
  for (const auto& e : b) max_j = std::max(max_j, e.first);
  std::vector<double> pa(max_i * stride + static_cast<std::size_t>(bound) + 1, 0.0);
  std::vector<double> pb(max_j * stride + static_cast<std::size_t>(bound) + 1, 0.0);
  for (const auto& [i, x] : a) pa[i * stride + static_cast<std::size_t>(x)] = 1.0;
  for (const auto& [j, y] : b) pb[j * stride + static_cast<std::size_t>(y)] = 1.0;
  const std::vector<double> prod = convolve_counts(pa, pb);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t base = k * stride;
    if (base >= prod.size()) break;
    for (std::size_t s = 0; s < stride && base + s < prod.size(); ++s) {
      if (prod[base + s] > 0.5) {
        c[k] = static_cast<BoundedInt>(s);
        break;
      }
    }
  }
  charge_comparisons(static_cast<std::uint64_t>(n) * stride);
  return c;
}

}  // namespace detail

// Exact min-plus convolution of sequences with entries in {0..bound} or the
// infinity sentinel.  The automatic backend runs the sparse pairwise loop when
// (finite entries of A) * (finite entries of B) <= n * bound * log2 n and the
// Kronecker substitution otherwise.
inline BoundedSequence bounded_minconv_exact(const BoundedSequence& a, const BoundedSequence& b, BoundedInt bound,
                                             BoundedConvBackend backend = BoundedConvBackend::automatic) {
  if (a.size() != b.size()) throw std::invalid_argument("bounded_minconv_exact: length mismatch");
  for (const BoundedSequence* v : {&a, &b}) {
    for (BoundedInt x : *v) {
      if (x != kBoundedInf && (x < 0 || x > bound)) {
        throw std::invalid_argument("bounded_minconv_exact: entry out of range");
      }
    }
  }
  const std::size_t n = a.size();
  const auto fa = detail::finite_entries(a);
  const auto fb = detail::finite_entries(b);
  if (backend == BoundedConvBackend::automatic) {
    const double pairs = static_cast<double>(fa.size()) * static_cast<double>(fb.size());
    const double budget = static_cast<double>(n) * static_cast<double>(std::max<BoundedInt>(bound, 1)) *
                          std::max(1.0, std::log2(static_cast<double>(std::max<std::size_t>(n, 2))));
    backend = pairs <= budget ? BoundedConvBackend::naive : BoundedConvBackend::kronecker;
  }
  return backend == BoundedConvBackend::naive ? detail::bounded_conv_sparse(fa, fb, n)
                                              : detail::bounded_conv_kronecker(fa, fb, n, bound);
}

// ceil(4x / (q eps)) with q = 2^e, checked so that value * unit >= x.
inline BoundedInt close_round(ExpFloat x, ExpFloat unit) {
  auto k = ceil_to_uint(ef_div(x, unit));
  if (ef_mul(ExpFloat::from_uint(k), unit) < x) ++k;
  return static_cast<BoundedInt>(k);
}

struct CloseConvStats {
  std::size_t iterations = 0;
  std::size_t kronecker_iterations = 0;
};

// C~ >= C, and C~[k] <= (1+eps) C[k] whenever an optimal pair for k has
// A[i]/B[j] inside [eps/4, 4/eps].  For each scale q = 2^e the entries in
// [eps q / 16, q] are rounded up to multiples of q eps / 4 and convolved
// exactly.  Only scales where both sides have an entry in the window run.
inline WeightSequence close_minconv(const WeightSequence& a, const WeightSequence& b, double eps,
                                    CloseConvStats* stats = nullptr) {
  validate_eps(eps, "close_minconv");
  detail::require_same_length(a, b, "close_minconv");
  detail::require_positive_entries(a, "close_minconv");
  detail::require_positive_entries(b, "close_minconv");
  const std::size_t n = a.size();
  WeightSequence c(n, ExpFloat::infinity());
  CloseConvStats local;
  CloseConvStats& st = stats ? *stats : local;
  st = {};

  // x is in the window of q = 2^e iff e in [ceil_log2(x), floor_log2(16 x / eps)].
  const ExpFloat widen = ef_div(ExpFloat::from_uint(16), ExpFloat::from_double(eps));
  struct Entry {
    std::int64_t first, last;
    std::size_t index;
    bool from_a;
  };
  std::vector<Entry> entries;
  for (int side = 0; side < 2; ++side) {
    const WeightSequence& v = side == 0 ? a : b;
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i].is_infinite()) continue;
      entries.push_back({ceil_log2(v[i]), floor_log2(ef_mul(v[i], widen)), i, side == 0});
    }
  }
  if (entries.empty()) return c;
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.first < y.first; });

  // ceil(4/eps) plus one unit for the fixup in close_round at x = q.
  const BoundedInt bound = static_cast<BoundedInt>(std::ceil(4 / eps)) + 1;
  const ExpFloat eps_f = ExpFloat::from_double(eps);
  const ExpFloat quarter = ExpFloat::from_double(0.25);
  std::vector<const Entry*> alive;
  std::size_t next = 0;
  std::int64_t e = entries.front().first;
  BoundedSequence ra(n), rb(n);
  for (;;) {
    while (next < entries.size() && entries[next].first <= e) alive.push_back(&entries[next++]);
    alive.erase(std::remove_if(alive.begin(), alive.end(), [&](const Entry* x) { return x->last < e; }), alive.end());
    const bool has_a = std::any_of(alive.begin(), alive.end(), [](const Entry* x) { return x->from_a; });
    const bool has_b = std::any_of(alive.begin(), alive.end(), [](const Entry* x) { return !x->from_a; });
    if (!has_a || !has_b) {
      if (next == entries.size()) break;
      // Nothing can pair up before the next entry opens its window.
      e = std::max(e + 1, entries[next].first);
      continue;
    }
    ++st.iterations;
    const ExpFloat q = ExpFloat::pow2(e);
    const ExpFloat unit = ef_mul(ef_mul(q, eps_f), quarter);
    std::fill(ra.begin(), ra.end(), kBoundedInf);
    std::fill(rb.begin(), rb.end(), kBoundedInf);
    std::size_t alpha = 0, beta = 0;
    for (const Entry* x : alive) {
      const ExpFloat w = x->from_a ? a[x->index] : b[x->index];
      (x->from_a ? ra : rb)[x->index] = close_round(w, unit);
      ++(x->from_a ? alpha : beta);
    }
    const double budget = static_cast<double>(n) * static_cast<double>(bound) *
                          std::max(1.0, std::log2(static_cast<double>(std::max<std::size_t>(n, 2))));
    const bool fft = static_cast<double>(alpha) * static_cast<double>(beta) > budget;
    if (fft) ++st.kronecker_iterations;
    const BoundedSequence v = bounded_minconv_exact(
        ra, rb, bound, fft ? BoundedConvBackend::kronecker : BoundedConvBackend::naive);
    for (std::size_t k = 0; k < n; ++k) {
      if (v[k] == kBoundedInf) continue;
      const ExpFloat val = ef_mul(ExpFloat::from_uint(static_cast<std::uint64_t>(v[k])), unit);
      if (val < c[k]) c[k] = val;
    }
    ++e;
  }
  return c;
}

// C <= C~ <= (1+eps) C: the distant and close parts cover all ratio regimes.
inline WeightSequence approx_minconv(const WeightSequence& a, const WeightSequence& b, double eps,
                                     const ConvOptions& opts = {}) {
  validate_eps(eps, "approx_minconv");
  WeightSequence c = distant_minconv(a, b, eps, opts);
  const WeightSequence close = close_minconv(a, b, eps);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (close[k] < c[k]) c[k] = close[k];
  }
  return c;
}

// Exact min-max convolution through approx_minconv on r^A and r^B.
inline RankSequence minmax_conv_via_approx(const RankSequence& a, const RankSequence& b, double eps = 1.0,
                                           const ConvOptions& opts = {}) {
  validate_eps(eps, "minmax_conv_via_approx");
  if (a.size() != b.size()) throw std::invalid_argument("minmax_conv_via_approx: length mismatch");
  const int rho = reduction_log_base(eps);
  const auto lift = [&](const RankSequence& v) {
    WeightSequence w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = ExpFloat::pow2(static_cast<std::int64_t>(v[i]) * rho);
    return w;
  };
  const WeightSequence cp = approx_minconv(lift(a), lift(b), eps, opts);
  RankSequence out(a.size());
  for (std::size_t k = 0; k < cp.size(); ++k) out[k] = static_cast<Rank>(floor_log2(cp[k]) / rho);
  return out;
}

}  // namespace minplus
