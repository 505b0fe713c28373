#pragma once

/**
 * @file product.hpp
 * Min-plus matrix products: the exact oracle, the strongly polynomial
 * covering-based approximation, the scaling baseline, and the reduction that
 * recovers an exact min-max product from an approximate min-plus product.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "minplus/covering.hpp"
#include "minplus/matrix.hpp"
#include "minplus/minmax.hpp"
#include "minplus/numeric.hpp"

namespace minplus {

enum class BoundedBackend { naive, kronecker };

struct ProductOptions {
  ProductBackend minmax_backend = ProductBackend::naive;
};

// C[i,j] = min_k A[i,k] + B[k,j].
inline WeightMatrix minplus_product_naive(const WeightMatrix& a, const WeightMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("minplus_product_naive: dimension mismatch");
  WeightMatrix c(a.rows(), b.cols(), ExpFloat::infinity());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const ExpFloat av = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        const ExpFloat s = ef_add(av, b(k, j));
        if (s < c(i, j)) c(i, j) = s;
      }
    }
  }
  return c;
}

namespace detail {

inline void require_positive_entries(const WeightMatrix& m, const char* where) {
  for (const ExpFloat& x : m.data()) {
    if (x.is_zero()) throw std::invalid_argument(std::string(where) + ": entries must be positive");
  }
}

// Close layers of the covering, evaluated sparsely: every finite A[i,k]
// lives in exactly one layer l, and its contribution there is
// max{(1+eps)^d, B^l[k,j]} for all j.  Rows of B^l are built once per (k, l).
inline void close_layers_product(CloseCovering& cc, std::size_t n, WeightMatrix& c) {
  std::vector<std::size_t> rows;
  std::vector<ExpFloat> brow(n);
  std::vector<std::pair<std::int64_t, std::size_t>> by_layer;
  for (std::size_t k = 0; k < n; ++k) {
    by_layer.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t l = cc.a_layer(i * n + k);
      if (l != 0) by_layer.emplace_back(l, i);
    }
    std::sort(by_layer.begin(), by_layer.end());
    for (std::size_t pos = 0; pos < by_layer.size();) {
      const std::int64_t l = by_layer[pos].first;
      for (std::size_t j = 0; j < n; ++j) brow[j] = cc.b_value(k * n + j, l);
      for (; pos < by_layer.size() && by_layer[pos].first == l; ++pos) {
        const std::size_t i = by_layer[pos].second;
        const ExpFloat av = cc.a_value(i * n + k);
        ExpFloat* crow = c.row(i);
        for (std::size_t j = 0; j < n; ++j) {
          const ExpFloat m = av < brow[j] ? brow[j] : av;
          if (m < crow[j]) crow[j] = m;
        }
      }
    }
  }
}

// Distant layers keep original entries, so one global rank map serves all
// layers and the minimum over layers is taken in rank space.
inline void distant_layers_product(const DistantVectorPlan& plan, const WeightSequence& a, const WeightSequence& b,
                                   std::size_t n, ProductBackend backend, WeightMatrix& c) {
  WeightSequence all(a);
  all.insert(all.end(), b.begin(), b.end());
  const RankedValues ranked = rank_compress(all);
  const Rank top = ranked.map.top();
  RankMatrix al(n, n, top), bl(n, n, top), cr(n, n, top);
  for (std::size_t l = 0; l < plan.layer_count(); ++l) {
    std::fill(al.data().begin(), al.data().end(), top);
    std::fill(bl.data().begin(), bl.data().end(), top);
    plan.for_each_a(l, [&](std::size_t idx) { al.data()[idx] = ranked.ranks[idx]; });
    plan.for_each_b(l, [&](std::size_t idx) { bl.data()[idx] = ranked.ranks[n * n + idx]; });
    minmax_product_into(al, bl, cr, backend);
  }
  for (std::size_t idx = 0; idx < n * n; ++idx) {
    const ExpFloat v = ranked.map.decode(cr.data()[idx]);
    if (v < c.data()[idx]) c.data()[idx] = v;
  }
}

}  // namespace detail

// C <= C~ <= (1+eps) C entry-wise, with an operation count that does not
// depend on the magnitude of the entries.
inline WeightMatrix approx_minplus_product(const WeightMatrix& a, const WeightMatrix& b, double eps,
                                           const ProductOptions& opts = {}) {
  validate_eps(eps, "approx_minplus_product");
  require_square_pair(a, b, "approx_minplus_product");
  detail::require_positive_entries(a, "approx_minplus_product");
  detail::require_positive_entries(b, "approx_minplus_product");
  const std::size_t n = a.rows();
  const double inner = eps / 5;
  WeightMatrix c(n, n, ExpFloat::infinity());
  if (n == 0) return c;

  const WeightSequence& av = a.data();
  const WeightSequence& bv = b.data();
  DistantVectorPlan plan(av, bv, inner);
  CloseCovering cc(av, bv, inner);
  check_layer_budget(plan.layer_count() + static_cast<std::size_t>(cc.layer_count()), plan.n_pad(), inner,
                     "approx_minplus_product");

  detail::distant_layers_product(plan, av, bv, n, opts.minmax_backend, c);
  detail::close_layers_product(cc, n, c);

  const ExpFloat factor = strong_scale_factor(inner);
  for (ExpFloat& x : c.data()) {
    if (!x.is_infinite()) x = ef_mul(x, factor);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Scaling baseline

// ceil(A / (eps 2^q)) where A <= 2^q, the infinity sentinel elsewhere.
inline BoundedMatrix zwick_scale(const WeightMatrix& a, std::int64_t q, double eps) {
  if (q < 0) throw std::invalid_argument("zwick_scale: q must be non-negative");
  validate_eps(eps, "zwick_scale");
  const ExpFloat limit = ExpFloat::pow2(q);
  const ExpFloat unit = ef_mul(ExpFloat::from_double(eps), limit);
  BoundedMatrix out(a.rows(), a.cols(), kBoundedInf);
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    const ExpFloat x = a.data()[idx];
    if (x.is_zero()) {
      out.data()[idx] = 0;
    } else if (!(limit < x)) {
      auto k = ceil_to_uint(ef_div(x, unit));
      if (ef_mul(ExpFloat::from_uint(k), unit) < x) ++k;
      out.data()[idx] = static_cast<BoundedInt>(k);
    }
  }
  return out;
}

// ceil(1/eps) as used by the scaling loop.
inline BoundedInt zwick_bound(double eps) {
  const ExpFloat q = ef_div(ExpFloat::one(), ExpFloat::from_double(eps));
  auto k = ceil_to_uint(q);
  if (ef_mul(ExpFloat::from_uint(k), ExpFloat::from_double(eps)) < ExpFloat::one()) ++k;
  return static_cast<BoundedInt>(k);
}

namespace detail {

inline void check_bounded(const BoundedMatrix& m, BoundedInt bound, const char* where) {
  for (BoundedInt v : m.data()) {
    if (v != kBoundedInf && (v < 0 || v > bound)) {
      throw std::invalid_argument(std::string(where) + ": entry out of range");
    }
  }
}

inline BoundedMatrix bounded_product_naive(const BoundedMatrix& a, const BoundedMatrix& b) {
  const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
  BoundedMatrix c(n, p, kBoundedInf);
  std::uint64_t work = 0;
  for (std::size_t i = 0; i < n; ++i) {
    BoundedInt* __restrict crow = c.row(i);
    for (std::size_t k = 0; k < m; ++k) {
      const BoundedInt av = a(i, k);
      if (av == kBoundedInf) continue;
      const BoundedInt* __restrict brow = b.row(k);
      for (std::size_t j = 0; j < p; ++j) crow[j] = std::min(crow[j], av + brow[j]);
      work += p;
    }
    for (std::size_t j = 0; j < p; ++j) {
      if (crow[j] >= kBoundedInf) crow[j] = kBoundedInf;
    }
  }
  charge_additions(work);
  charge_comparisons(work);
  return c;
}

// A[i,k] -> x^(M - A[i,k]) evaluated at x = n+1; the product's leading power
// of n+1 then encodes 2M - C[i,j].
inline BoundedMatrix bounded_product_kronecker(const BoundedMatrix& a, const BoundedMatrix& b, BoundedInt bound) {
  using boost::multiprecision::cpp_int;
  const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
  const cpp_int base = static_cast<unsigned long long>(m + 1);
  std::vector<cpp_int> powers(static_cast<std::size_t>(2 * bound + 1));
  powers[0] = 1;
  for (std::size_t e = 1; e < powers.size(); ++e) powers[e] = powers[e - 1] * base;
  const auto encode = [&](BoundedInt v) -> cpp_int {
    return v == kBoundedInf ? cpp_int(0) : powers[static_cast<std::size_t>(bound - v)];
  };
  std::vector<cpp_int> ea(n * m), eb(m * p);
  for (std::size_t idx = 0; idx < n * m; ++idx) ea[idx] = encode(a.data()[idx]);
  for (std::size_t idx = 0; idx < m * p; ++idx) eb[idx] = encode(b.data()[idx]);
  BoundedMatrix c(n, p, kBoundedInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      cpp_int sum = 0;
      for (std::size_t k = 0; k < m; ++k) sum += ea[i * m + k] * eb[k * p + j];
      if (sum == 0) continue;
      // Largest e with powers[e] <= sum; coefficients are at most m < m+1.
      std::size_t e = powers.size() - 1;
      while (powers[e] > sum) --e;
      c(i, j) = 2 * bound - static_cast<BoundedInt>(e);
    }
  }
  charge_multiplications(static_cast<std::uint64_t>(n) * m * p);
  charge_additions(static_cast<std::uint64_t>(n) * m * p);
  return c;
}

}  // namespace detail

// Exact min-plus product of matrices with entries in {0..bound} or infinity.
inline BoundedMatrix bounded_minplus_product(const BoundedMatrix& a, const BoundedMatrix& b, BoundedInt bound,
                                             BoundedBackend backend = BoundedBackend::naive) {
  if (a.cols() != b.rows()) throw std::invalid_argument("bounded_minplus_product: dimension mismatch");
  detail::check_bounded(a, bound, "bounded_minplus_product");
  detail::check_bounded(b, bound, "bounded_minplus_product");
  return backend == BoundedBackend::naive ? detail::bounded_product_naive(a, b)
                                          : detail::bounded_product_kronecker(a, b, bound);
}

// Adaptive scaling over q = 0 .. ceil(log2 W) + 1.  C <= C~ <= (1+4eps) C
// for finite entries >= 1; below 1 the error of the q = 0 round is additive.
inline WeightMatrix zwick_minplus_product(const WeightMatrix& a, const WeightMatrix& b, double eps,
                                          BoundedBackend backend = BoundedBackend::naive) {
  validate_eps(eps, "zwick_minplus_product");
  if (a.cols() != b.rows()) throw std::invalid_argument("zwick_minplus_product: dimension mismatch");
  WeightMatrix c(a.rows(), b.cols(), ExpFloat::infinity());
  ExpFloat w = ExpFloat::zero();
  for (const ExpFloat& x : a.data()) {
    if (!x.is_infinite() && w < x) w = x;
  }
  for (const ExpFloat& x : b.data()) {
    if (!x.is_infinite() && w < x) w = x;
  }
  const std::int64_t q_max = (w.is_zero() ? 0 : std::max<std::int64_t>(0, ceil_log2(w))) + 1;
  const BoundedInt bound = zwick_bound(eps);
  const ExpFloat eps_f = ExpFloat::from_double(eps);
  for (std::int64_t q = 0; q <= q_max; ++q) {
    const BoundedMatrix cp =
        bounded_minplus_product(zwick_scale(a, q, eps), zwick_scale(b, q, eps), bound, backend);
    const ExpFloat unit = ef_mul(eps_f, ExpFloat::pow2(q));
    for (std::size_t idx = 0; idx < cp.size(); ++idx) {
      const BoundedInt v = cp.data()[idx];
      if (v == kBoundedInf) continue;
      const ExpFloat val = v == 0 ? ExpFloat::zero() : ef_mul(unit, ExpFloat::from_uint(static_cast<std::uint64_t>(v)));
      if (val < c.data()[idx]) c.data()[idx] = val;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Min-max product through the approximate min-plus product

// rho = ceil(log2(4 (1+eps)^2)), so r = 2^rho >= 4 (1+eps)^2.
inline int reduction_log_base(double eps) {
  const double r = 4.0 * (1.0 + eps) * (1.0 + eps);
  int rho = 0;
  while (std::ldexp(1.0, rho) < r) ++rho;
  return rho;
}

// Entry x becomes r^x; the approximate product C' satisfies
// r^C <= C' <= 2(1+eps) r^C <= r^(C+1/2), so C = floor(log_r C').
inline RankMatrix minmax_product_via_approx(const RankMatrix& a, const RankMatrix& b, double eps = 1.0,
                                            const ProductOptions& opts = {}) {
  validate_eps(eps, "minmax_product_via_approx");
  require_square_pair(a, b, "minmax_product_via_approx");
  const int rho = reduction_log_base(eps);
  const auto lift = [&](const RankMatrix& m) {
    WeightMatrix w(m.rows(), m.cols());
    for (std::size_t idx = 0; idx < m.size(); ++idx) {
      w.data()[idx] = ExpFloat::pow2(static_cast<std::int64_t>(m.data()[idx]) * rho);
    }
    return w;
  };
  const WeightMatrix cp = approx_minplus_product(lift(a), lift(b), eps, opts);
  RankMatrix out(a.rows(), a.cols());
  for (std::size_t idx = 0; idx < cp.size(); ++idx) {
    out.data()[idx] = static_cast<Rank>(floor_log2(cp.data()[idx]) / rho);
  }
  return out;
}

}  // namespace minplus
