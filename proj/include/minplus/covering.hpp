#pragma once

/**
 * @file covering.hpp
 * Sum-to-max coverings.
 *
 * A covering of vectors A, B is a list of layers (A^l, B^l) such that the
 * minimum over l of max{A^l[i], B^l[j]} approximates A[i] + B[j].  It is the
 * union of a close covering (pairs whose ratio lies in [eps, 1/eps], handled
 * by shifting B by a power of 1+eps) and a distant covering (pairs far apart
 * on the log scale, whose sum is already close to their maximum).
 *
 * The pipelines in product.hpp and convolution.hpp consume CloseCovering and
 * DistantVectorPlan directly instead of materialising every layer.
 */

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "minplus/matrix.hpp"
#include "minplus/numeric.hpp"

namespace minplus {

enum class LayerSource { close, distant };
enum class CoveringMode { weak, strong };

struct LayerEntry {
  std::size_t index = 0;
  ExpFloat value;
};

// Sparse layer: absent indices stand for +inf.  Entries are sorted by index.
struct Layer {
  std::vector<LayerEntry> a_entries;
  std::vector<LayerEntry> b_entries;
  LayerSource source = LayerSource::close;
};

struct CoveringFamily {
  std::vector<Layer> layers;
  std::size_t n = 0;
  std::size_t n_pad = 0;  // padded size of the distant covering's value multiset
  double eps = 0.0;
};

// ---------------------------------------------------------------------------
// Closed-form layer counts

// ceil(log2(1/eps)), computed exactly.
inline int log2_ceil_inverse(double eps) {
  int k = 0;
  while (std::ldexp(eps, k) < 1.0) ++k;
  return k;
}

// ceil(log2 n); zero for n <= 1.
inline int log2_ceil(std::size_t n) {
  if (n <= 1) return 0;
  return static_cast<int>(std::bit_width(n - 1));
}

// 1 + ceil(2 log_{1+eps}(1/eps)).
inline std::int64_t close_layer_count(double eps) {
  return 1 + static_cast<std::int64_t>(std::ceil(2.0 * std::log(1.0 / eps) / std::log1p(eps)));
}

// 2 sub-lists * 2 orientations * levels * shifts.
inline std::int64_t distant_layer_count(std::size_t n_pad, double eps) {
  return std::int64_t{4} * log2_ceil(n_pad) * (log2_ceil_inverse(eps) + 1);
}

inline std::int64_t strong_layer_count(std::size_t n_pad, double eps) {
  return close_layer_count(eps / 5) + distant_layer_count(n_pad, eps / 5);
}

namespace detail {

inline std::int64_t pos_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline void require_no_zero(const WeightSequence& v, const char* where) {
  for (const ExpFloat& x : v) {
    if (x.is_zero()) throw std::invalid_argument(std::string(where) + ": entries must be positive");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Close covering

// Implicit close covering.  Layer l (1-based) owns the bucket indices
// d = l (mod s).  A[i] in bucket d becomes (1+eps)^d in layer l(d); B[j]
// becomes B[j] + (1+eps)^d' in every layer l that has some d' in the window
// eps (1+eps)^(d'-1) <= B[j] < (1+eps)^d' / eps.
class CloseCovering {
 public:
  static constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::min();

  CloseCovering(const WeightSequence& a, const WeightSequence& b, double eps)
      : eps_(eps), s_(close_layer_count(eps)), ladder_(eps), b_(b) {
    validate_eps(eps, "close_covering");
    detail::require_no_zero(a, "close_covering");
    detail::require_no_zero(b, "close_covering");
    const ExpFloat eps_f = ExpFloat::from_double(eps);
    a_bucket_.resize(a.size(), kNone);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_infinite()) a_bucket_[i] = ladder_.bucket(a[i]);
    }
    b_lo_.resize(b.size(), kNone);
    b_hi_.resize(b.size(), kNone);
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j].is_infinite()) continue;
      b_lo_[j] = ladder_.bucket(ef_mul(eps_f, b[j]));
      b_hi_[j] = ladder_.bucket(ef_div(b[j], eps_f));
    }
  }

  double eps() const { return eps_; }
  std::int64_t layer_count() const { return s_; }
  std::size_t a_size() const { return a_bucket_.size(); }
  std::size_t b_size() const { return b_.size(); }

  // Bucket of A[i], or kNone when A[i] is infinite.
  std::int64_t a_bucket(std::size_t i) const { return a_bucket_[i]; }

  // Layer in [1, s] holding A[i], or 0 when A[i] is infinite.
  std::int64_t a_layer(std::size_t i) const {
    return a_bucket_[i] == kNone ? 0 : layer_of_bucket(a_bucket_[i]);
  }

  std::int64_t layer_of_bucket(std::int64_t d) const { return detail::pos_mod(d - 1, s_) + 1; }

  ExpFloat a_value(std::size_t i) {
    return a_bucket_[i] == kNone ? ExpFloat::infinity() : ladder_.at(a_bucket_[i]);
  }

  // Bucket index d' used for B[j] in layer l, or kNone.
  std::int64_t b_bucket(std::size_t j, std::int64_t layer) const {
    if (b_lo_[j] == kNone) return kNone;
    const std::int64_t d = b_lo_[j] + detail::pos_mod(layer - b_lo_[j], s_);
    return d <= b_hi_[j] ? d : kNone;
  }

  ExpFloat b_value(std::size_t j, std::int64_t layer) {
    const std::int64_t d = b_bucket(j, layer);
    return d == kNone ? ExpFloat::infinity() : ef_add(b_[j], ladder_.at(d));
  }

  ExpFloat power(std::int64_t d) { return ladder_.at(d); }
  const WeightSequence& b() const { return b_; }

  Layer materialize(std::int64_t layer) {
    Layer out;
    out.source = LayerSource::close;
    for (std::size_t i = 0; i < a_bucket_.size(); ++i) {
      if (a_layer(i) == layer) out.a_entries.push_back({i, ladder_.at(a_bucket_[i])});
    }
    for (std::size_t j = 0; j < b_.size(); ++j) {
      const std::int64_t d = b_bucket(j, layer);
      if (d != kNone) out.b_entries.push_back({j, ef_add(b_[j], ladder_.at(d))});
    }
    return out;
  }

 private:
  double eps_;
  std::int64_t s_;
  PowerLadder ladder_;
  WeightSequence b_;
  std::vector<std::int64_t> a_bucket_;
  std::vector<std::int64_t> b_lo_;
  std::vector<std::int64_t> b_hi_;
};

inline CoveringFamily close_covering(const WeightSequence& a, const WeightSequence& b, double eps) {
  CloseCovering cc(a, b, eps);
  CoveringFamily fam;
  fam.n = a.size();
  fam.eps = eps;
  for (std::int64_t l = 1; l <= cc.layer_count(); ++l) fam.layers.push_back(cc.materialize(l));
  return fam;
}

// ---------------------------------------------------------------------------
// Distant covering

// Inclusive range of positions in the sorted value array.
struct PositionRange {
  std::uint32_t first = 0;
  std::uint32_t last = 0;
};

struct DistantSetPair {
  std::vector<PositionRange> x;
  std::vector<PositionRange> y;
};

struct DistantSets {
  static constexpr std::uint32_t kPadding = std::numeric_limits<std::uint32_t>::max();

  std::vector<ExpFloat> sorted;         // length n_pad; padding repeats the maximum
  std::vector<std::uint32_t> element;   // input index at each position, or kPadding
  std::vector<DistantSetPair> pairs;
  std::size_t n_pad = 0;
  int levels = 0;

  // Input indices covered by a set, padding skipped, in position order.
  std::vector<std::uint32_t> members(const std::vector<PositionRange>& set) const {
    std::vector<std::uint32_t> out;
    for (const PositionRange& r : set) {
      for (std::uint32_t p = r.first; p <= r.last; ++p) {
        if (element[p] != kPadding) out.push_back(element[p]);
      }
    }
    return out;
  }
};

namespace detail {

// Sorted multiset Z is split recursively; a chunk {z_a..z_b} survives to the
// next level only when z_a < eps_set * z_b.  Sibling chunk pairs alternate
// between two sub-lists and each sub-list yields max_shift + 1 pairs (X, Y).
inline DistantSets build_distant_sets(const std::vector<ExpFloat>& z, const std::vector<std::uint32_t>& ids,
                                      double eps_set, int max_shift) {
  DistantSets out;
  const std::size_t n = z.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t i, std::uint32_t j) { return z[i] < z[j]; });

  out.n_pad = n == 0 ? 0 : std::bit_ceil(n);
  out.levels = log2_ceil(out.n_pad);
  out.sorted.resize(out.n_pad);
  out.element.assign(out.n_pad, DistantSets::kPadding);
  for (std::size_t p = 0; p < n; ++p) {
    out.sorted[p] = z[order[p]];
    out.element[p] = ids[order[p]];
  }
  for (std::size_t p = n; p < out.n_pad; ++p) out.sorted[p] = out.sorted[n - 1];

  const ExpFloat eps_f = ExpFloat::from_double(eps_set);
  const auto by_value = [](const ExpFloat& a, const ExpFloat& b) { return a < b; };
  std::vector<PositionRange> chunks;
  if (out.n_pad > 0) chunks.push_back({0, static_cast<std::uint32_t>(out.n_pad - 1)});

  for (int r = 1; r <= out.levels; ++r) {
    std::vector<PositionRange> next;
    for (const PositionRange& c : chunks) {
      if (out.sorted[c.first] < ef_mul(eps_f, out.sorted[c.last])) {
        const std::uint32_t mid = c.first + (c.last - c.first + 1) / 2 - 1;
        next.push_back({c.first, mid});
        next.push_back({mid + 1, c.last});
      }
    }
    chunks = std::move(next);

    for (std::size_t sub = 0; sub < 2; ++sub) {
      for (int t = 0; t <= max_shift; ++t) {
        DistantSetPair pair;
        const ExpFloat shift = ExpFloat::pow2(t);
        const ExpFloat x_scale = ef_mul(eps_f, shift);
        for (std::size_t k = 2 * sub; k + 1 < chunks.size(); k += 4) {
          const PositionRange lo = chunks[k];
          const PositionRange hi = chunks[k + 1];
          const ExpFloat zmin = out.sorted[hi.first];
          const ExpFloat x_limit = ef_mul(x_scale, zmin);
          const ExpFloat y_limit = ef_mul(shift, zmin);
          const auto lo_begin = out.sorted.begin() + lo.first;
          const auto lo_end = out.sorted.begin() + lo.last + 1;
          const auto x_end = std::upper_bound(lo_begin, lo_end, x_limit, by_value);
          if (x_end != lo_begin) {
            pair.x.push_back({lo.first, static_cast<std::uint32_t>(x_end - out.sorted.begin() - 1)});
          }
          const auto hi_begin = out.sorted.begin() + hi.first;
          const auto hi_end = out.sorted.begin() + hi.last + 1;
          const auto y_begin = std::lower_bound(hi_begin, hi_end, y_limit, by_value);
          if (y_begin != hi_end) {
            pair.y.push_back({static_cast<std::uint32_t>(y_begin - out.sorted.begin()), hi.last});
          }
        }
        out.pairs.push_back(std::move(pair));
      }
    }
  }
  return out;
}

}  // namespace detail

// Sets X_l, Y_l of Z with d(X_l, Y_l) >= 1/eps, covering every x < y with
// y / x >= 2/eps.  Output ranges refer to positions in DistantSets::sorted.
inline DistantSets distant_covering_sets(const std::vector<ExpFloat>& z, double eps) {
  validate_eps(eps, "distant_covering_sets");
  for (const ExpFloat& v : z) {
    if (!v.is_positive_finite()) throw std::invalid_argument("distant_covering_sets: values must be finite and positive");
  }
  std::vector<std::uint32_t> ids(z.size());
  std::iota(ids.begin(), ids.end(), 0u);
  return detail::build_distant_sets(z, ids, eps, log2_ceil_inverse(eps));
}

// Vector form of the distant covering.  Z holds the finite entries of A
// (ids 0..|A|-1) and of B (ids |A|..); the set pairs are run once as (X, Y)
// and once as (Y, X), so 2 * pairs layers result.
class DistantVectorPlan {
 public:
  DistantVectorPlan(const WeightSequence& a, const WeightSequence& b, double eps) : eps_(eps), na_(a.size()) {
    validate_eps(eps, "distant_covering");
    detail::require_no_zero(a, "distant_covering");
    detail::require_no_zero(b, "distant_covering");
    std::vector<ExpFloat> z;
    std::vector<std::uint32_t> ids;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_infinite()) {
        z.push_back(a[i]);
        ids.push_back(static_cast<std::uint32_t>(i));
      }
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!b[j].is_infinite()) {
        z.push_back(b[j]);
        ids.push_back(static_cast<std::uint32_t>(na_ + j));
      }
    }
    sets_ = detail::build_distant_sets(z, ids, 2 * eps, log2_ceil_inverse(eps));
  }

  double eps() const { return eps_; }
  std::size_t layer_count() const { return 2 * sets_.pairs.size(); }
  std::size_t n_pad() const { return sets_.n_pad; }
  const DistantSets& sets() const { return sets_; }

  // Calls f(i) for every A index kept in layer l.
  template <class F>
  void for_each_a(std::size_t layer, F&& f) const {
    visit(a_ranges(layer), [&](std::uint32_t id) {
      if (id < na_) f(static_cast<std::size_t>(id));
    });
  }

  // Calls f(j) for every B index kept in layer l.
  template <class F>
  void for_each_b(std::size_t layer, F&& f) const {
    visit(b_ranges(layer), [&](std::uint32_t id) {
      if (id >= na_) f(static_cast<std::size_t>(id - na_));
    });
  }

 private:
  const std::vector<PositionRange>& a_ranges(std::size_t layer) const {
    const std::size_t p = sets_.pairs.size();
    return layer < p ? sets_.pairs[layer].x : sets_.pairs[layer - p].y;
  }
  const std::vector<PositionRange>& b_ranges(std::size_t layer) const {
    const std::size_t p = sets_.pairs.size();
    return layer < p ? sets_.pairs[layer].y : sets_.pairs[layer - p].x;
  }

  template <class F>
  void visit(const std::vector<PositionRange>& ranges, F&& f) const {
    for (const PositionRange& r : ranges) {
      for (std::uint32_t p = r.first; p <= r.last; ++p) {
        if (sets_.element[p] != DistantSets::kPadding) f(sets_.element[p]);
      }
    }
  }

  double eps_;
  std::size_t na_;
  DistantSets sets_;
};

inline CoveringFamily distant_covering_vectors(const WeightSequence& a, const WeightSequence& b, double eps) {
  DistantVectorPlan plan(a, b, eps);
  CoveringFamily fam;
  fam.n = a.size();
  fam.n_pad = plan.n_pad();
  fam.eps = eps;
  for (std::size_t l = 0; l < plan.layer_count(); ++l) {
    Layer layer;
    layer.source = LayerSource::distant;
    plan.for_each_a(l, [&](std::size_t i) { layer.a_entries.push_back({i, a[i]}); });
    plan.for_each_b(l, [&](std::size_t j) { layer.b_entries.push_back({j, b[j]}); });
    const auto by_index = [](const LayerEntry& x, const LayerEntry& y) { return x.index < y.index; };
    std::sort(layer.a_entries.begin(), layer.a_entries.end(), by_index);
    std::sort(layer.b_entries.begin(), layer.b_entries.end(), by_index);
    fam.layers.push_back(std::move(layer));
  }
  return fam;
}

// ---------------------------------------------------------------------------
// Combined covering

// Factor 1 / (1 - 2 eps') applied to every layer of the strong covering.
inline ExpFloat strong_scale_factor(double eps_inner) {
  return ef_div(ExpFloat::one(), ExpFloat::from_double(1.0 - 2.0 * eps_inner));
}

inline void check_layer_budget(std::size_t layers, std::size_t n_pad, double eps_inner, const char* where) {
  const std::int64_t expected = close_layer_count(eps_inner) + distant_layer_count(n_pad, eps_inner);
  if (static_cast<std::int64_t>(layers) != expected) {
    throw std::logic_error(std::string(where) + ": layer count " + std::to_string(layers) +
                           " differs from closed form " + std::to_string(expected));
  }
}

// Weak: distant(eps) followed by close(eps).  Strong: weak(eps/5) with every
// entry multiplied by 1/(1 - 2eps/5).
inline CoveringFamily sum_to_max_covering(const WeightSequence& a, const WeightSequence& b, double eps,
                                          CoveringMode mode) {
  validate_eps(eps, "sum_to_max_covering");
  if (a.size() != b.size()) throw std::invalid_argument("sum_to_max_covering: length mismatch");
  const double inner = mode == CoveringMode::strong ? eps / 5 : eps;
  CoveringFamily fam = distant_covering_vectors(a, b, inner);
  CoveringFamily close = close_covering(a, b, inner);
  for (Layer& l : close.layers) fam.layers.push_back(std::move(l));
  fam.eps = eps;
  check_layer_budget(fam.layers.size(), fam.n_pad, inner, "sum_to_max_covering");
  if (mode == CoveringMode::strong) {
    const ExpFloat factor = strong_scale_factor(inner);
    for (Layer& l : fam.layers) {
      for (LayerEntry& e : l.a_entries) e.value = ef_mul(e.value, factor);
      for (LayerEntry& e : l.b_entries) e.value = ef_mul(e.value, factor);
    }
  }
  return fam;
}

// M[i][j] = min over layers of max{A^l[i], B^l[j]}, by densifying each layer.
inline WeightMatrix covering_minmax(const CoveringFamily& fam, std::size_t n_b) {
  WeightMatrix out(fam.n, n_b, ExpFloat::infinity());
  std::vector<ExpFloat> bd(n_b);
  for (const Layer& l : fam.layers) {
    std::fill(bd.begin(), bd.end(), ExpFloat::infinity());
    for (const LayerEntry& e : l.b_entries) bd[e.index] = e.value;
    for (const LayerEntry& ea : l.a_entries) {
      ExpFloat* row = out.row(ea.index);
      for (std::size_t j = 0; j < n_b; ++j) {
        const ExpFloat m = ExpFloat::raw_compare(ea.value, bd[j]) < 0 ? bd[j] : ea.value;
        if (ExpFloat::raw_compare(m, row[j]) < 0) row[j] = m;
      }
    }
  }
  return out;
}

}  // namespace minplus
