#pragma once

/**
 * @file numeric.hpp
 * Extended-exponent floating point, (1+eps)-scale bucketing, rank compression
 * and operation counting.
 *
 * ExpFloat stores a 53-bit mantissa in [1, 2) and a signed 64-bit binary
 * exponent, plus the two specials zero and +infinity.  Weights handed to the
 * library are at least 1; smaller positive values only show up as internal
 * scale factors (for instance eps * 2^q).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace minplus {

// ---------------------------------------------------------------------------
// Operation counting

struct OpCounter {
  std::uint64_t additions = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t multiplications = 0;

  std::uint64_t total() const { return additions + comparisons + multiplications; }
  void reset() { *this = OpCounter{}; }

  OpCounter& operator+=(const OpCounter& o) {
    additions += o.additions;
    comparisons += o.comparisons;
    multiplications += o.multiplications;
    return *this;
  }
};

namespace detail {
inline thread_local OpCounter* active_counter = nullptr;
}  // namespace detail

// Charges all counted operations on this thread to `counter` while alive.
// Scopes nest; the innermost one receives the charges.
class CountingScope {
 public:
  explicit CountingScope(OpCounter& counter) : previous_(detail::active_counter) {
    detail::active_counter = &counter;
  }
  ~CountingScope() { detail::active_counter = previous_; }
  CountingScope(const CountingScope&) = delete;
  CountingScope& operator=(const CountingScope&) = delete;

 private:
  OpCounter* previous_;
};

inline void charge_additions(std::uint64_t k = 1) {
  if (auto* c = detail::active_counter) c->additions += k;
}
inline void charge_comparisons(std::uint64_t k = 1) {
  if (auto* c = detail::active_counter) c->comparisons += k;
}
inline void charge_multiplications(std::uint64_t k = 1) {
  if (auto* c = detail::active_counter) c->multiplications += k;
}

// ---------------------------------------------------------------------------
// Parameter validation

// Accepted approximation parameters are 0 < eps <= 1.
inline void validate_eps(double eps, const char* where) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw std::invalid_argument(std::string(where) + ": eps must lie in (0, 1], got " +
                                std::to_string(eps));
  }
}

// Multiplicative slack granted to every (1+eps) check for ef_add rounding.
inline constexpr double kCheckSlack = 0x1p-40;

// ---------------------------------------------------------------------------
// ExpFloat

class ExpFloat;
ExpFloat ef_add(ExpFloat a, ExpFloat b);
ExpFloat ef_mul(ExpFloat a, ExpFloat b);
ExpFloat ef_div(ExpFloat a, ExpFloat b);

namespace detail {
using u128 = unsigned __int128;

struct Rounded {
  std::uint64_t mantissa;
  int carry;  // 1 when rounding overflowed into the next binade
};

// Round v, whose leading one is at bit `lead`, to 53 significant bits
// (nearest, ties to even).  `sticky` marks nonzero bits below v.
inline Rounded round53(u128 v, int lead, bool sticky) {
  const int shift = lead - 52;
  if (shift <= 0) return {static_cast<std::uint64_t>(v << -shift), 0};
  u128 m = v >> shift;
  const u128 rem = v & ((u128{1} << shift) - 1);
  const u128 half = u128{1} << (shift - 1);
  const bool up = rem > half || (rem == half && (sticky || (m & 1)));
  if (up) ++m;
  if (m == (u128{1} << 53)) return {static_cast<std::uint64_t>(m >> 1), 1};
  return {static_cast<std::uint64_t>(m), 0};
}
}  // namespace detail

class ExpFloat {
 public:
  static constexpr int kPrecision = 53;
  static constexpr std::uint64_t kHiddenBit = std::uint64_t{1} << 52;
  static constexpr std::int64_t kMinExponent = std::numeric_limits<std::int64_t>::min() + 1;
  static constexpr std::int64_t kMaxExponent = std::numeric_limits<std::int64_t>::max() - 1;

  // Default value is zero.
  constexpr ExpFloat() = default;

  static constexpr ExpFloat zero() { return ExpFloat(kZeroTag, 0); }
  static constexpr ExpFloat infinity() { return ExpFloat(kInfTag, 0); }
  static constexpr ExpFloat one() { return ExpFloat(0, kHiddenBit); }

  // 2^exponent * mantissa / 2^52; the mantissa must have its top bit at 52.
  static ExpFloat from_parts(std::int64_t exponent, std::uint64_t mantissa) {
    if (mantissa < kHiddenBit || mantissa >= 2 * kHiddenBit) {
      throw std::invalid_argument("ExpFloat: mantissa not normalized");
    }
    check_exponent(exponent);
    return ExpFloat(exponent, mantissa);
  }

  static ExpFloat pow2(std::int64_t exponent) { return from_parts(exponent, kHiddenBit); }

  static ExpFloat from_double(double x) {
    if (std::isnan(x) || x < 0.0) throw std::invalid_argument("ExpFloat: negative or NaN");
    if (x == 0.0) return zero();
    if (std::isinf(x)) return infinity();
    int e = 0;
    const double f = std::frexp(x, &e);  // f in [0.5, 1)
    const auto m = static_cast<std::uint64_t>(std::ldexp(f, 53));
    return ExpFloat(static_cast<std::int64_t>(e) - 1, m);
  }

  static ExpFloat from_uint(std::uint64_t v) {
    if (v == 0) return zero();
    const int lead = 63 - __builtin_clzll(v);
    const auto r = detail::round53(v, lead, false);
    return ExpFloat(lead + r.carry, r.mantissa);
  }

  constexpr bool is_zero() const { return exp_ == kZeroTag; }
  constexpr bool is_infinite() const { return exp_ == kInfTag; }
  // Finite and nonzero.
  constexpr bool is_positive_finite() const { return !is_zero() && !is_infinite(); }

  std::int64_t exponent() const { return exp_; }
  std::uint64_t mantissa() const { return mant_; }
  double mantissa_fraction() const { return std::ldexp(static_cast<double>(mant_), -52); }

  double to_double() const {
    if (is_zero()) return 0.0;
    if (is_infinite()) return std::numeric_limits<double>::infinity();
    if (exp_ > 4096) return std::numeric_limits<double>::infinity();
    if (exp_ < -4096) return 0.0;
    return std::ldexp(static_cast<double>(mant_), static_cast<int>(exp_) - 52);
  }

  // Approximate binary logarithm; exact for powers of two.
  double log2() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    if (is_infinite()) return std::numeric_limits<double>::infinity();
    return static_cast<double>(exp_) + std::log2(mantissa_fraction());
  }

  // Uncounted three-way comparison for internal bookkeeping.
  static constexpr std::strong_ordering raw_compare(const ExpFloat& a, const ExpFloat& b) {
    if (a.exp_ != b.exp_) return a.exp_ <=> b.exp_;
    return a.mant_ <=> b.mant_;
  }

  friend std::strong_ordering operator<=>(const ExpFloat& a, const ExpFloat& b) {
    charge_comparisons();
    return raw_compare(a, b);
  }
  friend bool operator==(const ExpFloat& a, const ExpFloat& b) {
    charge_comparisons();
    return a.exp_ == b.exp_ && a.mant_ == b.mant_;
  }

 private:
  static constexpr std::int64_t kZeroTag = std::numeric_limits<std::int64_t>::min();
  static constexpr std::int64_t kInfTag = std::numeric_limits<std::int64_t>::max();

  constexpr ExpFloat(std::int64_t e, std::uint64_t m) : exp_(e), mant_(m) {}

  static void check_exponent(__int128 e) {
    if (e < kMinExponent || e > kMaxExponent) throw std::overflow_error("ExpFloat: exponent overflow");
  }

  std::int64_t exp_ = kZeroTag;
  std::uint64_t mant_ = 0;

  friend ExpFloat ef_add(ExpFloat a, ExpFloat b);
  friend ExpFloat ef_mul(ExpFloat a, ExpFloat b);
  friend ExpFloat ef_div(ExpFloat a, ExpFloat b);
};

// Sum rounded to nearest.  If the exponents differ by more than the
// precision, the larger operand is returned unchanged.
inline ExpFloat ef_add(ExpFloat a, ExpFloat b) {
  charge_additions();
  if (a.is_infinite() || b.is_infinite()) return ExpFloat::infinity();
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (ExpFloat::raw_compare(a, b) < 0) std::swap(a, b);
  const __int128 gap = static_cast<__int128>(a.exp_) - b.exp_;
  if (gap > ExpFloat::kPrecision) return a;
  const detail::u128 va = static_cast<detail::u128>(a.mant_) << 64;
  const detail::u128 vb = (static_cast<detail::u128>(b.mant_) << 64) >> static_cast<int>(gap);
  const detail::u128 s = va + vb;
  const int lead = (s >> 117) ? 117 : 116;
  const auto r = detail::round53(s, lead, false);
  const __int128 e = static_cast<__int128>(a.exp_) + (lead - 116) + r.carry;
  ExpFloat::check_exponent(e);
  return ExpFloat(static_cast<std::int64_t>(e), r.mantissa);
}

inline ExpFloat ef_mul(ExpFloat a, ExpFloat b) {
  charge_multiplications();
  if ((a.is_zero() && b.is_infinite()) || (a.is_infinite() && b.is_zero())) {
    throw std::domain_error("ef_mul: zero times infinity");
  }
  if (a.is_infinite() || b.is_infinite()) return ExpFloat::infinity();
  if (a.is_zero() || b.is_zero()) return ExpFloat::zero();
  const detail::u128 p = static_cast<detail::u128>(a.mant_) * b.mant_;
  const int lead = (p >> 105) ? 105 : 104;
  const auto r = detail::round53(p, lead, false);
  const __int128 e = static_cast<__int128>(a.exp_) + b.exp_ + (lead - 104) + r.carry;
  ExpFloat::check_exponent(e);
  return ExpFloat(static_cast<std::int64_t>(e), r.mantissa);
}

inline ExpFloat ef_div(ExpFloat a, ExpFloat b) {
  charge_multiplications();
  if (b.is_zero()) throw std::domain_error("ef_div: division by zero");
  if (a.is_infinite() && b.is_infinite()) throw std::domain_error("ef_div: infinity over infinity");
  if (a.is_infinite()) return ExpFloat::infinity();
  if (b.is_infinite() || a.is_zero()) return ExpFloat::zero();
  const detail::u128 num = static_cast<detail::u128>(a.mant_) << 64;
  const detail::u128 q = num / b.mant_;
  const bool sticky = (num % b.mant_) != 0;
  const int lead = (q >> 64) ? 64 : 63;
  const auto r = detail::round53(q, lead, sticky);
  const __int128 e = static_cast<__int128>(a.exp_) - b.exp_ + (lead - 64) + r.carry;
  ExpFloat::check_exponent(e);
  return ExpFloat(static_cast<std::int64_t>(e), r.mantissa);
}

inline ExpFloat ef_scale(ExpFloat a, double factor) { return ef_mul(a, ExpFloat::from_double(factor)); }

inline ExpFloat ef_min(ExpFloat a, ExpFloat b) { return b < a ? b : a; }
inline ExpFloat ef_max(ExpFloat a, ExpFloat b) { return a < b ? b : a; }

// base^d by repeated squaring; negative d divides.
inline ExpFloat ef_pow(ExpFloat base, std::int64_t d) {
  ExpFloat result = ExpFloat::one();
  ExpFloat b = base;
  std::uint64_t e = d < 0 ? 0 - static_cast<std::uint64_t>(d) : static_cast<std::uint64_t>(d);
  while (e != 0) {
    if (e & 1) result = ef_mul(result, b);
    e >>= 1;
    if (e != 0) b = ef_mul(b, b);
  }
  return d < 0 ? ef_div(ExpFloat::one(), result) : result;
}

// floor(log2 x) and ceil(log2 x) for positive finite x; exact.
inline std::int64_t floor_log2(ExpFloat x) { return x.exponent(); }
inline std::int64_t ceil_log2(ExpFloat x) {
  return x.exponent() + (x.mantissa() != ExpFloat::kHiddenBit ? 1 : 0);
}

// ceil(x) and floor(x) as integers; x must be finite and below 2^63.
inline std::uint64_t ceil_to_uint(ExpFloat x) {
  if (x.is_zero()) return 0;
  if (x.is_infinite() || x.exponent() >= 63) throw std::overflow_error("ceil_to_uint: too large");
  if (x.exponent() < 0) return 1;
  const int shift = 52 - static_cast<int>(x.exponent());
  if (shift <= 0) return x.mantissa() << -shift;
  const std::uint64_t whole = x.mantissa() >> shift;
  const bool frac = (x.mantissa() & ((std::uint64_t{1} << shift) - 1)) != 0;
  return whole + (frac ? 1 : 0);
}

inline std::uint64_t floor_to_uint(ExpFloat x) {
  if (x.is_zero()) return 0;
  if (x.is_infinite() || x.exponent() >= 63) throw std::overflow_error("floor_to_uint: too large");
  if (x.exponent() < 0) return 0;
  const int shift = 52 - static_cast<int>(x.exponent());
  if (shift <= 0) return x.mantissa() << -shift;
  return x.mantissa() >> shift;
}

// approx / exact - 1 as a double (0 when both are infinite or both zero).
inline double relative_excess(ExpFloat approx, ExpFloat exact) {
  if (exact.is_infinite() || approx.is_infinite()) {
    return (exact.is_infinite() && approx.is_infinite()) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  if (exact.is_zero()) return approx.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
  return ef_div(approx, exact).to_double() - 1.0;
}

// exact <= approx <= (1+eps) exact, each side widened by kCheckSlack.
inline bool within_factor(ExpFloat approx, ExpFloat exact, double eps) {
  if (exact.is_infinite() || approx.is_infinite()) return exact.is_infinite() && approx.is_infinite();
  if (exact.is_zero() || approx.is_zero()) return exact.is_zero() && approx.is_zero();
  const double ratio = ef_div(approx, exact).to_double();
  return ratio >= 1.0 - kCheckSlack && ratio <= (1.0 + eps) * (1.0 + kCheckSlack);
}

// ---------------------------------------------------------------------------
// Powers of (1+eps) and bucket indices

// Powers of the double nearest to 1+eps.  Entry d is computed from an
// anchor base^(64 floor(d/64)) by repeated multiplication, so each value is a
// fixed function of d and consecutive entries differ by one rounded factor of
// the base.  Every bucket membership test goes through a ladder, which keeps
// all comparisons consistent with the stored powers.
class PowerLadder {
 public:
  static constexpr int kBlock = 64;

  explicit PowerLadder(double eps)
      : eps_(eps), base_(ExpFloat::from_double(1.0 + eps)), log2_base_(std::log2(1.0 + eps)) {}

  PowerLadder(const PowerLadder& o)
      : eps_(o.eps_), base_(o.base_), log2_base_(o.log2_base_), blocks_(o.blocks_) {}
  PowerLadder& operator=(const PowerLadder& o) {
    if (this != &o) {
      eps_ = o.eps_;
      base_ = o.base_;
      log2_base_ = o.log2_base_;
      blocks_ = o.blocks_;
      last_ = nullptr;
    }
    return *this;
  }

  double eps() const { return eps_; }
  ExpFloat base() const { return base_; }

  ExpFloat at(std::int64_t d) {
    const std::int64_t blk = d >= 0 ? d / kBlock : -((-d + kBlock - 1) / kBlock);
    if (blk != last_block_ || last_ == nullptr) {
      auto it = blocks_.find(blk);
      if (it == blocks_.end()) {
        std::array<ExpFloat, kBlock> arr;
        arr[0] = ef_pow(base_, blk * kBlock);
        for (int r = 1; r < kBlock; ++r) arr[r] = ef_mul(arr[r - 1], base_);
        it = blocks_.emplace(blk, arr).first;
      }
      last_block_ = blk;
      last_ = &it->second;
    }
    return (*last_)[static_cast<std::size_t>(d - blk * kBlock)];
  }

  // Unique d with at(d-1) <= x < at(d).
  std::int64_t bucket(ExpFloat x) {
    if (!x.is_positive_finite()) throw std::invalid_argument("bucket_index: x must be finite and positive");
    const double est = std::floor(x.log2() / log2_base_);
    if (!(std::fabs(est) < 0x1p62)) throw std::overflow_error("bucket_index: index out of range");
    auto d = static_cast<std::int64_t>(est) + 1;
    while (x < at(d - 1)) --d;
    while (!(x < at(d))) ++d;
    return d;
  }

 private:
  double eps_;
  ExpFloat base_;
  double log2_base_;
  std::unordered_map<std::int64_t, std::array<ExpFloat, kBlock>> blocks_;
  std::int64_t last_block_ = 0;
  const std::array<ExpFloat, kBlock>* last_ = nullptr;
};

inline std::int64_t bucket_index(ExpFloat x, double eps) {
  validate_eps(eps, "bucket_index");
  PowerLadder ladder(eps);
  return ladder.bucket(x);
}

// ---------------------------------------------------------------------------
// Rank compression

using Rank = std::uint32_t;

class RankMap {
 public:
  RankMap() = default;
  explicit RankMap(std::vector<ExpFloat> sorted_distinct) : values_(std::move(sorted_distinct)) {}

  // Rank reserved for +infinity, one above the largest finite rank.
  Rank top() const { return static_cast<Rank>(values_.size() + 1); }
  std::size_t size() const { return values_.size(); }
  const std::vector<ExpFloat>& values() const { return values_; }

  ExpFloat decode(Rank r) const {
    if (r == top()) return ExpFloat::infinity();
    if (r == 0 || r > values_.size()) throw std::out_of_range("RankMap::decode: bad rank");
    return values_[r - 1];
  }

  Rank encode(ExpFloat x) const {
    if (x.is_infinite()) return top();
    auto it = std::lower_bound(values_.begin(), values_.end(), x,
                               [](const ExpFloat& a, const ExpFloat& b) { return ExpFloat::raw_compare(a, b) < 0; });
    if (it == values_.end() || ExpFloat::raw_compare(*it, x) != 0) {
      throw std::out_of_range("RankMap::encode: value not in map");
    }
    return static_cast<Rank>(it - values_.begin() + 1);
  }

 private:
  std::vector<ExpFloat> values_;
};

struct RankedValues {
  std::vector<Rank> ranks;
  RankMap map;
};

// Order-preserving replacement of values by 1..k; +infinity gets k+1.
inline RankedValues rank_compress(const std::vector<ExpFloat>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  RankedValues out;
  out.ranks.assign(values.size(), 0);
  std::vector<ExpFloat> distinct;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const ExpFloat& v = values[order[pos]];
    if (v.is_infinite()) break;
    if (distinct.empty() || !(distinct.back() == v)) distinct.push_back(v);
    out.ranks[order[pos]] = static_cast<Rank>(distinct.size());
  }
  const auto top = static_cast<Rank>(distinct.size() + 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].is_infinite()) out.ranks[i] = top;
  }
  out.map = RankMap(std::move(distinct));
  return out;
}

}  // namespace minplus
