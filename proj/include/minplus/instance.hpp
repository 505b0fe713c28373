#pragma once

/**
 * @file instance.hpp
 * Text instance files and seeded instance generation.
 *
 * A file is a sequence of blocks, whitespace separated, with `#` starting a
 * comment that runs to the end of the line:
 *
 *     graph directed|undirected <n> <m>    followed by m lines `u v w`
 *     matrix <rows> <cols>                 followed by rows*cols weights
 *     seq <n>                              followed by n weights
 *
 * Weight tokens are `inf`, a plain decimal (`2.5`, `1e6`), or a decimal
 * mantissa with a binary exponent (`1.5p10` = 1.5 * 2^10).  Printing always
 * uses the `p` form with the shortest mantissa that parses back exactly.
 */

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "minplus/graph.hpp"
#include "minplus/matrix.hpp"
#include "minplus/numeric.hpp"

namespace minplus {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        message_(what),
        line_(line),
        column_(column) {}

  const std::string& message() const { return message_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

// ---------------------------------------------------------------------------
// Weight tokens

inline std::string format_weight(ExpFloat x) {
  if (x.is_infinite()) return "inf";
  if (x.is_zero()) return "0";
  // The 53-bit mantissa is exactly a double in [1, 2); to_chars gives the
  // shortest decimal that reads back to it.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x.mantissa_fraction());
  std::string out(buf, res.ptr);
  out += 'p';
  out += std::to_string(x.exponent());
  return out;
}

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty() || s.front() == '+' || s.front() == '-') return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out, std::chars_format::general);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace detail

// Throws std::invalid_argument for malformed tokens and std::overflow_error
// when the exponent leaves the signed 64-bit range.
inline ExpFloat parse_weight(std::string_view s) {
  if (s == "inf") return ExpFloat::infinity();
  const std::size_t p = s.find('p');
  double mant = 0;
  if (p == std::string_view::npos) {
    if (!detail::parse_double(s, mant)) {
      if (!s.empty() && s.front() != '-') {
        double probe = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), probe);
        if (res.ec == std::errc::result_out_of_range && res.ptr == s.data() + s.size()) {
          throw std::overflow_error("weight out of range: " + std::string(s));
        }
      }
      throw std::invalid_argument("malformed weight token '" + std::string(s) + "'");
    }
    if (std::isinf(mant)) throw std::invalid_argument("malformed weight token '" + std::string(s) + "'");
    return ExpFloat::from_double(mant);
  }
  const std::string_view ms = s.substr(0, p), es = s.substr(p + 1);
  if (!detail::parse_double(ms, mant) || std::isinf(mant) || es.empty()) {
    throw std::invalid_argument("malformed weight token '" + std::string(s) + "'");
  }
  std::int64_t e = 0;
  const auto res = std::from_chars(es.data(), es.data() + es.size(), e);
  if (res.ec == std::errc::result_out_of_range) throw std::overflow_error("exponent overflow in '" + std::string(s) + "'");
  if (res.ec != std::errc() || res.ptr != es.data() + es.size()) {
    throw std::invalid_argument("malformed weight token '" + std::string(s) + "'");
  }
  if (mant == 0.0) return ExpFloat::zero();
  const ExpFloat m = ExpFloat::from_double(mant);
  const __int128 total = static_cast<__int128>(m.exponent()) + e;
  if (total < ExpFloat::kMinExponent || total > ExpFloat::kMaxExponent) {
    throw std::overflow_error("exponent overflow in '" + std::string(s) + "'");
  }
  return ExpFloat::from_parts(static_cast<std::int64_t>(total), m.mantissa());
}

// ---------------------------------------------------------------------------
// Instance files

using InstanceBlock = std::variant<Graph, WeightMatrix, WeightSequence>;

struct Instance {
  std::vector<InstanceBlock> blocks;
  std::vector<std::string> warnings;
};

namespace detail {

class Tokenizer {
 public:
  struct Token {
    std::string_view text;
    std::size_t line = 0, column = 0;
  };

  explicit Tokenizer(std::string text) : text_(std::move(text)) {}

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  Token next(const char* expected) {
    skip();
    if (pos_ >= text_.size()) throw ParseError(std::string("unexpected end of input, expected ") + expected, line_, col_);
    Token t{{}, line_, col_};
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '#') advance();
    t.text = std::string_view(text_).substr(start, pos_ - start);
    return t;
  }

  std::uint64_t next_uint(const char* expected) {
    const Token t = next(expected);
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
      throw ParseError(std::string("expected ") + expected + ", got '" + std::string(t.text) + "'", t.line, t.column);
    }
    return v;
  }

  ExpFloat next_weight() {
    const Token t = next("weight");
    try {
      return parse_weight(t.text);
    } catch (const std::exception& e) {
      throw ParseError(e.what(), t.line, t.column);
    }
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (is_space(text_[pos_])) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string text_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

}  // namespace detail

inline Instance parse_instance(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  detail::Tokenizer tok(buf.str());
  Instance inst;
  while (!tok.at_end()) {
    const auto head = tok.next("block kind");
    if (head.text == "graph") {
      const auto orient = tok.next("directed or undirected");
      if (orient.text != "directed" && orient.text != "undirected") {
        throw ParseError("expected directed or undirected, got '" + std::string(orient.text) + "'", orient.line,
                         orient.column);
      }
      const std::uint64_t n = tok.next_uint("vertex count");
      const std::uint64_t m = tok.next_uint("edge count");
      Graph g(n, orient.text == "directed");
      for (std::uint64_t k = 0; k < m; ++k) {
        const auto ut = tok.next("edge endpoint");
        std::uint64_t u = 0, v = 0;
        const auto ur = std::from_chars(ut.text.data(), ut.text.data() + ut.text.size(), u);
        if (ur.ec != std::errc() || ur.ptr != ut.text.data() + ut.text.size()) {
          throw ParseError("expected edge endpoint, got '" + std::string(ut.text) + "'", ut.line, ut.column);
        }
        v = tok.next_uint("edge endpoint");
        const ExpFloat w = tok.next_weight();
        if (u >= n || v >= n) throw ParseError("edge endpoint out of range", ut.line, ut.column);
        if (!w.is_positive_finite()) throw ParseError("edge weight must be finite and positive", ut.line, ut.column);
        if (!g.add_edge(u, v, w)) {
          inst.warnings.push_back("self-loop at vertex " + std::to_string(u) + " dropped (line " +
                                  std::to_string(ut.line) + ")");
        }
      }
      inst.blocks.emplace_back(std::move(g));
    } else if (head.text == "matrix") {
      const std::uint64_t r = tok.next_uint("row count");
      const std::uint64_t c = tok.next_uint("column count");
      WeightMatrix m(r, c);
      for (auto& x : m.data()) x = tok.next_weight();
      inst.blocks.emplace_back(std::move(m));
    } else if (head.text == "seq") {
      WeightSequence s(tok.next_uint("sequence length"));
      for (auto& x : s) x = tok.next_weight();
      inst.blocks.emplace_back(std::move(s));
    } else {
      throw ParseError("unknown block kind '" + std::string(head.text) + "'", head.line, head.column);
    }
  }
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

inline void print_block(std::ostream& out, const InstanceBlock& block) {
  if (const auto* g = std::get_if<Graph>(&block)) {
    out << "graph " << (g->directed() ? "directed" : "undirected") << ' ' << g->n() << ' ' << g->edge_count() << '\n';
    for (const Edge& e : g->edges()) out << e.u << ' ' << e.v << ' ' << format_weight(e.w) << '\n';
  } else if (const auto* m = std::get_if<WeightMatrix>(&block)) {
    out << "matrix " << m->rows() << ' ' << m->cols() << '\n';
    for (std::size_t i = 0; i < m->rows(); ++i) {
      for (std::size_t j = 0; j < m->cols(); ++j) out << (j ? " " : "") << format_weight((*m)(i, j));
      out << '\n';
    }
  } else {
    const auto& s = std::get<WeightSequence>(block);
    out << "seq " << s.size() << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << format_weight(s[i]);
    out << '\n';
  }
}

inline void print_instance(std::ostream& out, const Instance& inst) {
  for (const auto& b : inst.blocks) print_block(out, b);
}

inline std::string print_instance(const Instance& inst) {
  std::ostringstream out;
  print_instance(out, inst);
  return out.str();
}

// ---------------------------------------------------------------------------
// Seeded generation

// splitmix64: sub-seeds are derived by mixing (seed, tag), and each stream is
// a counter run through the same finalizer.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    return mix(seed ^ mix(tag + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Uniform in [0, 1) on a 2^-53 grid.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class InstanceKind { graph, matrix, seq };

struct GenSpec {
  InstanceKind kind = InstanceKind::graph;
  std::size_t n = 16;
  std::int64_t exp_lo = 0;
  std::int64_t exp_hi = 8;
  double density = 0.2;     // edge probability, or the fraction of finite matrix/sequence entries
  bool directed = true;
  bool connected = false;   // add a random spanning cycle
  std::size_t blocks = 0;   // 0: one graph, or two matrices/sequences
  std::uint64_t seed = 1;
};

namespace detail {

// Weight stream: each weight consumes two draws, one for the exponent and one
// for the mantissa.  The exponent is lo + floor(u (hi - lo + 1)) for the same
// u regardless of the range, so two ranges give the same weights rescaled.
inline ExpFloat draw_weight(SplitMix64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::int64_t e = lo + static_cast<std::int64_t>(rng.below(span));
  const std::uint64_t mant = ExpFloat::kHiddenBit | (rng.next() & (ExpFloat::kHiddenBit - 1));
  return ExpFloat::from_parts(e, mant);
}

}  // namespace detail

// Topology (edge set, finite pattern) and weights come from separate
// sub-seeds, so changing the exponent range keeps the topology.
inline Instance generate_instance(const GenSpec& spec) {
  if (spec.exp_lo > spec.exp_hi) throw std::invalid_argument("generate_instance: empty exponent range");
  if (!(spec.density >= 0.0 && spec.density <= 1.0)) throw std::invalid_argument("generate_instance: density must lie in [0, 1]");
  const std::size_t count = spec.blocks ? spec.blocks : (spec.kind == InstanceKind::graph ? 1 : 2);
  Instance inst;
  for (std::size_t b = 0; b < count; ++b) {
    SplitMix64 topo(SplitMix64::derive(spec.seed, 2 * b));
    SplitMix64 weights(SplitMix64::derive(spec.seed, 2 * b + 1));
    const std::size_t n = spec.n;
    if (spec.kind == InstanceKind::graph) {
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = spec.directed ? 0 : u + 1; v < n; ++v) {
          if (u != v && topo.unit() < spec.density) pairs.emplace_back(u, v);
        }
      }
      if (spec.connected && n >= 2) {
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[topo.below(i + 1)]);
        for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(perm[i], perm[(i + 1) % n]);
      }
      Graph g(n, spec.directed);
      for (const auto& [u, v] : pairs) g.add_edge(u, v, detail::draw_weight(weights, spec.exp_lo, spec.exp_hi));
      inst.blocks.emplace_back(std::move(g));
    } else {
      std::vector<ExpFloat> vals(spec.kind == InstanceKind::matrix ? n * n : n);
      for (auto& x : vals) {
        const bool finite = topo.unit() < spec.density;
        const ExpFloat w = detail::draw_weight(weights, spec.exp_lo, spec.exp_hi);
        x = finite ? w : ExpFloat::infinity();
      }
      if (spec.kind == InstanceKind::matrix) {
        WeightMatrix m(n, n);
        m.data() = std::move(vals);
        inst.blocks.emplace_back(std::move(m));
      } else {
        inst.blocks.emplace_back(std::move(vals));
      }
    }
  }
  return inst;
}

}  // namespace minplus
