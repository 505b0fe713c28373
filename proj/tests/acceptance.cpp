// Acceptance run: one line per criterion, nonzero exit if any fails.
//
// Every approximate value is checked against an exact oracle with
// exact <= approx <= (1+eps) exact, allowing the library-wide 2^-40
// multiplicative slack for ef_add rounding.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "minplus/minplus.hpp"
#include "test_support.hpp"

using namespace minplus;
using testing_support::random_graph;
using testing_support::random_matrix;
using testing_support::random_rank_seq;
using testing_support::random_ranks;
using testing_support::random_vector;
using testing_support::random_weight;

namespace {

// Pinned tolerances.
constexpr double kSlack = 0x1p-40;
static_assert(kSlack == kCheckSlack);
constexpr double kOpCountSpread = 0.05;
constexpr double kZwickGrowth = 20.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; only the first few messages are kept.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) first_ += (first_.empty() ? "" : "; ") + what;
  }
  void note_ratio(ExpFloat approx, ExpFloat exact) {
    if (!exact.is_infinite() && !exact.is_zero() && !approx.is_infinite()) {
      worst_ = std::max(worst_, relative_excess(approx, exact));
    }
  }
  // Sandwich check on one entry, recording the worst observed excess.
  void sandwich(ExpFloat approx, ExpFloat exact, double eps, const std::string& where) {
    note_ratio(approx, exact);
    ++checks_;
    if (within_factor(approx, exact, eps)) return;
    ++failures_;
    if (failures_ <= 3) {
      first_ += (first_.empty() ? "" : "; ") + where + ": approx " + format_weight(approx) + " exact " +
                format_weight(exact) + " eps " + std::to_string(eps);
    }
  }
  bool ok() const { return failures_ == 0; }
  std::uint64_t checks() const { return checks_; }
  double worst() const { return worst_; }
  Outcome outcome(std::string detail) const {
    if (!ok()) detail = std::to_string(failures_) + " of " + std::to_string(checks_) + " checks failed: " + first_;
    return {ok(), detail};
  }

 private:
  std::uint64_t checks_ = 0, failures_ = 0;
  double worst_ = 0.0;
  std::string first_;
};

std::string fmt(double x, int prec = 3) {
  std::ostringstream ss;
  ss.precision(prec);
  ss << x;
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds_since(t0);
}

// Adds a random-weight Hamiltonian cycle so distances are finite.
void add_cycle(Graph& g, std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const std::size_t n = g.n();
  if (n < 2) return;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (!g.directed() && n == 2 && i == 1) break;
    g.add_edge(i, j, random_weight(rng, lo, hi));
  }
}

WeightSequence brute_minconv(const WeightSequence& a, const WeightSequence& b) {
  const std::size_t n = a.size();
  WeightSequence c(n, ExpFloat::infinity());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i <= k; ++i) {
      const ExpFloat s = ef_add(a[i], b[k - i]);
      if (ExpFloat::raw_compare(s, c[k]) < 0) c[k] = s;
    }
  }
  return c;
}

RankMatrix brute_minmax_product(const RankMatrix& a, const RankMatrix& b) {
  RankMatrix c(a.rows(), b.cols(), kRankMax);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t k = 0; k < a.cols(); ++k) c(i, j) = std::min(c(i, j), std::max(a(i, k), b(k, j)));
    }
  }
  return c;
}

RankSequence brute_minmax_conv(const RankSequence& a, const RankSequence& b) {
  RankSequence c(a.size(), kRankMax);
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i <= k; ++i) c[k] = std::min(c[k], std::max(a[i], b[k - i]));
  }
  return c;
}

// ---------------------------------------------------------------------------
// 1 and 2: covering sandwich and layer counts

struct LayerCountLog {
  std::uint64_t constructions = 0;
  std::uint64_t formula_mismatches = 0;
  std::uint64_t bound_violations = 0;
  std::string first;

  void record(const CoveringFamily& fam, std::size_t n, double eps) {
    ++constructions;
    const auto s = static_cast<std::int64_t>(fam.layers.size());
    if (s != strong_layer_count(fam.n_pad, eps)) {
      ++formula_mismatches;
      if (first.empty()) first = "n=" + std::to_string(n) + " eps=" + fmt(eps) + " s=" + std::to_string(s);
    }
    const double log_n = n > 1 ? std::log2(static_cast<double>(n)) : 0.0;
    if (static_cast<double>(s) > 64.0 * (1.0 / eps + log_n) * std::log2(1.0 / eps)) {
      ++bound_violations;
      if (first.empty()) first = "bound exceeded at n=" + std::to_string(n) + " eps=" + fmt(eps);
    }
  }
};

LayerCountLog g_layer_log;

Outcome covering_sandwich() {
  Checker ck;
  std::mt19937_64 rng(1001);
  for (std::size_t n : {16u, 64u, 256u}) {
    for (std::int64_t span : {8, 200}) {
      for (double eps : {0.5, 0.1, 0.02}) {
        for (int t = 0; t < 50; ++t) {
          const WeightSequence a = random_vector(rng, n, -span / 2, span / 2);
          const WeightSequence b = random_vector(rng, n, -span / 2, span / 2);
          const CoveringFamily fam = sum_to_max_covering(a, b, eps, CoveringMode::strong);
          g_layer_log.record(fam, n, eps);
          const WeightMatrix m = covering_minmax(fam, n);
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) ck.sandwich(m(i, j), ef_add(a[i], b[j]), eps, "pair");
          }
          if (!ck.ok()) return ck.outcome("");
        }
      }
    }
  }
  return ck.outcome(std::to_string(ck.checks()) + " pairs, worst excess " + fmt(ck.worst()));
}

Outcome layer_counts() {
  std::mt19937_64 rng(1002);
  for (std::size_t n : {1u, 2u, 3u, 100u, 1000u, 4096u}) {
    for (double eps : {0.5, 0.1, 0.02, 0.005}) {
      const WeightSequence a = random_vector(rng, n, -300, 300);
      const WeightSequence b = random_vector(rng, n, -300, 300);
      g_layer_log.record(sum_to_max_covering(a, b, eps, CoveringMode::strong), n, eps);
    }
  }
  const bool ok = g_layer_log.formula_mismatches == 0 && g_layer_log.bound_violations == 0;
  if (!ok) {
    return {false, std::to_string(g_layer_log.formula_mismatches) + " formula mismatches, " +
                       std::to_string(g_layer_log.bound_violations) + " bound violations, first: " + g_layer_log.first};
  }
  return {true, std::to_string(g_layer_log.constructions) + " constructions match the closed form and bound"};
}

// ---------------------------------------------------------------------------
// 3: approximate min-plus product

Outcome product_sandwich() {
  Checker ck;
  std::mt19937_64 rng(1003);
  const std::size_t sizes[] = {8, 16, 32, 64, 128};
  const std::int64_t spans[] = {8, 60, 400};
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = sizes[t % 5];
    const std::int64_t span = spans[t % 3];
    const double eps = t % 2 ? 0.1 : 0.5;
    const double inf_fraction = t % 4 == 3 ? 0.2 : 0.0;
    const WeightMatrix a = random_matrix(rng, n, -span / 2, span / 2, inf_fraction);
    const WeightMatrix b = random_matrix(rng, n, -span / 2, span / 2, inf_fraction);
    const WeightMatrix exact = minplus_product_naive(a, b);
    const WeightMatrix approx = approx_minplus_product(a, b, eps);
    for (std::size_t k = 0; k < exact.data().size(); ++k) {
      ck.sandwich(approx.data()[k], exact.data()[k], eps, "instance " + std::to_string(t));
    }
  }
  return ck.outcome("30 instances, worst excess " + fmt(ck.worst()));
}

// ---------------------------------------------------------------------------
// 4 and 5: APSP

Outcome directed_apsp() {
  Checker ck;
  std::mt19937_64 rng(1004);
  struct Case {
    std::size_t n;
    double p;
    std::int64_t lo, hi;
    double eps;
  };
  const Case cases[] = {{16, 0.3, 0, 20, 0.5},     {48, 0.1, -150, 150, 0.1}, {96, 0.05, -150, 150, 0.5},
                        {128, 0.04, -150, 150, 0.1}, {128, 0.02, 0, 300, 0.5}};
  for (const Case& c : cases) {
    Graph g = random_graph(rng, c.n, true, c.p, c.lo, c.hi);
    if (c.n != 96) add_cycle(g, rng, c.lo, c.hi);
    const DistanceMatrix exact = exact_apsp(g);
    const WeightMatrix floyd = testing_support::floyd_warshall(g);
    const DistanceMatrix approx = approx_apsp_directed(g, c.eps);
    for (std::size_t k = 0; k < exact.data().size(); ++k) {
      ck.expect(within_factor(floyd.data()[k], exact.data()[k], 0.0), "Dijkstra and Floyd-Warshall disagree");
      ck.sandwich(approx.data()[k], exact.data()[k], c.eps, "n=" + std::to_string(c.n));
    }
  }
  return ck.outcome("5 graphs up to n=128 and 300 binary orders, worst excess " + fmt(ck.worst()));
}

Outcome undirected_apsp() {
  Checker ck;
  std::mt19937_64 rng(1005);
  struct Case {
    std::size_t n;
    double p;
    double eps;
  };
  const Case cases[] = {{16, 0.3, 0.5}, {64, 0.08, 0.1}, {128, 0.04, 0.03}, {128, 0.1, 0.5}, {100, 0.02, 0.1}};
  for (const Case& c : cases) {
    Graph g = random_graph(rng, c.n, false, c.p, 0, 59);
    if (c.p > 0.03) add_cycle(g, rng, 0, 59);
    const DistanceMatrix exact = exact_apsp(g);
    const DistanceMatrix approx = approx_apsp_undirected(g, c.eps);
    for (std::size_t k = 0; k < exact.data().size(); ++k) {
      ck.sandwich(approx.data()[k], exact.data()[k], c.eps, "n=" + std::to_string(c.n));
    }
  }
  return ck.outcome("5 graphs up to n=128 with weights up to 2^60, worst excess " + fmt(ck.worst()));
}

// ---------------------------------------------------------------------------
// 6: operation counts independent of the weight range

GenSpec gen_spec(InstanceKind kind, std::int64_t exp_hi) {
  GenSpec spec;
  spec.kind = kind;
  spec.n = 64;
  spec.exp_lo = 0;
  spec.exp_hi = exp_hi;
  spec.density = kind == InstanceKind::graph ? 0.1 : 1.0;
  spec.connected = kind == InstanceKind::graph;
  spec.seed = 6006;
  return spec;
}

std::uint64_t count_ops(const std::function<void()>& f) {
  OpCounter counter;
  CountingScope scope(counter);
  f();
  return counter.total();
}

std::uint64_t ops_for(const std::string& algo, std::int64_t exp_hi) {
  constexpr double eps = 0.1;
  if (algo == "approx_apsp_directed") {
    const Instance inst = generate_instance(gen_spec(InstanceKind::graph, exp_hi));
    const Graph& g = std::get<Graph>(inst.blocks[0]);
    return count_ops([&] { (void)approx_apsp_directed(g, eps); });
  }
  if (algo == "approx_minconv") {
    const Instance inst = generate_instance(gen_spec(InstanceKind::seq, exp_hi));
    const auto& a = std::get<WeightSequence>(inst.blocks[0]);
    const auto& b = std::get<WeightSequence>(inst.blocks[1]);
    return count_ops([&] { (void)approx_minconv(a, b, eps); });
  }
  const Instance inst = generate_instance(gen_spec(InstanceKind::matrix, exp_hi));
  const auto& a = std::get<WeightMatrix>(inst.blocks[0]);
  const auto& b = std::get<WeightMatrix>(inst.blocks[1]);
  if (algo == "zwick_minplus_product") return count_ops([&] { (void)zwick_minplus_product(a, b, eps); });
  return count_ops([&] { (void)approx_minplus_product(a, b, eps); });
}

Outcome strongly_polynomial() {
  Checker ck;
  std::string detail;
  for (const std::string algo : {"approx_minplus_product", "approx_apsp_directed", "approx_minconv"}) {
    const double small = static_cast<double>(ops_for(algo, 8));
    const double large = static_cast<double>(ops_for(algo, 512));
    const double spread = std::abs(large - small) / std::min(small, large);
    ck.expect(spread < kOpCountSpread, algo + " spread " + fmt(spread));
    detail += algo + " " + fmt(100 * spread, 2) + "%, ";
  }
  const double zs = static_cast<double>(ops_for("zwick_minplus_product", 8));
  const double zl = static_cast<double>(ops_for("zwick_minplus_product", 512));
  ck.expect(zl >= kZwickGrowth * zs, "zwick growth only " + fmt(zl / zs));
  return ck.outcome(detail + "zwick grows " + fmt(zl / zs) + "x");
}

// ---------------------------------------------------------------------------
// 7: exact min-max through the approximate algorithms

Outcome equivalence_reductions() {
  Checker ck;
  std::mt19937_64 rng(1007);
  const std::size_t product_sizes[] = {1, 3, 16, 40, 64};
  const Rank max_ranks[] = {1, 5, 1000, 1u << 20};
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = product_sizes[t % 5];
    const Rank r = max_ranks[t % 4];
    const double eps = t % 2 ? 1.0 : 0.25;
    const RankMatrix a = random_ranks(rng, n, r), b = random_ranks(rng, n, r);
    ck.expect(minmax_product_via_approx(a, b, eps) == brute_minmax_product(a, b),
              "product instance " + std::to_string(t));
  }
  const std::size_t conv_sizes[] = {1, 7, 128, 700, 1024};
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = conv_sizes[t % 5];
    const Rank r = max_ranks[t % 4];
    const double eps = t % 2 ? 1.0 : 0.25;
    const RankSequence a = random_rank_seq(rng, n, r), b = random_rank_seq(rng, n, r);
    ck.expect(minmax_conv_via_approx(a, b, eps) == brute_minmax_conv(a, b), "conv instance " + std::to_string(t));
  }
  return ck.outcome("20 products up to n=64 and 20 convolutions up to n=1024 equal exactly");
}

// ---------------------------------------------------------------------------
// 8: graph characteristics

Outcome characteristics() {
  using K = CharacteristicKind;
  Checker ck;
  std::mt19937_64 rng(1008);
  const K kinds[] = {K::diameter, K::radius, K::median, K::min_triangle, K::min_cycle};
  const char* names[] = {"diameter", "radius", "median", "min_triangle", "min_cycle"};
  int graphs = 0;
  for (bool directed : {true, false}) {
    for (std::size_t n : {10u, 32u, 64u}) {
      for (double eps : {0.5, 0.1}) {
        const double p = n == 64 ? 0.12 : 0.3;
        Graph g = random_graph(rng, n, directed, p, 0, 40);
        add_cycle(g, rng, 0, 40);
        ++graphs;
        for (int k = 0; k < 5; ++k) {
          const ExpFloat exact = testing_support::characteristic_oracle(g, kinds[k]);
          ck.sandwich(approx_characteristic(g, kinds[k], eps), exact, eps,
                      std::string(names[k]) + (directed ? " directed" : " undirected") + " n=" + std::to_string(n));
        }
      }
    }
  }
  int small = 0;
  for (int t = 0; t < 40; ++t) {
    const bool directed = t % 2 == 0;
    const std::size_t n = 3 + static_cast<std::size_t>(t % 8);
    const Graph g = random_graph(rng, n, directed, 0.45, 0, 12);
    const double brute = testing_support::exhaustive_min_cycle(g);
    const ExpFloat exact = std::isinf(brute) ? ExpFloat::infinity() : ExpFloat::from_double(brute);
    ck.expect(within_factor(testing_support::characteristic_oracle(g, K::min_cycle), exact, 0.0),
              "per-edge oracle disagrees with enumeration");
    ck.sandwich(approx_characteristic(g, K::min_cycle, t % 3 ? 0.1 : 0.5), exact, t % 3 ? 0.1 : 0.5,
                "min_cycle vs enumeration n=" + std::to_string(n));
    ++small;
  }
  return ck.outcome(std::to_string(graphs) + " graphs x 5 kinds, " + std::to_string(small) +
                    " cycle enumerations, worst excess " + fmt(ck.worst()));
}

// ---------------------------------------------------------------------------
// 9: convolution suite

Outcome convolution_suite() {
  Checker ck;
  std::mt19937_64 rng(1009);
  const auto check_all = [&](const WeightSequence& approx, const WeightSequence& exact, double eps,
                             const std::string& where) {
    for (std::size_t k = 0; k < exact.size(); ++k) ck.sandwich(approx[k], exact[k], eps, where);
  };
  const auto upper_bound = [&](const WeightSequence& approx, const WeightSequence& exact, const std::string& where) {
    for (std::size_t k = 0; k < exact.size(); ++k) {
      ck.expect(ExpFloat::raw_compare(exact[k], approx[k]) <= 0, where + " undercuts the exact value");
    }
  };
  ConvOptions fast;
  fast.minmax_backend = ConvBackend::subquadratic;
  for (std::size_t n : {1u, 2u, 17u, 256u, 1024u, 4096u}) {
    for (double eps : {0.5, 0.1}) {
      const std::int64_t span = n % 2 ? 60 : 400;
      const WeightSequence a = random_vector(rng, n, -span / 2, span / 2, 0.05);
      const WeightSequence b = random_vector(rng, n, -span / 2, span / 2, 0.05);
      const WeightSequence exact = minconv_naive(a, b);
      const std::string at = " n=" + std::to_string(n) + " eps=" + fmt(eps);
      check_all(approx_minconv_simple(a, b, eps, n >= 1024 ? fast : ConvOptions{}), exact, eps, "simple" + at);
      check_all(approx_minconv(a, b, eps), exact, eps, "combined" + at);
      if (n <= 1024) {
        const WeightSequence brute = brute_minconv(a, b);
        for (std::size_t k = 0; k < n; ++k) {
          ck.expect(ExpFloat::raw_compare(brute[k], exact[k]) == 0, "naive oracle mismatch");
        }
      }
    }
  }
  // Far-only: every pair has ratio beyond 2^90, so the distant part alone
  // must sandwich.  Close-only: all values within a factor 8, so the close
  // part alone must sandwich.  On mixed inputs each part is an upper bound.
  for (std::size_t n : {64u, 1024u}) {
    for (double eps : {0.5, 0.1}) {
      const std::string at = " n=" + std::to_string(n) + " eps=" + fmt(eps);
      const WeightSequence fa = random_vector(rng, n, 0, 2), fb = random_vector(rng, n, 100, 102);
      check_all(distant_minconv(fa, fb, eps), minconv_naive(fa, fb), eps, "far-only" + at);
      const WeightSequence ca = random_vector(rng, n, 10, 12), cb = random_vector(rng, n, 10, 12);
      check_all(close_minconv(ca, cb, eps), minconv_naive(ca, cb), eps, "close-only" + at);
      const WeightSequence ma = random_vector(rng, n, -100, 100), mb = random_vector(rng, n, -100, 100);
      const WeightSequence mixed = minconv_naive(ma, mb);
      upper_bound(distant_minconv(ma, mb, eps), mixed, "distant part" + at);
      upper_bound(close_minconv(ma, mb, eps), mixed, "close part" + at);
    }
  }
  // Rounded sums: x, y in (0, q] with x + y >= q/2 round up to multiples of
  // q eps/4 whose sum stays within (1+eps)(x+y).
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 100000; ++t) {
    const double eps = 0.01 + 0.99 * unif(rng);
    const ExpFloat q = ExpFloat::pow2(static_cast<std::int64_t>(rng() % 400) - 200);
    const double sx = std::max(unif(rng), 1e-9);
    const double sy = std::min(1.0, std::max(unif(rng), 0.5 - sx + 1e-12));
    const ExpFloat x = ef_mul(q, ExpFloat::from_double(sx)), y = ef_mul(q, ExpFloat::from_double(sy));
    const ExpFloat unit = ef_mul(q, ExpFloat::from_double(eps / 4));
    const auto units = static_cast<std::uint64_t>(close_round(x, unit) + close_round(y, unit));
    ck.sandwich(ef_mul(ExpFloat::from_uint(units), unit), ef_add(x, y), eps, "rounded sum");
  }
  return ck.outcome("sandwich up to n=4096, far/close clauses, 1e5 rounded-sum triples, worst excess " +
                    fmt(ck.worst()));
}

// ---------------------------------------------------------------------------
// 10: min-max kernel backends

Outcome kernel_backends() {
  Checker ck;
  std::mt19937_64 rng(1010);
  const Rank max_ranks[] = {1, 3, 200, 1u << 30};
  for (std::size_t n : {1u, 7u, 64u, 200u, 256u}) {
    for (Rank r : max_ranks) {
      const RankMatrix a = random_ranks(rng, n, r), b = random_ranks(rng, n, r);
      ck.expect(minmax_product(a, b, ProductBackend::threshold) == minmax_product(a, b, ProductBackend::naive),
                "product backends differ at n=" + std::to_string(n));
    }
  }
  for (std::size_t n : {1u, 5u, 100u, 1024u, 4096u}) {
    for (Rank r : max_ranks) {
      const RankSequence a = random_rank_seq(rng, n, r), b = random_rank_seq(rng, n, r);
      ck.expect(minmax_convolution(a, b, ConvBackend::subquadratic) == minmax_convolution(a, b, ConvBackend::naive),
                "convolution backends differ at n=" + std::to_string(n));
    }
  }
  // Trend at n = 2^16 for a narrow and a wide rank range.
  const std::size_t big = std::size_t{1} << 16;
  std::string trend;
  for (Rank r : {static_cast<Rank>(4 * big), Rank{1} << 30}) {
    const RankSequence a = random_rank_seq(rng, big, r), b = random_rank_seq(rng, big, r);
    RankSequence fast_out, naive_out;
    const double t_naive = timed([&] { naive_out = minmax_convolution(a, b, ConvBackend::naive); });
    const double t_fast = timed([&] { fast_out = minmax_convolution(a, b, ConvBackend::subquadratic); });
    ck.expect(fast_out == naive_out, "convolution backends differ at n=2^16");
    trend += (trend.empty() ? "" : ", ") + std::string("ranks<=") + std::to_string(r) + " subquadratic " +
             fmt(t_fast) + "s vs naive " + fmt(t_naive) + "s";
  }
  return ck.outcome("bit-for-bit equal; n=2^16 trend (not asserted): " + trend);
}

// ---------------------------------------------------------------------------
// 11: CLI contract

struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(MINPLUS_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t got; (got = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string without_wall_time(const std::string& json) {
  static const std::regex wall(R"("wall_time_s":\s*[-+0-9.eE]+)");
  return std::regex_replace(json, wall, "");
}

Outcome cli_contract() {
  Checker ck;
  std::mt19937_64 rng(1011);
  std::uniform_int_distribution<std::int64_t> exps(-(std::int64_t{1} << 62), std::int64_t{1} << 62);
  for (int t = 0; t < 1000; ++t) {
    const std::uint64_t mant = ExpFloat::kHiddenBit | (rng() & (ExpFloat::kHiddenBit - 1));
    const ExpFloat x = ExpFloat::from_parts(t % 2 ? exps(rng) : exps(rng) % 4096, mant);
    const std::string s = format_weight(x);
    ck.expect(ExpFloat::raw_compare(parse_weight(s), x) == 0, "round trip of " + s);
  }

  const auto dir = std::filesystem::temp_directory_path() / ("minplus_acceptance_" + std::to_string(getpid()));
  std::filesystem::create_directories(dir);
  const std::string inst = (dir / "graph.txt").string();
  const std::string gen_args = "gen --kind graph --n 40 --exp-hi 80 --density 0.15 --connected --seed 4242";
  const CliRun g1 = run_cli(gen_args), g2 = run_cli(gen_args + " --out " + inst);
  ck.expect(g1.exit_code == 0 && g2.exit_code == 0, "gen failed");
  std::ifstream in(inst);
  const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ck.expect(!g1.out.empty() && written == g1.out, "gen output differs between runs");
  ck.expect(run_cli("gen --kind graph --n 40 --exp-hi 80 --density 0.15 --connected --seed 4243").out != g1.out,
            "gen ignores the seed");
  ck.expect(print_instance(parse_instance(written)) == written, "instance file print/parse is not the identity");

  const std::string run_args = "apsp " + inst + " --eps 0.1 --check --count-ops";
  const CliRun r1 = run_cli(run_args), r2 = run_cli(run_args);
  ck.expect(r1.exit_code == 0, "clean --check run exited " + std::to_string(r1.exit_code));
  ck.expect(r1.out.find("\"violations\": 0") != std::string::npos, "clean run reports violations");
  ck.expect(without_wall_time(r1.out) == without_wall_time(r2.out), "run output differs between runs");

  // The scaling baseline has additive error below 1, so tiny entries break
  // the relative bound and --check must report it.
  const std::string tiny = (dir / "tiny.txt").string();
  std::ofstream(tiny) << "matrix 2 2\n1p-20 1p-20\n1p-20 1p-20\nmatrix 2 2\n1p-20 1p-20\n1p-20 1p-20\n";
  ck.expect(run_cli("product " + tiny + " --algo zwick --eps 0.5 --check").exit_code == 1,
            "violating run did not exit 1");
  ck.expect(run_cli("product " + tiny + " --algo covering --eps 0.5 --check").exit_code == 0,
            "covering run on tiny entries did not exit 0");
  std::filesystem::remove_all(dir);
  return ck.outcome("1000 weight round trips, --check exit codes, gen/run determinism");
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime requirement
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "covering sandwich", 120, covering_sandwich},
      {2, "layer-count formula", 0, layer_counts},
      {3, "approximate min-plus product", 180, product_sandwich},
      {4, "directed APSP", 180, directed_apsp},
      {5, "undirected APSP", 180, undirected_apsp},
      {6, "strongly polynomial op counts", 0, strongly_polynomial},
      {7, "equivalence reductions", 120, equivalence_reductions},
      {8, "graph characteristics", 120, characteristics},
      {9, "convolution suite", 180, convolution_suite},
      {10, "min-max kernel backends", 0, kernel_backends},
      {11, "CLI contract", 0, cli_contract},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (c.budget_s > 0 && secs > c.budget_s) {
      out.pass = false;
      out.detail += " (over the " + fmt(c.budget_s) + "s budget)";
    }
    failed += out.pass ? 0 : 1;
    std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << " " << c.name << " (" << fmt(secs)
              << "s): " << out.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
