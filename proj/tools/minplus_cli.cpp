// Command-line driver: runs the library pipelines on instance files and
// reports results, operation counts and oracle errors as JSON.
//
//   minplus_cli product FILE [--algo covering|zwick|exact]
//   minplus_cli conv    FILE [--algo combined|simple|exact]
//   minplus_cli apsp    FILE [--algo covering|zwick|exact]
//   minplus_cli char    FILE --kind diameter|radius|median|min_triangle|min_cycle [--algo covering|exact]
//   minplus_cli gen     --kind graph|matrix|seq --n N [--exp-lo A --exp-hi B --density P ...]
//   minplus_cli bench   --task product|conv|apsp|minmax_conv --sizes 16,32,64 [...]
//
// Exit codes: 0 ok, 1 --check found a sandwich violation, 2 usage or input error.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "minplus/minplus.hpp"

using namespace minplus;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr std::size_t kFullDumpLimit = 32 * 32;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Result encoding

std::string digest_hash(const std::vector<ExpFloat>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the printed tokens
  for (const ExpFloat& x : values) {
    for (char c : format_weight(x) + " ") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

Json encode_values(const std::vector<ExpFloat>& values, std::size_t rows, std::size_t cols, const char* kind) {
  Json j;
  j["kind"] = kind;
  j["rows"] = rows;
  j["cols"] = cols;
  if (values.size() <= kFullDumpLimit) {
    const auto tokens = [&](std::size_t from, std::size_t count) {
      Json row = Json::array();
      for (std::size_t k = from; k < from + count; ++k) row.push_back(format_weight(values[k]));
      return row;
    };
    if (std::string(kind) == "sequence") {
      j["entries"] = tokens(0, values.size());
    } else {
      j["entries"] = Json::array();
      for (std::size_t i = 0; i < rows; ++i) j["entries"].push_back(tokens(i * cols, cols));
    }
    return j;
  }
  ExpFloat lo = ExpFloat::infinity(), hi = ExpFloat::zero();
  std::size_t finite = 0;
  for (const ExpFloat& x : values) {
    if (x.is_infinite()) continue;
    ++finite;
    if (ExpFloat::raw_compare(x, lo) < 0) lo = x;
    if (ExpFloat::raw_compare(hi, x) < 0) hi = x;
  }
  j["digest"] = {{"finite", finite},
                 {"min", finite ? format_weight(lo) : "inf"},
                 {"max", finite ? format_weight(hi) : "inf"},
                 {"hash", digest_hash(values)}};
  return j;
}

Json encode_matrix(const WeightMatrix& m) { return encode_values(m.data(), m.rows(), m.cols(), "matrix"); }
Json encode_sequence(const WeightSequence& s) { return encode_values(s, 1, s.size(), "sequence"); }
Json encode_scalar(ExpFloat x) {
  Json j;
  j["kind"] = "scalar";
  j["value"] = format_weight(x);
  j["approx_double"] = x.is_infinite() ? Json(nullptr) : Json(x.to_double());
  return j;
}

Json encode_ops(const OpCounter& c) {
  return {{"additions", c.additions},
          {"comparisons", c.comparisons},
          {"multiplications", c.multiplications},
          {"total", c.total()}};
}

// ---------------------------------------------------------------------------
// Oracle comparison

struct CheckResult {
  std::optional<double> max_rel_error = 0.0;  // nullopt when some entry is infinitely off
  std::size_t violations = 0;
};

void compare_entries(const std::vector<ExpFloat>& approx, const std::vector<ExpFloat>& exact, double eps,
                     CheckResult& r) {
  for (std::size_t k = 0; k < exact.size(); ++k) {
    if (!within_factor(approx[k], exact[k], eps)) ++r.violations;
    const ExpFloat a = approx[k], e = exact[k];
    if (e.is_positive_finite() && a.is_positive_finite()) {
      const double rel = ef_div(a, e).to_double() - 1.0;
      if (r.max_rel_error) r.max_rel_error = std::max(*r.max_rel_error, rel);
    } else if (e.is_infinite() != a.is_infinite() || e.is_zero() != a.is_zero()) {
      r.max_rel_error.reset();
    }
  }
}

// ---------------------------------------------------------------------------
// Pipelines

struct RunConfig {
  double eps = 0.1;
  std::string algo;
  bool check = false;
  bool count_ops = false;
  std::string kind;  // characteristic name for `char`
};

struct Outcome {
  Json input;
  Json result;
  std::vector<ExpFloat> values;  // flattened result for --out
  std::size_t rows = 0, cols = 0;
  OpCounter ops;
  double seconds = 0;
  std::optional<CheckResult> check;
  std::vector<std::string> warnings;
};

template <class T>
const T& expect_block(const Instance& inst, std::size_t index, const char* what) {
  if (index >= inst.blocks.size() || !std::holds_alternative<T>(inst.blocks[index])) {
    throw UsageError(std::string("instance must contain ") + what);
  }
  return std::get<T>(inst.blocks[index]);
}

template <class F>
auto timed(Outcome& out, bool count_ops, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  OpCounter scratch;
  CountingScope scope(count_ops ? out.ops : scratch);
  auto r = f();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void require_algo(const std::string& algo, std::initializer_list<const char*> allowed, const char* sub) {
  for (const char* a : allowed) {
    if (algo == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
  throw UsageError(std::string(sub) + ": --algo must be one of " + list + ", got '" + algo + "'");
}

Outcome run_product(const Instance& inst, const RunConfig& cfg) {
  require_algo(cfg.algo, {"covering", "zwick", "exact"}, "product");
  const auto& a = expect_block<WeightMatrix>(inst, 0, "two matrix blocks");
  const auto& b = expect_block<WeightMatrix>(inst, 1, "two matrix blocks");
  if (!a.is_square() || !b.is_square() || a.rows() != b.rows()) {
    throw UsageError("product: matrices must be square and of equal size");
  }
  Outcome out;
  out.input = {{"n", a.rows()}};
  const WeightMatrix c = timed(out, cfg.count_ops, [&] {
    if (cfg.algo == "covering") return approx_minplus_product(a, b, cfg.eps);
    if (cfg.algo == "zwick") return zwick_minplus_product(a, b, cfg.eps);
    return minplus_product_naive(a, b);
  });
  const auto below_one = [](const WeightMatrix& m) {
    return std::any_of(m.data().begin(), m.data().end(),
                       [](ExpFloat x) { return x.is_positive_finite() && ExpFloat::raw_compare(x, ExpFloat::one()) < 0; });
  };
  if (cfg.algo == "zwick" && (below_one(a) || below_one(b))) {
    out.warnings.push_back("zwick: entries below 1 get additive rather than relative error");
  }
  out.result = encode_matrix(c);
  out.values = c.data();
  out.rows = c.rows();
  out.cols = c.cols();
  if (cfg.check) {
    out.check.emplace();
    compare_entries(c.data(), minplus_product_naive(a, b).data(), cfg.eps, *out.check);
  }
  return out;
}

Outcome run_conv(const Instance& inst, const RunConfig& cfg) {
  require_algo(cfg.algo, {"combined", "simple", "exact"}, "conv");
  const auto& a = expect_block<WeightSequence>(inst, 0, "two seq blocks");
  const auto& b = expect_block<WeightSequence>(inst, 1, "two seq blocks");
  if (a.size() != b.size()) throw UsageError("conv: sequences must have equal length");
  Outcome out;
  out.input = {{"n", a.size()}};
  const WeightSequence c = timed(out, cfg.count_ops, [&] {
    if (cfg.algo == "combined") return approx_minconv(a, b, cfg.eps);
    if (cfg.algo == "simple") return approx_minconv_simple(a, b, cfg.eps);
    return minconv_naive(a, b);
  });
  out.result = encode_sequence(c);
  out.values = c;
  out.rows = 1;
  out.cols = c.size();
  if (cfg.check) {
    out.check.emplace();
    compare_entries(c, minconv_naive(a, b), cfg.eps, *out.check);
  }
  return out;
}

Outcome run_apsp(const Instance& inst, const RunConfig& cfg) {
  require_algo(cfg.algo, {"covering", "zwick", "exact"}, "apsp");
  const auto& g = expect_block<Graph>(inst, 0, "a graph block");
  Outcome out;
  out.input = {{"n", g.n()}, {"m", g.edge_count()}, {"directed", g.directed()}};
  const DistanceMatrix d = timed(out, cfg.count_ops, [&] {
    if (cfg.algo == "covering") {
      return g.directed() ? approx_apsp_directed(g, cfg.eps) : approx_apsp_undirected(g, cfg.eps);
    }
    if (cfg.algo == "zwick") return zwick_apsp(g.adjacency_matrix(), cfg.eps);
    return exact_apsp(g);
  });
  if (cfg.algo == "zwick") {
    for (const Edge& e : g.edges()) {
      if (ExpFloat::raw_compare(e.w, ExpFloat::one()) < 0) {
        out.warnings.push_back("zwick: edge weights below 1 get additive rather than relative error");
        break;
      }
    }
  }
  out.result = encode_matrix(d);
  out.values = d.data();
  out.rows = d.rows();
  out.cols = d.cols();
  if (cfg.check) {
    out.check.emplace();
    compare_entries(d.data(), exact_apsp(g).data(), cfg.eps, *out.check);
  }
  return out;
}

Outcome run_char(const Instance& inst, const RunConfig& cfg) {
  require_algo(cfg.algo, {"covering", "exact"}, "char");
  const auto kind = characteristic_from_string(cfg.kind);
  if (!kind) throw UsageError("char: --kind must be diameter|radius|median|min_triangle|min_cycle");
  const auto& g = expect_block<Graph>(inst, 0, "a graph block");
  if (g.edge_count() == 0) throw UsageError("char: graph has no edges");
  Outcome out;
  out.input = {{"n", g.n()}, {"m", g.edge_count()}, {"directed", g.directed()}, {"kind", cfg.kind}};
  const ExpFloat t = timed(out, cfg.count_ops, [&] {
    return cfg.algo == "covering" ? approx_characteristic(g, *kind, cfg.eps) : exact_characteristic(g, *kind);
  });
  out.result = encode_scalar(t);
  out.values = {t};
  out.rows = out.cols = 1;
  if (cfg.check) {
    out.check.emplace();
    compare_entries({t}, {exact_characteristic(g, *kind)}, cfg.eps, *out.check);
  }
  return out;
}

Outcome run_task(const std::string& task, const Instance& inst, const RunConfig& cfg) {
  if (task == "product") return run_product(inst, cfg);
  if (task == "conv") return run_conv(inst, cfg);
  if (task == "apsp") return run_apsp(inst, cfg);
  return run_char(inst, cfg);
}

// Fields shared by run reports and bench rows.
void fill_outcome(Json& j, const Outcome& out, const RunConfig& cfg) {
  j["input"] = out.input;
  j["result"] = out.result;
  if (cfg.count_ops) j["op_count"] = encode_ops(out.ops);
  if (out.check) {
    j["max_rel_error"] = out.check->max_rel_error ? Json(*out.check->max_rel_error) : Json(nullptr);
    j["violations"] = out.check->violations;
  }
  if (!out.warnings.empty()) j["warnings"] = out.warnings;
}

Instance read_instance(const std::string& path) {
  if (path == "-") return parse_instance(std::cin);
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return parse_instance(in);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

std::string dump_values(const Outcome& out) {
  Instance inst;
  if (out.rows == 1 && out.result["kind"] == "sequence") {
    inst.blocks.emplace_back(out.values);
  } else {
    WeightMatrix m(out.rows, out.cols);
    m.data() = out.values;
    inst.blocks.emplace_back(std::move(m));
  }
  return print_instance(inst);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Json error_json(const std::string& type, const std::string& message) {
  return {{"schema", 1}, {"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strongly polynomial (1+eps) approximations for min-plus problems"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string file, out_path;
  std::uint64_t seed = 1;

  std::map<std::string, std::string> algos;  // per subcommand, so each keeps its own default
  const auto add_run_flags = [&](CLI::App* sub, const std::string& default_algo) {
    sub->add_option("file", file, "Instance file, or - for stdin")->required();
    sub->add_option("--eps", cfg.eps, "Accuracy parameter in (0, 1]")->capture_default_str();
    sub->add_option("--algo", algos[sub->get_name()], "Algorithm")->default_val(default_algo);
    sub->add_flag("--check", cfg.check, "Compare against the exact oracle");
    sub->add_flag("--count-ops", cfg.count_ops, "Report counted weight operations");
    sub->add_option("--seed", seed, "Seed echoed into the report")->capture_default_str();
    sub->add_option("--out", out_path, "Write the full result as an instance file");
  };

  CLI::App* product = app.add_subcommand("product", "Min-plus product of two square matrices");
  add_run_flags(product, "covering");
  CLI::App* conv = app.add_subcommand("conv", "Min-plus convolution of two sequences");
  add_run_flags(conv, "combined");
  CLI::App* apsp = app.add_subcommand("apsp", "All-pairs shortest paths");
  add_run_flags(apsp, "covering");
  CLI::App* chr = app.add_subcommand("char", "Graph characteristic");
  add_run_flags(chr, "covering");
  chr->add_option("--kind", cfg.kind, "diameter|radius|median|min_triangle|min_cycle")->required();

  GenSpec gen_spec;
  std::string gen_kind = "graph";
  bool undirected = false;
  CLI::App* gen = app.add_subcommand("gen", "Generate a seeded random instance");
  gen->add_option("--kind", gen_kind, "graph|matrix|seq")->capture_default_str();
  gen->add_option("--n", gen_spec.n, "Vertices, matrix dimension or sequence length")->capture_default_str();
  gen->add_option("--exp-lo", gen_spec.exp_lo, "Smallest binary exponent of a weight")->capture_default_str();
  gen->add_option("--exp-hi", gen_spec.exp_hi, "Largest binary exponent of a weight")->capture_default_str();
  std::optional<double> density;
  gen->add_option("--density", density, "Edge probability (default 0.2) or fraction of finite entries (default 1)");
  gen->add_flag("--undirected", undirected, "Undirected graph");
  gen->add_flag("--connected", gen_spec.connected, "Add a random spanning cycle");
  gen->add_option("--blocks", gen_spec.blocks, "Number of blocks (default: 1 graph, 2 matrices/sequences)");
  gen->add_option("--seed", seed, "Seed")->capture_default_str();
  gen->add_option("--out", out_path, "Output file (default: stdout, without a JSON report)");

  std::string bench_task = "product", sizes = "16,32,64";
  CLI::App* bench = app.add_subcommand("bench", "Run a task on generated instances of growing size");
  bench->add_option("--task", bench_task, "product|conv|apsp|minmax_conv")->capture_default_str();
  bench->add_option("--sizes", sizes, "Comma-separated sizes")->capture_default_str();
  bench->add_option("--exp-lo", gen_spec.exp_lo, "Smallest binary exponent")->capture_default_str();
  bench->add_option("--exp-hi", gen_spec.exp_hi, "Largest binary exponent")->capture_default_str();
  bench->add_option("--density", density, "Edge probability (default 0.2) or fraction of finite entries (default 1)");
  bench->add_option("--eps", cfg.eps, "Accuracy parameter")->capture_default_str();
  std::string bench_algo;
  bench->add_option("--algo", bench_algo, "Algorithm (default per task)");
  bench->add_flag("--check", cfg.check, "Compare against the exact oracle");
  bench->add_option("--seed", seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cout << error_json("usage", e.what()).dump(2) << "\n";
    return kExitUsage;
  }

  Json report;
  report["schema"] = 1;
  report["command"] = Json::array();
  for (int i = 1; i < argc; ++i) report["command"].push_back(argv[i]);

  try {
    if (gen->parsed()) {
      if (gen_kind == "graph") gen_spec.kind = InstanceKind::graph;
      else if (gen_kind == "matrix") gen_spec.kind = InstanceKind::matrix;
      else if (gen_kind == "seq") gen_spec.kind = InstanceKind::seq;
      else throw UsageError("gen: --kind must be graph|matrix|seq");
      gen_spec.directed = !undirected;
      gen_spec.density = density.value_or(gen_spec.kind == InstanceKind::graph ? 0.2 : 1.0);
      gen_spec.seed = seed;
      const std::string text = print_instance(generate_instance(gen_spec));
      if (out_path.empty()) {
        std::cout << text;
        return kExitOk;
      }
      write_text(out_path, text);
      report["subcommand"] = "gen";
      report["seed"] = seed;
      report["out"] = out_path;
      std::cout << report.dump(2) << "\n";
      return kExitOk;
    }

    if (bench->parsed()) {
      report["subcommand"] = "bench";
      report["task"] = bench_task;
      report["seed"] = seed;
      Json rows = Json::array();
      std::size_t violations = 0;
      for (const std::string& tok : split_list(sizes)) {
        std::size_t n = 0;
        try {
          n = std::stoul(tok);
        } catch (const std::exception&) {
          throw UsageError("bench: bad size '" + tok + "'");
        }
        GenSpec spec = gen_spec;
        spec.n = n;
        spec.seed = seed;
        Json row;
        row["n"] = n;
        if (bench_task == "minmax_conv") {
          // Backend trend report: wall time of both min-max convolution backends.
          SplitMix64 rng(SplitMix64::derive(seed, n));
          RankSequence a(n), b(n);
          for (auto* s : {&a, &b}) {
            for (Rank& r : *s) r = static_cast<Rank>(rng.below(4 * n + 1));
          }
          double secs[2];
          RankSequence res[2];
          for (int k = 0; k < 2; ++k) {
            const auto start = std::chrono::steady_clock::now();
            res[k] = minmax_convolution(a, b, k == 0 ? ConvBackend::naive : ConvBackend::subquadratic);
            secs[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          }
          row["naive_s"] = secs[0];
          row["subquadratic_s"] = secs[1];
          row["equal"] = res[0] == res[1];
          if (res[0] != res[1]) ++violations;
          rows.push_back(row);
          continue;
        }
        RunConfig rc = cfg;
        rc.algo = bench_algo;
        rc.count_ops = true;
        if (bench_task == "product") {
          spec.kind = InstanceKind::matrix;
          spec.density = density.value_or(1.0);
          if (rc.algo.empty()) rc.algo = "covering";
        } else if (bench_task == "conv") {
          spec.kind = InstanceKind::seq;
          spec.density = density.value_or(1.0);
          if (rc.algo.empty()) rc.algo = "combined";
        } else if (bench_task == "apsp") {
          spec.kind = InstanceKind::graph;
          spec.connected = true;
          spec.density = density.value_or(0.2);
          if (rc.algo.empty()) rc.algo = "covering";
        } else {
          throw UsageError("bench: --task must be product|conv|apsp|minmax_conv");
        }
        const Outcome out = run_task(bench_task, generate_instance(spec), rc);
        row["op_count"] = encode_ops(out.ops);
        if (out.check) {
          row["max_rel_error"] = out.check->max_rel_error ? Json(*out.check->max_rel_error) : Json(nullptr);
          row["violations"] = out.check->violations;
          violations += out.check->violations;
        }
        row["wall_time_s"] = out.seconds;
        rows.push_back(row);
      }
      report["eps"] = cfg.eps;
      report["runs"] = rows;
      std::cout << report.dump(2) << "\n";
      return violations ? kExitViolation : kExitOk;
    }

    std::string sub;
    for (CLI::App* s : {product, conv, apsp, chr}) {
      if (s->parsed()) sub = s->get_name();
    }
    cfg.algo = algos[sub];
    validate_eps(cfg.eps, "--eps");
    const Instance inst = read_instance(file);
    for (const std::string& w : inst.warnings) std::cerr << "warning: " << w << "\n";
    const Outcome out = run_task(sub == "char" ? "char" : sub, inst, cfg);
    for (const std::string& w : out.warnings) std::cerr << "warning: " << w << "\n";
    if (!out_path.empty()) write_text(out_path, dump_values(out));

    report["subcommand"] = sub;
    report["eps"] = cfg.eps;
    report["algo"] = cfg.algo;
    report["seed"] = seed;
    fill_outcome(report, out, cfg);
    if (!inst.warnings.empty()) report["input_warnings"] = inst.warnings;
    report["wall_time_s"] = out.seconds;
    std::cout << report.dump(2) << "\n";
    return out.check && out.check->violations ? kExitViolation : kExitOk;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    Json j = error_json("parse", e.message());
    j["error"]["line"] = e.line();
    j["error"]["column"] = e.column();
    std::cout << j.dump(2) << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << error_json(dynamic_cast<const UsageError*>(&e) ? "usage" : "input", e.what()).dump(2) << "\n";
    return kExitUsage;
  }
}
