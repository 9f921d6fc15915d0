#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <json.hpp>
#include <optional>
#include <random>
#include <sstream>

#include "socel/automaton.hpp"
#include "socel/compile.hpp"
#include "socel/engine.hpp"
#include "socel/error.hpp"
#include "socel/focel.hpp"
#include "socel/formula.hpp"
#include "socel/oracle.hpp"
#include "socel/rewrite.hpp"

namespace socel::cli {
namespace {

using json = nlohmann::json;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Stream:
    case ErrorKind::Range: return kStreamError;
    case ErrorKind::Capacity: return kCapacity;
    default: return kQueryError;
  }
}

std::string slurp(const std::string& path, ErrorKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(kind, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Query and schema options shared by most subcommands.
struct QueryArgs {
  std::string schema_path;
  std::string query_path;
  std::string expr;
  std::string dialect = "socel";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--schema", schema_path, "schema JSON file");
    cmd->add_option("-q,--query", query_path, "file holding the query");
    cmd->add_option("-e,--expr", expr, "query text");
    cmd->add_option("--dialect", dialect, "query language")->check(CLI::IsMember({"socel", "focel"}));
  }

  bool has_query() const { return !query_path.empty() || !expr.empty(); }

  Schema schema() const {
    if (schema_path.empty()) throw Error(ErrorKind::Static, "--schema is required");
    return Schema::from_json(slurp(schema_path, ErrorKind::Static));
  }

  std::string text() const {
    if (!expr.empty()) return expr;
    if (query_path.empty()) throw Error(ErrorKind::Static, "a query is required (--query or --expr)");
    return slurp(query_path, ErrorKind::Static);
  }
};

Semantics parse_semantics(const std::string& s) { return s == "star" ? Semantics::Star : Semantics::Standard; }

// Compiles for streaming: STRICT is rewritten away first.
Ucea compile_query(const Formula& f, Semantics sem) {
  const Formula g = contains_op(f, Op::Strict) ? strict_to_contiguous(f) : f;
  return compile(g, {sem});
}

// ---------------------------------------------------------------- stream input

// Reads events line by line; blank lines are skipped.
class EventReader {
 public:
  EventReader(std::istream& in, const Schema& schema) : in_(in), schema_(schema) {}

  std::optional<Event> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        Event e = Event::from_json(line);
        e.validate(schema_);
        return e;
      } catch (const Error& err) {
        throw Error(ErrorKind::Stream, "line " + std::to_string(line_no_) + ": " + err.what());
      }
    }
    return std::nullopt;
  }

 private:
  std::istream& in_;
  const Schema& schema_;
  std::size_t line_no_ = 0;
};

Stream read_alphabet(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Stream, "cannot read '" + path + "'");
  EventReader reader(in, schema);
  Stream out;
  while (auto e = reader.next()) out.push_back(*e);
  if (out.empty()) throw Error(ErrorKind::Stream, "alphabet '" + path + "' has no events");
  return out;
}

// ---------------------------------------------------------------- evaluators

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual void push(const Event& e) = 0;
  // Outputs at the latest position.
  virtual void results(const std::function<void(const ComplexEvent&)>& out) = 0;
  virtual json stats() const { return json::object(); }
};

class IncrementalEvaluator : public Evaluator {
 public:
  IncrementalEvaluator(Ucea a, std::size_t compact_every) : engine_(io_determinize(a), compact_every) {}
  void push(const Event& e) override { engine_.step(e); }
  void results(const std::function<void(const ComplexEvent&)>& out) override { engine_.enumerate(out); }
  json stats() const override {
    const EngineStats& s = engine_.stats();
    return {{"ops", s.ops},
            {"nodes_allocated", s.nodes_allocated},
            {"live_nodes", s.live_nodes},
            {"compactions", s.compactions},
            {"states", engine_.automaton().num_states},
            {"transitions", engine_.automaton().delta.size()}};
  }

 private:
  Engine engine_;
};

class NaiveEvaluator : public Evaluator {
 public:
  NaiveEvaluator(Ucea a, Semantics sem) : a_(std::move(a)), sem_(sem), run_(a_), star_(a_) {}
  void push(const Event& e) override {
    if (sem_ == Semantics::Standard) {
      run_.push(e);
    } else {
      star_.push(e);
    }
  }
  void results(const std::function<void(const ComplexEvent&)>& out) override {
    for (const auto& c : sem_ == Semantics::Standard ? run_.accepted() : star_.accepted()) out(c);
  }

 private:
  Ucea a_;
  Semantics sem_;
  RunSimulator run_;
  StarSimulator star_;
};

class OracleEvaluator : public Evaluator {
 public:
  explicit OracleEvaluator(Formula f) : f_(std::move(f)), oracle_(stream_) {}
  void push(const Event& e) override { stream_.push_back(e); }
  void results(const std::function<void(const ComplexEvent&)>& out) override {
    for (const auto& c : oracle_.eval_at(f_, static_cast<Position>(stream_.size()) - 1)) out(c);
  }
  json stats() const override { return {{"memo_entries", oracle_.memo_size()}}; }

 private:
  Formula f_;
  Stream stream_;
  Oracle oracle_;
};

// FO-CEL queries under the oracle engine: matches straight from the
// valuation semantics.
class FoOracleEvaluator : public Evaluator {
 public:
  explicit FoOracleEvaluator(FoFormula f) : f_(std::move(f)) {}
  void push(const Event& e) override { stream_.push_back(e); }
  void results(const std::function<void(const ComplexEvent&)>&) override {}
  MatchSet matches() const { return eval_focel_at(f_, stream_, static_cast<Position>(stream_.size()) - 1); }

 private:
  FoFormula f_;
  Stream stream_;
};

std::string match_record(Position at, const Match& m) { return json{{"at", at}, {"match", m}}.dump(); }

// ---------------------------------------------------------------- run

struct RunArgs {
  QueryArgs q;
  std::string automaton_path;
  std::string stream_path = "-";
  std::string semantics = "standard";
  std::string engine = "incremental";
  std::string output_path;
  bool stats = false;
  std::size_t compact_every = 4096;
};

int cmd_run(const RunArgs& args, std::istream& in, std::ostream& out, std::ostream& err) {
  const Schema schema = args.q.schema();
  const Semantics sem = parse_semantics(args.semantics);
  const bool focel = args.q.dialect == "focel";
  if (sem == Semantics::Star && args.engine == "incremental") {
    throw Error(ErrorKind::Unsupported, "star semantics has no incremental engine; use --engine naive or oracle");
  }

  std::unique_ptr<Evaluator> eval;
  FoOracleEvaluator* fo_oracle = nullptr;
  if (!args.automaton_path.empty()) {
    if (args.q.has_query()) throw Error(ErrorKind::Precondition, "give either a query or --automaton, not both");
    if (args.engine == "oracle") throw Error(ErrorKind::Precondition, "the oracle engine evaluates queries, not automata");
    Ucea a = Ucea::from_json(slurp(args.automaton_path, ErrorKind::Static));
    a.validate(schema);
    if (args.engine == "incremental") {
      eval = std::make_unique<IncrementalEvaluator>(std::move(a), args.compact_every);
    } else {
      eval = std::make_unique<NaiveEvaluator>(std::move(a), sem);
    }
  } else {
    Formula f;
    if (focel) {
      FoFormula fo = parse_focel(args.q.text(), schema);
      if (args.engine == "oracle") {
        auto e = std::make_unique<FoOracleEvaluator>(fo);
        fo_oracle = e.get();
        eval = std::move(e);
      } else {
        f = fo_to_so_unary(fo);
      }
    } else {
      f = parse(args.q.text(), schema);
    }
    if (!eval) {
      if (sem == Semantics::Star && !is_core(f)) {
        throw Error(ErrorKind::Unsupported, "star semantics accepts core formulas only");
      }
      if (args.engine == "oracle") {
        eval = std::make_unique<OracleEvaluator>(f);
      } else if (args.engine == "naive") {
        eval = std::make_unique<NaiveEvaluator>(compile_query(f, sem), sem);
      } else {
        eval = std::make_unique<IncrementalEvaluator>(compile_query(f, sem), args.compact_every);
      }
    }
  }

  std::ofstream file;
  if (!args.output_path.empty()) {
    file.open(args.output_path);
    if (!file) throw Error(ErrorKind::Stream, "cannot write '" + args.output_path + "'");
  }
  std::ostream& sink = args.output_path.empty() ? out : file;
  std::ifstream stream_file;
  if (args.stream_path != "-") {
    stream_file.open(args.stream_path);
    if (!stream_file) throw Error(ErrorKind::Stream, "cannot read '" + args.stream_path + "'");
  }
  EventReader reader(args.stream_path == "-" ? in : stream_file, schema);

  const auto start = std::chrono::steady_clock::now();
  Position n = -1;
  std::size_t outputs = 0;
  auto report = [&] {
    if (!args.stats) return;
    json s = eval->stats();
    s["events"] = n + 1;
    s["outputs"] = outputs;
    s["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << s.dump() << "\n";
  };
  try {
    while (auto e = reader.next()) {
      ++n;
      eval->push(*e);
      if (fo_oracle != nullptr) {
        for (const auto& m : fo_oracle->matches()) {
          sink << match_record(n, m) << "\n";
          ++outputs;
        }
      } else if (focel) {
        CeSet all;
        eval->results([&](const ComplexEvent& c) { all.push_back(c); });
        normalize(all);
        for (const auto& m : supports(all)) {
          sink << match_record(n, m) << "\n";
          ++outputs;
        }
      } else {
        eval->results([&](const ComplexEvent& c) {
          sink << output_record(n, c) << "\n";
          ++outputs;
        });
      }
    }
  } catch (const Error&) {
    sink.flush();
    report();
    throw;
  }
  report();
  return kOk;
}

// ---------------------------------------------------------------- compile, rewrite, translate

struct CompileArgs {
  QueryArgs q;
  std::string semantics = "standard";
  std::string format = "json";
  bool determinize = false;
};

int cmd_compile(const CompileArgs& args, std::ostream& out) {
  const Schema schema = args.q.schema();
  Formula f = args.q.dialect == "focel" ? fo_to_so_unary(parse_focel(args.q.text(), schema))
                                        : parse(args.q.text(), schema);
  Ucea a = compile_query(f, parse_semantics(args.semantics));
  if (args.determinize) a = io_determinize(a);
  out << (args.format == "dot" ? a.to_dot() : a.to_json()) << "\n";
  return kOk;
}

struct RewriteArgs {
  QueryArgs q;
  std::string rule;
};

int cmd_rewrite(const RewriteArgs& args, std::ostream& out) {
  const Schema schema = args.q.schema();
  const Formula f = parse(args.q.text(), schema);
  Formula g;
  if (args.rule == "strict") {
    g = strict_to_contiguous(f);
  } else if (args.rule == "labels") {
    g = push_labels_down(f);
  } else if (args.rule == "contiguous") {
    g = contiguous_seq_to_strict(f);
  } else if (args.rule == "strict-plus") {
    g = unary_strictplus_eliminate(f);
  } else if (args.rule == "desugar") {
    g = desugar_conjunctive_filter(f);
  } else {
    g = and_all_eliminate(f, schema);
  }
  out << print(g) << "\n";
  return kOk;
}

int cmd_translate(const QueryArgs& q, std::ostream& out) {
  const Schema schema = q.schema();
  if (q.dialect == "focel") {
    out << print(fo_to_so_unary(parse_focel(q.text(), schema))) << "\n";
  } else {
    out << print(so_to_fo_unary(parse(q.text(), schema))) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- check-equiv

struct EquivArgs {
  QueryArgs q;
  std::string query2_path;
  std::string expr2;
  std::string automaton_path;
  std::string against;
  std::string alphabet_path;
  std::size_t bound = 4;
  std::string semantics = "standard";
};

inline constexpr double kMaxEquivStreams = 1e7;

std::string describe_stream(const Stream& s) {
  std::string out;
  for (const auto& e : s) out += (out.empty() ? "" : ",") + e.to_string();
  return out;
}

std::string describe_set(const CeSet& s) {
  std::string out = "[";
  for (const auto& c : s) out += (out.size() > 1 ? "," : "") + c.to_json();
  return out + "]";
}

int cmd_check_equiv(const EquivArgs& args, std::ostream& out) {
  const Schema schema = args.q.schema();
  const Semantics sem = parse_semantics(args.semantics);
  const Formula left = parse(args.q.text(), schema);
  const Stream alphabet = read_alphabet(args.alphabet_path, schema);
  if (std::pow(static_cast<double>(alphabet.size()), static_cast<double>(args.bound)) > kMaxEquivStreams) {
    throw Error(ErrorKind::Capacity, "alphabet of " + std::to_string(alphabet.size()) + " events with bound " +
                                         std::to_string(args.bound) + " exceeds the stream budget");
  }
  const int sides = !args.query2_path.empty() + !args.expr2.empty() + !args.automaton_path.empty() + !args.against.empty();
  if (sides != 1) {
    throw Error(ErrorKind::Precondition, "compare against exactly one of --query2, --expr2, --automaton, --against");
  }

  Stream s;
  Oracle left_oracle(s);
  std::optional<Formula> right_formula;
  std::optional<Oracle> right_oracle;
  Ucea automaton;
  bool use_engine = false;
  if (!args.query2_path.empty() || !args.expr2.empty()) {
    right_formula = parse(args.expr2.empty() ? slurp(args.query2_path, ErrorKind::Static) : args.expr2, schema,
                          {.allow_reserved = true});
    right_oracle.emplace(s);
  } else if (!args.automaton_path.empty()) {
    automaton = Ucea::from_json(slurp(args.automaton_path, ErrorKind::Static));
    automaton.validate(schema);
  } else {
    automaton = compile_query(left, sem);
    if (args.against == "engine") {
      automaton = io_determinize(automaton);
      use_engine = true;
    }
  }
  if (use_engine && sem == Semantics::Star) {
    throw Error(ErrorKind::Unsupported, "star semantics has no incremental engine");
  }
  std::optional<RunSimulator> run;
  std::optional<StarSimulator> star;
  if (!right_formula) {
    if (sem == Semantics::Standard) {
      run.emplace(automaton);
    } else {
      star.emplace(automaton);
    }
  }

  auto strip = [](CeSet x) {
    for (auto& c : x) c = drop_reserved(c);
    normalize(x);
    return x;
  };
  // Iterative deepening, so the first witness is a shortest one. Each round
  // compares only streams of exactly the round's length.
  std::size_t streams = 0;
  std::string witness;
  std::size_t depth = 0;
  std::function<void()> dfs = [&] {
    for (const auto& e : alphabet) {
      if (!witness.empty()) return;
      s.push_back(e);
      if (run) run->push(e);
      if (star) star->push(e);
      if (s.size() < depth) {
        dfs();
      } else {
        ++streams;
        const Position n = static_cast<Position>(s.size()) - 1;
        CeSet l = strip(left_oracle.eval_at(left, n));
        CeSet r;
        if (right_formula) {
          r = strip(right_oracle->eval_at(*right_formula, n));
        } else if (use_engine) {
          Engine engine(automaton);
          for (const auto& x : s) engine.step(x);
          r = strip(engine.results());
        } else {
          r = strip(run ? run->accepted() : star->accepted());
        }
        if (l != r) {
          witness = "witness: " + describe_stream(s) + " at n=" + std::to_string(n) + "\nleft:  " +
                    describe_set(l) + "\nright: " + describe_set(r) + "\n";
        }
      }
      if (run) run->pop();
      if (star) star->pop();
      s.pop_back();
      left_oracle.truncate(static_cast<Position>(s.size()));
      if (right_oracle) right_oracle->truncate(static_cast<Position>(s.size()));
    }
  };
  for (depth = 1; depth <= args.bound && witness.empty(); ++depth) dfs();
  if (!witness.empty()) {
    out << "not equivalent\n" << witness;
  } else {
    out << "equivalent within bound " << args.bound << " (" << streams << " streams)\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string schema_path;
  std::string expr = "R";
  std::vector<std::size_t> lengths{1000, 10000, 100000};
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  std::size_t max_outputs = 1000;
  std::size_t compact_every = 4096;
  double tolerance = 0.01;
  std::string output_path;
};

Schema bench_schema(const std::string& path) {
  if (!path.empty()) return Schema::from_json(slurp(path, ErrorKind::Static));
  Schema s;
  s.add_relation("R", {{"value", ValueType::Number}});
  s.add_relation("T", {{"value", ValueType::Number}});
  return s;
}

// Uniform relation, integer attributes in [-50, 50], strings from a small pool.
class SyntheticStream {
 public:
  SyntheticStream(const Schema& schema, std::uint64_t seed) : schema_(schema), rng_(seed) {
    rels_ = schema.relation_names();
  }
  Event next() {
    const std::string& rel = rels_[std::uniform_int_distribution<std::size_t>(0, rels_.size() - 1)(rng_)];
    std::vector<std::pair<std::string, Value>> attrs;
    for (const auto& a : schema_.attributes(rel)) {
      const int v = std::uniform_int_distribution<int>(-50, 50)(rng_);
      if (a.type == ValueType::Number) {
        attrs.emplace_back(a.name, static_cast<double>(v));
      } else {
        attrs.emplace_back(a.name, std::string(1, static_cast<char>('a' + (v + 50) % 4)));
      }
    }
    return Event(rel, std::move(attrs));
  }

 private:
  const Schema& schema_;
  std::mt19937_64 rng_;
  std::vector<std::string> rels_;
};

struct StopEnumeration {};

json bench_one(const Ucea& a, const Schema& schema, const BenchArgs& args, std::size_t length) {
  Engine engine(a, args.compact_every);
  SyntheticStream gen(schema, args.seed);
  const std::size_t every = std::max<std::size_t>(1, length / std::max<std::size_t>(1, args.samples));
  // Least squares of ops against position, accumulated online.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::uint64_t ops_max = 0, ops_min = length ? UINT64_MAX : 0;
  std::size_t calls = 0, outputs = 0, truncated = 0;
  double delay_sum = 0, delay_max = 0;
  for (std::size_t i = 0; i < length; ++i) {
    engine.step(gen.next());
    const double x = static_cast<double>(i), y = static_cast<double>(engine.stats().last_ops);
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
    ops_max = std::max(ops_max, engine.stats().last_ops);
    ops_min = std::min(ops_min, engine.stats().last_ops);
    if ((i + 1) % every != 0) continue;
    ++calls;
    std::size_t here = 0;
    auto last = std::chrono::steady_clock::now();
    try {
      engine.enumerate([&](const ComplexEvent&) {
        const auto now = std::chrono::steady_clock::now();
        const double d = std::chrono::duration<double, std::nano>(now - last).count();
        delay_sum += d;
        delay_max = std::max(delay_max, d);
        last = now;
        if (++here >= args.max_outputs) throw StopEnumeration{};
      });
    } catch (const StopEnumeration&) {
      ++truncated;
    }
    outputs += here;
  }
  const double n = static_cast<double>(length);
  const double mean = length ? sy / n : 0.0;
  const double denom = n * sxx - sx * sx;
  const double slope = length >= 2 && denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  const double relative = mean > 0 ? slope * n / mean : 0.0;
  // Standard error of the slope; a trend smaller than three of them is noise.
  double stderr_slope = 0.0;
  if (length >= 3 && denom != 0) {
    const double intercept = (sy - slope * sx) / n;
    const double sse = syy - 2 * intercept * sy - 2 * slope * sxy + n * intercept * intercept +
                       2 * intercept * slope * sx + slope * slope * sxx;
    stderr_slope = std::sqrt(std::max(0.0, sse / (n - 2)) * n / denom);
  }
  const bool flat = std::abs(relative) <= args.tolerance || std::abs(slope) <= 3 * stderr_slope;
  const EngineStats& st = engine.stats();
  return {{"events", length},
          {"ops",
           {{"total", st.ops},
            {"mean", mean},
            {"min", ops_min},
            {"max", ops_max},
            {"slope", slope},
            {"relative_slope", relative},
            {"slope_stderr", stderr_slope}}},
          {"enumeration",
           {{"calls", calls},
            {"outputs", outputs},
            {"truncated_calls", truncated},
            {"mean_delay_ns", outputs ? delay_sum / static_cast<double>(outputs) : 0.0},
            {"max_delay_ns", delay_max}}},
          {"nodes_allocated", st.nodes_allocated},
          {"live_nodes", st.live_nodes},
          {"compactions", st.compactions},
          {"flat", flat}};
}

int cmd_bench(const BenchArgs& args, std::ostream& out) {
  const Schema schema = bench_schema(args.schema_path);
  const Ucea a = io_determinize(compile_query(parse(args.expr, schema), Semantics::Standard));
  json report{{"query", args.expr},
              {"seed", args.seed},
              {"tolerance", args.tolerance},
              {"automaton", {{"states", a.num_states}, {"transitions", a.delta.size()}}},
              {"runs", json::array()}};
  bool super_constant = false;
  for (std::size_t length : args.lengths) {
    json r = bench_one(a, schema, args, length);
    super_constant = super_constant || !r["flat"].get<bool>();
    report["runs"].push_back(std::move(r));
  }
  report["super_constant"] = super_constant;
  if (args.output_path.empty()) {
    out << report.dump(2) << "\n";
  } else {
    std::ofstream file(args.output_path);
    if (!file) throw Error(ErrorKind::Stream, "cannot write '" + args.output_path + "'");
    file << report.dump(2) << "\n";
  }
  return kOk;
}

std::string error_prefix() {
  const char* color = std::getenv("CEL_COLOR");
  if (color != nullptr && (std::string(color) == "1" || std::string(color) == "always")) {
    return "\033[31merror:\033[0m ";
  }
  return "error: ";
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"SO-CEL query compiler and streaming evaluator", "socel"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "evaluate a query over a stream");
  run_args.q.add_to(run_cmd);
  run_cmd->add_option("--automaton", run_args.automaton_path, "automaton JSON file instead of a query");
  run_cmd->add_option("-s,--stream", run_args.stream_path, "newline-delimited JSON events, '-' for stdin");
  run_cmd->add_option("--semantics", run_args.semantics)->check(CLI::IsMember({"standard", "star"}));
  run_cmd->add_option("--engine", run_args.engine)->check(CLI::IsMember({"incremental", "naive", "oracle"}));
  run_cmd->add_option("-o,--output", run_args.output_path, "output file (default stdout)");
  run_cmd->add_flag("--stats", run_args.stats, "print counters to stderr when done");
  run_cmd->add_option("--compact-every", run_args.compact_every, "arena compaction period, 0 disables");

  CompileArgs compile_args;
  auto* compile_cmd = app.add_subcommand("compile", "print the automaton of a query");
  compile_args.q.add_to(compile_cmd);
  compile_cmd->add_option("--semantics", compile_args.semantics)->check(CLI::IsMember({"standard", "star"}));
  compile_cmd->add_option("--format", compile_args.format)->check(CLI::IsMember({"json", "dot"}));
  compile_cmd->add_flag("--determinize", compile_args.determinize);

  RewriteArgs rewrite_args;
  auto* rewrite_cmd = app.add_subcommand("rewrite", "apply an operator-elimination rewrite");
  rewrite_args.q.add_to(rewrite_cmd);
  rewrite_cmd->add_option("--rule", rewrite_args.rule)
      ->required()
      ->check(CLI::IsMember({"strict", "labels", "contiguous", "strict-plus", "desugar", "and-all"}));

  EquivArgs equiv_args;
  auto* equiv_cmd = app.add_subcommand("check-equiv", "compare two semantics on every stream up to a bound");
  equiv_args.q.add_to(equiv_cmd);
  equiv_cmd->add_option("--query2", equiv_args.query2_path, "second query file");
  equiv_cmd->add_option("--expr2", equiv_args.expr2, "second query text");
  equiv_cmd->add_option("--automaton", equiv_args.automaton_path, "automaton JSON file");
  equiv_cmd->add_option("--against", equiv_args.against, "compare the query with its own automaton or engine")
      ->check(CLI::IsMember({"compiled", "engine"}));
  equiv_cmd->add_option("--alphabet", equiv_args.alphabet_path, "events to build streams from")->required();
  equiv_cmd->add_option("--bound", equiv_args.bound, "maximum stream length");
  equiv_cmd->add_option("--semantics", equiv_args.semantics)->check(CLI::IsMember({"standard", "star"}));

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "per-event work of the incremental engine on synthetic streams");
  bench_cmd->add_option("--schema", bench_args.schema_path, "schema JSON file (default: R and T with a value)");
  bench_cmd->add_option("-e,--expr", bench_args.expr, "query text");
  bench_cmd->add_option("--lengths", bench_args.lengths, "stream lengths")->delimiter(',');
  bench_cmd->add_option("--seed", bench_args.seed);
  bench_cmd->add_option("--samples", bench_args.samples, "enumerations per run");
  bench_cmd->add_option("--max-outputs", bench_args.max_outputs, "outputs timed per enumeration");
  bench_cmd->add_option("--compact-every", bench_args.compact_every);
  bench_cmd->add_option("--tolerance", bench_args.tolerance, "allowed |slope| * events / mean");
  bench_cmd->add_option("-o,--output", bench_args.output_path);

  QueryArgs translate_args;
  auto* translate_cmd = app.add_subcommand("translate", "convert unary queries between FO-CEL and SO-CEL");
  translate_args.add_to(translate_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kQueryError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_args, in, out, err);
    if (compile_cmd->parsed()) return cmd_compile(compile_args, out);
    if (rewrite_cmd->parsed()) return cmd_rewrite(rewrite_args, out);
    if (equiv_cmd->parsed()) return cmd_check_equiv(equiv_args, out);
    if (bench_cmd->parsed()) return cmd_bench(bench_args, out);
    if (translate_cmd->parsed()) return cmd_translate(translate_args, out);
  } catch (const Error& e) {
    err << error_prefix() << e.what() << "\n";
    return exit_code(e.kind());
  }
  return kOk;
}

}  // namespace socel::cli
