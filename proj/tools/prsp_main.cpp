// prsp: command-line surface of the RDF stream processing framework.
//
// Subcommands:
//   run      register a continuous query and replay a timestamped stream
//   generate emit a deterministic sensor stream as TNT
//   bench    run the load-scenario matrix and grade against the oracle
//   oracle   evaluate one window with the brute-force oracle

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prsp/prsp.hpp"

namespace {

using prsp::Errc;
using prsp::Error;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::SyntaxError:
    case Errc::UnknownTimeUnit:
    case Errc::ZeroDuration:
    case Errc::UnboundProjection:
    case Errc::NoStreamClause:
    case Errc::InvalidTerm:
      return 2;
    case Errc::MalformedTimestamp:
    case Errc::MalformedTriple:
    case Errc::MissingTab:
    case Errc::OutOfOrderItem:
      return 3;
    case Errc::OracleTooLarge:
      return 4;
    default:
      return 1;
  }
}

void print_error(const Error& e) {
  std::cerr << "error: " << e.what() << "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) prsp::fail(Errc::IoError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::unique_ptr<prsp::EnginePlugin> make_engine(const std::string& selector,
                                                std::uint64_t budget) {
  if (selector == "reference") return prsp::reference_engine();
  if (selector == "oracle") return prsp::oracle_engine(budget);
  if (selector.rfind("external:", 0) == 0)
    return std::make_unique<prsp::ExternalCommandEngine>(selector.substr(9));
  prsp::fail(Errc::SyntaxError,
             "unknown engine selector '" + selector +
                 "' (want reference, oracle or external:<cmd>)");
}

prsp::OriginMode parse_origin(const std::string& s) {
  if (s == "first-item") return prsp::OriginMode::FirstItem;
  if (s == "zero") return prsp::OriginMode::Zero;
  prsp::fail(Errc::SyntaxError,
             "unknown origin mode '" + s + "' (want first-item or zero)");
}

/// `--static <iri>=<path.nt>` pairs.
void load_static_graphs(prsp::Runtime& rt,
                        const std::vector<std::string>& specs) {
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      prsp::fail(Errc::SyntaxError,
                 "--static wants <iri>=<path.nt>, got '" + spec + "'");
    rt.add_static_graph(spec.substr(0, eq),
                        prsp::read_ntriples_file(spec.substr(eq + 1)));
  }
}

/// Close times shared by every binding of the query, ascending, bounded by
/// end_ts. Mirrors the runtime's trigger clock for offline window addressing.
std::vector<std::int64_t> merged_ticks(const prsp::RewriteResult& plan,
                                       std::int64_t first_ts,
                                       std::int64_t end_ts,
                                       prsp::OriginMode origin) {
  struct Cursor {
    std::int64_t t0, next_close, step;
  };
  std::vector<Cursor> cur;
  for (const auto& b : plan.windows) {
    std::int64_t t0 = prsp::window_origin(first_ts, b.window, origin);
    cur.push_back(Cursor{t0, t0 + b.window.range_ms, b.window.step_ms});
  }
  std::vector<std::int64_t> ticks;
  while (true) {
    std::int64_t t = cur.front().next_close;
    for (const auto& c : cur) t = std::min(t, c.next_close);
    if (t > end_ts) return ticks;
    ticks.push_back(t);
    for (auto& c : cur)
      if (c.next_close == t) c.next_close += c.step;
  }
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunArgs {
  std::string query_path;
  std::string stream_path;
  std::int64_t sensors = 0;  // generator source when > 0
  std::string duration = "60s";
  std::string period = "1s";
  std::uint64_t seed = 1;
  std::string engine = "reference";
  std::string out_dir = ".";
  std::string origin = "first-item";
  std::vector<std::string> statics;
  std::uint64_t budget = prsp::kDefaultOracleBudget;
  bool flush = false;
};

int cmd_run(const RunArgs& args) {
  if (args.stream_path.empty() == (args.sensors == 0))
    prsp::fail(Errc::SyntaxError,
               "exactly one stream source: --stream or --sensors");

  prsp::Runtime rt;
  load_static_graphs(rt, args.statics);
  prsp::RuntimeOptions opt;
  opt.origin = parse_origin(args.origin);
  opt.flush_partial = args.flush;
  opt.keep_graphs = false;
  prsp::RegisteredQuery& rq = rt.register_query(
      read_text_file(args.query_path), make_engine(args.engine, args.budget),
      opt);

  std::vector<prsp::MetricsRow> metrics;
  auto emit = [&](const prsp::WindowResult& r) {
    std::cout << "# window " << r.window.index << " " << r.window.open_t << " "
              << r.window.close_t << "\n";
    if (r.error) std::cout << "# error " << *r.error << "\n";
    prsp::write_result_tsv(std::cout, r.solutions, /*sort_rows=*/true);
    metrics.push_back(prsp::MetricsRow{r.metrics.window_index, r.window.open_t,
                                       r.window.close_t, r.metrics.lt_ms,
                                       r.metrics.rt_ms, r.metrics.et_ms,
                                       r.metrics.result_count});
  };

  auto feed_all = [&](auto&& next_item) {
    while (auto item = next_item())
      for (const auto& r : rt.feed(rq, *item)) emit(r);
    for (const auto& r : rt.finish(rq)) emit(r);
  };

  if (!args.stream_path.empty()) {
    std::ifstream in(args.stream_path, std::ios::binary);
    if (!in) prsp::fail(Errc::IoError, "cannot open " + args.stream_path);
    std::string line;
    std::size_t lineno = 0;
    feed_all([&]() -> std::optional<prsp::TimestampedTriple> {
      while (std::getline(in, line)) {
        ++lineno;
        line = prsp::detail::chomp(std::move(line));
        if (prsp::detail::skippable_line(line)) continue;
        try {
          return prsp::parse_tnt_line(line);
        } catch (const Error& e) {
          prsp::fail(e.code(),
                     "line " + std::to_string(lineno) + ": " + e.detail());
        }
      }
      return std::nullopt;
    });
  } else {
    prsp::Scenario sc{args.sensors, prsp::parse_duration(args.duration),
                      prsp::parse_duration(args.period), args.seed};
    prsp::RdfStream stream = prsp::generate_stream(sc);
    std::size_t i = 0;
    feed_all([&]() -> std::optional<prsp::TimestampedTriple> {
      if (i >= stream.size()) return std::nullopt;
      return stream[i++];
    });
  }

  std::filesystem::create_directories(args.out_dir);
  prsp::write_metrics_csv(std::filesystem::path(args.out_dir) / "metrics.csv",
                          metrics);
  return 0;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::int64_t sensors = 0;
  std::string duration = "60s";
  std::string period = "1s";
  std::uint64_t seed = 1;
  std::string out = "-";
};

int cmd_generate(const GenerateArgs& args) {
  prsp::Scenario sc{args.sensors, prsp::parse_duration(args.duration),
                    prsp::parse_duration(args.period), args.seed};
  prsp::RdfStream stream = prsp::generate_stream(sc);
  if (args.out == "-") {
    prsp::write_tnt(std::cout, stream);
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) prsp::fail(Errc::IoError, "cannot write " + args.out);
    prsp::write_tnt(out, stream);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::int64_t> sensors{100, 200, 300, 400, 500};
  std::vector<std::string> queries{"Q1", "Q1prime"};
  std::vector<std::string> engines{"reference"};
  std::string duration = "60s";
  std::string period = "1s";
  std::uint64_t seed = 1;
  std::string out_dir = "bench-out";
  std::uint64_t budget = prsp::kDefaultOracleBudget;
  int jobs = 1;
};

prsp::ContinuousQuery bench_query(const std::string& selector) {
  auto [q1, q1p] = prsp::fixture_queries();
  if (selector == "Q1") return q1;
  if (selector == "Q1prime") return q1p;
  // anything else is a path to a C-SPARQL file
  return prsp::parse_csparql(read_text_file(selector));
}

int cmd_bench(const BenchArgs& args) {
  prsp::BenchConfig cfg;
  for (std::int64_t s : args.sensors) {
    if (s <= 0) prsp::fail(Errc::SyntaxError, "sensors must be positive");
    cfg.scenarios.push_back(prsp::Scenario{
        s, prsp::parse_duration(args.duration),
        prsp::parse_duration(args.period), args.seed});
  }
  for (const auto& q : args.queries) cfg.queries.push_back(bench_query(q));
  for (const auto& e : args.engines) {
    std::uint64_t budget = args.budget;
    cfg.engines.push_back(prsp::EngineSpec{
        e, [e, budget]() { return make_engine(e, budget); }});
  }
  cfg.out_dir = args.out_dir;
  cfg.oracle_budget = args.budget;
  cfg.jobs = args.jobs;
  cfg.progress = [](const std::string& line) {
    std::cerr << line << "\n";
  };

  prsp::BenchReport report = prsp::run_benchmark(cfg);
  for (const auto& run : report.runs) {
    if (run.failed) {
      std::cerr << "failed: " << run.engine_label << " " << run.query_name
                << " s=" << run.sensors << ": " << run.error << "\n";
      continue;
    }
    std::cerr << run.engine_label << " " << run.query_name
              << " s=" << run.sensors << ": windows=" << run.metrics.size()
              << " precision=" << run.precision << " recall=" << run.recall
              << "\n";
  }
  for (const auto& note : prsp::soft_rt_observations(report))
    std::cerr << note << "\n";
  std::cout << report.summary_path << "\n";
  return report.any_failed ? 1 : 0;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string query_path;
  std::string stream_path;
  std::int64_t window = 0;
  std::string origin = "first-item";
  std::vector<std::string> statics;
  std::uint64_t budget = prsp::kDefaultOracleBudget;
};

int cmd_oracle(const OracleArgs& args) {
  prsp::ContinuousQuery q = prsp::parse_csparql(read_text_file(args.query_path));
  prsp::RewriteResult plan = prsp::rewrite(q);
  prsp::RdfStream stream = prsp::read_tnt_file(args.stream_path);
  prsp::OriginMode origin = parse_origin(args.origin);

  std::map<std::string, prsp::Graph> statics;
  for (const auto& spec : args.statics) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      prsp::fail(Errc::SyntaxError,
                 "--static wants <iri>=<path.nt>, got '" + spec + "'");
    statics[spec.substr(0, eq)] = prsp::read_ntriples_file(spec.substr(eq + 1));
  }
  prsp::Graph graph;
  for (const auto& iri : plan.static_graphs) {
    auto it = statics.find(iri);
    if (it == statics.end())
      prsp::fail(Errc::UnknownStaticGraph,
                 "no data registered for static graph <" + iri + ">");
    graph.merge(it->second);
  }

  if (stream.empty())
    prsp::fail(Errc::SyntaxError, "stream is empty: no windows exist");
  auto ticks = merged_ticks(plan, stream.first_timestamp(),
                            stream.last_timestamp(), origin);
  if (args.window < 0 || args.window >= static_cast<std::int64_t>(ticks.size()))
    prsp::fail(Errc::SyntaxError,
               "window index " + std::to_string(args.window) +
                   " out of range: stream has " +
                   std::to_string(ticks.size()) + " complete windows");
  std::int64_t tick = ticks[static_cast<std::size_t>(args.window)];
  for (const auto& b : plan.windows)
    graph.merge(prsp::graph_in_range(stream, tick - b.window.range_ms, tick));

  prsp::OracleEngine oracle(args.budget);
  oracle.load(graph);
  prsp::SolutionSet result = oracle.execute(plan.query);
  prsp::write_result_tsv(std::cout, result, /*sort_rows=*/true);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PRSP: plugin-based RDF stream processing"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "replay a stream through a query");
  run_cmd->add_option("--query", run.query_path, "C-SPARQL query file")
      ->required();
  run_cmd->add_option("--stream", run.stream_path, "TNT stream file");
  run_cmd->add_option("--sensors", run.sensors,
                      "generate the stream instead of reading one");
  run_cmd->add_option("--duration", run.duration, "generator duration");
  run_cmd->add_option("--period", run.period, "generator emit period");
  run_cmd->add_option("--seed", run.seed, "generator seed");
  run_cmd->add_option("--engine", run.engine,
                      "reference | oracle | external:<cmd>");
  run_cmd->add_option("--out", run.out_dir, "directory for metrics.csv");
  run_cmd->add_option("--origin", run.origin,
                      "window origin: first-item | zero");
  run_cmd->add_option("--static", run.statics,
                      "static graph data as <iri>=<path.nt>");
  run_cmd->add_option("--budget", run.budget, "oracle candidate-check budget");
  run_cmd->add_flag("--flush", run.flush,
                    "evaluate the trailing partial window");

  GenerateArgs gen;
  auto* gen_cmd =
      app.add_subcommand("generate", "emit a deterministic sensor stream");
  gen_cmd->add_option("--sensors", gen.sensors, "number of sensors")
      ->required();
  gen_cmd->add_option("--duration", gen.duration, "stream duration");
  gen_cmd->add_option("--period", gen.period, "emission period");
  gen_cmd->add_option("--seed", gen.seed, "rng seed");
  gen_cmd->add_option("--out", gen.out, "output file, - for stdout");

  BenchArgs bench;
  auto* bench_cmd =
      app.add_subcommand("bench", "run the load-scenario benchmark matrix");
  bench_cmd->add_option("--sensors", bench.sensors, "sensor counts")
      ->delimiter(',');
  bench_cmd->add_option("--queries", bench.queries,
                        "Q1, Q1prime or C-SPARQL files")
      ->delimiter(',');
  bench_cmd->add_option("--engines", bench.engines, "engine selectors")
      ->delimiter(',');
  bench_cmd->add_option("--duration", bench.duration, "stream duration");
  bench_cmd->add_option("--period", bench.period, "emission period");
  bench_cmd->add_option("--seed", bench.seed, "rng seed");
  bench_cmd->add_option("--out", bench.out_dir, "report directory");
  bench_cmd->add_option("--budget", bench.budget, "oracle budget");
  bench_cmd->add_option("--jobs", bench.jobs, "parallel runs");

  OracleArgs oracle;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "brute-force one window of a query");
  oracle_cmd->add_option("--query", oracle.query_path, "C-SPARQL query file")
      ->required();
  oracle_cmd->add_option("--stream", oracle.stream_path, "TNT stream file")
      ->required();
  oracle_cmd->add_option("--window", oracle.window, "window index")
      ->required();
  oracle_cmd->add_option("--origin", oracle.origin,
                         "window origin: first-item | zero");
  oracle_cmd->add_option("--static", oracle.statics,
                         "static graph data as <iri>=<path.nt>");
  oracle_cmd->add_option("--budget", oracle.budget, "candidate-check budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: SyntaxError: " << e.what() << "\n";
    return 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run);
    if (gen_cmd->parsed()) return cmd_generate(gen);
    if (bench_cmd->parsed()) return cmd_bench(bench);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle);
  } catch (const Error& e) {
    print_error(e);
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
