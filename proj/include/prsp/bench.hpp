#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "prsp/csparql.hpp"
#include "prsp/engine.hpp"
#include "prsp/error.hpp"
#include "prsp/ntriples.hpp"
#include "prsp/runtime.hpp"
#include "prsp/solution.hpp"
#include "prsp/stream.hpp"

namespace prsp {

// ---------------------------------------------------------------------------
// Deterministic sensor-stream generator
// ---------------------------------------------------------------------------

namespace vocab {
inline constexpr const char* kBase = "http://prsp.example/";
inline constexpr const char* kObservedProperty =
    "http://prsp.example/vocab/observedProperty";
inline constexpr const char* kObservedBy =
    "http://prsp.example/vocab/observedBy";
inline constexpr const char* kHasValue = "http://prsp.example/vocab/hasValue";
inline constexpr const char* kObservation =
    "http://prsp.example/vocab/Observation";
inline constexpr const char* kWaterTemperature =
    "http://prsp.example/vocab/WaterTemperature";
inline constexpr const char* kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr const char* kXsdDouble =
    "http://www.w3.org/2001/XMLSchema#double";
inline constexpr const char* kSensorStream =
    "http://prsp.example/streams/sensors";
}  // namespace vocab

/// One load scenario: s sensors each emitting one observation per period.
struct Scenario {
  std::int64_t sensors = 1;
  std::int64_t duration_ms = 60'000;
  std::int64_t emit_period_ms = 1'000;
  std::uint64_t seed = 1;
};

/// Emits 4 triples per sensor per tick (observedProperty, observedBy,
/// hasValue, type), tick-aligned at period, 2*period, ..., duration.
/// Identical scenarios produce byte-identical TNT output.
inline RdfStream generate_stream(const Scenario& sc) {
  if (sc.sensors <= 0) fail(Errc::SyntaxError, "sensors must be positive");
  if (sc.emit_period_ms <= 0)
    fail(Errc::ZeroDuration, "emit period must be positive");
  std::mt19937_64 rng(sc.seed);
  RdfStream stream;
  Term prop = Term::iri(vocab::kObservedProperty);
  Term by = Term::iri(vocab::kObservedBy);
  Term has = Term::iri(vocab::kHasValue);
  Term type = Term::iri(vocab::kRdfType);
  Term water = Term::iri(vocab::kWaterTemperature);
  Term observation = Term::iri(vocab::kObservation);
  std::vector<Term> sensors;
  for (std::int64_t i = 0; i < sc.sensors; ++i)
    sensors.push_back(
        Term::iri(std::string(vocab::kBase) + "data/sensor" + std::to_string(i)));
  std::int64_t obs_counter = 0;
  for (std::int64_t t = sc.emit_period_ms; t <= sc.duration_ms;
       t += sc.emit_period_ms) {
    for (std::int64_t i = 0; i < sc.sensors; ++i) {
      Term obs = Term::iri(std::string(vocab::kBase) + "data/obs" +
                           std::to_string(obs_counter++));
      // water temperature in [10.0, 30.0], one decimal, avoiding float
      // formatting so the bytes are platform-independent
      std::uint64_t v = rng() % 201 + 100;
      Term value = Term::typed_literal(
          std::to_string(v / 10) + "." + std::to_string(v % 10),
          vocab::kXsdDouble);
      stream.push_back(TimestampedTriple(Triple(obs, prop, water), t));
      stream.push_back(TimestampedTriple(Triple(obs, by, sensors[i]), t));
      stream.push_back(TimestampedTriple(Triple(obs, has, value), t));
      stream.push_back(TimestampedTriple(Triple(obs, type, observation), t));
    }
  }
  return stream;
}

// ---------------------------------------------------------------------------
// Fixture queries
// ---------------------------------------------------------------------------

/// Q1 (four patterns) and Q1prime (its relaxation to three patterns), both
/// over the generator vocabulary with 5s tumbling windows. These are
/// reconstructions shaped like the YABench BGP pair, not verbatim imports.
inline std::pair<ContinuousQuery, ContinuousQuery> fixture_queries() {
  std::string head =
      "SELECT ?obs ?sensor ?value\n"
      "FROM STREAM <" +
      std::string(vocab::kSensorStream) +
      "> [ RANGE 5s STEP 5s ]\n"
      "WHERE {\n"
      "  ?obs <" +
      std::string(vocab::kObservedProperty) + "> <" +
      std::string(vocab::kWaterTemperature) +
      "> .\n"
      "  ?obs <" +
      std::string(vocab::kObservedBy) +
      "> ?sensor .\n"
      "  ?obs <" +
      std::string(vocab::kHasValue) + "> ?value .\n";
  std::string q1_text = "REGISTER QUERY Q1 AS\n" + head + "  ?obs <" +
                        std::string(vocab::kRdfType) + "> <" +
                        std::string(vocab::kObservation) + "> .\n}\n";
  std::string q1p_text = "REGISTER QUERY Q1prime AS\n" + head + "}\n";
  return {parse_csparql(q1_text), parse_csparql(q1p_text)};
}

// ---------------------------------------------------------------------------
// Grading
// ---------------------------------------------------------------------------

struct Grade {
  std::int64_t tp = 0;
  std::int64_t actual_count = 0;
  std::int64_t expected_count = 0;
  double precision = 1.0;
  double recall = 1.0;
};

/// Row-level precision/recall of `actual` against `expected`, with bag
/// intersection (per-row multiplicity minimum). Empty actual has precision 1,
/// empty expected has recall 1.
inline Grade grade(const SolutionSet& actual, const SolutionSet& expected) {
  if (actual.variables != expected.variables)
    fail(Errc::VariableMismatch,
         "result sets project different variable lists");
  std::map<SolutionMapping, std::int64_t> got, want;
  for (const auto& r : actual.rows) ++got[r];
  for (const auto& r : expected.rows) ++want[r];
  Grade g;
  g.actual_count = static_cast<std::int64_t>(actual.rows.size());
  g.expected_count = static_cast<std::int64_t>(expected.rows.size());
  for (const auto& [row, n] : got) {
    auto it = want.find(row);
    if (it != want.end()) g.tp += std::min(n, it->second);
  }
  g.precision = g.actual_count == 0
                    ? 1.0
                    : static_cast<double>(g.tp) / static_cast<double>(g.actual_count);
  g.recall = g.expected_count == 0
                 ? 1.0
                 : static_cast<double>(g.tp) / static_cast<double>(g.expected_count);
  return g;
}

// ---------------------------------------------------------------------------
// Benchmark runner
// ---------------------------------------------------------------------------

struct EngineSpec {
  std::string label;
  std::function<std::unique_ptr<EnginePlugin>()> make;
};

struct BenchConfig {
  std::vector<Scenario> scenarios;
  std::vector<ContinuousQuery> queries;
  std::vector<EngineSpec> engines;
  std::string out_dir = "bench-out";
  std::uint64_t oracle_budget = kDefaultOracleBudget;
  int jobs = 1;
  std::function<void(const std::string&)> progress;  // optional
};

struct MetricsRow {
  std::int64_t window_index = 0;
  std::int64_t open_t = 0;
  std::int64_t close_t = 0;
  double lt_ms = 0, rt_ms = 0, et_ms = 0;
  std::int64_t result_count = 0;
};

struct GradeRow {
  std::int64_t window_index = 0;
  bool graded = false;
  Grade grade;
  std::string note;  // why the window went ungraded
};

struct BenchRun {
  std::string engine_label;
  std::string query_name;
  std::int64_t sensors = 0;
  std::vector<MetricsRow> metrics;
  std::vector<GradeRow> grades;
  double mean_lt_ms = 0, mean_rt_ms = 0, mean_et_ms = 0;
  std::int64_t tp_total = 0, actual_total = 0, expected_total = 0;
  double precision = 1.0;  // micro-averaged over graded windows
  double recall = 1.0;
  bool failed = false;
  std::string error;
};

struct BenchReport {
  std::vector<BenchRun> runs;
  std::string summary_path;
  bool any_failed = false;
};

namespace detail {

inline std::string sanitize_label(const std::string& s) {
  std::string out;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '-';
  }
  return out;
}

inline std::string fmt_ms(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(3);
  os << v;
  return os.str();
}

inline std::string fmt_ratio(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

inline void write_metrics_csv(const std::filesystem::path& path,
                              const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << "window_index,open_t,close_t,lt_ms,rt_ms,et_ms,result_count\n";
  for (const auto& r : rows)
    out << r.window_index << ',' << r.open_t << ',' << r.close_t << ','
        << detail::fmt_ms(r.lt_ms) << ',' << detail::fmt_ms(r.rt_ms) << ','
        << detail::fmt_ms(r.et_ms) << ',' << r.result_count << '\n';
}

inline void write_grades_csv(const std::filesystem::path& path,
                             const std::vector<GradeRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << "window_index,tp,actual_count,expected_count,precision,recall\n";
  for (const auto& r : rows) {
    out << r.window_index << ',';
    if (r.graded) {
      out << r.grade.tp << ',' << r.grade.actual_count << ','
          << r.grade.expected_count << ',' << detail::fmt_ratio(r.grade.precision)
          << ',' << detail::fmt_ratio(r.grade.recall) << '\n';
    } else {
      // ungraded window: counts and ratios left empty
      out << ',' << r.grade.actual_count << ",,,\n";
    }
  }
}

/// Replays one (scenario, query) pair through the runtime with a fresh engine
/// and grades every window against the brute-force oracle.
inline BenchRun bench_run(const Scenario& sc, const ContinuousQuery& query,
                          const EngineSpec& engine,
                          std::uint64_t oracle_budget = kDefaultOracleBudget) {
  BenchRun run;
  run.engine_label = engine.label;
  run.query_name = query.name;
  run.sensors = sc.sensors;
  try {
    RdfStream stream = generate_stream(sc);
    Runtime rt;
    RuntimeOptions opt;
    opt.keep_graphs = true;
    RegisteredQuery& rq = rt.register_query(query, engine.make(), opt);
    std::vector<WindowResult> results = rt.replay(rq, stream);

    OracleEngine oracle(oracle_budget);
    for (const auto& r : results) {
      run.metrics.push_back(MetricsRow{r.metrics.window_index, r.window.open_t,
                                       r.window.close_t, r.metrics.lt_ms,
                                       r.metrics.rt_ms, r.metrics.et_ms,
                                       r.metrics.result_count});
      GradeRow gr;
      gr.window_index = r.window.index;
      gr.grade.actual_count = static_cast<std::int64_t>(r.solutions.rows.size());
      if (r.error) {
        gr.note = *r.error;
      } else {
        try {
          oracle.load(r.window.graph);
          SolutionSet expected = oracle.execute(rq.plan().query);
          gr.grade = grade(r.solutions, expected);
          gr.graded = true;
        } catch (const Error& e) {
          if (e.code() != Errc::OracleTooLarge) throw;
          gr.note = e.what();
        }
      }
      run.grades.push_back(std::move(gr));
    }

    for (const auto& m : run.metrics) {
      run.mean_lt_ms += m.lt_ms;
      run.mean_rt_ms += m.rt_ms;
      run.mean_et_ms += m.et_ms;
    }
    if (!run.metrics.empty()) {
      auto n = static_cast<double>(run.metrics.size());
      run.mean_lt_ms /= n;
      run.mean_rt_ms /= n;
      run.mean_et_ms /= n;
    }
    for (const auto& g : run.grades) {
      if (!g.graded) continue;
      run.tp_total += g.grade.tp;
      run.actual_total += g.grade.actual_count;
      run.expected_total += g.grade.expected_count;
    }
    run.precision = run.actual_total == 0
                        ? 1.0
                        : static_cast<double>(run.tp_total) /
                              static_cast<double>(run.actual_total);
    run.recall = run.expected_total == 0
                     ? 1.0
                     : static_cast<double>(run.tp_total) /
                           static_cast<double>(run.expected_total);
  } catch (const std::exception& e) {
    run.failed = true;
    run.error = e.what();
  }
  return run;
}

/// Full matrix: every engine x query x scenario. Writes metrics.csv and
/// grades.csv per run directory plus one summary.csv, and returns everything
/// in memory as well.
inline BenchReport run_benchmark(const BenchConfig& cfg) {
  namespace fs = std::filesystem;
  BenchReport report;

  struct Cell {
    const EngineSpec* engine;
    const ContinuousQuery* query;
    const Scenario* scenario;
  };
  std::vector<Cell> cells;
  for (const auto& e : cfg.engines)
    for (const auto& q : cfg.queries)
      for (const auto& s : cfg.scenarios) cells.push_back(Cell{&e, &q, &s});

  report.runs.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      if (cfg.progress)
        cfg.progress("run " + c.engine->label + " " + c.query->name + " s=" +
                     std::to_string(c.scenario->sensors));
      report.runs[i] =
          bench_run(*c.scenario, *c.query, *c.engine, cfg.oracle_budget);
    }
  };
  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  fs::create_directories(cfg.out_dir);
  for (const auto& run : report.runs) {
    if (run.failed) {
      report.any_failed = true;
      continue;
    }
    fs::path dir = fs::path(cfg.out_dir) /
                   (detail::sanitize_label(run.engine_label) + "_" +
                    detail::sanitize_label(run.query_name) + "_s" +
                    std::to_string(run.sensors));
    fs::create_directories(dir);
    write_metrics_csv(dir / "metrics.csv", run.metrics);
    write_grades_csv(dir / "grades.csv", run.grades);
  }

  fs::path summary = fs::path(cfg.out_dir) / "summary.csv";
  std::ofstream out(summary, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write " + summary.string());
  out << "engine,query,sensors,mean_lt_ms,mean_rt_ms,mean_et_ms,precision,"
         "recall\n";
  for (const auto& run : report.runs) {
    out << run.engine_label << ',' << run.query_name << ',' << run.sensors
        << ',';
    if (run.failed) {
      out << ",,,,\n";
      continue;
    }
    out << detail::fmt_ms(run.mean_lt_ms) << ',' << detail::fmt_ms(run.mean_rt_ms)
        << ',' << detail::fmt_ms(run.mean_et_ms) << ','
        << detail::fmt_ratio(run.precision) << ','
        << detail::fmt_ratio(run.recall) << '\n';
  }
  report.summary_path = summary.string();
  return report;
}

/// The load matrix of the shape-level evaluation: s in {100..500} sensors,
/// 60s of data, one emission per second.
inline std::vector<Scenario> paper_scenarios(std::int64_t duration_ms = 60'000,
                                             std::int64_t period_ms = 1'000,
                                             std::uint64_t seed = 1) {
  std::vector<Scenario> out;
  for (std::int64_t s : {100, 200, 300, 400, 500})
    out.push_back(Scenario{s, duration_ms, period_ms, seed});
  return out;
}

/// Qualitative response-time observations per (engine, query): how mean RT
/// moved between the lightest and heaviest scenario. Reported, not asserted.
inline std::vector<std::string> soft_rt_observations(const BenchReport& report) {
  std::map<std::pair<std::string, std::string>,
           std::map<std::int64_t, double>>
      by_cell;
  for (const auto& run : report.runs)
    if (!run.failed)
      by_cell[{run.engine_label, run.query_name}][run.sensors] =
          run.mean_rt_ms;
  std::vector<std::string> notes;
  for (const auto& [key, rts] : by_cell) {
    if (rts.size() < 2) continue;
    auto lo = *rts.begin();
    auto hi = *rts.rbegin();
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(3);
    os.setf(std::ios::fixed);
    os << key.first << "/" << key.second << ": mean RT " << lo.second
       << "ms at s=" << lo.first << " -> " << hi.second
       << "ms at s=" << hi.first;
    if (hi.second + 1e-9 < lo.second)
      os << " (warning: decreased with load)";
    notes.push_back(os.str());
  }
  return notes;
}

}  // namespace prsp
