#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <optional>
#include <utility>
#include <vector>

#include "prsp/csparql.hpp"
#include "prsp/engine.hpp"
#include "prsp/error.hpp"
#include "prsp/graph.hpp"
#include "prsp/query.hpp"
#include "prsp/solution.hpp"
#include "prsp/stream.hpp"
#include "prsp/window.hpp"

namespace prsp {

/// Per-window timings: LT covers engine load, RT covers query execution, ET
/// spans the whole window handling from close detection to result emission,
/// so et >= lt + rt always.
struct WindowMetrics {
  double lt_ms = 0.0;
  double rt_ms = 0.0;
  double et_ms = 0.0;
  std::int64_t window_index = 0;
  std::int64_t result_count = 0;
};

struct WindowResult {
  WindowInstance window;  // graph cleared when the runtime elides graphs
  SolutionSet solutions;
  WindowMetrics metrics;
  std::optional<std::string> error;  // engine failure for this window
};

struct RuntimeOptions {
  OriginMode origin = OriginMode::FirstItem;
  bool flush_partial = false;  // evaluate the trailing incomplete window
  bool keep_graphs = true;     // retain each window graph in its result
};

class Runtime;

class RegisteredQuery {
 public:
  const std::string& name() const noexcept { return name_; }
  const RewriteResult& plan() const noexcept { return plan_; }
  EnginePlugin& engine() noexcept { return *engine_; }

 private:
  friend class Runtime;

  struct BindingState {
    explicit BindingState(StreamBinding b) : binding(std::move(b)) {}
    StreamBinding binding;
    StreamBuffer buffer;
    std::int64_t t0 = 0;
    std::int64_t next_index = 0;
    std::int64_t next_close = 0;
  };

  std::string name_;
  RewriteResult plan_;
  std::unique_ptr<EnginePlugin> engine_;
  RuntimeOptions options_;
  std::vector<BindingState> bindings_;
  Graph static_graph_;
  bool started_ = false;
  bool finished_ = false;
  std::int64_t last_ts_ = 0;
  std::int64_t tick_ordinal_ = 0;
  std::function<void(const WindowResult&)> sink_;
};

/// Continuous-query executor. Owns one engine instance per registered query;
/// evaluation per query is sequential, distinct queries are independent.
class Runtime {
 public:
  /// Registers static graph data under an IRI so FROM <iri> clauses resolve.
  void add_static_graph(const std::string& iri, Graph g) {
    static_graphs_[iri] = std::move(g);
  }

  RegisteredQuery& register_query(std::string_view query_text,
                                  std::unique_ptr<EnginePlugin> engine,
                                  RuntimeOptions options = {}) {
    return register_query(parse_csparql(query_text), std::move(engine),
                          options);
  }

  RegisteredQuery& register_query(const ContinuousQuery& query,
                                  std::unique_ptr<EnginePlugin> engine,
                                  RuntimeOptions options = {}) {
    query.validate();
    if (queries_.count(query.name))
      fail(Errc::DuplicateRegistration,
           "query '" + query.name + "' is already registered");
    auto rq = std::make_unique<RegisteredQuery>();
    rq->name_ = query.name;
    rq->plan_ = rewrite(query);
    rq->engine_ = std::move(engine);
    rq->options_ = options;
    for (const auto& b : rq->plan_.windows)
      rq->bindings_.emplace_back(b);
    for (const auto& iri : rq->plan_.static_graphs) {
      auto it = static_graphs_.find(iri);
      if (it == static_graphs_.end())
        fail(Errc::UnknownStaticGraph,
             "no data registered for static graph <" + iri + ">");
      rq->static_graph_.merge(it->second);
    }
    auto [it, ok] = queries_.emplace(query.name, std::move(rq));
    return *it->second;
  }

  void set_sink(RegisteredQuery& rq,
                std::function<void(const WindowResult&)> sink) {
    rq.sink_ = std::move(sink);
  }

  /// Feeds one item to every stream the query binds (single-source mode).
  std::vector<WindowResult> feed(RegisteredQuery& rq,
                                 const TimestampedTriple& item) {
    return feed_impl(rq, nullptr, item);
  }

  /// Feeds one item to the named stream only.
  std::vector<WindowResult> feed(RegisteredQuery& rq,
                                 const std::string& stream_iri,
                                 const TimestampedTriple& item) {
    return feed_impl(rq, &stream_iri, item);
  }

  /// Closes and evaluates every remaining complete window; with
  /// flush_partial, also the one trailing incomplete window.
  std::vector<WindowResult> finish(RegisteredQuery& rq) {
    std::vector<WindowResult> out;
    if (rq.finished_) return out;
    rq.finished_ = true;
    if (!rq.started_) return out;
    close_ticks(rq, rq.last_ts_, /*inclusive=*/true, out);
    if (rq.options_.flush_partial) {
      std::int64_t t = next_tick(rq);
      std::int64_t open = merged_open(rq, t);
      if (open < rq.last_ts_) out.push_back(evaluate_tick(rq, t));
    }
    return out;
  }

  /// Feeds a whole stream and finishes: the batch replay entry point.
  std::vector<WindowResult> replay(RegisteredQuery& rq,
                                   const RdfStream& stream) {
    std::vector<WindowResult> out;
    for (const auto& item : stream) {
      auto r = feed(rq, item);
      std::move(r.begin(), r.end(), std::back_inserter(out));
    }
    auto r = finish(rq);
    std::move(r.begin(), r.end(), std::back_inserter(out));
    return out;
  }

 private:
  using Clock = std::chrono::steady_clock;

  static double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count() /
           1e6;
  }

  std::vector<WindowResult> feed_impl(RegisteredQuery& rq,
                                      const std::string* stream_iri,
                                      const TimestampedTriple& item) {
    if (rq.finished_)
      fail(Errc::InvalidState, "feed after finish on '" + rq.name_ + "'");
    RegisteredQuery::BindingState* target = nullptr;
    if (stream_iri) {
      for (auto& b : rq.bindings_)
        if (b.binding.stream_iri == *stream_iri) target = &b;
      if (!target)
        fail(Errc::UnknownStream,
             "query '" + rq.name_ + "' does not bind <" + *stream_iri + ">");
    }
    if (rq.started_ && item.timestamp_ms < rq.last_ts_)
      fail(Errc::OutOfOrderItem,
           "timestamp " + std::to_string(item.timestamp_ms) + " precedes " +
               std::to_string(rq.last_ts_));
    if (!rq.started_) {
      for (auto& b : rq.bindings_) {
        b.t0 = window_origin(item.timestamp_ms, b.binding.window,
                             rq.options_.origin);
        b.next_index = 0;
        b.next_close = b.t0 + b.binding.window.range_ms;
      }
      rq.started_ = true;
    }

    // An arrival strictly past a window's close triggers that window.
    std::vector<WindowResult> out;
    close_ticks(rq, item.timestamp_ms, /*inclusive=*/false, out);

    if (target) {
      target->buffer.append(item);
    } else {
      for (auto& b : rq.bindings_) b.buffer.append(item);
    }
    rq.last_ts_ = item.timestamp_ms;
    return out;
  }

  static std::int64_t next_tick(const RegisteredQuery& rq) {
    std::int64_t t = rq.bindings_.front().next_close;
    for (const auto& b : rq.bindings_) t = std::min(t, b.next_close);
    return t;
  }

  static std::int64_t merged_open(const RegisteredQuery& rq, std::int64_t tick) {
    std::int64_t open = tick - rq.bindings_.front().binding.window.range_ms;
    for (const auto& b : rq.bindings_)
      open = std::min(open, tick - b.binding.window.range_ms);
    return open;
  }

  void close_ticks(RegisteredQuery& rq, std::int64_t limit, bool inclusive,
                   std::vector<WindowResult>& out) {
    while (true) {
      std::int64_t t = next_tick(rq);
      if (inclusive ? t > limit : t >= limit) break;
      out.push_back(evaluate_tick(rq, t));
      for (auto& b : rq.bindings_) {
        if (b.next_close == t) {
          ++b.next_index;
          b.next_close = b.t0 + b.next_index * b.binding.window.step_ms +
                         b.binding.window.range_ms;
        }
        // Keep what the binding's own next window needs and, with several
        // bindings on one trigger clock, what any later tick may still read.
        std::int64_t open_next =
            b.t0 + b.next_index * b.binding.window.step_ms;
        std::int64_t thresh =
            rq.bindings_.size() == 1
                ? open_next
                : std::min(open_next, t - b.binding.window.range_ms);
        b.buffer.evict_up_to(thresh);
      }
    }
  }

  WindowResult evaluate_tick(RegisteredQuery& rq, std::int64_t tick) {
    auto et_start = Clock::now();
    WindowResult r;
    r.window.index = rq.tick_ordinal_++;
    r.window.close_t = tick;
    r.window.open_t = merged_open(rq, tick);

    Graph graph = rq.static_graph_;
    for (const auto& b : rq.bindings_)
      graph.merge(b.buffer.graph_in(tick - b.binding.window.range_ms, tick));

    r.metrics.window_index = r.window.index;
    try {
      rq.engine_->reset();
      auto lt_start = Clock::now();
      rq.engine_->load(graph);
      auto lt_end = Clock::now();
      r.metrics.lt_ms = ms_between(lt_start, lt_end);

      auto rt_start = Clock::now();
      r.solutions = rq.engine_->execute(rq.plan_.query);
      auto rt_end = Clock::now();
      r.metrics.rt_ms = ms_between(rt_start, rt_end);
    } catch (const Error& e) {
      r.error = e.what();
      r.solutions.rows.clear();
      for (const auto& v : rq.plan_.query.effective_projection())
        r.solutions.variables.push_back(v.name());
    }
    r.metrics.result_count = static_cast<std::int64_t>(r.solutions.rows.size());

    if (rq.options_.keep_graphs)
      r.window.graph = std::move(graph);

    r.metrics.et_ms = ms_between(et_start, Clock::now());
    // division rounding must not break et >= lt + rt
    r.metrics.et_ms =
        std::max(r.metrics.et_ms, r.metrics.lt_ms + r.metrics.rt_ms);
    if (rq.sink_) rq.sink_(r);
    return r;
  }

  std::map<std::string, std::unique_ptr<RegisteredQuery>> queries_;
  std::map<std::string, Graph> static_graphs_;
};

}  // namespace prsp
