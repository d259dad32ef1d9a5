#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <utility>

#include "prsp/error.hpp"
#include "prsp/graph.hpp"
#include "prsp/query.hpp"
#include "prsp/stream.hpp"

namespace prsp {

/// Windows are left-open right-closed: an item belongs to window (open, close]
/// iff open < timestamp <= close. With range == step this makes consecutive
/// windows an exact partition of the time axis above the origin.
struct WindowBounds {
  std::int64_t open_t;
  std::int64_t close_t;
};

inline WindowBounds window_bounds(const WindowSpec& spec, std::int64_t origin_t0,
                                  std::int64_t index) {
  std::int64_t close = origin_t0 + index * spec.step_ms + spec.range_ms;
  return WindowBounds{close - spec.range_ms, close};
}

enum class OriginMode { FirstItem, Zero };

/// Window alignment origin: the first timestamp rounded down to a multiple of
/// the step, or absolute zero.
inline std::int64_t window_origin(std::int64_t first_ts, const WindowSpec& spec,
                                  OriginMode mode) {
  if (mode == OriginMode::Zero) return 0;
  return (first_ts / spec.step_ms) * spec.step_ms;
}

/// Number of windows whose close time lies at or before stream_end_t.
inline std::int64_t windows_covering(std::int64_t stream_end_t,
                                     const WindowSpec& spec, std::int64_t t0) {
  if (stream_end_t < t0 + spec.range_ms) return 0;
  return (stream_end_t - t0 - spec.range_ms) / spec.step_ms + 1;
}

/// One materialized window: its bounds, its index in the window sequence,
/// and the deduplicated graph of in-range triples.
struct WindowInstance {
  std::int64_t open_t = 0;
  std::int64_t close_t = 0;
  std::int64_t index = 0;
  Graph graph;
};

/// Distinct triples of the stream with open_t < timestamp <= close_t.
/// Exploits the stream's timestamp order with a binary search.
inline Graph graph_in_range(const RdfStream& stream, std::int64_t open_t,
                            std::int64_t close_t) {
  auto ts_less = [](const TimestampedTriple& item, std::int64_t t) {
    return item.timestamp_ms <= t;  // partition point: first item with ts > t
  };
  auto first = std::partition_point(stream.begin(), stream.end(),
                                    [&](const auto& x) { return ts_less(x, open_t); });
  auto last = std::partition_point(first, stream.end(),
                                   [&](const auto& x) { return ts_less(x, close_t); });
  Graph g;
  for (auto it = first; it != last; ++it) g.insert(it->triple);
  return g;
}

inline WindowInstance materialize(const RdfStream& stream,
                                  const WindowSpec& spec, std::int64_t t0,
                                  std::int64_t index) {
  WindowBounds b = window_bounds(spec, t0, index);
  return WindowInstance{b.open_t, b.close_t, index,
                        graph_in_range(stream, b.open_t, b.close_t)};
}

/// Bounded buffer between ingestion and window materialization. One writer
/// appends in timestamp order; the window manager snapshots in-range segments
/// and evicts what no live window can reach.
class StreamBuffer {
 public:
  void append(TimestampedTriple item) {
    if (!items_.empty() && item.timestamp_ms < items_.back().timestamp_ms)
      fail(Errc::OutOfOrderItem,
           "timestamp " + std::to_string(item.timestamp_ms) + " precedes " +
               std::to_string(items_.back().timestamp_ms));
    items_.push_back(std::move(item));
  }

  /// Drops every item with timestamp <= ts.
  void evict_up_to(std::int64_t ts) {
    while (!items_.empty() && items_.front().timestamp_ms <= ts)
      items_.pop_front();
  }

  /// Immutable snapshot of the (open_t, close_t] segment as a graph.
  Graph graph_in(std::int64_t open_t, std::int64_t close_t) const {
    Graph g;
    for (const auto& item : items_) {
      if (item.timestamp_ms > close_t) break;
      if (item.timestamp_ms > open_t) g.insert(item.triple);
    }
    return g;
  }

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

 private:
  std::deque<TimestampedTriple> items_;
};

}  // namespace prsp
