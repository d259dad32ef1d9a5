#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "prsp/error.hpp"
#include "prsp/term.hpp"

namespace prsp {

/// An ordered sequence of timestamped triples. Timestamps are non-decreasing
/// in arrival order; ties are allowed. Out-of-order input is rejected, never
/// reordered.
class RdfStream {
 public:
  using const_iterator = std::vector<TimestampedTriple>::const_iterator;

  RdfStream() = default;

  explicit RdfStream(std::vector<TimestampedTriple> items)
      : items_(std::move(items)) {
    for (std::size_t i = 1; i < items_.size(); ++i) {
      if (items_[i].timestamp_ms < items_[i - 1].timestamp_ms)
        fail(Errc::OutOfOrderItem,
             "timestamp " + std::to_string(items_[i].timestamp_ms) +
                 " at position " + std::to_string(i) + " precedes " +
                 std::to_string(items_[i - 1].timestamp_ms));
    }
  }

  void push_back(TimestampedTriple item) {
    if (!items_.empty() && item.timestamp_ms < items_.back().timestamp_ms)
      fail(Errc::OutOfOrderItem,
           "timestamp " + std::to_string(item.timestamp_ms) + " precedes " +
               std::to_string(items_.back().timestamp_ms));
    items_.push_back(std::move(item));
  }

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  const TimestampedTriple& operator[](std::size_t i) const { return items_[i]; }
  const TimestampedTriple& front() const { return items_.front(); }
  const TimestampedTriple& back() const { return items_.back(); }

  std::int64_t first_timestamp() const { return items_.front().timestamp_ms; }
  std::int64_t last_timestamp() const { return items_.back().timestamp_ms; }

  const_iterator begin() const noexcept { return items_.begin(); }
  const_iterator end() const noexcept { return items_.end(); }

  const std::vector<TimestampedTriple>& items() const noexcept { return items_; }

  bool operator==(const RdfStream&) const = default;

 private:
  std::vector<TimestampedTriple> items_;
};

}  // namespace prsp
