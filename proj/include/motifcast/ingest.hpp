#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace motifcast {

/// Dense 0-based node index assigned at ingest.
using NodeId = std::uint32_t;
/// Event timestamp in integer seconds.
using Timestamp = std::int64_t;

struct Event {
    NodeId src = 0;
    NodeId dst = 0;
    Timestamp time = 0;
    std::size_t seq = 0;  // position in the stream

    friend bool operator==(const Event&, const Event&) = default;
};

/// Directed static edge.
struct EdgeKey {
    NodeId src = 0;
    NodeId dst = 0;

    std::uint64_t packed() const {
        return (static_cast<std::uint64_t>(src) << 32) | dst;
    }

    friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const noexcept {
        std::uint64_t x = k.packed();
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return static_cast<std::size_t>(x);
    }
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    // 0 when the error is not tied to a line (e.g. empty input).
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Immutable indexed view of a time-ordered event stream.
///
/// Graphs produced by chronological_split share the parent's node-id
/// table, so dense ids are comparable between train and test halves.
class TemporalGraph {
public:
    TemporalGraph() = default;

    /// Builds the indexes for `events`, which must already be sorted by
    /// (time, seq). `original_ids[i]` is the raw identifier of dense node i.
    TemporalGraph(std::vector<Event> events,
                  std::shared_ptr<const std::vector<std::int64_t>> original_ids,
                  std::size_t dropped_self_loops = 0);

    const std::vector<Event>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    /// Distinct nodes touched by this graph's events.
    std::size_t node_count() const { return node_count_; }
    /// Size of the shared id table (upper bound on any NodeId + 1).
    std::size_t id_space() const { return original_ids_ ? original_ids_->size() : 0; }
    std::int64_t original_id(NodeId n) const { return (*original_ids_)[n]; }
    const std::shared_ptr<const std::vector<std::int64_t>>& id_table() const { return original_ids_; }

    const std::unordered_map<EdgeKey, std::vector<Timestamp>, EdgeKeyHash>& edge_timestamps() const {
        return edge_timestamps_;
    }
    /// Seq numbers (indices into events()) touching node n, in stream order.
    const std::vector<std::size_t>& node_events(NodeId n) const;

    Timestamp t_min() const { return events_.empty() ? 0 : events_.front().time; }
    Timestamp t_max() const { return events_.empty() ? 0 : events_.back().time; }
    std::size_t dropped_self_loops() const { return dropped_self_loops_; }

private:
    std::vector<Event> events_;
    std::shared_ptr<const std::vector<std::int64_t>> original_ids_;
    std::unordered_map<EdgeKey, std::vector<Timestamp>, EdgeKeyHash> edge_timestamps_;
    std::vector<std::vector<std::size_t>> node_events_;
    std::size_t node_count_ = 0;
    std::size_t dropped_self_loops_ = 0;
};

/// Reads `src dst time` lines (whitespace or comma separated, `#` comments).
/// Self-loops are dropped and counted. Throws ParseError.
TemporalGraph parse_events(std::istream& in);
TemporalGraph parse_events_file(const std::string& path);

/// Writes the events back as `src dst time` lines using original ids.
void write_events(const TemporalGraph& g, std::ostream& out);

/// Returns (train, test); test holds the last ceil(ratio * |E|) events,
/// clamped so that train keeps at least one event.
std::pair<TemporalGraph, TemporalGraph> chronological_split(const TemporalGraph& g, double test_ratio);

struct SummaryStats {
    std::size_t nodes = 0;
    std::size_t events = 0;
    std::size_t static_edges = 0;
    std::int64_t timespan_days = 0;
};

SummaryStats summary_stats(const TemporalGraph& g);
std::string to_json(const SummaryStats& s);

}  // namespace motifcast
