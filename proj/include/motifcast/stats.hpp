#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "motifcast/ingest.hpp"
#include "motifcast/motif.hpp"

namespace motifcast {

/// Raised when a statistic needs more history than the stream provides.
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Largest gap between consecutive events incident to the same node.
/// Throws DegenerateDataError when no node has two incident events.
double compute_delta_c(const TemporalGraph& g);

/// Events per second of a non-decreasing timestamp sequence:
/// (k - 1) / (t_k - t_1). nullopt when k < 2 or the span is zero.
std::optional<double> intensity(std::span<const double> timestamps);
std::optional<double> intensity(std::span<const Timestamp> timestamps);

/// Per-edge training summary.
struct EdgeStats {
    EdgeKey key;
    std::uint64_t count = 0;
    double lambda = 0.0;
    double last_occurrence = 0.0;
};

/// Frozen training summary that parameterizes scoring and prediction.
struct MtmStats {
    static constexpr int kFormatVersion = 1;

    double delta_c = 0.0;
    std::size_t ell_max = 3;
    double epsilon = 1.0;
    double lambda_global = 0.0;
    double p_cold = 0.0;
    double t_max = 0.0;
    std::size_t event_count = 0;
    std::size_t cold_count = 0;

    /// Observed edges sorted by key; the cold-branch candidate set.
    std::vector<EdgeStats> edges;
    std::unordered_map<EdgeKey, std::size_t, EdgeKeyHash> edge_index;
    std::uint64_t edge_count_total = 0;

    /// lambda_type[t] is the rate of transitions into type t (global rate
    /// when fewer than two such transitions were seen).
    std::vector<double> lambda_type;
    /// Number of observed transitions into each type.
    std::vector<std::uint64_t> type_observations;

    /// Keyed by transition_key(source, target).
    std::unordered_map<std::uint64_t, std::uint64_t> trans_count;
    std::vector<std::uint64_t> trans_row_total;

    static std::uint64_t transition_key(TypeId source, TypeId target) {
        return (static_cast<std::uint64_t>(source) << 32) | target;
    }
    std::uint64_t transitions(TypeId source, TypeId target) const {
        auto it = trans_count.find(transition_key(source, target));
        return it == trans_count.end() ? 0 : it->second;
    }
    const EdgeStats* find_edge(EdgeKey k) const {
        auto it = edge_index.find(k);
        return it == edge_index.end() ? nullptr : &edges[it->second];
    }
    std::uint64_t total_transitions() const;

    void save(std::ostream& out) const;
    static MtmStats load(std::istream& in);
};

struct StatsOptions {
    double epsilon = 1.0;
};

/// Single chronological pass over `train`: classifies every event as cold
/// or hot, counts type transitions (every eligible open instance extends),
/// edge recurrences and intensities.
MtmStats build_stats(const TemporalGraph& train, const MotifVocabulary& vocab, double delta_c,
                     const StatsOptions& options = {});

/// Per-event cold flags from the same pass build_stats runs.
std::vector<bool> classify_cold(const TemporalGraph& g, const MotifVocabulary& vocab, double delta_c);

}  // namespace motifcast
