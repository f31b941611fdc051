#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "motifcast/ingest.hpp"
#include "motifcast/predictor.hpp"
#include "motifcast/stats.hpp"

namespace motifcast {

/// Fraction of predictions whose directed pair occurs anywhere in `test`.
/// Duplicate predictions are scored independently. Throws on empty input.
double precision_at_k(std::span<const Prediction> preds, const TemporalGraph& test);

/// Fraction of test events whose directed pair already occurs in train.
double repeated_event_ratio(const TemporalGraph& train, const TemporalGraph& test);

/// Shannon entropy (nats) of a frequency table; zero counts are ignored.
double entropy_of_counts(std::span<const std::uint64_t> counts);

/// Mean over source nodes of the entropy of their target distribution.
double node_entropy(const TemporalGraph& train);

/// Entropy of the joint distribution over observed (source, target)
/// transition pairs. Throws DegenerateDataError with no transitions.
double motif_transition_entropy(const MtmStats& stats);

struct EvalReport {
    std::size_t k = 0;
    double test_ratio = 0.0;
    double precision = 0.0;
    double rer = 0.0;
    double node_entropy = 0.0;
    double motif_transition_entropy = 0.0;
    std::size_t fallback_count = 0;
    std::uint64_t seed = 0;

    std::string to_json() const;
};

struct ModelConfig {
    std::size_t ell_max = 3;
    std::optional<double> delta_c;  // computed from the training split when unset
    double epsilon = 1.0;
    ForecastOptions forecast;
};

struct CurveRow {
    std::size_t k = 0;
    double test_ratio = 0.0;
    std::uint64_t seed = 0;
    double precision = 0.0;
    std::size_t fallbacks = 0;
};

struct CurveSummary {
    std::size_t k = 0;
    double test_ratio = 0.0;
    double mean_precision = 0.0;
    double mean_fallbacks = 0.0;
};

struct CurveTable {
    std::vector<CurveRow> rows;       // sorted by (test_ratio, k, seed)
    std::vector<CurveSummary> means;  // one per (test_ratio, k)

    /// `k,test_ratio,seed,precision,fallbacks` with a `mean` row after each
    /// (k, test_ratio) group.
    void write_csv(std::ostream& out) const;
};

/// For every ratio: split, fit on train, forecast max(ks) events per seed and
/// score every prefix length k. Cells run on up to `threads` workers; the
/// table is independent of the worker count.
CurveTable sweep_k(const TemporalGraph& g, std::span<const double> test_ratios, std::span<const std::size_t> ks,
                   std::span<const std::uint64_t> seeds, const ModelConfig& config, std::size_t threads = 1);

}  // namespace motifcast
