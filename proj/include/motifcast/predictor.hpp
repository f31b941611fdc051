#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <unordered_map>
#include <utility>
#include <vector>

#include "motifcast/ingest.hpp"
#include "motifcast/motif.hpp"
#include "motifcast/scoring.hpp"
#include "motifcast/stats.hpp"

namespace motifcast {

/// Seeded generator with a platform-independent stream.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard,
/// and converts words to doubles with explicit 53-bit arithmetic instead of
/// the implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1].
    double uniform_open_closed() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
    /// Uniform on [0, 1).
    double uniform_closed_open() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool operator==(const Rng&) const = default;

private:
    std::mt19937_64 engine_;
};

/// -ln(U) / lambda with U uniform on (0, 1].
double sample_exponential(double lambda, Rng& rng);

struct Prediction {
    std::size_t step = 0;
    NodeId src = 0;
    NodeId dst = 0;
    double time = 0.0;
    EventKind kind = EventKind::cold;
    TypeId source_type = 0;  // hot only
    TypeId target_type = 0;  // hot only
    double score = 0.0;
    bool fallback = false;   // hot was drawn but no extension was feasible
};

struct PredictorState {
    OpenMotifPool pool;
    double now = 0.0;
    /// Working last-occurrence times, parallel to MtmStats::edges.
    std::vector<double> edge_last;
    /// Emitted pairs that were never observed in training.
    std::unordered_map<EdgeKey, double, EdgeKeyHash> unseen_last;
    Rng rng;
    std::size_t initial_pool_size = 0;

    double last_occurrence(EdgeKey k, const MtmStats& stats) const;
};

/// Pool of instances still open at the end of `train`.
OpenMotifPool replay_open_pool(const TemporalGraph& train, const MotifVocabulary& vocab, double delta_c);

PredictorState init_state(const TemporalGraph& train, const MtmStats& stats, const MotifVocabulary& vocab,
                          std::uint64_t seed);
/// Same as above with a pool already replayed (shared across seeds).
PredictorState init_state(OpenMotifPool pool, const MtmStats& stats, std::uint64_t seed);

/// Best observed edge for a new motif. Ties go to the smaller (src, dst)
/// in dense-id order.
std::pair<EdgeKey, Score> solve_cold(const PredictorState& state, const MtmStats& stats);

struct HotChoice {
    OpenMotifPool::Slot slot = 0;
    EdgeKey pair;
    TypeId source_type = 0;
    TypeId target_type = 0;
    double instance_time = 0.0;
    Score score;
};

/// Best extension of any open instance over the instance's own nodes.
/// Ties go to the more recent instance, then the smaller (src, dst), then
/// the lower slot. nullopt when the pool is empty or every transition has
/// zero prior.
std::optional<HotChoice> solve_hot(const PredictorState& state, const MtmStats& stats, const MotifVocabulary& vocab,
                                   const ScoringOptions& scoring = {});

struct ForecastOptions {
    ScoringOptions scoring;
    /// Reset an edge's waiting time when it is emitted.
    bool update_last_occurrence = true;
};

struct ForecastResult {
    std::vector<Prediction> predictions;
    std::size_t fallback_count = 0;
    /// Steps where the Bernoulli draw selected the cold branch.
    std::size_t drawn_cold = 0;
};

/// Runs n generative steps on `state`.
ForecastResult forecast(PredictorState& state, const MtmStats& stats, const MotifVocabulary& vocab, std::size_t n,
                        const ForecastOptions& options = {});

ForecastResult step_predict(const TemporalGraph& train, const MtmStats& stats, const MotifVocabulary& vocab,
                            std::size_t n, std::uint64_t seed, const ForecastOptions& options = {});

/// CSV `step,src,dst,time,kind,score` with original node ids.
void write_predictions_csv(const std::vector<Prediction>& preds, const TemporalGraph& g, std::ostream& out);

}  // namespace motifcast
