#pragma once

#include <limits>

#include "motifcast/ingest.hpp"
#include "motifcast/motif.hpp"
#include "motifcast/stats.hpp"

namespace motifcast {

enum class EventKind { cold, hot };

inline const char* to_string(EventKind k) { return k == EventKind::cold ? "cold" : "hot"; }

/// Unnormalized log-posterior. An infeasible score (zero prior) never wins
/// an argmax and never carries NaN.
struct Score {
    double log_posterior = -std::numeric_limits<double>::infinity();
    EventKind kind = EventKind::cold;
    bool feasible = false;

    static Score impossible(EventKind kind) { return Score{-std::numeric_limits<double>::infinity(), kind, false}; }
    static Score of(double value, EventKind kind) { return Score{value, kind, true}; }
};

/// log of the exponential(lambda) mass on [max(0, dt - eps), dt + eps].
/// Throws std::invalid_argument for lambda <= 0 or eps <= 0.
double log_waiting_likelihood(double lambda, double dt, double eps);

struct ScoringOptions {
    /// Additive smoothing on the transition prior; 0 keeps the raw
    /// empirical ratio and makes unseen transitions impossible.
    double laplace_alpha = 0.0;
};

/// Waiting-time likelihood under the edge rate plus log(C_e / sum C).
/// Throws std::domain_error when e was never observed.
Score cold_log_posterior(EdgeKey e, double dt, const MtmStats& stats);

/// Waiting-time likelihood under the target-type rate plus
/// log(C(r->s) / sum_t C(r->t)).
Score hot_log_posterior(TypeId source, TypeId target, double dt, const MtmStats& stats,
                        const MotifVocabulary& vocab, const ScoringOptions& options = {});

}  // namespace motifcast
