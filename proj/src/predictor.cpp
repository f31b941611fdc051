#include "motifcast/predictor.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace motifcast {

double sample_exponential(double lambda, Rng& rng) {
    if (!(lambda > 0.0)) throw std::invalid_argument("exponential rate must be positive");
    return -std::log(rng.uniform_open_closed()) / lambda;
}

double PredictorState::last_occurrence(EdgeKey k, const MtmStats& stats) const {
    if (auto it = stats.edge_index.find(k); it != stats.edge_index.end()) return edge_last[it->second];
    if (auto it = unseen_last.find(k); it != unseen_last.end()) return it->second;
    return 0.0;
}

OpenMotifPool replay_open_pool(const TemporalGraph& train, const MotifVocabulary& vocab, double delta_c) {
    MotifTracker tracker(vocab, delta_c);
    for (const Event& e : train.events()) tracker.observe(e);
    if (!train.empty()) tracker.pool().prune(static_cast<double>(train.t_max()), delta_c);
    return std::move(tracker).take_pool();
}

PredictorState init_state(OpenMotifPool pool, const MtmStats& stats, std::uint64_t seed) {
    if (stats.edges.empty()) throw DegenerateDataError("no observed edges to forecast from");
    PredictorState st{std::move(pool), stats.t_max, {}, {}, Rng(seed), 0};
    st.edge_last.reserve(stats.edges.size());
    for (const auto& e : stats.edges) st.edge_last.push_back(e.last_occurrence);
    st.initial_pool_size = st.pool.size();
    return st;
}

PredictorState init_state(const TemporalGraph& train, const MtmStats& stats, const MotifVocabulary& vocab,
                          std::uint64_t seed) {
    return init_state(replay_open_pool(train, vocab, stats.delta_c), stats, seed);
}

std::pair<EdgeKey, Score> solve_cold(const PredictorState& state, const MtmStats& stats) {
    if (stats.edges.empty()) throw DegenerateDataError("no observed edges");
    std::size_t best = 0;
    Score best_score = Score::impossible(EventKind::cold);
    const double total = static_cast<double>(stats.edge_count_total);
    for (std::size_t i = 0; i < stats.edges.size(); ++i) {
        const EdgeStats& e = stats.edges[i];
        const double dt = state.now - state.edge_last[i];
        // Same terms as cold_log_posterior without the per-edge hash lookup.
        const double value = log_waiting_likelihood(e.lambda, dt, stats.epsilon) +
                             std::log(static_cast<double>(e.count) / total);
        if (!best_score.feasible || value > best_score.log_posterior) {
            best = i;
            best_score = Score::of(value, EventKind::cold);
        }
    }
    return {stats.edges[best].key, best_score};
}

std::optional<HotChoice> solve_hot(const PredictorState& state, const MtmStats& stats, const MotifVocabulary& vocab,
                                   const ScoringOptions& scoring) {
    std::optional<HotChoice> best;
    auto better = [](const HotChoice& c, const HotChoice& b) {
        if (c.score.log_posterior != b.score.log_posterior) return c.score.log_posterior > b.score.log_posterior;
        if (c.instance_time != b.instance_time) return c.instance_time > b.instance_time;
        return c.pair < b.pair;
    };
    state.pool.for_each([&](OpenMotifPool::Slot slot, const MotifInstance& m) {
        if (m.size() >= vocab.ell_max()) return;
        const double dt = state.now - m.last_time();
        auto nodes = m.nodes();
        for (std::size_t a = 0; a < nodes.size(); ++a) {
            for (std::size_t b = 0; b < nodes.size(); ++b) {
                if (a == b) continue;
                auto target = vocab.child(m.type(), static_cast<Label>(a), static_cast<Label>(b));
                if (!target) continue;
                Score s = hot_log_posterior(m.type(), *target, dt, stats, vocab, scoring);
                if (!s.feasible) continue;
                HotChoice c{slot, EdgeKey{nodes[a], nodes[b]}, m.type(), *target, m.last_time(), s};
                if (!best || better(c, *best)) best = c;
            }
        }
    });
    return best;
}

namespace {

void touch_edge(PredictorState& state, const MtmStats& stats, EdgeKey k, double when) {
    if (auto it = stats.edge_index.find(k); it != stats.edge_index.end()) {
        state.edge_last[it->second] = when;
    } else {
        state.unseen_last[k] = when;
    }
}

}  // namespace

ForecastResult forecast(PredictorState& state, const MtmStats& stats, const MotifVocabulary& vocab, std::size_t n,
                        const ForecastOptions& options) {
    if (stats.edges.empty()) throw DegenerateDataError("no observed edges to forecast from");
    if (state.edge_last.size() != stats.edges.size()) throw std::invalid_argument("state does not match stats");
    ForecastResult out;
    out.predictions.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        state.now += sample_exponential(stats.lambda_global, state.rng);
        state.pool.prune(state.now, stats.delta_c);
        const bool cold = state.rng.uniform_closed_open() < stats.p_cold;

        Prediction p;
        p.step = step;
        p.time = state.now;
        std::optional<HotChoice> hot;
        if (cold) {
            ++out.drawn_cold;
        } else {
            hot = solve_hot(state, stats, vocab, options.scoring);
            if (!hot) {
                p.fallback = true;
                ++out.fallback_count;
            }
        }

        if (hot) {
            const MotifInstance& m = state.pool.at(hot->slot);
            state.pool.replace(hot->slot, extend(vocab, m, hot->pair.src, hot->pair.dst, state.now));
            p.src = hot->pair.src;
            p.dst = hot->pair.dst;
            p.kind = EventKind::hot;
            p.source_type = hot->source_type;
            p.target_type = hot->target_type;
            p.score = hot->score.log_posterior;
        } else {
            auto [edge, score] = solve_cold(state, stats);
            state.pool.insert(MotifInstance::single(edge.src, edge.dst, state.now));
            p.src = edge.src;
            p.dst = edge.dst;
            p.kind = EventKind::cold;
            p.score = score.log_posterior;
        }
        if (options.update_last_occurrence) touch_edge(state, stats, EdgeKey{p.src, p.dst}, state.now);
        out.predictions.push_back(p);
    }
    return out;
}

ForecastResult step_predict(const TemporalGraph& train, const MtmStats& stats, const MotifVocabulary& vocab,
                            std::size_t n, std::uint64_t seed, const ForecastOptions& options) {
    if (n < 1) throw std::invalid_argument("prediction count must be at least 1");
    PredictorState state = init_state(train, stats, vocab, seed);
    return forecast(state, stats, vocab, n, options);
}

void write_predictions_csv(const std::vector<Prediction>& preds, const TemporalGraph& g, std::ostream& out) {
    out << "step,src,dst,time,kind,score\n";
    char buf[64];
    for (const auto& p : preds) {
        out << p.step << ',' << g.original_id(p.src) << ',' << g.original_id(p.dst) << ',';
        std::snprintf(buf, sizeof buf, "%.6f", p.time);
        out << buf << ',' << to_string(p.kind) << ',';
        std::snprintf(buf, sizeof buf, "%.9g", p.score);
        out << buf << '\n';
    }
}

}  // namespace motifcast
