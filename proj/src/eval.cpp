#include "motifcast/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace motifcast {

namespace {

std::unordered_set<std::uint64_t> pair_set(const TemporalGraph& g) {
    std::unordered_set<std::uint64_t> pairs;
    pairs.reserve(g.edge_timestamps().size());
    for (const auto& [key, times] : g.edge_timestamps()) pairs.insert(key.packed());
    return pairs;
}

// Runs task(i) for i in [0, n) on up to `threads` workers. The first
// exception thrown by any task is rethrown after all workers join.
template <class Task>
void parallel_for(std::size_t n, std::size_t threads, Task task) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    workers.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

double precision_at_k(std::span<const Prediction> preds, const TemporalGraph& test) {
    if (preds.empty()) throw std::invalid_argument("precision needs at least one prediction");
    if (test.empty()) throw std::invalid_argument("precision needs a non-empty test stream");
    const auto pairs = pair_set(test);
    std::size_t hits = 0;
    for (const auto& p : preds) hits += pairs.count(EdgeKey{p.src, p.dst}.packed());
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double repeated_event_ratio(const TemporalGraph& train, const TemporalGraph& test) {
    if (train.empty() || test.empty()) throw std::invalid_argument("RER needs non-empty train and test streams");
    const auto& seen = train.edge_timestamps();
    std::size_t repeated = 0;
    for (const Event& e : test.events()) repeated += seen.count(EdgeKey{e.src, e.dst});
    return static_cast<double>(repeated) / static_cast<double>(test.size());
}

double entropy_of_counts(std::span<const std::uint64_t> counts) {
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
    }
    return std::max(0.0, h);
}

double node_entropy(const TemporalGraph& train) {
    if (train.empty()) throw std::invalid_argument("node entropy needs a non-empty stream");
    std::unordered_map<NodeId, std::vector<std::uint64_t>> targets;
    for (const auto& [key, times] : train.edge_timestamps()) targets[key.src].push_back(times.size());
    // Sum in node order so the result does not depend on hash iteration.
    std::vector<std::pair<NodeId, double>> per_node;
    per_node.reserve(targets.size());
    for (auto& [node, counts] : targets) {
        std::sort(counts.begin(), counts.end());
        per_node.emplace_back(node, entropy_of_counts(counts));
    }
    std::sort(per_node.begin(), per_node.end());
    double sum = 0.0;
    for (const auto& [node, h] : per_node) sum += h;
    return sum / static_cast<double>(per_node.size());
}

double motif_transition_entropy(const MtmStats& stats) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rows(stats.trans_count.begin(), stats.trans_count.end());
    std::sort(rows.begin(), rows.end());
    std::vector<std::uint64_t> counts;
    counts.reserve(rows.size());
    for (const auto& [key, c] : rows) counts.push_back(c);
    if (counts.empty() || std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; })) {
        throw DegenerateDataError("no motif transitions observed");
    }
    return entropy_of_counts(counts);
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["k"] = k;
    j["test_ratio"] = test_ratio;
    j["precision"] = precision;
    j["rer"] = rer;
    j["node_entropy"] = node_entropy;
    j["motif_transition_entropy"] = motif_transition_entropy;
    j["fallback_count"] = fallback_count;
    j["seed"] = seed;
    return j.dump();
}

void CurveTable::write_csv(std::ostream& out) const {
    out << "k,test_ratio,seed,precision,fallbacks\n";
    char buf[160];
    std::size_t r = 0;
    for (const auto& m : means) {
        while (r < rows.size() && rows[r].k == m.k && rows[r].test_ratio == m.test_ratio) {
            const auto& row = rows[r++];
            std::snprintf(buf, sizeof buf, "%zu,%.6g,%llu,%.6f,%zu\n", row.k, row.test_ratio,
                          static_cast<unsigned long long>(row.seed), row.precision, row.fallbacks);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%zu,%.6g,mean,%.6f,%.3f\n", m.k, m.test_ratio, m.mean_precision,
                      m.mean_fallbacks);
        out << buf;
    }
}

CurveTable sweep_k(const TemporalGraph& g, std::span<const double> test_ratios, std::span<const std::size_t> ks,
                   std::span<const std::uint64_t> seeds, const ModelConfig& config, std::size_t threads) {
    if (test_ratios.empty() || ks.empty() || seeds.empty()) throw std::invalid_argument("sweep needs non-empty lists");
    if (std::any_of(ks.begin(), ks.end(), [](std::size_t k) { return k == 0; })) {
        throw std::invalid_argument("prediction counts must be positive");
    }
    const std::size_t k_max = *std::max_element(ks.begin(), ks.end());
    const MotifVocabulary vocab(config.ell_max);

    struct Fitted {
        TemporalGraph train, test;
        MtmStats stats;
        OpenMotifPool pool{1};
    };
    std::vector<Fitted> fitted(test_ratios.size());
    parallel_for(test_ratios.size(), threads, [&](std::size_t i) {
        auto [train, test] = chronological_split(g, test_ratios[i]);
        const double delta_c = config.delta_c ? *config.delta_c : compute_delta_c(train);
        MtmStats stats = build_stats(train, vocab, delta_c, StatsOptions{config.epsilon});
        OpenMotifPool pool = replay_open_pool(train, vocab, delta_c);
        fitted[i] = Fitted{std::move(train), std::move(test), std::move(stats), std::move(pool)};
    });

    // One forecast of k_max events per (ratio, seed); every k scores a prefix.
    std::vector<ForecastResult> runs(test_ratios.size() * seeds.size());
    parallel_for(runs.size(), threads, [&](std::size_t cell) {
        const Fitted& f = fitted[cell / seeds.size()];
        PredictorState state = init_state(f.pool, f.stats, seeds[cell % seeds.size()]);
        runs[cell] = forecast(state, f.stats, vocab, k_max, config.forecast);
    });

    std::vector<std::size_t> sorted_ks(ks.begin(), ks.end());
    std::sort(sorted_ks.begin(), sorted_ks.end());
    sorted_ks.erase(std::unique(sorted_ks.begin(), sorted_ks.end()), sorted_ks.end());
    std::vector<std::size_t> ratio_order(test_ratios.size());
    for (std::size_t i = 0; i < ratio_order.size(); ++i) ratio_order[i] = i;
    std::stable_sort(ratio_order.begin(), ratio_order.end(),
                     [&](std::size_t a, std::size_t b) { return test_ratios[a] < test_ratios[b]; });

    CurveTable table;
    for (std::size_t ri : ratio_order) {
        for (std::size_t k : sorted_ks) {
            CurveSummary summary{k, test_ratios[ri], 0.0, 0.0};
            for (std::size_t si = 0; si < seeds.size(); ++si) {
                const ForecastResult& run = runs[ri * seeds.size() + si];
                std::span<const Prediction> prefix(run.predictions.data(), k);
                std::size_t fallbacks = 0;
                for (const auto& p : prefix) fallbacks += p.fallback ? 1 : 0;
                CurveRow row{k, test_ratios[ri], seeds[si], precision_at_k(prefix, fitted[ri].test), fallbacks};
                summary.mean_precision += row.precision;
                summary.mean_fallbacks += static_cast<double>(fallbacks);
                table.rows.push_back(row);
            }
            summary.mean_precision /= static_cast<double>(seeds.size());
            summary.mean_fallbacks /= static_cast<double>(seeds.size());
            table.means.push_back(summary);
        }
    }
    return table;
}

}  // namespace motifcast
