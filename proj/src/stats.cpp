#include "motifcast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace motifcast {

namespace {

std::optional<double> rate(std::size_t count, double first, double last) {
    if (count < 2) return std::nullopt;
    const double span = last - first;
    if (!(span > 0.0)) return std::nullopt;
    return static_cast<double>(count - 1) / span;
}

}  // namespace

std::optional<double> intensity(std::span<const double> timestamps) {
    if (timestamps.size() < 2) return std::nullopt;
    return rate(timestamps.size(), timestamps.front(), timestamps.back());
}

std::optional<double> intensity(std::span<const Timestamp> timestamps) {
    if (timestamps.size() < 2) return std::nullopt;
    return rate(timestamps.size(), static_cast<double>(timestamps.front()), static_cast<double>(timestamps.back()));
}

double compute_delta_c(const TemporalGraph& g) {
    std::optional<Timestamp> best;
    for (NodeId n = 0; n < g.id_space(); ++n) {
        const auto& list = g.node_events(n);
        for (std::size_t i = 1; i < list.size(); ++i) {
            Timestamp gap = g.events()[list[i]].time - g.events()[list[i - 1]].time;
            if (!best || gap > *best) best = gap;
        }
    }
    if (!best) throw DegenerateDataError("delta_c undefined: no node has two incident events");
    return static_cast<double>(*best);
}

std::uint64_t MtmStats::total_transitions() const {
    std::uint64_t total = 0;
    for (auto row : trans_row_total) total += row;
    return total;
}

MtmStats build_stats(const TemporalGraph& train, const MotifVocabulary& vocab, double delta_c,
                     const StatsOptions& options) {
    if (train.empty()) throw std::invalid_argument("build_stats needs a non-empty training graph");
    if (!(delta_c > 0.0)) throw std::invalid_argument("delta_c must be positive");
    if (vocab.ell_max() < 2) throw std::invalid_argument("ell_max must be at least 2");
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");

    MtmStats st;
    st.delta_c = delta_c;
    st.ell_max = vocab.ell_max();
    st.epsilon = options.epsilon;
    st.event_count = train.size();
    st.t_max = static_cast<double>(train.t_max());

    const auto& events = train.events();
    auto global = rate(events.size(), static_cast<double>(events.front().time), static_cast<double>(events.back().time));
    if (!global) throw DegenerateDataError("global intensity undefined: stream spans zero time");
    st.lambda_global = *global;

    const std::size_t types = vocab.size();
    st.trans_row_total.assign(types, 0);
    st.type_observations.assign(types, 0);
    std::vector<double> first_seen(types, 0.0);
    std::vector<double> last_seen(types, 0.0);

    MotifTracker tracker(vocab, delta_c);
    for (const Event& e : events) {
        auto transitions = tracker.observe(e);
        if (transitions.empty()) {
            ++st.cold_count;
            continue;
        }
        const auto t = static_cast<double>(e.time);
        for (const auto& tr : transitions) {
            ++st.trans_count[MtmStats::transition_key(tr.source, tr.target)];
            ++st.trans_row_total[tr.source];
            if (st.type_observations[tr.target]++ == 0) first_seen[tr.target] = t;
            last_seen[tr.target] = t;
        }
    }
    st.p_cold = static_cast<double>(st.cold_count) / static_cast<double>(st.event_count);

    st.lambda_type.assign(types, st.lambda_global);
    for (TypeId t = 0; t < types; ++t) {
        if (auto r = rate(st.type_observations[t], first_seen[t], last_seen[t])) st.lambda_type[t] = *r;
    }

    st.edges.reserve(train.edge_timestamps().size());
    for (const auto& [key, times] : train.edge_timestamps()) {
        EdgeStats es;
        es.key = key;
        es.count = times.size();
        es.lambda = intensity(std::span<const Timestamp>(times)).value_or(st.lambda_global);
        es.last_occurrence = static_cast<double>(times.back());
        st.edges.push_back(es);
    }
    std::sort(st.edges.begin(), st.edges.end(), [](const EdgeStats& a, const EdgeStats& b) { return a.key < b.key; });
    st.edge_index.reserve(st.edges.size());
    for (std::size_t i = 0; i < st.edges.size(); ++i) {
        st.edge_index.emplace(st.edges[i].key, i);
        st.edge_count_total += st.edges[i].count;
    }
    return st;
}

std::vector<bool> classify_cold(const TemporalGraph& g, const MotifVocabulary& vocab, double delta_c) {
    std::vector<bool> cold;
    cold.reserve(g.size());
    MotifTracker tracker(vocab, delta_c);
    for (const Event& e : g.events()) cold.push_back(tracker.observe(e).empty());
    return cold;
}

// ---------------------------------------------------------------------------
// Snapshot I/O

void MtmStats::save(std::ostream& out) const {
    nlohmann::ordered_json j;
    j["format"] = "mtm-stats";
    j["version"] = kFormatVersion;
    j["header"] = {{"ell_max", ell_max},       {"delta_c", delta_c},       {"epsilon", epsilon},
                   {"p_cold", p_cold},         {"lambda_global", lambda_global}, {"t_max", t_max},
                   {"event_count", event_count}, {"cold_count", cold_count}};
    auto edge_rows = nlohmann::json::array();
    for (const auto& e : edges) {
        edge_rows.push_back({e.key.src, e.key.dst, e.count, e.lambda, e.last_occurrence});
    }
    j["edges"] = std::move(edge_rows);

    std::vector<std::pair<std::uint64_t, std::uint64_t>> rows(trans_count.begin(), trans_count.end());
    std::sort(rows.begin(), rows.end());
    auto trans_rows = nlohmann::json::array();
    for (const auto& [key, count] : rows) {
        trans_rows.push_back({key >> 32, key & 0xffffffffULL, count});
    }
    j["transitions"] = std::move(trans_rows);

    auto type_rows = nlohmann::json::array();
    for (std::size_t t = 0; t < lambda_type.size(); ++t) {
        type_rows.push_back({t, lambda_type[t], type_observations[t]});
    }
    j["types"] = std::move(type_rows);
    out << j.dump() << '\n';
}

MtmStats MtmStats::load(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw std::runtime_error(std::string("stats snapshot is not valid JSON: ") + ex.what());
    }
    if (j.value("format", "") != "mtm-stats" || j.value("version", 0) != kFormatVersion) {
        throw std::runtime_error("unsupported stats snapshot format or version");
    }
    MtmStats st;
    const auto& h = j.at("header");
    st.ell_max = h.at("ell_max").get<std::size_t>();
    st.delta_c = h.at("delta_c").get<double>();
    st.epsilon = h.at("epsilon").get<double>();
    st.p_cold = h.at("p_cold").get<double>();
    st.lambda_global = h.at("lambda_global").get<double>();
    st.t_max = h.at("t_max").get<double>();
    st.event_count = h.at("event_count").get<std::size_t>();
    st.cold_count = h.at("cold_count").get<std::size_t>();

    for (const auto& row : j.at("edges")) {
        EdgeStats e;
        e.key = {row.at(0).get<NodeId>(), row.at(1).get<NodeId>()};
        e.count = row.at(2).get<std::uint64_t>();
        e.lambda = row.at(3).get<double>();
        e.last_occurrence = row.at(4).get<double>();
        st.edge_index.emplace(e.key, st.edges.size());
        st.edge_count_total += e.count;
        st.edges.push_back(e);
    }
    const auto& types = j.at("types");
    st.lambda_type.assign(types.size(), st.lambda_global);
    st.type_observations.assign(types.size(), 0);
    st.trans_row_total.assign(types.size(), 0);
    for (const auto& row : types) {
        auto t = row.at(0).get<std::size_t>();
        if (t >= types.size()) throw std::runtime_error("type index out of range in snapshot");
        st.lambda_type[t] = row.at(1).get<double>();
        st.type_observations[t] = row.at(2).get<std::uint64_t>();
    }
    for (const auto& row : j.at("transitions")) {
        auto r = row.at(0).get<TypeId>();
        auto s = row.at(1).get<TypeId>();
        auto c = row.at(2).get<std::uint64_t>();
        if (r >= types.size() || s >= types.size()) throw std::runtime_error("transition index out of range");
        st.trans_count[transition_key(r, s)] = c;
        st.trans_row_total[r] += c;
    }
    return st;
}

}  // namespace motifcast
