#include "motifcast/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "json.hpp"

namespace motifcast {

namespace {

const std::vector<std::size_t> kNoEvents;

bool is_separator(char c) {
    return c == ' ' || c == '\t' || c == ',' || c == '\r';
}

// Splits on runs of separators; returns number of fields found (up to 4).
std::size_t split_fields(std::string_view line, std::string_view (&out)[4]) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_separator(line[i])) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && !is_separator(line[j])) ++j;
        if (n == 4) return 5;
        out[n++] = line.substr(i, j - i);
        i = j;
    }
    return n;
}

std::int64_t parse_field(std::string_view f, std::size_t line_no, const char* name) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(line_no, std::string("field '") + name + "' is not an integer: '" + std::string(f) + "'");
    }
    if (v < 0) {
        throw ParseError(line_no, std::string("field '") + name + "' is negative");
    }
    return v;
}

}  // namespace

TemporalGraph::TemporalGraph(std::vector<Event> events,
                             std::shared_ptr<const std::vector<std::int64_t>> original_ids,
                             std::size_t dropped_self_loops)
    : events_(std::move(events)),
      original_ids_(std::move(original_ids)),
      dropped_self_loops_(dropped_self_loops) {
    if (!original_ids_) original_ids_ = std::make_shared<const std::vector<std::int64_t>>();
    node_events_.resize(original_ids_->size());
    for (std::size_t i = 0; i < events_.size(); ++i) {
        Event& e = events_[i];
        e.seq = i;
        edge_timestamps_[EdgeKey{e.src, e.dst}].push_back(e.time);
        node_events_[e.src].push_back(i);
        node_events_[e.dst].push_back(i);
    }
    for (const auto& list : node_events_) {
        if (!list.empty()) ++node_count_;
    }
}

const std::vector<std::size_t>& TemporalGraph::node_events(NodeId n) const {
    if (n >= node_events_.size()) return kNoEvents;
    return node_events_[n];
}

TemporalGraph parse_events(std::istream& in) {
    struct Raw {
        std::int64_t src, dst, time;
    };
    std::vector<Raw> raw;
    std::size_t dropped = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        std::size_t first = view.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        if (view[first] == '#' || view[first] == '%') continue;
        std::string_view fields[4];
        std::size_t n = split_fields(view, fields);
        if (n != 3) {
            throw ParseError(line_no, "expected 3 fields <src> <dst> <time>, got " + std::to_string(n > 4 ? 5 : n) +
                                          (n > 3 ? "+" : ""));
        }
        Raw r{parse_field(fields[0], line_no, "src"), parse_field(fields[1], line_no, "dst"),
              parse_field(fields[2], line_no, "time")};
        if (r.src == r.dst) {
            ++dropped;
            continue;
        }
        raw.push_back(r);
    }
    if (in.bad()) throw ParseError(line_no, "read failure");
    if (raw.empty()) throw ParseError(0, "no events in input");

    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.time < b.time; });

    auto ids = std::make_shared<std::vector<std::int64_t>>();
    std::unordered_map<std::int64_t, NodeId> remap;
    remap.reserve(raw.size() / 2 + 16);
    auto dense = [&](std::int64_t original) {
        auto [it, inserted] = remap.try_emplace(original, static_cast<NodeId>(ids->size()));
        if (inserted) ids->push_back(original);
        return it->second;
    };
    std::vector<Event> events;
    events.reserve(raw.size());
    for (const Raw& r : raw) {
        Event e;
        e.src = dense(r.src);
        e.dst = dense(r.dst);
        e.time = r.time;
        events.push_back(e);
    }
    return TemporalGraph(std::move(events), std::move(ids), dropped);
}

TemporalGraph parse_events_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    return parse_events(in);
}

void write_events(const TemporalGraph& g, std::ostream& out) {
    for (const Event& e : g.events()) {
        out << g.original_id(e.src) << ' ' << g.original_id(e.dst) << ' ' << e.time << '\n';
    }
}

std::pair<TemporalGraph, TemporalGraph> chronological_split(const TemporalGraph& g, double test_ratio) {
    if (!(test_ratio > 0.0 && test_ratio < 1.0)) {
        throw std::invalid_argument("test_ratio must lie in (0, 1)");
    }
    if (g.empty()) throw std::invalid_argument("cannot split an empty graph");
    const std::size_t n = g.size();
    // The 1e-9 slack keeps products such as 0.2 * 10 from rounding up past 2.
    auto test_n = static_cast<std::size_t>(std::ceil(test_ratio * static_cast<double>(n) - 1e-9));
    test_n = std::clamp<std::size_t>(test_n, n > 1 ? 1 : 0, n - 1);

    const auto& ev = g.events();
    std::vector<Event> train(ev.begin(), ev.end() - static_cast<std::ptrdiff_t>(test_n));
    std::vector<Event> test(ev.end() - static_cast<std::ptrdiff_t>(test_n), ev.end());
    return {TemporalGraph(std::move(train), g.id_table()), TemporalGraph(std::move(test), g.id_table())};
}

SummaryStats summary_stats(const TemporalGraph& g) {
    SummaryStats s;
    s.nodes = g.node_count();
    s.events = g.size();
    s.static_edges = g.edge_timestamps().size();
    if (!g.empty()) {
        double days = static_cast<double>(g.t_max() - g.t_min()) / 86400.0;
        s.timespan_days = std::llround(days);
    }
    return s;
}

std::string to_json(const SummaryStats& s) {
    nlohmann::ordered_json j;
    j["nodes"] = s.nodes;
    j["events"] = s.events;
    j["static_edges"] = s.static_edges;
    j["timespan_days"] = s.timespan_days;
    return j.dump();
}

}  // namespace motifcast
