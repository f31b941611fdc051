#pragma once

// Small helpers shared by the test binaries.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "motifcast/ingest.hpp"
#include "oracles.hpp"

namespace testing_support {

/// Renames nodes in order of first appearance so the ids the parser
/// assigns coincide with the oracle's raw ids.
inline std::vector<oracle::Ev> relabel(std::vector<oracle::Ev> E) {
    std::map<std::uint32_t, std::uint32_t> ids;
    auto id = [&](std::uint32_t n) {
        auto [it, fresh] = ids.try_emplace(n, static_cast<std::uint32_t>(ids.size()));
        return it->second;
    };
    for (auto& e : E) {
        e.u = id(e.u);
        e.v = id(e.v);
    }
    return E;
}

inline motifcast::TemporalGraph graph_text(const std::string& text) {
    std::istringstream in(text);
    return motifcast::parse_events(in);
}

inline motifcast::TemporalGraph graph_of(const std::vector<oracle::Ev>& E) {
    std::string text;
    for (const auto& e : E) text += std::to_string(e.u) + " " + std::to_string(e.v) + " " + std::to_string(e.t) + "\n";
    return graph_text(text);
}

}  // namespace testing_support
