#include "motifcast/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "motifcast/scoring.hpp"

namespace motifcast {

FeatureMatrix build_feature_matrix(const TemporalGraph& g, const MtmStats& stats, const MotifVocabulary& vocab,
                                   FeatureIndexing indexing, const std::string& vocab_ref) {
    FeatureMatrix fm;
    fm.rows = g.size();
    fm.cols = vocab.size();
    fm.vocab_ref = vocab_ref;

    MotifTracker tracker(vocab, stats.delta_c);
    std::vector<double> scores;
    std::map<std::size_t, double> row;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto transitions = tracker.observe(g.events()[i]);
        if (transitions.empty()) continue;

        scores.clear();
        double top = -std::numeric_limits<double>::infinity();
        for (const auto& tr : transitions) {
            Score s = hot_log_posterior(tr.source, tr.target, tr.waiting, stats, vocab);
            scores.push_back(s.log_posterior);
            if (s.feasible) top = std::max(top, s.log_posterior);
        }
        // Every candidate has zero prior: nothing to normalize.
        if (!std::isfinite(top)) continue;

        double denom = 0.0;
        for (double s : scores) {
            if (std::isfinite(s)) denom += std::exp(s - top);
        }
        row.clear();
        for (std::size_t k = 0; k < transitions.size(); ++k) {
            if (!std::isfinite(scores[k])) continue;
            const double p = std::exp(scores[k] - top) / denom;
            if (p <= 0.0) continue;
            const TypeId col = indexing == FeatureIndexing::source ? transitions[k].source : transitions[k].target;
            row[col] += p;
        }
        for (const auto& [col, value] : row) fm.entries.push_back({i, col, std::min(value, 1.0)});
    }
    return fm;
}

namespace {

void emit(std::ostream& out, const std::string& text, std::size_t& written) {
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("feature export write failed", written);
    written += text.size();
}

}  // namespace

std::size_t export_sparse(const FeatureMatrix& m, std::ostream& out) {
    std::size_t written = 0;
    emit(out, "#" + std::to_string(m.rows) + ' ' + std::to_string(m.cols) + ' ' + m.vocab_ref + '\n', written);
    char buf[96];
    for (const auto& e : m.entries) {
        int len = std::snprintf(buf, sizeof buf, "%zu %zu %.9g\n", e.row, e.col, e.value);
        emit(out, std::string(buf, static_cast<std::size_t>(len)), written);
    }
    out.flush();
    if (!out) throw IoError("feature export flush failed", written);
    return written;
}

FeatureMatrix parse_sparse(std::istream& in) {
    FeatureMatrix m;
    std::string header;
    if (!std::getline(in, header) || header.empty() || header[0] != '#') {
        throw std::runtime_error("feature file lacks a '#rows cols vocab_ref' header");
    }
    std::istringstream hs(header.substr(1));
    if (!(hs >> m.rows >> m.cols)) throw std::runtime_error("malformed feature header");
    hs >> m.vocab_ref;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        FeatureEntry e;
        if (!(ls >> e.row >> e.col >> e.value)) throw std::runtime_error("malformed feature line: " + line);
        m.entries.push_back(e);
    }
    return m;
}

std::size_t export_dense_csv(const FeatureMatrix& m, std::ostream& out, std::size_t max_rows) {
    if (m.rows > max_rows) {
        throw std::invalid_argument("dense export refused: " + std::to_string(m.rows) + " rows exceeds limit " +
                                    std::to_string(max_rows));
    }
    std::size_t written = 0;
    std::string header;
    for (std::size_t c = 0; c < m.cols; ++c) {
        if (c) header += ',';
        header += "m" + std::to_string(c);
    }
    emit(out, header + '\n', written);
    std::vector<double> dense(m.cols);
    std::size_t next = 0;
    char buf[32];
    for (std::size_t r = 0; r < m.rows; ++r) {
        std::fill(dense.begin(), dense.end(), 0.0);
        while (next < m.entries.size() && m.entries[next].row == r) {
            dense[m.entries[next].col] = m.entries[next].value;
            ++next;
        }
        std::string line;
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (c) line += ',';
            if (dense[c] == 0.0) {
                line += '0';
            } else {
                std::snprintf(buf, sizeof buf, "%.9g", dense[c]);
                line += buf;
            }
        }
        emit(out, line + '\n', written);
    }
    return written;
}

}  // namespace motifcast
