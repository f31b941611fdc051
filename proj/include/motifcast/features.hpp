#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "motifcast/ingest.hpp"
#include "motifcast/motif.hpp"
#include "motifcast/stats.hpp"

namespace motifcast {

/// Which type of a transition m -> m' labels the feature column.
enum class FeatureIndexing { source, target };

struct FeatureEntry {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Sparse |E| x |M| matrix of normalized transition posteriors. Entries
/// are sorted by (row, col); cold events have no entries.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<FeatureEntry> entries;
    std::string vocab_ref;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, std::size_t bytes_written)
        : std::runtime_error(what + " after " + std::to_string(bytes_written) + " bytes"), bytes_(bytes_written) {}
    std::size_t bytes_written() const { return bytes_; }

private:
    std::size_t bytes_;
};

/// Replays g against an initially empty pool. For every event the eligible
/// open instances are scored with the hot-transition posterior, normalized
/// over the candidates and summed into the column of each instance's type.
FeatureMatrix build_feature_matrix(const TemporalGraph& g, const MtmStats& stats, const MotifVocabulary& vocab,
                                   FeatureIndexing indexing = FeatureIndexing::source,
                                   const std::string& vocab_ref = "vocabulary.tsv");

/// Header `#rows cols vocab_ref`, then `row col value` lines with 9
/// significant digits. Returns bytes written; throws IoError on failure.
std::size_t export_sparse(const FeatureMatrix& m, std::ostream& out);
FeatureMatrix parse_sparse(std::istream& in);

/// One CSV line per event with |M| columns. Refuses matrices with more
/// than max_rows rows.
std::size_t export_dense_csv(const FeatureMatrix& m, std::ostream& out, std::size_t max_rows);

}  // namespace motifcast
