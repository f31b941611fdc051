#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <streambuf>

#include "doctest.h"
#include "motifcast/features.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace motifcast;

namespace {

// Accepts `limit` bytes, then fails every write.
class ShortBuf : public std::streambuf {
public:
    explicit ShortBuf(std::size_t limit) : limit_(limit) {}
    std::string data;

protected:
    int_type overflow(int_type ch) override {
        if (ch == traits_type::eof()) return traits_type::not_eof(ch);
        if (data.size() >= limit_) return traits_type::eof();
        data.push_back(static_cast<char>(ch));
        return ch;
    }
    std::streamsize xsputn(const char* s, std::streamsize n) override {
        std::streamsize k = 0;
        while (k < n && overflow(traits_type::to_int_type(s[k])) != traits_type::eof()) ++k;
        return k;
    }

private:
    std::size_t limit_;
};

std::map<std::size_t, std::map<std::string, double>> named_rows(const FeatureMatrix& m, const MotifVocabulary& vocab) {
    std::map<std::size_t, std::map<std::string, double>> out;
    for (const auto& e : m.entries) out[e.row][vocab.code(static_cast<TypeId>(e.col)).to_string()] = e.value;
    return out;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("cold events give zero rows, a lone candidate gives 1") {
    MotifVocabulary vocab(3);
    auto g = testing_support::graph_text("1 2 0\n2 3 1\n7 8 50\n");
    auto s = build_stats(g, vocab, 5);
    auto m = build_feature_matrix(g, s, vocab);
    CHECK(m.rows == 3);
    CHECK(m.cols == vocab.size());
    REQUIRE(m.entries.size() == 1);
    CHECK(m.entries[0].row == 1);
    CHECK(m.entries[0].col == 0);
    CHECK(m.entries[0].value == 1.0);

    auto t = build_feature_matrix(g, s, vocab, FeatureIndexing::target);
    REQUIRE(t.entries.size() == 1);
    CHECK(vocab.code(static_cast<TypeId>(t.entries[0].col)).to_string() == "0>1,1>2");
}

TEST_CASE("oracle: matrix equals per-event recomputation on 200+ random streams") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> dcs(1, 12), lm(2, 4);
    std::size_t nonzero_rows = 0;
    for (int trial = 0; trial < 250; ++trial) {
        auto E = testing_support::relabel(oracle::random_stream(rng, 30));
        const double dc = dcs(rng);
        const std::size_t lmax = static_cast<std::size_t>(lm(rng));
        MotifVocabulary vocab(lmax);
        auto g = testing_support::graph_of(E);
        auto s = build_stats(g, vocab, dc);
        auto o = oracle::quadratic_stats(E, dc, lmax);

        for (bool by_target : {false, true}) {
            auto m = build_feature_matrix(g, s, vocab, by_target ? FeatureIndexing::target : FeatureIndexing::source);
            auto want = oracle::feature_rows(E, o, by_target);
            auto got = named_rows(m, vocab);
            for (std::size_t i = 0; i < E.size(); ++i) {
                const auto& w = want[i];
                auto it = got.find(i);
                const std::map<std::string, double> empty;
                const auto& h = it == got.end() ? empty : it->second;
                REQUIRE(h.size() == w.size());
                for (const auto& [code, value] : w) {
                    REQUIRE(h.count(code));
                    CHECK(std::abs(h.at(code) - value) <= 1e-9);
                }
            }
            // Row sums, value range, unique sorted cells.
            std::map<std::size_t, double> sums;
            for (std::size_t k = 0; k < m.entries.size(); ++k) {
                const auto& e = m.entries[k];
                CHECK(e.value > 0.0);
                CHECK(e.value <= 1.0);
                sums[e.row] += e.value;
                if (k) CHECK(std::pair(m.entries[k - 1].row, m.entries[k - 1].col) < std::pair(e.row, e.col));
                if (!by_target) CHECK(vocab.type_size(static_cast<TypeId>(e.col)) < lmax);
            }
            for (const auto& [row, sum] : sums) CHECK(std::abs(sum - 1.0) <= 1e-9);
            nonzero_rows += sums.size();

            // A row is empty exactly when the stats pass calls the event cold.
            auto cold = classify_cold(g, vocab, dc);
            for (std::size_t i = 0; i < E.size(); ++i) CHECK(cold[i] == (sums.count(i) == 0));
        }
    }
    CHECK(nonzero_rows > 1000);
}

TEST_CASE("sparse export format") {
    FeatureMatrix empty{4, 67, {}, "vocab.tsv"};
    std::ostringstream a;
    const auto bytes = export_sparse(empty, a);
    CHECK(bytes == a.str().size());
    CHECK(a.str() == "#4 67 vocab.tsv\n");

    FeatureMatrix one{4, 67, {{2, 5, 0.25}}, "vocab.tsv"};
    std::ostringstream b;
    export_sparse(one, b);
    CHECK(b.str() == "#4 67 vocab.tsv\n2 5 0.25\n");
}

TEST_CASE("export then parse round-trips") {
    std::mt19937_64 rng(12);
    MotifVocabulary vocab(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = testing_support::graph_of(testing_support::relabel(oracle::random_stream(rng, 30)));
        auto s = build_stats(g, vocab, 6);
        auto m = build_feature_matrix(g, s, vocab);
        std::stringstream io;
        const auto bytes = export_sparse(m, io);
        CHECK(bytes == io.str().size());
        auto back = parse_sparse(io);
        CHECK(back.rows == m.rows);
        CHECK(back.cols == m.cols);
        CHECK(back.vocab_ref == m.vocab_ref);
        REQUIRE(back.entries.size() == m.entries.size());
        for (std::size_t i = 0; i < m.entries.size(); ++i) {
            CHECK(back.entries[i].row == m.entries[i].row);
            CHECK(back.entries[i].col == m.entries[i].col);
            CHECK(std::abs(back.entries[i].value - m.entries[i].value) <= 1e-9);
        }
    }
    std::istringstream bad("no header\n");
    CHECK_THROWS(parse_sparse(bad));
}

TEST_CASE("write failure reports partial progress") {
    FeatureMatrix m{3, 67, {{0, 1, 0.5}, {0, 2, 0.5}, {2, 0, 1.0}}, "v.tsv"};
    // Room for the header, one line and part of the next.
    ShortBuf buf(23);
    std::ostream out(&buf);
    try {
        export_sparse(m, out);
        FAIL("expected an IoError");
    } catch (const IoError& e) {
        CHECK(e.bytes_written() == std::string("#3 67 v.tsv\n0 1 0.5\n").size());
    }
}

TEST_CASE("dense export") {
    FeatureMatrix m{3, 3, {{0, 1, 0.5}, {0, 2, 0.5}, {2, 0, 1.0}}, "v.tsv"};
    std::ostringstream out;
    export_dense_csv(m, out, 10);
    CHECK(out.str() == "m0,m1,m2\n0,0.5,0.5\n0,0,0\n1,0,0\n");
    std::ostringstream refused;
    CHECK_THROWS_AS(export_dense_csv(m, refused, 2), std::invalid_argument);
    CHECK(refused.str().empty());
}

}  // TEST_SUITE
