#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "motifcast/predictor.hpp"
#include "motifcast/stats.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace motifcast;

namespace {

struct Fixture {
    std::vector<oracle::Ev> E;
    TemporalGraph g;
    double dc = 0;
};

// Random stream with a defined delta_c, relabeled so dense ids equal raw ids.
Fixture random_fixture(std::mt19937_64& rng, std::size_t max_events = 30) {
    while (true) {
        Fixture f;
        f.E = testing_support::relabel(oracle::random_stream(rng, max_events));
        f.g = testing_support::graph_of(f.E);
        try {
            f.dc = compute_delta_c(f.g);
        } catch (const DegenerateDataError&) {
            continue;
        }
        return f;
    }
}

std::vector<std::uint32_t> nodes_in_order(const oracle::Pattern& p) {
    std::vector<std::uint32_t> out;
    for (auto [a, b] : p) {
        for (auto n : {a, b}) {
            if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("predictor") {

TEST_CASE("rng ranges and exponential sampling") {
    Rng rng(42);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform_open_closed();
        CHECK_FALSE((u <= 0.0 || u > 1.0));
        const double v = rng.uniform_closed_open();
        CHECK_FALSE((v < 0.0 || v >= 1.0));
    }
    Rng r2(7);
    for (int i = 0; i < 100000; ++i) sum += sample_exponential(2.0, r2);
    CHECK(std::abs(sum / 100000 - 0.5) <= 0.01);
    CHECK_THROWS_AS(sample_exponential(0.0, r2), std::invalid_argument);
    CHECK_THROWS_AS(sample_exponential(-1.0, r2), std::invalid_argument);

    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(sample_exponential(0.3, a) == sample_exponential(0.3, b));
    CHECK(a == b);
    // The exact stream is pinned: std::mt19937_64 with the top 53 bits.
    Rng c(5489);
    CHECK(c.uniform_closed_open() == static_cast<double>(14514284786278117030ULL >> 11) * 0x1.0p-53);
}

TEST_CASE("init_state keeps the freshest event and matches the replay oracle") {
    MotifVocabulary vocab(3);
    auto g = testing_support::graph_text("1 2 0\n3 4 100\n");
    auto stats = build_stats(g, vocab, 10);
    auto st = init_state(g, stats, vocab, 1);
    CHECK(st.now == 100);
    REQUIRE(st.pool.size() == 1);
    CHECK(st.pool.at(st.pool.live_slots()[0]).last_time() == 100);

    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 200; ++trial) {
        auto f = random_fixture(rng);
        auto s = build_stats(f.g, vocab, f.dc);
        auto a = init_state(f.g, s, vocab, 3);
        auto b = init_state(f.g, s, vocab, 3);
        const double end = static_cast<double>(f.E.back().t);
        CHECK(a.pool.size() == oracle::pool_before(f.E, f.E.size(), f.dc, 3, end).size());
        CHECK(a.initial_pool_size == a.pool.size());
        CHECK(a.now == end);
        CHECK(a.rng == b.rng);
        CHECK(a.edge_last == b.edge_last);
        CHECK(a.pool.live_slots() == b.pool.live_slots());
    }
    MtmStats empty;
    CHECK_THROWS_AS(init_state(OpenMotifPool(3), empty, 1), DegenerateDataError);
}

TEST_CASE("solve_cold basics") {
    MotifVocabulary vocab(3);
    auto g = testing_support::graph_text("1 2 0\n1 2 5\n");
    auto s = build_stats(g, vocab, 10);
    auto st = init_state(g, s, vocab, 1);
    st.now = 1e6;
    CHECK(solve_cold(st, s).first == EdgeKey{0, 1});

    // Same timing, different count: the heavier edge wins.
    auto h = testing_support::graph_text("1 2 0\n3 4 0\n1 2 10\n3 4 10\n1 2 20\n");
    auto hs = build_stats(h, vocab, 10);
    auto hst = init_state(h, hs, vocab, 1);
    hs.edges[1].lambda = hs.edges[0].lambda;
    hst.edge_last[1] = hst.edge_last[0];
    CHECK(solve_cold(hst, hs).first == EdgeKey{0, 1});
}

TEST_CASE("cold ties go to the smaller pair") {
    MotifVocabulary vocab(3);
    auto g = testing_support::graph_text("5 6 0\n1 2 0\n5 6 10\n1 2 10\n");
    auto s = build_stats(g, vocab, 10);
    auto st = init_state(g, s, vocab, 1);
    st.now = 30;
    // Dense ids follow first appearance: 5->0, 6->1, 1->2, 2->3.
    CHECK(solve_cold(st, s).first == EdgeKey{0, 1});
}

TEST_CASE("solve_hot basics") {
    MotifVocabulary vocab(3);
    MtmStats s;
    s.delta_c = 10;
    s.lambda_global = 0.5;
    s.lambda_type.assign(vocab.size(), 0.5);
    s.trans_row_total.assign(vocab.size(), 0);
    s.edges = {{{1, 2}, 1, 0.5, 0}};
    s.edge_index[{1, 2}] = 0;
    s.edge_count_total = 1;

    auto st = init_state(OpenMotifPool(3), s, 1);
    CHECK_FALSE(solve_hot(st, s, vocab).has_value());

    st.pool.insert(MotifInstance::single(1, 2, 0));
    st.now = 2;
    CHECK_FALSE(solve_hot(st, s, vocab).has_value());  // nothing observed

    const TypeId recip = *vocab.index_of(MotifCode{{0, 1}, {1, 0}});
    s.trans_count[MtmStats::transition_key(0, recip)] = 4;
    s.trans_row_total[0] = 4;
    auto hot = solve_hot(st, s, vocab);
    REQUIRE(hot.has_value());
    CHECK(hot->pair == EdgeKey{2, 1});
    CHECK(hot->target_type == recip);
    CHECK(hot->score.log_posterior == log_waiting_likelihood(0.5, 2, 1));

    // Identical instances and timing: the smaller pair wins.
    st.pool.insert(MotifInstance::single(7, 0, 0));
    CHECK(solve_hot(st, s, vocab)->pair == EdgeKey{0, 7});
    // The fresher instance has the shorter wait and scores higher.
    st.pool.insert(MotifInstance::single(8, 9, 1));
    CHECK(solve_hot(st, s, vocab)->pair == EdgeKey{9, 8});
}

TEST_CASE("oracle: solve_cold and solve_hot match exhaustive scoring") {
    MotifVocabulary vocab(3);
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> ahead(0.0, 1.0);
    int hot_compared = 0;
    for (int trial = 0; trial < 250; ++trial) {
        auto f = random_fixture(rng);
        auto s = build_stats(f.g, vocab, f.dc);
        auto o = oracle::quadratic_stats(f.E, f.dc, 3);
        auto st = init_state(f.g, s, vocab, 1);
        st.now += ahead(rng) * f.dc;
        st.pool.prune(st.now, f.dc);

        // Cold: every observed edge.
        long double best = -1;
        for (const auto& [edge, times] : o.edge_times) {
            const long double v = oracle::cold_numerator(o, edge.first, edge.second, st.now - times.back());
            best = std::max(best, v);
        }
        auto [key, score] = solve_cold(st, s);
        const long double chosen = oracle::cold_numerator(o, key.src, key.dst, st.now - o.edge_times.at({key.src, key.dst}).back());
        CHECK(static_cast<double>(chosen) == doctest::Approx(static_cast<double>(best)).epsilon(1e-9));
        CHECK(score.log_posterior == doctest::Approx(static_cast<double>(std::log(best))).epsilon(1e-9));

        // Hot: every instance and every ordered pair over its nodes.
        auto pool = oracle::pool_before(f.E, f.E.size(), f.dc, 3, st.now);
        long double hbest = 0;
        std::size_t candidates = 0;
        for (const auto& m : pool) {
            auto p = oracle::pattern_of(f.E, m);
            const std::string src = oracle::canon(p);
            const double dt = st.now - static_cast<double>(f.E[m.back()].t);
            for (auto a : nodes_in_order(p)) {
                for (auto b : nodes_in_order(p)) {
                    if (a == b) continue;
                    ++candidates;
                    auto q = p;
                    q.emplace_back(a, b);
                    hbest = std::max(hbest, oracle::hot_numerator(o, src, oracle::canon(q), dt));
                }
            }
        }
        CHECK(st.pool.size() == pool.size());
        auto hot = solve_hot(st, s, vocab);
        CHECK(hot.has_value() == (hbest > 0));
        if (!hot) continue;
        ++hot_compared;
        const MotifInstance& m = st.pool.at(hot->slot);
        const auto raw = m.pattern();
        auto pat = oracle::Pattern(raw.begin(), raw.end());
        const std::string src = oracle::canon(pat);
        pat.emplace_back(hot->pair.src, hot->pair.dst);
        const long double got = oracle::hot_numerator(o, src, oracle::canon(pat), st.now - m.last_time());
        CHECK(static_cast<double>(got) == doctest::Approx(static_cast<double>(hbest)).epsilon(1e-9));
        CHECK(hot->score.log_posterior == doctest::Approx(static_cast<double>(std::log(hbest))).epsilon(1e-9));
        CHECK(candidates > 0);
    }
    CHECK(hot_compared > 50);
}

TEST_CASE("one forced cold step") {
    MotifVocabulary vocab(3);
    auto g = testing_support::graph_text("1 2 0\n2 3 4\n1 2 10\n3 1 12\n");
    auto s = build_stats(g, vocab, compute_delta_c(g));
    s.p_cold = 1.0;
    auto out = step_predict(g, s, vocab, 1, 11);
    REQUIRE(out.predictions.size() == 1);
    Rng rng(11);
    const double t = 12 + sample_exponential(s.lambda_global, rng);
    CHECK(out.predictions[0].time == t);
    CHECK(out.predictions[0].kind == EventKind::cold);
    auto st = init_state(g, s, vocab, 11);
    st.now = t;
    CHECK(EdgeKey{out.predictions[0].src, out.predictions[0].dst} == solve_cold(st, s).first);
    CHECK(out.drawn_cold == 1);
    CHECK_THROWS_AS(step_predict(g, s, vocab, 0, 1), std::invalid_argument);
}

TEST_CASE("property: forecast invariants") {
    MotifVocabulary vocab(3);
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 60; ++trial) {
        auto f = random_fixture(rng, 40);
        auto s = build_stats(f.g, vocab, f.dc);
        auto st = init_state(f.g, s, vocab, static_cast<std::uint64_t>(trial));
        double last = st.now;
        std::size_t fallbacks = 0;
        for (std::size_t step = 0; step < 60; ++step) {
            PredictorState before = st;
            auto r = forecast(st, s, vocab, 1);
            const Prediction& p = r.predictions[0];
            fallbacks += r.fallback_count;
            CHECK(p.time > last);
            last = p.time;
            CHECK(p.src != p.dst);
            CHECK(st.now >= s.t_max);
            CHECK(st.pool.size() <= st.initial_pool_size + step + 1);
            CHECK(st.pool.indexes_consistent());
            if (p.kind == EventKind::cold) {
                CHECK(s.find_edge({p.src, p.dst}) != nullptr);
            } else {
                CHECK(vocab.type_size(p.target_type) == vocab.type_size(p.source_type) + 1);
                before.pool.prune(p.time, s.delta_c);
                bool inside = false;
                before.pool.for_each([&](auto, const MotifInstance& m) {
                    inside = inside || (m.touches(p.src) && m.touches(p.dst) && m.type() == p.source_type);
                });
                CHECK(inside);
            }
            CHECK(st.last_occurrence({p.src, p.dst}, s) == p.time);
        }
        CHECK(fallbacks <= 60);
    }
}

TEST_CASE("cold draws follow p_cold over 10,000 steps") {
    MotifVocabulary vocab(3);
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_fixture(rng, 30);
        auto s = build_stats(f.g, vocab, f.dc);
        auto out = step_predict(f.g, s, vocab, 10000, 1000 + static_cast<std::uint64_t>(trial));
        std::size_t cold_emitted = 0;
        for (const auto& p : out.predictions) cold_emitted += (p.kind == EventKind::cold && !p.fallback) ? 1 : 0;
        CHECK(cold_emitted == out.drawn_cold);
        CHECK(std::abs(static_cast<double>(out.drawn_cold) / 10000.0 - s.p_cold) <= 0.02);
    }
}

TEST_CASE("frozen last occurrence leaves the working copy untouched") {
    MotifVocabulary vocab(3);
    auto g = testing_support::graph_text("1 2 0\n2 3 4\n1 2 10\n3 1 12\n2 1 13\n");
    auto s = build_stats(g, vocab, compute_delta_c(g));
    auto st = init_state(g, s, vocab, 4);
    ForecastOptions frozen;
    frozen.update_last_occurrence = false;
    forecast(st, s, vocab, 50, frozen);
    for (std::size_t i = 0; i < s.edges.size(); ++i) CHECK(st.edge_last[i] == s.edges[i].last_occurrence);
    CHECK(st.unseen_last.empty());
}

TEST_CASE("replay determinism and CSV format") {
    MotifVocabulary vocab(3);
    auto g = testing_support::graph_text("100 200 0\n200 300 4\n100 200 10\n300 100 12\n200 100 13\n");
    auto s = build_stats(g, vocab, compute_delta_c(g));
    auto a = step_predict(g, s, vocab, 200, 9);
    auto b = step_predict(g, s, vocab, 200, 9);
    std::ostringstream ca, cb;
    write_predictions_csv(a.predictions, g, ca);
    write_predictions_csv(b.predictions, g, cb);
    CHECK(ca.str() == cb.str());
    CHECK(a.fallback_count == b.fallback_count);

    std::istringstream lines(ca.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "step,src,dst,time,kind,score");
    std::getline(lines, line);
    CHECK(line.rfind("0,", 0) == 0);
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1), c3 = line.find(',', c2 + 1), c4 = line.find(',', c3 + 1);
    const std::string src = line.substr(c1 + 1, c2 - c1 - 1);
    CHECK((src == "100" || src == "200" || src == "300"));
    const std::string time = line.substr(c3 + 1, c4 - c3 - 1);
    CHECK(time.size() - time.find('.') - 1 == 6);
    std::size_t rows = 1;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 200);

    auto c = step_predict(g, s, vocab, 200, 10);
    std::ostringstream cc;
    write_predictions_csv(c.predictions, g, cc);
    CHECK(cc.str() != ca.str());
}

}  // TEST_SUITE
