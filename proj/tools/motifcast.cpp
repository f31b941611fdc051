// motifcast: temporal motif event forecasting from the command line.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "motifcast/eval.hpp"
#include "motifcast/features.hpp"
#include "motifcast/ingest.hpp"
#include "motifcast/motif.hpp"
#include "motifcast/predictor.hpp"
#include "motifcast/stats.hpp"

namespace mc = motifcast;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kMissingFile = 2, kParseError = 3, kDegenerate = 4 };

struct RunConfig {
    std::string command;
    std::string input_path;
    std::size_t lmax = 3;
    std::optional<double> delta_c_override;
    double test_ratio = 0.20;
    std::size_t k = 100;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<std::size_t> ks{100};
    std::vector<double> ratios{0.20};
    double epsilon = 1.0;
    std::string output_path;
    std::string report_path;
    std::string feature_indexing = "source";
    bool fit_on_train = false;
    bool dense_csv = false;
    std::size_t dense_max_rows = 100000;
    std::string save_stats;
    std::string load_stats;
    bool freeze_last_occurrence = false;
    double laplace = 0.0;
    std::size_t threads = 0;
    bool verbose = false;
};

std::size_t default_threads() {
    if (const char* env = std::getenv("MOTIFCAST_THREADS")) {
        try {
            auto n = std::stoul(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

class Clock {
public:
    explicit Clock(bool verbose) : verbose_(verbose), start_(std::chrono::steady_clock::now()) {}
    void lap(const char* what) {
        if (!verbose_) return;
        auto now = std::chrono::steady_clock::now();
        std::cerr << "[motifcast] " << what << ": "
                  << std::chrono::duration<double>(now - start_).count() << " s\n";
        start_ = now;
    }

private:
    bool verbose_;
    std::chrono::steady_clock::time_point start_;
};

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

// Writes to the file when a path is given, else to stdout.
template <class F>
void with_output(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
    } else {
        auto out = open_output(path);
        write(out);
    }
}

mc::TemporalGraph load(const RunConfig& cfg) {
    if (!std::filesystem::is_regular_file(cfg.input_path)) {
        throw std::ios_base::failure("input file not found: " + cfg.input_path);
    }
    return mc::parse_events_file(cfg.input_path);
}

double delta_c_for(const RunConfig& cfg, const mc::TemporalGraph& g) {
    return cfg.delta_c_override ? *cfg.delta_c_override : mc::compute_delta_c(g);
}

mc::MtmStats fit(const RunConfig& cfg, const mc::TemporalGraph& train, const mc::MotifVocabulary& vocab) {
    if (!cfg.load_stats.empty()) {
        std::ifstream in(cfg.load_stats);
        if (!in) throw std::ios_base::failure("input file not found: " + cfg.load_stats);
        auto st = mc::MtmStats::load(in);
        if (st.ell_max != cfg.lmax || st.event_count != train.size()) {
            throw std::runtime_error("stats snapshot does not match this input and --lmax");
        }
        return st;
    }
    auto st = mc::build_stats(train, vocab, delta_c_for(cfg, train), mc::StatsOptions{cfg.epsilon});
    if (!cfg.save_stats.empty()) {
        auto out = open_output(cfg.save_stats);
        st.save(out);
    }
    return st;
}

int run_stats(const RunConfig& cfg) {
    Clock clock(cfg.verbose);
    auto g = load(cfg);
    clock.lap("parse");
    auto [train, test] = mc::chronological_split(g, cfg.test_ratio);
    mc::MotifVocabulary vocab(cfg.lmax);
    auto st = fit(cfg, train, vocab);
    clock.lap("fit");

    auto summary = mc::summary_stats(g);
    nlohmann::ordered_json j;
    j["nodes"] = summary.nodes;
    j["events"] = summary.events;
    j["static_edges"] = summary.static_edges;
    j["timespan_days"] = summary.timespan_days;
    j["dropped_self_loops"] = g.dropped_self_loops();
    j["test_ratio"] = cfg.test_ratio;
    j["train_events"] = train.size();
    j["test_events"] = test.size();
    j["ell_max"] = st.ell_max;
    j["delta_c"] = st.delta_c;
    j["p_cold"] = st.p_cold;
    j["lambda_global"] = st.lambda_global;
    j["transitions"] = st.total_transitions();
    j["rer"] = mc::repeated_event_ratio(train, test);
    j["node_entropy"] = mc::node_entropy(train);
    j["motif_transition_entropy"] = st.total_transitions() ? mc::motif_transition_entropy(st) : 0.0;
    with_output(cfg.output_path, [&](std::ostream& out) { out << j.dump() << '\n'; });
    return kOk;
}

int run_predict(const RunConfig& cfg) {
    Clock clock(cfg.verbose);
    auto g = load(cfg);
    auto [train, test] = mc::chronological_split(g, cfg.test_ratio);
    mc::MotifVocabulary vocab(cfg.lmax);
    auto st = fit(cfg, train, vocab);
    auto state = mc::init_state(train, st, vocab, cfg.seed);
    clock.lap("initialization");

    mc::ForecastOptions options;
    options.update_last_occurrence = !cfg.freeze_last_occurrence;
    options.scoring.laplace_alpha = cfg.laplace;
    auto result = mc::forecast(state, st, vocab, cfg.k, options);
    clock.lap("forecast");

    std::string csv_path = cfg.output_path.empty() ? "predictions.csv" : cfg.output_path;
    with_output(csv_path, [&](std::ostream& out) { mc::write_predictions_csv(result.predictions, g, out); });

    mc::EvalReport report;
    report.k = cfg.k;
    report.test_ratio = cfg.test_ratio;
    report.precision = mc::precision_at_k(result.predictions, test);
    report.rer = mc::repeated_event_ratio(train, test);
    report.node_entropy = mc::node_entropy(train);
    report.motif_transition_entropy = st.total_transitions() ? mc::motif_transition_entropy(st) : 0.0;
    report.fallback_count = result.fallback_count;
    report.seed = cfg.seed;
    std::string report_path = cfg.report_path.empty() ? "-" : cfg.report_path;
    with_output(report_path, [&](std::ostream& out) { out << report.to_json() << '\n'; });
    return kOk;
}

int run_features(const RunConfig& cfg) {
    Clock clock(cfg.verbose);
    auto g = load(cfg);
    mc::MotifVocabulary vocab(cfg.lmax);
    mc::MtmStats st;
    if (cfg.fit_on_train) {
        auto [train, test] = mc::chronological_split(g, cfg.test_ratio);
        st = fit(cfg, train, vocab);
    } else {
        st = fit(cfg, g, vocab);
    }
    clock.lap("fit");

    const std::string prefix = cfg.output_path.empty() ? "features" : cfg.output_path;
    const std::string vocab_path = prefix + ".vocab.tsv";
    const auto indexing = cfg.feature_indexing == "target" ? mc::FeatureIndexing::target : mc::FeatureIndexing::source;
    auto fm = mc::build_feature_matrix(g, st, vocab, indexing,
                                       std::filesystem::path(vocab_path).filename().string());
    clock.lap("features");
    {
        auto out = open_output(vocab_path);
        vocab.write(out);
    }
    {
        auto out = open_output(prefix + ".features.txt");
        mc::export_sparse(fm, out);
    }
    if (cfg.dense_csv) {
        auto out = open_output(prefix + ".dense.csv");
        mc::export_dense_csv(fm, out, cfg.dense_max_rows);
    }
    nlohmann::ordered_json j;
    j["rows"] = fm.rows;
    j["cols"] = fm.cols;
    j["nonzeros"] = fm.entries.size();
    j["features"] = prefix + ".features.txt";
    j["vocabulary"] = vocab_path;
    std::cout << j.dump() << '\n';
    return kOk;
}

int run_sweep(const RunConfig& cfg) {
    Clock clock(cfg.verbose);
    auto g = load(cfg);
    mc::ModelConfig model;
    model.ell_max = cfg.lmax;
    model.delta_c = cfg.delta_c_override;
    model.epsilon = cfg.epsilon;
    model.forecast.update_last_occurrence = !cfg.freeze_last_occurrence;
    model.forecast.scoring.laplace_alpha = cfg.laplace;
    auto table = mc::sweep_k(g, cfg.ratios, cfg.ks, cfg.seeds, model, cfg.threads ? cfg.threads : default_threads());
    clock.lap("sweep");
    with_output(cfg.output_path, [&](std::ostream& out) { table.write_csv(out); });
    return kOk;
}

void add_model_flags(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("input", cfg.input_path, "Temporal edge list: `src dst time` per line")->required();
    sub->add_option("--lmax", cfg.lmax, "Maximum events per motif")->default_val(3)->check(CLI::Range(2, 5));
    sub->add_option("--delta-c", cfg.delta_c_override,
                    "Transition time limit in seconds (default: largest gap between consecutive events "
                    "sharing a node in the training data)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", cfg.epsilon, "Half-width of the waiting-time window in seconds")
        ->default_val(1.0)
        ->check(CLI::PositiveNumber);
    sub->add_option("--test-ratio", cfg.test_ratio, "Held-out fraction at the end of the stream")
        ->default_val(0.20)
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("-o,--output", cfg.output_path, "Output path");
    sub->add_flag("-v,--verbose", cfg.verbose, "Timing diagnostics on stderr");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"motifcast: temporal motif transition forecasting"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* stats = app.add_subcommand("stats", "Dataset summary, delta_c, p_cold, RER and entropies as JSON");
    add_model_flags(stats, cfg);
    stats->add_option("--save-stats", cfg.save_stats, "Write the fitted statistics snapshot (JSON)");

    auto* predict = app.add_subcommand("predict", "Forecast the next k events and score them on the held-out tail");
    add_model_flags(predict, cfg);
    predict->add_option("-k,--k", cfg.k, "Number of events to forecast")->default_val(100)->check(CLI::PositiveNumber);
    predict->add_option("--seed", cfg.seed, "Random seed")->default_val(1);
    predict->add_option("--report", cfg.report_path, "Evaluation report path (default: stdout)");
    predict->add_option("--load-stats", cfg.load_stats, "Reuse a statistics snapshot fitted on the same input");
    predict->add_flag("--freeze-last-occurrence", cfg.freeze_last_occurrence,
                      "Keep edge waiting times at their training values while forecasting");
    predict->add_option("--laplace", cfg.laplace, "Additive smoothing of the transition prior")->default_val(0.0);

    auto* features = app.add_subcommand("features", "Export per-event motif transition posterior features");
    add_model_flags(features, cfg);
    features->add_option("--feature-indexing", cfg.feature_indexing, "Column type of each transition")
        ->default_val("source")
        ->check(CLI::IsMember({"source", "target"}));
    features->add_flag("--fit-on-train", cfg.fit_on_train,
                       "Fit statistics on the training split only (default: whole input)");
    features->add_flag("--dense-csv", cfg.dense_csv, "Also write a dense CSV");
    features->add_option("--dense-max-rows", cfg.dense_max_rows, "Row ceiling for the dense CSV")
        ->default_val(100000);
    features->add_option("--load-stats", cfg.load_stats, "Reuse a statistics snapshot fitted on the same data");

    auto* sweep = app.add_subcommand("sweep", "Precision curves over k and test ratio");
    add_model_flags(sweep, cfg);
    sweep->add_option("--ks", cfg.ks, "Comma-separated prediction counts")->delimiter(',')->default_str("100");
    sweep->add_option("--ratios", cfg.ratios, "Comma-separated test ratios")->delimiter(',')->default_str("0.2");
    sweep->add_option("--seeds", cfg.seeds, "Comma-separated seeds")->delimiter(',')->default_str("1,2,3,4,5");
    sweep->add_option("--threads", cfg.threads, "Worker threads (default: MOTIFCAST_THREADS or all cores)");
    sweep->add_flag("--freeze-last-occurrence", cfg.freeze_last_occurrence,
                    "Keep edge waiting times at their training values while forecasting");
    sweep->add_option("--laplace", cfg.laplace, "Additive smoothing of the transition prior")->default_val(0.0);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*stats) return run_stats(cfg);
        if (*predict) return run_predict(cfg);
        if (*features) return run_features(cfg);
        if (*sweep) return run_sweep(cfg);
    } catch (const mc::ParseError& e) {
        std::cerr << "motifcast: error[parse]: " << e.what() << '\n';
        return kParseError;
    } catch (const mc::DegenerateDataError& e) {
        std::cerr << "motifcast: error[degenerate]: " << e.what() << '\n';
        return kDegenerate;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "motifcast: error[io]: " << e.what() << '\n';
        return kMissingFile;
    } catch (const std::exception& e) {
        std::cerr << "motifcast: error[failure]: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
