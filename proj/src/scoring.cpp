#include "motifcast/scoring.hpp"

#include <cmath>
#include <stdexcept>

namespace motifcast {

double log_waiting_likelihood(double lambda, double dt, double eps) {
    if (!(lambda > 0.0)) throw std::invalid_argument("intensity must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (dt < 0.0) dt = 0.0;
    // No density below zero: the window's lower edge is clamped.
    const double lower = std::max(0.0, dt - eps);
    const double width = dt + eps - lower;
    // log(e^{-l*lower} - e^{-l*(lower+width)}) = -l*lower + log(1 - e^{-l*width})
    return -lambda * lower + std::log(-std::expm1(-lambda * width));
}

Score cold_log_posterior(EdgeKey e, double dt, const MtmStats& stats) {
    const EdgeStats* edge = stats.find_edge(e);
    if (edge == nullptr || edge->count == 0) throw std::domain_error("cold score requested for an unobserved edge");
    const double prior = static_cast<double>(edge->count) / static_cast<double>(stats.edge_count_total);
    return Score::of(log_waiting_likelihood(edge->lambda, dt, stats.epsilon) + std::log(prior), EventKind::cold);
}

Score hot_log_posterior(TypeId source, TypeId target, double dt, const MtmStats& stats,
                        const MotifVocabulary& vocab, const ScoringOptions& options) {
    if (source >= stats.trans_row_total.size() || target >= stats.lambda_type.size()) {
        return Score::impossible(EventKind::hot);
    }
    if (vocab.type_size(target) != vocab.type_size(source) + 1) return Score::impossible(EventKind::hot);
    const double count = static_cast<double>(stats.transitions(source, target));
    const double row = static_cast<double>(stats.trans_row_total[source]);
    double prior;
    if (options.laplace_alpha > 0.0) {
        const double k = static_cast<double>(vocab.child_count(source));
        prior = (count + options.laplace_alpha) / (row + options.laplace_alpha * k);
    } else {
        if (count == 0.0 || row == 0.0) return Score::impossible(EventKind::hot);
        prior = count / row;
    }
    return Score::of(log_waiting_likelihood(stats.lambda_type[target], dt, stats.epsilon) + std::log(prior),
                     EventKind::hot);
}

}  // namespace motifcast
