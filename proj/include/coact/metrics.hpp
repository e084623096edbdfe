#pragma once
// Step-level evaluation of intervention predictors: step accuracy, per-class
// precision/recall/F1, the Perfect Timing Score (PTS), the alpha sweep, and
// Kendall's coefficient of concordance over the resulting rankings.
//
// PTS scores an intervention event by sigmoid(1 - sum(alpha * d^2)) / sigmoid(1),
// where the sum runs over false-positive predictions in the window between
// the previous event and this one, and d is the distance to the event start.
// An event whose start step is not predicted scores 0 (hard miss). A
// trajectory's PTS is the mean over its events.

#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coact/corpus.hpp"
#include "coact/ingest.hpp"

namespace coact {

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Positive class = intervention (y = 1).
struct ConfusionCounts {
    long long tp = 0, fp = 0, tn = 0, fn = 0;

    long long total() const { return tp + fp + tn + fn; }
};

// Throws LengthMismatchError when the lists differ in length.
ConfusionCounts confusion_counts(const std::vector<int>& labels, const std::vector<int>& preds);

// (tp + tn) / total. Throws EmptyCountsError when total is zero.
double step_accuracy(const ConfusionCounts& c);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct Prf1Result {
    ClassMetrics interv;
    ClassMetrics noninterv;
    double macro_f1 = 0.0;
};

// Standard P/R/F1 for both classes; any 0/0 resolves to 0.
Prf1Result prf1(const ConfusionCounts& c);

struct PtsConfig {
    double alpha = 0.2;  // quadratic penalty strength; must be positive
};

// PTS for one trajectory, or nullopt when it contains no intervention event.
// The trace must cover every step (MissingPredictionError otherwise);
// probabilities binarize at `threshold` (BadThresholdError outside [0, 1]).
std::optional<double> pts_trajectory(const Trajectory& t, const PredictionTrace& trace,
                                     const PtsConfig& cfg, double threshold);

// Mean of pts_trajectory over event-containing trajectories in
// (task_id, user_id) order; 0 when no trajectory has events.
double pts_corpus(const Corpus& c, const PredictionTrace& trace, const PtsConfig& cfg,
                  double threshold);

struct MetricReport {
    double step_accuracy = 0.0;
    double interv_precision = 0.0, interv_recall = 0.0, interv_f1 = 0.0;
    double noninterv_precision = 0.0, noninterv_recall = 0.0, noninterv_f1 = 0.0;
    double macro_f1 = 0.0;
    double pts = 0.0;
    long long n_steps = 0;
    long long n_trajectories = 0;
    long long n_events = 0;
};

// Pools every step of the corpus for the confusion-based metrics and scores
// PTS as above, all against the same binarization threshold.
MetricReport evaluate_trace(const Corpus& c, const PredictionTrace& trace, const PtsConfig& cfg,
                            double threshold);

// Ranks for a descending ordering (highest value -> rank 1); tied values
// share the average of the ranks they span.
std::vector<double> average_ranks(const std::vector<double>& values);

// Kendall's W with the tie correction:
//   W = 12 S / (m^2 (n^3 - n) - m sum_j T_j)
// over an m x n matrix ranks[judge][subject]. Fully tied inputs (zero
// denominator) count as perfect agreement. Throws DegenerateInputError when
// n < 2 or the rows are ragged.
double kendalls_w(const std::vector<std::vector<double>>& ranks);

struct SweepRow {
    std::string model;
    double alpha = 0.0;
    double pts = 0.0;
};

struct SweepResult {
    std::vector<std::string> models;
    std::vector<double> alphas;
    std::vector<SweepRow> rows;                  // models x alphas, alpha-major
    std::vector<std::vector<double>> rank_matrix;  // [alpha][model], average ranks
    double kendalls_w = 1.0;
};

inline std::vector<double> default_alpha_grid() {
    return {0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50};
}

// PTS per (trace, alpha) plus Kendall's W of the per-alpha model rankings.
// Needs a non-empty grid and at least two traces.
SweepResult alpha_sweep(const Corpus& c,
                        const std::vector<std::pair<std::string, const PredictionTrace*>>& traces,
                        const std::vector<double>& grid, double threshold);

void write_metric_report_json(const MetricReport& r, std::ostream& out,
                              const std::string& meta_json = "");
void write_sweep_csv(const SweepResult& s, std::ostream& out);

}  // namespace coact
