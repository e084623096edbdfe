#include "coact/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "coact/errors.hpp"
#include "coact/features.hpp"
#include "json.hpp"

namespace coact {

ConfusionCounts confusion_counts(const std::vector<int>& labels, const std::vector<int>& preds) {
    if (labels.size() != preds.size())
        throw LengthMismatchError("labels and predictions differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool y = labels[i] != 0, p = preds[i] != 0;
        if (y && p)
            ++c.tp;
        else if (!y && p)
            ++c.fp;
        else if (y && !p)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

double step_accuracy(const ConfusionCounts& c) {
    const long long total = c.total();
    if (total == 0) throw EmptyCountsError("no scored steps");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

namespace {

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

ClassMetrics class_metrics(long long tp, long long fp, long long fn) {
    ClassMetrics m;
    m.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
    m.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
    m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

}  // namespace

Prf1Result prf1(const ConfusionCounts& c) {
    Prf1Result r;
    r.interv = class_metrics(c.tp, c.fp, c.fn);
    r.noninterv = class_metrics(c.tn, c.fn, c.fp);
    r.macro_f1 = 0.5 * (r.interv.f1 + r.noninterv.f1);
    return r;
}

namespace {

void check_pts_args(const PtsConfig& cfg, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw BadThresholdError("threshold must be in [0, 1]");
    if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
}

std::vector<int> binarized(const Trajectory& t, const PredictionTrace& trace, double threshold) {
    const TrajKey key = key_of(t);
    std::vector<int> yhat(static_cast<std::size_t>(t.length()) + 1, 0);  // 1-based
    for (int i = 1; i <= t.length(); ++i) {
        const auto p = trace.at(key, i);
        if (!p) throw MissingPredictionError(t.task_id, t.user_id, i);
        yhat[static_cast<std::size_t>(i)] = *p >= threshold ? 1 : 0;
    }
    return yhat;
}

}  // namespace

std::optional<double> pts_trajectory(const Trajectory& t, const PredictionTrace& trace,
                                     const PtsConfig& cfg, double threshold) {
    check_pts_args(cfg, threshold);
    const auto events = segment_events(t);
    if (events.empty()) return std::nullopt;

    const std::vector<int> yhat = binarized(t, trace, threshold);
    const double z = sigmoid(1.0);

    double sum = 0.0;
    int prev_end = 0;
    for (const InterventionEvent& e : events) {
        if (yhat[static_cast<std::size_t>(e.t_start)]) {
            double penalty = 0.0;
            for (int i = prev_end + 1; i < e.t_start; ++i)
                if (yhat[static_cast<std::size_t>(i)]) {
                    const double d = static_cast<double>(e.t_start - i);
                    penalty += cfg.alpha * d * d;
                }
            sum += sigmoid(1.0 - penalty) / z;
        }
        // A missed event start contributes 0 outright.
        prev_end = e.t_end;
    }
    return sum / static_cast<double>(events.size());
}

double pts_corpus(const Corpus& c, const PredictionTrace& trace, const PtsConfig& cfg,
                  double threshold) {
    check_pts_args(cfg, threshold);
    double sum = 0.0;
    long long n = 0;
    for (const Trajectory* t : sorted_trajectories(c)) {
        const auto pts = pts_trajectory(*t, trace, cfg, threshold);
        if (pts) {
            sum += *pts;
            ++n;
        }
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

MetricReport evaluate_trace(const Corpus& c, const PredictionTrace& trace, const PtsConfig& cfg,
                            double threshold) {
    check_pts_args(cfg, threshold);
    std::vector<int> labels, preds;
    long long n_events = 0;
    for (const Trajectory* t : sorted_trajectories(c)) {
        const std::vector<int> y = label_steps(*t);
        const std::vector<int> yhat = binarized(*t, trace, threshold);
        labels.insert(labels.end(), y.begin(), y.end());
        preds.insert(preds.end(), yhat.begin() + 1, yhat.end());
        n_events += static_cast<long long>(segment_events(*t).size());
    }

    const ConfusionCounts counts = confusion_counts(labels, preds);
    const Prf1Result f = prf1(counts);

    MetricReport r;
    r.step_accuracy = step_accuracy(counts);
    r.interv_precision = f.interv.precision;
    r.interv_recall = f.interv.recall;
    r.interv_f1 = f.interv.f1;
    r.noninterv_precision = f.noninterv.precision;
    r.noninterv_recall = f.noninterv.recall;
    r.noninterv_f1 = f.noninterv.f1;
    r.macro_f1 = f.macro_f1;
    r.pts = pts_corpus(c, trace, cfg, threshold);
    r.n_steps = counts.total();
    r.n_trajectories = static_cast<long long>(c.trajectories.size());
    r.n_events = n_events;
    return r;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

double kendalls_w(const std::vector<std::vector<double>>& ranks) {
    const std::size_t m = ranks.size();
    if (m == 0) throw DegenerateInputError("no judges");
    const std::size_t n = ranks.front().size();
    if (n < 2) throw DegenerateInputError("need at least 2 subjects");
    for (const auto& row : ranks)
        if (row.size() != n) throw DegenerateInputError("ragged rank matrix");

    std::vector<double> rank_sums(n, 0.0);
    double tie_sum = 0.0;
    for (const auto& row : ranks) {
        for (std::size_t i = 0; i < n; ++i) rank_sums[i] += row[i];
        std::vector<double> sorted = row;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_sum += t * t * t - t;
            i = j;
        }
    }

    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double mean_sum = md * (nd + 1.0) / 2.0;
    double s = 0.0;
    for (double r : rank_sums) {
        const double d = r - mean_sum;
        s += d * d;
    }
    const double denom = md * md * (nd * nd * nd - nd) - md * tie_sum;
    if (denom <= 0.0) return 1.0;  // every judge tied everything
    return 12.0 * s / denom;
}

SweepResult alpha_sweep(const Corpus& c,
                        const std::vector<std::pair<std::string, const PredictionTrace*>>& traces,
                        const std::vector<double>& grid, double threshold) {
    if (grid.empty()) throw DegenerateInputError("alpha grid is empty");
    if (traces.size() < 2) throw DegenerateInputError("need at least 2 traces to rank");

    SweepResult result;
    for (const auto& [name, trace] : traces) {
        (void)trace;
        result.models.push_back(name);
    }
    result.alphas = grid;

    for (double alpha : grid) {
        std::vector<double> pts_values;
        for (const auto& [name, trace] : traces) {
            const double pts = pts_corpus(c, *trace, PtsConfig{alpha}, threshold);
            result.rows.push_back({name, alpha, pts});
            pts_values.push_back(pts);
        }
        result.rank_matrix.push_back(average_ranks(pts_values));
    }
    result.kendalls_w = kendalls_w(result.rank_matrix);
    return result;
}

void write_metric_report_json(const MetricReport& r, std::ostream& out,
                              const std::string& meta_json) {
    nlohmann::ordered_json j;
    if (!meta_json.empty()) j["meta"] = nlohmann::ordered_json::parse(meta_json);
    j["step_accuracy"] = r.step_accuracy;
    j["interv_precision"] = r.interv_precision;
    j["interv_recall"] = r.interv_recall;
    j["interv_f1"] = r.interv_f1;
    j["noninterv_precision"] = r.noninterv_precision;
    j["noninterv_recall"] = r.noninterv_recall;
    j["noninterv_f1"] = r.noninterv_f1;
    j["macro_f1"] = r.macro_f1;
    j["pts"] = r.pts;
    j["n_steps"] = r.n_steps;
    j["n_trajectories"] = r.n_trajectories;
    j["n_events"] = r.n_events;
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing metric report");
}

void write_sweep_csv(const SweepResult& s, std::ostream& out) {
    out << "model,alpha,pts\n";
    char buf[64];
    for (const SweepRow& row : s.rows) {
        std::snprintf(buf, sizeof(buf), ",%g,%.6f\n", row.alpha, row.pts);
        out << row.model << buf;
    }
    if (!out) throw IoError("failed writing sweep CSV");
}

}  // namespace coact
