#include "coact/gating.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

#include "coact/errors.hpp"
#include "coact/features.hpp"

namespace coact {

GatingOutcome replay_gating(const Corpus& c, const PredictionTrace& trace, double threshold,
                            int lead_window) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw BadThresholdError("threshold must be in [0, 1]");
    if (lead_window < 0) throw ConfigError("lead_window must be >= 0");

    GatingOutcome out;
    for (const Trajectory* t : sorted_trajectories(c)) {
        const TrajKey key = key_of(*t);
        std::vector<int> prompted;
        for (int i = 1; i <= t->length(); ++i) {
            const auto p = trace.at(key, i);
            if (!p) throw MissingPredictionError(t->task_id, t->user_id, i);
            if (*p >= threshold) prompted.push_back(i);
        }
        out.prompts_issued += static_cast<long long>(prompted.size());

        const auto events = segment_events(*t);
        out.events_total += static_cast<long long>(events.size());

        std::set<int> in_window;
        std::set<int> claimed;
        for (const InterventionEvent& e : events) {
            const int lo = std::max(1, e.t_start - lead_window);
            bool covered = false;
            int earliest_unclaimed = 0;
            for (int i : prompted) {
                if (i < lo || i > e.t_start) continue;
                covered = true;
                in_window.insert(i);
                if (earliest_unclaimed == 0 && !claimed.contains(i)) earliest_unclaimed = i;
            }
            if (covered) ++out.events_covered;
            if (earliest_unclaimed != 0) {
                claimed.insert(earliest_unclaimed);
                ++out.attributed_prompts;
            }
        }
        out.redundant_prompts += static_cast<long long>(in_window.size() - claimed.size());
        out.false_prompts += static_cast<long long>(prompted.size() - in_window.size());
    }

    out.coverage = out.events_total > 0
                       ? static_cast<double>(out.events_covered) / static_cast<double>(out.events_total)
                       : 0.0;
    out.interruptions_per_trajectory =
        c.trajectories.empty() ? 0.0
                               : static_cast<double>(out.false_prompts) /
                                     static_cast<double>(c.trajectories.size());
    return out;
}

std::vector<GatingRow> gating_report(std::vector<GatingOutcome> outcomes) {
    std::sort(outcomes.begin(), outcomes.end(), [](const GatingOutcome& a, const GatingOutcome& b) {
        if (a.coverage != b.coverage) return a.coverage > b.coverage;
        if (a.false_prompts != b.false_prompts) return a.false_prompts < b.false_prompts;
        return a.name < b.name;
    });
    std::vector<GatingRow> rows;
    rows.reserve(outcomes.size());
    for (const GatingOutcome& o : outcomes) rows.push_back({o, false});
    for (GatingRow& row : rows)
        for (const GatingOutcome& other : outcomes) {
            const bool weakly_better = other.coverage >= row.outcome.coverage &&
                                       other.false_prompts <= row.outcome.false_prompts;
            const bool strictly = other.coverage > row.outcome.coverage ||
                                  other.false_prompts < row.outcome.false_prompts;
            if (weakly_better && strictly) {
                row.dominated = true;
                break;
            }
        }
    return rows;
}

void write_gating_csv(const std::vector<GatingRow>& rows, std::ostream& out) {
    out << "policy,coverage,prompts_issued,false_prompts,interruptions_per_trajectory\n";
    char buf[128];
    for (const GatingRow& r : rows) {
        std::snprintf(buf, sizeof(buf), ",%.6f,%lld,%lld,%.6f\n", r.outcome.coverage,
                      r.outcome.prompts_issued, r.outcome.false_prompts,
                      r.outcome.interruptions_per_trajectory);
        out << r.outcome.name << buf;
    }
    if (!out) throw IoError("failed writing gating CSV");
}

}  // namespace coact
