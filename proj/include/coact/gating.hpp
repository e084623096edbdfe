#pragma once
// Offline replay of a gating policy: threshold a prediction trace, count how
// many ground-truth intervention events would have been prompted in time
// versus how often the user would have been interrupted for nothing.

#include <iosfwd>
#include <string>
#include <vector>

#include "coact/corpus.hpp"
#include "coact/ingest.hpp"

namespace coact {

struct GatingOutcome {
    std::string name;
    long long prompts_issued = 0;
    long long events_total = 0;
    long long events_covered = 0;  // start step or any of the lead_window steps before it prompted
    long long false_prompts = 0;   // prompts outside every coverage window
    long long attributed_prompts = 0;  // one in-window prompt claimed per covered event
    long long redundant_prompts = 0;   // extra in-window prompts
    double coverage = 0.0;             // events_covered / events_total, 0 when no events
    double interruptions_per_trajectory = 0.0;  // false prompts per trajectory
};

// A prompt fires at step i iff p_i >= threshold; event with start t counts
// covered iff some prompt lies in [t - lead_window, t]. The three prompt
// tallies always sum to prompts_issued. Throws MissingPredictionError when
// the trace does not cover the corpus.
GatingOutcome replay_gating(const Corpus& c, const PredictionTrace& trace, double threshold,
                            int lead_window = 1);

struct GatingRow {
    GatingOutcome outcome;
    bool dominated = false;  // another policy has >= coverage and <= false prompts, one strict
};

// Sorted by coverage descending, then false prompts ascending, then name.
std::vector<GatingRow> gating_report(std::vector<GatingOutcome> outcomes);

// CSV `policy,coverage,prompts_issued,false_prompts,interruptions_per_trajectory`.
void write_gating_csv(const std::vector<GatingRow>& rows, std::ostream& out);

}  // namespace coact
