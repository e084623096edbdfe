#pragma once
// Style-parameterized synthetic corpus generator. Each style is a small set
// of knobs over where intervention events start, how long they run, whether
// control returns to the agent, and whether events are preceded by a
// learnable repeated-action loop. The point is to induce well-separated
// feature signatures per style, not behavioral realism.

#include <cstdint>
#include <map>
#include <string>

#include "coact/corpus.hpp"

namespace coact {

struct StyleParams {
    std::string name;
    double hazard_base = 0.1;   // per-step probability an event starts, in (0, 1)
    double bias_a = 2.0;        // Beta shape over normalized event-start positions
    double bias_b = 2.0;
    double event_len_p = 0.4;   // geometric continuation probability of human runs
    double handback_p = 0.9;    // probability the final event is followed by an agent step
    double signal_p = 0.8;      // probability an event is preceded by a 3-step identical loop
};

struct GeneratorConfig {
    int users_per_style = 10;
    int tasks_per_user = 20;
    double mean_length = 8.0;  // expected trajectory length (shifted Poisson)
    std::uint64_t seed = 0;
};

// The four preset styles. Constants are tuned so that feature extraction +
// k-means recovers the styles and so the centroid naming rules match.
std::map<std::string, StyleParams> style_presets();

// A single mid-biased style for learnability experiments where the position
// prior should stay uninformative.
std::map<std::string, StyleParams> neutral_style(double signal_p, double hazard_base = 0.12);

struct SynthResult {
    Corpus corpus;
    std::map<std::string, std::string> styles;  // user_id -> style name
};

// Deterministic given cfg.seed: same inputs, byte-identical corpus. Every
// generated trajectory passes validate_trajectory. Throws ConfigError on
// out-of-range parameters.
SynthResult generate_corpus(const std::map<std::string, StyleParams>& params,
                            const GeneratorConfig& cfg);

}  // namespace coact
