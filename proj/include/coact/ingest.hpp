#pragma once
// Line-delimited JSON serialization for corpora and prediction traces.
//
// Corpus line schema (keys emitted in this order, optionals omitted):
//   {"task_id": str, "user_id": str, "category": "standard"|"freeform",
//    "instruction": str, "steps": [{"index": int, "actor": "human"|"agent",
//    "kind": str, "target": str?, "value": str?, "timestamp_ms": int,
//    "duration_ms": int?, "observation_ref": str?}]}
//
// Prediction line schema (one of the two forms):
//   {"task_id": str, "user_id": str, "step": int, "p_intervene": number}
//   {"task_id": str, "user_id": str, "step": int,
//    "token": "ask_user"|"agent_continue"}

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "coact/corpus.hpp"

namespace coact {

struct TrajKey {
    std::string task_id;
    std::string user_id;

    auto operator<=>(const TrajKey&) const = default;
};

inline TrajKey key_of(const Trajectory& t) { return {t.task_id, t.user_id}; }

// Per-step intervention probabilities keyed to trajectory steps. Partial
// coverage is legal at load time; metric operations enforce the coverage
// they need and raise MissingPredictionError otherwise.
struct PredictionTrace {
    std::map<TrajKey, std::map<int, double>> entries;

    // Throws DuplicateEntryError if (key, step) is already present.
    void add(const TrajKey& key, int step, double p);
    std::optional<double> at(const TrajKey& key, int step) const;
    std::size_t size() const;
};

// Strict single-pass parse. Every trajectory in the result passes
// validate_trajectory; input order is preserved. Throws ParseError with the
// offending line number on malformed JSON or schema violations, and
// ValidationError when a well-formed trajectory breaks an invariant.
Corpus parse_corpus(std::istream& in);

// One trajectory object per line, fixed key order, no locale formatting.
void write_corpus(const Corpus& c, std::ostream& out);

// Loads a prediction trace against `c`. Token lines map ask_user -> 1.0 and
// agent_continue -> 0.0. Throws UnknownStepError for entries that reference
// no step of `c`, DuplicateEntryError on repeats, ParseError otherwise.
PredictionTrace load_predictions(std::istream& in, const Corpus& c);

// Probability form only; emits entries in (task_id, user_id, step) order.
// Probabilities survive a write/load round-trip bit-exactly.
void write_predictions(const PredictionTrace& t, std::ostream& out);

}  // namespace coact
