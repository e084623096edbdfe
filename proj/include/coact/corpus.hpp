#pragma once
// Core domain types for collaborative task trajectories: who acted at each
// step, when, and with what action. All types are immutable value types once
// built; every operation on them is a pure function.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coact {

enum class Actor { human, agent };

// Closed action vocabulary. Unknown raw tags map to `other` with the raw
// string preserved on the step so serialization round-trips byte-faithfully.
enum class ActionKind { click, type, navigate, select, submit, scroll, other };

inline constexpr int kNumActionKinds = 7;

const char* to_string(Actor a);
const char* to_string(ActionKind k);
std::optional<Actor> actor_from_string(const std::string& s);
ActionKind kind_from_string(const std::string& s);  // unknown -> other

enum class TaskCategory { standard, freeform };

const char* to_string(TaskCategory c);
std::optional<TaskCategory> category_from_string(const std::string& s);

struct Step {
    int index = 0;  // 1-based position within the trajectory
    Actor actor = Actor::agent;
    ActionKind kind = ActionKind::other;
    std::string kind_raw;  // tag as parsed/constructed; kept for round-trips
    std::optional<std::string> target;
    std::optional<std::string> value;
    std::int64_t timestamp_ms = 0;  // milliseconds since session start
    std::optional<std::int64_t> duration_ms;
    std::optional<std::string> observation_ref;  // opaque snapshot handle

    bool operator==(const Step&) const = default;
};

// Convenience for in-code construction; keeps kind_raw consistent.
Step make_step(int index, Actor actor, ActionKind kind, std::int64_t timestamp_ms);

struct Trajectory {
    std::string task_id;
    std::string user_id;
    TaskCategory category = TaskCategory::standard;
    std::string instruction;
    std::vector<Step> steps;

    int length() const { return static_cast<int>(steps.size()); }

    bool operator==(const Trajectory&) const = default;
};

struct Corpus {
    std::vector<Trajectory> trajectories;

    bool operator==(const Corpus&) const = default;
};

// --- validation ------------------------------------------------------------

struct Violation {
    int step_index = 0;  // 1-based step the violation refers to (0 = trajectory level)
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Violations are data, not failures: an invalid trajectory yields a full
// report rather than an exception.
ValidationResult validate_trajectory(const Trajectory& t);

// y_t = 1 iff step t was taken by the human; length equals the step count.
std::vector<int> label_steps(const Trajectory& t);

// --- descriptive statistics -------------------------------------------------

struct StatsBucket {
    int n_trajectories = 0;
    double intervention_share = 0.0;  // human steps / total steps (pooled)
    double mean_agent_steps = 0.0;
    double mean_human_steps = 0.0;
    double mean_total_steps = 0.0;
    double mean_agent_time_s = 0.0;
    double mean_human_time_s = 0.0;
    double mean_total_time_s = 0.0;
};

struct CorpusStats {
    StatsBucket overall;
    StatsBucket standard;
    StatsBucket freeform;
    // Trajectories with any step lacking duration_ms contribute zero time;
    // this flag surfaces that the time columns are partial.
    int n_missing_duration = 0;
};

// Throws EmptyCorpusError on an empty corpus. Iterates trajectories in
// (task_id, user_id) lexicographic order so floating-point sums reproduce.
CorpusStats corpus_stats(const Corpus& c);

// --- shared corpus helpers ---------------------------------------------------

// Pointers into `c`, ordered by (task_id, user_id); the canonical reduction
// order for every corpus-level aggregate in the toolkit.
std::vector<const Trajectory*> sorted_trajectories(const Corpus& c);

// Sorted unique user ids.
std::vector<std::string> corpus_users(const Corpus& c);

// This user's trajectories in (task_id, user_id) order; empty if unknown.
std::vector<const Trajectory*> user_trajectories(const Corpus& c, const std::string& user_id);

void write_corpus_stats_json(const CorpusStats& s, std::ostream& out,
                             const std::string& meta_json = "");

}  // namespace coact
