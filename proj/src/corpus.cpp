#include "coact/corpus.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "coact/errors.hpp"
#include "json.hpp"

namespace coact {

const char* to_string(Actor a) { return a == Actor::human ? "human" : "agent"; }

const char* to_string(ActionKind k) {
    switch (k) {
        case ActionKind::click: return "click";
        case ActionKind::type: return "type";
        case ActionKind::navigate: return "navigate";
        case ActionKind::select: return "select";
        case ActionKind::submit: return "submit";
        case ActionKind::scroll: return "scroll";
        case ActionKind::other: return "other";
    }
    return "other";
}

std::optional<Actor> actor_from_string(const std::string& s) {
    if (s == "human") return Actor::human;
    if (s == "agent") return Actor::agent;
    return std::nullopt;
}

ActionKind kind_from_string(const std::string& s) {
    if (s == "click") return ActionKind::click;
    if (s == "type") return ActionKind::type;
    if (s == "navigate") return ActionKind::navigate;
    if (s == "select") return ActionKind::select;
    if (s == "submit") return ActionKind::submit;
    if (s == "scroll") return ActionKind::scroll;
    return ActionKind::other;
}

const char* to_string(TaskCategory c) {
    return c == TaskCategory::standard ? "standard" : "freeform";
}

std::optional<TaskCategory> category_from_string(const std::string& s) {
    if (s == "standard") return TaskCategory::standard;
    if (s == "freeform") return TaskCategory::freeform;
    return std::nullopt;
}

Step make_step(int index, Actor actor, ActionKind kind, std::int64_t timestamp_ms) {
    Step s;
    s.index = index;
    s.actor = actor;
    s.kind = kind;
    s.kind_raw = to_string(kind);
    s.timestamp_ms = timestamp_ms;
    return s;
}

ValidationResult validate_trajectory(const Trajectory& t) {
    ValidationResult r;
    if (t.steps.empty()) {
        r.violations.push_back({0, "trajectory has no steps"});
        return r;
    }
    std::int64_t prev_ts = -1;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const Step& s = t.steps[i];
        const int pos = static_cast<int>(i) + 1;
        if (s.index != pos)
            r.violations.push_back({pos, "non-contiguous index at position " + std::to_string(pos)});
        if (s.timestamp_ms < 0)
            r.violations.push_back({pos, "negative timestamp at step " + std::to_string(pos)});
        if (prev_ts >= 0 && s.timestamp_ms < prev_ts)
            r.violations.push_back({pos, "timestamp decreases at step " + std::to_string(pos)});
        if (s.duration_ms && *s.duration_ms < 0)
            r.violations.push_back({pos, "negative duration at step " + std::to_string(pos)});
        prev_ts = s.timestamp_ms;
    }
    return r;
}

std::vector<int> label_steps(const Trajectory& t) {
    std::vector<int> y;
    y.reserve(t.steps.size());
    for (const Step& s : t.steps) y.push_back(s.actor == Actor::human ? 1 : 0);
    return y;
}

std::vector<const Trajectory*> sorted_trajectories(const Corpus& c) {
    std::vector<const Trajectory*> out;
    out.reserve(c.trajectories.size());
    for (const Trajectory& t : c.trajectories) out.push_back(&t);
    std::sort(out.begin(), out.end(), [](const Trajectory* a, const Trajectory* b) {
        if (a->task_id != b->task_id) return a->task_id < b->task_id;
        return a->user_id < b->user_id;
    });
    return out;
}

std::vector<std::string> corpus_users(const Corpus& c) {
    std::set<std::string> ids;
    for (const Trajectory& t : c.trajectories) ids.insert(t.user_id);
    return {ids.begin(), ids.end()};
}

std::vector<const Trajectory*> user_trajectories(const Corpus& c, const std::string& user_id) {
    std::vector<const Trajectory*> out;
    for (const Trajectory* t : sorted_trajectories(c))
        if (t->user_id == user_id) out.push_back(t);
    return out;
}

namespace {

struct Tally {
    long long n = 0;
    long long agent_steps = 0;
    long long human_steps = 0;
    long long agent_ms = 0;
    long long human_ms = 0;

    void add(const Trajectory& t) {
        ++n;
        for (const Step& s : t.steps) {
            const std::int64_t d = s.duration_ms.value_or(0);
            if (s.actor == Actor::human) {
                ++human_steps;
                human_ms += d;
            } else {
                ++agent_steps;
                agent_ms += d;
            }
        }
    }

    StatsBucket bucket() const {
        StatsBucket b;
        b.n_trajectories = static_cast<int>(n);
        if (n == 0) return b;
        const double total_steps = static_cast<double>(agent_steps + human_steps);
        b.intervention_share = total_steps > 0 ? static_cast<double>(human_steps) / total_steps : 0.0;
        b.mean_agent_steps = static_cast<double>(agent_steps) / static_cast<double>(n);
        b.mean_human_steps = static_cast<double>(human_steps) / static_cast<double>(n);
        b.mean_total_steps = b.mean_agent_steps + b.mean_human_steps;
        b.mean_agent_time_s = static_cast<double>(agent_ms) / 1000.0 / static_cast<double>(n);
        b.mean_human_time_s = static_cast<double>(human_ms) / 1000.0 / static_cast<double>(n);
        b.mean_total_time_s = b.mean_agent_time_s + b.mean_human_time_s;
        return b;
    }
};

}  // namespace

CorpusStats corpus_stats(const Corpus& c) {
    if (c.trajectories.empty()) throw EmptyCorpusError("corpus has no trajectories");
    Tally overall, standard, freeform;
    CorpusStats stats;
    for (const Trajectory* t : sorted_trajectories(c)) {
        overall.add(*t);
        (t->category == TaskCategory::standard ? standard : freeform).add(*t);
        for (const Step& s : t->steps)
            if (!s.duration_ms) {
                ++stats.n_missing_duration;
                break;
            }
    }
    stats.overall = overall.bucket();
    stats.standard = standard.bucket();
    stats.freeform = freeform.bucket();
    return stats;
}

namespace {

nlohmann::ordered_json bucket_json(const StatsBucket& b) {
    return {{"n_trajectories", b.n_trajectories},
            {"intervention_share", b.intervention_share},
            {"mean_agent_steps", b.mean_agent_steps},
            {"mean_human_steps", b.mean_human_steps},
            {"mean_total_steps", b.mean_total_steps},
            {"mean_agent_time_s", b.mean_agent_time_s},
            {"mean_human_time_s", b.mean_human_time_s},
            {"mean_total_time_s", b.mean_total_time_s}};
}

}  // namespace

void write_corpus_stats_json(const CorpusStats& s, std::ostream& out,
                             const std::string& meta_json) {
    nlohmann::ordered_json j;
    if (!meta_json.empty()) j["meta"] = nlohmann::ordered_json::parse(meta_json);
    j["overall"] = bucket_json(s.overall);
    j["standard"] = bucket_json(s.standard);
    j["freeform"] = bucket_json(s.freeform);
    j["n_missing_duration"] = s.n_missing_duration;
    out << j.dump(2) << '\n';
}

}  // namespace coact
