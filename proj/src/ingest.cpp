#include "coact/ingest.hpp"

#include <istream>
#include <ostream>
#include <set>

#include "coact/errors.hpp"
#include "json.hpp"

namespace coact {

using ojson = nlohmann::ordered_json;

void PredictionTrace::add(const TrajKey& key, int step, double p) {
    auto [it, inserted] = entries[key].emplace(step, p);
    (void)it;
    if (!inserted)
        throw DuplicateEntryError("duplicate prediction for step " + std::to_string(step) +
                                  " of trajectory (" + key.task_id + ", " + key.user_id + ")");
}

std::optional<double> PredictionTrace::at(const TrajKey& key, int step) const {
    auto t = entries.find(key);
    if (t == entries.end()) return std::nullopt;
    auto s = t->second.find(step);
    if (s == t->second.end()) return std::nullopt;
    return s->second;
}

std::size_t PredictionTrace::size() const {
    std::size_t n = 0;
    for (const auto& [key, steps] : entries) n += steps.size();
    return n;
}

namespace {

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

ojson parse_line(const std::string& line, int line_no) {
    ojson j;
    try {
        j = ojson::parse(line);
    } catch (const std::exception& e) {
        throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
    return j;
}

void reject_unknown_fields(const ojson& j, const std::set<std::string>& allowed, int line_no,
                           const char* what) {
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (!allowed.contains(k))
            throw ParseError(line_no, std::string("unknown field ") + k + " in " + what);
    }
}

std::string require_string(const ojson& j, const char* key, int line_no) {
    if (!j.contains(key)) throw ParseError(line_no, std::string("missing field ") + key);
    if (!j.at(key).is_string())
        throw ParseError(line_no, std::string("field ") + key + " must be a string");
    return j.at(key).get<std::string>();
}

std::int64_t require_int(const ojson& j, const char* key, int line_no) {
    if (!j.contains(key)) throw ParseError(line_no, std::string("missing field ") + key);
    if (!j.at(key).is_number_integer())
        throw ParseError(line_no, std::string("field ") + key + " must be an integer");
    return j.at(key).get<std::int64_t>();
}

Step parse_step(const ojson& j, int line_no) {
    static const std::set<std::string> allowed = {"index",        "actor",       "kind",
                                                  "target",       "value",       "timestamp_ms",
                                                  "duration_ms",  "observation_ref"};
    reject_unknown_fields(j, allowed, line_no, "step");

    Step s;
    s.index = static_cast<int>(require_int(j, "index", line_no));
    const std::string actor = require_string(j, "actor", line_no);
    auto a = actor_from_string(actor);
    if (!a) throw ParseError(line_no, "actor must be \"human\" or \"agent\", got \"" + actor + "\"");
    s.actor = *a;
    s.kind_raw = require_string(j, "kind", line_no);
    s.kind = kind_from_string(s.kind_raw);
    if (j.contains("target")) s.target = require_string(j, "target", line_no);
    if (j.contains("value")) s.value = require_string(j, "value", line_no);
    s.timestamp_ms = require_int(j, "timestamp_ms", line_no);
    if (j.contains("duration_ms")) s.duration_ms = require_int(j, "duration_ms", line_no);
    if (j.contains("observation_ref"))
        s.observation_ref = require_string(j, "observation_ref", line_no);
    return s;
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
    Corpus corpus;
    std::set<TrajKey> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const ojson j = parse_line(line, line_no);
        static const std::set<std::string> allowed = {"task_id", "user_id", "category",
                                                      "instruction", "steps"};
        reject_unknown_fields(j, allowed, line_no, "trajectory");

        Trajectory t;
        t.task_id = require_string(j, "task_id", line_no);
        t.user_id = require_string(j, "user_id", line_no);
        const std::string cat = require_string(j, "category", line_no);
        auto c = category_from_string(cat);
        if (!c)
            throw ParseError(line_no,
                             "category must be \"standard\" or \"freeform\", got \"" + cat + "\"");
        t.category = *c;
        t.instruction = require_string(j, "instruction", line_no);
        if (!j.contains("steps")) throw ParseError(line_no, "missing field steps");
        if (!j.at("steps").is_array()) throw ParseError(line_no, "field steps must be an array");
        for (const auto& sj : j.at("steps")) {
            if (!sj.is_object()) throw ParseError(line_no, "step entries must be objects");
            t.steps.push_back(parse_step(sj, line_no));
        }

        const ValidationResult v = validate_trajectory(t);
        if (!v.ok()) {
            std::vector<std::string> msgs;
            for (const Violation& viol : v.violations) msgs.push_back(viol.message);
            throw ValidationError(t.task_id, t.user_id, std::move(msgs));
        }
        if (!seen.insert(key_of(t)).second)
            throw ValidationError(t.task_id, t.user_id, {"duplicate (task_id, user_id)"});
        corpus.trajectories.push_back(std::move(t));
    }
    return corpus;
}

void write_corpus(const Corpus& c, std::ostream& out) {
    for (const Trajectory& t : c.trajectories) {
        ojson j;
        j["task_id"] = t.task_id;
        j["user_id"] = t.user_id;
        j["category"] = to_string(t.category);
        j["instruction"] = t.instruction;
        ojson steps = ojson::array();
        for (const Step& s : t.steps) {
            ojson sj;
            sj["index"] = s.index;
            sj["actor"] = to_string(s.actor);
            sj["kind"] = s.kind_raw.empty() ? to_string(s.kind) : s.kind_raw.c_str();
            if (s.target) sj["target"] = *s.target;
            if (s.value) sj["value"] = *s.value;
            sj["timestamp_ms"] = s.timestamp_ms;
            if (s.duration_ms) sj["duration_ms"] = *s.duration_ms;
            if (s.observation_ref) sj["observation_ref"] = *s.observation_ref;
            steps.push_back(std::move(sj));
        }
        j["steps"] = std::move(steps);
        out << j.dump() << '\n';
        if (!out) throw IoError("failed writing corpus line");
    }
}

PredictionTrace load_predictions(std::istream& in, const Corpus& c) {
    std::map<TrajKey, int> lengths;
    for (const Trajectory& t : c.trajectories) lengths[key_of(t)] = t.length();

    PredictionTrace trace;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const ojson j = parse_line(line, line_no);
        static const std::set<std::string> allowed = {"task_id", "user_id", "step", "p_intervene",
                                                      "token"};
        reject_unknown_fields(j, allowed, line_no, "prediction");

        TrajKey key{require_string(j, "task_id", line_no), require_string(j, "user_id", line_no)};
        const int step = static_cast<int>(require_int(j, "step", line_no));

        const bool has_p = j.contains("p_intervene");
        const bool has_token = j.contains("token");
        if (has_p == has_token)
            throw ParseError(line_no, "exactly one of p_intervene or token is required");
        double p = 0.0;
        if (has_p) {
            if (!j.at("p_intervene").is_number())
                throw ParseError(line_no, "field p_intervene must be a number");
            p = j.at("p_intervene").get<double>();
            if (!(p >= 0.0 && p <= 1.0))
                throw ParseError(line_no, "p_intervene out of range [0, 1]");
        } else {
            const std::string token = require_string(j, "token", line_no);
            if (token == "ask_user")
                p = 1.0;
            else if (token == "agent_continue")
                p = 0.0;
            else
                throw ParseError(line_no, "token must be \"ask_user\" or \"agent_continue\"");
        }

        auto it = lengths.find(key);
        if (it == lengths.end() || step < 1 || step > it->second)
            throw UnknownStepError(key.task_id, key.user_id, step);
        trace.add(key, step, p);
    }
    return trace;
}

void write_predictions(const PredictionTrace& t, std::ostream& out) {
    for (const auto& [key, steps] : t.entries) {
        for (const auto& [step, p] : steps) {
            ojson j;
            j["task_id"] = key.task_id;
            j["user_id"] = key.user_id;
            j["step"] = step;
            j["p_intervene"] = p;
            out << j.dump() << '\n';
        }
    }
    if (!out) throw IoError("failed writing prediction trace");
}

}  // namespace coact
