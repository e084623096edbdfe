#include "coact/features.hpp"

#include <cstdio>
#include <ostream>

#include "coact/errors.hpp"

namespace coact {

std::vector<InterventionEvent> segment_events(const Trajectory& t) {
    std::vector<InterventionEvent> events;
    int start = 0;  // 0 = not inside a human run
    for (int i = 1; i <= t.length(); ++i) {
        const bool human = t.steps[static_cast<std::size_t>(i - 1)].actor == Actor::human;
        if (human && start == 0) start = i;
        if (!human && start != 0) {
            events.push_back({start, i - 1});
            start = 0;
        }
    }
    if (start != 0) events.push_back({start, t.length()});
    return events;
}

namespace {

void require_nonempty(const std::vector<const Trajectory*>& trajs) {
    if (trajs.empty()) throw EmptyInputError("no trajectories given");
}

}  // namespace

double intervention_frequency(const std::vector<const Trajectory*>& trajs) {
    require_nonempty(trajs);
    long long events = 0, steps = 0;
    for (const Trajectory* t : trajs) {
        events += static_cast<long long>(segment_events(*t).size());
        steps += t->length();
    }
    return steps > 0 ? static_cast<double>(events) / static_cast<double>(steps) : 0.0;
}

double intervention_intensity(const std::vector<const Trajectory*>& trajs, double cap) {
    require_nonempty(trajs);
    long long human = 0, agent = 0;
    for (const Trajectory* t : trajs)
        for (const Step& s : t->steps) (s.actor == Actor::human ? human : agent)++;
    if (human == 0) return 0.0;
    if (agent == 0) return cap;
    return static_cast<double>(human) / static_cast<double>(agent);
}

double normalized_position(const std::vector<const Trajectory*>& trajs) {
    require_nonempty(trajs);
    long long n = 0;
    double sum = 0.0;
    for (const Trajectory* t : trajs) {
        const double len = t->length();
        for (const Step& s : t->steps)
            if (s.actor == Actor::human) {
                sum += static_cast<double>(s.index) / len;
                ++n;
            }
    }
    return n > 0 ? sum / static_cast<double>(n) : 1.0;
}

double handback_rate(const std::vector<const Trajectory*>& trajs) {
    require_nonempty(trajs);
    long long events = 0, handed_back = 0;
    for (const Trajectory* t : trajs)
        for (const InterventionEvent& e : segment_events(*t)) {
            ++events;
            if (e.t_end < t->length()) ++handed_back;
        }
    return events > 0 ? static_cast<double>(handed_back) / static_cast<double>(events) : 1.0;
}

UserFeatureVector user_feature_vector(const Corpus& c, const std::string& user_id,
                                      double intensity_cap) {
    const auto trajs = user_trajectories(c, user_id);
    if (trajs.empty()) throw UnknownUserError(user_id);
    UserFeatureVector f;
    f.user_id = user_id;
    f.frequency = intervention_frequency(trajs);
    f.intensity = intervention_intensity(trajs, intensity_cap);
    f.position = normalized_position(trajs);
    f.handback = handback_rate(trajs);
    return f;
}

std::vector<UserFeatureVector> all_user_features(const Corpus& c, double intensity_cap) {
    std::vector<UserFeatureVector> rows;
    for (const std::string& user : corpus_users(c))
        rows.push_back(user_feature_vector(c, user, intensity_cap));
    return rows;
}

void write_feature_csv(const std::vector<UserFeatureVector>& rows, std::ostream& out) {
    out << "user_id,frequency,intensity,position,handback\n";
    char buf[160];
    for (const UserFeatureVector& r : rows) {
        std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f,%.6f\n", r.frequency, r.intensity,
                      r.position, r.handback);
        out << r.user_id << buf;
    }
    if (!out) throw IoError("failed writing feature CSV");
}

}  // namespace coact
