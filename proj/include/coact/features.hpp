#pragma once
// Intervention-event segmentation and the four per-user behavioral features:
// how often a user intervenes, how much, where in the task, and whether
// control goes back to the agent afterwards.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "coact/corpus.hpp"

namespace coact {

// A maximal contiguous run of human-controlled steps, 1-based inclusive.
struct InterventionEvent {
    int t_start = 0;
    int t_end = 0;

    bool operator==(const InterventionEvent&) const = default;
};

// Maximal human runs in index order; their union is exactly the set of
// human steps and they are pairwise disjoint.
std::vector<InterventionEvent> segment_events(const Trajectory& t);

// intensity is a ratio of human to agent steps; an all-human history has no
// agent steps, so the value is capped to keep downstream clustering finite.
inline constexpr double kDefaultIntensityCap = 10.0;

// events / steps, pooled over the user's trajectories. Always in [0, 1].
double intervention_frequency(const std::vector<const Trajectory*>& trajs);

// human steps / agent steps, pooled. 0 with no human steps; `cap` when the
// user took every step.
double intervention_intensity(const std::vector<const Trajectory*>& trajs,
                              double cap = kDefaultIntensityCap);

// Mean of t/|traj| over human steps (1-based t), so values lie in (0, 1].
// Convention: 1.0 for users with no human steps.
double normalized_position(const std::vector<const Trajectory*>& trajs);

// Fraction of intervention events followed by at least one agent step.
// Convention: 1.0 for users with no events.
double handback_rate(const std::vector<const Trajectory*>& trajs);

struct UserFeatureVector {
    std::string user_id;
    double frequency = 0.0;
    double intensity = 0.0;
    double position = 1.0;
    double handback = 1.0;

    std::array<double, 4> as_array() const { return {frequency, intensity, position, handback}; }
};

// The four features over exactly this user's trajectories.
// Throws UnknownUserError if the user has no trajectory in `c`.
UserFeatureVector user_feature_vector(const Corpus& c, const std::string& user_id,
                                      double intensity_cap = kDefaultIntensityCap);

// One row per user, sorted by user_id.
std::vector<UserFeatureVector> all_user_features(const Corpus& c,
                                                 double intensity_cap = kDefaultIntensityCap);

// CSV with header `user_id,frequency,intensity,position,handback`, 6 d.p.
void write_feature_csv(const std::vector<UserFeatureVector>& rows, std::ostream& out);

}  // namespace coact
