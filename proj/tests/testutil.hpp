#pragma once
// Shared helpers for the test suites: compact trajectory builders, random
// corpus generators (independent of the synth module), and brute-force
// oracles used to cross-check the library implementations.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "coact/corpus.hpp"
#include "coact/metrics.hpp"
#include "coact/rng.hpp"

namespace testutil {

// "AAHA" -> agent, agent, human, agent; timestamps 0, 1000, 2000, ...
inline coact::Trajectory traj_from_actors(const std::string& actors,
                                          const std::string& task_id = "task_1",
                                          const std::string& user_id = "user_1") {
    coact::Trajectory t;
    t.task_id = task_id;
    t.user_id = user_id;
    t.category = coact::TaskCategory::standard;
    t.instruction = "test";
    for (std::size_t i = 0; i < actors.size(); ++i) {
        const auto actor = actors[i] == 'H' ? coact::Actor::human : coact::Actor::agent;
        auto s = coact::make_step(static_cast<int>(i) + 1, actor, coact::ActionKind::click,
                                  static_cast<std::int64_t>(i) * 1000);
        s.duration_ms = 1000;
        t.steps.push_back(std::move(s));
    }
    return t;
}

inline coact::Corpus corpus_of(std::vector<coact::Trajectory> trajs) {
    coact::Corpus c;
    c.trajectories = std::move(trajs);
    return c;
}

// Random but always-valid trajectory with optional fields present or absent
// at random, exercising the full serialization surface.
inline coact::Trajectory random_trajectory(coact::SplitMix64& rng, const std::string& task_id,
                                           const std::string& user_id) {
    static const char* kinds[] = {"click", "type", "navigate", "select",
                                  "submit", "scroll", "hover", "drag"};
    coact::Trajectory t;
    t.task_id = task_id;
    t.user_id = user_id;
    t.category = rng.next_double() < 0.5 ? coact::TaskCategory::standard
                                         : coact::TaskCategory::freeform;
    t.instruction = "instr-" + std::to_string(rng.next_below(1000));
    const int len = static_cast<int>(rng.next_int(1, 12));
    std::int64_t ts = 0;
    for (int i = 1; i <= len; ++i) {
        coact::Step s;
        s.index = i;
        s.actor = rng.next_double() < 0.25 ? coact::Actor::human : coact::Actor::agent;
        s.kind_raw = kinds[rng.next_below(8)];
        s.kind = coact::kind_from_string(s.kind_raw);
        if (rng.next_double() < 0.7) s.target = "el-" + std::to_string(rng.next_below(50));
        if (rng.next_double() < 0.4) s.value = "v-" + std::to_string(rng.next_below(50));
        s.timestamp_ms = ts;
        ts += rng.next_int(0, 5000);  // non-decreasing, zero gaps allowed
        if (rng.next_double() < 0.8) s.duration_ms = rng.next_int(0, 20000);
        if (rng.next_double() < 0.5)
            s.observation_ref = "obs/" + std::to_string(rng.next_below(100)) + ".png";
        t.steps.push_back(std::move(s));
    }
    return t;
}

inline coact::Corpus random_corpus(coact::SplitMix64& rng, int n_trajectories) {
    coact::Corpus c;
    for (int i = 0; i < n_trajectories; ++i)
        c.trajectories.push_back(random_trajectory(rng, "task_" + std::to_string(i),
                                                   "user_" + std::to_string(rng.next_below(5))));
    return c;
}

// --- oracles ---------------------------------------------------------------

// Event segmentation by direct linear scan over the actor sequence.
inline std::vector<std::pair<int, int>> scan_events(const coact::Trajectory& t) {
    std::vector<std::pair<int, int>> events;
    int i = 1;
    const int T = t.length();
    while (i <= T) {
        if (t.steps[static_cast<std::size_t>(i - 1)].actor == coact::Actor::human) {
            int j = i;
            while (j < T && t.steps[static_cast<std::size_t>(j)].actor == coact::Actor::human) ++j;
            events.emplace_back(i, j);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return events;
}

// Straight-line PTS re-implementation: enumerate events and their windows
// from scratch, score each event, average. Kept deliberately independent of
// the library code path.
inline double pts_oracle(const coact::Trajectory& t, const std::vector<int>& yhat_1based,
                         double alpha) {
    const auto events = scan_events(t);
    if (events.empty()) return -1.0;  // caller decides how to treat event-free
    const auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    double total = 0.0;
    int prev_end = 0;
    for (const auto& [start, end] : events) {
        double score = 0.0;
        if (yhat_1based[static_cast<std::size_t>(start)] == 1) {
            double penalty = 0.0;
            for (int i = prev_end + 1; i < start; ++i)
                if (yhat_1based[static_cast<std::size_t>(i)] == 1)
                    penalty += alpha * (start - i) * (start - i);
            score = sig(1.0 - penalty) / sig(1.0);
        }
        total += score;
        prev_end = end;
    }
    return total / static_cast<double>(events.size());
}

// Element-wise confusion tally.
inline std::array<long long, 4> confusion_oracle(const std::vector<int>& y,
                                                 const std::vector<int>& p) {
    std::array<long long, 4> tally{};  // tp, fp, tn, fn
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1 && p[i] == 1) ++tally[0];
        if (y[i] == 0 && p[i] == 1) ++tally[1];
        if (y[i] == 0 && p[i] == 0) ++tally[2];
        if (y[i] == 1 && p[i] == 0) ++tally[3];
    }
    return tally;
}

// Power iteration with deflation on a 4x4 symmetric matrix; an eigensolver
// on a different algorithmic route than the library's Jacobi sweep.
inline void power_eigen_4x4(std::array<std::array<double, 4>, 4> a,
                            std::array<double, 4>& values,
                            std::array<std::array<double, 4>, 4>& vectors) {
    // Shift so the matrix is positive definite and the dominant eigenvalue
    // of the shifted matrix corresponds to the largest original one.
    double norm_bound = 0.0;
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += std::abs(a[i][j]);
        norm_bound = std::max(norm_bound, row);
    }
    const double shift = norm_bound + 1.0;
    for (int i = 0; i < 4; ++i) a[i][i] += shift;

    for (int k = 0; k < 4; ++k) {
        std::array<double, 4> v{};
        v[static_cast<std::size_t>(k)] = 1.0;  // deterministic start
        v[(static_cast<std::size_t>(k) + 1) % 4] = 0.5;
        double lambda = 0.0;
        for (int it = 0; it < 20000; ++it) {
            std::array<double, 4> w{};
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) w[static_cast<std::size_t>(i)] += a[i][j] * v[static_cast<std::size_t>(j)];
            double n = 0.0;
            for (double x : w) n += x * x;
            n = std::sqrt(n);
            if (n == 0.0) break;
            for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / n;
            lambda = n;
        }
        values[static_cast<std::size_t>(k)] = lambda - shift;
        vectors[static_cast<std::size_t>(k)] = v;
        // Deflate: a -= lambda * v v^T.
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                a[i][j] -= lambda * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
    }
}

}  // namespace testutil
