#include "coact/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "coact/errors.hpp"
#include "coact/features.hpp"
#include "coact/rng.hpp"
#include "coact/styles.hpp"

namespace coact {

std::map<std::string, StyleParams> style_presets() {
    std::map<std::string, StyleParams> presets;
    //                          hazard  bias_a bias_b len_p  handback signal
    presets[styles::kTakeover] = {styles::kTakeover, 0.05, 5.0, 1.8, 0.60, 0.08, 0.8};
    presets[styles::kHandsOn] = {styles::kHandsOn, 0.22, 3.0, 1.8, 0.45, 0.55, 0.8};
    presets[styles::kHandsOff] = {styles::kHandsOff, 0.008, 2.0, 2.0, 0.25, 1.00, 0.8};
    presets[styles::kCollaborative] = {styles::kCollaborative, 0.12, 1.6, 3.2, 0.30, 0.95, 0.8};
    return presets;
}

std::map<std::string, StyleParams> neutral_style(double signal_p, double hazard_base) {
    StyleParams p;
    p.name = "Mixed";
    p.hazard_base = hazard_base;
    p.bias_a = 2.0;
    p.bias_b = 2.0;
    p.event_len_p = 0.65;
    p.handback_p = 0.9;
    p.signal_p = signal_p;
    return {{p.name, p}};
}

namespace {

void check_params(const StyleParams& p) {
    const bool ok = p.hazard_base >= 0.0 && p.hazard_base < 1.0 && p.bias_a > 0.0 &&
                    p.bias_b > 0.0 && p.event_len_p >= 0.0 && p.event_len_p < 1.0 &&
                    p.handback_p >= 0.0 && p.handback_p <= 1.0 && p.signal_p >= 0.0 &&
                    p.signal_p <= 1.0;
    if (!ok) throw ConfigError("style parameters out of range for " + p.name);
}

std::string slug(const std::string& name) {
    std::string s;
    for (char ch : name)
        s.push_back(std::isalnum(static_cast<unsigned char>(ch))
                        ? static_cast<char>(std::tolower(static_cast<unsigned char>(ch)))
                        : '_');
    return s;
}

ActionKind draw_kind(SplitMix64& rng) {
    // Rough frequencies of web-UI actions; exact numbers only shape texture.
    static constexpr std::array<std::pair<ActionKind, double>, 7> table = {{
        {ActionKind::click, 0.34},
        {ActionKind::type, 0.18},
        {ActionKind::navigate, 0.14},
        {ActionKind::select, 0.10},
        {ActionKind::submit, 0.08},
        {ActionKind::scroll, 0.12},
        {ActionKind::other, 0.04},
    }};
    const double r = rng.next_double();
    double cum = 0.0;
    for (const auto& [kind, p] : table) {
        cum += p;
        if (r < cum) return kind;
    }
    return ActionKind::other;
}

Trajectory make_trajectory(const StyleParams& p, const GeneratorConfig& cfg, SplitMix64& rng,
                           const std::string& task_id, const std::string& user_id,
                           TaskCategory category) {
    const int T = 1 + rng.next_poisson(std::max(cfg.mean_length - 1.0, 0.0));

    // Hazard weights from the (unnormalized) Beta density at step midpoints,
    // normalized to mean 1 so hazard_base stays the average event rate.
    std::vector<double> weight(static_cast<std::size_t>(T));
    double weight_sum = 0.0;
    for (int t = 1; t <= T; ++t) {
        const double xpos = (static_cast<double>(t) - 0.5) / static_cast<double>(T);
        weight[static_cast<std::size_t>(t - 1)] =
            std::pow(xpos, p.bias_a - 1.0) * std::pow(1.0 - xpos, p.bias_b - 1.0);
        weight_sum += weight[static_cast<std::size_t>(t - 1)];
    }
    for (double& w : weight) w *= static_cast<double>(T) / weight_sum;

    std::vector<Actor> actors(static_cast<std::size_t>(T), Actor::agent);
    std::vector<std::pair<int, int>> events;  // [start, end], 1-based inclusive
    int t = 1;
    while (t <= T) {
        const double hazard =
            std::min(0.95, p.hazard_base * weight[static_cast<std::size_t>(t - 1)]);
        if (rng.next_double() < hazard) {
            const int len = std::min(rng.next_geometric_run(p.event_len_p), T - t + 1);
            for (int i = t; i < t + len; ++i) actors[static_cast<std::size_t>(i - 1)] = Actor::human;
            events.emplace_back(t, t + len - 1);
            t += len + 1;  // keep one agent step after the run so events stay maximal
        } else {
            ++t;
        }
    }
    if (!events.empty() && rng.next_double() < 1.0 - p.handback_p) {
        auto& [start, end] = events.back();
        for (int i = start; i <= T; ++i) actors[static_cast<std::size_t>(i - 1)] = Actor::human;
        end = T;
    }

    Trajectory traj;
    traj.task_id = task_id;
    traj.user_id = user_id;
    traj.category = category;
    traj.instruction = "scripted collaborative session " + task_id;

    std::int64_t ts = 0;
    for (int i = 1; i <= T; ++i) {
        Step s = make_step(i, actors[static_cast<std::size_t>(i - 1)], draw_kind(rng), ts);
        if (s.kind == ActionKind::navigate) {
            s.value = "https://example.net/page-" + std::to_string(rng.next_below(30));
        } else {
            s.target = "el-" + std::to_string(rng.next_below(40));
            if (s.kind == ActionKind::type)
                s.value = "input-" + std::to_string(rng.next_below(100));
        }
        s.observation_ref = "obs/" + task_id + "/" + std::to_string(i) + ".png";
        const std::int64_t dur = rng.next_int(500, 15000);
        s.duration_ms = dur;
        traj.steps.push_back(std::move(s));
        ts += dur;
    }

    // Plant the loop signal: the 3 agent steps before an event share one
    // (kind, target) pair, which is what the repeat-run feature picks up.
    for (const auto& [start, end] : events) {
        (void)end;
        if (start < 4) continue;
        bool free = true;
        for (int i = start - 3; i < start; ++i)
            if (actors[static_cast<std::size_t>(i - 1)] != Actor::agent) free = false;
        if (!free) continue;
        if (rng.next_double() >= p.signal_p) continue;
        const Step& proto = traj.steps[static_cast<std::size_t>(start - 4)];
        for (int i = start - 2; i < start; ++i) {
            Step& s = traj.steps[static_cast<std::size_t>(i - 1)];
            s.kind = proto.kind;
            s.kind_raw = proto.kind_raw;
            s.target = proto.target;
            s.value = proto.value;
        }
    }
    return traj;
}

}  // namespace

SynthResult generate_corpus(const std::map<std::string, StyleParams>& params,
                            const GeneratorConfig& cfg) {
    if (params.empty()) throw ConfigError("no styles given");
    if (cfg.users_per_style < 1 || cfg.tasks_per_user < 1)
        throw ConfigError("users_per_style and tasks_per_user must be >= 1");
    if (cfg.mean_length < 1.0) throw ConfigError("mean_length must be >= 1");
    for (const auto& [name, p] : params) {
        (void)name;
        check_params(p);
    }

    SynthResult result;
    std::uint64_t user_ordinal = 0;
    for (const auto& [name, p] : params) {
        for (int u = 1; u <= cfg.users_per_style; ++u, ++user_ordinal) {
            char id[96];
            std::snprintf(id, sizeof(id), "%s_%02d", slug(name).c_str(), u);
            const std::string user_id = id;
            result.styles[user_id] = name;

            SplitMix64 rng(SplitMix64::derive(cfg.seed, user_ordinal));
            for (int task = 1; task <= cfg.tasks_per_user; ++task) {
                char tid[32];
                std::snprintf(tid, sizeof(tid), "task_%03d", task);
                const TaskCategory category = task <= cfg.tasks_per_user / 2
                                                  ? TaskCategory::standard
                                                  : TaskCategory::freeform;
                result.corpus.trajectories.push_back(
                    make_trajectory(p, cfg, rng, tid, user_id, category));
            }
        }
    }
    return result;
}

}  // namespace coact
