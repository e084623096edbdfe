#include "coact/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "coact/errors.hpp"
#include "coact/features.hpp"
#include "coact/rng.hpp"
#include "json.hpp"

namespace coact {

std::array<double, StepFeatureVector::kDims> StepFeatureVector::as_array() const {
    std::array<double, kDims> a{};
    a[0] = position_ratio;
    a[1] = prior_human_steps;
    a[2] = steps_since_human;
    a[3] = repeat_run_length;
    for (int k = 0; k < kNumActionKinds; ++k) a[static_cast<std::size_t>(4 + k)] = kind_onehot[static_cast<std::size_t>(k)];
    a[11] = elapsed_fraction;
    return a;
}

namespace {

bool same_action(const Step& a, const Step& b) {
    if (a.kind != b.kind || a.target != b.target) return false;
    // Two `other` steps only match when their raw tags agree.
    return a.kind != ActionKind::other || a.kind_raw == b.kind_raw;
}

}  // namespace

StepFeatureVector extract_step_features(const Trajectory& t, int step) {
    const int T = t.length();
    if (step < 1 || step > T)
        throw IndexOutOfRangeError("step " + std::to_string(step) + " outside 1.." +
                                   std::to_string(T));

    StepFeatureVector f;
    f.position_ratio = static_cast<double>(step) / static_cast<double>(T);

    int prior_human = 0;
    int last_human = 0;
    for (int i = 1; i < step; ++i)
        if (t.steps[static_cast<std::size_t>(i - 1)].actor == Actor::human) {
            ++prior_human;
            last_human = i;
        }
    f.prior_human_steps = prior_human;
    f.steps_since_human =
        last_human == 0 ? 1.0
                        : std::min<double>(step - last_human, T) / static_cast<double>(T);

    int run = 0;
    if (step >= 2) {
        const Step& prev = t.steps[static_cast<std::size_t>(step - 2)];
        if (prev.actor == Actor::agent) {
            run = 1;
            for (int i = step - 2; i >= 1 && run < 5; --i) {
                const Step& s = t.steps[static_cast<std::size_t>(i - 1)];
                if (s.actor != Actor::agent || !same_action(s, prev)) break;
                ++run;
            }
        }
    }
    f.repeat_run_length = run;

    f.kind_onehot[static_cast<std::size_t>(t.steps[static_cast<std::size_t>(step - 1)].kind)] = 1.0;

    const std::int64_t first_ts = t.steps.front().timestamp_ms;
    const std::int64_t span = t.steps.back().timestamp_ms - first_ts;
    f.elapsed_fraction =
        span > 0 ? static_cast<double>(t.steps[static_cast<std::size_t>(step - 1)].timestamp_ms -
                                       first_ts) /
                       static_cast<double>(span)
                 : 0.0;
    return f;
}

std::pair<std::vector<std::array<double, StepFeatureVector::kDims>>, std::vector<int>>
step_dataset(const Corpus& c) {
    std::vector<std::array<double, StepFeatureVector::kDims>> x;
    std::vector<int> y;
    for (const Trajectory* t : sorted_trajectories(c)) {
        const std::vector<int> labels = label_steps(*t);
        for (int i = 1; i <= t->length(); ++i) {
            x.push_back(extract_step_features(*t, i).as_array());
            y.push_back(labels[static_cast<std::size_t>(i - 1)]);
        }
    }
    return {std::move(x), std::move(y)};
}

LossGrad logistic_loss_grad(const std::vector<std::array<double, StepFeatureVector::kDims>>& x,
                            const std::vector<int>& y, const std::vector<double>& w, double bias,
                            double l2) {
    constexpr int D = StepFeatureVector::kDims;
    const std::size_t n = x.size();
    LossGrad out;
    out.grad_w.assign(D, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double z = bias;
        for (int j = 0; j < D; ++j) z += w[static_cast<std::size_t>(j)] * x[i][static_cast<std::size_t>(j)];
        const double p = sigmoid(z);
        // Numerically stable cross-entropy: softplus(z) - y*z.
        const double softplus = std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0);
        out.loss += softplus - static_cast<double>(y[i]) * z;
        const double resid = p - static_cast<double>(y[i]);
        for (int j = 0; j < D; ++j) out.grad_w[static_cast<std::size_t>(j)] += resid * x[i][static_cast<std::size_t>(j)];
        out.grad_b += resid;
    }
    const double nd = static_cast<double>(n);
    out.loss /= nd;
    out.grad_b /= nd;
    double reg = 0.0;
    for (int j = 0; j < D; ++j) {
        out.grad_w[static_cast<std::size_t>(j)] =
            out.grad_w[static_cast<std::size_t>(j)] / nd + l2 * w[static_cast<std::size_t>(j)];
        reg += w[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)];
    }
    out.loss += 0.5 * l2 * reg;
    return out;
}

namespace {

constexpr int D = StepFeatureVector::kDims;

void standardize_in_place(std::vector<std::array<double, D>>& x, const std::vector<double>& means,
                          const std::vector<double>& stds) {
    for (auto& row : x)
        for (int j = 0; j < D; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            row[ju] = stds[ju] > 0.0 ? (row[ju] - means[ju]) / stds[ju] : 0.0;
        }
}

LogisticModel run_descent(std::vector<std::array<double, D>> x, const std::vector<int>& y,
                          const FitConfig& cfg, double lr, std::vector<double> means,
                          std::vector<double> stds, std::vector<double> w0, double b0) {
    standardize_in_place(x, means, stds);

    LogisticModel model;
    model.weights = std::move(w0);
    model.bias = b0;
    model.feature_means = std::move(means);
    model.feature_stds = std::move(stds);
    model.l2 = cfg.l2;
    model.config = cfg;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const LossGrad lg = logistic_loss_grad(x, y, model.weights, model.bias, cfg.l2);
        model.loss_history.push_back(lg.loss);
        for (int j = 0; j < D; ++j)
            model.weights[static_cast<std::size_t>(j)] -= lr * lg.grad_w[static_cast<std::size_t>(j)];
        model.bias -= lr * lg.grad_b;
    }
    model.loss_history.push_back(
        logistic_loss_grad(x, y, model.weights, model.bias, cfg.l2).loss);
    model.fitted = true;
    return model;
}

void check_two_classes(const std::vector<int>& y) {
    const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
    if (!has_pos || !has_neg)
        throw SingleClassError("training set must contain intervention and non-intervention steps");
}

}  // namespace

LogisticModel fit_logistic(const Corpus& train, const FitConfig& cfg) {
    auto [x, y] = step_dataset(train);
    check_two_classes(y);

    std::vector<double> means(D, 0.0), stds(D, 0.0);
    const double n = static_cast<double>(x.size());
    for (const auto& row : x)
        for (int j = 0; j < D; ++j) means[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
    for (int j = 0; j < D; ++j) means[static_cast<std::size_t>(j)] /= n;
    for (const auto& row : x)
        for (int j = 0; j < D; ++j) {
            const double d = row[static_cast<std::size_t>(j)] - means[static_cast<std::size_t>(j)];
            stds[static_cast<std::size_t>(j)] += d * d;
        }
    for (int j = 0; j < D; ++j) stds[static_cast<std::size_t>(j)] = std::sqrt(stds[static_cast<std::size_t>(j)] / n);

    return run_descent(std::move(x), y, cfg, cfg.lr, std::move(means), std::move(stds),
                       std::vector<double>(D, 0.0), 0.0);
}

LogisticModel adapt_logistic(const LogisticModel& base, const Corpus& subset,
                             const FitConfig& cfg) {
    if (!base.fitted) throw UnfittedModelError("base model is not fitted");
    auto [x, y] = step_dataset(subset);
    check_two_classes(y);
    LogisticModel adapted = run_descent(std::move(x), y, cfg, cfg.lr / 10.0, base.feature_means,
                                        base.feature_stds, base.weights, base.bias);
    adapted.threshold = base.threshold;
    return adapted;
}

PredictionTrace predict_logistic(const LogisticModel& model, const Corpus& c) {
    if (!model.fitted) throw UnfittedModelError("model is not fitted");
    PredictionTrace trace;
    for (const Trajectory* t : sorted_trajectories(c)) {
        const TrajKey key = key_of(*t);
        for (int i = 1; i <= t->length(); ++i) {
            const auto raw = extract_step_features(*t, i).as_array();
            double z = model.bias;
            for (int j = 0; j < D; ++j) {
                const auto ju = static_cast<std::size_t>(j);
                const double xj = model.feature_stds[ju] > 0.0
                                      ? (raw[ju] - model.feature_means[ju]) / model.feature_stds[ju]
                                      : 0.0;
                z += model.weights[ju] * xj;
            }
            trace.add(key, i, sigmoid(z));
        }
    }
    return trace;
}

namespace {

PredictionTrace constant_trace(const Corpus& c, double p) {
    PredictionTrace trace;
    for (const Trajectory& t : c.trajectories)
        for (int i = 1; i <= t.length(); ++i) trace.add(key_of(t), i, p);
    return trace;
}

}  // namespace

PredictionTrace predict_always_interv(const Corpus& c) { return constant_trace(c, 1.0); }

PredictionTrace predict_always_no_interv(const Corpus& c) { return constant_trace(c, 0.0); }

Objective objective_from_string(const std::string& s) {
    if (s == "pts") return Objective::pts;
    if (s == "f1") return Objective::f1;
    throw ConfigError("objective must be \"pts\" or \"f1\", got \"" + s + "\"");
}

double calibrate_threshold(const LogisticModel& model, const Corpus& validation, Objective obj,
                           const PtsConfig& pts_cfg) {
    if (validation.trajectories.empty()) throw EmptyValidationError("validation corpus is empty");
    const PredictionTrace trace = predict_logistic(model, validation);

    std::vector<int> labels;
    std::vector<double> probs;
    for (const Trajectory* t : sorted_trajectories(validation)) {
        const auto y = label_steps(*t);
        labels.insert(labels.end(), y.begin(), y.end());
        for (int i = 1; i <= t->length(); ++i) probs.push_back(*trace.at(key_of(*t), i));
    }

    double best_threshold = 0.05, best_value = -1.0;
    for (int i = 1; i <= 19; ++i) {
        const double threshold = static_cast<double>(i) / 20.0;
        double value = 0.0;
        if (obj == Objective::pts) {
            value = pts_corpus(validation, trace, pts_cfg, threshold);
        } else {
            std::vector<int> preds(probs.size());
            for (std::size_t j = 0; j < probs.size(); ++j) preds[j] = probs[j] >= threshold ? 1 : 0;
            value = prf1(confusion_counts(labels, preds)).interv.f1;
        }
        if (value > best_value) {
            best_value = value;
            best_threshold = threshold;
        }
    }
    return best_threshold;
}

std::pair<Corpus, Corpus> stratified_split(const Corpus& c, const SplitSpec& spec,
                                           const std::map<std::string, std::string>* styles) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ConfigError("train_fraction must be in (0, 1)");

    std::vector<const Trajectory*> pool;
    for (const Trajectory* t : sorted_trajectories(c)) {
        if (styles) {
            auto it = styles->find(t->user_id);
            if (it != styles->end() && spec.exclude_styles.contains(it->second)) continue;
        }
        pool.push_back(t);
    }

    long long with_events = 0;
    for (const Trajectory* t : pool)
        if (!segment_events(*t).empty()) ++with_events;
    if (with_events < 2)
        throw InfeasibleSplitError("fewer than 2 event-containing trajectories after exclusions");

    // Shuffle for tie order, then largest-positive-first so the greedy quota
    // balancing places the hard trajectories while both sides are open.
    SplitMix64 rng(spec.seed);
    rng.shuffle(pool);
    const auto positives = [](const Trajectory* t) {
        long long n = 0;
        for (const Step& s : t->steps)
            if (s.actor == Actor::human) ++n;
        return n;
    };
    std::stable_sort(pool.begin(), pool.end(), [&](const Trajectory* a, const Trajectory* b) {
        return positives(a) > positives(b);
    });

    const std::size_t n = pool.size();
    auto n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    long long total_pos = 0, total_steps = 0;
    for (const Trajectory* t : pool) {
        total_pos += positives(t);
        total_steps += t->length();
    }
    const double target_train = spec.train_fraction * static_cast<double>(total_pos);
    const double target_test = static_cast<double>(total_pos) - target_train;

    std::set<const Trajectory*> in_train;
    std::size_t train_slots = n_train, test_slots = n - n_train;
    double train_pos = 0.0, test_pos = 0.0;
    for (const Trajectory* t : pool) {
        const double deficit_train = target_train - train_pos;
        const double deficit_test = target_test - test_pos;
        bool to_train;
        if (train_slots == 0)
            to_train = false;
        else if (test_slots == 0)
            to_train = true;
        else if (deficit_train != deficit_test)
            to_train = deficit_train > deficit_test;
        else
            to_train = train_slots >= test_slots;
        if (to_train) {
            in_train.insert(t);
            --train_slots;
            train_pos += static_cast<double>(positives(t));
        } else {
            --test_slots;
            test_pos += static_cast<double>(positives(t));
        }
    }

    Corpus train, test;
    long long train_steps = 0, test_steps = 0;
    for (const Trajectory& t : c.trajectories) {
        const Trajectory* addr = &t;
        const bool kept = std::find(pool.begin(), pool.end(), addr) != pool.end();
        if (!kept) continue;
        if (in_train.contains(addr)) {
            train.trajectories.push_back(t);
            train_steps += t.length();
        } else {
            test.trajectories.push_back(t);
            test_steps += t.length();
        }
    }

    const double overall = total_steps > 0 ? static_cast<double>(total_pos) / static_cast<double>(total_steps) : 0.0;
    const double train_frac = train_steps > 0 ? train_pos / static_cast<double>(train_steps) : 0.0;
    const double test_frac = test_steps > 0 ? test_pos / static_cast<double>(test_steps) : 0.0;
    if (std::abs(train_frac - overall) > spec.ratio_tolerance ||
        std::abs(test_frac - overall) > spec.ratio_tolerance) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "cannot meet ratio tolerance %.4f: overall %.4f, train %.4f, test %.4f",
                      spec.ratio_tolerance, overall, train_frac, test_frac);
        throw InfeasibleSplitError(msg);
    }
    return {std::move(train), std::move(test)};
}

void save_model(const LogisticModel& model, std::ostream& out) {
    nlohmann::ordered_json j;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["feature_means"] = model.feature_means;
    j["feature_stds"] = model.feature_stds;
    j["l2"] = model.l2;
    j["threshold"] = model.threshold;
    j["config"] = {{"lr", model.config.lr},
                   {"epochs", model.config.epochs},
                   {"l2", model.config.l2},
                   {"seed", model.config.seed}};
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing model");
}

LogisticModel load_model(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw ParseError(1, std::string("invalid model JSON: ") + e.what());
    }
    LogisticModel model;
    try {
        model.weights = j.at("weights").get<std::vector<double>>();
        model.bias = j.at("bias").get<double>();
        model.feature_means = j.at("feature_means").get<std::vector<double>>();
        model.feature_stds = j.at("feature_stds").get<std::vector<double>>();
        model.l2 = j.at("l2").get<double>();
        model.threshold = j.at("threshold").get<double>();
        const auto& cfg = j.at("config");
        model.config.lr = cfg.at("lr").get<double>();
        model.config.epochs = cfg.at("epochs").get<int>();
        model.config.l2 = cfg.at("l2").get<double>();
        model.config.seed = cfg.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("bad model JSON: ") + e.what());
    }
    if (model.weights.size() != D || model.feature_means.size() != D ||
        model.feature_stds.size() != D)
        throw ParseError(1, "model vectors must have " + std::to_string(D) + " entries");
    model.fitted = true;
    return model;
}

}  // namespace coact
