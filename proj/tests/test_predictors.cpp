#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "coact/errors.hpp"
#include "coact/features.hpp"
#include "coact/predictors.hpp"
#include "coact/styles.hpp"
#include "testutil.hpp"

using namespace coact;
using testutil::corpus_of;
using testutil::traj_from_actors;

TEST_CASE("baseline traces cover every step with the right constant") {
    SplitMix64 rng(3);
    const Corpus c = testutil::random_corpus(rng, 8);
    const auto all = predict_always_interv(c);
    const auto none = predict_always_no_interv(c);
    long long steps = 0;
    for (const Trajectory& t : c.trajectories) {
        steps += t.length();
        for (int i = 1; i <= t.length(); ++i) {
            CHECK(*all.at(key_of(t), i) == 1.0);
            CHECK(*none.at(key_of(t), i) == 0.0);
        }
    }
    CHECK(static_cast<long long>(all.size()) == steps);
    CHECK(static_cast<long long>(none.size()) == steps);
}

TEST_CASE("always-interv gets full pts credit for an event at step 1") {
    const Corpus c = corpus_of({traj_from_actors("HAA")});
    CHECK(pts_corpus(c, predict_always_interv(c), PtsConfig{}, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("step features at the trajectory start") {
    const auto t = traj_from_actors("AAHA");
    const auto f = extract_step_features(t, 1);
    CHECK(f.prior_human_steps == 0.0);
    CHECK(f.steps_since_human == 1.0);
    CHECK(f.repeat_run_length == 0.0);
    CHECK(f.position_ratio == doctest::Approx(0.25));
    double onehot_sum = 0.0;
    for (double v : f.kind_onehot) onehot_sum += v;
    CHECK(onehot_sum == 1.0);
}

TEST_CASE("repeat_run_length counts identical preceding agent actions, capped") {
    auto t = traj_from_actors("AAAAAAAA");
    for (Step& s : t.steps) s.target = "el-7";
    CHECK(extract_step_features(t, 4).repeat_run_length == 3.0);
    CHECK(extract_step_features(t, 8).repeat_run_length == 5.0);  // cap
    t.steps[1].target = "el-9";  // breaks the run at step 2
    CHECK(extract_step_features(t, 4).repeat_run_length == 1.0);
    CHECK(extract_step_features(t, 3).repeat_run_length == 1.0);
    CHECK_THROWS_AS(extract_step_features(t, 0), IndexOutOfRangeError);
    CHECK_THROWS_AS(extract_step_features(t, 9), IndexOutOfRangeError);
}

TEST_CASE("repeat run breaks when the previous step is human") {
    const auto t = traj_from_actors("AAHA");
    CHECK(extract_step_features(t, 4).repeat_run_length == 0.0);
    CHECK(extract_step_features(t, 4).prior_human_steps == 1.0);
    CHECK(extract_step_features(t, 4).steps_since_human == doctest::Approx(0.25));
}

TEST_CASE("elapsed_fraction follows timestamps") {
    const auto t = traj_from_actors("AAAA");  // ts 0, 1000, 2000, 3000
    CHECK(extract_step_features(t, 1).elapsed_fraction == doctest::Approx(0.0));
    CHECK(extract_step_features(t, 3).elapsed_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(extract_step_features(t, 4).elapsed_fraction == doctest::Approx(1.0));
}

TEST_CASE("analytic gradient matches central finite differences") {
    SplitMix64 rng(23);
    const Corpus c = testutil::random_corpus(rng, 6);
    const auto [x, y] = step_dataset(c);
    REQUIRE_FALSE(x.empty());

    for (int point = 0; point < 10; ++point) {
        std::vector<double> w(StepFeatureVector::kDims);
        for (double& v : w) v = rng.next_range(-1.0, 1.0);
        const double b = rng.next_range(-1.0, 1.0);
        const double l2 = 1e-3;

        const LossGrad lg = logistic_loss_grad(x, y, w, b, l2);
        const double h = 1e-5;
        for (int j = 0; j < StepFeatureVector::kDims; ++j) {
            auto wp = w, wm = w;
            wp[static_cast<std::size_t>(j)] += h;
            wm[static_cast<std::size_t>(j)] -= h;
            const double fd = (logistic_loss_grad(x, y, wp, b, l2).loss -
                               logistic_loss_grad(x, y, wm, b, l2).loss) /
                              (2.0 * h);
            const double analytic = lg.grad_w[static_cast<std::size_t>(j)];
            const double rel = std::abs(fd - analytic) / std::max(1.0, std::abs(analytic));
            CHECK(rel <= 1e-5);
        }
        const double fdb = (logistic_loss_grad(x, y, w, b + h, l2).loss -
                            logistic_loss_grad(x, y, w, b - h, l2).loss) /
                           (2.0 * h);
        CHECK(std::abs(fdb - lg.grad_b) / std::max(1.0, std::abs(lg.grad_b)) <= 1e-5);
    }
}

namespace {

// A corpus where interventions follow three identical agent actions; the
// repeat-run feature separates the classes linearly.
Corpus separable_corpus(int n_trajectories, SplitMix64& rng) {
    Corpus c;
    for (int k = 0; k < n_trajectories; ++k) {
        const bool with_event = k % 2 == 0;
        Trajectory t = traj_from_actors(with_event ? "AAAHA" : "AAAAA",
                                        "t" + std::to_string(k), "u");
        for (int i = 0; i < 3; ++i) t.steps[static_cast<std::size_t>(i)].target = "el-loop";
        if (!with_event)
            for (int i = 0; i < 5; ++i)
                t.steps[static_cast<std::size_t>(i)].target = "el-" + std::to_string(rng.next_below(30) + i);
        c.trajectories.push_back(std::move(t));
    }
    return c;
}

}  // namespace

TEST_CASE("logistic training separates a linearly separable toy set") {
    SplitMix64 rng(31);
    const Corpus train = separable_corpus(40, rng);
    const auto model = fit_logistic(train);
    const auto trace = predict_logistic(model, train);
    long long correct = 0, total = 0;
    for (const Trajectory& t : train.trajectories) {
        const auto y = label_steps(t);
        for (int i = 1; i <= t.length(); ++i) {
            const int pred = *trace.at(key_of(t), i) >= 0.5 ? 1 : 0;
            correct += pred == y[static_cast<std::size_t>(i - 1)] ? 1 : 0;
            ++total;
        }
    }
    CHECK(correct == total);
}

TEST_CASE("training loss is non-increasing and recorded per epoch") {
    SplitMix64 rng(37);
    Corpus train = testutil::random_corpus(rng, 12);
    // random_corpus draws actors at random, so both classes are present with
    // overwhelming probability; bail out cleanly if not.
    bool has_pos = false, has_neg = false;
    for (const Trajectory& t : train.trajectories)
        for (int v : label_steps(t)) (v != 0 ? has_pos : has_neg) = true;
    REQUIRE(has_pos);
    REQUIRE(has_neg);

    const auto model = fit_logistic(train, FitConfig{0.1, 200, 1e-3, 0});
    CHECK(model.loss_history.size() == 201);
    for (std::size_t i = 1; i < model.loss_history.size(); ++i)
        CHECK(model.loss_history[i] <= model.loss_history[i - 1] + 1e-12);
}

TEST_CASE("zero-epoch training leaves the zero model predicting 0.5") {
    const Corpus train = corpus_of({traj_from_actors("AH")});
    const auto model = fit_logistic(train, FitConfig{0.1, 0, 1e-3, 0});
    const auto trace = predict_logistic(model, train);
    CHECK(*trace.at({"task_1", "user_1"}, 1) == doctest::Approx(0.5));
    CHECK(*trace.at({"task_1", "user_1"}, 2) == doctest::Approx(0.5));
}

TEST_CASE("single-class training sets are rejected") {
    CHECK_THROWS_AS(fit_logistic(corpus_of({traj_from_actors("AAAA")})), SingleClassError);
    CHECK_THROWS_AS(fit_logistic(corpus_of({traj_from_actors("HH")})), SingleClassError);
}

TEST_CASE("predictions are strict probabilities and deterministic") {
    SplitMix64 rng(43);
    const Corpus c = separable_corpus(20, rng);
    const auto model = fit_logistic(c);
    const auto a = predict_logistic(model, c);
    const auto b = predict_logistic(model, c);
    for (const Trajectory& t : c.trajectories)
        for (int i = 1; i <= t.length(); ++i) {
            const double p = *a.at(key_of(t), i);
            CHECK(p > 0.0);
            CHECK(p < 1.0);
            CHECK(p == *b.at(key_of(t), i));
        }
    CHECK_THROWS_AS(predict_logistic(LogisticModel{}, c), UnfittedModelError);
}

TEST_CASE("model save/load round-trips the numbers") {
    SplitMix64 rng(47);
    const Corpus c = separable_corpus(10, rng);
    const auto model = fit_logistic(c);
    std::ostringstream out;
    save_model(model, out);
    std::istringstream in(out.str());
    const auto loaded = load_model(in);
    CHECK(loaded.weights == model.weights);
    CHECK(loaded.bias == model.bias);
    CHECK(loaded.feature_means == model.feature_means);
    CHECK(loaded.feature_stds == model.feature_stds);
    CHECK(loaded.threshold == model.threshold);

    const auto t1 = predict_logistic(model, c);
    const auto t2 = predict_logistic(loaded, c);
    for (const Trajectory& t : c.trajectories)
        for (int i = 1; i <= t.length(); ++i) CHECK(*t1.at(key_of(t), i) == *t2.at(key_of(t), i));

    std::istringstream bad("{\"weights\": [1,2]}");
    CHECK_THROWS_AS(load_model(bad), ParseError);
}

TEST_CASE("calibrate_threshold picks the argmax with lowest-threshold ties") {
    SplitMix64 rng(53);
    const Corpus c = separable_corpus(30, rng);
    const auto model = fit_logistic(c);

    SUBCASE("f1 objective beats or matches the default threshold") {
        const double threshold = calibrate_threshold(model, c, Objective::f1);
        const auto trace = predict_logistic(model, c);
        const auto value_at = [&](double th) {
            std::vector<int> labels, preds;
            for (const Trajectory& t : c.trajectories) {
                const auto y = label_steps(t);
                labels.insert(labels.end(), y.begin(), y.end());
                for (int i = 1; i <= t.length(); ++i)
                    preds.push_back(*trace.at(key_of(t), i) >= th ? 1 : 0);
            }
            return prf1(confusion_counts(labels, preds)).interv.f1;
        };
        CHECK(value_at(threshold) >= value_at(0.5));
    }
    SUBCASE("flat objective falls back to the lowest grid point") {
        const auto zero = fit_logistic(c, FitConfig{0.1, 0, 1e-3, 0});  // constant 0.5
        CHECK(calibrate_threshold(zero, c, Objective::f1) == doctest::Approx(0.05));
    }
    SUBCASE("empty validation is rejected") {
        CHECK_THROWS_AS(calibrate_threshold(model, Corpus{}, Objective::f1),
                        EmptyValidationError);
    }
}

TEST_CASE("stratified_split partitions and balances the positive fraction") {
    SplitMix64 rng(59);
    Corpus c;
    for (int i = 0; i < 120; ++i) {
        const int human = static_cast<int>(rng.next_int(0, 2));
        std::string actors(8, 'A');
        for (int h = 0; h < human; ++h) actors[static_cast<std::size_t>(rng.next_int(1, 7))] = 'H';
        c.trajectories.push_back(
            testutil::traj_from_actors(actors, "t" + std::to_string(i), "u" + std::to_string(i % 10)));
    }
    SplitSpec spec;
    spec.seed = 4;
    const auto [train, test] = stratified_split(c, spec);

    CHECK(train.trajectories.size() + test.trajectories.size() == c.trajectories.size());
    std::set<std::pair<std::string, std::string>> seen;
    for (const Corpus* side : {&train, &test})
        for (const Trajectory& t : side->trajectories)
            CHECK(seen.insert({t.task_id, t.user_id}).second);

    const auto pos_fraction = [](const Corpus& corpus) {
        long long pos = 0, total = 0;
        for (const Trajectory& t : corpus.trajectories) {
            for (int v : label_steps(t)) pos += v;
            total += t.length();
        }
        return static_cast<double>(pos) / static_cast<double>(total);
    };
    const double overall = pos_fraction(c);
    CHECK(std::abs(pos_fraction(train) - overall) <= spec.ratio_tolerance);
    CHECK(std::abs(pos_fraction(test) - overall) <= spec.ratio_tolerance);
    const auto n_train = static_cast<double>(train.trajectories.size());
    CHECK(std::abs(n_train - 0.8 * 120.0) <= 1.0);

    // Determinism.
    const auto [train2, test2] = stratified_split(c, spec);
    CHECK(train2 == train);
    CHECK(test2 == test);
}

TEST_CASE("a homogeneous corpus splits at exactly the overall fraction") {
    Corpus c;
    for (int i = 0; i < 40; ++i)
        c.trajectories.push_back(traj_from_actors("AAHA", "t" + std::to_string(i), "u"));
    const auto [train, test] = stratified_split(c, SplitSpec{});
    for (const Corpus* side : {&train, &test}) {
        long long pos = 0, total = 0;
        for (const Trajectory& t : side->trajectories) {
            for (int v : label_steps(t)) pos += v;
            total += t.length();
        }
        CHECK(static_cast<double>(pos) / static_cast<double>(total) == doctest::Approx(0.25));
    }
}

TEST_CASE("style exclusions drop users before splitting") {
    Corpus c;
    for (int i = 0; i < 20; ++i)
        c.trajectories.push_back(
            traj_from_actors(i % 2 == 0 ? "AAHA" : "AAAA", "t" + std::to_string(i),
                             i % 2 == 0 ? "active" : "idle"));
    const std::map<std::string, std::string> styles = {{"active", styles::kHandsOn},
                                                       {"idle", styles::kHandsOff}};
    SplitSpec spec;
    spec.exclude_styles = {styles::kHandsOff};
    const auto [train, test] = stratified_split(c, spec, &styles);
    for (const Corpus* side : {&train, &test})
        for (const Trajectory& t : side->trajectories) CHECK(t.user_id == "active");
    CHECK(train.trajectories.size() + test.trajectories.size() == 10);
}

TEST_CASE("split without enough event-containing trajectories fails") {
    Corpus c;
    for (int i = 0; i < 10; ++i)
        c.trajectories.push_back(traj_from_actors("AAAA", "t" + std::to_string(i), "u"));
    c.trajectories.push_back(traj_from_actors("AAHA", "t_x", "u"));
    CHECK_THROWS_AS(stratified_split(c, SplitSpec{}), InfeasibleSplitError);
}

TEST_CASE("style-adapted refit warm-starts from the base model") {
    SplitMix64 rng(61);
    const Corpus c = separable_corpus(30, rng);
    const auto base = fit_logistic(c);
    const auto adapted = adapt_logistic(base, c, FitConfig{0.1, 50, 1e-3, 0});
    CHECK(adapted.fitted);
    CHECK(adapted.feature_means == base.feature_means);
    // Loss history starts at the base model's loss, not the zero model's.
    const auto zero = fit_logistic(c, FitConfig{0.1, 0, 1e-3, 0});
    CHECK(adapted.loss_history.front() < zero.loss_history.front());
}
