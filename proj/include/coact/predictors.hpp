#pragma once
// Intervention predictors: the two non-learning baselines, a trainable
// logistic model over hand-crafted step features, threshold calibration,
// and the trajectory-level stratified splitter.
//
// The step features look only at step metadata and the visible action
// history (actors, action kinds/targets, timestamps); observation payloads
// stay opaque. Feature order, also the weight-vector order:
//   [position_ratio, prior_human_steps, steps_since_human,
//    repeat_run_length, kind one-hot x7, elapsed_fraction]

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coact/corpus.hpp"
#include "coact/ingest.hpp"
#include "coact/metrics.hpp"

namespace coact {

struct StepFeatureVector {
    static constexpr int kDims = 12;

    double position_ratio = 0.0;     // t / T, in (0, 1]
    double prior_human_steps = 0.0;  // human steps before t
    double steps_since_human = 1.0;  // min(gap, T) / T; 1 when no human step yet
    double repeat_run_length = 0.0;  // identical (kind, target) agent run before t, capped at 5
    std::array<double, kNumActionKinds> kind_onehot{};
    double elapsed_fraction = 0.0;   // timestamp position within the session span

    std::array<double, kDims> as_array() const;
};

// Features for step `step` (1-based) computed from steps 1..step-1 plus the
// step's own metadata. Throws IndexOutOfRangeError.
StepFeatureVector extract_step_features(const Trajectory& t, int step);

struct FitConfig {
    double lr = 0.1;
    int epochs = 500;
    double l2 = 1e-3;
    std::uint64_t seed = 0;
};

struct LogisticModel {
    std::vector<double> weights;  // kDims entries
    double bias = 0.0;
    // Train-set standardization; a std of 0 marks a constant feature whose
    // standardized value (and therefore weight) stays 0.
    std::vector<double> feature_means;
    std::vector<double> feature_stds;
    double l2 = 0.0;
    double threshold = 0.5;
    FitConfig config;
    std::vector<double> loss_history;  // loss at epoch 0..epochs, non-increasing
    bool fitted = false;
};

// Full-batch gradient descent on the L2-regularized logistic loss, weights
// initialized to zero. Throws SingleClassError unless both classes appear.
LogisticModel fit_logistic(const Corpus& train, const FitConfig& cfg = {});

// Warm-started refit on a subset (e.g. one collaboration style) at a tenth
// of the configured learning rate, reusing the base model's feature scaling.
LogisticModel adapt_logistic(const LogisticModel& base, const Corpus& subset,
                             const FitConfig& cfg = {});

// p = sigmoid(w . x_standardized + b) for every step of `c`.
PredictionTrace predict_logistic(const LogisticModel& model, const Corpus& c);

PredictionTrace predict_always_interv(const Corpus& c);
PredictionTrace predict_always_no_interv(const Corpus& c);

enum class Objective { pts, f1 };

Objective objective_from_string(const std::string& s);  // throws ConfigError

// Best threshold on the grid {0.05, 0.10, ..., 0.95}; ties resolve to the
// lowest threshold. Throws EmptyValidationError on an empty corpus.
double calibrate_threshold(const LogisticModel& model, const Corpus& validation, Objective obj,
                           const PtsConfig& pts_cfg = {});

struct SplitSpec {
    double train_fraction = 0.8;  // in (0, 1)
    std::uint64_t seed = 0;
    double ratio_tolerance = 0.02;
    std::set<std::string> exclude_styles;
};

// Trajectory-level split that keeps each side's positive-step fraction
// within ratio_tolerance of the pooled fraction. Trajectories of users whose
// style is excluded are dropped first. Throws InfeasibleSplitError when the
// tolerance cannot be met (the message reports the achieved ratios).
std::pair<Corpus, Corpus> stratified_split(const Corpus& c, const SplitSpec& spec,
                                           const std::map<std::string, std::string>* styles = nullptr);

// --- training internals, exposed for gradient checking ------------------------

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad_w;
    double grad_b = 0.0;
};

// Mean cross-entropy + 0.5 * l2 * |w|^2 (bias unregularized) and its gradient.
LossGrad logistic_loss_grad(const std::vector<std::array<double, StepFeatureVector::kDims>>& x,
                            const std::vector<int>& y, const std::vector<double>& w, double bias,
                            double l2);

// Every (step-feature, label) pair of the corpus in (task_id, user_id) order.
std::pair<std::vector<std::array<double, StepFeatureVector::kDims>>, std::vector<int>>
step_dataset(const Corpus& c);

void save_model(const LogisticModel& model, std::ostream& out);
LogisticModel load_model(std::istream& in);

}  // namespace coact
