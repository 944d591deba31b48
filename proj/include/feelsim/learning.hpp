#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "feelsim/dataset.hpp"

namespace feelsim {

// Single-hidden-layer tanh network with softmax output. Parameters are kept
// as one flat vector so aggregation and wire accounting stay trivial;
// layout: W1 (hidden x input), b1, W2 (classes x hidden), b2.
struct ShapeMeta {
    int input_dim = 0;
    int hidden_width = 64;
    int num_classes = 0;

    int param_count() const {
        return hidden_width * input_dim + hidden_width + num_classes * hidden_width + num_classes;
    }
};

struct ModelParams {
    Eigen::VectorXd theta;
    ShapeMeta shape;
};

enum class ProbRule { true_label, max_class };

struct TrainerConfig {
    double learning_rate = 0.05;
    int batch_size = 32;
    int epochs = 1;
    double threshold = 1.0;  // vartheta
    std::uint64_t seed = 0;
    ProbRule prob_rule = ProbRule::true_label;
};

struct ExclusionResult {
    std::vector<int> retained;            // D_k^r, ascending sample indices
    int excluded_count = 0;               // iota
    std::vector<double> per_sample_prob;  // the probability the rule compared
};

struct LocalTrainResult {
    ModelParams params;
    int excluded_count = 0;
    double full_data_loss = 0.0;  // cross-entropy on the complete local set
};

ModelParams init_params(const ShapeMeta& shape, std::uint64_t seed, double stddev = 0.01);

// Mean cross-entropy of the model on the dataset.
double local_loss(const ModelParams& params, const LocalDataset& data);

// Exact analytic gradient of local_loss, same flat layout as theta.
Eigen::VectorXd grad_local_loss(const ModelParams& params, const LocalDataset& data);

// One epoch of mini-batch SGD: a seeded shuffle, then theta <- theta - eta * g
// per batch with g averaged over the batch. The trailing partial batch runs.
ModelParams sgd_epoch(const ModelParams& params, const LocalDataset& data, double learning_rate,
                      int batch_size, std::uint64_t seed);

// Softmax class probabilities for a single input.
Eigen::VectorXd predict_prob(const ModelParams& params, const Eigen::VectorXd& x);

// Column-per-sample probabilities for a whole dataset.
Eigen::MatrixXd predict_prob_batch(const ModelParams& params, const LocalDataset& data);

// Keeps sample d iff P(x_d) <= threshold, where P is the predicted
// probability of the true label (or of the top class under max_class).
// Confidently-predicted samples are the ones dropped.
ExclusionResult threshold_filter(const ModelParams& params, const LocalDataset& data,
                                 double threshold, ProbRule rule = ProbRule::true_label);

// Threshold-based local update: epoch 1 trains on the full dataset, the
// filter then runs on the once-updated model, and epochs 2..eps train on the
// retained subset only. An empty retained set keeps the epoch-1 model.
LocalTrainResult local_train_with_exclusion(const ModelParams& global, const LocalDataset& data,
                                            const TrainerConfig& cfg);

// Unmodified local update: every epoch trains on the full dataset.
LocalTrainResult local_train_baseline(const ModelParams& global, const LocalDataset& data,
                                      const TrainerConfig& cfg);

struct WorkerUpdate {
    ModelParams params;
    int num_samples = 0;  // |D_k|, aggregation weight numerator
};

// Data-size-weighted parameter average over the participating workers.
ModelParams fedavg_aggregate(const std::vector<WorkerUpdate>& updates);

// Data-size-weighted loss average over (loss, |D_k|) pairs.
double global_loss(const std::vector<std::pair<double, int>>& losses);

// Dirichlet(concentration) allocation of each class across workers:
// class mixes differ per worker (non-iid) and totals differ (imbalanced).
// Every sample lands in exactly one shard.
std::vector<LocalDataset> partition_noniid(const LocalDataset& full, int num_workers,
                                           double concentration, std::uint64_t seed);

struct EvalResult {
    double accuracy = 0.0;
    double loss = 0.0;
};

EvalResult evaluate(const ModelParams& params, const LocalDataset& test);

}  // namespace feelsim
