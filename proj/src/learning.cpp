#include "feelsim/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "feelsim/rng.hpp"

namespace feelsim {

namespace {

struct ParamView {
    Eigen::Map<const Eigen::MatrixXd> w1;
    Eigen::Map<const Eigen::VectorXd> b1;
    Eigen::Map<const Eigen::MatrixXd> w2;
    Eigen::Map<const Eigen::VectorXd> b2;
};

ParamView view(const ModelParams& p) {
    const auto& s = p.shape;
    if (p.theta.size() != s.param_count())
        throw std::invalid_argument("model: theta length does not match shape metadata");
    const double* base = p.theta.data();
    const int w1n = s.hidden_width * s.input_dim;
    const int w2n = s.num_classes * s.hidden_width;
    return ParamView{
        {base, s.hidden_width, s.input_dim},
        {base + w1n, s.hidden_width},
        {base + w1n + s.hidden_width, s.num_classes, s.hidden_width},
        {base + w1n + s.hidden_width + w2n, s.num_classes},
    };
}

void check_inputs(const ModelParams& p, const LocalDataset& data) {
    if (data.size() == 0) throw std::domain_error("learning: dataset is empty");
    if (data.dim() != p.shape.input_dim)
        throw std::invalid_argument("learning: input dimension mismatch");
    for (int y : data.labels)
        if (y < 0 || y >= p.shape.num_classes)
            throw std::invalid_argument("learning: label outside [0, num_classes)");
}

// logits -> column-softmax probabilities plus per-column logsumexp
Eigen::MatrixXd softmax_cols(const Eigen::MatrixXd& z, Eigen::VectorXd* logsumexp = nullptr) {
    Eigen::MatrixXd p(z.rows(), z.cols());
    if (logsumexp) logsumexp->resize(z.cols());
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double zmax = z.col(c).maxCoeff();
        Eigen::VectorXd e = (z.col(c).array() - zmax).exp().matrix();
        const double sum = e.sum();
        p.col(c) = e / sum;
        if (logsumexp) (*logsumexp)(c) = zmax + std::log(sum);
    }
    return p;
}

struct Forward {
    Eigen::MatrixXd a1;      // tanh activations, hidden x n
    Eigen::MatrixXd probs;   // classes x n
    Eigen::VectorXd logsumexp;
    Eigen::MatrixXd logits;  // classes x n
};

Forward forward_pass(const ModelParams& p, const Eigen::MatrixXd& x) {
    const ParamView v = view(p);
    Forward f;
    f.a1 = ((v.w1 * x).colwise() + v.b1).array().tanh().matrix();
    f.logits = (v.w2 * f.a1).colwise() + v.b2;
    f.probs = softmax_cols(f.logits, &f.logsumexp);
    return f;
}

double mean_cross_entropy(const Forward& f, const std::vector<int>& labels) {
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        total += f.logsumexp(static_cast<Eigen::Index>(i)) -
                 f.logits(labels[i], static_cast<Eigen::Index>(i));
    return total / static_cast<double>(labels.size());
}

// backprop of mean cross-entropy over the columns of x
Eigen::VectorXd gradient(const ModelParams& p, const Eigen::MatrixXd& x,
                         const std::vector<int>& labels) {
    const ParamView v = view(p);
    const Forward f = forward_pass(p, x);
    const auto n = static_cast<double>(labels.size());

    Eigen::MatrixXd dz2 = f.probs;
    for (std::size_t i = 0; i < labels.size(); ++i)
        dz2(labels[i], static_cast<Eigen::Index>(i)) -= 1.0;
    dz2 /= n;

    Eigen::MatrixXd dz1 =
        ((v.w2.transpose() * dz2).array() * (1.0 - f.a1.array().square())).matrix();

    const auto& s = p.shape;
    Eigen::VectorXd grad(s.param_count());
    double* base = grad.data();
    const int w1n = s.hidden_width * s.input_dim;
    const int w2n = s.num_classes * s.hidden_width;
    Eigen::Map<Eigen::MatrixXd>(base, s.hidden_width, s.input_dim) = dz1 * x.transpose();
    Eigen::Map<Eigen::VectorXd>(base + w1n, s.hidden_width) = dz1.rowwise().sum();
    Eigen::Map<Eigen::MatrixXd>(base + w1n + s.hidden_width, s.num_classes, s.hidden_width) =
        dz2 * f.a1.transpose();
    Eigen::Map<Eigen::VectorXd>(base + w1n + s.hidden_width + w2n, s.num_classes) =
        dz2.rowwise().sum();
    return grad;
}

std::uint64_t epoch_seed(std::uint64_t trainer_seed, int epoch) {
    return derive_seed(trainer_seed, {0xe90c, static_cast<std::uint64_t>(epoch)});
}

}  // namespace

ModelParams init_params(const ShapeMeta& shape, std::uint64_t seed, double stddev) {
    if (shape.input_dim < 1 || shape.hidden_width < 1 || shape.num_classes < 2)
        throw std::invalid_argument("init_params: bad shape metadata");
    Rng rng(derive_seed(seed, {0x1a17}));
    ModelParams p{Eigen::VectorXd(shape.param_count()), shape};
    for (Eigen::Index i = 0; i < p.theta.size(); ++i) p.theta(i) = stddev * rng.normal();
    return p;
}

double local_loss(const ModelParams& params, const LocalDataset& data) {
    check_inputs(params, data);
    return mean_cross_entropy(forward_pass(params, data.inputs), data.labels);
}

Eigen::VectorXd grad_local_loss(const ModelParams& params, const LocalDataset& data) {
    check_inputs(params, data);
    return gradient(params, data.inputs, data.labels);
}

ModelParams sgd_epoch(const ModelParams& params, const LocalDataset& data, double learning_rate,
                      int batch_size, std::uint64_t seed) {
    check_inputs(params, data);
    if (batch_size < 1) throw std::invalid_argument("sgd_epoch: batch_size must be >= 1");
    if (learning_rate < 0.0) throw std::invalid_argument("sgd_epoch: learning_rate must be >= 0");

    std::vector<int> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    ModelParams out = params;
    const int n = data.size();
    for (int start = 0; start < n; start += batch_size) {
        const int count = std::min(batch_size, n - start);
        // the shuffle decides batch membership; inside a batch the gradient
        // is an average, so ascending order keeps it reproducible and makes
        // the full-batch case coincide with grad_local_loss exactly
        std::vector<int> batch(order.begin() + start, order.begin() + start + count);
        std::sort(batch.begin(), batch.end());
        Eigen::MatrixXd bx(data.dim(), count);
        std::vector<int> by(count);
        for (int i = 0; i < count; ++i) {
            bx.col(i) = data.inputs.col(batch[static_cast<std::size_t>(i)]);
            by[i] = data.labels[batch[static_cast<std::size_t>(i)]];
        }
        out.theta -= learning_rate * gradient(out, bx, by);
    }
    return out;
}

Eigen::VectorXd predict_prob(const ModelParams& params, const Eigen::VectorXd& x) {
    if (x.size() != params.shape.input_dim)
        throw std::invalid_argument("predict_prob: input dimension mismatch");
    return forward_pass(params, x).probs.col(0);
}

Eigen::MatrixXd predict_prob_batch(const ModelParams& params, const LocalDataset& data) {
    check_inputs(params, data);
    return forward_pass(params, data.inputs).probs;
}

ExclusionResult threshold_filter(const ModelParams& params, const LocalDataset& data,
                                 double threshold, ProbRule rule) {
    check_inputs(params, data);
    if (threshold < 0.0 || threshold > 1.0)
        throw std::invalid_argument("threshold_filter: threshold must be in [0, 1]");
    const Eigen::MatrixXd probs = predict_prob_batch(params, data);

    ExclusionResult out;
    out.per_sample_prob.resize(data.size());
    for (int i = 0; i < data.size(); ++i) {
        const double p = rule == ProbRule::true_label
                             ? probs(data.labels[i], i)
                             : probs.col(i).maxCoeff();
        out.per_sample_prob[i] = p;
        if (p <= threshold)
            out.retained.push_back(i);
        else
            ++out.excluded_count;
    }
    return out;
}

LocalTrainResult local_train_with_exclusion(const ModelParams& global, const LocalDataset& data,
                                            const TrainerConfig& cfg) {
    check_inputs(global, data);
    if (cfg.epochs < 1) throw std::invalid_argument("trainer: epochs must be >= 1");

    ModelParams theta =
        sgd_epoch(global, data, cfg.learning_rate, cfg.batch_size, epoch_seed(cfg.seed, 1));
    const ExclusionResult filter = threshold_filter(theta, data, cfg.threshold, cfg.prob_rule);
    if (!filter.retained.empty()) {
        const LocalDataset kept = subset(data, filter.retained);
        for (int e = 2; e <= cfg.epochs; ++e)
            theta = sgd_epoch(theta, kept, cfg.learning_rate, cfg.batch_size,
                              epoch_seed(cfg.seed, e));
    }
    const double final_loss = local_loss(theta, data);
    return LocalTrainResult{std::move(theta), filter.excluded_count, final_loss};
}

LocalTrainResult local_train_baseline(const ModelParams& global, const LocalDataset& data,
                                      const TrainerConfig& cfg) {
    check_inputs(global, data);
    if (cfg.epochs < 1) throw std::invalid_argument("trainer: epochs must be >= 1");
    ModelParams theta = global;
    for (int e = 1; e <= cfg.epochs; ++e)
        theta = sgd_epoch(theta, data, cfg.learning_rate, cfg.batch_size, epoch_seed(cfg.seed, e));
    const double final_loss = local_loss(theta, data);
    return LocalTrainResult{std::move(theta), 0, final_loss};
}

ModelParams fedavg_aggregate(const std::vector<WorkerUpdate>& updates) {
    if (updates.empty()) throw std::domain_error("fedavg_aggregate: no updates");
    double total = 0.0;
    for (const auto& u : updates) {
        if (u.num_samples < 0) throw std::invalid_argument("fedavg_aggregate: negative size");
        if (u.params.theta.size() != updates.front().params.theta.size())
            throw std::invalid_argument("fedavg_aggregate: parameter count mismatch");
        total += u.num_samples;
    }
    if (total <= 0.0) throw std::domain_error("fedavg_aggregate: zero total samples");

    ModelParams out = updates.front().params;
    out.theta = (updates.front().num_samples / total) * updates.front().params.theta;
    for (std::size_t i = 1; i < updates.size(); ++i)
        out.theta += (updates[i].num_samples / total) * updates[i].params.theta;
    return out;
}

double global_loss(const std::vector<std::pair<double, int>>& losses) {
    if (losses.empty()) throw std::domain_error("global_loss: empty list");
    double total = 0.0;
    for (const auto& [loss, n] : losses) total += n;
    if (total <= 0.0) throw std::domain_error("global_loss: zero total samples");
    double acc = 0.0;
    for (const auto& [loss, n] : losses) acc += (n / total) * loss;
    return acc;
}

std::vector<LocalDataset> partition_noniid(const LocalDataset& full, int num_workers,
                                           double concentration, std::uint64_t seed) {
    if (num_workers < 1) throw std::invalid_argument("partition_noniid: need num_workers >= 1");
    if (concentration <= 0.0)
        throw std::invalid_argument("partition_noniid: concentration must be > 0");

    int num_classes = 0;
    for (int y : full.labels) num_classes = std::max(num_classes, y + 1);

    std::vector<std::vector<int>> shards(num_workers);
    for (int c = 0; c < num_classes; ++c) {
        std::vector<int> members;
        for (int i = 0; i < full.size(); ++i)
            if (full.labels[i] == c) members.push_back(i);
        if (members.empty()) continue;

        Rng rng(derive_seed(seed, {0xd1c7, static_cast<std::uint64_t>(c)}));
        rng.shuffle(members);
        const std::vector<double> weights =
            rng.dirichlet(concentration, static_cast<std::size_t>(num_workers));

        // largest-remainder rounding keeps every sample assigned exactly once
        const int n = static_cast<int>(members.size());
        std::vector<int> counts(num_workers);
        std::vector<std::pair<double, int>> remainders(num_workers);
        int assigned = 0;
        for (int k = 0; k < num_workers; ++k) {
            const double exact = weights[k] * n;
            counts[k] = static_cast<int>(std::floor(exact));
            assigned += counts[k];
            remainders[k] = {exact - counts[k], k};
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (int r = 0; r < n - assigned; ++r) ++counts[remainders[r].second];

        int cursor = 0;
        for (int k = 0; k < num_workers; ++k)
            for (int j = 0; j < counts[k]; ++j) shards[k].push_back(members[cursor++]);
    }

    std::vector<LocalDataset> out;
    out.reserve(num_workers);
    for (int k = 0; k < num_workers; ++k) {
        LocalDataset d = subset(full, shards[k]);
        d.owner = k;
        out.push_back(std::move(d));
    }
    return out;
}

EvalResult evaluate(const ModelParams& params, const LocalDataset& test) {
    check_inputs(params, test);
    const Forward f = forward_pass(params, test.inputs);
    int correct = 0;
    for (int i = 0; i < test.size(); ++i) {
        Eigen::Index top;
        f.probs.col(i).maxCoeff(&top);
        if (static_cast<int>(top) == test.labels[i]) ++correct;
    }
    return EvalResult{static_cast<double>(correct) / test.size(),
                      mean_cross_entropy(f, test.labels)};
}

}  // namespace feelsim
