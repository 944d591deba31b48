#include "feelsim/orchestrator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "feelsim/rng.hpp"

namespace feelsim {

namespace {

// stream tags for the master-seed substreams
constexpr std::uint64_t kTagDistance = 0x01;
constexpr std::uint64_t kTagInit = 0x02;
constexpr std::uint64_t kTagPartition = 0x03;
constexpr std::uint64_t kTagChannel = 0x04;
constexpr std::uint64_t kTagSelect = 0x05;
constexpr std::uint64_t kTagTrain = 0x06;

void validate(const SimulationConfig& cfg) {
    if (cfg.num_workers < 1) throw std::invalid_argument("simulation: num_workers must be >= 1");
    if (cfg.participants_per_round < 1 || cfg.participants_per_round > cfg.num_workers)
        throw std::invalid_argument("simulation: need 1 <= participants_per_round <= num_workers");
    if (cfg.rounds < 1) throw std::invalid_argument("simulation: rounds must be >= 1");
    if (cfg.min_distance_m <= 0.0 || cfg.min_distance_m > cfg.max_distance_m)
        throw std::invalid_argument("simulation: need 0 < min_distance <= max_distance");
    if (cfg.initial_battery_j < 0.0)
        throw std::invalid_argument("simulation: initial_battery_j must be >= 0");
}

RoundBudget make_budget(const SimulationConfig& cfg, const ShapeMeta& shape) {
    return RoundBudget{cfg.deadline_s, cfg.bandwidth_hz, cfg.resolved_model_bits(shape),
                       cfg.energy_budget_j};
}

}  // namespace

std::vector<int> select_workers(const std::vector<WorkerState>& workers, int participants,
                                const RoundBudget& budget, const std::vector<double>& betas,
                                int epochs, std::uint64_t seed) {
    if (participants < 1) throw std::invalid_argument("select_workers: participants must be >= 1");
    if (betas.size() != workers.size())
        throw std::invalid_argument("select_workers: beta count mismatch");

    // conservative pre-pass: iota is unknown before epoch 1, so gate on the
    // full-data (iota = 0) allocation and on the battery covering it
    std::vector<int> eligible;
    for (std::size_t i = 0; i < workers.size(); ++i) {
        const WorkerState& w = workers[i];
        if (w.dataset.size() == 0) continue;  // nothing to train on
        const Workload pre{w.dataset.size(), 0, epochs};
        const Allocation alloc = allocate(budget, pre, w.compute, w.power, betas[i]);
        if (alloc.verdict.feasible && w.battery_j >= alloc.e_up_j + alloc.e_cmp_j)
            eligible.push_back(static_cast<int>(i));
    }

    Rng rng(seed);
    std::vector<int> chosen;
    const int take = std::min<int>(participants, static_cast<int>(eligible.size()));
    for (int t = 0; t < take; ++t) {
        const std::size_t j = rng.uniform_index(eligible.size());
        chosen.push_back(eligible[j]);
        eligible.erase(eligible.begin() + static_cast<std::ptrdiff_t>(j));
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

RoundRecord run_round(SimulationState& state, const SimulationConfig& cfg, int round) {
    if (round < 1) throw std::invalid_argument("run_round: round index starts at 1");
    const RoundBudget budget = make_budget(cfg, state.global.shape);

    // block fading: fresh realizations each round
    std::vector<double> distances;
    distances.reserve(state.workers.size());
    for (const auto& w : state.workers) distances.push_back(w.distance_m);
    const std::uint64_t channel_seed =
        derive_seed(cfg.master_seed, {kTagChannel, static_cast<std::uint64_t>(round)});
    const std::vector<ChannelRealization> channels =
        sample_channels(distances, cfg.channel, channel_seed);

    std::vector<double> betas(state.workers.size());
    for (std::size_t k = 0; k < state.workers.size(); ++k) {
        state.workers[k].channel = channels[k];
        const Beamformer beam =
            optimal_beamformer(channels, k, cfg.channel.noise_power_w, cfg.interference);
        betas[k] =
            sinr_coefficient(channels, k, beam, cfg.channel.noise_power_w, cfg.interference);
    }

    const std::uint64_t select_seed =
        derive_seed(cfg.master_seed, {kTagSelect, static_cast<std::uint64_t>(round)});
    const std::vector<int> selected = select_workers(
        state.workers, cfg.participants_per_round, budget, betas, cfg.trainer.epochs, select_seed);

    RoundRecord rec;
    rec.round = round;

    if (selected.empty()) {
        rec.cum_energy_j = state.cum_energy_j;
        if (state.test) {
            const EvalResult ev = evaluate(state.global, *state.test);
            rec.test_acc = ev.accuracy;
            rec.test_loss = ev.loss;
        }
        return rec;  // parameters unchanged, round recorded as skipped
    }

    std::vector<WorkerUpdate> updates;
    std::vector<std::pair<double, int>> losses;
    double round_energy = 0.0;

    for (int idx : selected) {
        WorkerState& w = state.workers[static_cast<std::size_t>(idx)];
        TrainerConfig tcfg = cfg.trainer;
        tcfg.seed = derive_seed(cfg.master_seed, {kTagTrain, static_cast<std::uint64_t>(round),
                                                  static_cast<std::uint64_t>(w.id)});
        const LocalTrainResult result =
            cfg.exclusion_enabled ? local_train_with_exclusion(state.global, w.dataset, tcfg)
                                  : local_train_baseline(state.global, w.dataset, tcfg);

        // final accounting re-allocates with the measured iota
        const Workload measured{w.dataset.size(), result.excluded_count, cfg.trainer.epochs};
        const Allocation alloc =
            allocate(budget, measured, w.compute, w.power, betas[static_cast<std::size_t>(idx)]);

        WorkerRoundEntry entry;
        entry.worker_id = w.id;
        entry.num_samples = w.dataset.size();
        entry.iota = result.excluded_count;
        entry.e_cmp_j = alloc.e_cmp_j;
        entry.e_up_j = alloc.e_up_j;
        entry.t_up_s = alloc.t_up_s;
        entry.f_cmp_hz = alloc.f_cmp_hz;
        entry.p_up_w = alloc.p_up_w;
        entry.feasible = alloc.verdict.feasible;
        rec.workers.push_back(entry);

        w.battery_j -= alloc.e_cmp_j + alloc.e_up_j;
        round_energy += alloc.e_cmp_j + alloc.e_up_j;

        updates.push_back(WorkerUpdate{result.params, w.dataset.size()});
        losses.emplace_back(result.full_data_loss, w.dataset.size());
    }

    state.global = fedavg_aggregate(updates);
    state.cum_energy_j += round_energy;

    rec.round_energy_j = round_energy;
    rec.cum_energy_j = state.cum_energy_j;
    rec.train_loss = global_loss(losses);
    if (state.test) {
        const EvalResult ev = evaluate(state.global, *state.test);
        rec.test_acc = ev.accuracy;
        rec.test_loss = ev.loss;
    }
    return rec;
}

std::vector<RoundRecord> run_simulation(const SimulationConfig& cfg, const LocalDataset& train,
                                        const LocalDataset& test) {
    validate(cfg);
    if (train.size() == 0) throw std::domain_error("run_simulation: empty training set");
    if (test.size() == 0) throw std::domain_error("run_simulation: empty test set");

    int num_classes = 0;
    for (int y : train.labels) num_classes = std::max(num_classes, y + 1);
    for (int y : test.labels) num_classes = std::max(num_classes, y + 1);
    const ShapeMeta shape{train.dim(), cfg.hidden_width, num_classes};

    SimulationState state;
    state.test = &test;
    state.global = init_params(shape, derive_seed(cfg.master_seed, {kTagInit}), 0.01);

    const std::vector<LocalDataset> shards =
        partition_noniid(train, cfg.num_workers, cfg.dirichlet_concentration,
                         derive_seed(cfg.master_seed, {kTagPartition}));

    Rng distance_rng(derive_seed(cfg.master_seed, {kTagDistance}));
    state.workers.reserve(static_cast<std::size_t>(cfg.num_workers));
    for (int k = 0; k < cfg.num_workers; ++k) {
        WorkerState w;
        w.id = k;
        w.compute = cfg.compute;
        w.power = cfg.power;
        w.dataset = shards[static_cast<std::size_t>(k)];
        w.battery_j = cfg.initial_battery_j;
        w.distance_m = distance_rng.uniform(cfg.min_distance_m, cfg.max_distance_m);
        state.workers.push_back(std::move(w));
    }

    std::vector<RoundRecord> trace;
    trace.reserve(static_cast<std::size_t>(cfg.rounds));
    for (int r = 1; r <= cfg.rounds; ++r) trace.push_back(run_round(state, cfg, r));
    return trace;
}

RunComparison compare_runs(const std::vector<RoundRecord>& a, const std::vector<RoundRecord>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::domain_error("compare_runs: traces must be nonempty and equally long");
    const double cum_a = a.back().cum_energy_j;
    const double cum_b = b.back().cum_energy_j;
    if (cum_b <= 0.0) throw std::domain_error("compare_runs: reference trace consumed no energy");
    return RunComparison{1.0 - cum_a / cum_b, a.back().test_acc - b.back().test_acc};
}

}  // namespace feelsim
