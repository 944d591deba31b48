#pragma once

#include <cstdint>
#include <vector>

#include "feelsim/channel.hpp"
#include "feelsim/learning.hpp"
#include "feelsim/resource.hpp"

namespace feelsim {

struct SimulationConfig {
    int num_workers = 10;            // K
    int participants_per_round = 5;  // S
    int rounds = 10;                 // R
    double deadline_s = 0.5;         // T
    double bandwidth_hz = 1e6;       // B
    double model_bits = 0.0;         // xi; 0 selects param_count * 32
    double energy_budget_j = 1.0;    // per-round cap E_k
    double initial_battery_j = 10.0;
    std::uint64_t master_seed = 1;

    TrainerConfig trainer;  // trainer.seed is derived per worker and round
    bool exclusion_enabled = true;

    ChannelParams channel;
    InterferenceMode interference = InterferenceMode::eq10_verbatim;
    double min_distance_m = 5.0;
    double max_distance_m = 20.0;

    ComputeProfile compute;
    PowerProfile power;

    int hidden_width = 64;
    double dirichlet_concentration = 1.0;

    double resolved_model_bits(const ShapeMeta& shape) const {
        return model_bits > 0.0 ? model_bits : 32.0 * shape.param_count();
    }
};

struct WorkerState {
    int id = 0;
    ComputeProfile compute;
    PowerProfile power;
    LocalDataset dataset;
    double battery_j = 0.0;
    double distance_m = 0.0;
    ChannelRealization channel;  // resampled every round
};

struct WorkerRoundEntry {
    int worker_id = 0;
    int num_samples = 0;  // |D_k|
    int iota = 0;
    double e_cmp_j = 0.0;
    double e_up_j = 0.0;
    double t_up_s = 0.0;
    double f_cmp_hz = 0.0;
    double p_up_w = 0.0;
    bool feasible = false;
};

struct RoundRecord {
    int round = 0;
    std::vector<WorkerRoundEntry> workers;
    double round_energy_j = 0.0;
    double cum_energy_j = 0.0;
    double test_acc = 0.0;
    double test_loss = 0.0;
    double train_loss = 0.0;  // size-weighted over the round's participants
};

struct SimulationState {
    std::vector<WorkerState> workers;
    ModelParams global;
    double cum_energy_j = 0.0;
    const LocalDataset* test = nullptr;
};

// Feasibility-gated uniform selection: a worker qualifies when its iota = 0
// allocation (the conservative pre-pass, iota being unknown before epoch 1)
// is feasible and its battery covers that allocation. Up to S qualifiers are
// drawn uniformly from the given seed; the result is sorted by worker id and
// may be smaller than S.
std::vector<int> select_workers(const std::vector<WorkerState>& workers, int participants,
                                const RoundBudget& budget, const std::vector<double>& betas,
                                int epochs, std::uint64_t seed);

// One full round: resample channels, compute beamformers and betas, select,
// train locally (with or without exclusion), re-run allocation with each
// worker's measured iota, charge batteries, aggregate and evaluate.
RoundRecord run_round(SimulationState& state, const SimulationConfig& cfg, int round);

std::vector<RoundRecord> run_simulation(const SimulationConfig& cfg, const LocalDataset& train,
                                        const LocalDataset& test);

struct RunComparison {
    double energy_reduction = 0.0;  // 1 - cum_energy(a) / cum_energy(b)
    double accuracy_delta = 0.0;    // final-round test accuracy, a - b
};

RunComparison compare_runs(const std::vector<RoundRecord>& a, const std::vector<RoundRecord>& b);

}  // namespace feelsim
