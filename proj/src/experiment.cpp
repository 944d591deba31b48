#include "feelsim/experiment.hpp"

#include <filesystem>
#include <stdexcept>

namespace feelsim {

namespace {

void ensure_dir(const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir);
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const auto [train, test] = load_dataset_pair(cfg.data, cfg.sim.master_seed);
    ExperimentOutcome outcome;
    outcome.trace = run_simulation(cfg.sim, train, test);
    outcome.final_test_acc = outcome.trace.back().test_acc;
    outcome.cum_energy_j = outcome.trace.back().cum_energy_j;
    write_metrics_csv(out_dir + "/metrics.csv", outcome.trace);
    write_summary(out_dir + "/summary.txt", outcome.trace);
    return outcome;
}

std::vector<SweepRun> run_threshold_sweep(const ExperimentConfig& cfg,
                                          const std::vector<double>& thresholds,
                                          const std::string& out_dir) {
    for (double t : thresholds)
        if (t < 0.0 || t > 1.0)
            throw std::invalid_argument("sweep: thresholds must lie in [0, 1]");
    ensure_dir(out_dir);
    const auto [train, test] = load_dataset_pair(cfg.data, cfg.sim.master_seed);

    std::vector<SweepRun> runs;

    SimulationConfig base = cfg.sim;
    base.exclusion_enabled = false;
    runs.push_back(SweepRun{"baseline", -1.0, run_simulation(base, train, test)});

    for (double t : thresholds) {
        SimulationConfig sim = cfg.sim;
        sim.exclusion_enabled = true;
        sim.trainer.threshold = t;
        runs.push_back(SweepRun{"theta_" + format_g9(t), t, run_simulation(sim, train, test)});
    }

    for (const auto& run : runs)
        write_metrics_csv(out_dir + "/metrics_" + run.name + ".csv", run.trace);
    write_sweep_curves(out_dir + "/sweep_curves.csv", runs);
    write_sweep_summary(out_dir + "/sweep_summary.csv", runs);
    return runs;
}

}  // namespace feelsim
