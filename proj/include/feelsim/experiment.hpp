#pragma once

#include <string>
#include <vector>

#include "feelsim/config.hpp"
#include "feelsim/metrics.hpp"

namespace feelsim {

struct ExperimentOutcome {
    std::vector<RoundRecord> trace;
    double final_test_acc = 0.0;
    double cum_energy_j = 0.0;
};

// Runs the configured simulation and writes metrics.csv + summary.txt into
// out_dir (created if missing).
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Baseline plus one exclusion run per threshold, all under the shared master
// seed; writes per-run metrics files, sweep_curves.csv and sweep_summary.csv.
std::vector<SweepRun> run_threshold_sweep(const ExperimentConfig& cfg,
                                          const std::vector<double>& thresholds,
                                          const std::string& out_dir);

}  // namespace feelsim
