#pragma once

#include <string>
#include <vector>

#include "feelsim/orchestrator.hpp"

namespace feelsim {

// %.9g rendering used for every floating value written to disk
std::string format_g9(double v);

inline const char* kMetricsHeader =
    "round,worker_id,iota,e_cmp_J,e_up_J,t_up_s,f_cmp_hz,p_up_w,cum_energy_J,test_acc,test_loss";

// One row per participating worker plus one AGG row per round. Worker rows
// leave the aggregate columns empty; the AGG row carries the per-round sums,
// the cumulative energy and the global test metrics.
void write_metrics_csv(const std::string& path, const std::vector<RoundRecord>& trace);

void write_summary(const std::string& path, const std::vector<RoundRecord>& trace);

struct SweepRun {
    std::string name;       // "baseline" or "theta_<value>"
    double threshold = -1;  // < 0 for the baseline run
    std::vector<RoundRecord> trace;
};

void write_sweep_curves(const std::string& path, const std::vector<SweepRun>& runs);
void write_sweep_summary(const std::string& path, const std::vector<SweepRun>& runs);

int retained_total(const RoundRecord& rec);

}  // namespace feelsim
