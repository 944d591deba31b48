#include "feelsim/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace feelsim {

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps line endings stable
    if (!out) throw std::runtime_error("metrics: cannot write " + path);
    return out;
}

}  // namespace

int retained_total(const RoundRecord& rec) {
    int total = 0;
    for (const auto& w : rec.workers) total += w.num_samples - w.iota;
    return total;
}

void write_metrics_csv(const std::string& path, const std::vector<RoundRecord>& trace) {
    std::ofstream out = open_out(path);
    out << kMetricsHeader << "\n";
    for (const auto& rec : trace) {
        long long iota_total = 0;
        double e_cmp_total = 0.0;
        double e_up_total = 0.0;
        for (const auto& w : rec.workers) {
            iota_total += w.iota;
            e_cmp_total += w.e_cmp_j;
            e_up_total += w.e_up_j;
            out << rec.round << ',' << w.worker_id << ',' << w.iota << ','
                << format_g9(w.e_cmp_j) << ',' << format_g9(w.e_up_j) << ','
                << format_g9(w.t_up_s) << ',' << format_g9(w.f_cmp_hz) << ','
                << format_g9(w.p_up_w) << ",,,\n";
        }
        out << rec.round << ",AGG," << iota_total << ',' << format_g9(e_cmp_total) << ','
            << format_g9(e_up_total) << ",,,," << format_g9(rec.cum_energy_j) << ','
            << format_g9(rec.test_acc) << ',' << format_g9(rec.test_loss) << "\n";
    }
}

void write_summary(const std::string& path, const std::vector<RoundRecord>& trace) {
    std::ofstream out = open_out(path);
    if (trace.empty()) {
        out << "empty trace\n";
        return;
    }
    const RoundRecord& last = trace.back();
    int rounds_with_participants = 0;
    for (const auto& r : trace)
        if (!r.workers.empty()) ++rounds_with_participants;
    out << "rounds = " << trace.size() << "\n"
        << "rounds_with_participants = " << rounds_with_participants << "\n"
        << "final_test_accuracy = " << format_g9(last.test_acc) << "\n"
        << "final_test_loss = " << format_g9(last.test_loss) << "\n"
        << "cumulative_energy_J = " << format_g9(last.cum_energy_j) << "\n";
}

void write_sweep_curves(const std::string& path, const std::vector<SweepRun>& runs) {
    std::ofstream out = open_out(path);
    out << "run,threshold,round,round_energy_J,cum_energy_J,iota_total,retained_total,"
           "test_acc,test_loss\n";
    for (const auto& run : runs) {
        for (const auto& rec : run.trace) {
            long long iota_total = 0;
            for (const auto& w : rec.workers) iota_total += w.iota;
            out << run.name << ',';
            if (run.threshold >= 0.0) out << format_g9(run.threshold);
            out << ',' << rec.round << ',' << format_g9(rec.round_energy_j) << ','
                << format_g9(rec.cum_energy_j) << ',' << iota_total << ','
                << retained_total(rec) << ',' << format_g9(rec.test_acc) << ','
                << format_g9(rec.test_loss) << "\n";
        }
    }
}

void write_sweep_summary(const std::string& path, const std::vector<SweepRun>& runs) {
    std::ofstream out = open_out(path);
    out << "run,threshold,cum_energy_J,final_test_acc,final_test_loss,"
           "energy_reduction_pct,acc_delta_pp\n";
    const SweepRun* baseline = nullptr;
    for (const auto& run : runs)
        if (run.threshold < 0.0) baseline = &run;
    for (const auto& run : runs) {
        out << run.name << ',';
        if (run.threshold >= 0.0) out << format_g9(run.threshold);
        out << ',' << format_g9(run.trace.back().cum_energy_j) << ','
            << format_g9(run.trace.back().test_acc) << ','
            << format_g9(run.trace.back().test_loss) << ',';
        if (baseline && &run != baseline) {
            const RunComparison cmp = compare_runs(run.trace, baseline->trace);
            out << format_g9(100.0 * cmp.energy_reduction) << ','
                << format_g9(100.0 * cmp.accuracy_delta);
        } else {
            out << ',';
        }
        out << "\n";
    }
}

}  // namespace feelsim
