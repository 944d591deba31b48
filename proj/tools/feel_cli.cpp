#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "feelsim/experiment.hpp"
#include "feelsim/oracles.hpp"
#include "feelsim/rng.hpp"
#include "feelsim/units.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;       // config or runtime error
constexpr int kExitInfeasible = 2;  // allocation violates a constraint

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quiet = false;
};

feelsim::ExperimentConfig load_config(const GlobalFlags& flags) {
    if (flags.config_path.empty()) throw feelsim::ConfigError("missing --config <file>");
    feelsim::ExperimentConfig cfg = feelsim::parse_experiment_config(flags.config_path);
    if (flags.seed_set) cfg.sim.master_seed = flags.seed;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    return cfg;
}

int cmd_run(const GlobalFlags& flags) {
    const feelsim::ExperimentConfig cfg = load_config(flags);
    const feelsim::ExperimentOutcome outcome = feelsim::run_experiment(cfg, cfg.out_dir);
    if (!flags.quiet)
        std::cout << "run complete: rounds=" << outcome.trace.size()
                  << " final_test_acc=" << feelsim::format_g9(outcome.final_test_acc)
                  << " cumulative_energy_J=" << feelsim::format_g9(outcome.cum_energy_j)
                  << " -> " << cfg.out_dir << "/metrics.csv" << std::endl;
    return kExitOk;
}

int cmd_sweep(const GlobalFlags& flags, const std::vector<double>& thresholds) {
    const feelsim::ExperimentConfig cfg = load_config(flags);
    const auto runs = feelsim::run_threshold_sweep(cfg, thresholds, cfg.out_dir);
    if (!flags.quiet) {
        const auto& baseline = runs.front();
        for (const auto& run : runs) {
            std::cout << run.name << ": cum_energy_J="
                      << feelsim::format_g9(run.trace.back().cum_energy_j)
                      << " final_test_acc=" << feelsim::format_g9(run.trace.back().test_acc);
            if (run.threshold >= 0.0) {
                const auto cmp = feelsim::compare_runs(run.trace, baseline.trace);
                std::cout << " energy_reduction_pct="
                          << feelsim::format_g9(100.0 * cmp.energy_reduction);
            }
            std::cout << "\n";
        }
        std::cout << "wrote " << cfg.out_dir << "/sweep_summary.csv" << std::endl;
    }
    return kExitOk;
}

struct AllocateFlags {
    double deadline_s = 0.5;
    double bandwidth_hz = 1e6;
    double model_bits = 88384;
    double energy_budget_j = 1.0;
    int num_samples = 200;
    int excluded = 0;
    int epochs = 5;
    double f_min_hz = 1e8;
    double f_max_hz = 1e9;
    double alpha = 2e-28;
    double cycles_per_sample = 5e4;
    double p_min_dbm = -10.0;
    double p_max_dbm = 20.0;
    double beta = 1000.0;
};

int cmd_allocate(const AllocateFlags& f, bool quiet) {
    const feelsim::RoundBudget budget{f.deadline_s, f.bandwidth_hz, f.model_bits,
                                      f.energy_budget_j};
    const feelsim::Workload load{f.num_samples, f.excluded, f.epochs};
    const feelsim::ComputeProfile cp{f.f_min_hz, f.f_max_hz, f.alpha, f.cycles_per_sample};
    const feelsim::PowerProfile pp{feelsim::dbm_to_watts(f.p_min_dbm),
                                   feelsim::dbm_to_watts(f.p_max_dbm)};
    const feelsim::Allocation alloc = feelsim::allocate(budget, load, cp, pp, f.beta);

    if (!quiet) {
        using feelsim::format_g9;
        std::cout << "t_up_s    = " << format_g9(alloc.t_up_s) << "\n"
                  << "t_cmp_s   = " << format_g9(alloc.t_cmp_s) << "\n"
                  << "f_cmp_hz  = " << format_g9(alloc.f_cmp_hz) << "\n"
                  << "p_up_w    = " << format_g9(alloc.p_up_w) << "\n"
                  << "e_up_j    = " << format_g9(alloc.e_up_j) << "\n"
                  << "e_cmp_j   = " << format_g9(alloc.e_cmp_j) << "\n"
                  << "total_j   = " << format_g9(alloc.e_up_j + alloc.e_cmp_j) << "\n";
        if (alloc.verdict.feasible) {
            std::cout << "feasible" << std::endl;
        } else {
            std::cout << "infeasible:";
            for (auto c : alloc.verdict.violations) std::cout << ' ' << feelsim::to_string(c);
            std::cout << std::endl;
        }
    }
    return alloc.verdict.feasible ? kExitOk : kExitInfeasible;
}

int oracle_golden(bool quiet) {
    feelsim::Rng rng(20240917);
    double worst = 0.0;
    const int instances = 50;
    for (int i = 0; i < instances; ++i) {
        const feelsim::ComputeProfile cp{rng.uniform(5e7, 5e8), rng.uniform(6e8, 3e9),
                                         rng.uniform(1e-28, 5e-28), rng.uniform(1e4, 2e5)};
        const feelsim::RoundBudget budget{rng.uniform(0.2, 2.0), 1e6, rng.uniform(2e4, 4e5),
                                          1e9};
        const feelsim::Workload load{static_cast<int>(rng.uniform_index(900)) + 100,
                                     0, static_cast<int>(rng.uniform_index(8)) + 1};
        const double beta = rng.uniform(100.0, 5e4);
        const double rho = feelsim::effective_cycles(load, cp.cycles_per_sample);
        if (rho / cp.f_max_hz >= budget.deadline_s) {
            --i;  // resample: instance has no feasible window
            continue;
        }
        const auto window = feelsim::upload_window(budget, rho, cp);
        if (window.hi_s - window.lo_s <= 0.0) continue;
        const auto objective = [&](double t) {
            return feelsim::total_round_energy(t, budget, load, cp, beta).total_j;
        };
        const double tol = 1e-6 * (window.hi_s - window.lo_s);
        const auto gs =
            feelsim::golden_section_minimize(objective, window.lo_s, window.hi_s, tol);
        const int points = 1000000;
        const auto grid = feelsim::grid_minimize(objective, window.lo_s, window.hi_s, points);
        const double spacing = (window.hi_s - window.lo_s) / (points - 1);
        const double dev = std::abs(gs.x - grid.x);
        worst = std::max(worst, dev / std::max(tol, 2.0 * spacing));
        if (!quiet && dev > std::max(tol, 2.0 * spacing))
            std::cerr << "instance " << i << ": |t_gs - t_grid| = " << dev << "\n";
    }
    if (!quiet)
        std::cout << "golden: max deviation / allowance over " << instances
                  << " instances = " << feelsim::format_g9(worst) << std::endl;
    return worst <= 1.0 ? kExitOk : kExitError;
}

int oracle_beam(bool quiet) {
    double worst_ratio = 0.0;
    const int instances = 20;
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t seed = 7000 + static_cast<std::uint64_t>(i);
        feelsim::ChannelParams params;
        params.num_antennas = 8;
        std::vector<double> distances(8);
        feelsim::Rng rng(seed);
        for (auto& d : distances) d = rng.uniform(5.0, 20.0);
        const auto channels = feelsim::sample_channels(distances, params, seed);
        const std::size_t k = i % channels.size();
        const auto beam = feelsim::optimal_beamformer(channels, k, params.noise_power_w);
        const double beta =
            feelsim::sinr_coefficient(channels, k, beam, params.noise_power_w);
        const double best_random = feelsim::random_beam_sweep(channels, k, params.noise_power_w,
                                                              10000, seed ^ 0xbeef);
        worst_ratio = std::max(worst_ratio, best_random / beta);
    }
    if (!quiet)
        std::cout << "beam: max random-vector SINR ratio over " << instances
                  << " instances = " << feelsim::format_g9(worst_ratio) << std::endl;
    return worst_ratio <= 1.0 + 1e-9 ? kExitOk : kExitError;
}

int oracle_gradient(bool quiet) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t seed = 900 + static_cast<std::uint64_t>(i);
        feelsim::BlobSpec spec;
        spec.input_dim = 5;
        spec.num_classes = 3;
        spec.samples_per_class = 4;
        spec.class_spread = 1.0;
        const feelsim::LocalDataset data = feelsim::make_synthetic_blobs(spec, seed);
        const feelsim::ShapeMeta shape{spec.input_dim, 6, spec.num_classes};
        const feelsim::ModelParams params = feelsim::init_params(shape, seed, 0.5);

        const Eigen::VectorXd analytic = feelsim::grad_local_loss(params, data);
        const auto loss_at = [&](const Eigen::VectorXd& theta) {
            return feelsim::local_loss(feelsim::ModelParams{theta, shape}, data);
        };
        const Eigen::VectorXd numeric =
            feelsim::finite_difference_gradient(loss_at, params.theta, 1e-5);
        const double rel =
            (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12);
        worst = std::max(worst, rel);
    }
    if (!quiet)
        std::cout << "gradient: max relative error over 20 draws = "
                  << feelsim::format_g9(worst) << std::endl;
    return worst <= 1e-5 ? kExitOk : kExitError;
}

int cmd_oracle(const std::string& suite, bool quiet) {
    if (suite == "golden") return oracle_golden(quiet);
    if (suite == "beam") return oracle_beam(quiet);
    if (suite == "gradient") return oracle_gradient(quiet);
    std::cerr << "unknown oracle suite '" << suite << "' (expected golden|beam|gradient)\n";
    return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feelsim: energy-aware federated edge learning simulator"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "experiment config file");
    app.add_option("--out-dir", flags.out_dir, "output directory (overrides the config)");
    auto* seed_opt =
        app.add_option("--seed", flags.seed, "override the config's master_seed");
    app.add_flag("--quiet", flags.quiet, "suppress progress output");

    auto* run = app.add_subcommand("run", "run one simulation and write metrics.csv");
    run->fallthrough();

    std::vector<double> thresholds{0.5, 0.6, 0.7, 0.8};
    auto* sweep = app.add_subcommand("sweep", "baseline vs per-threshold comparison runs");
    sweep->fallthrough();
    sweep->add_option("--thresholds", thresholds, "exclusion thresholds to sweep");

    AllocateFlags af;
    auto* alloc_cmd = app.add_subcommand("allocate", "solve one worker's round allocation");
    alloc_cmd->fallthrough();
    alloc_cmd->add_option("--deadline-s", af.deadline_s, "round deadline T (s)");
    alloc_cmd->add_option("--bandwidth-hz", af.bandwidth_hz, "uplink bandwidth B (Hz)");
    alloc_cmd->add_option("--model-bits", af.model_bits, "model size xi (bits)");
    alloc_cmd->add_option("--energy-budget-j", af.energy_budget_j, "round energy budget (J)");
    alloc_cmd->add_option("--num-samples", af.num_samples, "local dataset size");
    alloc_cmd->add_option("--excluded", af.excluded, "excluded sample count iota");
    alloc_cmd->add_option("--epochs", af.epochs, "local epochs");
    alloc_cmd->add_option("--f-min-hz", af.f_min_hz, "minimum CPU frequency");
    alloc_cmd->add_option("--f-max-hz", af.f_max_hz, "maximum CPU frequency");
    alloc_cmd->add_option("--alpha", af.alpha, "capacitance coefficient (J s^2)");
    alloc_cmd->add_option("--cycles-per-sample", af.cycles_per_sample, "CPU cycles per sample");
    alloc_cmd->add_option("--p-min-dbm", af.p_min_dbm, "minimum transmit power (dBm)");
    alloc_cmd->add_option("--p-max-dbm", af.p_max_dbm, "maximum transmit power (dBm)");
    alloc_cmd->add_option("--beta", af.beta, "effective SINR per unit power");

    std::string suite;
    auto* oracle = app.add_subcommand("oracle", "brute-force verification suites");
    oracle->fallthrough();
    oracle->add_option("suite", suite, "golden | beam | gradient")->required();

    CLI11_PARSE(app, argc, argv);
    flags.seed_set = seed_opt->count() > 0;

    try {
        if (app.got_subcommand(run)) return cmd_run(flags);
        if (app.got_subcommand(sweep)) return cmd_sweep(flags, thresholds);
        if (app.got_subcommand(alloc_cmd)) return cmd_allocate(af, flags.quiet);
        if (app.got_subcommand(oracle)) return cmd_oracle(suite, flags.quiet);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitError;
    }
    return kExitError;
}
