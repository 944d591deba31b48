#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace feelsim {

struct ComputeProfile {
    double f_min_hz = 1e8;
    double f_max_hz = 1e9;
    double alpha = 2e-28;             // effective capacitance coefficient, J*s^2
    double cycles_per_sample = 5e4;   // Phi
};

struct PowerProfile {
    double p_min_w = 1e-6;
    double p_max_w = 0.1;
};

struct Workload {
    int num_samples = 0;  // |D_k|
    int excluded = 0;     // iota, known after the epoch-1 filter
    int epochs = 1;       // eps
};

struct RoundBudget {
    double deadline_s = 0.5;       // T
    double bandwidth_hz = 1e6;     // B
    double model_bits = 0.0;       // xi
    double energy_budget_j = 1.0;  // E_k
};

enum class Constraint { energy_budget, deadline, power_range, freq_range, rate, beam_norm };
const char* to_string(Constraint c);

struct Feasibility {
    bool feasible = false;
    std::vector<Constraint> violations;
};

// One worker's per-round decision tuple. When feasible, t_up + t_cmp equals
// the deadline exactly and every box constraint holds.
struct Allocation {
    double t_up_s = 0.0;
    double t_cmp_s = 0.0;
    double f_cmp_hz = 0.0;
    double p_up_w = 0.0;
    double e_up_j = 0.0;
    double e_cmp_j = 0.0;
    Feasibility verdict;
};

// Total CPU cycles for one round with exclusion:
// rho = Phi * (eps*|D_k| - iota*(eps-1)). Reduces to eps*Phi*|D_k| at iota=0.
double effective_cycles(const Workload& w, double cycles_per_sample);

double compute_time(double cycles, double f_hz);

// Dynamic CPU energy for one round: the first epoch runs the full dataset,
// the remaining eps-1 epochs run the retained subset:
// E = (alpha/2) f^2 [ (eps-1)(|D|-iota) + |D| ] Phi
double compute_energy(const Workload& w, double f_hz, const ComputeProfile& cp);

// Transmit power that delivers exactly model_bits in t_up seconds:
// P = (2^(xi / (t_up B)) - 1) / beta.
double upload_power(double t_up_s, double bandwidth_hz, double model_bits, double beta);

double upload_energy(double t_up_s, double bandwidth_hz, double model_bits, double beta);

struct EnergyBreakdown {
    double e_up_j = 0.0;
    double e_cmp_j = 0.0;
    double total_j = 0.0;
    double implied_f_hz = 0.0;
    bool freq_in_range = false;  // infeasible marker; the objective stays defined
};

// Round energy as a function of the upload-time split: upload energy plus
// compute energy at the implied frequency f = rho / (T - t_up).
EnergyBreakdown total_round_energy(double t_up_s, const RoundBudget& budget, const Workload& w,
                                   const ComputeProfile& cp, double beta);

struct UploadWindow {
    double lo_s = 0.0;
    double hi_s = 0.0;
};

// Feasible upload-time interval [T - rho/f_min, T - rho/f_max], with the lower
// end clamped to t_floor = 1e-6 * T so upload power stays finite when
// rho/f_min exceeds T. Throws std::domain_error when rho/f_max >= T.
UploadWindow upload_window(const RoundBudget& budget, double cycles, const ComputeProfile& cp);

struct GoldenResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
};

// Golden-section line search with interior points
// a' = a + phi (b - a), b' = a + (1 - phi)(b - a), phi = (3 - sqrt 5)/2,
// keeping [a, b'] when f(a') <= f(b') and [a', b] otherwise. Returns the
// bracket midpoint once the bracket length drops to tol.
GoldenResult golden_section_minimize(const std::function<double(double)>& objective, double a0,
                                     double b0, double tol);

// Joint per-worker allocation: golden-section over the upload window on
// total_round_energy, then back-solve t_cmp, f_cmp and p_up and check every
// constraint. gs_tol <= 0 selects the default 1e-6 * (b0 - a0).
Allocation allocate(const RoundBudget& budget, const Workload& w, const ComputeProfile& cp,
                    const PowerProfile& pp, double beta, double gs_tol = 0.0);

// Evaluates each constraint independently; empty violation set <=> feasible.
// beam_norm_sq covers the combining-vector unit-norm constraint for callers
// that track it (the allocator itself always gets a unit-norm beamformer).
Feasibility check_feasibility(const Allocation& alloc, const RoundBudget& budget,
                              const ComputeProfile& cp, const PowerProfile& pp, double beta,
                              double beam_norm_sq = 1.0);

// Splits the deadline into t_up + t_cmp with the sum exact in floating point.
std::pair<double, double> split_deadline(double deadline_s, double t_up_s);

}  // namespace feelsim
