#include "feelsim/resource.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "feelsim/channel.hpp"

namespace feelsim {

namespace {

constexpr double kRelTol = 1e-9;        // box-constraint slack for round-off
constexpr double kFloorFraction = 1e-6;  // lower clamp on the upload window, x deadline

void validate_workload(const Workload& w) {
    if (w.num_samples < 0) throw std::invalid_argument("workload: num_samples must be >= 0");
    if (w.excluded < 0 || w.excluded > w.num_samples)
        throw std::invalid_argument("workload: excluded must be in [0, num_samples]");
    if (w.epochs < 1) throw std::invalid_argument("workload: epochs must be >= 1");
}

void validate_compute(const ComputeProfile& cp) {
    if (!(cp.f_min_hz > 0.0) || !(cp.f_min_hz <= cp.f_max_hz))
        throw std::invalid_argument("compute profile: need 0 < f_min <= f_max");
    if (cp.alpha <= 0.0) throw std::invalid_argument("compute profile: alpha must be > 0");
    if (cp.cycles_per_sample <= 0.0)
        throw std::invalid_argument("compute profile: cycles_per_sample must be > 0");
}

void validate_power(const PowerProfile& pp) {
    if (!(pp.p_min_w > 0.0) || !(pp.p_min_w <= pp.p_max_w))
        throw std::invalid_argument("power profile: need 0 < p_min <= p_max");
}

void validate_budget(const RoundBudget& b) {
    if (b.deadline_s <= 0.0 || b.bandwidth_hz <= 0.0 || b.model_bits <= 0.0 ||
        b.energy_budget_j <= 0.0)
        throw std::invalid_argument("round budget: all fields must be > 0");
}

double compute_energy_unchecked(const Workload& w, double f_hz, const ComputeProfile& cp) {
    const double phi = cp.cycles_per_sample;
    const double full = static_cast<double>(w.num_samples);
    const double kept = static_cast<double>(w.num_samples - w.excluded);
    const double reduced_epochs = static_cast<double>(w.epochs - 1);
    return 0.5 * cp.alpha * f_hz * f_hz * (reduced_epochs * kept + full) * phi;
}

}  // namespace

const char* to_string(Constraint c) {
    switch (c) {
        case Constraint::energy_budget: return "ENERGY_BUDGET";
        case Constraint::deadline: return "DEADLINE";
        case Constraint::power_range: return "POWER_RANGE";
        case Constraint::freq_range: return "FREQ_RANGE";
        case Constraint::rate: return "RATE";
        case Constraint::beam_norm: return "BEAM_NORM";
    }
    return "UNKNOWN";
}

double effective_cycles(const Workload& w, double cycles_per_sample) {
    validate_workload(w);
    if (cycles_per_sample <= 0.0)
        throw std::invalid_argument("effective_cycles: cycles_per_sample must be > 0");
    const double eps = static_cast<double>(w.epochs);
    return cycles_per_sample *
           (eps * w.num_samples - static_cast<double>(w.excluded) * (eps - 1.0));
}

double compute_time(double cycles, double f_hz) {
    if (f_hz <= 0.0) throw std::domain_error("compute_time: frequency must be > 0");
    if (cycles < 0.0) throw std::invalid_argument("compute_time: cycles must be >= 0");
    return cycles / f_hz;
}

double compute_energy(const Workload& w, double f_hz, const ComputeProfile& cp) {
    validate_workload(w);
    validate_compute(cp);
    if (f_hz < cp.f_min_hz * (1.0 - kRelTol) || f_hz > cp.f_max_hz * (1.0 + kRelTol))
        throw std::domain_error("compute_energy: frequency outside [f_min, f_max]");
    return compute_energy_unchecked(w, f_hz, cp);
}

double upload_power(double t_up_s, double bandwidth_hz, double model_bits, double beta) {
    if (t_up_s <= 0.0) throw std::domain_error("upload_power: t_up must be > 0");
    if (beta <= 0.0) throw std::domain_error("upload_power: beta must be > 0");
    if (bandwidth_hz <= 0.0) throw std::domain_error("upload_power: bandwidth must be > 0");
    if (model_bits < 0.0) throw std::invalid_argument("upload_power: model_bits must be >= 0");
    return (std::exp2(model_bits / (t_up_s * bandwidth_hz)) - 1.0) / beta;
}

double upload_energy(double t_up_s, double bandwidth_hz, double model_bits, double beta) {
    return t_up_s * upload_power(t_up_s, bandwidth_hz, model_bits, beta);
}

EnergyBreakdown total_round_energy(double t_up_s, const RoundBudget& budget, const Workload& w,
                                   const ComputeProfile& cp, double beta) {
    validate_budget(budget);
    validate_compute(cp);
    if (!(t_up_s > 0.0) || !(t_up_s < budget.deadline_s))
        throw std::domain_error("total_round_energy: t_up must lie in (0, deadline)");
    const double rho = effective_cycles(w, cp.cycles_per_sample);
    const double t_cmp = budget.deadline_s - t_up_s;
    const double f = rho / t_cmp;

    EnergyBreakdown out;
    out.e_up_j = upload_energy(t_up_s, budget.bandwidth_hz, budget.model_bits, beta);
    out.e_cmp_j = compute_energy_unchecked(w, f, cp);
    out.total_j = out.e_up_j + out.e_cmp_j;
    out.implied_f_hz = f;
    out.freq_in_range =
        f >= cp.f_min_hz * (1.0 - kRelTol) && f <= cp.f_max_hz * (1.0 + kRelTol);
    return out;
}

UploadWindow upload_window(const RoundBudget& budget, double cycles, const ComputeProfile& cp) {
    validate_budget(budget);
    validate_compute(cp);
    if (cycles < 0.0) throw std::invalid_argument("upload_window: cycles must be >= 0");
    const double t = budget.deadline_s;
    if (cycles / cp.f_max_hz >= t)
        throw std::domain_error("upload_window: compute cannot finish within deadline at f_max");
    const double floor = kFloorFraction * t;
    const double hi = t - cycles / cp.f_max_hz;
    double lo = std::max(t - cycles / cp.f_min_hz, floor);
    lo = std::min(lo, hi);  // keep a valid (possibly degenerate) window
    return UploadWindow{lo, hi};
}

GoldenResult golden_section_minimize(const std::function<double(double)>& objective, double a0,
                                     double b0, double tol) {
    if (a0 > b0) throw std::invalid_argument("golden_section_minimize: need a0 <= b0");
    if (tol <= 0.0) throw std::invalid_argument("golden_section_minimize: tol must be > 0");
    const double phi = (3.0 - std::sqrt(5.0)) / 2.0;
    double a = a0;
    double b = b0;
    int iterations = 0;
    while (b - a > tol) {
        const double left = a + phi * (b - a);
        const double right = a + (1.0 - phi) * (b - a);
        if (objective(left) <= objective(right)) {
            b = right;
        } else {
            a = left;
        }
        ++iterations;
        if (iterations >= 200) break;  // bracket no longer shrinks in FP
    }
    const double x = 0.5 * (a + b);
    return GoldenResult{x, objective(x), iterations};
}

std::pair<double, double> split_deadline(double deadline_s, double t_up_s) {
    double t_up = t_up_s;
    double t_cmp = deadline_s - t_up;
    // Re-rounding makes the pair sum back to the deadline in all but
    // tie-breaking corner cases; the ulp walk covers those.
    for (int i = 0; i < 4 && t_up + t_cmp != deadline_s; ++i) {
        t_up = deadline_s - t_cmp;
        t_cmp = deadline_s - t_up;
    }
    while (t_up + t_cmp < deadline_s) t_up = std::nextafter(t_up, deadline_s);
    while (t_up + t_cmp > deadline_s) t_up = std::nextafter(t_up, 0.0);
    return {t_up, t_cmp};
}

Allocation allocate(const RoundBudget& budget, const Workload& w, const ComputeProfile& cp,
                    const PowerProfile& pp, double beta, double gs_tol) {
    validate_budget(budget);
    validate_workload(w);
    validate_compute(cp);
    validate_power(pp);
    if (beta <= 0.0) throw std::invalid_argument("allocate: beta must be > 0");

    const double rho = effective_cycles(w, cp.cycles_per_sample);

    Allocation alloc;
    if (rho / cp.f_max_hz >= budget.deadline_s) {
        // compute alone blows the deadline even at top speed
        alloc.t_cmp_s = budget.deadline_s;
        alloc.f_cmp_hz = cp.f_max_hz;
        alloc.verdict = Feasibility{false, {Constraint::deadline}};
        return alloc;
    }

    const UploadWindow window = upload_window(budget, rho, cp);
    const auto objective = [&](double t) {
        return total_round_energy(t, budget, w, cp, beta).total_j;
    };
    const double span = window.hi_s - window.lo_s;
    const double tol = gs_tol > 0.0 ? gs_tol : 1e-6 * span;
    // Degenerate window: the single feasible point needs no search (and may
    // sit at t_up = deadline when rho = 0, where the objective is undefined).
    const GoldenResult opt =
        span > 0.0 ? golden_section_minimize(objective, window.lo_s, window.hi_s, tol)
                   : GoldenResult{window.lo_s, 0.0, 0};

    const auto [t_up, t_cmp] = split_deadline(budget.deadline_s, opt.x);
    alloc.t_up_s = t_up;
    alloc.t_cmp_s = t_cmp;
    alloc.f_cmp_hz = t_cmp > 0.0 ? rho / t_cmp : (rho == 0.0 ? cp.f_min_hz : cp.f_max_hz);
    alloc.p_up_w = upload_power(t_up, budget.bandwidth_hz, budget.model_bits, beta);
    alloc.e_up_j = t_up * alloc.p_up_w;
    alloc.e_cmp_j = compute_energy_unchecked(w, alloc.f_cmp_hz, cp);
    alloc.verdict = check_feasibility(alloc, budget, cp, pp, beta);
    return alloc;
}

Feasibility check_feasibility(const Allocation& alloc, const RoundBudget& budget,
                              const ComputeProfile& cp, const PowerProfile& pp, double beta,
                              double beam_norm_sq) {
    Feasibility verdict;
    auto flag = [&](Constraint c) { verdict.violations.push_back(c); };

    if (alloc.e_up_j + alloc.e_cmp_j > budget.energy_budget_j) flag(Constraint::energy_budget);
    if (alloc.t_up_s + alloc.t_cmp_s != budget.deadline_s || alloc.t_up_s < 0.0 ||
        alloc.t_cmp_s < 0.0)
        flag(Constraint::deadline);
    if (alloc.p_up_w < pp.p_min_w * (1.0 - kRelTol) || alloc.p_up_w > pp.p_max_w * (1.0 + kRelTol))
        flag(Constraint::power_range);
    if (alloc.f_cmp_hz < cp.f_min_hz * (1.0 - kRelTol) ||
        alloc.f_cmp_hz > cp.f_max_hz * (1.0 + kRelTol))
        flag(Constraint::freq_range);
    const double bits =
        alloc.t_up_s > 0.0
            ? uplink_bits(alloc.t_up_s, budget.bandwidth_hz, alloc.p_up_w, std::max(beta, 0.0))
            : 0.0;
    if (bits < budget.model_bits * (1.0 - kRelTol)) flag(Constraint::rate);
    if (std::abs(beam_norm_sq - 1.0) > 1e-9) flag(Constraint::beam_norm);

    verdict.feasible = verdict.violations.empty();
    return verdict;
}

}  // namespace feelsim
