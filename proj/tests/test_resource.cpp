#include <doctest.h>

#include <cmath>

#include "feelsim/channel.hpp"
#include "feelsim/oracles.hpp"
#include "feelsim/resource.hpp"
#include "feelsim/rng.hpp"

using namespace feelsim;

namespace {

struct RandomInstance {
    RoundBudget budget;
    Workload load;
    ComputeProfile cp;
    double beta;
};

RandomInstance random_instance(Rng& rng) {
    RandomInstance inst;
    inst.cp = ComputeProfile{rng.uniform(5e7, 5e8), rng.uniform(6e8, 3e9),
                             rng.uniform(1e-28, 5e-28), rng.uniform(1e4, 2e5)};
    inst.budget = RoundBudget{rng.uniform(0.2, 2.0), 1e6, rng.uniform(2e4, 4e5), 1e9};
    const int n = static_cast<int>(rng.uniform_index(900)) + 100;
    const int eps = static_cast<int>(rng.uniform_index(8)) + 1;
    inst.load = Workload{n, static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n))), eps};
    inst.beta = rng.uniform(100.0, 5e4);
    return inst;
}

}  // namespace

TEST_CASE("effective_cycles: closed-form values") {
    CHECK(effective_cycles({500, 123, 1}, 20.0) == doctest::Approx(500 * 20.0));
    CHECK(effective_cycles({1000, 0, 2}, 20.0) == doctest::Approx(40000.0));
    CHECK(effective_cycles({1000, 400, 2}, 20.0) == doctest::Approx(32000.0));
}

TEST_CASE("effective_cycles: iota = 0 reduces to eps * phi * |D| exactly") {
    for (int eps = 1; eps <= 6; ++eps)
        CHECK(effective_cycles({777, 0, eps}, 31.5) == eps * 31.5 * 777);
}

TEST_CASE("effective_cycles: input validation") {
    CHECK_THROWS_AS(effective_cycles({10, 11, 2}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(effective_cycles({10, 0, 0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(effective_cycles({10, 0, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("compute_time: proportionality") {
    CHECK(compute_time(40000.0, 1e6) == doctest::Approx(0.04));
    CHECK(compute_time(0.0, 123.0) == doctest::Approx(0.0));
    CHECK(compute_time(5e7, 2e9) == doctest::Approx(0.5 * compute_time(5e7, 1e9)));
    CHECK_THROWS_AS(compute_time(1.0, 0.0), std::domain_error);
}

TEST_CASE("compute_energy: closed-form value from the baseline formula") {
    // iota = 0, eps = 1, alpha = 2e-28, f = 1e9, |D| * Phi = 1e6 -> 1e-4 J
    const ComputeProfile cp{1e8, 2e9, 2e-28, 1e4};
    CHECK(compute_energy({100, 0, 1}, 1e9, cp) == doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("compute_energy: all-excluded equals single-epoch full-data energy") {
    const ComputeProfile cp{1e8, 2e9, 3e-28, 2e4};
    const double full_single = compute_energy({250, 0, 1}, 5e8, cp);
    for (int eps : {1, 2, 5})
        CHECK(compute_energy({250, 250, eps}, 5e8, cp) == doctest::Approx(full_single));
}

TEST_CASE("compute_energy: strictly decreasing in iota for eps >= 2") {
    const ComputeProfile cp{1e8, 2e9, 2e-28, 1e4};
    double prev = compute_energy({1000, 0, 3}, 1e9, cp);
    for (int iota : {100, 400, 700, 1000}) {
        const double e = compute_energy({1000, iota, 3}, 1e9, cp);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("compute_energy: frequency range enforced") {
    const ComputeProfile cp{1e8, 1e9, 2e-28, 1e4};
    CHECK_THROWS_AS(compute_energy({10, 0, 1}, 5e7, cp), std::domain_error);
    CHECK_THROWS_AS(compute_energy({10, 0, 1}, 2e9, cp), std::domain_error);
}

TEST_CASE("upload_power: unit exponent and limits") {
    CHECK(upload_power(0.5, 2.0, 1.0, 1.0) == doctest::Approx(1.0));  // xi = t*B
    CHECK(upload_power(0.5, 2.0, 0.0, 3.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(upload_power(0.0, 1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(upload_power(1.0, 1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("upload_power/uplink_bits inversion on random instances") {
    Rng rng(2025);
    for (int i = 0; i < 100; ++i) {
        const double t = rng.uniform(1e-3, 2.0);
        const double b = rng.uniform(1e5, 1e7);
        const double xi = rng.uniform(1e3, 1e6);
        const double beta = rng.uniform(1.0, 1e5);
        const double p = upload_power(t, b, xi, beta);
        CHECK(uplink_bits(t, b, p, beta) == doctest::Approx(xi).epsilon(1e-9));
    }
}

TEST_CASE("upload_energy: t*B bits at beta 1 costs t joules") {
    CHECK(upload_energy(0.25, 4.0, 1.0, 1.0) == doctest::Approx(0.25));
}

TEST_CASE("upload_energy: strictly decreasing in t_up on a grid") {
    const double b = 1e6, xi = 1e5, beta = 500.0;
    double prev = upload_energy(0.01, b, xi, beta);
    for (int i = 1; i <= 60; ++i) {
        const double t = 0.01 + 0.05 * i;
        const double e = upload_energy(t, b, xi, beta);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("upload_energy: doubling beta strictly reduces energy") {
    CHECK(upload_energy(0.3, 1e6, 1e5, 2000.0) < upload_energy(0.3, 1e6, 1e5, 1000.0));
}

TEST_CASE("total_round_energy: matches compositional sum exactly") {
    Rng rng(88);
    int tested = 0;
    while (tested < 100) {
        const RandomInstance inst = random_instance(rng);
        const double rho = effective_cycles(inst.load, inst.cp.cycles_per_sample);
        if (rho / inst.cp.f_max_hz >= inst.budget.deadline_s) continue;
        const UploadWindow win = upload_window(inst.budget, rho, inst.cp);
        if (win.hi_s <= win.lo_s) continue;
        const double t = rng.uniform(win.lo_s, win.hi_s);
        if (t <= 0.0 || t >= inst.budget.deadline_s) continue;
        const EnergyBreakdown e = total_round_energy(t, inst.budget, inst.load, inst.cp, inst.beta);
        const double e_up =
            upload_energy(t, inst.budget.bandwidth_hz, inst.budget.model_bits, inst.beta);
        const double f = rho / (inst.budget.deadline_s - t);
        CHECK(e.e_up_j == e_up);
        CHECK(e.total_j == e.e_up_j + e.e_cmp_j);
        CHECK(e.implied_f_hz == f);
        ++tested;
    }
}

TEST_CASE("total_round_energy: compute term extremal at the window endpoints") {
    const RoundBudget budget{1.0, 1e6, 1e5, 1e9};
    const Workload load{400, 0, 3};
    const ComputeProfile cp{2e8, 1.5e9, 2e-28, 5e4};
    const double rho = effective_cycles(load, cp.cycles_per_sample);
    const UploadWindow win = upload_window(budget, rho, cp);
    const double beta = 2000.0;
    const double at_lo = total_round_energy(win.lo_s, budget, load, cp, beta).e_cmp_j;
    const double at_hi = total_round_energy(win.hi_s, budget, load, cp, beta).e_cmp_j;
    for (double frac : {0.1, 0.35, 0.5, 0.75, 0.9}) {
        const double t = win.lo_s + frac * (win.hi_s - win.lo_s);
        const double mid = total_round_energy(t, budget, load, cp, beta).e_cmp_j;
        CHECK(mid >= at_lo);
        CHECK(mid <= at_hi);
    }
}

TEST_CASE("upload_window: direct substitution") {
    // T = 1, rho/f_min = 0.9, rho/f_max = 0.1 -> [0.1, 0.9]
    const RoundBudget budget{1.0, 1e6, 1e5, 1.0};
    const ComputeProfile cp{1e8, 9e8, 2e-28, 1.0};
    const double rho = 9e7;
    const UploadWindow win = upload_window(budget, rho, cp);
    CHECK(win.lo_s == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(win.hi_s == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("upload_window: degenerate when f_min = f_max") {
    const RoundBudget budget{1.0, 1e6, 1e5, 1.0};
    const ComputeProfile cp{5e8, 5e8, 2e-28, 1.0};
    const UploadWindow win = upload_window(budget, 1e8, cp);
    CHECK(win.lo_s == win.hi_s);
}

TEST_CASE("upload_window: clamps to the positive floor when rho/f_min exceeds T") {
    const RoundBudget budget{1.0, 1e6, 1e5, 1.0};
    const ComputeProfile cp{1e7, 1e9, 2e-28, 1.0};
    const UploadWindow win = upload_window(budget, 5e7, cp);  // rho/f_min = 5 > T
    CHECK(win.lo_s == doctest::Approx(1e-6 * budget.deadline_s));
    CHECK(win.hi_s == doctest::Approx(1.0 - 0.05));
}

TEST_CASE("upload_window: infeasible when compute cannot fit at f_max") {
    const RoundBudget budget{1.0, 1e6, 1e5, 1.0};
    const ComputeProfile cp{1e7, 1e8, 2e-28, 1.0};
    CHECK_THROWS_AS(upload_window(budget, 2e8, cp), std::domain_error);  // rho/f_max = 2
}

TEST_CASE("upload_window: every t in the window implies f within range") {
    Rng rng(17);
    for (int i = 0; i < 50; ++i) {
        const RandomInstance inst = random_instance(rng);
        const double rho = effective_cycles(inst.load, inst.cp.cycles_per_sample);
        if (rho <= 0.0 || rho / inst.cp.f_max_hz >= inst.budget.deadline_s) continue;
        const UploadWindow win = upload_window(inst.budget, rho, inst.cp);
        for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const double t = win.lo_s + frac * (win.hi_s - win.lo_s);
            if (t >= inst.budget.deadline_s) continue;
            const double f = rho / (inst.budget.deadline_s - t);
            CHECK(f >= inst.cp.f_min_hz * (1.0 - 1e-9));
            CHECK(f <= inst.cp.f_max_hz * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("golden_section_minimize: parabola") {
    const auto gs = golden_section_minimize([](double t) { return (t - 2.0) * (t - 2.0); }, 0.0,
                                            5.0, 1e-6);
    CHECK(std::abs(gs.x - 2.0) <= 1e-5);
}

TEST_CASE("golden_section_minimize: constant objective") {
    const auto gs = golden_section_minimize([](double) { return 3.5; }, -1.0, 1.0, 1e-9);
    CHECK(gs.value == doctest::Approx(3.5));
    CHECK(gs.x >= -1.0);
    CHECK(gs.x <= 1.0);
}

TEST_CASE("golden_section_minimize: random unimodal instances vs dense grid") {
    Rng rng(404);
    for (int i = 0; i < 50; ++i) {
        // smooth unimodal family: a |t - m|^p + c with p in (1.2, 3)
        const double m = rng.uniform(-2.0, 2.0);
        const double a = rng.uniform(0.5, 5.0);
        const double p = rng.uniform(1.2, 3.0);
        const double c = rng.uniform(-1.0, 1.0);
        const auto f = [=](double t) { return a * std::pow(std::abs(t - m), p) + c; };
        const double lo = m - rng.uniform(0.5, 3.0);
        const double hi = m + rng.uniform(0.5, 3.0);
        const double tol = 1e-6 * (hi - lo);
        const auto gs = golden_section_minimize(f, lo, hi, tol);
        const int points = 100000;
        const auto grid = grid_minimize(f, lo, hi, points);
        const double spacing = (hi - lo) / (points - 1);
        CHECK(std::abs(gs.x - grid.x) <= std::max(tol, 2.0 * spacing));
    }
}

TEST_CASE("split_deadline: sum is exact over random pairs") {
    Rng rng(909);
    for (int i = 0; i < 100000; ++i) {
        const double deadline = rng.uniform(1e-4, 10.0);
        const double t_raw = rng.uniform(0.0, deadline);
        const auto [t_up, t_cmp] = split_deadline(deadline, t_raw);
        CHECK(t_up + t_cmp == deadline);
        CHECK(t_up >= 0.0);
        CHECK(t_cmp >= 0.0);
        CHECK(std::abs(t_up - t_raw) <= 1e-9 * deadline + 1e-12);
    }
}

TEST_CASE("allocate: exclusion never costs more than the full-data allocation") {
    Rng rng(606);
    const PowerProfile pp{1e-9, 1e3};  // wide so the comparison is about energy
    int tested = 0;
    while (tested < 60) {
        RandomInstance inst = random_instance(rng);
        inst.load.epochs = std::max(2, inst.load.epochs);
        Workload base = inst.load;
        base.excluded = 0;
        const double rho = effective_cycles(base, inst.cp.cycles_per_sample);
        if (rho / inst.cp.f_max_hz >= inst.budget.deadline_s) continue;
        const Allocation with_iota =
            allocate(inst.budget, inst.load, inst.cp, pp, inst.beta);
        const Allocation without =
            allocate(inst.budget, base, inst.cp, pp, inst.beta);
        CHECK(with_iota.e_up_j + with_iota.e_cmp_j <=
              (without.e_up_j + without.e_cmp_j) * (1.0 + 1e-9));
        ++tested;
    }
}

TEST_CASE("allocate: deadline identity is exact") {
    Rng rng(321);
    int tested = 0;
    while (tested < 50) {
        const RandomInstance inst = random_instance(rng);
        const double rho = effective_cycles(inst.load, inst.cp.cycles_per_sample);
        if (rho / inst.cp.f_max_hz >= inst.budget.deadline_s) continue;
        const PowerProfile pp{1e-9, 1e3};
        const Allocation alloc = allocate(inst.budget, inst.load, inst.cp, pp, inst.beta);
        CHECK(alloc.t_up_s + alloc.t_cmp_s == inst.budget.deadline_s);
        ++tested;
    }
}

TEST_CASE("allocate: f_min = f_max pins the single feasible point") {
    const RoundBudget budget{1.0, 1e6, 1e5, 1e9};
    const ComputeProfile cp{5e8, 5e8, 2e-28, 5e4};
    const Workload load{100, 0, 2};  // rho = 1e7 cycles -> t_cmp = 0.02
    const PowerProfile pp{1e-9, 1e3};
    const Allocation alloc = allocate(budget, load, cp, pp, 2000.0);
    CHECK(alloc.verdict.feasible);
    CHECK(alloc.t_cmp_s == doctest::Approx(effective_cycles(load, cp.cycles_per_sample) / 5e8)
                               .epsilon(1e-9));
    CHECK(alloc.f_cmp_hz == doctest::Approx(5e8).epsilon(1e-9));
}

TEST_CASE("allocate: infeasible deadline reports DEADLINE") {
    const RoundBudget budget{0.001, 1e6, 1e5, 1e9};
    const ComputeProfile cp{1e8, 1e9, 2e-28, 5e4};
    const Workload load{1000, 0, 5};  // rho/f_max = 0.25 >> deadline
    const Allocation alloc = allocate(budget, load, cp, PowerProfile{1e-9, 1e3}, 2000.0);
    CHECK(!alloc.verdict.feasible);
    REQUIRE(alloc.verdict.violations.size() == 1);
    CHECK(alloc.verdict.violations[0] == Constraint::deadline);
}

TEST_CASE("check_feasibility: over-power allocation reports POWER_RANGE") {
    // p_up = 0.2 W against the 20 dBm cap (0.1 W)
    const RoundBudget budget{1.0, 1e6, 1e3, 1e9};
    const ComputeProfile cp{1e6, 1e12, 2e-28, 1.0};
    const PowerProfile pp{1e-4, 0.1};
    Allocation alloc;
    const auto [t_up, t_cmp] = split_deadline(budget.deadline_s, 0.4);
    alloc.t_up_s = t_up;
    alloc.t_cmp_s = t_cmp;
    alloc.f_cmp_hz = 1e8;
    alloc.p_up_w = 0.2;
    alloc.e_up_j = alloc.t_up_s * alloc.p_up_w;
    alloc.e_cmp_j = 0.0;
    const Feasibility verdict = check_feasibility(alloc, budget, cp, pp, 1e4);
    CHECK(!verdict.feasible);
    REQUIRE(verdict.violations.size() == 1);
    CHECK(verdict.violations[0] == Constraint::power_range);
}

TEST_CASE("check_feasibility: idempotent on allocator output") {
    Rng rng(1234);
    const PowerProfile pp{1e-9, 1e3};
    int feasible_seen = 0;
    for (int i = 0; i < 60 && feasible_seen < 20; ++i) {
        const RandomInstance inst = random_instance(rng);
        const double rho = effective_cycles(inst.load, inst.cp.cycles_per_sample);
        if (rho / inst.cp.f_max_hz >= inst.budget.deadline_s) continue;
        const Allocation alloc = allocate(inst.budget, inst.load, inst.cp, pp, inst.beta);
        if (!alloc.verdict.feasible) continue;
        ++feasible_seen;
        const Feasibility recheck = check_feasibility(alloc, inst.budget, inst.cp, pp, inst.beta);
        CHECK(recheck.feasible);
        CHECK(recheck.violations.empty());
    }
    CHECK(feasible_seen >= 20);
}

TEST_CASE("check_feasibility: energy budget boundary is inclusive") {
    const RoundBudget base{1.0, 1e6, 1e4, 1e9};
    const ComputeProfile cp{1e6, 1e12, 2e-28, 1e3};
    const PowerProfile pp{1e-9, 1e3};
    const Workload load{100, 0, 1};
    Allocation alloc = allocate(base, load, cp, pp, 1e4);
    REQUIRE(alloc.verdict.feasible);
    RoundBudget exact = base;
    exact.energy_budget_j = alloc.e_up_j + alloc.e_cmp_j;  // equality, not slack
    const Feasibility verdict = check_feasibility(alloc, exact, cp, pp, 1e4);
    CHECK(verdict.feasible);
}

TEST_CASE("check_feasibility: beam norm deviation is flagged") {
    const RoundBudget budget{1.0, 1e6, 1e3, 1e9};
    const ComputeProfile cp{1e6, 1e12, 2e-28, 1.0};
    const PowerProfile pp{1e-9, 1e3};
    const Allocation alloc = allocate(budget, {10, 0, 1}, cp, pp, 1e4);
    const Feasibility verdict = check_feasibility(alloc, budget, cp, pp, 1e4, 1.5);
    CHECK(!verdict.feasible);
    REQUIRE(verdict.violations.size() == 1);
    CHECK(verdict.violations[0] == Constraint::beam_norm);
}
