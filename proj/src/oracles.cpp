#include "feelsim/oracles.hpp"

#include <stdexcept>

#include "feelsim/rng.hpp"

namespace feelsim {

GridResult grid_minimize(const std::function<double(double)>& objective, double a, double b,
                         int points, std::vector<double>* profile) {
    if (points < 2) throw std::invalid_argument("grid_minimize: need at least 2 points");
    if (a > b) throw std::invalid_argument("grid_minimize: need a <= b");
    if (profile) {
        profile->clear();
        profile->reserve(static_cast<std::size_t>(points));
    }
    GridResult best{a, objective(a)};
    if (profile) profile->push_back(best.value);
    const double step = (b - a) / (points - 1);
    for (int i = 1; i < points; ++i) {
        const double x = i + 1 == points ? b : a + step * i;
        const double v = objective(x);
        if (profile) profile->push_back(v);
        if (v < best.value) best = GridResult{x, v};
    }
    return best;
}

bool is_unimodal(const std::vector<double>& values, double slack) {
    bool rising = false;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[i - 1] + slack) rising = true;
        if (rising && values[i] < values[i - 1] - slack) return false;
    }
    return true;
}

double random_beam_sweep(const std::vector<ChannelRealization>& channels, std::size_t k,
                         double noise_power_w, int samples, std::uint64_t seed,
                         InterferenceMode mode) {
    if (k >= channels.size()) throw std::out_of_range("random_beam_sweep: worker index");
    const auto m = channels[k].h.size();
    Rng rng(seed);
    double best = 0.0;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXcd v(m);
        for (Eigen::Index i = 0; i < m; ++i)
            v(i) = std::complex<double>(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2);
        v.normalize();
        best = std::max(best, sinr_coefficient(channels, k, Beamformer{v}, noise_power_w, mode));
    }
    return best;
}

Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_difference_gradient: h must be > 0");
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + h;
        const double hi = f(probe);
        probe(i) = x(i) - h;
        const double lo = f(probe);
        probe(i) = x(i);
        grad(i) = (hi - lo) / (2.0 * h);
    }
    return grad;
}

}  // namespace feelsim
