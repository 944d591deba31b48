#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "feelsim/channel.hpp"

namespace feelsim {

// Brute-force comparison routines. Each one is an independent reference path
// for one of the analytic results: the dense grid checks the golden-section
// search, the random-vector sweep checks the closed-form beamformer, and
// central finite differences check the analytic gradient. None of them calls
// the code it is used to check.

struct GridResult {
    double x = 0.0;
    double value = 0.0;
};

// Argmin over an inclusive n-point linspace; ties keep the leftmost point.
// When profile is non-null the sampled values are stored there.
GridResult grid_minimize(const std::function<double(double)>& objective, double a, double b,
                         int points, std::vector<double>* profile = nullptr);

// True when the sampled profile decreases to a single valley then increases,
// with `slack` absorbing flat stretches from floating-point noise.
bool is_unimodal(const std::vector<double>& values, double slack);

// Max SINR coefficient over `samples` random unit-norm combining vectors.
double random_beam_sweep(const std::vector<ChannelRealization>& channels, std::size_t k,
                         double noise_power_w, int samples, std::uint64_t seed,
                         InterferenceMode mode = InterferenceMode::eq10_verbatim);

// Central finite differences of a scalar function, step h per coordinate.
Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x, double h);

}  // namespace feelsim
