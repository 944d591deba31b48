#include "feelsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "feelsim/rng.hpp"
#include "feelsim/units.hpp"

namespace feelsim {

namespace {

void validate(const ChannelParams& params) {
    if (params.num_antennas < 1) throw std::invalid_argument("channel: num_antennas must be >= 1");
    if (params.noise_power_w <= 0.0) throw std::invalid_argument("channel: noise_power_w must be > 0");
    if (params.path_loss_exponent <= 0.0)
        throw std::invalid_argument("channel: path_loss_exponent must be > 0");
    if (params.reference_distance_m <= 0.0)
        throw std::invalid_argument("channel: reference_distance_m must be > 0");
}

}  // namespace

std::vector<ChannelRealization> sample_channels(const std::vector<double>& distances_m,
                                                const ChannelParams& params,
                                                std::uint64_t seed) {
    validate(params);
    const int m = params.num_antennas;
    const double k_lin = db_to_linear(params.rician_factor_db);
    const double los_coef = std::sqrt(k_lin / (k_lin + 1.0));
    const double nlos_coef = std::sqrt(1.0 / (k_lin + 1.0));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    std::vector<ChannelRealization> out;
    out.reserve(distances_m.size());
    for (std::size_t k = 0; k < distances_m.size(); ++k) {
        const double d = distances_m[k];
        if (d <= 0.0) throw std::domain_error("sample_channels: distance must be positive");
        const double path_gain = std::pow(params.reference_distance_m / d, params.path_loss_exponent);
        const double amp = std::sqrt(path_gain);

        Rng rng(derive_seed(seed, {k}));
        const double phase0 = 2.0 * std::numbers::pi * rng.uniform();
        const double ramp = 2.0 * std::numbers::pi * rng.uniform();

        Eigen::VectorXcd h(m);
        for (int a = 0; a < m; ++a) {
            const double theta = phase0 + ramp * a;
            std::complex<double> los(std::cos(theta), std::sin(theta));
            std::complex<double> nlos(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2);
            h(a) = amp * (los_coef * los + nlos_coef * nlos);
        }
        out.push_back(ChannelRealization{std::move(h), static_cast<int>(k)});
    }
    return out;
}

Eigen::MatrixXcd interference_plus_noise(const std::vector<ChannelRealization>& channels,
                                         std::size_t k, double noise_power_w,
                                         InterferenceMode mode) {
    if (k >= channels.size()) throw std::out_of_range("interference_plus_noise: worker index");
    if (noise_power_w <= 0.0)
        throw std::invalid_argument("interference_plus_noise: noise power must be > 0");
    const auto m = channels[k].h.size();
    Eigen::MatrixXcd sigma = noise_power_w * Eigen::MatrixXcd::Identity(m, m);
    if (mode == InterferenceMode::eq10_verbatim) {
        for (std::size_t j = 0; j < channels.size(); ++j) {
            if (j == k) continue;
            if (channels[j].h.size() != m)
                throw std::invalid_argument("interference_plus_noise: antenna count mismatch");
            sigma.noalias() += channels[j].h * channels[j].h.adjoint();
        }
    }
    return sigma;
}

Beamformer optimal_beamformer(const std::vector<ChannelRealization>& channels, std::size_t k,
                              double noise_power_w, InterferenceMode mode) {
    if (k >= channels.size()) throw std::out_of_range("optimal_beamformer: worker index");
    const Eigen::VectorXcd& h = channels[k].h;
    if (h.norm() == 0.0) throw std::domain_error("optimal_beamformer: degenerate zero channel");

    const Eigen::MatrixXcd sigma = interference_plus_noise(channels, k, noise_power_w, mode);
    Eigen::LDLT<Eigen::MatrixXcd> solver(sigma);
    Eigen::VectorXcd w = solver.solve(h);
    const double residual = (sigma * w - h).norm();
    if (!(residual <= 1e-8 * h.norm()))
        throw std::runtime_error("optimal_beamformer: Hermitian solve residual too large");

    w.normalize();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double mag = std::abs(w(i));
        if (mag > 1e-12) {
            w *= std::conj(w(i)) / mag;
            break;
        }
    }
    return Beamformer{std::move(w)};
}

double sinr_coefficient(const std::vector<ChannelRealization>& channels, std::size_t k,
                        const Beamformer& beam, double noise_power_w, InterferenceMode mode) {
    if (k >= channels.size()) throw std::out_of_range("sinr_coefficient: worker index");
    const double norm2 = beam.w.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-6)
        throw std::invalid_argument("sinr_coefficient: beamformer is not unit norm");
    const Eigen::MatrixXcd sigma = interference_plus_noise(channels, k, noise_power_w, mode);
    const std::complex<double> gain = channels[k].h.adjoint() * beam.w;
    const double denom = std::real(std::complex<double>(beam.w.adjoint() * (sigma * beam.w)));
    return std::norm(gain) / denom;
}

double uplink_bits(double t_up_s, double bandwidth_hz, double p_up_w, double beta) {
    if (t_up_s < 0.0 || bandwidth_hz < 0.0 || p_up_w < 0.0 || beta < 0.0)
        throw std::invalid_argument("uplink_bits: arguments must be non-negative");
    return t_up_s * bandwidth_hz * std::log2(1.0 + beta * p_up_w);
}

}  // namespace feelsim
