#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace feelsim {

struct ChannelParams {
    int num_antennas = 8;           // M
    double noise_power_w = 1e-6;    // sigma0^2
    double rician_factor_db = 8.0;  // linear K = 10^(dB/10)
    double path_loss_exponent = 3.2;
    double reference_distance_m = 1.0;
};

// Per-worker uplink channel vector toward the M-antenna base station.
struct ChannelRealization {
    Eigen::VectorXcd h;
    int worker_id = 0;
};

// Unit-norm receive combining vector.
struct Beamformer {
    Eigen::VectorXcd w;
};

// The rate formula keeps a cross-worker interference sum even though uploads
// are slotted TDMA; the formula is implemented verbatim by default and the
// isolated mode zeroes the sum (one transmitter per slot).
enum class InterferenceMode { eq10_verbatim, tdma_isolated };

// Draws one Rician block-fading realization per worker. Channel amplitude is
// sqrt(PL(d)) * g with PL(d) = (d0/d)^gamma and
// g = sqrt(K/(K+1)) * g_los + sqrt(1/(K+1)) * g_nlos,
// where g_los is a unit-modulus phase ramp and g_nlos is i.i.d. CN(0,1).
// Both components derive from the worker's substream of `seed`.
std::vector<ChannelRealization> sample_channels(const std::vector<double>& distances_m,
                                                const ChannelParams& params,
                                                std::uint64_t seed);

// Interference-plus-noise covariance for worker k:
// sum_{k' != k} h_k' h_k'^H + sigma0^2 I. Hermitian positive definite.
Eigen::MatrixXcd interference_plus_noise(const std::vector<ChannelRealization>& channels,
                                         std::size_t k, double noise_power_w,
                                         InterferenceMode mode = InterferenceMode::eq10_verbatim);

// Max-SINR receive beamformer, computed as the normalized Hermitian solve
// Sigma_k^-1 h_k (the dominant eigenvector of the rank-one generalized
// problem). Phase convention: first entry with magnitude above 1e-12 is made
// real-positive, so outputs are deterministic.
Beamformer optimal_beamformer(const std::vector<ChannelRealization>& channels,
                              std::size_t k, double noise_power_w,
                              InterferenceMode mode = InterferenceMode::eq10_verbatim);

// Effective SINR per unit transmit power:
// beta_k = |h_k^H w|^2 / (w^H Sigma_k w).
double sinr_coefficient(const std::vector<ChannelRealization>& channels, std::size_t k,
                        const Beamformer& beam, double noise_power_w,
                        InterferenceMode mode = InterferenceMode::eq10_verbatim);

// Bits delivered in an upload slot: T_up * B * log2(1 + beta * P_up).
double uplink_bits(double t_up_s, double bandwidth_hz, double p_up_w, double beta);

}  // namespace feelsim
