#pragma once

#include <cstdint>
#include <variant>

#include "collabsense/types.hpp"

namespace collabsense {

struct RayleighGain {
    double alpha = 1.0;
};

/// Every sensor gets the same gain (homogeneous network).
struct ConstantGain {
    double value = 1.0;
};

using GainModel = std::variant<RayleighGain, ConstantGain>;

/// First two moments of a gain distribution. Rayleigh values are the closed forms
/// E[x] = alpha sqrt(pi/2), E[x^2] = 2 alpha^2.
struct GainMoments {
    double mean = 0.0;
    double second = 0.0;
    double variance() const { return second - mean * mean; }
};

GainMoments moments(const GainModel& model);

/// n i.i.d. Rayleigh(alpha) draws by inverse CDF, x = alpha sqrt(-2 ln u).
VectorXd sample_rayleigh(int n, double alpha, std::uint64_t seed);

/// n draws from `model`; constant models ignore the seed.
VectorXd sample_gains(int n, const GainModel& model, std::uint64_t seed);

/// Observation gains, unnormalized channel gains and noise variances of one network.
///
/// Measurement noise is i.i.d. with covariance sigma2 * I. `g_tilde` is stored
/// unscaled; the channel actually seen by the fusion center is
/// effective_channel_gains(), i.e. g_tilde / sqrt(N).
struct SensorField {
    VectorXd h;
    VectorXd g_tilde;
    double eta2 = 1.0;
    double sigma2 = 1.0;
    double xi2 = 1.0;

    int size() const { return static_cast<int>(h.size()); }
    /// Throws std::invalid_argument on mismatched lengths or invalid variances.
    void validate() const;
};

VectorXd effective_channel_gains(const SensorField& field);

}  // namespace collabsense
