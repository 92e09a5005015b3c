#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "collabsense/gains.hpp"

namespace collabsense {

/// e^z E1(z), where E1(z) = int_z^inf e^{-t}/t dt.
///
/// Power series below z = 1, modified-Lentz continued fraction above. The scaled form
/// stays finite where E1 itself underflows.
template <typename Scalar = double>
Scalar exp_integral_scaled(Scalar z) {
    using std::abs;
    using std::exp;
    using std::log;
    if (!(z > Scalar(0))) {
        throw std::invalid_argument("exp_integral: argument must be positive");
    }
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    if (z < Scalar(1)) {
        // E1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!)
        Scalar sum = 0;
        Scalar power = 1;  // (-1)^{k+1} z^k / k!
        for (int k = 1; k < 200; ++k) {
            power *= (k == 1 ? z : -z / Scalar(k));
            const Scalar term = power / Scalar(k);
            sum += term;
            if (abs(term) < eps * abs(sum)) break;
        }
        return exp(z) * (-std::numbers::egamma_v<Scalar> - log(z) + sum);
    }
    const Scalar tiny = std::numeric_limits<Scalar>::min() / eps;
    Scalar b = z + Scalar(1);
    Scalar c = Scalar(1) / tiny;
    Scalar d = Scalar(1) / b;
    Scalar h = d;
    for (int i = 1; i < 10000; ++i) {
        const Scalar a = -Scalar(i) * Scalar(i);
        b += Scalar(2);
        d = Scalar(1) / (a * d + b);
        c = b + a / c;
        const Scalar delta = c * d;
        h *= delta;
        if (abs(delta - Scalar(1)) <= eps) break;
    }
    return h;
}

template <typename Scalar = double>
Scalar exp_integral(Scalar z) {
    using std::exp;
    return exp(-z) * exp_integral_scaled(z);
}

/// Monte Carlo estimate with its standard error.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// H_Q for Rayleigh observation gains, evaluated from the Monte Carlo representation
/// E[lambda / (lambda + X)], X ~ Gamma(q, 1).
McEstimate h_q_gamma_mc(int q, double lambda, std::int64_t n_samples, std::uint64_t seed);

namespace detail {
/// Monte Carlo replacement for a cancelled closed form. Memoized per (q, lambda) and
/// warns once per pair.
double h_q_fallback(int q, double lambda, double result, double max_term);
}

/// Closed-form H_Q for Rayleigh observation gains,
///
///   H_Q = [(-1)^{Q-1} lambda^Q e^lambda E1(lambda) - sum_{i=0}^{Q-2} i! (-lambda)^{Q-1-i}] / (Q-1)!
///
/// with lambda = sigma^2 / (2 alpha_h^2 eta^2). Terms are formed already divided by
/// (Q-1)! and summed with Neumaier compensation. If the result is smaller than 1e-6 of
/// the largest term (six digits lost to cancellation) a 10^7-sample Monte Carlo
/// estimate is returned instead and a warning is printed.
template <typename Scalar = double>
Scalar h_q(int q, Scalar lambda) {
    using std::abs;
    if (q < 1) throw std::invalid_argument("h_q: q must be >= 1, got " + std::to_string(q));
    if (!(lambda > Scalar(0))) throw std::invalid_argument("h_q: lambda must be positive");

    // t_i = i! (-lambda)^{Q-1-i} / (Q-1)!, built downward from t_{Q-1} = 1.
    Scalar t = 1;
    Scalar sum = 0;
    Scalar compensation = 0;
    Scalar max_term = 0;
    auto accumulate = [&](Scalar value) {
        const Scalar s = sum + value;
        compensation += abs(sum) >= abs(value) ? (sum - s) + value : (value - s) + sum;
        sum = s;
        max_term = std::max(max_term, abs(value));
    };
    for (int i = q - 1; i >= 1; --i) {
        t *= -lambda / Scalar(i);
        accumulate(-t);  // t is now t_{i-1}
    }
    accumulate(lambda * exp_integral_scaled(lambda) * t);
    const Scalar result = sum + compensation;
    if (abs(result) < Scalar(1e-6) * max_term) {
        return Scalar(detail::h_q_fallback(q, static_cast<double>(lambda), static_cast<double>(result),
                                           static_cast<double>(max_term)));
    }
    return result;
}

/// Monte Carlo of H_Q = E[1 / (1 + (eta2/sigma2)(h_1^2 + ... + h_q^2))] over i.i.d. gains.
McEstimate h_q_mc(int q, double eta2, double sigma2, const GainModel& gains, std::int64_t n_samples,
                  std::uint64_t seed);

/// R_Q = (Var[h] + sigma2/eta2) / (q E[h]^2).
double r_q(int q, double eta2, double sigma2, double mean_h, double var_h);

/// Inputs of the large-network Q-clique limits.
struct AsymptoticConfig {
    double energy = 0.7;
    double eta2 = 1.0;
    double xi2 = 1.0;
    double sigma2 = 1.0;
    int q = 1;
    GainModel observation = RayleighGain{1.0};
    GainModel channel = RayleighGain{1.0};

    void validate() const;
};

/// H_Q for the configured observation-gain model. Rayleigh uses the closed form
/// (lambda = 0 gives 0); constant gains are deterministic, 1 / (1 + q eta2 h0^2 / sigma2).
double h_q_for(const AsymptoticConfig& cfg);
double r_q_for(const AsymptoticConfig& cfg);

/// J_opt = (E/eta2) (E[g~^2]/xi2) (1 - H_Q).
double j_opt_asym(const AsymptoticConfig& cfg);
/// J_eq = (E/eta2) (E[g~]^2/xi2) / (1 + R_Q).
double j_eq_asym(const AsymptoticConfig& cfg);

inline double j_asym(Strategy strategy, const AsymptoticConfig& cfg) {
    return strategy == Strategy::optimal ? j_opt_asym(cfg) : j_eq_asym(cfg);
}

}  // namespace collabsense
