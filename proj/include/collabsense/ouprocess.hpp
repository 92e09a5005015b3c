#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Cholesky>

#include "collabsense/asymptotic.hpp"
#include "collabsense/types.hpp"

namespace collabsense {

/// Periodic power-constrained sampling of a stationary OU process with covariance
/// eta2 exp(-|dt| / tau). Each sample gets energy P T and, through the spatial
/// aggregation constant c, Fisher information J = c P T / eta2.
class OUSamplingScheme {
public:
    OUSamplingScheme(double eta2, double tau, double period, double power, double c);

    /// Scheme with unit power whose constant reproduces the requested J.
    static OUSamplingScheme with_fisher(double eta2, double tau, double period, double fisher) {
        return {eta2, tau, period, 1.0, fisher * eta2 / period};
    }

    double eta2() const { return eta2_; }
    double tau() const { return tau_; }
    double period() const { return period_; }
    double power() const { return power_; }
    double c() const { return c_; }

    double fisher() const { return c_ * power_ * period_ / eta2_; }
    double rho() const { return std::exp(-period_ / tau_); }
    double rho_prime() const { return std::tanh(period_ / (2.0 * tau_)); }

    OUSamplingScheme with_period(double period) const { return {eta2_, tau_, period, power_, c_}; }

private:
    double eta2_;
    double tau_;
    double period_;
    double power_;
    double c_;
};

/// Kac-Murdock-Szego matrix C_ij = rho^|i-j|.
template <typename Scalar = double>
Matrix<Scalar> kms_matrix(int k, Scalar rho) {
    if (k < 1) throw std::invalid_argument("kms_matrix: dimension must be >= 1");
    if (!(rho >= Scalar(0)) || !(rho < Scalar(1))) throw std::invalid_argument("kms_matrix: rho must lie in [0,1)");
    Vector<Scalar> powers(k);
    powers[0] = Scalar(1);
    for (int i = 1; i < k; ++i) powers[i] = powers[i - 1] * rho;
    Matrix<Scalar> C(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) C(i, j) = powers[std::abs(i - j)];
    return C;
}

/// Steady-state Var(theta_t | y) for periodic samples, t in [0, T]:
///
///   eta2 [1 + eta2 J rho' (1 - ((r - rho/r)/(1 - rho))^2)] / sqrt((eta2 J + rho')(eta2 J + 1/rho'))
///
/// with rho = e^{-T/tau}, rho' = (1 - rho)/(1 + rho) = tanh(T / 2tau), r = e^{-t/tau}.
/// The bracket ratio is evaluated with expm1 so that T -> 0 stays accurate.
template <typename Scalar = double>
Scalar closed_form_variance(Scalar eta2, Scalar tau, Scalar period, Scalar fisher, Scalar t) {
    using std::exp;
    using std::expm1;
    using std::sqrt;
    using std::tanh;
    const Scalar rho_prime = tanh(period / (Scalar(2) * tau));
    const Scalar ratio = exp(-t / tau) * expm1(-(period - Scalar(2) * t) / tau) / expm1(-period / tau);
    const Scalar info = eta2 * fisher;
    return eta2 * (Scalar(1) + info * rho_prime * (Scalar(1) - ratio * ratio)) /
           sqrt((info + rho_prime) * (info + Scalar(1) / rho_prime));
}

inline double closed_form_variance(const OUSamplingScheme& scheme, double t) {
    return closed_form_variance<double>(scheme.eta2(), scheme.tau(), scheme.period(), scheme.fisher(), t);
}

/// I_T / (1 - rho)^2, where I_T = (1/T) int_0^T (r - rho/r)^2 dt = (1 - rho^2)/(T/tau) - 2 rho.
/// Equals (sinh x / x - 1) / (2 sinh^2(x/2)) with x = T/tau; a series is used for small x.
template <typename Scalar = double>
Scalar normalized_sampling_integral(Scalar period, Scalar tau) {
    using std::abs;
    using std::exp;
    using std::sinh;
    const Scalar x = period / tau;
    if (x > Scalar(1)) {
        const Scalar rho = exp(-x);
        const Scalar integral = (Scalar(1) - rho * rho) / x - Scalar(2) * rho;
        return integral / ((Scalar(1) - rho) * (Scalar(1) - rho));
    }
    // sinh(x)/x - 1 = sum_{k>=1} x^{2k} / (2k+1)!
    const Scalar x2 = x * x;
    Scalar term = x2 / Scalar(6);
    Scalar excess = term;
    for (int k = 2; k < 40 && abs(term) > std::numeric_limits<Scalar>::epsilon() * excess; ++k) {
        term *= x2 / Scalar((2 * k) * (2 * k + 1));
        excess += term;
    }
    const Scalar half = sinh(x / Scalar(2));
    return excess / (Scalar(2) * half * half);
}

/// I_T itself; only used for reporting and tests.
template <typename Scalar = double>
Scalar sampling_integral(Scalar period, Scalar tau) {
    using std::exp;
    const Scalar one_minus_rho = -std::expm1(-period / tau);
    return normalized_sampling_integral(period, tau) * one_minus_rho * one_minus_rho;
}

/// Time average of closed_form_variance over one period.
template <typename Scalar = double>
Scalar average_variance(Scalar eta2, Scalar tau, Scalar period, Scalar fisher) {
    using std::sqrt;
    using std::tanh;
    const Scalar rho_prime = tanh(period / (Scalar(2) * tau));
    const Scalar info = eta2 * fisher;
    return eta2 * (Scalar(1) + info * rho_prime * (Scalar(1) - normalized_sampling_integral(period, tau))) /
           sqrt((info + rho_prime) * (info + Scalar(1) / rho_prime));
}

inline double avar(const OUSamplingScheme& scheme) {
    return average_variance<double>(scheme.eta2(), scheme.tau(), scheme.period(), scheme.fisher());
}

/// T -> 0 limit of the conditional variance, eta2 / sqrt(1 + 2 P tau c). This is also the
/// min-max optimal worst-case variance.
double var0(double eta2, double tau, double power, double c);

inline double var0(const OUSamplingScheme& scheme) {
    return var0(scheme.eta2(), scheme.tau(), scheme.power(), scheme.c());
}

/// c = E[g~^2](1 - H_Q)/xi2 (optimal) or E[g~]^2 / (xi2 (1 + R_Q)) (equal).
/// cfg.energy is ignored.
double spatial_constant(Strategy strategy, const AsymptoticConfig& cfg);

/// Stationary AR(1) discretization: theta_{k+1} = a theta_k + sqrt(eta2 (1 - a^2)) w_k,
/// a = exp(-dt/tau), theta_0 ~ N(0, eta2). Returns n_steps values.
VectorXd generate_path(double eta2, double tau, double dt, int n_steps, std::uint64_t seed);

/// Exact Var(theta_t | y) given samples y_k = theta(s_k) + v_k, v_k ~ N(0, 1/J).
double conditional_variance(std::span<const double> sample_times, double t, double eta2, double tau,
                            double fisher);

/// Half-width K_w with rho^{K_w} <= eps: ceil(tau/T ln(1/eps)).
int window_half_width(const OUSamplingScheme& scheme, double eps = 1e-12);

/// MMSE interpolation weights from the 2K+2 samples at k T, k = -K .. K+1, which
/// bracket the period [0, T]. The window covariance is factored once.
class WindowFilter {
public:
    WindowFilter(const OUSamplingScheme& scheme, int half_width);

    const OUSamplingScheme& scheme() const { return scheme_; }
    int half_width() const { return half_width_; }
    int window_size() const { return 2 * half_width_ + 2; }
    /// Time of window slot i relative to the period start.
    double slot_time(int i) const { return (i - half_width_) * scheme_.period(); }

    /// R_yy^{-1} R_{y theta_t} for t in [0, T].
    VectorXd weights(double t) const;
    /// eta2 - R_{theta_t y} R_yy^{-1} R_{y theta_t}.
    double variance(double t) const;

private:
    VectorXd cross_covariance(double t) const;

    OUSamplingScheme scheme_;
    int half_width_;
    Eigen::LLT<MatrixXd> factor_;
};

/// Var(theta_t | window of 2K_w+2 samples) computed by direct conditioning.
double window_variance(const OUSamplingScheme& scheme, double t, int half_width);

/// Instantaneous variance on an n_points grid over [0, T], with Avar and Var_0.
struct VarianceProfile {
    std::vector<double> times;
    std::vector<double> variances;
    double avar = 0.0;
    double var0 = 0.0;
};

VarianceProfile variance_profile(const OUSamplingScheme& scheme, int n_points);

/// MMSE estimates of theta on `t_grid` from samples y_k taken at first_sample_time + k T.
/// Each estimate conditions on the bracketing window of samples around t (clipped at the
/// ends of the record). Linear in y.
VectorXd filter_path(std::span<const double> y, const OUSamplingScheme& scheme, std::span<const double> t_grid,
                     double first_sample_time = 0.0);

}  // namespace collabsense

namespace collabsense {

/// Exact OU sample path at arbitrary nondecreasing times (stationary start).
VectorXd generate_path_at(std::span<const double> times, double eta2, double tau, std::uint64_t seed);

/// One simulated record: the path on the estimation grid j * T_obs / M, j = 0..M-1,
/// the noisy periodic samples (including margins of bracketing samples on both
/// sides of [0, T_obs)), and the filtered estimates on the grid.
struct FilterTrace {
    std::vector<double> grid;
    VectorXd theta;
    VectorXd estimate;
    std::vector<double> sample_times;
    VectorXd samples;

    double mse() const { return (theta - estimate).squaredNorm() / static_cast<double>(theta.size()); }
};

FilterTrace simulate_filter_trace(const OUSamplingScheme& scheme, double t_obs, int m_steps, std::uint64_t seed);

}  // namespace collabsense
