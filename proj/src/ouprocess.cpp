#include "collabsense/ouprocess.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "collabsense/rng.hpp"

namespace collabsense {

OUSamplingScheme::OUSamplingScheme(double eta2, double tau, double period, double power, double c)
    : eta2_(eta2), tau_(tau), period_(period), power_(power), c_(c) {
    if (!(eta2 > 0.0) || !(tau > 0.0) || !(period > 0.0) || !(power >= 0.0) || !(c >= 0.0)) {
        throw std::invalid_argument("OU sampling scheme: need eta2, tau, period > 0 and power, c >= 0");
    }
}

double var0(double eta2, double tau, double power, double c) {
    if (!(eta2 > 0.0) || !(tau > 0.0) || !(power >= 0.0) || !(c >= 0.0)) {
        throw std::invalid_argument("var0: need eta2, tau > 0 and power, c >= 0");
    }
    return eta2 / std::sqrt(1.0 + 2.0 * power * tau * c);
}

double spatial_constant(Strategy strategy, const AsymptoticConfig& cfg) {
    const GainMoments g = moments(cfg.channel);
    if (strategy == Strategy::optimal) return g.second * (1.0 - h_q_for(cfg)) / cfg.xi2;
    return g.mean * g.mean / (cfg.xi2 * (1.0 + r_q_for(cfg)));
}

VectorXd generate_path(double eta2, double tau, double dt, int n_steps, std::uint64_t seed) {
    if (!(dt > 0.0) || !(tau > 0.0) || !(eta2 >= 0.0) || n_steps < 0) {
        throw std::invalid_argument("generate_path: need dt > 0, tau > 0, eta2 >= 0, n_steps >= 0");
    }
    Engine engine(seed);
    std::normal_distribution<double> normal;
    const double a = std::exp(-dt / tau);
    const double innovation = std::sqrt(eta2 * -std::expm1(-2.0 * dt / tau));
    VectorXd path(n_steps);
    if (n_steps == 0) return path;
    path[0] = std::sqrt(eta2) * normal(engine);
    for (int k = 1; k < n_steps; ++k) path[k] = a * path[k - 1] + innovation * normal(engine);
    return path;
}

namespace {

MatrixXd sample_covariance(std::span<const double> times, double eta2, double tau, double fisher) {
    const auto k = static_cast<Eigen::Index>(times.size());
    MatrixXd R(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) R(i, j) = eta2 * std::exp(-std::abs(times[i] - times[j]) / tau);
        R(i, i) += 1.0 / fisher;
    }
    return R;
}

Eigen::LLT<MatrixXd> factor_or_throw(const MatrixXd& R, const char* where) {
    Eigen::LLT<MatrixXd> llt(R);
    if (llt.info() != Eigen::Success) {
        const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(R, Eigen::EigenvaluesOnly);
        throw std::runtime_error(std::string(where) + ": sample covariance not positive definite (eigenvalues in [" +
                                 std::to_string(eig.eigenvalues().minCoeff()) + ", " +
                                 std::to_string(eig.eigenvalues().maxCoeff()) + "])");
    }
    return llt;
}

void require_positive_fisher(double fisher, const char* where) {
    if (!(fisher > 0.0)) throw std::invalid_argument(std::string(where) + ": Fisher information must be positive");
}

}  // namespace

double conditional_variance(std::span<const double> sample_times, double t, double eta2, double tau,
                            double fisher) {
    if (sample_times.empty()) return eta2;
    require_positive_fisher(fisher, "conditional_variance");
    const MatrixXd R = sample_covariance(sample_times, eta2, tau, fisher);
    VectorXd cross(static_cast<Eigen::Index>(sample_times.size()));
    for (Eigen::Index i = 0; i < cross.size(); ++i) cross[i] = eta2 * std::exp(-std::abs(t - sample_times[i]) / tau);
    const auto llt = factor_or_throw(R, "conditional_variance");
    return eta2 - cross.dot(llt.solve(cross));
}

int window_half_width(const OUSamplingScheme& scheme, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("window_half_width: eps must lie in (0,1)");
    return static_cast<int>(std::ceil(scheme.tau() / scheme.period() * std::log(1.0 / eps)));
}

WindowFilter::WindowFilter(const OUSamplingScheme& scheme, int half_width)
    : scheme_(scheme), half_width_(half_width) {
    if (half_width < 0) throw std::invalid_argument("WindowFilter: half width must be >= 0");
    require_positive_fisher(scheme.fisher(), "WindowFilter");
    std::vector<double> times(static_cast<std::size_t>(window_size()));
    for (int i = 0; i < window_size(); ++i) times[i] = slot_time(i);
    factor_ = factor_or_throw(sample_covariance(times, scheme.eta2(), scheme.tau(), scheme.fisher()), "WindowFilter");
}

VectorXd WindowFilter::cross_covariance(double t) const {
    VectorXd cross(window_size());
    for (int i = 0; i < window_size(); ++i) {
        cross[i] = scheme_.eta2() * std::exp(-std::abs(t - slot_time(i)) / scheme_.tau());
    }
    return cross;
}

VectorXd WindowFilter::weights(double t) const { return factor_.solve(cross_covariance(t)); }

double WindowFilter::variance(double t) const {
    const VectorXd cross = cross_covariance(t);
    return scheme_.eta2() - cross.dot(factor_.solve(cross));
}

double window_variance(const OUSamplingScheme& scheme, double t, int half_width) {
    if (scheme.fisher() == 0.0) return scheme.eta2();
    return WindowFilter(scheme, half_width).variance(t);
}

VarianceProfile variance_profile(const OUSamplingScheme& scheme, int n_points) {
    if (n_points < 2) throw std::invalid_argument("variance_profile: need at least 2 points");
    VarianceProfile profile;
    profile.times.resize(static_cast<std::size_t>(n_points));
    profile.variances.resize(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double t = scheme.period() * i / (n_points - 1);
        profile.times[i] = t;
        profile.variances[i] = closed_form_variance(scheme, t);
    }
    profile.avar = avar(scheme);
    profile.var0 = var0(scheme);
    return profile;
}

VectorXd filter_path(std::span<const double> y, const OUSamplingScheme& scheme, std::span<const double> t_grid,
                     double first_sample_time) {
    if (y.empty()) throw std::invalid_argument("filter_path: no observations");
    require_positive_fisher(scheme.fisher(), "filter_path");
    const auto n_samples = static_cast<long>(y.size());
    const double period = scheme.period();
    const int half_width = window_half_width(scheme);
    const WindowFilter full(scheme, half_width);

    // Interior points share the full-window factor; weights depend only on the phase.
    std::unordered_map<std::uint64_t, VectorXd> by_phase;
    VectorXd estimates(static_cast<Eigen::Index>(t_grid.size()));
    std::vector<double> local_times;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double offset = t_grid[i] - first_sample_time;
        const long anchor = static_cast<long>(std::floor(offset / period));
        const long first = anchor - half_width;
        const long last = anchor + half_width + 1;  // inclusive
        if (first >= 0 && last < n_samples) {
            const double phase = offset - static_cast<double>(anchor) * period;
            auto [it, inserted] = by_phase.try_emplace(std::bit_cast<std::uint64_t>(phase));
            if (inserted) it->second = full.weights(phase);
            estimates[static_cast<Eigen::Index>(i)] =
                it->second.dot(Eigen::Map<const VectorXd>(y.data() + first, full.window_size()));
            continue;
        }
        const long lo = std::clamp(first, 0L, n_samples - 1);
        const long hi = std::clamp(last, 0L, n_samples - 1);
        local_times.clear();
        for (long k = lo; k <= hi; ++k) local_times.push_back(static_cast<double>(k) * period);
        const MatrixXd R = sample_covariance(local_times, scheme.eta2(), scheme.tau(), scheme.fisher());
        VectorXd cross(static_cast<Eigen::Index>(local_times.size()));
        for (Eigen::Index j = 0; j < cross.size(); ++j) {
            cross[j] = scheme.eta2() * std::exp(-std::abs(offset - local_times[j]) / scheme.tau());
        }
        const VectorXd w = factor_or_throw(R, "filter_path").solve(cross);
        estimates[static_cast<Eigen::Index>(i)] = w.dot(Eigen::Map<const VectorXd>(y.data() + lo, w.size()));
    }
    return estimates;
}

}  // namespace collabsense

namespace collabsense {

VectorXd generate_path_at(std::span<const double> times, double eta2, double tau, std::uint64_t seed) {
    if (!(tau > 0.0) || !(eta2 >= 0.0)) throw std::invalid_argument("generate_path_at: need tau > 0, eta2 >= 0");
    Engine engine(seed);
    std::normal_distribution<double> normal;
    VectorXd path(static_cast<Eigen::Index>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i == 0) {
            path[0] = std::sqrt(eta2) * normal(engine);
            continue;
        }
        const double step = times[i] - times[i - 1];
        if (step < 0.0) throw std::invalid_argument("generate_path_at: times must be nondecreasing");
        const double a = std::exp(-step / tau);
        const double innovation = std::sqrt(eta2 * -std::expm1(-2.0 * step / tau));
        path[static_cast<Eigen::Index>(i)] = a * path[static_cast<Eigen::Index>(i - 1)] + innovation * normal(engine);
    }
    return path;
}

FilterTrace simulate_filter_trace(const OUSamplingScheme& scheme, double t_obs, int m_steps, std::uint64_t seed) {
    if (!(t_obs > 0.0) || m_steps < 1) throw std::invalid_argument("simulate_filter_trace: need t_obs > 0, m_steps >= 1");
    require_positive_fisher(scheme.fisher(), "simulate_filter_trace");
    const double period = scheme.period();
    const double dt = t_obs / m_steps;
    const int margin = window_half_width(scheme) + 1;
    const long k_first = -margin;
    const long k_last = static_cast<long>(std::floor(t_obs / period)) + margin;

    FilterTrace trace;
    trace.grid.resize(static_cast<std::size_t>(m_steps));
    for (int j = 0; j < m_steps; ++j) trace.grid[j] = j * dt;
    for (long k = k_first; k <= k_last; ++k) trace.sample_times.push_back(static_cast<double>(k) * period);

    // Simulate on the merged, sorted set of sample and grid instants.
    struct Instant {
        double time;
        bool is_sample;
        std::size_t index;
    };
    std::vector<Instant> instants;
    instants.reserve(trace.grid.size() + trace.sample_times.size());
    for (std::size_t i = 0; i < trace.sample_times.size(); ++i) instants.push_back({trace.sample_times[i], true, i});
    for (std::size_t j = 0; j < trace.grid.size(); ++j) instants.push_back({trace.grid[j], false, j});
    std::stable_sort(instants.begin(), instants.end(),
                     [](const Instant& a, const Instant& b) { return a.time < b.time; });
    std::vector<double> times(instants.size());
    for (std::size_t i = 0; i < instants.size(); ++i) times[i] = instants[i].time;
    const VectorXd path = generate_path_at(times, scheme.eta2(), scheme.tau(), derive_seed(seed, 1));

    trace.theta.resize(m_steps);
    trace.samples.resize(static_cast<Eigen::Index>(trace.sample_times.size()));
    for (std::size_t i = 0; i < instants.size(); ++i) {
        const auto target = static_cast<Eigen::Index>(instants[i].index);
        (instants[i].is_sample ? trace.samples : trace.theta)[target] = path[static_cast<Eigen::Index>(i)];
    }
    Engine noise_engine(derive_seed(seed, 2));
    std::normal_distribution<double> normal;
    const double noise_sd = 1.0 / std::sqrt(scheme.fisher());
    for (Eigen::Index i = 0; i < trace.samples.size(); ++i) trace.samples[i] += noise_sd * normal(noise_engine);

    trace.estimate = filter_path(std::span<const double>(trace.samples.data(), trace.samples.size()), scheme,
                                 trace.grid, static_cast<double>(k_first) * period);
    return trace;
}

}  // namespace collabsense
