#include "collabsense/asymptotic.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <utility>
#include <variant>

#include "collabsense/rng.hpp"

namespace collabsense {

namespace detail {
double h_q_fallback(int q, double lambda, double result, double max_term) {
    static std::mutex mutex;
    static std::map<std::pair<int, double>, double> cache;
    {
        const std::lock_guard lock(mutex);
        if (const auto it = cache.find({q, lambda}); it != cache.end()) return it->second;
        std::cerr << "warning: h_q(q=" << q << ", lambda=" << lambda << ") closed form lost more than 6 digits (result "
                  << result << ", largest term " << max_term << "); using Monte Carlo\n";
    }
    const double value = h_q_gamma_mc(q, lambda, 10'000'000, 0x4851u).mean;
    const std::lock_guard lock(mutex);
    cache.emplace(std::pair{q, lambda}, value);
    return value;
}
}  // namespace detail

namespace {

// Welford accumulator.
class RunningMoments {
public:
    void push(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }
    McEstimate estimate() const {
        if (count_ < 2) return {mean_, 0.0};
        const double variance = m2_ / static_cast<double>(count_ - 1);
        return {mean_, std::sqrt(variance / static_cast<double>(count_))};
    }

private:
    std::int64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace

McEstimate h_q_gamma_mc(int q, double lambda, std::int64_t n_samples, std::uint64_t seed) {
    if (q < 1 || n_samples < 1) throw std::invalid_argument("h_q_gamma_mc: need q >= 1 and n_samples >= 1");
    Engine engine(seed);
    RunningMoments acc;
    for (std::int64_t s = 0; s < n_samples; ++s) {
        double x = 0.0;
        for (int k = 0; k < q; ++k) x -= std::log(open_uniform(engine));
        acc.push(lambda / (lambda + x));
    }
    return acc.estimate();
}

McEstimate h_q_mc(int q, double eta2, double sigma2, const GainModel& gains, std::int64_t n_samples,
                  std::uint64_t seed) {
    if (q < 1 || n_samples < 1) throw std::invalid_argument("h_q_mc: need q >= 1 and n_samples >= 1");
    if (!(eta2 >= 0.0) || !(sigma2 > 0.0)) throw std::invalid_argument("h_q_mc: need eta2 >= 0 and sigma2 > 0");
    const double snr = eta2 / sigma2;
    RunningMoments acc;
    if (const auto* constant = std::get_if<ConstantGain>(&gains)) {
        const double value = 1.0 / (1.0 + snr * q * constant->value * constant->value);
        for (std::int64_t s = 0; s < n_samples; ++s) acc.push(value);
        return acc.estimate();
    }
    const double alpha = std::get<RayleighGain>(gains).alpha;
    if (!(alpha > 0.0)) throw std::invalid_argument("h_q_mc: Rayleigh alpha must be positive");
    Engine engine(seed);
    for (std::int64_t s = 0; s < n_samples; ++s) {
        double energy = 0.0;
        for (int k = 0; k < q; ++k) {
            const double h = alpha * std::sqrt(-2.0 * std::log(open_uniform(engine)));
            energy += h * h;
        }
        acc.push(1.0 / (1.0 + snr * energy));
    }
    return acc.estimate();
}

double r_q(int q, double eta2, double sigma2, double mean_h, double var_h) {
    if (q < 1) throw std::invalid_argument("r_q: q must be >= 1");
    if (mean_h == 0.0) throw std::invalid_argument("r_q: mean observation gain is zero");
    if (!(eta2 > 0.0)) throw std::invalid_argument("r_q: eta2 must be positive");
    return (var_h + sigma2 / eta2) / (q * mean_h * mean_h);
}

void AsymptoticConfig::validate() const {
    if (!(energy >= 0.0) || !(eta2 > 0.0) || !(xi2 > 0.0) || !(sigma2 >= 0.0) || q < 1) {
        throw std::invalid_argument("asymptotic config: need energy >= 0, eta2 > 0, xi2 > 0, sigma2 >= 0, q >= 1");
    }
    if (const auto* r = std::get_if<RayleighGain>(&observation); r && !(r->alpha > 0.0)) {
        throw std::invalid_argument("asymptotic config: Rayleigh alpha must be positive");
    }
}

double h_q_for(const AsymptoticConfig& cfg) {
    cfg.validate();
    if (const auto* constant = std::get_if<ConstantGain>(&cfg.observation)) {
        if (cfg.sigma2 == 0.0) return constant->value == 0.0 ? 1.0 : 0.0;
        return 1.0 / (1.0 + cfg.eta2 / cfg.sigma2 * cfg.q * constant->value * constant->value);
    }
    const double alpha = std::get<RayleighGain>(cfg.observation).alpha;
    const double lambda = cfg.sigma2 / (2.0 * alpha * alpha * cfg.eta2);
    if (lambda == 0.0) return 0.0;
    return h_q(cfg.q, lambda);
}

double r_q_for(const AsymptoticConfig& cfg) {
    cfg.validate();
    const GainMoments m = moments(cfg.observation);
    return r_q(cfg.q, cfg.eta2, cfg.sigma2, m.mean, m.variance());
}

double j_opt_asym(const AsymptoticConfig& cfg) {
    const GainMoments g = moments(cfg.channel);
    return cfg.energy / cfg.eta2 * g.second / cfg.xi2 * (1.0 - h_q_for(cfg));
}

double j_eq_asym(const AsymptoticConfig& cfg) {
    const GainMoments g = moments(cfg.channel);
    return cfg.energy / cfg.eta2 * g.mean * g.mean / cfg.xi2 / (1.0 + r_q_for(cfg));
}

}  // namespace collabsense
