#include "collabsense/gains.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "collabsense/rng.hpp"

namespace collabsense {

GainMoments moments(const GainModel& model) {
    struct Visitor {
        GainMoments operator()(const RayleighGain& r) const {
            return {r.alpha * std::sqrt(std::numbers::pi / 2.0), 2.0 * r.alpha * r.alpha};
        }
        GainMoments operator()(const ConstantGain& c) const { return {c.value, c.value * c.value}; }
    };
    return std::visit(Visitor{}, model);
}

VectorXd sample_rayleigh(int n, double alpha, std::uint64_t seed) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("sample_rayleigh: alpha must be positive, got " + std::to_string(alpha));
    }
    if (n < 0) throw std::invalid_argument("sample_rayleigh: negative n");
    Engine engine(seed);
    VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = alpha * std::sqrt(-2.0 * std::log(open_uniform(engine)));
    return out;
}

VectorXd sample_gains(int n, const GainModel& model, std::uint64_t seed) {
    if (const auto* r = std::get_if<RayleighGain>(&model)) return sample_rayleigh(n, r->alpha, seed);
    return VectorXd::Constant(n, std::get<ConstantGain>(model).value);
}

void SensorField::validate() const {
    if (h.size() == 0) throw std::invalid_argument("sensor field: empty");
    if (h.size() != g_tilde.size()) {
        throw std::invalid_argument("sensor field: h has " + std::to_string(h.size()) +
                                    " entries but g_tilde has " + std::to_string(g_tilde.size()));
    }
    if (!(eta2 > 0.0) || !(xi2 > 0.0) || !(sigma2 >= 0.0)) {
        throw std::invalid_argument("sensor field: need eta2 > 0, xi2 > 0, sigma2 >= 0");
    }
}

VectorXd effective_channel_gains(const SensorField& field) {
    return field.g_tilde / std::sqrt(static_cast<double>(field.g_tilde.size()));
}

}  // namespace collabsense
