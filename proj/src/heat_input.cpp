#include "thermoflow/heat_input.hpp"

#include "thermoflow/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace thermoflow {

namespace {

struct StateMoments {
    double alpha_mean;
    double alpha_cov;
    double t_gas;
    double t_gas_std;
};

StateMoments moments(const EngineSample& sample, const HeatInputModel& model) {
    if (sample.fired) {
        return {mean_alpha_c(sample, model), model.fired_alpha_cov, model.t_gas_fired, model.t_gas_fired_std};
    }
    return {mean_alpha_c(sample, model), model.coasting_alpha_cov, model.t_gas_coasting, model.t_gas_coasting_std};
}

}  // namespace

double PowerLaw::operator()(double n) const {
    if (n <= 0.0) {
        return 0.0;
    }
    return coeff * std::pow(n, exponent);
}

void HeatInputModel::validate() const {
    if (!(fired_alpha.coeff >= 0.0) || !(coasting_alpha.coeff >= 0.0)) {
        throw ConfigError("heat: mean HTC coefficients must be non-negative");
    }
    if (!(fired_alpha_cov >= 0.0) || !(coasting_alpha_cov >= 0.0)) {
        throw ConfigError("heat: coefficients of variation must be non-negative");
    }
    if (!(t_gas_coasting > 0.0) || !(t_gas_fired > t_gas_coasting)) {
        throw ConfigError("heat: require T_gas_fired > T_gas_coasting > 0");
    }
    if (!(t_gas_fired_std >= 0.0) || !(t_gas_coasting_std >= 0.0)) {
        throw ConfigError("heat: gas temperature spreads must be non-negative");
    }
    if (!(correlation_alpha_t >= -1.0 && correlation_alpha_t <= 1.0)) {
        throw ConfigError("heat: correlation_alpha_T must lie in [-1, 1]");
    }
    if (!(speed_min > 0.0) || !(speed_max > speed_min)) {
        throw ConfigError("heat: speed range must satisfy 0 < speed_min < speed_max");
    }

    // The heat delivered at wall temperature T_ref is linear in T_ref, so the
    // two ends of [350, 550] K decide the comparison at each speed.
    constexpr int kSpeedChecks = 33;
    for (int i = 0; i < kSpeedChecks; ++i) {
        const double n = speed_min + (speed_max - speed_min) * i / (kSpeedChecks - 1);
        const EngineSample fired{0.0, n, true};
        const EngineSample coasting{0.0, n, false};
        for (const double t_ref : std::array{350.0, 550.0}) {
            const double q_fired = mean_alpha_c(fired, *this) * (modified_gas_temperature(fired, *this) - t_ref);
            const double q_coast =
                mean_alpha_c(coasting, *this) * (modified_gas_temperature(coasting, *this) - t_ref);
            if (!(q_fired > q_coast)) {
                throw ConfigError("heat: fired heat input must exceed coasting heat input at every speed");
            }
        }
    }
}

double mean_alpha_c(const EngineSample& sample, const HeatInputModel& model) {
    const double n = std::clamp(sample.n, model.speed_min, model.speed_max);
    return sample.fired ? model.fired_alpha(n) : model.coasting_alpha(n);
}

double modified_gas_temperature(const EngineSample& sample, const HeatInputModel& model) {
    const StateMoments m = moments(sample, model);
    if (m.alpha_mean <= 0.0) {
        return m.t_gas;
    }
    // corr * (cov * mu) * sigma_T / mu
    return m.t_gas + model.correlation_alpha_t * m.alpha_cov * m.t_gas_std;
}

CycleSampler::CycleSampler(const HeatInputModel& model, std::uint64_t seed) : model_(&model), rng_(seed) {}

CycleDraw CycleSampler::draw(const EngineSample& sample) {
    const StateMoments m = moments(sample, *model_);
    const double z1 = normal_(rng_);
    const double z2 = normal_(rng_);

    // Lognormal alpha with mean mu and coefficient of variation cov.
    const double s = std::sqrt(std::log1p(m.alpha_cov * m.alpha_cov));
    const double alpha = m.alpha_mean * std::exp(s * z1 - 0.5 * s * s);

    // Corr(alpha, T) = r * s / cov for T driven by r z1 + sqrt(1 - r^2) z2.
    double r = s > 0.0 ? model_->correlation_alpha_t * m.alpha_cov / s : 0.0;
    r = std::clamp(r, -1.0, 1.0);
    const double t_gas = m.t_gas + m.t_gas_std * (r * z1 + std::sqrt(1.0 - r * r) * z2);
    return {alpha, t_gas};
}

}  // namespace thermoflow
