#pragma once

// Combustion-side boundary condition surrogate.
//
// The per-cycle heat transfer coefficient alpha_c is a random variable
// conditioned on engine speed and firing state. Only two moments reach the
// plant: the mean <alpha_c> and the alpha-weighted gas temperature
//   T_mod = <alpha_c T_gas> / <alpha_c> = <T_gas> + corr * sigma_alpha * sigma_T / <alpha_c>.
// The conditional distribution of alpha_c is lognormal with mean mu(n) = a n^b
// and a fixed coefficient of variation; T_gas is normal and correlated with
// alpha_c through a Gaussian copula.

#include <cstdint>
#include <random>

namespace thermoflow {

struct PowerLaw {
    double coeff = 0.0;     ///< a
    double exponent = 0.8;  ///< b

    [[nodiscard]] double operator()(double n) const;
};

/// Engine state at time t; fired == false means coasting (fuel cut).
struct EngineSample {
    double t = 0.0;      ///< s
    double n = 0.0;      ///< rpm
    bool fired = false;
};

struct HeatInputModel {
    PowerLaw fired_alpha{1.8588, 0.8};     ///< mean HTC under full load, W/(m^2 K)
    double fired_alpha_cov = 0.15;
    PowerLaw coasting_alpha{0.65058, 0.8}; ///< mean HTC while coasting, W/(m^2 K)
    double coasting_alpha_cov = 0.10;
    double t_gas_fired = 900.0;            ///< K
    double t_gas_fired_std = 150.0;        ///< K
    double t_gas_coasting = 500.0;         ///< K
    double t_gas_coasting_std = 30.0;      ///< K
    double correlation_alpha_t = 0.3;      ///< Pearson correlation of alpha_c and T_gas
    double speed_min = 1000.0;             ///< rpm, lower end of the trusted range
    double speed_max = 9000.0;             ///< rpm, upper end of the trusted range

    /// Throws ConfigError on invalid moments, ranges, or if a fired sample does
    /// not deliver strictly more heat than a coasting one at equal speed for
    /// any wall temperature in [350, 550] K.
    void validate() const;

    [[nodiscard]] bool in_range(double n) const { return n >= speed_min && n <= speed_max; }
};

/// E[alpha_c | n, fired]. Speeds outside the trusted range are clamped to its ends.
[[nodiscard]] double mean_alpha_c(const EngineSample& sample, const HeatInputModel& model);

/// T_mod for the sample's state. Falls back to the state's mean gas temperature
/// when <alpha_c> = 0.
[[nodiscard]] double modified_gas_temperature(const EngineSample& sample, const HeatInputModel& model);

/// One engine cycle drawn from the joint surrogate.
struct CycleDraw {
    double alpha = 0.0;
    double t_gas = 0.0;
};

/// Draws per-cycle (alpha_c, T_gas) pairs whose moments match the closed forms above.
class CycleSampler {
public:
    CycleSampler(const HeatInputModel& model, std::uint64_t seed);

    [[nodiscard]] CycleDraw draw(const EngineSample& sample);

private:
    const HeatInputModel* model_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace thermoflow
