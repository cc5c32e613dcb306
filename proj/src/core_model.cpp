#include "lra/core_model.hpp"

#include <cmath>
#include <string>

namespace lra {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

TargetSinr::TargetSinr(double linear) : linear_(linear) {
    require(std::isfinite(linear) && linear > 0.0, "target SINR must be positive and finite");
}

TargetSinr TargetSinr::from_db(double db) {
    require(std::isfinite(db), "target SINR in dB must be finite");
    return TargetSinr(db_to_linear(db));
}

double TargetSinr::db() const { return 10.0 * std::log10(linear_); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

SystemConfig::SystemConfig(std::size_t num_channels, std::vector<LayerParams> layers,
                           double gain_mean, double noise_power, std::size_t repetition)
    : num_channels_(num_channels),
      layers_(std::move(layers)),
      gain_mean_(gain_mean),
      noise_power_(noise_power),
      repetition_(repetition) {
    require(num_channels_ >= 1, "number of channels must be at least 1");
    require(!layers_.empty(), "number of layers must be at least 1");
    require(std::isfinite(gain_mean_) && gain_mean_ > 0.0, "channel gain mean must be positive and finite");
    require(std::isfinite(noise_power_) && noise_power_ > 0.0, "noise power must be positive and finite");
    require(repetition_ >= 1 && repetition_ <= num_channels_,
            "repetition must satisfy 1 <= B <= N (B=" + std::to_string(repetition_) +
                ", N=" + std::to_string(num_channels_) + ")");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& p = layers_[i];
        const std::string where = " (layer " + std::to_string(i + 1) + ")";
        require(std::isfinite(p.arrival_rate) && p.arrival_rate >= 0.0,
                "arrival rate must be finite and non-negative" + where);
        require(std::isfinite(p.power) && p.power > 0.0, "power must be positive and finite" + where);
        require(std::isfinite(p.rate) && p.rate >= 0.0, "rate must be finite and non-negative" + where);
    }
}

const LayerParams& SystemConfig::layer(std::size_t l) const {
    check_layer_index(l, layers_.size());
    return layers_[l - 1];
}

std::vector<double> SystemConfig::arrival_rates() const {
    std::vector<double> out;
    out.reserve(layers_.size());
    for (const auto& p : layers_) out.push_back(p.arrival_rate);
    return out;
}

std::vector<double> SystemConfig::powers() const {
    std::vector<double> out;
    out.reserve(layers_.size());
    for (const auto& p : layers_) out.push_back(p.power);
    return out;
}

std::vector<double> SystemConfig::rates() const {
    std::vector<double> out;
    out.reserve(layers_.size());
    for (const auto& p : layers_) out.push_back(p.rate);
    return out;
}

SystemConfig SystemConfig::with_rates(std::span<const double> rates) const {
    require(rates.size() == layers_.size(), "expected one rate per layer");
    auto layers = layers_;
    for (std::size_t i = 0; i < layers.size(); ++i) layers[i].rate = rates[i];
    return SystemConfig(num_channels_, std::move(layers), gain_mean_, noise_power_, repetition_);
}

SystemConfig SystemConfig::with_rate(std::size_t l, double rate) const {
    check_layer_index(l, layers_.size());
    auto layers = layers_;
    layers[l - 1].rate = rate;
    return SystemConfig(num_channels_, std::move(layers), gain_mean_, noise_power_, repetition_);
}

SystemConfig SystemConfig::with_uniform_rate(double rate) const {
    std::vector<double> rates(layers_.size(), rate);
    return with_rates(rates);
}

SystemConfig SystemConfig::with_powers(std::span<const double> powers) const {
    require(powers.size() == layers_.size(), "expected one power per layer");
    auto layers = layers_;
    for (std::size_t i = 0; i < layers.size(); ++i) layers[i].power = powers[i];
    return SystemConfig(num_channels_, std::move(layers), gain_mean_, noise_power_, repetition_);
}

SystemConfig SystemConfig::with_repetition(std::size_t repetition) const {
    return SystemConfig(num_channels_, layers_, gain_mean_, noise_power_, repetition);
}

SystemConfig SystemConfig::truncated(std::size_t num_layers) const {
    require(num_layers >= 1 && num_layers <= layers_.size(), "truncation must keep 1..L layers");
    std::vector<LayerParams> layers(layers_.begin(), layers_.begin() + static_cast<std::ptrdiff_t>(num_layers));
    return SystemConfig(num_channels_, std::move(layers), gain_mean_, noise_power_, repetition_);
}

void check_layer_index(std::size_t l, std::size_t num_layers) {
    if (l < 1 || l > num_layers)
        throw std::out_of_range("layer index " + std::to_string(l) + " outside 1.." +
                                std::to_string(num_layers));
}

double snr_gap(double rate) { return std::exp2(rate) - 1.0; }

double collision_prob(std::size_t m, std::size_t num_channels, std::size_t repetition) {
    require(m >= 1, "collision probability needs at least one user");
    require(num_channels >= 1, "number of channels must be at least 1");
    require(repetition >= 1 && repetition <= num_channels, "repetition must satisfy 1 <= B <= N");
    const double keep = 1.0 - 1.0 / static_cast<double>(num_channels);
    const double exponent = static_cast<double>(repetition) * static_cast<double>(m - 1);
    return 1.0 - std::pow(keep, exponent);
}

double interference_variance(std::size_t l, const SystemConfig& config, std::size_t repetition) {
    check_layer_index(l, config.num_layers());
    const double n = static_cast<double>(config.num_channels());
    const double b = static_cast<double>(repetition);
    double sum = 0.0;
    for (std::size_t i = l + 1; i <= config.num_layers(); ++i) {
        const auto& p = config.layer(i);
        sum += config.gain_mean() * p.power * p.arrival_rate * b / n;
    }
    return sum + config.noise_power();
}

std::vector<double> allocate_powers(TargetSinr gamma, std::size_t num_channels,
                                    std::span<const double> arrival_rates, double gain_mean,
                                    double noise_power) {
    require(num_channels >= 1, "number of channels must be at least 1");
    require(!arrival_rates.empty(), "number of layers must be at least 1");
    require(gain_mean > 0.0 && noise_power > 0.0, "gain mean and noise power must be positive");
    const double n = static_cast<double>(num_channels);
    const std::size_t num_layers = arrival_rates.size();
    std::vector<double> powers(num_layers, 0.0);
    double upper_interference = 0.0;  // sum over i > l of gain_mean * P_i * lambda_i / N
    for (std::size_t k = num_layers; k-- > 0;) {
        const double variance = upper_interference + noise_power;
        powers[k] = gamma.linear() * variance / gain_mean;
        upper_interference += gain_mean * powers[k] * arrival_rates[k] / n;
    }
    return powers;
}

SystemConfig make_config(std::size_t num_channels, std::span<const double> arrival_rates,
                         std::span<const double> rates, TargetSinr gamma, std::size_t repetition,
                         double gain_mean, double noise_power) {
    require(arrival_rates.size() == rates.size(), "arrival rates and rates must have one entry per layer");
    const auto powers = allocate_powers(gamma, num_channels, arrival_rates, gain_mean, noise_power);
    std::vector<LayerParams> layers(arrival_rates.size());
    for (std::size_t i = 0; i < layers.size(); ++i) layers[i] = {arrival_rates[i], powers[i], rates[i]};
    return SystemConfig(num_channels, std::move(layers), gain_mean, noise_power, repetition);
}

SystemConfig make_uniform_config(std::size_t num_layers, std::size_t num_channels, double arrival_rate,
                                 double rate, TargetSinr gamma, std::size_t repetition) {
    const std::vector<double> arrivals(num_layers, arrival_rate);
    const std::vector<double> rates(num_layers, rate);
    return make_config(num_channels, arrivals, rates, gamma, repetition);
}

}  // namespace lra
