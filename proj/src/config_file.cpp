#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lra/experiment.hpp"

namespace lra {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + t + "'");
    }
    if (used != t.size() || !std::isfinite(v)) throw ConfigError("not a finite number: '" + t + "'");
    return v;
}

std::size_t parse_count(const std::string& text) {
    const double v = parse_double(text);
    if (v < 0.0 || v != std::floor(v)) throw ConfigError("expected a non-negative integer: '" + trim(text) + "'");
    return static_cast<std::size_t>(v);
}

std::vector<double> expand(const std::vector<double>& values, std::size_t num_layers, const char* what) {
    if (values.size() == 1) return std::vector<double>(num_layers, values.front());
    if (values.size() == num_layers) return values;
    throw ConfigError(std::string(what) + " needs 1 or " + std::to_string(num_layers) + " values, got " +
                      std::to_string(values.size()));
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_number(values[i]);
    }
    return out;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    if (text.find(':') == std::string::npos) return parse_list(text);
    std::stringstream ss(text);
    std::string part;
    std::vector<double> parts;
    while (std::getline(ss, part, ':')) parts.push_back(parse_double(part));
    if (parts.size() != 3) throw ConfigError("range must be start:stop:step");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0) || stop < start) throw ConfigError("range needs step > 0 and stop >= start");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) grid.push_back(start + step * static_cast<double>(i));
    return grid;
}

SystemConfig RunParameters::build() const {
    if (layers < 1) throw ConfigError("number of layers must be at least 1");
    const auto arrivals = expand(arrival_rate, layers, "arrival_rate");
    const auto rates = expand(rate, layers, "rate");
    auto config = make_config(channels, arrivals, rates, TargetSinr::from_db(gamma_db), repetition, gain_mean,
                              noise_power);
    if (powers) {
        const auto p = expand(*powers, layers, "powers");
        config = config.with_powers(p);
    }
    return config;
}

std::string RunParameters::describe() const {
    std::string out = "layers=" + std::to_string(layers) + " channels=" + std::to_string(channels) +
                      " arrival_rate=" + join(arrival_rate) + " rate=" + join(rate) +
                      " gamma_db=" + format_number(gamma_db) + " noise_power=" + format_number(noise_power) +
                      " gain_mean=" + format_number(gain_mean) + " repetition=" + std::to_string(repetition);
    if (powers) out += " powers=" + join(*powers);
    return out;
}

void read_config(std::istream& in, RunParameters& params) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "layers") params.layers = parse_count(value);
            else if (key == "channels") params.channels = parse_count(value);
            else if (key == "arrival_rate") params.arrival_rate = parse_list(value);
            else if (key == "rate") params.rate = parse_list(value);
            else if (key == "gamma_db") params.gamma_db = parse_double(value);
            else if (key == "noise_power") params.noise_power = parse_double(value);
            else if (key == "gain_mean") params.gain_mean = parse_double(value);
            else if (key == "repetition") params.repetition = parse_count(value);
            else if (key == "powers") params.powers = parse_list(value);
            else throw ConfigError("unknown key '" + key + "'");
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void load_config_file(const std::string& path, RunParameters& params) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    read_config(in, params);
}

}  // namespace lra
