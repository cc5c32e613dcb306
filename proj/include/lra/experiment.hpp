#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lra/analytic.hpp"
#include "lra/core_model.hpp"
#include "lra/montecarlo.hpp"
#include "lra/rate_optimizer.hpp"

namespace lra {

/// Unresolved run parameters as read from a config file or the command line.
/// Scalar lists expand to every layer; powers come from gamma_db unless
/// overridden.
struct RunParameters {
    std::size_t layers = 3;
    std::size_t channels = 10;
    std::vector<double> arrival_rate{10.0};
    std::vector<double> rate{1.0};
    double gamma_db = 3.0;
    double noise_power = 1.0;
    double gain_mean = 1.0;
    std::size_t repetition = 1;
    std::optional<std::vector<double>> powers;

    SystemConfig build() const;
    std::string describe() const;
};

/// Reads `key = value` lines into `params`. Blank lines and `#` comments are
/// skipped. Unknown keys and malformed values raise ConfigError.
void read_config(std::istream& in, RunParameters& params);
void load_config_file(const std::string& path, RunParameters& params);

/// Parses "1,2,3" or "start:stop:step" (inclusive stop).
std::vector<double> parse_grid(const std::string& text);
std::vector<double> parse_list(const std::string& text);

enum class Quantity {
    analytic_throughput,
    simulated_throughput,
    bound_throughput,
    analytic_outage,
    simulated_outage,
    capture_exact,
    capture_bound,
    power_mean,
    baseline_irsa,
    baseline_aloha,
    optimal_rate,
};

const char* to_string(Quantity q);

struct CsvRow {
    std::string scenario;
    std::string x_name;
    double x_value = 0.0;
    std::size_t layer = 0;  // 0 = total
    Quantity quantity = Quantity::analytic_throughput;
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<std::uint64_t> slots;
    std::optional<std::uint64_t> seed;
};

inline constexpr const char* kCsvHeader = "scenario,x_name,x_value,layer,quantity,value,stderr,slots,seed";

/// Floats are written with 9 significant digits.
std::string format_number(double v);

struct CsvDataset {
    std::vector<std::string> comments;  // written as `# ...` lines before the header
    std::vector<CsvRow> rows;

    void append(const CsvDataset& other);
    void write(std::ostream& out) const;
};

/// Version string embedded in CSV provenance.
std::string version_string();

struct Outputs {
    bool analytic = false;         // closed-form throughput and capture probabilities
    bool bound = false;            // throughput with the capture lower bound
    bool simulated = false;        // Monte Carlo throughput
    bool outage = false;           // analytic outage
    bool simulated_outage = false; // Monte Carlo outage
    bool power = false;            // mean transmit power
    bool arrival_bound = false;    // optimized-arrival lower bound on decoded packets
    bool baselines = false;        // ALOHA and IRSA reference lines
};

/// Variables a scenario can sweep.
enum class SweepVariable { arrival, gamma_db, rate, copies, layers, channels };

SweepVariable parse_sweep_variable(const std::string& name);
const char* to_string(SweepVariable v);

struct Scenario {
    std::string name;
    SweepVariable x = SweepVariable::arrival;
    std::vector<double> grid;
    RunParameters base;
    Outputs outputs;
    bool optimize_rates = false;
    CaptureModel capture = CaptureModel::exact;
    std::uint64_t slots = 20000;
    std::uint64_t seed = 1;
    std::vector<std::string> notes;

    void validate() const;
};

struct RunOptions {
    SearchSettings search;
    SimulationOptions simulation;
};

/// Applies grid value x of the sweep variable to the parameters.
RunParameters apply_sweep(const RunParameters& base, SweepVariable var, double x);

/// Runs every grid point and emits rows in grid order. Grid points are
/// evaluated concurrently.
CsvDataset run_scenario(const Scenario& scenario, const RunOptions& options = {});

struct ScenarioInfo {
    std::string name;
    std::string figure;
    std::string description;
};

const std::vector<ScenarioInfo>& scenario_catalog();

struct NamedScenarioOptions {
    std::uint64_t slots = 20000;
    std::uint64_t seed = 1;
    bool simulate = true;
};

/// Expands a catalog entry into its series (one Scenario per plotted curve).
/// Throws ConfigError for an unknown name.
std::vector<Scenario> named_scenario(const std::string& name, const NamedScenarioOptions& options = {});

/// Runs all series of a catalog scenario into one dataset with provenance.
CsvDataset run_named_scenario(const std::string& name, const NamedScenarioOptions& options,
                              const RunOptions& run = {});

/// Mean transmit power sum_l P_l / L with powers from the target SINR.
double mean_power(const SystemConfig& config);

}  // namespace lra
