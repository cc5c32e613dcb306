// Command-line driver: catalog scenarios, free-form sweeps, rate optimization,
// analytic outage and direct simulation. Every command writes the same CSV
// schema. Exit codes: 0 success, 2 invalid input, 1 runtime failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "lra/crrd_outage.hpp"
#include "lra/experiment.hpp"

namespace {

using namespace lra;

struct CommonFlags {
    std::string config_path;
    std::size_t layers = 0;
    std::size_t channels = 0;
    std::size_t copies = 0;
    std::string arrival;
    std::string rate;
    std::string powers;
    double gamma_db = 0.0;
    double noise_power = 0.0;
    double gain_mean = 0.0;
    std::uint64_t slots = 0;
    std::uint64_t seed = 1;
    std::string out = "-";
    int threads = 0;
    bool release_blocking = false;
    bool capture_bound = false;
    SearchSettings search;

    CLI::Option* layers_opt = nullptr;
    CLI::Option* channels_opt = nullptr;
    CLI::Option* copies_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* noise_opt = nullptr;
    CLI::Option* gain_opt = nullptr;
    CLI::Option* slots_opt = nullptr;
};

void add_common(CLI::App* app, CommonFlags& f, std::uint64_t default_slots) {
    f.slots = default_slots;
    app->add_option("--config", f.config_path, "key = value config file; flags override it");
    f.layers_opt = app->add_option("--layers", f.layers, "number of layers L");
    f.channels_opt = app->add_option("--channels", f.channels, "number of channels N");
    app->add_option("--arrival", f.arrival, "arrival rate per layer (scalar or comma list)");
    app->add_option("--rate", f.rate, "rate per layer in bits per channel use (scalar or comma list)");
    f.gamma_opt = app->add_option("--gamma-db", f.gamma_db, "target SINR in dB");
    f.copies_opt = app->add_option("--copies", f.copies, "copies per packet B");
    app->add_option("--powers", f.powers, "explicit per-layer powers (comma list), overrides gamma");
    f.noise_opt = app->add_option("--noise-power", f.noise_power, "noise power N_0");
    f.gain_opt = app->add_option("--gain-mean", f.gain_mean, "mean channel power gain");
    f.slots_opt = app->add_option("--slots", f.slots, "Monte Carlo slots (0 disables simulation)")
                      ->default_val(default_slots);
    app->add_option("--seed", f.seed, "simulation seed")->default_val(1);
    app->add_option("--out", f.out, "output path, - for standard output")->default_val("-");
    app->add_option("--threads", f.threads, "worker threads, 0 for the OpenMP default")->default_val(0);
    app->add_flag("--release-blocking", f.release_blocking,
                  "reopen a blocked channel once the offending copies are cancelled elsewhere");
    app->add_flag("--capture-bound", f.capture_bound, "use the capture lower bound in analytic outputs");
    app->add_option("--rate-max", f.search.rate_max, "upper end of the rate search")->default_val(16.0);
    app->add_option("--grid-points", f.search.grid_points, "coarse grid points for the rate search")
        ->default_val(2048);
    app->add_option("--refine-tol", f.search.refine_tol, "golden-section stopping width")->default_val(1e-9);
}

RunParameters resolve(const CommonFlags& f) {
    RunParameters p;
    if (!f.config_path.empty()) load_config_file(f.config_path, p);
    if (f.layers_opt->count()) p.layers = f.layers;
    if (f.channels_opt->count()) p.channels = f.channels;
    if (f.copies_opt->count()) p.repetition = f.copies;
    if (f.gamma_opt->count()) p.gamma_db = f.gamma_db;
    if (f.noise_opt->count()) p.noise_power = f.noise_power;
    if (f.gain_opt->count()) p.gain_mean = f.gain_mean;
    if (!f.arrival.empty()) p.arrival_rate = parse_list(f.arrival);
    if (!f.rate.empty()) p.rate = parse_list(f.rate);
    if (!f.powers.empty()) p.powers = parse_list(f.powers);
    return p;
}

RunOptions run_options(const CommonFlags& f) {
    RunOptions o;
    o.search = f.search;
    o.simulation.threads = f.threads;
    o.simulation.decode.blocking = f.release_blocking ? BlockingRule::release_on_cancel : BlockingRule::persistent;
    return o;
}

void emit(const CsvDataset& data, const std::string& path) {
    if (path == "-") {
        data.write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    data.write(out);
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void add_provenance(CsvDataset& data, const std::string& command, const RunParameters& p, const CommonFlags& f) {
    data.comments.insert(data.comments.begin(),
                         {"command: " + command, "version: " + version_string(), "config: " + p.describe(),
                          "slots: " + std::to_string(f.slots) + " seed: " + std::to_string(f.seed) + " blocking: " +
                              (f.release_blocking ? "release_on_cancel" : "persistent")});
}

CsvRow analytic_row(const std::string& name, std::size_t layer, Quantity q, double value) {
    return {name, "point", 0.0, layer, q, value, std::nullopt, std::nullopt, std::nullopt};
}

CsvRow simulated_row(const std::string& name, std::size_t layer, Quantity q, const EstimatorOutput& e) {
    return {name, "point", 0.0, layer, q, e.mean, e.std_error, e.slots, e.seed};
}

int run(int argc, char** argv) {
    CLI::App app{"Layered non-orthogonal random access: analysis, optimization and simulation"};
    app.require_subcommand(1);

    CommonFlags scenario_flags, sweep_flags, opt_flags, outage_flags, sim_flags;

    auto* scenario = app.add_subcommand("scenario", "run a named figure scenario");
    std::string scenario_name;
    bool list = false;
    bool no_sim = false;
    scenario->add_option("name", scenario_name, "scenario name");
    scenario->add_flag("--list", list, "list scenarios");
    scenario->add_flag("--no-sim", no_sim, "skip Monte Carlo outputs");
    add_common(scenario, scenario_flags, 20000);

    auto* sweep = app.add_subcommand("sweep", "sweep one parameter over a grid");
    std::string sweep_var = "arrival";
    std::string sweep_grid;
    std::string sweep_outputs = "analytic";
    bool sweep_optimize = false;
    sweep->add_option("--var", sweep_var, "arrival, gamma_db, rate, copies, layers or channels")->default_val("arrival");
    sweep->add_option("--grid", sweep_grid, "comma list or start:stop:step")->required();
    sweep->add_option("--outputs", sweep_outputs,
                      "comma list of analytic, bound, simulated, outage, simulated_outage, power, arrival_bound, baselines")
        ->default_val("analytic");
    sweep->add_flag("--optimize-rates", sweep_optimize, "optimize rates at each grid point");
    add_common(sweep, sweep_flags, 20000);

    auto* optimize = app.add_subcommand("optimize-rates", "throughput-maximizing per-layer rates");
    add_common(optimize, opt_flags, 0);

    auto* outage_cmd = app.add_subcommand("outage", "analytic outage per layer, optionally simulated");
    add_common(outage_cmd, outage_flags, 0);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo throughput and outage next to the analytic values");
    add_common(simulate, sim_flags, 100000);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (scenario->parsed()) {
        auto& f = scenario_flags;
        if (list) {
            for (const auto& info : scenario_catalog())
                std::cout << info.name << "\t" << info.figure << "\t" << info.description << '\n';
            return 0;
        }
        if (scenario_name.empty()) throw ConfigError("scenario name required (see `scenario --list`)");
        NamedScenarioOptions opts;
        opts.slots = f.slots;
        opts.seed = f.seed;
        opts.simulate = !no_sim && f.slots > 0;
        if (opts.slots == 0) opts.slots = 1;
        emit(run_named_scenario(scenario_name, opts, run_options(f)), f.out);
        return 0;
    }

    if (sweep->parsed()) {
        auto& f = sweep_flags;
        Scenario s;
        s.name = "sweep";
        s.x = parse_sweep_variable(sweep_var);
        s.grid = parse_grid(sweep_grid);
        s.base = resolve(f);
        s.optimize_rates = sweep_optimize;
        s.capture = f.capture_bound ? CaptureModel::lower_bound : CaptureModel::exact;
        s.slots = f.slots;
        s.seed = f.seed;
        for (const auto& item : [&] {
                 std::vector<std::string> items;
                 std::stringstream ss(sweep_outputs);
                 std::string item;
                 while (std::getline(ss, item, ',')) items.push_back(item);
                 return items;
             }()) {
            if (item == "analytic") s.outputs.analytic = true;
            else if (item == "bound") s.outputs.bound = true;
            else if (item == "simulated") s.outputs.simulated = true;
            else if (item == "outage") s.outputs.outage = true;
            else if (item == "simulated_outage") s.outputs.simulated_outage = true;
            else if (item == "power") s.outputs.power = true;
            else if (item == "arrival_bound") s.outputs.arrival_bound = true;
            else if (item == "baselines") s.outputs.baselines = true;
            else throw ConfigError("unknown output '" + item + "'");
        }
        auto data = run_scenario(s, run_options(f));
        add_provenance(data, "sweep", s.base, f);
        emit(data, f.out);
        return 0;
    }

    if (optimize->parsed()) {
        auto& f = opt_flags;
        const auto params = resolve(f);
        const auto config = params.build();
        const auto model = f.capture_bound ? CaptureModel::lower_bound : CaptureModel::exact;
        const auto plan = optimize_rates(config, f.search, model);
        const auto tuned = config.with_rates(plan.optimal_rates);
        const auto report = throughput(tuned, model);
        CsvDataset data;
        for (std::size_t l = 1; l <= tuned.num_layers(); ++l)
            data.rows.push_back(analytic_row("optimize-rates", l, Quantity::optimal_rate, plan.optimal_rates[l - 1]));
        for (std::size_t l = 1; l <= tuned.num_layers(); ++l)
            data.rows.push_back(analytic_row("optimize-rates", l, Quantity::analytic_throughput,
                                             report.layer_throughput[l - 1]));
        data.rows.push_back(analytic_row("optimize-rates", 0, Quantity::analytic_throughput, plan.achieved_throughput));
        if (f.slots > 0) {
            const auto est = estimate_throughput(tuned, f.slots, f.seed, run_options(f).simulation);
            for (std::size_t l = 1; l <= tuned.num_layers(); ++l)
                data.rows.push_back(
                    simulated_row("optimize-rates", l, Quantity::simulated_throughput, est.layers[l - 1]));
            data.rows.push_back(simulated_row("optimize-rates", 0, Quantity::simulated_throughput, est.total));
        }
        add_provenance(data, "optimize-rates", params, f);
        emit(data, f.out);
        return 0;
    }

    if (outage_cmd->parsed()) {
        auto& f = outage_flags;
        const auto params = resolve(f);
        const auto config = params.build();
        const auto report = outage(config);
        CsvDataset data;
        for (std::size_t l = 1; l <= config.num_layers(); ++l)
            data.rows.push_back(analytic_row("outage", l, Quantity::analytic_outage, report.outage[l - 1]));
        if (f.slots > 0) {
            const auto est = estimate_outage(config, f.slots, f.seed, run_options(f).simulation);
            for (std::size_t l = 1; l <= config.num_layers(); ++l)
                data.rows.push_back(simulated_row("outage", l, Quantity::simulated_outage, est.layers[l - 1]));
        }
        add_provenance(data, "outage", params, f);
        emit(data, f.out);
        return 0;
    }

    if (simulate->parsed()) {
        auto& f = sim_flags;
        const auto params = resolve(f);
        const auto config = params.build();
        if (f.slots < 1) throw ConfigError("simulate needs --slots >= 1");
        const auto sim = run_options(f).simulation;
        const auto report = throughput(config, f.capture_bound ? CaptureModel::lower_bound : CaptureModel::exact);
        const auto est = estimate_throughput(config, f.slots, f.seed, sim);
        const auto out_est = estimate_outage(config, f.slots, f.seed, sim);
        CsvDataset data;
        for (std::size_t l = 1; l <= config.num_layers(); ++l)
            data.rows.push_back(analytic_row("simulate", l, Quantity::analytic_throughput, report.layer_throughput[l - 1]));
        data.rows.push_back(analytic_row("simulate", 0, Quantity::analytic_throughput, report.total_throughput));
        for (std::size_t l = 1; l <= config.num_layers(); ++l)
            data.rows.push_back(simulated_row("simulate", l, Quantity::simulated_throughput, est.layers[l - 1]));
        data.rows.push_back(simulated_row("simulate", 0, Quantity::simulated_throughput, est.total));
        bool all_active = true;
        for (const auto& layer : config.layers()) all_active = all_active && layer.arrival_rate > 0.0;
        if (all_active) {
            const auto analytic_out = outage(config);
            for (std::size_t l = 1; l <= config.num_layers(); ++l)
                data.rows.push_back(analytic_row("simulate", l, Quantity::analytic_outage, analytic_out.outage[l - 1]));
        }
        for (std::size_t l = 1; l <= config.num_layers(); ++l)
            data.rows.push_back(simulated_row("simulate", l, Quantity::simulated_outage, out_est.layers[l - 1]));
        add_provenance(data, "simulate", params, f);
        emit(data, f.out);
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const lra::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
