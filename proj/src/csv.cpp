#include <cstdio>
#include <ostream>

#include "lra/experiment.hpp"

#ifndef LRA_VERSION
#define LRA_VERSION "unknown"
#endif

namespace lra {

const char* to_string(Quantity q) {
    switch (q) {
        case Quantity::analytic_throughput: return "analytic_throughput";
        case Quantity::simulated_throughput: return "simulated_throughput";
        case Quantity::bound_throughput: return "bound_throughput";
        case Quantity::analytic_outage: return "analytic_outage";
        case Quantity::simulated_outage: return "simulated_outage";
        case Quantity::capture_exact: return "capture_exact";
        case Quantity::capture_bound: return "capture_bound";
        case Quantity::power_mean: return "power_mean";
        case Quantity::baseline_irsa: return "baseline_irsa";
        case Quantity::baseline_aloha: return "baseline_aloha";
        case Quantity::optimal_rate: return "optimal_rate";
    }
    return "unknown";
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string version_string() { return LRA_VERSION; }

void CsvDataset::append(const CsvDataset& other) {
    comments.insert(comments.end(), other.comments.begin(), other.comments.end());
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

void CsvDataset::write(std::ostream& out) const {
    for (const auto& c : comments) out << "# " << c << '\n';
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.scenario << ',' << r.x_name << ',' << format_number(r.x_value) << ',';
        if (r.layer == 0)
            out << "total";
        else
            out << r.layer;
        out << ',' << to_string(r.quantity) << ',' << format_number(r.value) << ',';
        if (r.std_error) out << format_number(*r.std_error);
        out << ',';
        if (r.slots) out << *r.slots;
        out << ',';
        if (r.seed) out << *r.seed;
        out << '\n';
    }
}

}  // namespace lra
