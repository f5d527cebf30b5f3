#pragma once

// Report persistence: tidy per-cell CSV, JSON summaries, and measure lookup
// for the analysis commands.

#include "intstab/harness.hpp"
#include "intstab/stats.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace intstab::report {

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// RFC-4180: quote when the field holds a comma, quote or line break.
std::string csv_field(const std::string& s);

std::vector<std::string> cells_csv_header();
void write_cells_csv(std::ostream& out, const std::vector<harness::StabilityReport>& reports);

nlohmann::json summary_json(const harness::Summary& s);
nlohmann::json to_json(const harness::PreprocSummary& p);
/// Aggregates only; per-cell values live in the CSV.
nlohmann::json to_json(const harness::StabilityReport& r);
nlohmann::json run_json(const std::vector<harness::StabilityReport>& reports);

harness::Summary summary_from_json(const nlohmann::json& j);
harness::PreprocSummary preproc_from_json(const nlohmann::json& j);
harness::StabilityReport report_from_json(const nlohmann::json& j);
/// Reads `report.json` from a run directory.
std::vector<harness::StabilityReport> load_run(const std::filesystem::path& run_dir);

/// Measures addressable from the command line: f1, f1_weighted, f1_train, overfit,
/// jaccard, pearson, kendall, used_features, feature_ratio, node_count,
/// depth, rule_count, conjunct_total, each optionally suffixed `_std`.
bool is_known_measure(const std::string& name);
bool higher_is_better(const std::string& name);
/// Mean (or std) of the measure; empty when the cell does not carry it.
std::optional<double> measure_value(const harness::PreprocSummary& p, const std::string& name);

/// Method label used by the rank tables: "<model>+<preproc>".
std::string method_id(const std::string& model, const std::string& preproc);

struct MeasureTable {
    std::vector<std::string> datasets;
    std::vector<std::string> methods;
    std::vector<std::vector<double>> values;  // datasets x methods
    std::vector<std::string> dropped;         // methods missing on some dataset
};

/// Datasets x methods, keeping only methods with a value on every dataset.
MeasureTable measure_table(const std::vector<harness::StabilityReport>& reports, const std::string& measure);

struct ScatterPoint {
    std::string dataset;
    std::string model;
    std::string preproc;
    double x = 0;
    double y = 0;
};

std::vector<ScatterPoint> scatter_points(const std::vector<harness::StabilityReport>& reports, const std::string& x,
                                         const std::string& y);

nlohmann::json ranks_json(const stats::RankTable& t, const stats::FriedmanResult& f, double alpha, double cd,
                          const std::vector<std::vector<std::size_t>>& groups);

}  // namespace intstab::report
