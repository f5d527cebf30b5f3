#pragma once

// Run configuration and the command implementations behind the `intstab`
// executable. Commands return process exit codes.

#include "intstab/harness.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace intstab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCellFailures = 1;  // only with --strict
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

inline constexpr int kConfigVersion = 1;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DatasetEntry {
    std::string id;
    std::filesystem::path csv;
    std::filesystem::path schema;
};

struct RunConfig {
    int config_version = kConfigVersion;
    std::vector<DatasetEntry> datasets;
    std::vector<learners::ModelSpec> models;
    std::vector<harness::PreprocEntry> preprocs;
    std::size_t repetitions = 5;
    std::size_t folds = 10;
    std::uint64_t master_seed = 0;
    std::size_t jobs = 1;
    std::filesystem::path output_dir = "run";
    std::optional<std::vector<std::size_t>> sweep_m;  // explicit m grid
};

/// Relative paths are resolved against `base_dir`. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Checks that ids are unique and dataset files exist. Throws ConfigError.
void validate_config(const RunConfig& config);

learners::ModelSpec parse_model(const nlohmann::json& j);
harness::PreprocEntry parse_preproc(const nlohmann::json& j);

struct Overrides {
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
};

int cmd_run(const std::filesystem::path& config_path, const Overrides& overrides, bool strict, std::ostream& log);
int cmd_stats(const std::filesystem::path& run_dir, const std::string& measure, double alpha, bool iman_davenport,
              std::ostream& log);
int cmd_scatter(const std::filesystem::path& run_dir, const std::string& x, const std::string& y, std::ostream& log);
/// `m_grid`: "geometric" (2, 4, ... , n/2 per dataset) or a comma list.
int cmd_sweep(const std::filesystem::path& config_path, const std::string& m_grid, const Overrides& overrides,
              std::ostream& log);
/// Rewrites summary.csv (one row per experiment cell) from report.json.
int cmd_report(const std::filesystem::path& run_dir, std::ostream& log);

}  // namespace intstab::cli
