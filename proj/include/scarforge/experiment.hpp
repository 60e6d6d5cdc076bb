#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace scarforge::experiment {

// Scalar parameters are stored as one-element lists.
struct ParamValue {
    std::vector<double> numbers;
    std::string text;
    bool is_text = false;
    bool is_list = false;

    double scalar() const { return numbers.at(0); }
};

struct CheckOverride {
    std::optional<bool> enabled;
    std::optional<double> tol;
};

struct ExperimentConfig {
    std::string pipeline;
    std::map<std::string, ParamValue> params;
    std::map<std::string, CheckOverride> checks;  // keyed by check family
    int workers = 0;                              // 0 picks hardware concurrency
};

// Throws ConfigError with the offending field path.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& yaml_text);
// Fills defaults and validates every parameter against the pipeline schema.
void resolve_config(ExperimentConfig& config);

std::vector<std::string> pipeline_names();

using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    // Leading columns that form the sort key.
    int key_columns = 1;

    void sort_rows();
    std::string to_csv() const;
};

struct Check {
    std::string family;
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tol = 0.0;
    // "le": value <= expected + tol, "ge": value >= expected - tol, "abs": |value - expected| <= tol
    std::string relation = "abs";
    bool enabled = true;
    bool pass = false;
    std::string note;

    void evaluate();
};

struct PipelineResult {
    std::vector<Table> tables;
    std::vector<Check> checks;
    std::vector<std::string> failures;  // grid points that raised
};

struct RunReport {
    PipelineResult result;
    double wall_time_s = 0.0;
    bool all_pass = false;
    std::filesystem::path manifest;
};

PipelineResult run_pipeline(const ExperimentConfig& config);

// Runs the pipeline, writes <table>.csv files and manifest.json into out_dir.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

std::string format_number(double v);
std::string manifest_json(const ExperimentConfig& config, const RunReport& report);

// Runs tasks 0..count-1 on a fixed pool; exceptions are collected per task.
void parallel_for(int count, int workers, const std::function<void(int)>& task,
                  std::vector<std::string>* errors = nullptr);

}  // namespace scarforge::experiment
