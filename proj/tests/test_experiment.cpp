#include "doctest.h"

#include "scarforge/errors.hpp"
#include "scarforge/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace scarforge;
using namespace scarforge::experiment;

namespace {

std::string config_error(const std::string& yaml) {
    try {
        auto cfg = parse_config(yaml);
        resolve_config(cfg);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("scarforge_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

const Table& table_named(const PipelineResult& r, const std::string& name) {
    for (const auto& t : r.tables)
        if (t.name == name) return t;
    throw std::runtime_error("missing table " + name);
}

}  // namespace

TEST_CASE("config errors name the offending field") {
    CHECK(config_error("pipeline: width-scan\nparams:\n  hbar: [1e-2, 1e-3, abc]\n")
              .find("params.hbar[2]: expected a number") != std::string::npos);
    CHECK(config_error("pipeline: width-scan\nparams:\n  lambda: [1, 2]\n").find("params.lambda") !=
          std::string::npos);
    CHECK(config_error("pipeline: width-scan\nparams:\n  colour: red\n")
              .find("params.colour: unknown parameter") != std::string::npos);
    CHECK(config_error("pipeline: width-scan\nbogus: 1\n").find("bogus: unknown field") !=
          std::string::npos);
    CHECK(config_error("pipeline: width-scan\nchecks:\n  width_law:\n    tol: -1\n")
              .find("checks.width_law.tol") != std::string::npos);
    CHECK(config_error("pipeline: nope\n").find("unknown pipeline") != std::string::npos);
    CHECK(config_error("params:\n  hbar: 0.1\n").find("pipeline: missing") != std::string::npos);
    CHECK(config_error("pipeline: [unclosed\n").find("YAML parse error") != std::string::npos);
    CHECK(config_error("pipeline: width-scan\nworkers: -3\n").find("workers") != std::string::npos);
    CHECK(config_error("pipeline: dyson-order\nparams:\n  order: [1.5]\n").find("params.order[0]") !=
          std::string::npos);
    CHECK(config_error("pipeline: width-scan\nparams:\n  hbar: [1e-2]\n").empty());
}

TEST_CASE("defaults fill the schema") {
    ExperimentConfig cfg;
    cfg.pipeline = "width-scan";
    resolve_config(cfg);
    CHECK(cfg.params.at("hbar").numbers.size() == 3);
    CHECK(cfg.params.at("cutoff").text == "optimized");
    CHECK(pipeline_names().size() == 6);
}

TEST_CASE("CSV writer") {
    Table t;
    t.name = "t";
    t.columns = {"a", "b,c"};
    t.rows = {{Cell{2.0}, Cell{std::string("say \"hi\"")}}, {Cell{0.1}, Cell{true}},
              {Cell{-3.0}, Cell{std::string("x\ny")}}};
    t.key_columns = 1;
    t.sort_rows();
    const std::string csv = t.to_csv();
    CHECK(csv == "a,\"b,c\"\r\n-3,\"x\ny\"\r\n0.10000000000000001,true\r\n2,\"say \"\"hi\"\"\"\r\n");
    CHECK(format_number(1.0 / 3.0) == "0.33333333333333331");
    CHECK(std::stod(format_number(0.1)) == 0.1);
}

TEST_CASE("check relations") {
    Check c;
    c.value = 1.05;
    c.expected = 1.0;
    c.tol = 0.1;
    c.relation = "abs";
    c.evaluate();
    CHECK(c.pass);
    c.relation = "le";
    c.tol = 0.0;
    c.evaluate();
    CHECK_FALSE(c.pass);
    c.relation = "ge";
    c.evaluate();
    CHECK(c.pass);
    c.value = std::nan("");
    c.evaluate();
    CHECK_FALSE(c.pass);
}

TEST_CASE("parallel_for collects failures in task order") {
    std::atomic<int> sum{0};
    std::vector<std::string> errors;
    parallel_for(
        20, 4,
        [&](int i) {
            if (i % 7 == 3) throw std::runtime_error("bad " + std::to_string(i));
            sum += i;
        },
        &errors);
    CHECK(sum == 190 - 3 - 10 - 17);
    REQUIRE(errors.size() == 3);
    CHECK(errors[0] == "task 3: bad 3");
    CHECK(errors[2] == "task 17: bad 17");
    CHECK_THROWS(parallel_for(2, 1, [](int) { throw std::runtime_error("x"); }));
}

TEST_CASE("optimize-cutoff run is deterministic across worker counts") {
    auto cfg = parse_config(
        "pipeline: optimize-cutoff\nparams:\n  epsilon_prime: [0.1, 0.3]\n  grid_size: 1025\n");
    cfg.workers = 1;
    const auto d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
    const auto r1 = run_experiment(cfg, d1);
    cfg.workers = 2;
    const auto r2 = run_experiment(cfg, d2);
    CHECK(r1.all_pass);
    const std::string a = slurp(d1 / "optimize_cutoff.csv"), b = slurp(d2 / "optimize_cutoff.csv");
    CHECK_FALSE(a.empty());
    CHECK(a == b);
    CHECK(a.rfind("epsilon_prime,shrink,mollifier_radius,rayleigh_quotient,target,norm_sq\r\n", 0) == 0);

    const std::string manifest = slurp(r1.manifest);
    for (const char* key : {"\"pipeline\"", "\"params\"", "\"checks\"", "\"all_pass\"", "\"failures\"",
                            "\"tables\"", "\"workers\"", "\"wall_time_s\"", "\"version\""})
        CHECK(manifest.find(key) != std::string::npos);
    CHECK(manifest.find("\"epsilon_prime\": [") != std::string::npos);
}

TEST_CASE("check overrides") {
    auto cfg = parse_config(
        "pipeline: optimize-cutoff\nparams:\n  epsilon_prime: [0.3]\n  grid_size: 1025\n"
        "checks:\n  arch_quotient:\n    tol: 0.0\n  cutoff_quotient: false\n");
    const auto r = run_pipeline(cfg);
    bool saw_disabled = false;
    for (const auto& c : r.checks) {
        if (c.family == "cutoff_quotient") {
            CHECK_FALSE(c.enabled);
            saw_disabled = true;
        }
        if (c.family == "arch_quotient") CHECK(c.tol == 0.0);
    }
    CHECK(saw_disabled);
}

TEST_CASE("width-scan columns") {
    auto cfg = parse_config("pipeline: width-scan\nparams:\n  hbar: [2e-2, 1e-2, 5e-3]\n");
    const auto r = run_pipeline(cfg);
    const auto& t = table_named(r, "width_scan");
    CHECK(t.columns == std::vector<std::string>{"hbar", "T", "norm_sq", "predicted_norm_sq", "width",
                                                "width_normalized", "pass"});
    CHECK(t.rows.size() == 3);
    CHECK(r.failures.empty());
}

TEST_CASE("scar-weight columns") {
    auto cfg = parse_config("pipeline: scar-weight\nparams:\n  hbar: [0.02]\n");
    const auto r = run_pipeline(cfg);
    const auto& t = table_named(r, "scar_weight");
    CHECK(t.columns.size() == 15);
    CHECK(t.columns.front() == "hbar");
    CHECK(t.rows.size() == 1);
    CHECK(r.failures.empty());
}
