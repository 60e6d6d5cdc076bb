#include "scarforge/experiment.hpp"

#include "pipeline_registry.hpp"
#include "scarforge/errors.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#ifndef SCARFORGE_VERSION
#define SCARFORGE_VERSION "0.0.0"
#endif

namespace scarforge::experiment {

namespace {

using detail::ParamKind;

ParamValue parse_param(const YAML::Node& node, const std::string& path) {
    ParamValue v;
    if (node.IsScalar()) {
        v.text = node.Scalar();
        double d = 0.0;
        bool b = false;
        if (YAML::convert<double>::decode(node, d)) {
            v.numbers = {d};
        } else if (YAML::convert<bool>::decode(node, b)) {
            v.numbers = {b ? 1.0 : 0.0};
        } else {
            v.is_text = true;
        }
        return v;
    }
    if (node.IsSequence()) {
        if (node.size() == 0) throw ConfigError(path + ": empty list");
        v.is_list = true;
        for (std::size_t i = 0; i < node.size(); ++i) {
            double d = 0.0;
            if (!node[i].IsScalar() || !YAML::convert<double>::decode(node[i], d))
                throw ConfigError(fmt::format("{}[{}]: expected a number", path, i));
            v.numbers.push_back(d);
        }
        return v;
    }
    throw ConfigError(path + ": expected a scalar or a list of numbers");
}

bool is_integral(double d) { return std::isfinite(d) && std::floor(d) == d; }

void check_kind(const ParamValue& v, ParamKind kind, const std::string& path) {
    switch (kind) {
        case ParamKind::Number:
            if (v.is_text || v.is_list || v.numbers.size() != 1) throw ConfigError(path + ": expected a number");
            if (!std::isfinite(v.numbers[0])) throw ConfigError(path + ": must be finite");
            break;
        case ParamKind::NumberList:
            if (v.is_text) throw ConfigError(path + ": expected a list of numbers");
            for (std::size_t i = 0; i < v.numbers.size(); ++i)
                if (!std::isfinite(v.numbers[i]))
                    throw ConfigError(fmt::format("{}[{}]: must be finite", path, i));
            break;
        case ParamKind::Integer:
            if (v.is_text || v.numbers.size() != 1 || !is_integral(v.numbers[0]))
                throw ConfigError(path + ": expected an integer");
            break;
        case ParamKind::IntegerList:
            if (v.is_text) throw ConfigError(path + ": expected a list of integers");
            for (std::size_t i = 0; i < v.numbers.size(); ++i)
                if (!is_integral(v.numbers[i]))
                    throw ConfigError(fmt::format("{}[{}]: expected an integer", path, i));
            break;
        case ParamKind::Text:
            if (v.numbers.size() > 1 || v.text.empty()) throw ConfigError(path + ": expected a string");
            break;
        case ParamKind::Flag:
            if (v.numbers.size() != 1 || (v.numbers[0] != 0.0 && v.numbers[0] != 1.0))
                throw ConfigError(path + ": expected true or false");
            break;
    }
}

std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& x) -> std::string {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, double>) return format_number(x);
            else if constexpr (std::is_same_v<X, std::int64_t>) return std::to_string(x);
            else if constexpr (std::is_same_v<X, bool>) return x ? "true" : "false";
            else return x;
        },
        c);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("<root>: YAML parse error at line {}: {}", e.mark.line + 1,
                                      e.msg));
    }
    if (!root.IsMap()) throw ConfigError("<root>: expected a mapping");

    ExperimentConfig cfg;
    for (const auto& kv : root) {
        const std::string key = kv.first.as<std::string>();
        const YAML::Node& val = kv.second;
        if (key == "pipeline") {
            if (!val.IsScalar()) throw ConfigError("pipeline: expected a string");
            cfg.pipeline = val.Scalar();
        } else if (key == "workers") {
            int w = 0;
            if (!val.IsScalar() || !YAML::convert<int>::decode(val, w) || w < 0)
                throw ConfigError("workers: expected a non-negative integer");
            cfg.workers = w;
        } else if (key == "params") {
            if (!val.IsMap()) throw ConfigError("params: expected a mapping");
            for (const auto& p : val) {
                const std::string name = p.first.as<std::string>();
                cfg.params[name] = parse_param(p.second, "params." + name);
            }
        } else if (key == "checks") {
            if (!val.IsMap()) throw ConfigError("checks: expected a mapping");
            for (const auto& c : val) {
                const std::string family = c.first.as<std::string>();
                const std::string path = "checks." + family;
                CheckOverride ov;
                bool b = false;
                if (c.second.IsScalar() && YAML::convert<bool>::decode(c.second, b)) {
                    ov.enabled = b;
                } else if (c.second.IsMap()) {
                    for (const auto& f : c.second) {
                        const std::string field = f.first.as<std::string>();
                        if (field == "enabled") {
                            if (!YAML::convert<bool>::decode(f.second, b))
                                throw ConfigError(path + ".enabled: expected true or false");
                            ov.enabled = b;
                        } else if (field == "tol") {
                            double d = 0.0;
                            if (!YAML::convert<double>::decode(f.second, d) || !(d >= 0.0))
                                throw ConfigError(path + ".tol: expected a non-negative number");
                            ov.tol = d;
                        } else {
                            throw ConfigError(path + "." + field + ": unknown field");
                        }
                    }
                } else {
                    throw ConfigError(path + ": expected true, false or a mapping");
                }
                cfg.checks[family] = ov;
            }
        } else {
            throw ConfigError(key + ": unknown field");
        }
    }
    if (cfg.pipeline.empty()) throw ConfigError("pipeline: missing");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void resolve_config(ExperimentConfig& config) {
    const detail::PipelineDef* def = nullptr;
    try {
        def = &detail::find_pipeline(config.pipeline);
    } catch (const DomainError&) {
        throw ConfigError("pipeline: unknown pipeline '" + config.pipeline + "'");
    }
    std::set<std::string> known;
    for (const auto& spec : def->params) {
        known.insert(spec.name);
        auto it = config.params.find(spec.name);
        if (it == config.params.end()) {
            config.params[spec.name] = spec.fallback;
        } else {
            check_kind(it->second, spec.kind, "params." + spec.name);
        }
    }
    for (const auto& [name, value] : config.params)
        if (!known.count(name)) throw ConfigError("params." + name + ": unknown parameter");
}

std::vector<std::string> pipeline_names() {
    std::vector<std::string> out;
    for (const auto& d : detail::registry()) out.push_back(d.name);
    return out;
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void Table::sort_rows() {
    const int k = std::min<int>(key_columns, static_cast<int>(columns.size()));
    std::stable_sort(rows.begin(), rows.end(), [k](const auto& a, const auto& b) {
        for (int i = 0; i < k; ++i) {
            if (a[i] < b[i]) return true;
            if (b[i] < a[i]) return false;
        }
        return false;
    });
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += csv_field(columns[i]);
    }
    out += "\r\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cell_text(row[i]));
        }
        out += "\r\n";
    }
    return out;
}

void Check::evaluate() {
    if (!std::isfinite(value)) {
        pass = false;
        return;
    }
    if (relation == "le") pass = value <= expected + tol;
    else if (relation == "ge") pass = value >= expected - tol;
    else pass = std::abs(value - expected) <= tol;
}

void parallel_for(int count, int workers, const std::function<void(int)>& task,
                  std::vector<std::string>* errors) {
    if (count <= 0) return;
    if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::vector<std::pair<int, std::string>> failed;
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                failed.emplace_back(i, e.what());
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }
    std::sort(failed.begin(), failed.end());
    if (errors)
        for (auto& [i, msg] : failed) errors->push_back(fmt::format("task {}: {}", i, msg));
    else if (!failed.empty())
        throw Error(failed.front().second);
}

PipelineResult run_pipeline(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    resolve_config(cfg);
    PipelineResult result = detail::find_pipeline(cfg.pipeline).run(cfg);
    for (auto& t : result.tables) t.sort_rows();
    for (auto& c : result.checks) {
        auto it = cfg.checks.find(c.family);
        if (it != cfg.checks.end()) {
            if (it->second.enabled) c.enabled = *it->second.enabled;
            if (it->second.tol) c.tol = *it->second.tol;
        }
        c.evaluate();
    }
    Check errs;
    errs.family = "grid_errors";
    errs.name = "grid_errors";
    errs.value = static_cast<double>(result.failures.size());
    errs.expected = 0.0;
    errs.relation = "le";
    errs.evaluate();
    result.checks.push_back(errs);
    return result;
}

RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    ExperimentConfig cfg = config;
    resolve_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    report.result = run_pipeline(cfg);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.all_pass = std::all_of(report.result.checks.begin(), report.result.checks.end(),
                                  [](const Check& c) { return !c.enabled || c.pass; });

    std::filesystem::create_directories(out_dir);
    for (const auto& t : report.result.tables) {
        std::ofstream f(out_dir / (t.name + ".csv"), std::ios::binary);
        f << t.to_csv();
    }
    report.manifest = out_dir / "manifest.json";
    std::ofstream m(report.manifest, std::ios::binary);
    m << manifest_json(cfg, report) << '\n';
    return report;
}

std::string manifest_json(const ExperimentConfig& config, const RunReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["pipeline"] = config.pipeline;
    ordered_json params = ordered_json::object();
    std::map<std::string, detail::ParamKind> kinds;
    for (const auto& spec : detail::find_pipeline(config.pipeline).params) kinds[spec.name] = spec.kind;
    for (const auto& [name, v] : config.params) {
        const auto kind = kinds.count(name) ? kinds.at(name) : detail::ParamKind::Number;
        if (v.is_text) {
            params[name] = v.text;
        } else if (kind == detail::ParamKind::Flag) {
            params[name] = v.numbers.at(0) != 0.0;
        } else if (kind == detail::ParamKind::Integer || kind == detail::ParamKind::IntegerList) {
            std::vector<std::int64_t> ints;
            for (double d : v.numbers) ints.push_back(static_cast<std::int64_t>(d));
            if (v.is_list) params[name] = ints;
            else params[name] = ints.at(0);
        } else if (v.is_list) {
            params[name] = v.numbers;
        } else {
            params[name] = v.numbers.at(0);
        }
    }
    j["params"] = params;
    ordered_json checks = ordered_json::array();
    for (const auto& c : report.result.checks) {
        ordered_json e;
        e["name"] = c.name;
        e["family"] = c.family;
        e["value"] = c.value;
        e["expected"] = c.expected;
        e["tol"] = c.tol;
        e["relation"] = c.relation;
        e["enabled"] = c.enabled;
        e["pass"] = c.pass;
        if (!c.note.empty()) e["note"] = c.note;
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["all_pass"] = report.all_pass;
    j["failures"] = report.result.failures;
    ordered_json tables = ordered_json::array();
    for (const auto& t : report.result.tables) tables.push_back(t.name + ".csv");
    j["tables"] = tables;
    j["workers"] = config.workers;
    j["wall_time_s"] = report.wall_time_s;
    j["version"] = SCARFORGE_VERSION;
    return j.dump(2);
}

}  // namespace scarforge::experiment
