// scarforge: run a named experiment pipeline and write CSV tables plus manifest.json.
//
//   scarforge width-scan --config configs/width_scan.yaml --out out/width
//   scarforge dyson-order --out out/dyson --order 2 --hbar 1e-2,1e-3,1e-4
//
// Exit codes: 0 all enabled checks pass, 1 a check failed or a grid point raised,
// 2 configuration error.

#include "scarforge/errors.hpp"
#include "scarforge/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace sx = scarforge::experiment;

namespace {

std::vector<double> parse_list(const std::string& s, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw scarforge::ConfigError(flag + ": cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) throw scarforge::ConfigError(flag + ": empty list");
    return out;
}

void override_param(sx::ExperimentConfig& cfg, const std::string& name, sx::ParamValue v) {
    cfg.params[name] = std::move(v);
}

sx::ParamValue scalar_value(double d) {
    sx::ParamValue v;
    v.numbers = {d};
    v.text = std::to_string(d);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scarforge experiment runner"};
    std::string pipeline, config_path, out_dir = "scarforge_out";
    std::string hbar, order;
    double epsilon = 0.0, epsilon_prime = 0.0, lambda = 0.0;
    int dim = 0, workers = -1;
    bool list = false;

    app.add_option("pipeline", pipeline, "pipeline name");
    app.add_option("--config", config_path, "YAML config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    auto* o_hbar = app.add_option("--hbar", hbar, "comma-separated hbar values");
    auto* o_eps = app.add_option("--epsilon", epsilon, "spectral window parameter epsilon");
    auto* o_epsp = app.add_option("--epsilon-prime", epsilon_prime, "Ehrenfest margin epsilon'");
    auto* o_lambda = app.add_option("--lambda", lambda, "expansion rate");
    auto* o_order = app.add_option("--order", order, "Dyson order (comma list allowed)");
    auto* o_dim = app.add_option("--dim", dim, "number-basis dimension");
    app.add_option("--workers", workers, "worker threads (0 = all cores)");
    app.add_flag("--list", list, "list pipelines and exit");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& n : sx::pipeline_names()) std::cout << n << '\n';
        return 0;
    }

    try {
        sx::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = sx::load_config(config_path);
            if (!pipeline.empty() && pipeline != cfg.pipeline)
                throw scarforge::ConfigError("pipeline: config names '" + cfg.pipeline +
                                             "' but the command line asks for '" + pipeline + "'");
        } else {
            if (pipeline.empty()) throw scarforge::ConfigError("pipeline: missing");
            cfg.pipeline = pipeline;
        }
        if (workers >= 0) cfg.workers = workers;
        if (*o_hbar) {
            sx::ParamValue v;
            v.numbers = parse_list(hbar, "--hbar");
            v.is_list = true;
            override_param(cfg, "hbar", v);
        }
        if (*o_order) {
            sx::ParamValue v;
            v.numbers = parse_list(order, "--order");
            v.is_list = true;
            override_param(cfg, "order", v);
        }
        if (*o_eps) override_param(cfg, "epsilon", scalar_value(epsilon));
        if (*o_lambda) override_param(cfg, "lambda", scalar_value(lambda));
        if (*o_dim) override_param(cfg, "dim", scalar_value(dim));
        if (*o_epsp) {
            // optimize-cutoff sweeps a list of epsilon'
            sx::ParamValue v = scalar_value(epsilon_prime);
            if (cfg.pipeline == "optimize-cutoff") v.is_list = true;
            override_param(cfg, "epsilon_prime", v);
        }
        sx::resolve_config(cfg);

        const sx::RunReport rep = sx::run_experiment(cfg, out_dir);
        for (const auto& c : rep.result.checks) {
            std::cout << (c.enabled ? (c.pass ? "PASS " : "FAIL ") : "SKIP ") << c.name
                      << "  value=" << sx::format_number(c.value)
                      << " expected=" << sx::format_number(c.expected) << " tol=" << c.tol
                      << " (" << c.relation << ")\n";
        }
        for (const auto& f : rep.result.failures) std::cerr << "error: " << f << '\n';
        std::cout << "wrote " << rep.manifest.string() << " in " << rep.wall_time_s << " s\n";
        return rep.all_pass ? 0 : 1;
    } catch (const scarforge::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
