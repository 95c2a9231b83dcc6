// bvextend: experiment driver. Exit status 0 when every checked contract
// holds, 1 on a contract violation, 2 on a configuration error.
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "bvx/errors.hpp"
#include "bvx/experiment.hpp"

namespace {

using bvx::experiment::ExperimentConfig;

constexpr const char* kFields[] = {"seed",      "n",     "depth",   "skip",         "p",       "eps",
                                   "iterations", "threshold", "eta", "aperture", "aperture_alt", "backend",
                                   "input",     "k_min", "k_max",   "trials",       "density", "output"};

std::string flag_name(std::string field) {
    for (char& c : field)
        if (c == '_') c = '-';
    return "--" + field;
}

struct Subcommand {
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::string k;
    std::string config;
    bool iterate = false;
    bool quiet = false;
};

void add_common(Subcommand& s) {
    for (const char* field : kFields) {
        std::string flag = flag_name(field);
        if (std::string(field) == "skip") flag += ",--delta-skip";
        s.app->add_option(flag, s.values[field], std::string("config field ") + field);
    }
    s.app->add_option("--k", s.k, "lacunary generations k, or a range a..b for counterexample");
    s.app->add_option("--config", s.config, "key = value config file applied before the flags");
    s.app->add_flag("--quiet", s.quiet, "do not print the JSON summary");
}

ExperimentConfig build_config(const Subcommand& s) {
    ExperimentConfig cfg;
    if (!s.config.empty()) {
        std::ifstream in(s.config);
        if (!in) throw bvx::ConfigError("config: cannot open '" + s.config + "'");
        cfg = bvx::experiment::read_config(in, cfg);
    }
    for (const auto& [field, value] : s.values)
        if (s.app->count(flag_name(field)) > 0) bvx::experiment::set_field(cfg, field, value);
    if (s.app->count("--k") > 0) {
        const auto dots = s.k.find("..");
        if (dots == std::string::npos) {
            bvx::experiment::set_field(cfg, "k", s.k);
        } else {
            bvx::experiment::set_field(cfg, "k_min", s.k.substr(0, dots));
            bvx::experiment::set_field(cfg, "k_max", s.k.substr(dots + 2));
        }
    }
    if (s.iterate) cfg.iterate = true;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounded-variation extensions: experiments and property checks"};
    app.require_subcommand(1);
    std::map<std::string, Subcommand> subs;
    const std::pair<const char*, const char*> names[] = {
        {"extend", "approximate the dyadic average extension (--iterate: geometric-series extension)"},
        {"trace", "Whitney-average trace round trip"},
        {"square", "stopped square function sweeps"},
        {"counterexample", "lacunary table over k"},
        {"elliptic", "skip-grid construction for elliptic solutions"},
        {"functionals", "aperture and dyadic ratio diagnostics"},
        {"verify", "structural property suite"},
    };
    for (const auto& [sub, help] : names) {
        Subcommand& s = subs[sub];
        s.app = app.add_subcommand(sub, help);
        add_common(s);
        if (std::string(sub) == "extend") s.app->add_flag("--iterate", s.iterate, "iterate the single-step extension");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    for (auto& [sub, s] : subs) {
        if (!s.app->parsed()) continue;
        try {
            const ExperimentConfig cfg = build_config(s);
            const bvx::experiment::RunOutput out = bvx::experiment::run(sub, cfg);
            bvx::experiment::write_artifacts(out, sub, cfg);
            if (!s.quiet) std::cout << out.json << '\n';
            if (!out.contracts_ok) {
                std::cerr << sub << ": contract violated; see " << cfg.output << '\n';
                return 1;
            }
            return 0;
        } catch (const bvx::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const bvx::ContractViolation& e) {
            std::cerr << "contract violation: " << e.what() << '\n';
            return 1;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return 2;
}
