// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zonoridge/experiment.hpp"

namespace {

using namespace zonoridge;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitUnsound = 3;

struct Overrides {
    std::string config;
    std::optional<std::string> seed;
    std::optional<std::string> radius;
    std::optional<std::string> percentage;
    std::optional<std::string> lambda;
    std::optional<std::string> threshold;
    std::optional<std::string> outDir;
    std::optional<std::string> format;
    std::vector<std::string> assignments; // "section.key=value"
};

// A single value replaces the scalar and clears its grid; a list sets the grid.
void applyGridFlag(ExperimentConfig& config, const std::optional<std::string>& value, const std::string& scalarKey,
                   const std::string& gridKey) {
    if (!value) {
        return;
    }
    if (value->find(',') == std::string::npos) {
        setConfigValue(config, scalarKey, *value);
        setConfigValue(config, gridKey, "");
    } else {
        setConfigValue(config, gridKey, *value);
    }
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig config = o.config.empty() ? ExperimentConfig{} : loadConfig(o.config);
    for (const auto& a : o.assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects section.key=value, got '" + a + "'");
        }
        setConfigValue(config, a.substr(0, eq), a.substr(eq + 1));
    }
    if (o.seed) {
        setConfigValue(config, "sweep.seeds", *o.seed);
    }
    applyGridFlag(config, o.radius, "uncertainty.radius", "sweep.radius");
    applyGridFlag(config, o.percentage, "uncertainty.percentage", "sweep.percentage");
    applyGridFlag(config, o.lambda, "model.lambda", "sweep.lambda");
    if (o.threshold) {
        setConfigValue(config, "report.threshold", *o.threshold);
    }
    if (o.outDir) {
        setConfigValue(config, "report.out_dir", *o.outDir);
    }
    if (o.format) {
        setConfigValue(config, "report.format", *o.format);
    }
    config.validate();
    return config;
}

int run(const std::function<RunReport(const ExperimentConfig&)>& command, const Overrides& overrides) {
    try {
        const ExperimentConfig config = resolve(overrides);
        const RunReport report = command(config);
        report.save(config.outDir, config.format);
        std::cout << report.summaryCsv();
        for (const auto& note : report.notes) {
            std::cerr << "note: " << note << '\n';
        }
        std::cerr << "wrote " << report.command << " results to " << config.outDir.string() << '\n';
        if (report.failures > 0) {
            std::cerr << "soundness failures: " << report.failures << '\n';
            return kExitUnsound;
        }
        return kExitOk;
    } catch (const ConfigError& ex) {
        std::cerr << "configuration error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitData;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sound ridge-regression bounds over uncertain datasets"};
    app.require_subcommand(1);
    Overrides overrides;

    const std::map<std::string, std::pair<std::string, std::function<RunReport(const ExperimentConfig&)>>> commands{
        {"certify", {"Robustness ratio of test predictions (and the interval baseline)", cmdCertify}},
        {"loss-range", {"Worst/best-case test loss against enumerated and sampled worlds", cmdLossRange}},
        {"lambda-sweep", {"Robustness and worst-case loss across regularization strengths", cmdLambdaSweep}},
        {"oracle-check", {"Check trained bounds against concrete ridge on sampled worlds", cmdOracleCheck}},
        {"params", {"Per-coefficient intervals and sign conclusiveness", cmdParams}},
    };
    std::function<RunReport(const ExperimentConfig&)> selected;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", overrides.config, "INI config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", overrides.seed, "Seed or comma-separated seed list");
        sub->add_option("--radius", overrides.radius, "Uncertainty radius (fraction of range) or list");
        sub->add_option("--percentage", overrides.percentage, "Fraction of uncertain rows or list");
        sub->add_option("--lambda", overrides.lambda, "Regularization coefficient or list");
        sub->add_option("--threshold", overrides.threshold, "Robustness threshold as a fraction of the label range");
        sub->add_option("--out-dir", overrides.outDir, "Report directory");
        sub->add_option("--format", overrides.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--set", overrides.assignments, "Override any config key, e.g. model.transform=identity");
        sub->callback([&selected, fn = entry.second] { selected = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex);
        return code == 0 ? kExitOk : kExitUsage;
    }
    return run(selected, overrides);
}
