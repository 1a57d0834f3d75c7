// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zonoridge/baselines.hpp"
#include "zonoridge/csv.hpp"
#include "zonoridge/dataset.hpp"
#include "zonoridge/inference.hpp"
#include "zonoridge/learning.hpp"

namespace zonoridge {

/// Invalid configuration or command-line values.
class ConfigError : public Error {
  public:
    using Error::Error;
};

struct ExperimentConfig {
    // [data]; an empty path selects the synthetic generator.
    std::filesystem::path dataPath;
    std::string label = "y";
    std::vector<std::string> features;
    double splitRatio = 0.8;
    bool dropMissing = true;
    Eigen::Index syntheticRows = 60;
    Eigen::Index syntheticFeatures = 2;
    double syntheticNoise = 0.5;
    std::uint64_t syntheticSeed = 1;

    // [uncertainty]
    UncertaintyTarget target = UncertaintyTarget::Labels;
    std::vector<std::string> uncertainColumns; // feature names; empty means all features
    double percentage = 0.1;
    double radius = 0.05;

    // [model]
    double lambda = 0.1;
    TransformKind transform = TransformKind::SvdOfCovariance;
    std::size_t splitBudget = std::size_t{1} << 16;

    // [report]
    double threshold = 0.05; // fraction of the label range
    LossFormula lossFormula = LossFormula::Ridge;
    std::filesystem::path outDir = "zonoridge-out";
    std::string format = "csv";

    // [sweep]; empty lists fall back to the single values above.
    std::vector<double> radii;
    std::vector<double> percentages;
    std::vector<double> lambdas;
    std::vector<std::uint64_t> seeds{0};

    // [oracle]
    std::size_t samples = 1000;
    WorldStrategy strategy = WorldStrategy::Corner;
    int gridLevels = 3;
    std::size_t oracleBudget = std::size_t{1} << 16;
    double kScale = 1.0; // values below 1 shrink the box to self-test the checker

    bool parallel = true;

    void validate() const;
    [[nodiscard]] std::vector<double> radiusGrid() const { return radii.empty() ? std::vector{radius} : radii; }
    [[nodiscard]] std::vector<double> percentageGrid() const {
        return percentages.empty() ? std::vector{percentage} : percentages;
    }
    [[nodiscard]] std::vector<double> lambdaGrid() const { return lambdas.empty() ? std::vector{lambda} : lambdas; }
};

/// Reads an INI-style file with sections [data], [uncertainty], [model],
/// [report], [sweep] and [oracle]. Unknown keys are rejected.
ExperimentConfig loadConfig(const std::filesystem::path& path);
ExperimentConfig parseConfig(const std::string& text);
/// Sets one value addressed as "section.key"; lists are comma separated.
void setConfigValue(ExperimentConfig& config, const std::string& key, const std::string& value);
std::string configText(const ExperimentConfig& config);

/// Linear data with bias: features uniform in [0, 10], labels from fixed
/// random weights plus uniform noise.
Dataset syntheticDataset(Eigen::Index rows, Eigen::Index features, double noise, std::uint64_t seed);

struct Statistics {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation
    double threeSigma = 0.0;
};

Statistics summarize(const std::vector<double>& values);

struct RunReport {
    std::string command;
    std::vector<std::string> header;
    std::vector<std::vector<CsvWriter::Cell>> rows;
    std::vector<std::string> summaryHeader;
    std::vector<std::vector<CsvWriter::Cell>> summary;
    std::vector<std::string> notes;
    std::string configEcho;
    std::size_t failures = 0; // soundness failures (oracle-check)

    [[nodiscard]] std::string rowsCsv() const;
    [[nodiscard]] std::string summaryCsv() const;
    [[nodiscard]] std::string json() const;
    /// Writes <command>.csv and <command>_summary.csv (or <command>.json).
    void save(const std::filesystem::path& dir, const std::string& format) const;
};

RunReport cmdCertify(const ExperimentConfig& config);
RunReport cmdLossRange(const ExperimentConfig& config);
RunReport cmdLambdaSweep(const ExperimentConfig& config);
RunReport cmdOracleCheck(const ExperimentConfig& config);
RunReport cmdParams(const ExperimentConfig& config);

} // namespace zonoridge
