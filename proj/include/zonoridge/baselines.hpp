// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zonoridge/dataset.hpp"
#include "zonoridge/inference.hpp"

namespace zonoridge {

/// Ridge weights on concrete data.
Eigen::VectorXd ridgeConcrete(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda);

enum class WorldStrategy { Corner, Grid };

/// One concrete world: an assignment of the data symbols and its data.
struct World {
    Assignment e; // indexed by SymbolId; non-data entries are 0
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

/// Enumerates corner (+-1) or grid assignments of every data symbol. The
/// first symbol varies fastest.
class WorldEnumerator {
  public:
    WorldEnumerator(const AbstractDataset& data, WorldStrategy strategy, int gridLevels = 3,
                    std::size_t budget = std::size_t{1} << 16);

    [[nodiscard]] std::size_t size() const noexcept { return count_; }
    [[nodiscard]] World world(std::size_t index) const;
    [[nodiscard]] std::vector<double> levels() const { return levels_; }

  private:
    const AbstractDataset* data_;
    std::vector<SymbolId> symbols_;
    std::vector<double> levels_;
    std::size_t count_ = 1;
};

/// Seeded uniform assignments.
std::vector<World> sampleWorlds(const AbstractDataset& data, std::size_t count, std::uint64_t seed);

struct OracleOptions {
    bool enumerate = true;
    WorldStrategy strategy = WorldStrategy::Corner;
    int gridLevels = 3;
    std::size_t budget = std::size_t{1} << 16;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    LossFormula lossFormula = LossFormula::Ridge;
    bool parallel = true;
};

/// Extremes over the trained worlds. Every value is an under-approximation
/// of the true range.
struct WorldOracleResult {
    std::vector<Eigen::VectorXd> weights;
    IntervalBox weightRange;
    std::vector<Interval> predExtremes; // per test point
    Interval lossExtremes;
};

WorldOracleResult oracleRanges(const AbstractDataset& data, double lambda, const Eigen::MatrixXd& testX,
                               const Eigen::VectorXd& testY, const OracleOptions& options = {});

/// Loss of concrete weights on test data.
double concreteLoss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double lambda,
                    LossFormula formula);

/// Interval-arithmetic ridge for label intervals only.
struct IntervalBaselineResult {
    std::vector<Interval> weights;
    std::vector<PredictionInterval> predictions;
};

IntervalBaselineResult intervalRidgeLabels(const Eigen::MatrixXd& X, const Eigen::VectorXd& ylo,
                                           const Eigen::VectorXd& yhi, double lambda, const Eigen::MatrixXd& testX);

/// Same, reading the label intervals from a dataset with certain features.
IntervalBaselineResult intervalRidgeLabels(const AbstractDataset& data, double lambda, const Eigen::MatrixXd& testX);

/// One row per test point with oracle and zonotope bounds.
std::string oracleCsv(const WorldOracleResult& oracle, const std::vector<PredictionInterval>& zonotope);

} // namespace zonoridge
