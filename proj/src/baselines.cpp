// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "zonoridge/baselines.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/LU>

#include "parallel.hpp"
#include "zonoridge/csv.hpp"
#include "zonoridge/learning.hpp"

namespace zonoridge {

namespace {

World materializeWorld(const AbstractDataset& data, Assignment e) {
    World w;
    std::tie(w.X, w.y) = data.materialize(e);
    w.e = std::move(e);
    return w;
}

} // namespace

Eigen::VectorXd ridgeConcrete(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
    return ridgeClosedFormReal(X, y, lambda);
}

WorldEnumerator::WorldEnumerator(const AbstractDataset& data, WorldStrategy strategy, int gridLevels,
                                 std::size_t budget)
    : data_(&data), symbols_(data.dataSymbols()) {
    if (strategy == WorldStrategy::Corner) {
        levels_ = {-1.0, 1.0};
    } else {
        if (gridLevels < 2) {
            throw Error("grid enumeration needs at least 2 levels");
        }
        for (int l = 0; l < gridLevels; ++l) {
            levels_.push_back(-1.0 + 2.0 * l / (gridLevels - 1));
        }
    }
    for (std::size_t s = 0; s < symbols_.size(); ++s) {
        if (count_ > budget / levels_.size()) {
            throw BudgetExceeded(std::to_string(levels_.size()) + "^" + std::to_string(symbols_.size()) +
                                 " worlds exceed the budget of " + std::to_string(budget));
        }
        count_ *= levels_.size();
    }
}

World WorldEnumerator::world(std::size_t index) const {
    if (index >= count_) {
        throw Error("world index out of range");
    }
    Assignment e = data_->zeroAssignment();
    for (SymbolId id : symbols_) {
        e[id] = levels_[index % levels_.size()];
        index /= levels_.size();
    }
    return materializeWorld(*data_, std::move(e));
}

std::vector<World> sampleWorlds(const AbstractDataset& data, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const auto ids = data.dataSymbols();
    std::vector<World> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Assignment e = data.zeroAssignment();
        for (SymbolId id : ids) {
            e[id] = dist(rng);
        }
        out.push_back(materializeWorld(data, std::move(e)));
    }
    return out;
}

double concreteLoss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double lambda,
                    LossFormula formula) {
    const Eigen::VectorXd r = X * w - y;
    double loss = r.squaredNorm() / static_cast<double>(X.rows());
    if (formula == LossFormula::Ridge) {
        loss += lambda * w.squaredNorm();
    }
    return loss;
}

WorldOracleResult oracleRanges(const AbstractDataset& data, double lambda, const Eigen::MatrixXd& testX,
                               const Eigen::VectorXd& testY, const OracleOptions& options) {
    if (testX.rows() != testY.size() || testX.cols() != data.d()) {
        throw ShapeMismatch("oracleRanges: test data does not match the training data");
    }
    std::optional<WorldEnumerator> enumerator;
    if (options.enumerate) {
        enumerator.emplace(data, options.strategy, options.gridLevels, options.budget);
    }
    const std::vector<World> sampled = sampleWorlds(data, options.samples, options.seed);
    const std::size_t enumerated = enumerator ? enumerator->size() : 0;
    const std::size_t total = enumerated + sampled.size();
    if (total == 0) {
        throw Error("oracleRanges: no worlds to train");
    }

    std::vector<Eigen::VectorXd> weights(total);
    std::vector<double> losses(total);
    detail::parallelFor(total, options.parallel, [&](std::size_t i) {
        const World w = i < enumerated ? enumerator->world(i) : sampled[i - enumerated];
        weights[i] = ridgeConcrete(w.X, w.y, lambda);
        losses[i] = concreteLoss(testX, testY, weights[i], lambda, options.lossFormula);
    });

    WorldOracleResult out;
    const Eigen::Index d = data.d();
    out.weightRange.lo = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
    out.weightRange.hi = Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
    out.predExtremes.assign(static_cast<std::size_t>(testX.rows()),
                            {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    out.lossExtremes = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < total; ++i) {
        out.weightRange.lo = out.weightRange.lo.cwiseMin(weights[i]);
        out.weightRange.hi = out.weightRange.hi.cwiseMax(weights[i]);
        const Eigen::VectorXd pred = testX * weights[i];
        for (Eigen::Index p = 0; p < pred.size(); ++p) {
            auto& iv = out.predExtremes[static_cast<std::size_t>(p)];
            iv.lo = std::min(iv.lo, pred[p]);
            iv.hi = std::max(iv.hi, pred[p]);
        }
        out.lossExtremes.lo = std::min(out.lossExtremes.lo, losses[i]);
        out.lossExtremes.hi = std::max(out.lossExtremes.hi, losses[i]);
    }
    out.weights = std::move(weights);
    return out;
}

IntervalBaselineResult intervalRidgeLabels(const Eigen::MatrixXd& X, const Eigen::VectorXd& ylo,
                                           const Eigen::VectorXd& yhi, double lambda, const Eigen::MatrixXd& testX) {
    if (X.rows() != ylo.size() || ylo.size() != yhi.size() || testX.cols() != X.cols()) {
        throw ShapeMismatch("intervalRidgeLabels: shape mismatch");
    }
    const auto n = static_cast<double>(X.rows());
    const Eigen::MatrixXd gram = X.transpose() * X + lambda * n * Eigen::MatrixXd::Identity(X.cols(), X.cols());
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(gram);
    if (!(lu.rcond() > 1e-13)) {
        throw SingularMatrix("intervalRidgeLabels: X^T X + lambda n I is singular");
    }
    const Eigen::MatrixXd M = lu.solve(Eigen::MatrixXd(X.transpose()));

    // Scalar times interval, summed: midpoint-radius form is exact here.
    const Eigen::VectorXd ymid = (ylo + yhi) / 2.0;
    const Eigen::VectorXd yrad = (yhi - ylo) / 2.0;
    const Eigen::VectorXd wmid = M * ymid;
    const Eigen::VectorXd wrad = M.cwiseAbs() * yrad;

    IntervalBaselineResult out;
    for (Eigen::Index j = 0; j < wmid.size(); ++j) {
        out.weights.push_back({wmid[j] - wrad[j], wmid[j] + wrad[j]});
    }
    for (Eigen::Index i = 0; i < testX.rows(); ++i) {
        const double mid = testX.row(i).dot(wmid);
        const double rad = testX.row(i).cwiseAbs().dot(wrad);
        out.predictions.push_back({mid - rad, mid + rad, PredictionMethod::IntervalBaseline});
    }
    return out;
}

IntervalBaselineResult intervalRidgeLabels(const AbstractDataset& data, double lambda, const Eigen::MatrixXd& testX) {
    if (!data.featuresCertain()) {
        throw DataError("the interval baseline supports label uncertainty only");
    }
    Eigen::VectorXd lo(data.n());
    Eigen::VectorXd hi(data.n());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double r = data.yS[i].absCoefficientSum();
        lo[i] = data.yR[i] - r;
        hi[i] = data.yR[i] + r;
    }
    return intervalRidgeLabels(data.XR, lo, hi, lambda, testX);
}

std::string oracleCsv(const WorldOracleResult& oracle, const std::vector<PredictionInterval>& zonotope) {
    if (zonotope.size() != oracle.predExtremes.size()) {
        throw ShapeMismatch("oracleCsv: point counts differ");
    }
    CsvWriter csv({"index", "oracle_lo", "oracle_hi", "zonotope_lo", "zonotope_hi"});
    for (std::size_t i = 0; i < zonotope.size(); ++i) {
        csv.row({static_cast<std::int64_t>(i), oracle.predExtremes[i].lo, oracle.predExtremes[i].hi, zonotope[i].lo,
                 zonotope[i].hi});
    }
    return csv.str();
}

} // namespace zonoridge
