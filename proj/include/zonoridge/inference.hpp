// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "zonoridge/learning.hpp"
#include "zonoridge/zonotope.hpp"

namespace zonoridge {

enum class PredictionMethod { Zonotope, IntervalBaseline, OracleUnder };

const char* toString(PredictionMethod method);

struct PredictionInterval {
    double lo = 0.0;
    double hi = 0.0;
    PredictionMethod method = PredictionMethod::Zonotope;

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] Interval interval() const noexcept { return {lo, hi}; }
};

/// A point is robust when its full interval width is below `threshold`.
struct RobustnessReport {
    double threshold = 0.0;
    std::vector<PredictionInterval> intervals;
    std::vector<bool> robust;
    double ratio = 0.0;
};

enum class LossFormula { Ridge, Mse };

struct LossInterval {
    double lo = 0.0;
    double hi = 0.0;
    LossFormula formula = LossFormula::Ridge;
};

struct ParameterInterval {
    Interval range;
    bool inconclusiveSign = false; // range straddles zero
};

PredictionInterval predictInterval(const Eigen::VectorXd& x, const AbstractWeights& weights);
std::vector<PredictionInterval> predictIntervals(const Eigen::MatrixXd& X, const AbstractWeights& weights);

/// Prediction for a test point with its own error symbols in the weights'
/// registry. The product is linearized before taking the interval.
PredictionInterval predictIntervalUncertain(const ZVector& x, const AbstractWeights& weights);

/// Absolute width threshold from a fraction of the label range.
double thresholdFromFraction(double fraction, double labelRange);

RobustnessReport certifyRobustness(const Eigen::MatrixXd& testX, const AbstractWeights& weights, double threshold);
RobustnessReport robustnessOf(std::vector<PredictionInterval> intervals, double threshold);

/// Range of the test loss over the weight zonotope. The symbolic bound is
/// intersected with the interval-arithmetic bound and the lower end is
/// clamped at 0.
LossInterval lossInterval(const Eigen::MatrixXd& testX, const Eigen::VectorXd& testY, const AbstractWeights& weights,
                          double lambda, LossFormula formula);

/// Interval-arithmetic loss bound from per-point prediction intervals and
/// per-parameter intervals (the latter only for the ridge term).
LossInterval lossFromIntervals(const std::vector<PredictionInterval>& predictions, const Eigen::VectorXd& testY,
                               const std::vector<Interval>& parameters, double lambda, LossFormula formula);

std::vector<ParameterInterval> parameterIntervals(const AbstractWeights& weights);

std::string robustnessCsv(const RobustnessReport& report);
std::string robustnessJson(const RobustnessReport& report);
std::string parametersCsv(const std::vector<ParameterInterval>& params, const std::vector<std::string>& names);
std::string lossJson(const LossInterval& loss);

} // namespace zonoridge
