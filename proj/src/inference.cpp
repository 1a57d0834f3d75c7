// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "zonoridge/inference.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "zonoridge/csv.hpp"

namespace zonoridge {

namespace {

using Json = nlohmann::json;

Interval square(const Interval& r) {
    const double a = r.lo * r.lo;
    const double b = r.hi * r.hi;
    if (r.lo <= 0.0 && r.hi >= 0.0) {
        return {0.0, std::max(a, b)};
    }
    return {std::min(a, b), std::max(a, b)};
}

PolyForm dot(const Eigen::VectorXd& x, const ZVector& w) {
    PolyForm out(0.0);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x[j] != 0.0) {
            out += x[j] * w[j];
        }
    }
    return out;
}

Interval intervalAfterLinearize(const PolyForm& f, SymbolRegistry& registry) {
    return intervalOf(linearize(ZVector::Constant(1, f), registry)[0]);
}

} // namespace

const char* toString(PredictionMethod method) {
    switch (method) {
    case PredictionMethod::Zonotope:
        return "zonotope";
    case PredictionMethod::IntervalBaseline:
        return "interval";
    case PredictionMethod::OracleUnder:
        return "oracle";
    }
    return "unknown";
}

PredictionInterval predictInterval(const Eigen::VectorXd& x, const AbstractWeights& weights) {
    if (x.size() != weights.d()) {
        throw ShapeMismatch("predictInterval: test point has " + std::to_string(x.size()) + " entries, model has " +
                            std::to_string(weights.d()));
    }
    const Interval iv = intervalOf(dot(x, weights.zonotope()));
    return {iv.lo, iv.hi, PredictionMethod::Zonotope};
}

std::vector<PredictionInterval> predictIntervals(const Eigen::MatrixXd& X, const AbstractWeights& weights) {
    if (X.cols() != weights.d()) {
        throw ShapeMismatch("predictIntervals: feature count differs from model dimension");
    }
    const ZVector w = weights.zonotope();
    std::vector<PredictionInterval> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Interval iv = intervalOf(dot(X.row(i).transpose(), w));
        out.push_back({iv.lo, iv.hi, PredictionMethod::Zonotope});
    }
    return out;
}

PredictionInterval predictIntervalUncertain(const ZVector& x, const AbstractWeights& weights) {
    if (x.size() != weights.d()) {
        throw ShapeMismatch("predictIntervalUncertain: dimension mismatch");
    }
    const PolyForm y = x.dot(weights.zonotope());
    const Interval iv = intervalAfterLinearize(y, *weights.registry);
    return {iv.lo, iv.hi, PredictionMethod::Zonotope};
}

double thresholdFromFraction(double fraction, double labelRange) {
    if (!(fraction > 0.0)) {
        throw Error("robustness threshold must be positive");
    }
    return fraction * labelRange;
}

RobustnessReport robustnessOf(std::vector<PredictionInterval> intervals, double threshold) {
    if (!(threshold > 0.0)) {
        throw Error("robustness threshold must be positive");
    }
    if (intervals.empty()) {
        throw DataError("robustness needs at least one test point");
    }
    RobustnessReport report;
    report.threshold = threshold;
    std::size_t count = 0;
    for (const auto& iv : intervals) {
        const bool ok = iv.width() < threshold;
        report.robust.push_back(ok);
        count += ok ? 1 : 0;
    }
    report.ratio = static_cast<double>(count) / static_cast<double>(intervals.size());
    report.intervals = std::move(intervals);
    return report;
}

RobustnessReport certifyRobustness(const Eigen::MatrixXd& testX, const AbstractWeights& weights, double threshold) {
    if (testX.rows() == 0) {
        throw DataError("robustness needs at least one test point");
    }
    return robustnessOf(predictIntervals(testX, weights), threshold);
}

LossInterval lossFromIntervals(const std::vector<PredictionInterval>& predictions, const Eigen::VectorXd& testY,
                               const std::vector<Interval>& parameters, double lambda, LossFormula formula) {
    if (predictions.size() != static_cast<std::size_t>(testY.size()) || testY.size() == 0) {
        throw ShapeMismatch("lossFromIntervals: prediction count differs from label count");
    }
    const auto n = static_cast<double>(testY.size());
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double y = testY[static_cast<Eigen::Index>(i)];
        const Interval sq = square({predictions[i].lo - y, predictions[i].hi - y});
        lo += sq.lo;
        hi += sq.hi;
    }
    lo /= n;
    hi /= n;
    if (formula == LossFormula::Ridge) {
        for (const auto& p : parameters) {
            const Interval sq = square(p);
            lo += lambda * sq.lo;
            hi += lambda * sq.hi;
        }
    }
    return {lo, hi, formula};
}

LossInterval lossInterval(const Eigen::MatrixXd& testX, const Eigen::VectorXd& testY, const AbstractWeights& weights,
                          double lambda, LossFormula formula) {
    if (testX.rows() != testY.size() || testX.cols() != weights.d()) {
        throw ShapeMismatch("lossInterval: test data does not match the model");
    }
    if (testX.rows() == 0) {
        throw DataError("lossInterval needs at least one test point");
    }
    const ZVector w = weights.zonotope();
    const auto n = static_cast<double>(testX.rows());
    PolyForm loss(0.0);
    for (Eigen::Index i = 0; i < testX.rows(); ++i) {
        const PolyForm r = dot(testX.row(i).transpose(), w) - testY[i];
        loss += r * r;
    }
    loss = loss / n;
    if (formula == LossFormula::Ridge) {
        loss += lambda * w.dot(w);
    }
    const Interval symbolic = intervalAfterLinearize(loss, *weights.registry);

    std::vector<Interval> params;
    for (const auto& f : w) {
        params.push_back(intervalOf(f));
    }
    const LossInterval ia = lossFromIntervals(predictIntervals(testX, weights), testY, params, lambda, formula);

    // Both bounds are sound. The loss is a sum of squares with lambda >= 0.
    LossInterval out{std::max({symbolic.lo, ia.lo, 0.0}), std::min(symbolic.hi, ia.hi), formula};
    out.lo = std::min(out.lo, out.hi);
    return out;
}

std::vector<ParameterInterval> parameterIntervals(const AbstractWeights& weights) {
    std::vector<ParameterInterval> out;
    for (const auto& f : weights.zonotope()) {
        const Interval iv = intervalOf(f);
        out.push_back({iv, iv.lo < 0.0 && iv.hi > 0.0});
    }
    return out;
}

std::string robustnessCsv(const RobustnessReport& report) {
    CsvWriter csv({"index", "lo", "hi", "width", "robust"});
    for (std::size_t i = 0; i < report.intervals.size(); ++i) {
        const auto& iv = report.intervals[i];
        csv.row({static_cast<std::int64_t>(i), iv.lo, iv.hi, iv.width(), std::int64_t{report.robust[i] ? 1 : 0}});
    }
    return csv.str();
}

std::string robustnessJson(const RobustnessReport& report) {
    Json points = Json::array();
    for (std::size_t i = 0; i < report.intervals.size(); ++i) {
        const auto& iv = report.intervals[i];
        points.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"robust", static_cast<bool>(report.robust[i])}});
    }
    const char* method = report.intervals.empty() ? "zonotope" : toString(report.intervals.front().method);
    return Json{{"threshold", report.threshold}, {"ratio", report.ratio}, {"method", method}, {"points", points}}
        .dump(2);
}

std::string parametersCsv(const std::vector<ParameterInterval>& params, const std::vector<std::string>& names) {
    CsvWriter csv({"parameter", "lo", "hi", "inconclusive_sign"});
    for (std::size_t j = 0; j < params.size(); ++j) {
        const std::string name = j < names.size() ? names[j] : "w" + std::to_string(j);
        csv.row({name, params[j].range.lo, params[j].range.hi, std::int64_t{params[j].inconclusiveSign ? 1 : 0}});
    }
    return csv.str();
}

std::string lossJson(const LossInterval& loss) {
    return Json{{"lo", loss.lo}, {"hi", loss.hi}, {"formula", loss.formula == LossFormula::Ridge ? "ridge" : "mse"}}
        .dump(2);
}

} // namespace zonoridge
