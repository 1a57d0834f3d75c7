// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>

#include "test_support.hpp"
#include "zonoridge/baselines.hpp"
#include "zonoridge/experiment.hpp"
#include "zonoridge/inference.hpp"
#include "zonoridge/learning.hpp"

using namespace zonoridge;
using namespace zonoridge::testing;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            detail << "first failure: " << what << "; ";
        }
        pass = pass && ok;
    }
};

/// Residual checks collected from suites 1-3 for criterion 4.
struct ResidualLog {
    std::size_t checked = 0;
    std::size_t bad = 0;
    double worstReal = 0.0;
    double worstData = 0.0;
    double worstBoxRatio = 0.0;

    void add(double real, double data, double box, double kNorm) {
        ++checked;
        worstReal = std::max(worstReal, real);
        worstData = std::max(worstData, data);
        worstBoxRatio = std::max(worstBoxRatio, box / (1.0 + kNorm));
        bad += (real < 1e-9 && data < 1e-9 && box < 1e-8 * (1.0 + kNorm)) ? 0 : 1;
    }
};

void report(int id, const std::string& name, const Verdict& v) {
    std::cout << "criterion " << id << " [" << name << "]: " << (v.pass ? "PASS" : "FAIL") << " - "
              << v.detail.str() << std::endl;
}

AbstractDataset inject(const Dataset& d, UncertaintyTarget target, std::size_t rows, double radius,
                       std::uint64_t seed) {
    UncertaintySpec spec;
    spec.target = target;
    if (target != UncertaintyTarget::Labels) {
        for (Eigen::Index c = 1; c < d.d(); ++c) {
            spec.columns.push_back(c);
        }
    }
    spec.percentage = static_cast<double>(rows) / static_cast<double>(d.n());
    spec.radius = radius;
    spec.seed = seed;
    return injectUncertainty(d, spec);
}

std::size_t cellsPerRow(UncertaintyTarget target, Eigen::Index features) {
    switch (target) {
    case UncertaintyTarget::Labels:
        return 1;
    case UncertaintyTarget::Features:
        return static_cast<std::size_t>(features);
    case UncertaintyTarget::Both:
        break;
    }
    return static_cast<std::size_t>(features) + 1;
}

/// Every assignment on `levels` per data symbol, first symbol fastest.
template <typename Fn>
void forEachWorld(const AbstractDataset& data, const std::vector<double>& levels, Fn&& fn) {
    const auto ids = data.dataSymbols();
    std::size_t total = 1;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        total *= levels.size();
    }
    for (std::size_t index = 0; index < total; ++index) {
        Assignment e = data.zeroAssignment();
        std::size_t rest = index;
        for (SymbolId id : ids) {
            e[id] = levels[rest % levels.size()];
            rest /= levels.size();
        }
        fn(e);
    }
}

/// Returns the number of failed memberships over uniform samples plus all corners.
std::size_t soundnessFailures(std::mt19937_64& rng, const AbstractDataset& data, const AbstractWeights& w,
                              double lambda, std::size_t samples, std::size_t& worlds) {
    std::size_t failures = 0;
    const auto check = [&](const Assignment& e) {
        const auto [X, y] = data.materialize(e);
        failures += containsWorldWeights(w, e, concreteRidge(X, y, lambda)) ? 0 : 1;
        ++worlds;
    };
    const auto ids = data.dataSymbols();
    for (std::size_t s = 0; s < samples; ++s) {
        check(dataAssignment(*data.registry, ids, [&] {
            std::vector<double> v(ids.size());
            for (auto& x : v) {
                x = uniform(rng);
            }
            return v;
        }()));
    }
    if (ids.size() <= 12) {
        forEachWorld(data, {-1.0, 1.0}, check);
    }
    return failures;
}

double number(const CsvWriter::Cell& cell) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        return static_cast<double>(*i);
    }
    if (const auto* d = std::get_if<double>(&cell)) {
        return *d;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::size_t column(const RunReport& r, const std::string& name) {
    return static_cast<std::size_t>(std::find(r.header.begin(), r.header.end(), name) - r.header.begin());
}

void logRowResiduals(const RunReport& r, ResidualLog& log) {
    for (const auto& row : r.rows) {
        if (number(row[column(r, "splits")]) == 1.0) {
            // Label-only boxes are empty, so the unscaled tolerance applies.
            log.add(number(row[column(r, "residual_real")]), number(row[column(r, "residual_data")]),
                    number(row[column(r, "residual_box")]), 0.0);
        }
    }
}

Verdict soundnessSuite(ResidualLog& log) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    constexpr int kProblems = 24;
    constexpr std::size_t kSamples = 500;
    std::size_t worlds = 0;
    std::size_t failures = 0;
    std::size_t split = 0;
    const UncertaintyTarget targets[] = {UncertaintyTarget::Labels, UncertaintyTarget::Features,
                                         UncertaintyTarget::Both};
    for (int t = 0; t < kProblems; ++t) {
        std::mt19937_64 rng(1000 + t);
        const Eigen::Index features = 1 + t % 3;
        const auto n = static_cast<Eigen::Index>(std::uniform_int_distribution<int>(12, 50)(rng));
        const UncertaintyTarget target = targets[(t / 3) % 3];
        const std::size_t maxRows = std::max<std::size_t>(1, 8 / cellsPerRow(target, features));
        const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, maxRows)(rng);
        const double radius = uniform(rng, 0.01, 0.1);
        const double lambda = uniform(rng, 0.02, 1.0);
        const AbstractDataset data = inject(randomDataset(rng, n, features), target, rows, radius, rng());
        v.require(data.provenance.size() <= 8, "more than 8 uncertain cells");

        RidgeConfig cfg;
        cfg.lambda = lambda;
        const auto [w, diag] = fixedPoint(data, cfg);
        if (diag.residual.applicable) {
            log.add(diag.residual.realResidual, diag.residual.dataResidual, diag.residual.boxResidual,
                    w.k.cwiseAbs().maxCoeff());
        } else {
            ++split;
        }
        const std::size_t f = soundnessFailures(rng, data, w, lambda, kSamples, worlds);
        v.require(f == 0, "problem " + std::to_string(t) + " has " + std::to_string(f) + " outside worlds");
        failures += f;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(seconds < 120.0, "runtime above 2 minutes");
    v.detail << kProblems << " problems, " << worlds << " worlds, " << failures << " failures, " << split
             << " split, " << seconds << " s";
    return v;
}

Verdict labelExactness(ResidualLog& log) {
    Verdict v;
    constexpr int kInstances = 12;
    double worst = 0.0;
    for (int t = 0; t < kInstances; ++t) {
        std::mt19937_64 rng(2000 + t);
        const Eigen::Index features = 1 + t % 3;
        const auto n = static_cast<Eigen::Index>(std::uniform_int_distribution<int>(15, 40)(rng));
        const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
        const double lambda = uniform(rng, 0.01, 1.0);
        const AbstractDataset data =
            inject(randomDataset(rng, n, features), UncertaintyTarget::Labels, rows, uniform(rng, 0.05, 0.3), rng());
        const Dataset test = randomDataset(rng, 10, features);

        RidgeConfig cfg;
        cfg.lambda = lambda;
        const auto [w, diag] = fixedPoint(data, cfg);
        log.add(diag.residual.realResidual, diag.residual.dataResidual, diag.residual.boxResidual, 0.0);
        v.require(w.k.isZero(0.0), "instance " + std::to_string(t) + " has k != 0");

        std::vector<Interval> oracle(static_cast<std::size_t>(test.X.rows()),
                                     {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
        forEachWorld(data, {-1.0, 1.0}, [&](const Assignment& e) {
            const auto [X, y] = data.materialize(e);
            const Eigen::VectorXd p = test.X * concreteRidge(X, y, lambda);
            for (Eigen::Index i = 0; i < p.size(); ++i) {
                auto& iv = oracle[static_cast<std::size_t>(i)];
                iv.lo = std::min(iv.lo, p[i]);
                iv.hi = std::max(iv.hi, p[i]);
            }
        });
        const auto preds = predictIntervals(test.X, w);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            const double scale = std::max({std::abs(oracle[i].lo), std::abs(oracle[i].hi), 1e-300});
            worst = std::max({worst, std::abs(preds[i].lo - oracle[i].lo) / scale,
                              std::abs(preds[i].hi - oracle[i].hi) / scale});
            v.require(relClose(preds[i].lo, oracle[i].lo, 1e-9) && relClose(preds[i].hi, oracle[i].hi, 1e-9),
                      "instance " + std::to_string(t) + " prediction " + std::to_string(i) + " differs");
        }
    }
    v.detail << kInstances << " instances, worst relative endpoint error " << worst;
    return v;
}

Verdict baselineDominance(ResidualLog& log) {
    Verdict v;
    ExperimentConfig c;
    c.target = UncertaintyTarget::Labels;
    c.syntheticRows = 60;
    c.radii = {0.02, 0.05, 0.1, 0.2, 0.3};
    c.percentages = {0.1, 0.3};
    c.seeds = {0, 1, 2, 3, 4};
    c.threshold = 0.05;
    std::size_t points = 0;
    std::size_t strict = 0;
    for (Eigen::Index features : {2, 3}) {
        c.syntheticFeatures = features;
        c.syntheticSeed = static_cast<std::uint64_t>(features);
        const RunReport r = cmdCertify(c);
        logRowResiduals(r, log);
        for (const auto& row : r.rows) {
            const double ratio = number(row[column(r, "ratio")]);
            const double baseline = number(row[column(r, "baseline_ratio")]);
            v.require(ratio >= baseline, "zonotope ratio below the baseline");
            strict += ratio > baseline ? 1 : 0;
            ++points;
        }
    }
    v.require(strict > 0, "no strict improvement");
    v.detail << points << " grid points x seeds, strict improvement at " << strict;

    if (const char* path = std::getenv("ZONORIDGE_MPG_CSV")) {
        ExperimentConfig m;
        m.dataPath = path;
        const char* label = std::getenv("ZONORIDGE_MPG_LABEL");
        m.label = label ? label : "mpg";
        m.target = UncertaintyTarget::Labels;
        m.percentage = 0.1;
        m.radius = 0.05;
        m.threshold = 0.05;
        m.seeds = {0, 1, 2, 3, 4};
        const RunReport r = cmdCertify(m);
        logRowResiduals(r, log);
        const double zono = number(r.summary[0][4]);
        const double base = number(r.summary[0][7]);
        v.require(zono == 1.0 && base <= 0.2, "MPG regime not reproduced");
        v.detail << "; MPG ratio " << zono << " vs baseline " << base;
    } else {
        v.detail << "; MPG part SKIP (ZONORIDGE_MPG_CSV not set)";
    }
    return v;
}

Verdict residuals(const ResidualLog& log) {
    Verdict v;
    v.require(log.checked > 0, "no unsplit fixed points recorded");
    v.require(log.bad == 0, std::to_string(log.bad) + " residuals above tolerance");
    v.detail << log.checked << " unsplit fixed points, worst real " << log.worstReal << ", data " << log.worstData
             << ", box/(1+|k|) " << log.worstBoxRatio;
    return v;
}

Verdict lossContainment() {
    Verdict v;
    const std::vector<double> radii{0.01, 0.02, 0.05, 0.1};
    constexpr int kInstances = 10;
    std::size_t monotone = 0;
    for (int t = 0; t < kInstances; ++t) {
        std::mt19937_64 rng(5000 + t);
        const Eigen::Index features = 1 + t % 2;
        const UncertaintyTarget target = t % 2 == 0 ? UncertaintyTarget::Labels : UncertaintyTarget::Both;
        const std::size_t rows = std::max<std::size_t>(1, 12 / cellsPerRow(target, features));
        const double lambda = uniform(rng, 0.05, 0.5);
        const Dataset base = randomDataset(rng, 30, features);
        const Dataset test = randomDataset(rng, 10, features);
        const std::uint64_t seed = rng();
        // A 3-level grid fits the budget for small symbol counts; corners otherwise.
        const std::vector<double> levels =
            rows * cellsPerRow(target, features) <= 7 ? std::vector<double>{-1.0, 0.0, 1.0}
                                                      : std::vector<double>{-1.0, 1.0};

        double previousGap = -std::numeric_limits<double>::infinity();
        bool isMonotone = true;
        for (double radius : radii) {
            const AbstractDataset data = inject(base, target, rows, radius, seed);
            v.require(data.provenance.size() <= 12, "more than 12 uncertain cells");
            RidgeConfig cfg;
            cfg.lambda = lambda;
            cfg.verifyResidual = false;
            const AbstractWeights w = fixedPoint(data, cfg).first;
            const LossInterval zono = lossInterval(test.X, test.y, w, lambda, LossFormula::Ridge);

            Interval gt{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
            forEachWorld(data, levels, [&](const Assignment& e) {
                const auto [X, y] = data.materialize(e);
                const Eigen::VectorXd ws = concreteRidge(X, y, lambda);
                const double loss = (test.X * ws - test.y).squaredNorm() / static_cast<double>(test.X.rows()) +
                                    lambda * ws.squaredNorm();
                gt.lo = std::min(gt.lo, loss);
                gt.hi = std::max(gt.hi, loss);
            });
            const double tol = 1e-9 * (1.0 + std::abs(gt.hi));
            v.require(zono.lo <= gt.lo + tol && zono.hi >= gt.hi - tol,
                      "instance " + std::to_string(t) + " radius " + formatNumber(radius) + " not contained");
            const double gap = (zono.hi - zono.lo) - gt.width();
            isMonotone = isMonotone && gap >= previousGap - 1e-12;
            previousGap = gap;
        }
        v.require(isMonotone, "instance " + std::to_string(t) + " gap decreases with radius");
        monotone += isMonotone ? 1 : 0;
    }
    v.detail << kInstances << " instances x " << radii.size() << " radii, monotone gap on " << monotone;
    return v;
}

Verdict splittingPath() {
    Verdict v;
    std::mt19937_64 rng(8);
    const Dataset d = randomDataset(rng, 10, 1);
    UncertaintySpec spec;
    spec.target = UncertaintyTarget::Features;
    spec.columns = {1};
    spec.percentage = 0.2;
    spec.radius = 1.0;
    spec.seed = rng();
    const AbstractDataset data = injectUncertainty(d, spec);

    RidgeConfig cfg;
    cfg.lambda = 0.01;
    const Eigen::VectorXd wR = ridgeClosedFormReal(data.XR, data.yR, cfg.lambda);
    const auto [A, Ainv] = buildTransform(data.XR, cfg);
    const NonDataSystem whole =
        buildNonDataSystem(data, cfg.lambda, wR, closedFormSymbolicData(data, cfg.lambda, wR), A, Ainv);
    v.require(whole.beta > cfg.lambda, "instance does not have beta > lambda");
    const std::size_t predicted = determineNumSplits(whole, cfg.lambda, data);

    const auto [w, diag] = fixedPoint(data, cfg);
    v.require(w.joined && diag.splitsUsed >= predicted, "splitting not triggered");
    double worstBeta = -std::numeric_limits<double>::infinity();
    for (const auto& part : splitDataset(data, diag.splitsUsed, cfg.splitBudget)) {
        const Eigen::VectorXd pwR = ridgeClosedFormReal(part.XR, part.yR, cfg.lambda);
        const auto [pA, pAinv] = buildTransform(part.XR, cfg);
        const NonDataSystem sys =
            buildNonDataSystem(part, cfg.lambda, pwR, closedFormSymbolicData(part, cfg.lambda, pwR), pA, pAinv);
        worstBeta = std::max(worstBeta, sys.beta);
    }
    v.require(worstBeta <= cfg.lambda + cfg.tolerance, "a part keeps beta > lambda");

    std::size_t worlds = 0;
    const std::size_t failures = soundnessFailures(rng, data, w, cfg.lambda, 500, worlds);
    v.require(failures == 0, std::to_string(failures) + " worlds outside the joined box");
    v.detail << "beta " << whole.beta << " > lambda " << cfg.lambda << ", m " << diag.splitsUsed << " (predicted "
             << predicted << "), " << diag.partsUsed << " parts, worst part beta " << worstBeta << ", " << worlds
             << " worlds, " << failures << " failures";
    return v;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism() {
    Verdict v;
    ExperimentConfig c;
    c.target = UncertaintyTarget::Both;
    c.syntheticFeatures = 3;
    c.radii = {0.01, 0.03};
    c.percentages = {0.05, 0.1};
    c.seeds = {0, 1, 2, 3, 4};
    const auto root = std::filesystem::temp_directory_path() / "zonoridge-acceptance";
    std::filesystem::remove_all(root);
    cmdCertify(c).save(root / "a", "csv");
    cmdCertify(c).save(root / "b", "csv");
    for (const char* name : {"certify.csv", "certify_summary.csv"}) {
        const std::string a = slurp(root / "a" / name);
        v.require(!a.empty() && a == slurp(root / "b" / name), std::string(name) + " differs");
    }
    v.detail << "two runs, " << c.seeds.size() * 4 << " rows, CSV files byte-identical";
    std::filesystem::remove_all(root);
    return v;
}

Verdict regularizationTrend() {
    Verdict v;
    ExperimentConfig c;
    c.target = UncertaintyTarget::Labels;
    c.syntheticRows = 60;
    c.syntheticFeatures = 3;
    c.percentage = 0.3;
    c.radius = 0.2;
    c.threshold = 0.05;
    c.lambdas = {0.0, 0.01, 0.1, 1.0, 10.0};
    c.seeds = {0};
    const RunReport r = cmdLambdaSweep(c);
    double previous = -1.0;
    for (const auto& row : r.rows) {
        const double ratio = number(row[column(r, "ratio")]);
        v.require(ratio >= previous, "ratio decreases at lambda " + formatNumber(number(row[column(r, "lambda")])));
        v.detail << "lambda " << formatNumber(number(row[column(r, "lambda")])) << ": " << ratio << "; ";
        previous = ratio;
    }
    return v;
}

} // namespace

int main() {
    bool all = true;
    ResidualLog log;
    const auto run = [&](int id, const std::string& name, auto&& fn) {
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& ex) {
            v.pass = false;
            v.detail << "exception: " << ex.what();
        }
        report(id, name, v);
        all = all && v.pass;
    };
    run(1, "soundness suite", [&] { return soundnessSuite(log); });
    run(2, "label-only exactness", [&] { return labelExactness(log); });
    run(3, "baseline dominance", [&] { return baselineDominance(log); });
    run(4, "fixed-point residual", [&] { return residuals(log); });
    run(5, "loss containment", lossContainment);
    run(6, "splitting path", splittingPath);
    run(7, "determinism", determinism);
    run(8, "regularization trend", regularizationTrend);
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
