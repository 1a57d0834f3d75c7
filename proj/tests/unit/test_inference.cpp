// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "test_support.hpp"
#include "zonoridge/baselines.hpp"
#include "zonoridge/inference.hpp"

using namespace zonoridge;
using namespace zonoridge::testing;

namespace {

AbstractDataset uncertain(const Dataset& d, UncertaintyTarget target, double percentage, double radius,
                          std::uint64_t seed) {
    UncertaintySpec spec;
    spec.target = target;
    if (target != UncertaintyTarget::Labels) {
        for (Eigen::Index c = 1; c < d.d(); ++c) {
            spec.columns.push_back(c);
        }
    }
    spec.percentage = percentage;
    spec.radius = radius;
    spec.seed = seed;
    return injectUncertainty(d, spec);
}

AbstractWeights train(const AbstractDataset& data, double lambda) {
    RidgeConfig cfg;
    cfg.lambda = lambda;
    cfg.verifyResidual = false;
    return fixedPoint(data, cfg).first;
}

/// y = e with X = [1]: the weight is exactly e.
AbstractWeights unitToy() {
    AbstractDataset data = AbstractDataset::certain(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1));
    const SymbolId e = data.registry->newData();
    data.provenance.emplace_back(e, CellRef{0, kLabelColumn});
    data.yS[0] = PolyForm::symbol(*data.registry, e);
    return train(data, 0.0);
}

bool covers(const PredictionInterval& outer, const Interval& inner, double tol) {
    return outer.lo <= inner.lo + tol && inner.hi <= outer.hi + tol;
}

} // namespace

TEST_CASE("predictInterval") {
    std::mt19937_64 rng(21);
    const Dataset d = randomDataset(rng, 15, 2);
    const AbstractWeights certain = train(AbstractDataset::certain(d.X, d.y), 0.1);
    const Eigen::VectorXd x = d.X.row(0);
    const PredictionInterval p = predictInterval(x, certain);
    CHECK(p.lo == p.hi);
    CHECK(p.lo == doctest::Approx(x.dot(certain.wR)));
    CHECK_THROWS_AS(predictInterval(Eigen::VectorXd::Ones(2), certain), ShapeMismatch);

    const PredictionInterval toy = predictInterval(Eigen::VectorXd::Ones(1), unitToy());
    CHECK(toy.lo == doctest::Approx(-1.0));
    CHECK(toy.hi == doctest::Approx(1.0));

    // Label-only: the prediction is affine in e, so corners give the exact range.
    for (int t = 0; t < 5; ++t) {
        const Dataset train_ = randomDataset(rng, 20, 2);
        const Dataset test = randomDataset(rng, 10, 2);
        const AbstractDataset data = uncertain(train_, UncertaintyTarget::Labels, 0.4, 0.1, rng());
        const AbstractWeights w = train(data, 0.05);
        CHECK(w.k.isZero(0.0));
        const auto oracle = oracleRanges(data, 0.05, test.X, test.y);
        const auto preds = predictIntervals(test.X, w);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            CHECK(relClose(preds[i].lo, oracle.predExtremes[i].lo, 1e-9));
            CHECK(relClose(preds[i].hi, oracle.predExtremes[i].hi, 1e-9));
        }
    }
}

TEST_CASE("predictIntervalUncertain") {
    std::mt19937_64 rng(22);
    const Dataset d = randomDataset(rng, 15, 2);
    const AbstractWeights certain = train(AbstractDataset::certain(d.X, d.y), 0.1);
    const Eigen::VectorXd c = d.X.row(3);
    const ZVector degenerate = c.cast<PolyForm>();
    const PredictionInterval a = predictIntervalUncertain(degenerate, certain);
    const PredictionInterval b = predictInterval(c, certain);
    CHECK(a.lo == doctest::Approx(b.lo));
    CHECK(a.hi == doctest::Approx(b.hi));

    // x = c + g e over a certain model.
    const SymbolId e = certain.registry->newData();
    Eigen::VectorXd g(3);
    g << 0.0, 0.5, -0.25;
    ZVector xhat = degenerate;
    for (Eigen::Index j = 0; j < 3; ++j) {
        xhat[j] += PolyForm::symbol(*certain.registry, e, g[j]);
    }
    const PredictionInterval u = predictIntervalUncertain(xhat, certain);
    CHECK(u.lo == doctest::Approx(c.dot(certain.wR) - std::abs(g.dot(certain.wR))));
    CHECK(u.hi == doctest::Approx(c.dot(certain.wR) + std::abs(g.dot(certain.wR))));

    // Random uncertain model and test point: sampled products stay inside.
    const AbstractDataset data = uncertain(randomDataset(rng, 20, 2), UncertaintyTarget::Both, 0.2, 0.05, 3);
    const AbstractWeights w = train(data, 0.1);
    const SymbolId f = data.registry->newData();
    ZVector xr = degenerate;
    xr[1] += PolyForm::symbol(*data.registry, f, 0.3);
    xr[2] += PolyForm::symbol(*data.registry, f, -0.2);
    const PredictionInterval range = predictIntervalUncertain(xr, w);
    const auto ids = data.dataSymbols();
    for (int s = 0; s < 300; ++s) {
        Assignment ev = Assignment::Zero(static_cast<Eigen::Index>(data.registry->size()));
        for (SymbolId id : ids) {
            ev[id] = uniform(rng);
        }
        ev[f] = uniform(rng);
        const auto [X, y] = data.materialize(ev);
        const Eigen::VectorXd wStar = concreteRidge(X, y, 0.1);
        const double value = evaluate(xr, ev).col(0).dot(wStar);
        CHECK(value >= range.lo - 1e-9);
        CHECK(value <= range.hi + 1e-9);
    }
}

TEST_CASE("certifyRobustness") {
    std::mt19937_64 rng(23);
    const Dataset d = randomDataset(rng, 30, 2);
    const Dataset test = randomDataset(rng, 20, 2);
    const AbstractWeights certain = train(AbstractDataset::certain(d.X, d.y), 0.1);
    CHECK(certifyRobustness(test.X, certain, 1e-6).ratio == 1.0);
    CHECK_THROWS(certifyRobustness(test.X, certain, 0.0));
    CHECK_THROWS_AS(certifyRobustness(Eigen::MatrixXd(0, 3), certain, 1.0), DataError);
    CHECK(thresholdFromFraction(0.05, 40.0) == doctest::Approx(2.0));

    for (int t = 0; t < 10; ++t) {
        const AbstractDataset data = uncertain(randomDataset(rng, 30, 3), UncertaintyTarget::Labels, 0.3, 0.1, rng());
        const Dataset test3 = randomDataset(rng, 20, 3);
        const double threshold = uniform(rng, 0.1, 2.0);
        const auto zono = certifyRobustness(test3.X, train(data, 0.1), threshold);
        const auto base = robustnessOf(intervalRidgeLabels(data, 0.1, test3.X).predictions, threshold);
        CHECK(zono.ratio >= base.ratio);
    }

    // Width is the full width and the comparison is strict.
    std::vector<PredictionInterval> ivs{{0.0, 1.0}, {0.0, 0.5}};
    const auto r = robustnessOf(ivs, 1.0);
    CHECK(r.robust == std::vector<bool>{false, true});
    CHECK(r.ratio == 0.5);
    CHECK(robustnessCsv(r) == "index,lo,hi,width,robust\n0,0,1,1,0\n1,0,0.5,0.5,1\n");
}

TEST_CASE("robustness ratio trends with radius and percentage") {
    std::mt19937_64 rng(24);
    const Dataset d = randomDataset(rng, 40, 2);
    const Dataset test = randomDataset(rng, 30, 2);
    const double threshold = 0.05 * domainRanges(d).labelRange();
    double previous = 2.0;
    for (double radius : {0.0, 0.01, 0.02, 0.05, 0.1}) {
        const auto rep = certifyRobustness(test.X, train(uncertain(d, UncertaintyTarget::Both, 0.2, radius, 7), 0.1),
                                           threshold);
        CHECK(rep.ratio <= previous);
        previous = rep.ratio;
    }
    previous = 2.0;
    for (double pct : {0.0, 0.05, 0.1, 0.2, 0.4}) {
        const auto rep = certifyRobustness(test.X, train(uncertain(d, UncertaintyTarget::Labels, pct, 0.1, 7), 0.1),
                                           threshold);
        CHECK(rep.ratio <= previous);
        previous = rep.ratio;
    }
}

TEST_CASE("intervals are monotone in radius") {
    std::mt19937_64 rng(25);
    for (int t = 0; t < 5; ++t) {
        const Dataset d = randomDataset(rng, 25, 2);
        const Dataset test = randomDataset(rng, 10, 2);
        const std::uint64_t seed = rng();
        const AbstractWeights small = train(uncertain(d, UncertaintyTarget::Both, 0.2, 0.03, seed), 0.1);
        const AbstractWeights large = train(uncertain(d, UncertaintyTarget::Both, 0.2, 0.06, seed), 0.1);
        const auto ps = predictIntervals(test.X, small);
        const auto pl = predictIntervals(test.X, large);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            CHECK(covers(pl[i], ps[i].interval(), 1e-9));
        }
        const auto qs = parameterIntervals(small);
        const auto ql = parameterIntervals(large);
        for (std::size_t j = 0; j < qs.size(); ++j) {
            CHECK(ql[j].range.contains(qs[j].range, 1e-9));
        }
        const LossInterval ls = lossInterval(test.X, test.y, small, 0.1, LossFormula::Ridge);
        const LossInterval ll = lossInterval(test.X, test.y, large, 0.1, LossFormula::Ridge);
        CHECK(ll.lo <= ls.lo + 1e-9);
        CHECK(ll.hi >= ls.hi - 1e-9);
    }
}

TEST_CASE("lossInterval") {
    std::mt19937_64 rng(26);
    const Dataset d = randomDataset(rng, 20, 2);
    const Dataset test = randomDataset(rng, 10, 2);
    const AbstractWeights certain = train(AbstractDataset::certain(d.X, d.y), 0.1);
    const LossInterval point = lossInterval(test.X, test.y, certain, 0.1, LossFormula::Ridge);
    const double expected = concreteLoss(test.X, test.y, certain.wR, 0.1, LossFormula::Ridge);
    CHECK(point.lo == doctest::Approx(expected));
    CHECK(point.hi == doctest::Approx(expected));

    const LossInterval toy = lossInterval(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1), unitToy(), 0.0,
                                          LossFormula::Mse);
    CHECK(toy.lo == 0.0);
    CHECK(toy.hi == doctest::Approx(1.0));

    for (int t = 0; t < 10; ++t) {
        const Dataset tr = randomDataset(rng, 20, 2);
        const Dataset te = randomDataset(rng, 10, 2);
        const AbstractDataset data = uncertain(tr, t % 2 == 0 ? UncertaintyTarget::Labels : UncertaintyTarget::Both,
                                               0.2, 0.05, rng());
        const AbstractWeights w = train(data, 0.1);
        for (LossFormula formula : {LossFormula::Ridge, LossFormula::Mse}) {
            OracleOptions opts;
            opts.lossFormula = formula;
            opts.samples = 200;
            opts.seed = 1;
            const auto oracle = oracleRanges(data, 0.1, te.X, te.y, opts);
            const LossInterval loss = lossInterval(te.X, te.y, w, 0.1, formula);
            CHECK(loss.lo >= 0.0);
            CHECK(loss.lo <= oracle.lossExtremes.lo + 1e-9);
            CHECK(loss.hi >= oracle.lossExtremes.hi - 1e-9);

            std::vector<Interval> params;
            for (const auto& p : parameterIntervals(w)) {
                params.push_back(p.range);
            }
            const LossInterval ia = lossFromIntervals(predictIntervals(te.X, w), te.y, params, 0.1, formula);
            CHECK(loss.hi - loss.lo <= ia.hi - ia.lo + 1e-12);
        }
    }
    CHECK_THROWS_AS(lossInterval(test.X, test.y.head(3), certain, 0.1, LossFormula::Ridge), ShapeMismatch);
}

TEST_CASE("parameterIntervals") {
    std::mt19937_64 rng(27);
    const Dataset d = randomDataset(rng, 20, 2);
    const AbstractWeights certain = train(AbstractDataset::certain(d.X, d.y), 0.1);
    const auto params = parameterIntervals(certain);
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(params[static_cast<std::size_t>(j)].range.lo == doctest::Approx(certain.wR[j]));
        CHECK(params[static_cast<std::size_t>(j)].range.width() == doctest::Approx(0.0));
    }

    const auto toy = parameterIntervals(unitToy());
    CHECK(toy[0].inconclusiveSign);

    const AbstractDataset data = uncertain(d, UncertaintyTarget::Both, 0.2, 0.05, 5);
    const AbstractWeights w = train(data, 0.1);
    const auto box = parameterIntervals(w);
    for (const auto& world : sampleWorlds(data, 200, 3)) {
        const Eigen::VectorXd ws = concreteRidge(world.X, world.y, 0.1);
        for (Eigen::Index j = 0; j < 3; ++j) {
            CHECK(box[static_cast<std::size_t>(j)].range.contains(ws[j], 1e-9));
        }
    }
    const std::string csv = parametersCsv(box, d.columns);
    CHECK(csv.rfind("parameter,lo,hi,inconclusive_sign\nbias,", 0) == 0);
}
