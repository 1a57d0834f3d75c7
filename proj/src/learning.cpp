// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "zonoridge/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <json.hpp>

#include "parallel.hpp"

namespace zonoridge {

namespace {

using Json = nlohmann::json;

Eigen::MatrixXd solveRegularized(const Eigen::MatrixXd& XR, double lambda, const Eigen::MatrixXd& rhs) {
    const auto n = static_cast<double>(XR.rows());
    const Eigen::MatrixXd gram =
        XR.transpose() * XR + lambda * n * Eigen::MatrixXd::Identity(XR.cols(), XR.cols());
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(gram);
    if (!(lu.rcond() > 1e-13)) {
        throw SingularMatrix("X^T X + lambda n I is singular (lambda = " + std::to_string(lambda) + ")");
    }
    return lu.solve(rhs);
}

/// Solves (X^T X + lambda n I) w = r entrywise over the symbolic right side.
ZVector solveRegularized(const Eigen::MatrixXd& XR, double lambda, const ZVector& rhs) {
    const Eigen::MatrixXd inv = solveRegularized(XR, lambda, Eigen::MatrixXd(Eigen::MatrixXd::Identity(XR.cols(), XR.cols())));
    return apply(inv, rhs);
}

ZVector liftVector(const Eigen::VectorXd& v) { return v.cast<PolyForm>(); }

struct PartSolution {
    Eigen::VectorXd wR;
    ZVector wD;
    Eigen::MatrixXd A;
    Eigen::MatrixXd Ainv;
    NonDataSystem sys;
};

PartSolution solvePart(const AbstractDataset& data, const RidgeConfig& cfg) {
    PartSolution s;
    s.wR = ridgeClosedFormReal(data.XR, data.yR, cfg.lambda);
    s.wD = closedFormSymbolicData(data, cfg.lambda, s.wR);
    std::tie(s.A, s.Ainv) = buildTransform(data.XR, cfg);
    s.sys = buildNonDataSystem(data, cfg.lambda, s.wR, s.wD, s.A, s.Ainv);
    return s;
}

AbstractWeights assemble(const AbstractDataset& data, const PartSolution& s, Eigen::VectorXd k, double lambda) {
    AbstractWeights w;
    w.wR = s.wR;
    w.wD = s.wD;
    w.k = std::move(k);
    w.A = s.A;
    w.Ainv = s.Ainv;
    w.registry = data.registry;
    w.lambda = lambda;
    w.provenance = data.provenance;
    const SymbolId first = data.registry->newFreshRange(static_cast<std::size_t>(w.d()));
    for (Eigen::Index i = 0; i < w.d(); ++i) {
        w.freshIds.push_back(first + static_cast<SymbolId>(i));
    }
    return w;
}

Json matrixJson(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrixFromJson(const Json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(i, c) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>();
        }
    }
    return m;
}

Json vectorJson(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.begin(), v.end())); }

Eigen::VectorXd vectorFromJson(const Json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

void RidgeConfig::validate(Eigen::Index d) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error("lambda must be a finite non-negative number");
    }
    if (transform == TransformKind::Custom) {
        if (customTransform.rows() != d || customTransform.cols() != d) {
            throw ShapeMismatch("custom transform must be d x d");
        }
    }
    if (splitBudget == 0) {
        throw Error("split budget must be positive");
    }
}

ZVector AbstractWeights::zonotope() const {
    ZVector eps(d());
    for (Eigen::Index j = 0; j < d(); ++j) {
        eps[j] = PolyForm::symbol(*registry, freshIds[static_cast<std::size_t>(j)], k[j]);
    }
    return liftVector(wR) + wD + apply(Ainv, eps);
}

Eigen::MatrixXd NonDataSystem::coefficientMatrix(double lambda) const {
    const Eigen::Index d = Q.rows();
    Eigen::MatrixXd M(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            M(i, j) = i == j ? lambda * static_cast<double>(n) + Q(i, i) - Cprime(i, i)
                             : -(std::abs(Q(i, j)) + Cprime(i, j));
        }
    }
    return M;
}

Eigen::VectorXd NonDataSystem::rhs() const { return 0.5 * static_cast<double>(n) * c0; }

double NonDataSystem::margin(double lambda) const {
    const Eigen::MatrixXd M = coefficientMatrix(lambda);
    double out = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        out = std::min(out, M(i, i) - (M.row(i).cwiseAbs().sum() - std::abs(M(i, i))));
    }
    return out;
}

Eigen::VectorXd ridgeClosedFormReal(const Eigen::MatrixXd& XR, const Eigen::VectorXd& yR, double lambda) {
    if (XR.rows() != yR.size()) {
        throw ShapeMismatch("ridgeClosedFormReal: row count differs from label count");
    }
    if (XR.rows() == 0) {
        throw EmptyData();
    }
    return solveRegularized(XR, lambda, Eigen::MatrixXd(XR.transpose() * yR));
}

ZVector closedFormSymbolicData(const AbstractDataset& data, double lambda, const Eigen::VectorXd& wR) {
    const auto XSt = data.XS.transpose();
    const ZMatrix cross = matMul(data.XR.transpose(), data.XS) + matMul(XSt, data.XR);
    const ZVector rhs = apply(XSt, data.yR) + apply(data.XR.transpose(), data.yS) - apply(cross, wR);
    return solveRegularized(data.XR, lambda, rhs);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> buildTransform(const Eigen::MatrixXd& XR, const RidgeConfig& cfg) {
    const Eigen::Index d = XR.cols();
    switch (cfg.transform) {
    case TransformKind::Identity:
        return {Eigen::MatrixXd::Identity(d, d), Eigen::MatrixXd::Identity(d, d)};
    case TransformKind::Custom: {
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(cfg.customTransform);
        const auto& s = svd.singularValues();
        if (s.size() != d || s.minCoeff() <= 0.0 || s.maxCoeff() / s.minCoeff() > kMaxTransformCondition) {
            throw SingularMatrix("custom transform is singular or ill-conditioned");
        }
        return {cfg.customTransform, cfg.customTransform.inverse()};
    }
    case TransformKind::SvdOfCovariance:
    default: {
        const Eigen::MatrixXd gram = XR.transpose() * XR;
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeFullV);
        const Eigen::MatrixXd& V = svd.matrixV();
        return {V.transpose(), V};
    }
    }
}

NonDataSystem buildNonDataSystem(const AbstractDataset& data, double lambda, const Eigen::VectorXd& wR,
                                 const ZVector& wD, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Ainv) {
    (void)lambda;
    const Eigen::Index d = data.d();
    const auto nInt = data.n();
    const auto n = static_cast<double>(nInt);
    const auto XSt = data.XS.transpose();
    const ZMatrix cross = matMul(data.XR.transpose(), data.XS) + matMul(XSt, data.XR);
    const ZMatrix quad = matMul(XSt, data.XS);

    NonDataSystem sys;
    sys.n = nInt;
    sys.Q = A * (data.XR.transpose() * data.XR) * Ainv;

    const ZMatrix G = matMul(matMul(A, ZMatrix(cross + quad)), Ainv);
    sys.Cprime.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            sys.Cprime(i, j) = G(i, j).absCoefficientSum();
        }
    }

    // Terms of the gradient that involve neither the box symbols nor only
    // first-order data symbols.
    const ZVector constant = apply(cross, wD) + apply(quad, ZVector(liftVector(wR) + wD)) - apply(XSt, data.yS);
    const ZVector projected = apply(A, constant);
    sys.c0.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        sys.c0[i] = (2.0 / n) * (projected[i].absCoefficientSum() + std::abs(projected[i].center()));
    }

    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d; ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (j != i) {
                off += std::abs(sys.Q(i, j)) + sys.Cprime(i, j);
            }
        }
        worst = std::max(worst, off + sys.Cprime(i, i) - sys.Q(i, i));
    }
    sys.beta = worst / n;
    return sys;
}

Eigen::VectorXd solveNonData(const NonDataSystem& sys, double lambda, double tolerance) {
    if (lambda < sys.beta - tolerance) {
        throw LambdaTooSmall(sys.beta, lambda);
    }
    const Eigen::VectorXd rhs = sys.rhs();
    if (rhs.isZero(0.0)) {
        return Eigen::VectorXd::Zero(rhs.size());
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.coefficientMatrix(lambda));
    if (!(lu.rcond() > 1e-14)) {
        throw NumericalError("k-system is singular at lambda = " + std::to_string(lambda));
    }
    Eigen::VectorXd k = lu.solve(rhs);
    if (!k.allFinite()) {
        throw NumericalError("k-system produced non-finite values");
    }
    const double floor = -tolerance * (1.0 + k.cwiseAbs().maxCoeff());
    if ((k.array() < floor).any()) {
        throw NumericalError("k-system produced a negative box size");
    }
    return k.cwiseMax(0.0);
}

std::size_t determineNumSplits(const NonDataSystem& sys, double lambda, const AbstractDataset& data) {
    if (sys.beta <= lambda) {
        return 1;
    }
    const double cmax = sys.Cprime.size() == 0 ? 0.0 : sys.Cprime.maxCoeff();
    if (cmax <= 0.0) {
        return 1;
    }
    const double denom = lambda * static_cast<double>(data.n()) + sys.Q.diagonal().minCoeff();
    if (!(denom > 0.0)) {
        throw NumericalError("splitting cannot reduce beta: lambda n + min q is not positive");
    }
    const double m = std::ceil(static_cast<double>(data.d()) * cmax / denom);
    return std::max<std::size_t>(2, static_cast<std::size_t>(m));
}

std::vector<AbstractDataset> splitDataset(const AbstractDataset& data, std::size_t m, std::size_t budget) {
    const Eigen::Index n = data.n();
    const Eigen::Index d = data.d();
    ZVector flat(n * d + n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            flat[r * d + c] = data.XS(r, c) + data.XR(r, c);
        }
        flat[n * d + r] = data.yS[r] + data.yR[r];
    }
    std::vector<AbstractDataset> out;
    for (const ZVector& part : muSplit(flat, m, *data.registry, budget)) {
        AbstractDataset p;
        p.registry = data.registry;
        p.provenance = data.provenance;
        p.XR.resize(n, d);
        p.XS.resize(n, d);
        p.yR.resize(n);
        p.yS.resize(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                const PolyForm& f = part[r * d + c];
                p.XR(r, c) = f.center();
                p.XS(r, c) = f.withCenter(0.0);
            }
            const PolyForm& f = part[n * d + r];
            p.yR[r] = f.center();
            p.yS[r] = f.withCenter(0.0);
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::pair<AbstractWeights, FixedPointDiagnostics> fixedPoint(const AbstractDataset& data, const RidgeConfig& cfg) {
    cfg.validate(data.d());
    FixedPointDiagnostics diag;
    diag.lambdaUsed = cfg.lambda;

    const PartSolution whole = solvePart(data, cfg);
    diag.beta = whole.sys.beta;
    if (whole.sys.beta <= cfg.lambda + cfg.tolerance) {
        AbstractWeights w = assemble(data, whole, solveNonData(whole.sys, cfg.lambda, cfg.tolerance), cfg.lambda);
        diag.mMatrixMargin = whole.sys.margin(cfg.lambda);
        if (cfg.verifyResidual) {
            diag.residual = verifyFixedPointResidual(data, w);
        }
        return {std::move(w), diag};
    }

    std::size_t m = determineNumSplits(whole.sys, cfg.lambda, data);
    for (;;) {
        const std::vector<AbstractDataset> parts = splitDataset(data, m, cfg.splitBudget);
        std::vector<PartSolution> solutions(parts.size());
        detail::parallelFor(parts.size(), cfg.parallel,
                            [&](std::size_t i) { solutions[i] = solvePart(parts[i], cfg); });
        const bool feasible = std::all_of(solutions.begin(), solutions.end(), [&](const PartSolution& s) {
            return s.sys.beta <= cfg.lambda + cfg.tolerance;
        });
        if (!feasible) {
            ++m;
            continue;
        }

        std::vector<ZVector> zonotopes(parts.size());
        detail::parallelFor(parts.size(), cfg.parallel, [&](std::size_t i) {
            const AbstractWeights w =
                assemble(parts[i], solutions[i], solveNonData(solutions[i].sys, cfg.lambda, cfg.tolerance), cfg.lambda);
            zonotopes[i] = w.zonotope();
        });
        const auto firstBox = static_cast<SymbolId>(data.registry->size());
        const ZVector joined = boxJoin(zonotopes, *data.registry);

        AbstractWeights w;
        const Eigen::Index d = data.d();
        w.wR = centers(joined);
        w.wD = ZVector::Constant(d, PolyForm(0.0));
        w.k.resize(d);
        w.A = Eigen::MatrixXd::Identity(d, d);
        w.Ainv = w.A;
        w.registry = data.registry;
        w.lambda = cfg.lambda;
        w.joined = true;
        w.provenance = data.provenance;
        for (Eigen::Index i = 0; i < d; ++i) {
            w.freshIds.push_back(firstBox + static_cast<SymbolId>(i));
            w.k[i] = joined[i].absCoefficientSum();
        }

        diag.splitsUsed = m;
        diag.partsUsed = parts.size();
        diag.mMatrixMargin = std::numeric_limits<double>::infinity();
        for (const auto& s : solutions) {
            diag.mMatrixMargin = std::min(diag.mMatrixMargin, s.sys.margin(cfg.lambda));
        }
        return {std::move(w), diag};
    }
}

ResidualReport verifyFixedPointResidual(const AbstractDataset& data, const AbstractWeights& weights) {
    ResidualReport report;
    if (weights.joined) {
        return report;
    }
    report.applicable = true;
    SymbolRegistry& reg = *data.registry;
    const auto n = static_cast<double>(data.n());
    const double lambda = weights.lambda;

    const Eigen::MatrixXd Q = weights.A * (data.XR.transpose() * data.XR) * weights.Ainv;
    const double qmax = Q.diagonal().maxCoeff();
    const double rate = 2.0 * lambda + (2.0 / n) * std::max(qmax, 0.0);
    report.eta = rate > 0.0 ? 0.5 / rate : 1.0;

    const ZMatrix X = lift(data.XR) + data.XS;
    const ZVector y = liftVector(data.yR) + data.yS;
    const ZVector w = weights.zonotope();
    const ZVector residual = apply(X, w) - y;
    const ZVector grad = (2.0 / n) * apply(X.transpose(), residual) + (2.0 * lambda) * w;
    const ZVector step = w - report.eta * grad;

    const ZVector projected = linearize(apply(weights.A, step), reg);
    const SymbolSet nonData = symbolsOfKind(projected, reg, SymbolKind::FreshSymbol);
    const auto firstNew = static_cast<SymbolId>(reg.size());
    const ZVector boxed = intervalHull(projected, nonData, reg);

    const ZVector expected = apply(weights.A, ZVector(liftVector(weights.wR) + weights.wD));
    report.kNext = Eigen::VectorXd::Zero(weights.d());
    for (Eigen::Index i = 0; i < weights.d(); ++i) {
        const PolyForm diff = boxed[i] - expected[i];
        report.realResidual = std::max(report.realResidual, std::abs(diff.center()));
        for (const auto& [mono, c] : diff.terms()) {
            const SymbolId id = mono.factors().front();
            if (id >= firstNew) {
                report.kNext[i] = std::abs(c);
            } else if (reg.isData(id)) {
                report.dataResidual = std::max(report.dataResidual, std::abs(c));
            }
        }
        report.boxResidual = std::max(report.boxResidual, std::abs(report.kNext[i] - weights.k[i]));
    }
    return report;
}

bool containsWorldWeights(const AbstractWeights& weights, const Assignment& eData, const Eigen::VectorXd& wStar,
                          double tol) {
    if (wStar.size() != weights.d()) {
        throw ShapeMismatch("containsWorldWeights: weight dimension mismatch");
    }
    Assignment e = Assignment::Zero(static_cast<Eigen::Index>(weights.registry->size()));
    const Eigen::Index keep = std::min(e.size(), eData.size());
    e.head(keep) = eData.head(keep);
    const Eigen::VectorXd wDe = evaluate(weights.wD, e);
    const Eigen::VectorXd r = weights.A * (wStar - weights.wR - wDe);
    const double t = tol * (1.0 + wStar.cwiseAbs().maxCoeff());
    return (r.cwiseAbs().array() <= weights.k.array() + t).all();
}

std::string weightsToJson(const AbstractWeights& weights, const FixedPointDiagnostics& diagnostics) {
    Json j;
    j["lambda"] = weights.lambda;
    j["joined"] = weights.joined;
    j["wR"] = vectorJson(weights.wR);
    j["k"] = vectorJson(weights.k);
    j["A"] = matrixJson(weights.A);
    j["Ainv"] = matrixJson(weights.Ainv);
    Json wD = Json::array();
    for (const auto& [id, cell] : weights.provenance) {
        std::vector<double> coef;
        for (Eigen::Index i = 0; i < weights.d(); ++i) {
            coef.push_back(weights.wD[i].coefficient(id));
        }
        wD.push_back({{"row", cell.row}, {"col", cell.col}, {"coef", coef}});
    }
    j["wD"] = std::move(wD);
    const ResidualReport& r = diagnostics.residual;
    j["diagnostics"] = {{"beta", diagnostics.beta},
                        {"lambdaUsed", diagnostics.lambdaUsed},
                        {"splitsUsed", diagnostics.splitsUsed},
                        {"partsUsed", diagnostics.partsUsed},
                        {"mMatrixMargin", diagnostics.mMatrixMargin},
                        {"residual",
                         {{"applicable", r.applicable},
                          {"eta", r.eta},
                          {"real", r.realResidual},
                          {"data", r.dataResidual},
                          {"box", r.boxResidual}}}};
    return j.dump(2);
}

std::pair<AbstractWeights, FixedPointDiagnostics> weightsFromJson(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& ex) {
        throw DataError(std::string("invalid weights JSON: ") + ex.what());
    }
    try {
        AbstractWeights w;
        w.registry = SymbolRegistry::create();
        w.lambda = j.at("lambda").get<double>();
        w.joined = j.at("joined").get<bool>();
        w.wR = vectorFromJson(j.at("wR"));
        w.k = vectorFromJson(j.at("k"));
        w.A = matrixFromJson(j.at("A"));
        w.Ainv = matrixFromJson(j.at("Ainv"));
        const Eigen::Index d = w.wR.size();
        w.wD = ZVector::Constant(d, PolyForm(0.0));
        for (const auto& entry : j.at("wD")) {
            const SymbolId id = w.registry->newData();
            w.provenance.emplace_back(id, CellRef{entry.at("row").get<Eigen::Index>(), entry.at("col").get<Eigen::Index>()});
            const auto coef = entry.at("coef").get<std::vector<double>>();
            for (Eigen::Index i = 0; i < d; ++i) {
                w.wD[i] += PolyForm::symbol(*w.registry, id, coef.at(static_cast<std::size_t>(i)));
            }
        }
        const SymbolId first = w.registry->newFreshRange(static_cast<std::size_t>(d));
        for (Eigen::Index i = 0; i < d; ++i) {
            w.freshIds.push_back(first + static_cast<SymbolId>(i));
        }

        FixedPointDiagnostics diag;
        const Json& dj = j.at("diagnostics");
        diag.beta = dj.at("beta").get<double>();
        diag.lambdaUsed = dj.at("lambdaUsed").get<double>();
        diag.splitsUsed = dj.at("splitsUsed").get<std::size_t>();
        diag.partsUsed = dj.at("partsUsed").get<std::size_t>();
        diag.mMatrixMargin = dj.at("mMatrixMargin").get<double>();
        const Json& rj = dj.at("residual");
        diag.residual.applicable = rj.at("applicable").get<bool>();
        diag.residual.eta = rj.at("eta").get<double>();
        diag.residual.realResidual = rj.at("real").get<double>();
        diag.residual.dataResidual = rj.at("data").get<double>();
        diag.residual.boxResidual = rj.at("box").get<double>();
        return {std::move(w), diag};
    } catch (const Json::exception& ex) {
        throw DataError(std::string("malformed weights JSON: ") + ex.what());
    }
}

} // namespace zonoridge
