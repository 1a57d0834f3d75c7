// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "zonoridge/dataset.hpp"
#include "zonoridge/zonotope.hpp"

namespace zonoridge {

enum class TransformKind { SvdOfCovariance, Identity, Custom };

struct RidgeConfig {
    double lambda = 0.0;
    TransformKind transform = TransformKind::SvdOfCovariance;
    Eigen::MatrixXd customTransform; // used with TransformKind::Custom
    std::size_t splitBudget = std::size_t{1} << 16;
    double tolerance = 1e-9;
    bool parallel = true;       // split parts solved concurrently
    bool verifyResidual = true; // run verifyFixedPointResidual on unsplit results

    void validate(Eigen::Index d) const;
};

/// Abstract ridge weights wR + wD(e) + Ainv * diag(k) * eps' where eps' are
/// the fresh symbols in `freshIds` and k_i >= 0 is the half-width of the box
/// in transformed coordinates.
struct AbstractWeights {
    Eigen::VectorXd wR;
    ZVector wD; // affine in data symbols, zero centers
    Eigen::VectorXd k;
    Eigen::MatrixXd A;
    Eigen::MatrixXd Ainv;
    std::vector<SymbolId> freshIds;
    RegistryPtr registry;
    double lambda = 0.0;
    bool joined = false; // box join of split parts; wD = 0 and A = I
    std::vector<std::pair<SymbolId, CellRef>> provenance;

    [[nodiscard]] Eigen::Index d() const noexcept { return wR.size(); }
    [[nodiscard]] ZVector zonotope() const;
    [[nodiscard]] IntervalBox box() const { return intervalOf(zonotope()); }
};

struct NonDataSystem {
    Eigen::MatrixXd Q;
    Eigen::MatrixXd Cprime;
    Eigen::VectorXd c0;
    double beta = 0.0;
    Eigen::Index n = 0;

    /// Coefficient matrix of the k-system for a given lambda.
    [[nodiscard]] Eigen::MatrixXd coefficientMatrix(double lambda) const;
    /// Right-hand side (n/2) c0.
    [[nodiscard]] Eigen::VectorXd rhs() const;
    /// Per-row diagonal minus off-diagonal absolute sum at lambda.
    [[nodiscard]] double margin(double lambda) const;
};

struct ResidualReport {
    bool applicable = false; // false for joined weights
    double eta = 0.0;
    double realResidual = 0.0; // max |center - A wR|
    double dataResidual = 0.0; // max |data coefficient - (A wD) coefficient|
    double boxResidual = 0.0;  // max |k' - k|
    Eigen::VectorXd kNext;

    [[nodiscard]] bool ok(double kNorm) const {
        return !applicable || (realResidual < 1e-9 && dataResidual < 1e-9 && boxResidual < 1e-8 * (1.0 + kNorm));
    }
};

struct FixedPointDiagnostics {
    double beta = 0.0;
    double lambdaUsed = 0.0;
    std::size_t splitsUsed = 1; // split factor m per data symbol
    std::size_t partsUsed = 1;
    double mMatrixMargin = 0.0;
    ResidualReport residual;
};

Eigen::VectorXd ridgeClosedFormReal(const Eigen::MatrixXd& XR, const Eigen::VectorXd& yR, double lambda);

ZVector closedFormSymbolicData(const AbstractDataset& data, double lambda, const Eigen::VectorXd& wR);

/// Returns (A, Ainv).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> buildTransform(const Eigen::MatrixXd& XR, const RidgeConfig& cfg);

NonDataSystem buildNonDataSystem(const AbstractDataset& data, double lambda, const Eigen::VectorXd& wR,
                                 const ZVector& wD, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Ainv);

/// Throws LambdaTooSmall when lambda < beta - tolerance.
Eigen::VectorXd solveNonData(const NonDataSystem& sys, double lambda, double tolerance = 1e-9);

std::pair<AbstractWeights, FixedPointDiagnostics> fixedPoint(const AbstractDataset& data, const RidgeConfig& cfg);

/// Initial split factor predicted to bring every part's beta under lambda.
std::size_t determineNumSplits(const NonDataSystem& sys, double lambda, const AbstractDataset& data);

/// Splits every data symbol of the dataset into m parts.
std::vector<AbstractDataset> splitDataset(const AbstractDataset& data, std::size_t m, std::size_t budget);

/// One exact symbolic gradient step followed by linearization and a box in
/// transformed coordinates.
ResidualReport verifyFixedPointResidual(const AbstractDataset& data, const AbstractWeights& weights);

/// Membership of a concrete weight vector for one data assignment. The
/// tolerance is scaled by 1 + max|wStar|.
bool containsWorldWeights(const AbstractWeights& weights, const Assignment& eData, const Eigen::VectorXd& wStar,
                          double tol = 1e-8);

std::string weightsToJson(const AbstractWeights& weights, const FixedPointDiagnostics& diagnostics);
/// Rebuilds weights on a new registry; data symbols are recreated in
/// provenance order, then the fresh box symbols.
std::pair<AbstractWeights, FixedPointDiagnostics> weightsFromJson(std::string_view text);

} // namespace zonoridge
