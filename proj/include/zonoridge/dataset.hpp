// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "zonoridge/errors.hpp"
#include "zonoridge/poly_form.hpp"
#include "zonoridge/zonotope.hpp"

namespace zonoridge {

class EmptyData : public DataError {
  public:
    EmptyData() : DataError("EmptyData: no data rows") {}
};

/// Concrete regression data. Column 0 of X is the all-ones bias column.
/// Missing cells are NaN.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> columns; // one per column of X, "bias" first
    std::string label;

    [[nodiscard]] Eigen::Index n() const noexcept { return X.rows(); }
    [[nodiscard]] Eigen::Index d() const noexcept { return X.cols(); }
    [[nodiscard]] bool hasMissing() const;
    [[nodiscard]] Dataset rows(const std::vector<Eigen::Index>& idx) const;

    /// Builds a dataset from raw features (without bias) and labels.
    static Dataset fromFeatures(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                                std::vector<std::string> featureNames = {}, std::string labelName = "y");
};

/// Reads a comma-separated file with a header row. Empty fields and `?` are
/// missing. When `features` is empty every non-label column is used.
Dataset loadCsv(const std::filesystem::path& path, const std::string& labelColumn,
                const std::vector<std::string>& features = {});

/// Seeded shuffle, then the first round(ratio * n) rows form the training side.
std::pair<Dataset, Dataset> trainTestSplit(const Dataset& data, double ratio, std::uint64_t seed);

struct DomainRange {
    Eigen::VectorXd min; // per column of X; the bias entry is 0
    Eigen::VectorXd max;
    double labelMin = 0.0;
    double labelMax = 0.0;

    [[nodiscard]] double range(Eigen::Index column) const { return max[column] - min[column]; }
    [[nodiscard]] double labelRange() const noexcept { return labelMax - labelMin; }
};

/// Observed per-column ranges, ignoring missing cells.
DomainRange domainRanges(const Dataset& data);

enum class UncertaintyTarget { Labels, Features, Both };

struct UncertaintySpec {
    UncertaintyTarget target = UncertaintyTarget::Labels;
    std::vector<Eigen::Index> columns; // feature columns of X (never 0) for Features / Both
    double percentage = 0.0;           // fraction of rows
    double radius = 0.0;               // interval width as a fraction of the column's domain range
    std::uint64_t seed = 0;

    void validate(Eigen::Index d) const;
};

inline constexpr Eigen::Index kLabelColumn = -1;

/// Cell an error symbol was created for; `col == kLabelColumn` is the label.
struct CellRef {
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    friend bool operator==(const CellRef&, const CellRef&) = default;
};

/// Uncertain training data split into real centers and symbolic parts:
/// X = XR + XS, y = yR + yS, where XS and yS carry only data symbols with
/// zero centers.
struct AbstractDataset {
    Eigen::MatrixXd XR;
    ZMatrix XS;
    Eigen::VectorXd yR;
    ZVector yS;
    RegistryPtr registry;
    std::vector<std::pair<SymbolId, CellRef>> provenance; // in creation order

    [[nodiscard]] Eigen::Index n() const noexcept { return XR.rows(); }
    [[nodiscard]] Eigen::Index d() const noexcept { return XR.cols(); }
    [[nodiscard]] std::vector<SymbolId> dataSymbols() const;
    [[nodiscard]] std::optional<CellRef> cellOf(SymbolId id) const;
    [[nodiscard]] bool featuresCertain() const;
    [[nodiscard]] bool labelsCertain() const;

    /// Concrete dataset for one assignment of the error symbols.
    [[nodiscard]] std::pair<Eigen::MatrixXd, Eigen::VectorXd> materialize(const Assignment& e) const;
    /// Assignment vector sized for the registry, all zeros.
    [[nodiscard]] Assignment zeroAssignment() const;

    /// Exact abstraction of certain data (no symbols).
    static AbstractDataset certain(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   RegistryPtr registry = SymbolRegistry::create());
};

/// Adds one data symbol per cell: cell (r, c) becomes x_rc + (radius * range(c) / 2) * e.
AbstractDataset injectUncertainty(const Dataset& data, const UncertaintySpec& spec);

/// Declared value ranges for columns with missing cells.
struct MissingRanges {
    std::vector<std::optional<Interval>> features; // indexed by column of X
    std::optional<Interval> label;
};

/// Every missing cell becomes mid + half-width * e over its column range.
AbstractDataset abstractMissing(const Dataset& data, const MissingRanges& ranges);

/// [min, max] of the estimates produced by a set of imputers.
Interval imputationRange(const std::vector<double>& estimates);

/// Builds an abstract dataset from explicit per-cell intervals; cells whose
/// interval is degenerate stay certain.
AbstractDataset abstractIntervals(const Eigen::MatrixXd& lo, const Eigen::MatrixXd& hi, const Eigen::VectorXd& ylo,
                                  const Eigen::VectorXd& yhi, RegistryPtr registry = SymbolRegistry::create());

} // namespace zonoridge
