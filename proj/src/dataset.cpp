// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "zonoridge/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace zonoridge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(b, e - b + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
        out = out.substr(1, out.size() - 2);
    }
    return out;
}

std::vector<std::string> splitRow(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            out.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    out.push_back(trim(field));
    return out;
}

double parseCell(const std::string& cell, std::size_t line, const std::string& column) {
    if (cell.empty() || cell == "?") {
        return kNaN;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError("line " + std::to_string(line) + ": column '" + column + "' is not numeric: '" + cell + "'");
    }
    return value;
}

AbstractDataset emptyAbstract(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, RegistryPtr registry) {
    AbstractDataset out;
    out.XR = X;
    out.yR = y;
    out.XS = ZMatrix::Constant(X.rows(), X.cols(), PolyForm(0.0));
    out.yS = ZVector::Constant(y.size(), PolyForm(0.0));
    out.registry = std::move(registry);
    return out;
}

void addCell(AbstractDataset& out, Eigen::Index row, Eigen::Index col, double halfWidth) {
    const SymbolId id = out.registry->newData();
    out.provenance.emplace_back(id, CellRef{row, col});
    const PolyForm sym = PolyForm::symbol(*out.registry, id, halfWidth);
    if (col == kLabelColumn) {
        out.yS[row] += sym;
    } else {
        out.XS(row, col) += sym;
    }
}

} // namespace

bool Dataset::hasMissing() const { return X.hasNaN() || y.hasNaN(); }

Dataset Dataset::rows(const std::vector<Eigen::Index>& idx) const {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
        out.X.row(static_cast<Eigen::Index>(r)) = X.row(idx[r]);
        out.y[static_cast<Eigen::Index>(r)] = y[idx[r]];
    }
    out.columns = columns;
    out.label = label;
    return out;
}

Dataset Dataset::fromFeatures(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                              std::vector<std::string> featureNames, std::string labelName) {
    if (features.rows() != labels.size()) {
        throw ShapeMismatch("fromFeatures: row count differs from label count");
    }
    Dataset out;
    out.X.resize(features.rows(), features.cols() + 1);
    out.X.col(0).setOnes();
    out.X.rightCols(features.cols()) = features;
    out.y = labels;
    out.columns.emplace_back("bias");
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
        out.columns.push_back(static_cast<std::size_t>(c) < featureNames.size() ? featureNames[static_cast<std::size_t>(c)]
                                                                               : "x" + std::to_string(c + 1));
    }
    out.label = std::move(labelName);
    return out;
}

Dataset loadCsv(const std::filesystem::path& path, const std::string& labelColumn,
                const std::vector<std::string>& features) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw EmptyData();
    }
    const std::vector<std::string> header = splitRow(line);
    auto indexOf = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw DataError("column '" + name + "' not found in " + path.string());
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t labelIdx = indexOf(labelColumn);
    std::vector<std::size_t> featureIdx;
    if (features.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i != labelIdx) {
                featureIdx.push_back(i);
            }
        }
    } else {
        for (const auto& f : features) {
            featureIdx.push_back(indexOf(f));
        }
    }

    std::vector<std::vector<double>> rows;
    std::vector<double> labels;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = splitRow(line);
        if (cells.size() != header.size()) {
            throw DataError("line " + std::to_string(lineNo) + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(featureIdx.size());
        for (std::size_t f : featureIdx) {
            row.push_back(parseCell(cells[f], lineNo, header[f]));
        }
        rows.push_back(std::move(row));
        labels.push_back(parseCell(cells[labelIdx], lineNo, header[labelIdx]));
    }
    if (rows.empty()) {
        throw EmptyData();
    }

    Eigen::MatrixXd feats(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(featureIdx.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < featureIdx.size(); ++c) {
            feats(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    std::vector<std::string> names;
    for (std::size_t f : featureIdx) {
        names.push_back(header[f]);
    }
    return Dataset::fromFeatures(feats, Eigen::Map<const Eigen::VectorXd>(labels.data(), Eigen::Index(labels.size())),
                                 std::move(names), labelColumn);
}

std::pair<Dataset, Dataset> trainTestSplit(const Dataset& data, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw DataError("trainTestSplit: ratio must lie in (0, 1)");
    }
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.n()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto nTrain = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(data.n())));
    std::vector<Eigen::Index> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(nTrain));
    std::vector<Eigen::Index> test(idx.begin() + static_cast<std::ptrdiff_t>(nTrain), idx.end());
    return {data.rows(train), data.rows(test)};
}

DomainRange domainRanges(const Dataset& data) {
    if (data.n() == 0) {
        throw EmptyData();
    }
    DomainRange out;
    out.min = Eigen::VectorXd::Zero(data.d());
    out.max = Eigen::VectorXd::Zero(data.d());
    for (Eigen::Index c = 1; c < data.d(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Eigen::Index r = 0; r < data.n(); ++r) {
            const double v = data.X(r, c);
            if (!std::isnan(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        if (lo > hi) {
            lo = hi = 0.0;
        }
        out.min[c] = lo;
        out.max[c] = hi;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : data.y) {
        if (!std::isnan(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    out.labelMin = lo > hi ? 0.0 : lo;
    out.labelMax = lo > hi ? 0.0 : hi;
    return out;
}

void UncertaintySpec::validate(Eigen::Index d) const {
    if (!(percentage >= 0.0 && percentage <= 1.0)) {
        throw DataError("uncertainty percentage must lie in [0, 1]");
    }
    if (!(radius >= 0.0)) {
        throw DataError("uncertainty radius must be non-negative");
    }
    if (target != UncertaintyTarget::Labels) {
        if (columns.empty()) {
            throw DataError("feature uncertainty needs at least one column");
        }
        for (Eigen::Index c : columns) {
            if (c == 0) {
                throw DataError("the bias column cannot be uncertain");
            }
            if (c < 0 || c >= d) {
                throw DataError("uncertain column " + std::to_string(c) + " out of range");
            }
        }
    }
}

std::vector<SymbolId> AbstractDataset::dataSymbols() const {
    std::vector<SymbolId> out;
    out.reserve(provenance.size());
    for (const auto& [id, cell] : provenance) {
        out.push_back(id);
    }
    return out;
}

std::optional<CellRef> AbstractDataset::cellOf(SymbolId id) const {
    for (const auto& [sym, cell] : provenance) {
        if (sym == id) {
            return cell;
        }
    }
    return std::nullopt;
}

bool AbstractDataset::featuresCertain() const {
    return std::none_of(provenance.begin(), provenance.end(), [](const auto& p) { return p.second.col != kLabelColumn; });
}

bool AbstractDataset::labelsCertain() const {
    return std::none_of(provenance.begin(), provenance.end(), [](const auto& p) { return p.second.col == kLabelColumn; });
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> AbstractDataset::materialize(const Assignment& e) const {
    return {XR + evaluate(XS, e), yR + evaluate(yS, e)};
}

Assignment AbstractDataset::zeroAssignment() const {
    return Assignment::Zero(static_cast<Eigen::Index>(registry->size()));
}

AbstractDataset AbstractDataset::certain(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, RegistryPtr registry) {
    if (X.rows() != y.size()) {
        throw ShapeMismatch("certain: row count differs from label count");
    }
    return emptyAbstract(X, y, std::move(registry));
}

AbstractDataset injectUncertainty(const Dataset& data, const UncertaintySpec& spec) {
    spec.validate(data.d());
    if (data.hasMissing()) {
        throw DataError("injectUncertainty: dataset has missing cells");
    }
    const DomainRange ranges = domainRanges(data);
    AbstractDataset out = emptyAbstract(data.X, data.y, SymbolRegistry::create());

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.n()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::mt19937_64 rng(spec.seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto count = static_cast<std::size_t>(std::ceil(spec.percentage * static_cast<double>(data.n()) - 1e-9));
    idx.resize(std::min(count, idx.size()));
    std::sort(idx.begin(), idx.end());

    const bool labels = spec.target != UncertaintyTarget::Features;
    const bool feats = spec.target != UncertaintyTarget::Labels;
    for (Eigen::Index r : idx) {
        if (feats) {
            for (Eigen::Index c : spec.columns) {
                addCell(out, r, c, spec.radius * ranges.range(c) / 2.0);
            }
        }
        if (labels) {
            addCell(out, r, kLabelColumn, spec.radius * ranges.labelRange() / 2.0);
        }
    }
    return out;
}

AbstractDataset abstractMissing(const Dataset& data, const MissingRanges& ranges) {
    AbstractDataset out = emptyAbstract(data.X, data.y, SymbolRegistry::create());
    auto rangeFor = [&](Eigen::Index c) -> const Interval& {
        const auto* slot = static_cast<std::size_t>(c) < ranges.features.size() ? &ranges.features[static_cast<std::size_t>(c)]
                                                                                 : nullptr;
        if (slot == nullptr || !slot->has_value()) {
            throw DataError("no declared range for missing cells of column " + std::to_string(c));
        }
        return **slot;
    };
    for (Eigen::Index r = 0; r < data.n(); ++r) {
        for (Eigen::Index c = 0; c < data.d(); ++c) {
            if (std::isnan(data.X(r, c))) {
                const Interval& iv = rangeFor(c);
                out.XR(r, c) = iv.lo + (iv.hi - iv.lo) / 2.0;
                addCell(out, r, c, (iv.hi - iv.lo) / 2.0);
            }
        }
        if (std::isnan(data.y[r])) {
            if (!ranges.label) {
                throw DataError("no declared range for missing labels");
            }
            out.yR[r] = ranges.label->lo + (ranges.label->hi - ranges.label->lo) / 2.0;
            addCell(out, r, kLabelColumn, (ranges.label->hi - ranges.label->lo) / 2.0);
        }
    }
    return out;
}

Interval imputationRange(const std::vector<double>& estimates) {
    if (estimates.empty()) {
        throw DataError("imputationRange: no estimates");
    }
    const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
    return {*lo, *hi};
}

AbstractDataset abstractIntervals(const Eigen::MatrixXd& lo, const Eigen::MatrixXd& hi, const Eigen::VectorXd& ylo,
                                  const Eigen::VectorXd& yhi, RegistryPtr registry) {
    if (lo.rows() != hi.rows() || lo.cols() != hi.cols() || ylo.size() != yhi.size() || ylo.size() != lo.rows()) {
        throw ShapeMismatch("abstractIntervals: bound shapes differ");
    }
    if ((hi.array() < lo.array()).any() || (yhi.array() < ylo.array()).any()) {
        throw DataError("abstractIntervals: upper bound below lower bound");
    }
    AbstractDataset out = emptyAbstract((lo + hi) / 2.0, (ylo + yhi) / 2.0, std::move(registry));
    for (Eigen::Index r = 0; r < lo.rows(); ++r) {
        for (Eigen::Index c = 0; c < lo.cols(); ++c) {
            if (hi(r, c) > lo(r, c)) {
                addCell(out, r, c, (hi(r, c) - lo(r, c)) / 2.0);
            }
        }
        if (yhi[r] > ylo[r]) {
            addCell(out, r, kLabelColumn, (yhi[r] - ylo[r]) / 2.0);
        }
    }
    return out;
}

} // namespace zonoridge
