// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include <Eigen/Core>

#include "zonoridge/errors.hpp"
#include "zonoridge/poly_form.hpp"

namespace zonoridge {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] double mid() const noexcept { return 0.5 * (lo + hi); }
    [[nodiscard]] double radius() const noexcept { return 0.5 * (hi - lo); }
    [[nodiscard]] bool contains(double x, double tol = 0.0) const noexcept { return x >= lo - tol && x <= hi + tol; }
    [[nodiscard]] bool contains(const Interval& o, double tol = 0.0) const noexcept {
        return o.lo >= lo - tol && o.hi <= hi + tol;
    }
    [[nodiscard]] Interval hull(const Interval& o) const noexcept {
        return {std::min(lo, o.lo), std::max(hi, o.hi)};
    }
};

struct IntervalBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    [[nodiscard]] Eigen::Index size() const noexcept { return lo.size(); }
    [[nodiscard]] Interval operator[](Eigen::Index i) const { return {lo[i], hi[i]}; }
    [[nodiscard]] bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

using SymbolSet = std::set<SymbolId>;

/// Wraps a real matrix as constant forms.
template <typename Derived>
ZMatrix lift(const Eigen::MatrixBase<Derived>& m) {
    return m.template cast<PolyForm>();
}

namespace detail {
inline const PolyForm& asForm(const PolyForm& f) { return f; }
inline PolyForm asForm(double v) { return PolyForm(v); }
inline bool isZero(const PolyForm& f) { return f.isZero(); }
inline bool isZero(double v) { return v == 0.0; }
} // namespace detail

/// Product of two dense matrices of which at least one holds forms.
/// Exact; zero entries are skipped so sparse symbolic parts stay cheap.
template <typename Lhs, typename Rhs>
ZMatrix matMul(const Eigen::MatrixBase<Lhs>& a, const Eigen::MatrixBase<Rhs>& b) {
    if (a.cols() != b.rows()) {
        throw ShapeMismatch("matMul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                            std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    ZMatrix out = ZMatrix::Constant(a.rows(), b.cols(), PolyForm(0.0));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            const auto& aik = a.derived().coeff(i, k);
            if (detail::isZero(aik)) {
                continue;
            }
            const auto lhs = detail::asForm(aik);
            for (Eigen::Index j = 0; j < b.cols(); ++j) {
                const auto& bkj = b.derived().coeff(k, j);
                if (detail::isZero(bkj)) {
                    continue;
                }
                out(i, j) += lhs * detail::asForm(bkj);
            }
        }
    }
    return out;
}

/// Matrix-vector variant of matMul returning a ZVector.
template <typename Lhs, typename Rhs>
ZVector apply(const Eigen::MatrixBase<Lhs>& a, const Eigen::MatrixBase<Rhs>& v) {
    ZMatrix r = matMul(a, v);
    return r.col(0);
}

template <typename Derived>
Eigen::MatrixXd evaluate(const Eigen::MatrixBase<Derived>& m, const Assignment& e) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out(i, j) = m.derived().coeff(i, j).evaluate(e);
        }
    }
    return out;
}

/// Centers of every entry.
template <typename Derived>
Eigen::MatrixXd centers(const Eigen::MatrixBase<Derived>& m) {
    return m.unaryExpr([](const PolyForm& f) { return f.center(); }).template cast<double>();
}

/// Symbols that occur in any entry.
template <typename Derived>
SymbolSet symbolsOf(const Eigen::MatrixBase<Derived>& m) {
    SymbolSet out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (const auto& [mono, c] : m.derived().coeff(i, j).terms()) {
                out.insert(mono.factors().begin(), mono.factors().end());
            }
        }
    }
    return out;
}

/// [c - sum|g|, c + sum|g|] of an affine form.
Interval intervalOf(const PolyForm& f);
IntervalBox intervalOf(const ZVector& v);

/// Replaces every distinct monomial of degree >= 2 with one fresh symbol
/// shared by all entries of the vector.
ZVector linearize(const ZVector& v, SymbolRegistry& registry);

/// Merges `selected` symbols into one fresh symbol per dimension whose
/// coefficient is the row's absolute coefficient sum over the selection.
ZVector intervalHull(const ZVector& v, const SymbolSet& selected, SymbolRegistry& registry);

/// Condition number above which an order-reduction transform is rejected.
inline constexpr double kMaxTransformCondition = 1e12;

/// Interval hull performed in the space `transform * v`, mapped back by its inverse.
ZVector tihReduce(const Eigen::MatrixXd& transform, const ZVector& v, const SymbolSet& selected,
                  SymbolRegistry& registry);

/// Splits each data symbol's generator range into `m` equal parts; returns
/// m^s vectors for s split symbols. Fresh symbols are left alone.
std::vector<ZVector> muSplit(const ZVector& v, std::size_t m, const SymbolRegistry& registry,
                             std::size_t budget = std::size_t{1} << 16);

/// Box over-approximating the union of the parts' concretizations, one fresh
/// symbol per dimension.
ZVector boxJoin(const std::vector<ZVector>& parts, SymbolRegistry& registry);

/// Number of distinct monomials divided by the dimension.
double order(const ZVector& v);

/// Symbols of `v` of the given kind.
SymbolSet symbolsOfKind(const ZVector& v, const SymbolRegistry& registry, SymbolKind kind);

} // namespace zonoridge
