// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "zonoridge/symbol.hpp"

namespace zonoridge {

/// Coefficients with magnitude below this are dropped after every operation.
inline constexpr double kDropThreshold = 1e-14;

/// Values of error symbols, indexed by SymbolId. Every entry must lie in [-1, 1].
using Assignment = Eigen::VectorXd;

/// Product of error symbols, stored as a sorted multiset of ids.
/// Ordered by degree first, then lexicographically by ids.
class Monomial {
  public:
    Monomial() = default;
    explicit Monomial(SymbolId id) : factors_{id} {}
    Monomial(std::initializer_list<SymbolId> ids);
    explicit Monomial(std::vector<SymbolId> ids);

    [[nodiscard]] std::size_t degree() const noexcept { return factors_.size(); }
    [[nodiscard]] const std::vector<SymbolId>& factors() const noexcept { return factors_; }
    [[nodiscard]] double evaluate(const Assignment& e) const;
    /// True when every symbol appears an even number of times (value is in [0,1]).
    [[nodiscard]] bool evenPowers() const noexcept;

    friend Monomial operator*(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial&, const Monomial&) = default;
    friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

  private:
    std::vector<SymbolId> factors_;
};

/// Polynomial in error symbols: `center + sum coef * monomial`.
///
/// Terms are kept sorted with no duplicates and no (near) zero coefficients.
/// A form of degree <= 1 is an affine form; all zonotope operations that need
/// linear input check `isAffine()`.
class PolyForm {
  public:
    using Term = std::pair<Monomial, double>;

    PolyForm() = default;
    // Implicit so that Eigen can build Scalar(0) / Scalar(1) and cast real matrices.
    PolyForm(double center) : center_(center) {} // NOLINT(google-explicit-constructor)

    [[nodiscard]] static PolyForm symbol(const SymbolRegistry& registry, SymbolId id, double coef = 1.0);
    [[nodiscard]] static PolyForm fromTerms(double center, std::vector<Term> terms, std::uint32_t tag);

    [[nodiscard]] double center() const noexcept { return center_; }
    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::uint32_t tag() const noexcept { return tag_; }
    [[nodiscard]] std::size_t degree() const noexcept;
    [[nodiscard]] bool isConstant() const noexcept { return terms_.empty(); }
    [[nodiscard]] bool isAffine() const noexcept { return degree() <= 1; }
    [[nodiscard]] bool isZero() const noexcept { return terms_.empty() && center_ == 0.0; }

    [[nodiscard]] double coefficient(const Monomial& m) const;
    [[nodiscard]] double coefficient(SymbolId id) const { return coefficient(Monomial(id)); }
    /// Sum of absolute term coefficients (the center is not included).
    [[nodiscard]] double absCoefficientSum() const noexcept;
    [[nodiscard]] double evaluate(const Assignment& e) const;

    [[nodiscard]] PolyForm withCenter(double c) const;
    [[nodiscard]] std::string toString() const;

    PolyForm& operator+=(const PolyForm& other);
    PolyForm& operator-=(const PolyForm& other);
    PolyForm& operator*=(const PolyForm& other);

    friend PolyForm operator+(const PolyForm& a, const PolyForm& b);
    friend PolyForm operator-(const PolyForm& a, const PolyForm& b);
    friend PolyForm operator*(const PolyForm& a, const PolyForm& b);
    friend PolyForm operator*(double s, const PolyForm& a);
    friend PolyForm operator*(const PolyForm& a, double s) { return s * a; }
    friend PolyForm operator-(const PolyForm& a) { return -1.0 * a; }
    friend PolyForm operator/(const PolyForm& a, const PolyForm& b);

    /// Structural equality (same center, same terms, bitwise coefficients).
    friend bool operator==(const PolyForm& a, const PolyForm& b) {
        return a.center_ == b.center_ && a.terms_ == b.terms_;
    }

  private:
    void prune();

    double center_ = 0.0;
    std::vector<Term> terms_;
    std::uint32_t tag_ = 0;
};

std::ostream& operator<<(std::ostream& os, const PolyForm& f);

/// Exact transformers with registry checking.
PolyForm addForms(const PolyForm& a, const PolyForm& b);
PolyForm mulForms(const PolyForm& a, const PolyForm& b);

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using ZVector = DenseVector<PolyForm>;
using ZMatrix = DenseMatrix<PolyForm>;

// Eigen's generic math hooks.
inline const PolyForm& conj(const PolyForm& x) { return x; }
inline const PolyForm& real(const PolyForm& x) { return x; }
inline PolyForm imag(const PolyForm&) { return PolyForm(0.0); }
inline PolyForm abs2(const PolyForm& x) { return x * x; }

} // namespace zonoridge

namespace Eigen {

template <>
struct NumTraits<zonoridge::PolyForm> : GenericNumTraits<double> {
    using Real = zonoridge::PolyForm;
    using NonInteger = zonoridge::PolyForm;
    using Nested = zonoridge::PolyForm;
    using Literal = zonoridge::PolyForm;

    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 4,
        AddCost = 16,
        MulCost = 64
    };
};

template <>
struct ScalarBinaryOpTraits<zonoridge::PolyForm, double, internal::scalar_product_op<zonoridge::PolyForm, double>> {
    using ReturnType = zonoridge::PolyForm;
};
template <>
struct ScalarBinaryOpTraits<double, zonoridge::PolyForm, internal::scalar_product_op<double, zonoridge::PolyForm>> {
    using ReturnType = zonoridge::PolyForm;
};

} // namespace Eigen
