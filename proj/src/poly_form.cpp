// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "zonoridge/poly_form.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "zonoridge/csv.hpp"
#include "zonoridge/errors.hpp"

namespace zonoridge {

namespace {

std::uint32_t mergeTags(std::uint32_t a, std::uint32_t b) {
    if (a != 0 && b != 0 && a != b) {
        throw RegistryMismatch();
    }
    return a != 0 ? a : b;
}

// Sorts, merges equal monomials and drops tiny coefficients.
void canonicalize(std::vector<PolyForm::Term>& terms) {
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < terms.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < terms.size() && terms[j].first == terms[i].first) {
            sum += terms[j].second;
            ++j;
        }
        if (std::abs(sum) >= kDropThreshold) {
            if (out != i) {
                terms[out].first = std::move(terms[i].first);
            }
            terms[out].second = sum;
            ++out;
        }
        i = j;
    }
    terms.resize(out);
}

} // namespace

Monomial::Monomial(std::initializer_list<SymbolId> ids) : factors_(ids) { std::sort(factors_.begin(), factors_.end()); }

Monomial::Monomial(std::vector<SymbolId> ids) : factors_(std::move(ids)) {
    std::sort(factors_.begin(), factors_.end());
}

double Monomial::evaluate(const Assignment& e) const {
    double v = 1.0;
    for (SymbolId id : factors_) {
        if (id >= static_cast<std::size_t>(e.size())) {
            throw ShapeMismatch("assignment does not cover symbol e" + std::to_string(id));
        }
        v *= e[id];
    }
    return v;
}

bool Monomial::evenPowers() const noexcept {
    for (std::size_t i = 0; i < factors_.size();) {
        std::size_t j = i;
        while (j < factors_.size() && factors_[j] == factors_[i]) {
            ++j;
        }
        if ((j - i) % 2 != 0) {
            return false;
        }
        i = j;
    }
    return true;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    m.factors_.reserve(a.degree() + b.degree());
    std::merge(a.factors_.begin(), a.factors_.end(), b.factors_.begin(), b.factors_.end(),
               std::back_inserter(m.factors_));
    return m;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) {
        return c;
    }
    return a.factors_ <=> b.factors_;
}

PolyForm PolyForm::symbol(const SymbolRegistry& registry, SymbolId id, double coef) {
    PolyForm f;
    f.tag_ = registry.tag();
    if (std::abs(coef) >= kDropThreshold) {
        f.terms_.emplace_back(Monomial(id), coef);
    }
    return f;
}

PolyForm PolyForm::fromTerms(double center, std::vector<Term> terms, std::uint32_t tag) {
    PolyForm f(center);
    f.tag_ = tag;
    for (const auto& [m, c] : terms) {
        if (m.degree() == 0) {
            throw DegreeError("constant monomials belong in the center");
        }
    }
    f.terms_ = std::move(terms);
    canonicalize(f.terms_);
    return f;
}

std::size_t PolyForm::degree() const noexcept {
    // Sorted by degree, so the last term has the largest one.
    return terms_.empty() ? 0 : terms_.back().first.degree();
}

double PolyForm::coefficient(const Monomial& m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, const Monomial& key) { return t.first < key; });
    return (it != terms_.end() && it->first == m) ? it->second : 0.0;
}

double PolyForm::absCoefficientSum() const noexcept {
    double s = 0.0;
    for (const auto& t : terms_) {
        s += std::abs(t.second);
    }
    return s;
}

double PolyForm::evaluate(const Assignment& e) const {
    double v = center_;
    for (const auto& [m, c] : terms_) {
        v += c * m.evaluate(e);
    }
    return v;
}

PolyForm PolyForm::withCenter(double c) const {
    PolyForm f = *this;
    f.center_ = c;
    return f;
}

std::string PolyForm::toString() const {
    std::string out;
    out += formatNumber(center_);
    for (const auto& [m, c] : terms_) {
        out += " + ";
        out += formatNumber(c);
        for (SymbolId id : m.factors()) {
            out += "*e";
            out += std::to_string(id);
        }
    }
    return out;
}

void PolyForm::prune() {
    std::erase_if(terms_, [](const Term& t) { return std::abs(t.second) < kDropThreshold; });
}

PolyForm& PolyForm::operator+=(const PolyForm& other) {
    *this = *this + other;
    return *this;
}

PolyForm& PolyForm::operator-=(const PolyForm& other) {
    *this = *this - other;
    return *this;
}

PolyForm& PolyForm::operator*=(const PolyForm& other) {
    *this = *this * other;
    return *this;
}

PolyForm operator+(const PolyForm& a, const PolyForm& b) {
    PolyForm r(a.center_ + b.center_);
    r.tag_ = mergeTags(a.tag_, b.tag_);
    if (b.terms_.empty()) {
        r.terms_ = a.terms_;
        return r;
    }
    if (a.terms_.empty()) {
        r.terms_ = b.terms_;
        return r;
    }
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    while (ia != a.terms_.end() || ib != b.terms_.end()) {
        if (ib == b.terms_.end() || (ia != a.terms_.end() && ia->first < ib->first)) {
            r.terms_.push_back(*ia++);
        } else if (ia == a.terms_.end() || ib->first < ia->first) {
            r.terms_.push_back(*ib++);
        } else {
            const double s = ia->second + ib->second;
            if (std::abs(s) >= kDropThreshold) {
                r.terms_.emplace_back(ia->first, s);
            }
            ++ia;
            ++ib;
        }
    }
    return r;
}

PolyForm operator-(const PolyForm& a, const PolyForm& b) { return a + (-1.0 * b); }

PolyForm operator*(double s, const PolyForm& a) {
    PolyForm r(s * a.center_);
    r.tag_ = a.tag_;
    if (s == 0.0) {
        return r;
    }
    r.terms_.reserve(a.terms_.size());
    for (const auto& [m, c] : a.terms_) {
        r.terms_.emplace_back(m, s * c);
    }
    r.prune();
    return r;
}

PolyForm operator*(const PolyForm& a, const PolyForm& b) {
    if (a.terms_.empty()) {
        PolyForm r = a.center_ * b;
        r.tag_ = mergeTags(a.tag_, b.tag_);
        return r;
    }
    if (b.terms_.empty()) {
        PolyForm r = b.center_ * a;
        r.tag_ = mergeTags(a.tag_, b.tag_);
        return r;
    }
    PolyForm r(a.center_ * b.center_);
    r.tag_ = mergeTags(a.tag_, b.tag_);
    auto& out = r.terms_;
    out.reserve(a.terms_.size() * b.terms_.size() + a.terms_.size() + b.terms_.size());
    if (b.center_ != 0.0) {
        for (const auto& [m, c] : a.terms_) {
            out.emplace_back(m, c * b.center_);
        }
    }
    if (a.center_ != 0.0) {
        for (const auto& [m, c] : b.terms_) {
            out.emplace_back(m, c * a.center_);
        }
    }
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            out.emplace_back(ma * mb, ca * cb);
        }
    }
    canonicalize(out);
    return r;
}

PolyForm operator/(const PolyForm& a, const PolyForm& b) {
    if (!b.isConstant() || b.center_ == 0.0) {
        throw DegreeError("division is only defined by a nonzero constant form");
    }
    return (1.0 / b.center_) * a;
}

std::ostream& operator<<(std::ostream& os, const PolyForm& f) { return os << f.toString(); }

PolyForm addForms(const PolyForm& a, const PolyForm& b) { return a + b; }
PolyForm mulForms(const PolyForm& a, const PolyForm& b) { return a * b; }

} // namespace zonoridge
