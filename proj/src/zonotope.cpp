// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "zonoridge/zonotope.hpp"

#include <cmath>
#include <map>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace zonoridge {

bool IntervalBox::contains(const Eigen::VectorXd& x, double tol) const {
    if (x.size() != lo.size()) {
        throw ShapeMismatch("IntervalBox::contains: dimension mismatch");
    }
    return ((x.array() >= lo.array() - tol) && (x.array() <= hi.array() + tol)).all();
}

Interval intervalOf(const PolyForm& f) {
    if (!f.isAffine()) {
        throw DegreeError("intervalOf needs an affine form, got degree " + std::to_string(f.degree()));
    }
    const double r = f.absCoefficientSum();
    return {f.center() - r, f.center() + r};
}

IntervalBox intervalOf(const ZVector& v) {
    IntervalBox box{Eigen::VectorXd(v.size()), Eigen::VectorXd(v.size())};
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Interval iv = intervalOf(v[i]);
        box.lo[i] = iv.lo;
        box.hi[i] = iv.hi;
    }
    return box;
}

ZVector linearize(const ZVector& v, SymbolRegistry& registry) {
    std::map<Monomial, SymbolId> replacement;
    for (const auto& f : v) {
        for (const auto& [m, c] : f.terms()) {
            if (m.degree() >= 2) {
                replacement.emplace(m, 0);
            }
        }
    }
    if (replacement.empty()) {
        return v;
    }
    SymbolId next = registry.newFreshRange(replacement.size());
    for (auto& [m, id] : replacement) {
        id = next++;
    }
    ZVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::vector<PolyForm::Term> terms;
        terms.reserve(v[i].terms().size());
        for (const auto& [m, c] : v[i].terms()) {
            terms.emplace_back(m.degree() >= 2 ? Monomial(replacement.at(m)) : m, c);
        }
        out[i] = PolyForm::fromTerms(v[i].center(), std::move(terms), registry.tag());
    }
    return out;
}

ZVector intervalHull(const ZVector& v, const SymbolSet& selected, SymbolRegistry& registry) {
    if (selected.empty()) {
        return v;
    }
    const SymbolId first = registry.newFreshRange(static_cast<std::size_t>(v.size()));
    ZVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!v[i].isAffine()) {
            throw DegreeError("intervalHull needs affine forms");
        }
        std::vector<PolyForm::Term> kept;
        double merged = 0.0;
        for (const auto& [m, c] : v[i].terms()) {
            if (selected.contains(m.factors().front())) {
                merged += std::abs(c);
            } else {
                kept.emplace_back(m, c);
            }
        }
        kept.emplace_back(Monomial(first + static_cast<SymbolId>(i)), merged);
        out[i] = PolyForm::fromTerms(v[i].center(), std::move(kept), registry.tag());
    }
    return out;
}

ZVector tihReduce(const Eigen::MatrixXd& transform, const ZVector& v, const SymbolSet& selected,
                  SymbolRegistry& registry) {
    if (transform.rows() != transform.cols() || transform.rows() != v.size()) {
        throw ShapeMismatch("tihReduce: transform must be d x d for a d-vector");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(transform);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s.minCoeff() <= 0.0 || s.maxCoeff() / s.minCoeff() > kMaxTransformCondition) {
        throw SingularMatrix("tihReduce: transform is singular or ill-conditioned");
    }
    const ZVector projected = apply(transform, v);
    const ZVector box = intervalHull(projected, selected, registry);
    return apply(Eigen::MatrixXd(transform.inverse()), box);
}

std::vector<ZVector> muSplit(const ZVector& v, std::size_t m, const SymbolRegistry& registry, std::size_t budget) {
    if (m == 0) {
        throw Error("muSplit: m must be positive");
    }
    const SymbolSet split = symbolsOfKind(v, registry, SymbolKind::DataSymbol);
    for (const auto& f : v) {
        if (!f.isAffine()) {
            throw DegreeError("muSplit needs affine forms");
        }
    }
    std::size_t count = 1;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (count > budget / m) {
            throw BudgetExceeded("muSplit: " + std::to_string(m) + "^" + std::to_string(split.size()) +
                                 " parts exceed the budget of " + std::to_string(budget));
        }
        count *= m;
    }
    if (count > budget) {
        throw BudgetExceeded("muSplit: part count exceeds budget");
    }
    if (m == 1 || split.empty()) {
        return {v};
    }

    const std::vector<SymbolId> symbols(split.begin(), split.end());
    const double scale = 1.0 / static_cast<double>(m);
    std::vector<ZVector> parts;
    parts.reserve(count);
    std::vector<std::size_t> index(symbols.size(), 0);
    for (std::size_t p = 0; p < count; ++p) {
        // Center shift for part j (1-based) of symbol s is (2j - m - 1)/m * g_s.
        ZVector part(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            double center = v[i].center();
            std::vector<PolyForm::Term> terms;
            terms.reserve(v[i].terms().size());
            for (const auto& [mono, c] : v[i].terms()) {
                const SymbolId id = mono.factors().front();
                auto it = std::lower_bound(symbols.begin(), symbols.end(), id);
                if (it != symbols.end() && *it == id) {
                    const auto j = static_cast<double>(index[static_cast<std::size_t>(it - symbols.begin())] + 1);
                    center += (2.0 * j - static_cast<double>(m) - 1.0) * scale * c;
                    terms.emplace_back(mono, c * scale);
                } else {
                    terms.emplace_back(mono, c);
                }
            }
            part[i] = PolyForm::fromTerms(center, std::move(terms), v[i].tag());
        }
        parts.push_back(std::move(part));
        for (std::size_t s = 0; s < index.size(); ++s) {
            if (++index[s] < m) {
                break;
            }
            index[s] = 0;
        }
    }
    return parts;
}

ZVector boxJoin(const std::vector<ZVector>& parts, SymbolRegistry& registry) {
    if (parts.empty()) {
        throw Error("boxJoin: empty list");
    }
    const Eigen::Index d = parts.front().size();
    IntervalBox box = intervalOf(parts.front());
    for (std::size_t p = 1; p < parts.size(); ++p) {
        if (parts[p].size() != d) {
            throw ShapeMismatch("boxJoin: parts differ in dimension");
        }
        const IntervalBox b = intervalOf(parts[p]);
        box.lo = box.lo.cwiseMin(b.lo);
        box.hi = box.hi.cwiseMax(b.hi);
    }
    const SymbolId first = registry.newFreshRange(static_cast<std::size_t>(d));
    ZVector out(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double mid = 0.5 * (box.lo[i] + box.hi[i]);
        const double rad = std::max(box.hi[i] - mid, mid - box.lo[i]);
        out[i] = PolyForm(mid) + PolyForm::symbol(registry, first + static_cast<SymbolId>(i), rad);
    }
    return out;
}

double order(const ZVector& v) {
    if (v.size() == 0) {
        return 0.0;
    }
    std::set<Monomial> distinct;
    for (const auto& f : v) {
        for (const auto& [m, c] : f.terms()) {
            distinct.insert(m);
        }
    }
    return static_cast<double>(distinct.size()) / static_cast<double>(v.size());
}

SymbolSet symbolsOfKind(const ZVector& v, const SymbolRegistry& registry, SymbolKind kind) {
    SymbolSet out;
    for (SymbolId id : symbolsOf(v)) {
        if (registry.kind(id) == kind) {
            out.insert(id);
        }
    }
    return out;
}

} // namespace zonoridge
