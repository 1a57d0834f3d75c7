// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "zonoridge/symbol.hpp"

#include <atomic>

#include "zonoridge/errors.hpp"

namespace zonoridge {

namespace {
std::atomic<std::uint32_t> next_registry_tag{1};
}

SymbolRegistry::SymbolRegistry() : tag_(next_registry_tag.fetch_add(1, std::memory_order_relaxed)) {}

SymbolId SymbolRegistry::allocate(SymbolKind kind) {
    std::lock_guard lock(mutex_);
    kinds_.push_back(kind);
    return static_cast<SymbolId>(kinds_.size() - 1);
}

SymbolId SymbolRegistry::newFreshRange(std::size_t count) {
    std::lock_guard lock(mutex_);
    const auto first = static_cast<SymbolId>(kinds_.size());
    kinds_.insert(kinds_.end(), count, SymbolKind::FreshSymbol);
    return first;
}

SymbolKind SymbolRegistry::kind(SymbolId id) const {
    std::lock_guard lock(mutex_);
    if (id >= kinds_.size()) {
        throw Error("unknown error symbol e" + std::to_string(id));
    }
    return kinds_[id];
}

std::size_t SymbolRegistry::size() const {
    std::lock_guard lock(mutex_);
    return kinds_.size();
}

} // namespace zonoridge
