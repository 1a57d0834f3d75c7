// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

namespace zonoridge {

using SymbolId = std::uint32_t;

enum class SymbolKind : std::uint8_t { DataSymbol, FreshSymbol };

/// Hands out error-symbol ids and remembers whether each one came from the
/// dataset abstraction or from linearization / order reduction.
///
/// Every registry carries a process-unique tag; forms remember the tag of the
/// registry their symbols came from so that mixing registries is detected.
class SymbolRegistry {
  public:
    SymbolRegistry();
    SymbolRegistry(const SymbolRegistry&) = delete;
    SymbolRegistry& operator=(const SymbolRegistry&) = delete;

    [[nodiscard]] static std::shared_ptr<SymbolRegistry> create() { return std::make_shared<SymbolRegistry>(); }

    SymbolId newData() { return allocate(SymbolKind::DataSymbol); }
    SymbolId newFresh() { return allocate(SymbolKind::FreshSymbol); }
    /// Allocates `count` consecutive fresh ids and returns the first one.
    SymbolId newFreshRange(std::size_t count);

    [[nodiscard]] SymbolKind kind(SymbolId id) const;
    [[nodiscard]] bool isData(SymbolId id) const { return kind(id) == SymbolKind::DataSymbol; }
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::uint32_t tag() const noexcept { return tag_; }

  private:
    SymbolId allocate(SymbolKind kind);

    std::uint32_t tag_;
    mutable std::mutex mutex_;
    std::vector<SymbolKind> kinds_;
};

using RegistryPtr = std::shared_ptr<SymbolRegistry>;

} // namespace zonoridge
