// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace zonoridge {

/// Shortest decimal text that reads back to the same double.
std::string formatNumber(double v);

/// Builds comma-separated text with a fixed header and deterministic number
/// formatting.
class CsvWriter {
  public:
    using Cell = std::variant<double, std::int64_t, std::string>;

    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& row(const std::vector<Cell>& cells);
    [[nodiscard]] const std::string& str() const noexcept { return text_; }
    void save(const std::filesystem::path& path) const;

  private:
    std::size_t columns_;
    std::string text_;
};

/// Writes `text` to `path`, creating parent directories.
void writeTextFile(const std::filesystem::path& path, std::string_view text);

} // namespace zonoridge
