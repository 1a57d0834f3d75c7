// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "zonoridge/csv.hpp"

#include <charconv>
#include <fstream>

#include "zonoridge/errors.hpp"

namespace zonoridge {

std::string formatNumber(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, end};
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        text_ += (i == 0 ? "" : ",") + header[i];
    }
    text_ += '\n';
}

CsvWriter& CsvWriter::row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_) {
        throw ShapeMismatch("CsvWriter: expected " + std::to_string(columns_) + " cells, got " +
                            std::to_string(cells.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i != 0) {
            text_ += ',';
        }
        if (const auto* d = std::get_if<double>(&cells[i])) {
            text_ += formatNumber(*d);
        } else if (const auto* n = std::get_if<std::int64_t>(&cells[i])) {
            text_ += std::to_string(*n);
        } else {
            text_ += std::get<std::string>(cells[i]);
        }
    }
    text_ += '\n';
    return *this;
}

void CsvWriter::save(const std::filesystem::path& path) const { writeTextFile(path, text_); }

void writeTextFile(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << text;
}

} // namespace zonoridge
