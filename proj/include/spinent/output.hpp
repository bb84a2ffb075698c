// Copyright 2026 The spinent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// output.hpp: CSV formatting, SHA-256 digests and atomic-ish output sets.
//
// Numbers are printed with 17 significant digits, rows end in '\n', so equal
// inputs produce byte-identical files.

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <openssl/evp.h>

#include "spinent/errors.hpp"

namespace spinent {

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvTable {
public:
    using Cell = std::variant<double, long long, std::string>;

    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<Cell> row) {
        if (row.size() != header_.size()) throw DimensionMismatch("CSV row width does not match header");
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& header() const { return header_; }
    std::size_t size() const { return rows_.size(); }

    std::string str() const {
        std::string out;
        append_line(out, header_);
        for (const auto& row : rows_) {
            std::vector<std::string> cells;
            cells.reserve(row.size());
            for (const auto& c : row) {
                if (const auto* d = std::get_if<double>(&c)) {
                    cells.push_back(format_number(*d));
                } else if (const auto* i = std::get_if<long long>(&c)) {
                    cells.push_back(std::to_string(*i));
                } else {
                    cells.push_back(std::get<std::string>(c));
                }
            }
            append_line(out, cells);
        }
        return out;
    }

private:
    static void append_line(std::string& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    }
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Tracks files written for one run and removes them unless committed.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;
    ~OutputSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : written_) std::filesystem::remove(p, ec);
    }

    struct Written {
        std::string name;
        std::string sha256;
        std::uintmax_t bytes = 0;
    };

    Written write(const std::string& name, const std::string& content) {
        std::filesystem::create_directories(dir_);
        const auto path = dir_ / name;
        {
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            if (!f) throw Error("cannot write " + path.string());
            written_.push_back(path);
            f << content;
            if (!f) throw Error("write failed for " + path.string());
        }
        return {name, sha256_hex(content), static_cast<std::uintmax_t>(content.size())};
    }

    // Re-reads each file and compares digests.
    void verify(const std::vector<Written>& files) const {
        for (const auto& w : files) {
            if (sha256_hex(read_file(dir_ / w.name)) != w.sha256) {
                throw Error("digest mismatch for " + w.name);
            }
        }
    }

    void commit() { committed_ = true; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
    bool committed_ = false;
};

}  // namespace spinent
