// Copyright 2026 The dressq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "experiment/table.h"

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace dressq::experiment {

Table::Table(std::vector<std::string> header) : header_(std::move(header)), columns_(header_.size()) {}

Table::Table(std::string label_header, std::vector<std::string> header)
    : label_header_(std::move(label_header)), header_(std::move(header)), columns_(header_.size()) {}

void Table::add_row(std::string label, std::initializer_list<double> values) {
    if (label_header_.empty()) throw std::logic_error("Table::add_row: table has no label column");
    append(std::span<const double>(values.begin(), values.size()));
    labels_.push_back(std::move(label));
}

void Table::add_row(std::span<const double> values) {
    if (!label_header_.empty()) throw std::logic_error("Table::add_row: label missing");
    append(values);
}

void Table::append(std::span<const double> values) {
    if (values.size() != header_.size()) throw std::invalid_argument("Table::add_row: wrong column count");
    for (std::size_t i = 0; i < values.size(); ++i) columns_[i].push_back(values[i]);
}

bool Table::has_column(const std::string& name) const {
    for (const auto& h : header_) {
        if (h == name) return true;
    }
    return false;
}

const std::vector<double>& Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return columns_[i];
    }
    throw std::out_of_range("no column '" + name + "'");
}

void Table::write_csv(const std::filesystem::path& path) const {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    std::fprintf(f.get(), "# schema=%d\n", kCsvSchema);
    const bool labeled = !label_header_.empty();
    if (labeled) std::fputs(label_header_.c_str(), f.get());
    for (std::size_t i = 0; i < header_.size(); ++i) {
        std::fprintf(f.get(), "%s%s", i || labeled ? "," : "", header_[i].c_str());
    }
    std::fputc('\n', f.get());
    for (std::size_t r = 0; r < rows(); ++r) {
        if (labeled) std::fputs(labels_[r].c_str(), f.get());
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            const double v = columns_[i][r];
            if (i || labeled) std::fputc(',', f.get());
            if (std::isnan(v)) {
                std::fputs("nan", f.get());
            } else {
                std::fprintf(f.get(), "%.17g", v);
            }
        }
        std::fputc('\n', f.get());
    }
    if (std::ferror(f.get())) throw std::runtime_error("write error on " + path.string());
}

}  // namespace dressq::experiment
