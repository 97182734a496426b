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

#ifndef DRESSQ_TOOLS_TABLE_H
#define DRESSQ_TOOLS_TABLE_H

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dressq::experiment {

inline constexpr int kCsvSchema = 1;

/// Column-major numeric table written as CSV.
class Table {
   public:
    Table() = default;
    explicit Table(std::vector<std::string> header);
    /// Table whose first column holds text labels.
    Table(std::string label_header, std::vector<std::string> header);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }

    void add_row(std::span<const double> values);
    void add_row(std::initializer_list<double> values) { add_row(std::span<const double>(values.begin(), values.size())); }
    void add_row(std::string label, std::initializer_list<double> values);

    const std::vector<std::string>& labels() const { return labels_; }

    /// Throws std::out_of_range for an unknown column.
    const std::vector<double>& column(const std::string& name) const;
    bool has_column(const std::string& name) const;

    /// Writes `# schema=1`, the header line, then one line per row with
    /// round-trip precision. NaN is written as "nan".
    void write_csv(const std::filesystem::path& path) const;

   private:
    void append(std::span<const double> values);

    std::string label_header_;
    std::vector<std::string> labels_;
    std::vector<std::string> header_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace dressq::experiment

#endif  // DRESSQ_TOOLS_TABLE_H
