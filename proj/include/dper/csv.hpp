#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dper/core.hpp"

namespace dper {

struct CsvOptions {
    std::optional<std::string> label_column;
    /// Fields (after trimming blanks) that mean "missing". Any field that
    /// parses to NaN is missing as well.
    std::vector<std::string> missing_tokens{"", "NA", "NaN"};
    char delimiter = ',';
};

/// A parsed table. Labels are present only when a label column was requested;
/// class ids follow first appearance.
struct CsvTable {
    std::vector<std::string> feature_names;
    MaskedMatrixd data;
    std::optional<std::string> label_column;
    std::vector<int> labels;
    std::vector<std::string> class_names;

    [[nodiscard]] bool labeled() const noexcept { return label_column.has_value(); }
    /// Labeled view; a single class when the table has no label column.
    [[nodiscard]] LabeledDatasetd dataset() const;
};

/// Throws ParseError(line, column, reason) or MissingLabel(line); lines and
/// columns are 1-based, the header is line 1.
[[nodiscard]] CsvTable parse_csv_text(std::string_view text, const CsvOptions& opts = {});
[[nodiscard]] CsvTable parse_csv(const std::string& path, const CsvOptions& opts = {});

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] std::string format_double(double value);

/// Header plus one line per row; masked cells are written as empty fields.
/// The label column, when present, comes first.
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

}  // namespace dper
