#include "dper/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace dper {

namespace {

std::string_view trim(std::string_view s) {
    const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && blank(s.front())) s.remove_prefix(1);
    while (!s.empty() && blank(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

bool is_missing(std::string_view field, const std::vector<std::string>& tokens) {
    return std::find(tokens.begin(), tokens.end(), field) != tokens.end();
}

}  // namespace

LabeledDatasetd CsvTable::dataset() const {
    if (!labeled()) return LabeledDatasetd(data);
    return LabeledDatasetd(data, labels, class_names);
}

CsvTable parse_csv_text(std::string_view text, const CsvOptions& opts) {
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto pos = text.find('\n', start);
            if (pos == std::string_view::npos) pos = text.size();
            lines.push_back(text.substr(start, pos - start));
            start = pos + 1;
        }
        while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    }
    if (lines.empty()) throw ParseError(1, 0, "missing header row");

    const auto header = split(lines[0], opts.delimiter);
    std::optional<std::size_t> label_idx;
    std::vector<std::string> features;
    for (std::size_t k = 0; k < header.size(); ++k) {
        const std::string name(trim(header[k]));
        if (opts.label_column && name == *opts.label_column) {
            label_idx = k;
        } else {
            features.push_back(name);
        }
    }
    if (opts.label_column && !label_idx)
        throw ParseError(1, 0, "label column '" + *opts.label_column + "' not found in header");
    if (features.empty()) throw ParseError(1, 0, "no feature columns");

    const auto n = static_cast<Index>(lines.size() - 1);
    if (n == 0) throw ParseError(2, 0, "no data rows");
    const auto p = static_cast<Index>(features.size());
    Matrix<double> values(n, p);
    Mask mask(n, p);
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> class_ids;

    for (Index r = 0; r < n; ++r) {
        const auto line_no = static_cast<std::int64_t>(r + 2);
        const auto fields = split(lines[static_cast<std::size_t>(r + 1)], opts.delimiter);
        if (fields.size() != header.size())
            throw ParseError(line_no, static_cast<std::int64_t>(std::min(fields.size(), header.size()) + 1),
                             "expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
        Index c = 0;
        for (std::size_t k = 0; k < fields.size(); ++k) {
            const auto field = trim(fields[k]);
            if (label_idx && k == *label_idx) {
                if (is_missing(field, opts.missing_tokens)) throw MissingLabel(line_no);
                const std::string name(field);
                auto [it, inserted] = class_ids.emplace(name, static_cast<int>(class_names.size()));
                if (inserted) class_names.push_back(name);
                labels.push_back(it->second);
                continue;
            }
            if (is_missing(field, opts.missing_tokens)) {
                values(r, c) = 0;
                mask(r, c) = false;
            } else {
                double v = 0;
                const auto* first = field.data();
                const auto* last = field.data() + field.size();
                if (!field.empty() && *first == '+') ++first;
                const auto [ptr, ec] = std::from_chars(first, last, v);
                if (ec != std::errc() || ptr != last)
                    throw ParseError(line_no, static_cast<std::int64_t>(k + 1),
                                     "not a number: '" + std::string(field) + "'");
                if (std::isnan(v)) {
                    values(r, c) = 0;
                    mask(r, c) = false;
                } else if (!std::isfinite(v)) {
                    throw ParseError(line_no, static_cast<std::int64_t>(k + 1), "value is not finite");
                } else {
                    values(r, c) = v;
                    mask(r, c) = true;
                }
            }
            ++c;
        }
    }

    CsvTable table{std::move(features), MaskedMatrixd(std::move(values), std::move(mask)), std::nullopt, {}, {}};
    if (label_idx) {
        table.label_column = opts.label_column;
        table.labels = std::move(labels);
        table.class_names = std::move(class_names);
    }
    return table;
}

CsvTable parse_csv(const std::string& path, const CsvOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv_text(buf.str(), opts);
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw InvalidArgument("cannot format value");
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const CsvTable& table) {
    bool first = true;
    auto sep = [&] {
        if (!first) out << ',';
        first = false;
    };
    if (table.labeled()) {
        sep();
        out << *table.label_column;
    }
    for (const auto& name : table.feature_names) {
        sep();
        out << name;
    }
    out << '\n';
    const auto& data = table.data;
    for (Index r = 0; r < data.rows(); ++r) {
        first = true;
        if (table.labeled()) {
            sep();
            out << table.class_names[static_cast<std::size_t>(table.labels[static_cast<std::size_t>(r)])];
        }
        for (Index c = 0; c < data.cols(); ++c) {
            sep();
            if (data.observed(r, c)) out << format_double(data(r, c));
        }
        out << '\n';
    }
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    write_csv(out, table);
}

}  // namespace dper
