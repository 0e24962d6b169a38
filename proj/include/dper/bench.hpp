#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dper/core.hpp"
#include "dper/simulation.hpp"

namespace dper {

struct SyntheticSource {
    Index n_per_class = 100;
    Index p = 5;
    int classes = 1;
    bool shared_covariance = true;
    std::uint64_t seed = 1;
};

/// A benchmark dataset: either a CSV file (with label column) or a
/// generated Gaussian mixture.
struct DatasetSource {
    std::string name;
    std::optional<std::filesystem::path> path;
    std::optional<std::string> label_column;
    std::optional<SyntheticSource> synthetic;
};

enum class Method { dper, listwise, mean_impute };

[[nodiscard]] std::string_view to_string(Method m) noexcept;
[[nodiscard]] Method parse_method(std::string_view name);
[[nodiscard]] Regime parse_regime(std::string_view name);

struct BenchConfig {
    std::vector<DatasetSource> datasets;
    std::vector<double> rates;
    std::vector<std::uint64_t> seeds;
    std::vector<Method> methods{Method::dper};
    Regime regime = Regime::multi_equal;
    double time_budget_s = 300;
    bool psd_repair = false;
    bool normalize = true;
    unsigned threads = 0;
};

/// Reads a JSON config. Relative dataset paths resolve against `base_dir`.
[[nodiscard]] BenchConfig parse_bench_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
[[nodiscard]] BenchConfig load_bench_config(const std::filesystem::path& path);

/// Complete (normalised, when configured) labelled data for a source.
[[nodiscard]] LabeledDatasetd load_dataset(const DatasetSource& source, bool normalize);

/// Every (dataset, rate, seed, method) combination in config order. One mask
/// per (dataset, rate, seed) is shared by all methods. Failures, including
/// running past the time budget, become NA rows.
[[nodiscard]] BenchReport run_benchmark(const BenchConfig& config);

/// Mean r over seeds for one table cell; empty when any seed is NA.
[[nodiscard]] std::optional<double> mean_r(const BenchReport& report, const std::string& dataset, double rate,
                                           Method method);

/// dataset,rate,seed,method,regime,r,note. No timings, so reruns are
/// byte-identical.
void write_report_csv(std::ostream& out, const BenchReport& report);
[[nodiscard]] nlohmann::json report_to_json(const BenchReport& report);
void write_timings_csv(std::ostream& out, const BenchReport& report);
/// Per dataset: one line per rate, one column per method, mean r over seeds.
void write_tables(std::ostream& out, const BenchReport& report);

}  // namespace dper
