// dper: estimate means and covariances from data with missing entries.
//
//   dper estimate --input data.csv [--label-col y] [--regime multi-equal] [--output out.json]
//   dper mask     --input full.csv --rate 0.5 --seed 7 --output masked.csv [--label-col y]
//   dper bench    --config bench.json --output-dir results/
//   dper validate --input data.csv [--label-col y]
//
// Exit codes: 0 ok, 1 usage or data error, 2 internal error. Errors are a
// single JSON line on stderr.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dper/bench.hpp"
#include "dper/csv.hpp"
#include "dper/estimators.hpp"
#include "dper/report.hpp"
#include "dper/simulation.hpp"

namespace {

struct CliFailure {
    nlohmann::json error;
};

void emit_error(const nlohmann::json& err) { std::cerr << err.dump() << std::endl; }

nlohmann::json describe(const dper::Error& e, const dper::CsvTable* table) {
    nlohmann::json j{{"error", e.kind()}, {"message", e.what()}};
    auto feature_name = [&](std::int64_t f) -> nlohmann::json {
        if (table && f >= 0 && static_cast<std::size_t>(f) < table->feature_names.size())
            return table->feature_names[static_cast<std::size_t>(f)];
        return f;
    };
    auto class_name = [&](std::int64_t g) -> nlohmann::json {
        if (table && g >= 0 && static_cast<std::size_t>(g) < table->class_names.size())
            return table->class_names[static_cast<std::size_t>(g)];
        return g;
    };
    if (const auto* no = dynamic_cast<const dper::NoObservedData*>(&e)) {
        j["feature"] = feature_name(no->feature());
        if (no->class_id()) j["class"] = class_name(*no->class_id());
    } else if (const auto* mi = dynamic_cast<const dper::MaskInfeasible*>(&e)) {
        j["feature"] = feature_name(mi->feature());
        j["class"] = class_name(mi->class_id());
    } else if (const auto* pe = dynamic_cast<const dper::ParseError*>(&e)) {
        j["line"] = pe->line();
        j["column"] = pe->column();
    } else if (const auto* ml = dynamic_cast<const dper::MissingLabel*>(&e)) {
        j["line"] = ml->line();
    }
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dper::InvalidArgument("cannot write '" + path + "'");
    out << text;
}

dper::CsvTable read_table(const std::string& input, const std::string& label_col,
                          const std::vector<std::string>& missing_tokens) {
    dper::CsvOptions opts;
    if (!label_col.empty()) opts.label_column = label_col;
    if (!missing_tokens.empty()) opts.missing_tokens = missing_tokens;
    return dper::parse_csv(input, opts);
}

struct EstimateArgs {
    std::string input;
    std::string label_col;
    std::string regime = "single";
    bool psd_repair = false;
    unsigned threads = 0;
    std::string output;
    std::vector<std::string> missing_tokens;
};

int run_estimate(const EstimateArgs& a) {
    const auto table = read_table(a.input, a.label_col, a.missing_tokens);
    try {
        const auto regime = dper::parse_regime(a.regime);
        if (regime != dper::Regime::single && !table.labeled())
            throw dper::InvalidArgument("regime " + a.regime + " needs --label-col");
        dper::EstimatorOptions opts;
        opts.psd_repair = a.psd_repair;
        opts.threads = a.threads;
        const auto start = std::chrono::steady_clock::now();
        const auto result = dper::dper_estimate(table.dataset(), regime, opts);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        auto doc = dper::to_json(result, {table.feature_names, table.class_names});
        doc["input"] = {{"path", a.input},
                        {"rows", table.data.rows()},
                        {"features", table.data.cols()},
                        {"missing_cells", table.data.missing_count()}};
        doc["timing"] = {{"estimate_seconds", seconds}, {"threads", dper::resolve_threads(a.threads)}};
        write_text(a.output, doc.dump(2) + "\n");
        return 0;
    } catch (const dper::Error& e) {
        throw CliFailure{describe(e, &table)};
    }
}

struct MaskArgs {
    std::string input;
    std::string label_col;
    double rate = 0;
    std::uint64_t seed = 0;
    std::string output;
};

int run_mask(const MaskArgs& a) {
    auto table = read_table(a.input, a.label_col, {});
    try {
        const auto ds = table.dataset();
        const auto masked = dper::apply_mcar(ds.data(), dper::MaskSpec{a.rate, a.seed},
                                             std::span<const dper::RowSet>(ds.class_rows()));
        dper::CsvTable out{table.feature_names, masked, table.label_column, table.labels, table.class_names};
        std::ostringstream text;
        dper::write_csv(text, out);
        write_text(a.output, text.str());
        return 0;
    } catch (const dper::Error& e) {
        throw CliFailure{describe(e, &table)};
    }
}

struct BenchArgs {
    std::string config;
    std::string output_dir;
    std::optional<unsigned> threads;
};

int run_bench(const BenchArgs& a) {
    auto cfg = dper::load_bench_config(a.config);
    if (a.threads) cfg.threads = *a.threads;
    const auto report = dper::run_benchmark(cfg);

    std::filesystem::create_directories(a.output_dir);
    const std::filesystem::path dir(a.output_dir);
    {
        std::ofstream out(dir / "report.csv", std::ios::binary);
        dper::write_report_csv(out, report);
    }
    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        out << dper::report_to_json(report).dump(2) << '\n';
    }
    {
        std::ofstream out(dir / "tables.txt", std::ios::binary);
        dper::write_tables(out, report);
    }
    {
        std::ofstream out(dir / "timings.csv", std::ios::binary);
        dper::write_timings_csv(out, report);
    }
    dper::write_tables(std::cout, report);
    return 0;
}

int run_validate(const std::string& input, const std::string& label_col) {
    const auto table = read_table(input, label_col, {});
    nlohmann::json features = nlohmann::json::array();
    for (const auto& d : dper::validate(table.data)) {
        features.push_back({{"feature", table.feature_names[static_cast<std::size_t>(d.feature)]},
                            {"observed", d.observed},
                            {"constant", d.constant},
                            {"fully_missing", d.fully_missing}});
    }
    nlohmann::json doc{{"rows", table.data.rows()}, {"features", features}};
    if (table.labeled()) doc["classes"] = table.class_names;
    std::cout << doc.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Direct maximum-likelihood estimation of means and covariances with missing entries"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* cmd_est = app.add_subcommand("estimate", "Estimate means and covariance matrices");
    cmd_est->add_option("--input", est.input, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    cmd_est->add_option("--label-col", est.label_col, "Name of the class label column");
    cmd_est->add_option("--regime", est.regime, "single | multi-unequal | multi-equal")
        ->check(CLI::IsMember({"single", "multi-unequal", "multi-equal", "multi_unequal", "multi_equal"}));
    cmd_est->add_flag("--psd-repair", est.psd_repair, "Clip negative eigenvalues of the covariance estimate");
    cmd_est->add_option("--threads", est.threads, "Worker threads (0 = all cores)");
    cmd_est->add_option("--output", est.output, "Output JSON path (default stdout)");
    cmd_est->add_option("--missing-token", est.missing_tokens, "Field text meaning missing (repeatable)");

    MaskArgs mask;
    auto* cmd_mask = app.add_subcommand("mask", "Apply MCAR missingness to a complete CSV");
    cmd_mask->add_option("--input", mask.input, "Complete CSV file")->required()->check(CLI::ExistingFile);
    cmd_mask->add_option("--rate", mask.rate, "Missing probability per cell")->required()->check(CLI::Range(0.0, 1.0));
    cmd_mask->add_option("--seed", mask.seed, "Mask seed");
    cmd_mask->add_option("--output", mask.output, "Output CSV path (default stdout)");
    cmd_mask->add_option("--label-col", mask.label_col, "Label column, kept intact and used per class");

    BenchArgs bench;
    unsigned bench_threads = 0;
    auto* cmd_bench = app.add_subcommand("bench", "Run a benchmark sweep from a JSON config");
    cmd_bench->add_option("--config", bench.config, "Benchmark config (JSON)")->required()->check(CLI::ExistingFile);
    cmd_bench->add_option("--output-dir", bench.output_dir, "Directory for report files")->required();
    auto* bench_threads_opt = cmd_bench->add_option("--threads", bench_threads, "Override config threads");

    std::string val_input, val_label;
    auto* cmd_val = app.add_subcommand("validate", "Per-feature observed counts and constant/missing flags");
    cmd_val->add_option("--input", val_input, "CSV file")->required()->check(CLI::ExistingFile);
    cmd_val->add_option("--label-col", val_label, "Label column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error({{"error", "UsageError"}, {"message", e.what()}});
        return 1;
    }

    try {
        if (*cmd_est) return run_estimate(est);
        if (*cmd_mask) return run_mask(mask);
        if (*cmd_bench) {
            if (*bench_threads_opt) bench.threads = bench_threads;
            return run_bench(bench);
        }
        if (*cmd_val) return run_validate(val_input, val_label);
    } catch (const CliFailure& f) {
        emit_error(f.error);
        return 1;
    } catch (const dper::Error& e) {
        emit_error(describe(e, nullptr));
        return 1;
    } catch (const std::exception& e) {
        emit_error({{"error", "InternalError"}, {"message", e.what()}});
        return 2;
    }
    return 1;
}
