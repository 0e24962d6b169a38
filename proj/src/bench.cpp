#include "dper/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "dper/baselines.hpp"
#include "dper/csv.hpp"
#include "dper/estimators.hpp"

namespace dper {

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::dper: return "dper";
        case Method::listwise: return "listwise";
        case Method::mean_impute: return "mean-impute";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "dper") return Method::dper;
    if (name == "listwise") return Method::listwise;
    if (name == "mean-impute" || name == "mean_impute") return Method::mean_impute;
    throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

Regime parse_regime(std::string_view name) {
    if (name == "single") return Regime::single;
    if (name == "multi-unequal" || name == "multi_unequal") return Regime::multi_unequal;
    if (name == "multi-equal" || name == "multi_equal") return Regime::multi_equal;
    throw InvalidArgument("unknown regime '" + std::string(name) + "'");
}

BenchConfig parse_bench_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    try {
        BenchConfig cfg;
        for (const auto& d : doc.at("datasets")) {
            DatasetSource src;
            src.name = d.at("name").get<std::string>();
            if (d.contains("path")) {
                std::filesystem::path p = d.at("path").get<std::string>();
                src.path = p.is_relative() ? base_dir / p : p;
                if (d.contains("label_column")) src.label_column = d.at("label_column").get<std::string>();
            } else if (d.contains("synthetic")) {
                const auto& s = d.at("synthetic");
                SyntheticSource syn;
                syn.n_per_class = s.value("n_per_class", syn.n_per_class);
                syn.p = s.value("p", syn.p);
                syn.classes = s.value("classes", syn.classes);
                syn.shared_covariance = s.value("shared_covariance", syn.shared_covariance);
                syn.seed = s.value("seed", syn.seed);
                src.synthetic = syn;
            } else {
                throw InvalidArgument("dataset '" + src.name + "' needs a path or a synthetic block");
            }
            cfg.datasets.push_back(std::move(src));
        }
        cfg.rates = doc.at("rates").get<std::vector<double>>();
        cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        if (doc.contains("methods")) {
            cfg.methods.clear();
            for (const auto& m : doc.at("methods")) cfg.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (doc.contains("regime")) cfg.regime = parse_regime(doc.at("regime").get<std::string>());
        cfg.time_budget_s = doc.value("time_budget_s", cfg.time_budget_s);
        cfg.psd_repair = doc.value("psd_repair", cfg.psd_repair);
        cfg.normalize = doc.value("normalize", cfg.normalize);
        cfg.threads = doc.value("threads", cfg.threads);
        for (double r : cfg.rates)
            if (!(r >= 0 && r < 1)) throw InvalidArgument("rates must lie in [0, 1)");
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad bench config: ") + e.what());
    }
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad bench config: ") + e.what());
    }
    return parse_bench_config(doc, path.parent_path());
}

LabeledDatasetd load_dataset(const DatasetSource& source, bool normalize) {
    LabeledDatasetd dataset = [&] {
        if (source.synthetic) {
            const auto& s = *source.synthetic;
            const auto params = random_gaussian_parameters<double>(s.p, s.classes, s.shared_covariance, s.seed);
            return sample_gaussian_classes(params, s.n_per_class, s.seed + 1);
        }
        CsvOptions opts;
        opts.label_column = source.label_column;
        return parse_csv(source.path->string(), opts).dataset();
    }();
    if (!dataset.data().complete())
        throw InvalidArgument("dataset '" + source.name + "' must be complete before simulation");
    if (!normalize) return dataset;
    return dataset.with_data(MaskedMatrixd(standardize(dataset.data().values())));
}

namespace {

EstimationResultd run_method(Method method, const LabeledDatasetd& data, const BenchConfig& cfg,
                             std::chrono::steady_clock::time_point deadline) {
    switch (method) {
        case Method::dper: {
            EstimatorOptions opts;
            opts.psd_repair = cfg.psd_repair;
            opts.threads = cfg.threads;
            opts.deadline = deadline;
            return dper_estimate(data, cfg.regime, opts);
        }
        case Method::listwise: return listwise_deletion_estimate(data, cfg.regime);
        case Method::mean_impute: return mean_impute_estimate(data, cfg.regime);
    }
    throw InvalidArgument("unknown method");
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg) {
    using clock = std::chrono::steady_clock;
    BenchReport report;
    auto na_row = [&](const std::string& ds, double rate, std::uint64_t seed, Method m, std::string note) {
        BenchRow row{ds, rate, seed, std::string(to_string(m)), cfg.regime, std::nullopt, 0, std::move(note)};
        report.rows.push_back(std::move(row));
    };

    for (const auto& src : cfg.datasets) {
        std::optional<LabeledDatasetd> complete;
        std::optional<EstimationResultd> truth;
        std::string load_error;
        try {
            complete = load_dataset(src, cfg.normalize);
            truth = truth_parameters(*complete, cfg.regime);
        } catch (const Error& e) {
            load_error = e.kind();
        }
        for (double rate : cfg.rates) {
            for (std::uint64_t seed : cfg.seeds) {
                if (!complete) {
                    for (Method m : cfg.methods) na_row(src.name, rate, seed, m, load_error);
                    continue;
                }
                std::optional<LabeledDatasetd> masked;
                try {
                    masked = apply_mcar(*complete, MaskSpec{rate, seed});
                } catch (const Error& e) {
                    for (Method m : cfg.methods) na_row(src.name, rate, seed, m, e.kind());
                    continue;
                }
                for (Method m : cfg.methods) {
                    const auto start = clock::now();
                    const auto budget = std::chrono::duration_cast<clock::duration>(
                        std::chrono::duration<double>(cfg.time_budget_s));
                    BenchRow row{src.name, rate, seed, std::string(to_string(m)), cfg.regime, std::nullopt, 0, ""};
                    try {
                        const auto est = run_method(m, *masked, cfg, start + budget);
                        row.runtime_s = std::chrono::duration<double>(clock::now() - start).count();
                        if (row.runtime_s > cfg.time_budget_s) row.note = TimeBudgetExceeded().kind();
                        else row.r = metric_r(*truth, est).r;
                    } catch (const Error& e) {
                        row.runtime_s = std::chrono::duration<double>(clock::now() - start).count();
                        row.note = e.kind();
                    }
                    report.rows.push_back(std::move(row));
                }
            }
        }
    }
    return report;
}

std::optional<double> mean_r(const BenchReport& report, const std::string& dataset, double rate, Method method) {
    const auto name = to_string(method);
    double sum = 0;
    int count = 0;
    for (const auto& row : report.rows) {
        if (row.dataset != dataset || row.rate != rate || row.method != name) continue;
        if (!row.r) return std::nullopt;
        sum += *row.r;
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

void write_report_csv(std::ostream& out, const BenchReport& report) {
    out << "dataset,rate,seed,method,regime,r,note\n";
    for (const auto& row : report.rows) {
        out << row.dataset << ',' << format_double(row.rate) << ',' << row.seed << ',' << row.method << ','
            << to_string(row.regime) << ',' << (row.r ? format_double(*row.r) : std::string("NA")) << ','
            << row.note << '\n';
    }
}

nlohmann::json report_to_json(const BenchReport& report) {
    auto rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json j;
        j["dataset"] = row.dataset;
        j["rate"] = row.rate;
        j["seed"] = row.seed;
        j["method"] = row.method;
        j["regime"] = std::string(to_string(row.regime));
        if (row.r) j["r"] = *row.r;
        else j["r"] = nullptr;
        j["note"] = row.note;
        rows.push_back(std::move(j));
    }
    return {{"rows", rows}};
}

void write_timings_csv(std::ostream& out, const BenchReport& report) {
    out << "dataset,rate,seed,method,runtime_s\n";
    for (const auto& row : report.rows)
        out << row.dataset << ',' << format_double(row.rate) << ',' << row.seed << ',' << row.method << ','
            << format_double(row.runtime_s) << '\n';
}

void write_tables(std::ostream& out, const BenchReport& report) {
    std::vector<std::string> datasets, methods;
    std::vector<double> rates;
    auto add_unique = [](auto& v, const auto& x) {
        if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    };
    for (const auto& row : report.rows) {
        add_unique(datasets, row.dataset);
        add_unique(methods, row.method);
        add_unique(rates, row.rate);
    }
    char buf[64];
    for (const auto& ds : datasets) {
        std::string regime;
        for (const auto& row : report.rows)
            if (row.dataset == ds) regime = std::string(to_string(row.regime));
        out << "dataset " << ds << " (" << regime << ")\n";
        std::snprintf(buf, sizeof buf, "%-8s", "rate");
        out << buf;
        for (const auto& m : methods) {
            std::snprintf(buf, sizeof buf, " %12s", m.c_str());
            out << buf;
        }
        out << '\n';
        for (double rate : rates) {
            char pct[32];
            std::snprintf(pct, sizeof pct, "%g%%", std::round(rate * 1000) / 10);
            std::snprintf(buf, sizeof buf, "%-8s", pct);
            out << buf;
            for (const auto& m : methods) {
                const auto v = mean_r(report, ds, rate, parse_method(m));
                if (v) std::snprintf(buf, sizeof buf, " %12.4f", *v);
                else std::snprintf(buf, sizeof buf, " %12s", "NA");
                out << buf;
            }
            out << '\n';
        }
        out << '\n';
    }
}

}  // namespace dper
