#include "doctest.h"

#include <sstream>

#include "dper/bench.hpp"

using namespace dper;

namespace {

nlohmann::json iris_config(std::vector<double> rates, std::vector<std::uint64_t> seeds) {
    return {{"datasets", {{{"name", "iris"}, {"path", "iris.csv"}, {"label_column", "class"}}}},
            {"rates", rates},
            {"seeds", seeds},
            {"methods", {"dper", "listwise", "mean-impute"}},
            {"regime", "multi-unequal"}};
}

std::string report_text(const BenchReport& report) {
    std::ostringstream out;
    write_report_csv(out, report);
    return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_bench_config(iris_config({0.2, 0.5}, {1, 2, 3}), DPER_DATA_DIR);
    REQUIRE(cfg.datasets.size() == 1);
    CHECK(cfg.datasets[0].path->filename() == "iris.csv");
    CHECK(cfg.datasets[0].path->parent_path() == DPER_DATA_DIR);
    CHECK(cfg.regime == Regime::multi_unequal);
    CHECK(cfg.methods.size() == 3);
    CHECK(cfg.rates == std::vector<double>{0.2, 0.5});
    CHECK(cfg.time_budget_s == 300);
    CHECK_FALSE(cfg.psd_repair);

    auto bad = iris_config({1.0}, {1});
    CHECK_THROWS_AS((void)parse_bench_config(bad, DPER_DATA_DIR), InvalidArgument);
    auto unknown = iris_config({0.2}, {1});
    unknown["methods"] = {"mice"};
    CHECK_THROWS_AS((void)parse_bench_config(unknown, DPER_DATA_DIR), InvalidArgument);
    CHECK_THROWS_AS((void)parse_bench_config(nlohmann::json{{"rates", {0.2}}}, DPER_DATA_DIR), InvalidArgument);
}

TEST_CASE("rate 0 gives r below 1e-9 for every method") {
    const auto cfg = parse_bench_config(iris_config({0.0}, {1, 2}), DPER_DATA_DIR);
    const auto report = run_benchmark(cfg);
    REQUIRE(report.rows.size() == 6);
    for (const auto& row : report.rows) {
        REQUIRE(row.r.has_value());
        CHECK(*row.r < 1e-9);
    }
}

TEST_CASE("rows come in dataset, rate, seed, method order") {
    const auto cfg = parse_bench_config(iris_config({0.2, 0.35}, {4, 5}), DPER_DATA_DIR);
    const auto report = run_benchmark(cfg);
    REQUIRE(report.rows.size() == 12);
    CHECK(report.rows[0].rate == 0.2);
    CHECK(report.rows[0].seed == 4);
    CHECK(report.rows[0].method == "dper");
    CHECK(report.rows[2].method == "mean-impute");
    CHECK(report.rows[3].seed == 5);
    CHECK(report.rows[6].rate == 0.35);
}

TEST_CASE("reruns and thread counts give identical reports") {
    auto cfg = parse_bench_config(iris_config({0.2, 0.65}, {1, 2, 3}), DPER_DATA_DIR);
    cfg.threads = 1;
    const auto a = report_text(run_benchmark(cfg));
    cfg.threads = 3;
    const auto b = report_text(run_benchmark(cfg));
    CHECK(a == b);
}

TEST_CASE("failures become NA rows without stopping the sweep") {
    nlohmann::json doc = {
        {"datasets",
         {{{"name", "absent"}, {"path", "no_such_file.csv"}, {"label_column", "class"}},
          {{"name", "wide"}, {"synthetic", {{"n_per_class", 30}, {"p", 12}, {"classes", 1}, {"seed", 3}}}}}},
        {"rates", {0.5}},
        {"seeds", {1}},
        {"methods", {"listwise", "dper"}},
        {"regime", "single"}};
    const auto report = run_benchmark(parse_bench_config(doc, DPER_DATA_DIR));
    REQUIRE(report.rows.size() == 4);
    CHECK_FALSE(report.rows[0].r);
    CHECK(report.rows[0].note == "ParseError");
    CHECK_FALSE(report.rows[2].r);
    CHECK(report.rows[2].note == "InsufficientCompleteRows");
    CHECK(report.rows[3].r.has_value());
    CHECK_FALSE(mean_r(report, "wide", 0.5, Method::listwise).has_value());
    CHECK(mean_r(report, "wide", 0.5, Method::dper).has_value());

    const auto text = report_text(report);
    CHECK(text.find("wide,0.5,1,listwise,single,NA,InsufficientCompleteRows") != std::string::npos);
}

TEST_CASE("time budget overrun is recorded as NA") {
    nlohmann::json doc = {{"datasets", {{{"name", "g"}, {"synthetic", {{"n_per_class", 2000}, {"p", 30}}}}}},
                          {"rates", {0.2}},
                          {"seeds", {1}},
                          {"regime", "single"},
                          {"time_budget_s", 0.0}};
    const auto report = run_benchmark(parse_bench_config(doc));
    REQUIRE(report.rows.size() == 1);
    CHECK_FALSE(report.rows[0].r);
    CHECK(report.rows[0].note == "TimeBudgetExceeded");
}

TEST_CASE("tables list one line per rate") {
    const auto cfg = parse_bench_config(iris_config({0.2, 0.35}, {1}), DPER_DATA_DIR);
    std::ostringstream out;
    write_tables(out, run_benchmark(cfg));
    const auto text = out.str();
    CHECK(text.find("dataset iris (multi_unequal)") != std::string::npos);
    CHECK(text.find("\n20%") != std::string::npos);
    CHECK(text.find("\n35%") != std::string::npos);
    CHECK(text.find("mean-impute") != std::string::npos);
}
