#include "doctest.h"

#include <cmath>
#include <random>

#include "dper/cubic.hpp"
#include "oracles.hpp"

using namespace dper;

namespace {

CubicProblem<double> problem(std::int64_t A, double s11, double s12, double s22, double v11 = 1, double v22 = 1) {
    return {A, s11, s12, s22, v11, v22};
}

double max_abs(const std::array<double, 4>& c) {
    double m = 0;
    for (double x : c) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("eta examples") {
    CHECK(eta(problem(0, 0, 0, 0), 0.4) == 0.0);
    CHECK(eta(problem(0, 0, 0, 0), -0.9) == 0.0);
    CHECK(eta(problem(2, 2, 0, 2), 0.0) == -1.0);

    const auto p = problem(4, 4, 2, 4);
    CHECK(eta(p, 0.3) == doctest::Approx(oracle::eta_literal(p, 0.3)).epsilon(1e-12));

    CHECK_THROWS_AS((void)eta(p, 1.0), DomainError);
    CHECK_THROWS_AS((void)eta(p, -1.5), DomainError);
}

TEST_CASE("eta matches the conditional-normal likelihood of the complete pairs") {
    // -(A/2) log v - sum((x2 - mu2 - beta (x1 - mu1))^2) / (2 v), summed row by row
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal(0, 1);
    const double mu1 = 0.2, mu2 = -0.4, v11 = 1.3, v22 = 0.8;
    std::vector<std::pair<double, double>> rows;
    for (int k = 0; k < 12; ++k) rows.emplace_back(normal(rng), 0.5 * normal(rng));
    CubicProblem<double> p{12, 0, 0, 0, v11, v22};
    for (auto [a, b] : rows) {
        p.s11 += (a - mu1) * (a - mu1);
        p.s12 += (a - mu1) * (b - mu2);
        p.s22 += (b - mu2) * (b - mu2);
    }
    for (double c : {-0.9, -0.2, 0.0, 0.35, 0.99}) {
        const double beta = c / v11;
        const double v = v22 - c * c / v11;
        double ss = 0;
        for (auto [a, b] : rows) {
            const double d = (b - mu2) - beta * (a - mu1);
            ss += d * d;
        }
        const double direct = -6.0 * std::log(v) - ss / (2 * v);
        CHECK(eta(p, c) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("cubic roots examples") {
    SUBCASE("single real root at zero") {
        const auto roots = cubic_roots(problem(2, 2, 0, 2));
        REQUIRE(roots.size() == 1);
        CHECK(std::abs(roots[0]) < 1e-15);
    }
    SUBCASE("A = 0 reduces to a quadratic") {
        const auto p = problem(0, 2, 1, 2);
        const auto roots = cubic_roots(p);
        REQUIRE(roots.size() == 2);
        CHECK(roots[0] == doctest::Approx(2 - std::sqrt(3.0)).epsilon(1e-14));
        CHECK(roots[1] == doctest::Approx(2 + std::sqrt(3.0)).epsilon(1e-14));
        const auto sel = select_sigma12(p, std::optional<double>(0.5));
        REQUIRE(sel.candidates.size() == 1);
        CHECK(sel.chosen == doctest::Approx(2 - std::sqrt(3.0)).epsilon(1e-14));
    }
    SUBCASE("A = 0, s12 = 0 gives the root zero") {
        const auto roots = cubic_roots(problem(0, 2, 0, 3));
        REQUIRE(roots.size() == 1);
        CHECK(roots[0] == 0.0);
    }
    SUBCASE("A = 4 against sign-change bisection") {
        const auto p = problem(4, 4, 2, 4);
        const auto c = stationarity_coefficients(p);
        CHECK(c == std::array<double, 4>{2, -4, 2, -4});
        const auto roots = cubic_roots(p);
        const auto ref = oracle::bisection_roots(c, -3, 3, 1'000'000);
        REQUIRE(roots.size() == ref.size());
        for (std::size_t k = 0; k < roots.size(); ++k) {
            CHECK(std::abs(evaluate_polynomial(c, roots[k])) <= 1e-9 * max_abs(c));
            CHECK(std::abs(roots[k] - ref[k]) <= 1e-9);
        }
    }
    SUBCASE("all-zero coefficients") {
        CHECK_THROWS_AS((void)cubic_roots(problem(0, 0, 0, 0)), DegenerateObjective);
    }
}

TEST_CASE("three distinct real roots are all found") {
    // (x - 0.5)(x + 0.25)(x - 2) scaled by -3
    const std::array<double, 4> c{-0.75, -1.125, 6.75, -3};
    const auto roots = polynomial_roots(c);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(roots[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(roots[2] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("select sigma12 examples") {
    SUBCASE("unique interior root") {
        for (double cd : {-0.7, 0.0, 3.0}) {
            const auto sel = select_sigma12(problem(2, 2, 0, 2), std::optional<double>(cd));
            CHECK(std::abs(sel.chosen) < 1e-15);
            CHECK(sel.fallback == Fallback::none);
        }
    }
    SUBCASE("degenerate objective falls back") {
        const auto p = problem(0, 0, 0, 0);
        const auto sel = select_sigma12(p, std::optional<double>(0.5));
        CHECK(sel.chosen == 0.5);
        CHECK(sel.fallback == Fallback::case_deletion);
        CHECK(sel.degenerate);

        const auto clamped = select_sigma12(p, std::optional<double>(4.0));
        CHECK(clamped.chosen == doctest::Approx(0.999));
        const auto on_bound = select_sigma12(p, std::optional<double>(-1.0));
        CHECK(on_bound.chosen == -1.0);
        const auto none = select_sigma12(p, std::optional<double>());
        CHECK(none.chosen == 0.0);
        CHECK(none.fallback == Fallback::zero);
    }
    SUBCASE("A = 4 against a dense grid") {
        const auto p = problem(4, 4, 2, 4);
        const auto sel = select_sigma12(p, std::optional<double>(0.5));
        const auto grid = oracle::grid_argmax(p, 1'000'000);
        CHECK(sel.fallback == Fallback::none);
        CHECK(std::abs(sel.chosen - grid.argmax) <= 1e-5);
    }
}

TEST_CASE("equal-eta candidates break towards the case-deletion value") {
    // s12 = 0 makes eta even: maxima at +-sqrt(0.8), local minimum at 0
    const auto p = problem(10, 1, 0, 1, 1, 1);
    const auto sel_pos = select_sigma12(p, std::optional<double>(0.3));
    const auto sel_neg = select_sigma12(p, std::optional<double>(-0.3));
    REQUIRE(sel_pos.candidates.size() == 3);
    CHECK(sel_pos.chosen > 0);
    CHECK(sel_neg.chosen < 0);
    CHECK(sel_pos.chosen == doctest::Approx(-sel_neg.chosen).epsilon(1e-12));
}

TEST_CASE("randomised problems: residual, grid argmax, stationarity, boundary, scaling") {
    std::mt19937_64 rng(20240611);
    int checked = 0, a_zero = 0, fallbacks = 0, coarse_fd = 0;
    for (int k = 0; k < 1200; ++k) {
        const std::int64_t A = k < 200 ? 0 : 1 + static_cast<std::int64_t>(rng() % 50);
        const auto p = oracle::random_problem(rng, A);
        const double b = p.bound();
        const auto c = stationarity_coefficients(p);

        const auto roots = cubic_roots(p);
        for (double r : roots) CHECK(std::abs(evaluate_polynomial(c, r)) <= 1e-9 * (1 + max_abs(c)));

        const double cd = A > 0 ? p.s12 / static_cast<double>(A) : 0.0;
        const auto sel = select_sigma12(p, A > 0 ? std::optional<double>(cd) : std::nullopt);
        CHECK(sel.chosen * sel.chosen < p.sigma11 * p.sigma22);
        if (sel.fallback != Fallback::none) {
            ++fallbacks;
            continue;
        }
        ++checked;
        if (A == 0) ++a_zero;

        const auto grid = oracle::grid_argmax(p, 100'000);
        CHECK(std::abs(sel.chosen - grid.argmax) <= 1e-4 * b);
        CHECK(sel.candidates.size() >= 1);

        CHECK(std::abs(oracle::eta_derivative(p, sel.chosen)) <= 1e-7);
        // the difference quotient is only informative where its own
        // truncation error is below the tolerance (not so next to the boundary)
        const auto fd = oracle::eta_central_difference(p, sel.chosen, 1e-6 * b);
        if (fd.error_estimate <= 1e-7) CHECK(std::abs(fd.value) <= 1e-7);
        else ++coarse_fd;

        if (A > 0 && oracle::interior_condition(p)) {
            const double e = eta(p, sel.chosen);
            CHECK(oracle::eta_literal(p, (1 - 1e-6) * b) < e);
            CHECK(oracle::eta_literal(p, -(1 - 1e-6) * b) < e);
        }

        for (double scale : {0.1, 3.0, 17.0}) {
            auto q = p;
            q.sigma11 *= scale * scale;
            q.s11 *= scale * scale;
            q.s12 *= scale;
            const auto scaled = select_sigma12(q, A > 0 ? std::optional<double>(cd * scale) : std::nullopt);
            CHECK(scaled.chosen == doctest::Approx(scale * sel.chosen).epsilon(1e-9).scale(b * scale));
        }
    }
    CHECK(checked >= 1000);
    CHECK(a_zero >= 100);
    MESSAGE("checked ", checked, " problems, ", fallbacks, " fallbacks, ", coarse_fd,
            " with a difference quotient too coarse to judge");
}

TEST_CASE("float instantiation") {
    CubicProblem<float> p{2, 2.f, 0.f, 2.f, 1.f, 1.f};
    const auto sel = select_sigma12(p, std::optional<float>(0.1f));
    CHECK(std::abs(sel.chosen) < 1e-6f);
}
