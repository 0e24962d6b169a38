#include "doctest.h"

#include <random>

#include "dper/estimators.hpp"
#include "dper/simulation.hpp"

using namespace dper;

TEST_CASE("rate 0 returns the input unchanged") {
    Matrix<double> x = Matrix<double>::Random(20, 3);
    const MaskedMatrixd data(x);
    const auto out = apply_mcar(data, MaskSpec{0.0, 5});
    CHECK(out == data);
    CHECK(out.complete());
}

TEST_CASE("empirical missing fraction over a million cells") {
    const MaskedMatrixd data(Matrix<double>::Zero(10'000, 100));
    const auto out = apply_mcar(data, MaskSpec{0.5, 42});
    const double frac = static_cast<double>(out.missing_count()) / 1e6;
    CHECK(frac > 0.5 - 0.0015);
    CHECK(frac < 0.5 + 0.0015);
}

TEST_CASE("masks are deterministic and depend on the seed") {
    const MaskedMatrixd data(Matrix<double>::Random(300, 7));
    const auto a = apply_mcar(data, MaskSpec{0.35, 3});
    const auto b = apply_mcar(data, MaskSpec{0.35, 3});
    const auto c = apply_mcar(data, MaskSpec{0.35, 4});
    CHECK(a.mask().cwiseEqual(b.mask()).all());
    CHECK_FALSE(a.mask().cwiseEqual(c.mask()).all());
}

TEST_CASE("mask invalid inputs") {
    const MaskedMatrixd data(Matrix<double>::Zero(4, 2));
    CHECK_THROWS_AS((void)apply_mcar(data, MaskSpec{1.0, 0}), InvalidArgument);
    CHECK_THROWS_AS((void)apply_mcar(data, MaskSpec{-0.1, 0}), InvalidArgument);
    const auto holed = apply_mcar(MaskedMatrixd(Matrix<double>::Zero(50, 2)), MaskSpec{0.5, 0});
    CHECK_THROWS_AS((void)apply_mcar(holed, MaskSpec{0.2, 0}), InvalidArgument);
}

TEST_CASE("every class keeps an observed entry per feature") {
    // 2-row classes at 90% missing lose whole blocks on the first draw
    const Index n = 400;
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index r = 0; r < n; ++r) labels[static_cast<std::size_t>(r)] = static_cast<int>(r / 2);
    const LabeledDatasetd ds(MaskedMatrixd(Matrix<double>::Random(n, 3)), labels);
    const auto out = apply_mcar(ds, MaskSpec{0.9, 12});
    for (const auto& rows : out.class_rows())
        for (Index c = 0; c < 3; ++c) {
            bool any = false;
            for (Index r : rows) any = any || out.data().observed(r, c);
            CHECK(any);
        }
    CHECK(out.labels() == ds.labels());
}

TEST_CASE("mask infeasible after repeated redraws") {
    const LabeledDatasetd ds(MaskedMatrixd(Matrix<double>::Zero(1, 2)), std::vector<int>{0});
    try {
        (void)apply_mcar(ds, MaskSpec{0.999999, 1});
        FAIL("expected MaskInfeasible");
    } catch (const MaskInfeasible& e) {
        CHECK(e.feature() == 0);
        CHECK(e.class_id() == 0);
    }
}

TEST_CASE("metric r") {
    EstimationResultd truth;
    truth.regime = Regime::single;
    truth.means = Matrix<double>::Zero(1, 1);
    truth.covariances = {Matrix<double>::Constant(1, 1, 2.0)};

    CHECK(metric_r(truth, truth).r == 0.0);

    auto est = truth;
    est.means(0, 0) = 1;
    const auto m = metric_r(truth, est);
    CHECK(m.r == 1.0);
    CHECK(m.n_mu == 1);
    CHECK(m.n_sigma == 1);

    EstimationResultd wide = truth;
    wide.means = Matrix<double>::Zero(1, 2);
    CHECK_THROWS_AS((void)metric_r(truth, wide), ShapeMismatch);
    EstimationResultd other = truth;
    other.regime = Regime::multi_equal;
    CHECK_THROWS_AS((void)metric_r(truth, other), ShapeMismatch);
}

TEST_CASE("metric r stacks per-class covariances") {
    EstimationResultd truth;
    truth.regime = Regime::multi_unequal;
    truth.means = Matrix<double>::Zero(2, 2);
    truth.covariances = {Matrix<double>::Identity(2, 2), Matrix<double>::Identity(2, 2)};
    auto est = truth;
    est.covariances[1](0, 1) = 3;
    est.covariances[1](1, 0) = 4;
    const auto m = metric_r(truth, est);
    CHECK(m.n_mu == 4);
    CHECK(m.n_sigma == 8);
    CHECK(m.r == doctest::Approx(5.0 / 8));
}

TEST_CASE("metric r is invariant to a consistent feature permutation") {
    const auto params = random_gaussian_parameters<double>(4, 2, true, 2);
    const auto full = sample_gaussian_classes(params, 60, 3);
    const auto masked = apply_mcar(full, MaskSpec{0.3, 7});
    const auto truth = truth_parameters(full, Regime::multi_equal);
    const auto est = dper_multi_equal(masked);

    const std::vector<Index> perm{2, 0, 3, 1};
    const auto truth_p = truth_parameters(full.with_data(full.data().select_cols(perm)), Regime::multi_equal);
    const auto est_p = dper_multi_equal(masked.with_data(masked.data().select_cols(perm)));
    CHECK(metric_r(truth_p, est_p).r == doctest::Approx(metric_r(truth, est).r).epsilon(1e-12));
}

TEST_CASE("standardize gives zero mean and unit uncorrected variance") {
    Matrix<double> x(4, 2);
    x << 1, 5, 2, 5, 3, 5, 6, 5;
    const auto z = standardize(x);
    CHECK(std::abs(z.col(0).mean()) < 1e-15);
    CHECK(z.col(0).squaredNorm() / 4 == doctest::Approx(1.0));
    CHECK(z.col(1).isZero());
}

TEST_CASE("gaussian sampling recovers its parameters") {
    const auto params = random_gaussian_parameters<double>(3, 2, false, 8);
    const auto ds = sample_gaussian_classes(params, 20'000, 9);
    const auto truth = truth_parameters(ds, Regime::multi_unequal);
    for (std::size_t g = 0; g < 2; ++g) {
        CHECK((truth.means.row(static_cast<Index>(g)).transpose() - params.means[g]).cwiseAbs().maxCoeff() < 0.05);
        CHECK((truth.covariances[g] - params.covariances[g]).cwiseAbs().maxCoeff() < 0.08);
    }
}
