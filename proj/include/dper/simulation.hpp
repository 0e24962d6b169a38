#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dper/baselines.hpp"
#include "dper/core.hpp"

namespace dper {

/// Cell-wise Bernoulli missingness. Labels are never masked.
struct MaskSpec {
    double rate = 0;
    std::uint64_t seed = 0;
};

inline constexpr int kMaskRedraws = 100;

namespace detail {

[[nodiscard]] constexpr std::uint64_t splitmix(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Uniform draw in [0, 1) that depends only on (seed, row, col, attempt).
[[nodiscard]] constexpr double cell_uniform(std::uint64_t seed, std::uint64_t row, std::uint64_t col,
                                            std::uint64_t attempt) noexcept {
    std::uint64_t h = detail::splitmix(seed);
    h = detail::splitmix(h ^ (row * 0xD6E8FEB86659FD93ull));
    h = detail::splitmix(h ^ (col * 0xA0761D6478BD642Full));
    h = detail::splitmix(h ^ (attempt * 0xE7037ED1A0B428DBull));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Masks each cell of complete `data` independently with probability
/// spec.rate. Any (group, feature) block left with no observed entry is
/// re-drawn with a fresh counter, up to 100 times.
template <std::floating_point Scalar>
[[nodiscard]] MaskedMatrix<Scalar> apply_mcar(const MaskedMatrix<Scalar>& data, const MaskSpec& spec,
                                              std::span<const RowSet> groups) {
    if (!(spec.rate >= 0 && spec.rate < 1)) throw InvalidArgument("missing rate must lie in [0, 1)");
    if (!data.complete()) throw InvalidArgument("masking expects complete input data");
    if (spec.rate == 0) return data;

    Mask mask(data.rows(), data.cols());
    for (Index c = 0; c < data.cols(); ++c)
        for (Index r = 0; r < data.rows(); ++r)
            mask(r, c) = cell_uniform(spec.seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c), 0) >=
                         spec.rate;

    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (Index c = 0; c < data.cols(); ++c) {
            auto any_observed = [&] {
                for (Index r : groups[g])
                    if (mask(r, c)) return true;
                return false;
            };
            int attempt = 0;
            while (!any_observed()) {
                if (++attempt > kMaskRedraws) throw MaskInfeasible(c, static_cast<std::int64_t>(g));
                for (Index r : groups[g])
                    mask(r, c) = cell_uniform(spec.seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c),
                                              static_cast<std::uint64_t>(attempt)) >= spec.rate;
            }
        }
    }
    return MaskedMatrix<Scalar>(data.values(), std::move(mask));
}

template <std::floating_point Scalar>
[[nodiscard]] MaskedMatrix<Scalar> apply_mcar(const MaskedMatrix<Scalar>& data, const MaskSpec& spec) {
    const auto groups = detail::all_rows(data.rows());
    return apply_mcar(data, spec, std::span<const RowSet>(groups));
}

template <std::floating_point Scalar>
[[nodiscard]] LabeledDataset<Scalar> apply_mcar(const LabeledDataset<Scalar>& dataset, const MaskSpec& spec) {
    return dataset.with_data(apply_mcar(dataset.data(), spec, std::span<const RowSet>(dataset.class_rows())));
}

struct MetricR {
    double r = 0;
    Index n_mu = 0;
    Index n_sigma = 0;
};

/// r = |mu - mu_hat|_F / n_mu + |Sigma - Sigma_hat|_F / n_Sigma, with means
/// stacked over classes and covariances stacked when there is one per class.
template <std::floating_point Scalar>
[[nodiscard]] MetricR metric_r(const Matrix<Scalar>& truth_means, std::span<const Matrix<Scalar>> truth_covs,
                               const EstimationResult<Scalar>& est) {
    if (truth_means.rows() != est.means.rows() || truth_means.cols() != est.means.cols())
        throw ShapeMismatch("mean shapes differ");
    if (truth_covs.size() != est.covariances.size()) throw ShapeMismatch("covariance counts differ");
    MetricR m;
    m.n_mu = truth_means.size();
    Scalar cov_sq = 0;
    for (std::size_t g = 0; g < truth_covs.size(); ++g) {
        if (truth_covs[g].rows() != est.covariances[g].rows() || truth_covs[g].cols() != est.covariances[g].cols())
            throw ShapeMismatch("covariance shapes differ");
        cov_sq += (truth_covs[g] - est.covariances[g]).squaredNorm();
        m.n_sigma += truth_covs[g].size();
    }
    const Scalar mean_err = (truth_means - est.means).norm();
    m.r = static_cast<double>(mean_err / static_cast<Scalar>(m.n_mu) + std::sqrt(cov_sq) / static_cast<Scalar>(m.n_sigma));
    return m;
}

template <std::floating_point Scalar>
[[nodiscard]] MetricR metric_r(const EstimationResult<Scalar>& truth, const EstimationResult<Scalar>& est) {
    if (truth.regime != est.regime) throw ShapeMismatch("regimes differ");
    return metric_r(truth.means, std::span<const Matrix<Scalar>>(truth.covariances), est);
}

/// Classical estimates on complete data, used as ground truth.
template <std::floating_point Scalar>
[[nodiscard]] EstimationResult<Scalar> truth_parameters(const LabeledDataset<Scalar>& complete, Regime regime) {
    if (!complete.data().complete()) throw InvalidArgument("ground truth needs complete data");
    const auto groups = regime_groups(complete, regime);
    return classical_estimate(complete.data().values(), std::span<const RowSet>(groups), regime);
}

/// Zero mean, unit uncorrected variance per column. Constant columns are
/// only centred.
template <std::floating_point Scalar>
[[nodiscard]] Matrix<Scalar> standardize(const Matrix<Scalar>& values) {
    Matrix<Scalar> out = values;
    for (Index c = 0; c < out.cols(); ++c) {
        const Scalar mean = out.col(c).mean();
        out.col(c).array() -= mean;
        const Scalar sd = std::sqrt(out.col(c).squaredNorm() / static_cast<Scalar>(out.rows()));
        if (sd > 0) out.col(c) /= sd;
    }
    return out;
}

template <std::floating_point Scalar>
struct GaussianClasses {
    std::vector<Vector<Scalar>> means;
    std::vector<Matrix<Scalar>> covariances;  ///< one per class
};

/// Random well-conditioned parameters: means ~ N(0, 4), covariances
/// B B' / p + 0.5 I with B standard normal. `shared` gives every class the
/// same covariance.
template <std::floating_point Scalar>
[[nodiscard]] GaussianClasses<Scalar> random_gaussian_parameters(Index p, int classes, bool shared,
                                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<Scalar> normal(0, 1);
    auto random_cov = [&] {
        Matrix<Scalar> b(p, p);
        for (Index c = 0; c < p; ++c)
            for (Index r = 0; r < p; ++r) b(r, c) = normal(rng);
        Matrix<Scalar> cov = b * b.transpose() / static_cast<Scalar>(p);
        cov.diagonal().array() += Scalar(0.5);
        return cov;
    };
    GaussianClasses<Scalar> out;
    const Matrix<Scalar> common = random_cov();
    for (int g = 0; g < classes; ++g) {
        Vector<Scalar> mu(p);
        for (Index k = 0; k < p; ++k) mu(k) = 2 * normal(rng);
        out.means.push_back(mu);
        out.covariances.push_back(shared ? common : random_cov());
    }
    return out;
}

/// n_per_class draws per class, rows grouped by class in label order.
template <std::floating_point Scalar>
[[nodiscard]] LabeledDataset<Scalar> sample_gaussian_classes(const GaussianClasses<Scalar>& params, Index n_per_class,
                                                             std::uint64_t seed) {
    const auto G = static_cast<int>(params.means.size());
    const Index p = params.means.front().size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<Scalar> normal(0, 1);
    Matrix<Scalar> values(n_per_class * G, p);
    std::vector<int> labels(static_cast<std::size_t>(n_per_class * G));
    Vector<Scalar> z(p);
    for (int g = 0; g < G; ++g) {
        const Matrix<Scalar> L = Eigen::LLT<Matrix<Scalar>>(params.covariances[static_cast<std::size_t>(g)]).matrixL();
        for (Index k = 0; k < n_per_class; ++k) {
            for (Index c = 0; c < p; ++c) z(c) = normal(rng);
            const Index row = g * n_per_class + k;
            values.row(row) = (params.means[static_cast<std::size_t>(g)] + L * z).transpose();
            labels[static_cast<std::size_t>(row)] = g;
        }
    }
    return LabeledDataset<Scalar>(MaskedMatrix<Scalar>(std::move(values)), std::move(labels));
}

}  // namespace dper
