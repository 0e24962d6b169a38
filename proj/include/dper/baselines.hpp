#pragma once

#include <span>
#include <vector>

#include "dper/core.hpp"
#include "dper/pairwise_stats.hpp"

namespace dper {

/// Classical maximum-likelihood estimates on fully observed rows: per-group
/// sample means; uncorrected covariance per group (multi_unequal) or pooled
/// with per-group centring (single, multi_equal). `values` must be complete
/// on every listed row.
template <std::floating_point Scalar>
[[nodiscard]] EstimationResult<Scalar> classical_estimate(const Matrix<Scalar>& values, std::span<const RowSet> groups,
                                                          Regime regime) {
    const Index p = values.cols();
    const auto G = static_cast<Index>(groups.size());
    EstimationResult<Scalar> res;
    res.regime = regime;
    res.means.resize(G, p);
    Matrix<Scalar> pooled = Matrix<Scalar>::Zero(p, p);
    Index total = 0;
    for (Index g = 0; g < G; ++g) {
        const RowSet& rows = groups[static_cast<std::size_t>(g)];
        if (rows.empty()) throw InvalidArgument("empty group in classical estimate");
        Matrix<Scalar> block(static_cast<Index>(rows.size()), p);
        for (Index k = 0; k < block.rows(); ++k) block.row(k) = values.row(rows[static_cast<std::size_t>(k)]);
        const Vector<Scalar> mean = block.colwise().mean().transpose();
        res.means.row(g) = mean.transpose();
        block.rowwise() -= mean.transpose();
        Matrix<Scalar> scatter = block.transpose() * block;
        if (regime == Regime::multi_unequal) {
            res.covariances.push_back(scatter / static_cast<Scalar>(block.rows()));
        } else {
            pooled += scatter;
            total += block.rows();
        }
    }
    if (regime != Regime::multi_unequal) res.covariances.push_back(pooled / static_cast<Scalar>(total));
    for (auto& cov : res.covariances) {
        for (Index c = 0; c < p; ++c)
            for (Index r = c + 1; r < p; ++r) cov(c, r) = cov(r, c);
    }
    return res;
}

/// Groups implied by a regime: one group of all rows for single, the classes
/// otherwise.
template <std::floating_point Scalar>
[[nodiscard]] std::vector<RowSet> regime_groups(const LabeledDataset<Scalar>& dataset, Regime regime) {
    if (regime == Regime::single) return detail::all_rows(dataset.data().rows());
    return dataset.class_rows();
}

/// Drops every row with any missing entry, then estimates classically.
/// Each group must keep at least two complete rows.
template <std::floating_point Scalar>
[[nodiscard]] EstimationResult<Scalar> listwise_deletion_estimate(const LabeledDataset<Scalar>& dataset, Regime regime) {
    const auto& data = dataset.data();
    const auto groups = regime_groups(dataset, regime);
    std::vector<RowSet> kept(groups.size());
    std::vector<std::int64_t> counts(groups.size());
    bool enough = true;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (Index r : groups[g])
            if (data.mask().row(r).all()) kept[g].push_back(r);
        counts[g] = static_cast<std::int64_t>(kept[g].size());
        enough = enough && kept[g].size() >= 2;
    }
    if (!enough) throw InsufficientCompleteRows(std::move(counts));
    return classical_estimate(data.values(), std::span<const RowSet>(kept), regime);
}

/// Fills each missing cell with its group's available-case mean of that
/// feature, then estimates classically.
template <std::floating_point Scalar>
[[nodiscard]] EstimationResult<Scalar> mean_impute_estimate(const LabeledDataset<Scalar>& dataset, Regime regime) {
    const auto& data = dataset.data();
    const auto groups = regime_groups(dataset, regime);
    Matrix<Scalar> filled = data.values();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (Index f = 0; f < data.cols(); ++f) {
            Scalar mean;
            try {
                mean = available_mean(data, f, std::span<const Index>(groups[g]));
            } catch (const NoObservedData&) {
                if (regime == Regime::single) throw;
                throw NoObservedData(f, static_cast<std::int64_t>(g));
            }
            for (Index r : groups[g])
                if (!data.observed(r, f)) filled(r, f) = mean;
        }
    }
    return classical_estimate(filled, std::span<const RowSet>(groups), regime);
}

}  // namespace dper
