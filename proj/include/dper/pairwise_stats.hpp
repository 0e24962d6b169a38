#pragma once

#include <span>
#include <vector>

#include "dper/core.hpp"
#include "dper/summation.hpp"

namespace dper {

/// Mean of the observed entries of `feature` within `rows`.
template <std::floating_point Scalar>
[[nodiscard]] Scalar available_mean(const MaskedMatrix<Scalar>& data, Index feature, std::span<const Index> rows) {
    PairwiseSum<Scalar> sum;
    std::int64_t count = 0;
    for (Index r : rows) {
        if (!data.observed(r, feature)) continue;
        sum.add(data(r, feature));
        ++count;
    }
    if (count == 0) throw NoObservedData(feature, std::nullopt);
    return sum.result() / static_cast<Scalar>(count);
}

template <std::floating_point Scalar>
[[nodiscard]] Scalar available_mean(const MaskedMatrix<Scalar>& data, Index feature) {
    std::vector<Index> all(static_cast<std::size_t>(data.rows()));
    for (Index r = 0; r < data.rows(); ++r) all[static_cast<std::size_t>(r)] = r;
    return available_mean(data, feature, all);
}

/// Uncorrected variance (divide by the observed count) of `feature` within
/// `rows`, centred at `center`.
template <std::floating_point Scalar>
[[nodiscard]] Scalar available_variance(const MaskedMatrix<Scalar>& data, Index feature, std::span<const Index> rows,
                                        Scalar center) {
    PairwiseSum<Scalar> sum;
    std::int64_t count = 0;
    for (Index r : rows) {
        if (!data.observed(r, feature)) continue;
        const Scalar d = data(r, feature) - center;
        sum.add(d * d);
        ++count;
    }
    if (count == 0) throw NoObservedData(feature, std::nullopt);
    return sum.result() / static_cast<Scalar>(count);
}

/// Pooled uncorrected variance: each group centred at its own center, one
/// denominator over all observed entries of all groups.
template <std::floating_point Scalar>
[[nodiscard]] Scalar available_variance(const MaskedMatrix<Scalar>& data, Index feature, std::span<const RowSet> groups,
                                        std::span<const Scalar> centers) {
    if (groups.size() != centers.size()) throw InvalidArgument("one center per group is required");
    PairwiseSum<Scalar> sum;
    std::int64_t count = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::int64_t in_group = 0;
        for (Index r : groups[g]) {
            if (!data.observed(r, feature)) continue;
            const Scalar d = data(r, feature) - centers[g];
            sum.add(d * d);
            ++in_group;
        }
        if (in_group == 0) throw NoObservedData(feature, static_cast<std::int64_t>(g));
        count += in_group;
    }
    return sum.result() / static_cast<Scalar>(count);
}

namespace detail {

/// One feature summarised over a grouping of rows.
template <std::floating_point Scalar>
struct FeatureSummary {
    std::vector<RowSet> observed;  ///< observed rows per group, ascending
    std::vector<Scalar> means;     ///< available-case mean per group
    Scalar variance = 0;           ///< pooled uncorrected variance
    std::int64_t observed_total = 0;
};

/// Throws NoObservedData tagged with the group index when there is more than
/// one group, untagged otherwise.
template <std::floating_point Scalar>
[[nodiscard]] FeatureSummary<Scalar> summarize_feature(const MaskedMatrix<Scalar>& data, Index feature,
                                                       std::span<const RowSet> groups) {
    FeatureSummary<Scalar> s;
    s.observed.resize(groups.size());
    s.means.resize(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        RowSet& rows = s.observed[g];
        for (Index r : groups[g])
            if (data.observed(r, feature)) rows.push_back(r);
        if (rows.empty()) {
            if (groups.size() > 1) throw NoObservedData(feature, static_cast<std::int64_t>(g));
            throw NoObservedData(feature, std::nullopt);
        }
        PairwiseSum<Scalar> sum;
        for (Index r : rows) sum.add(data(r, feature));
        s.means[g] = sum.result() / static_cast<Scalar>(rows.size());
        s.observed_total += static_cast<std::int64_t>(rows.size());
    }
    PairwiseSum<Scalar> ss;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (Index r : s.observed[g]) {
            const Scalar d = data(r, feature) - s.means[g];
            ss.add(d * d);
        }
    }
    s.variance = ss.result() / static_cast<Scalar>(s.observed_total);
    return s;
}

/// Complete-pair sums for features (i, j) given their summaries. Walks the
/// shorter observed list of each group and probes the other feature's mask, so
/// the cost shrinks as missingness grows. Rows are visited in ascending order
/// regardless of which list is walked.
template <std::floating_point Scalar>
[[nodiscard]] PairStats<Scalar> accumulate_pair(const MaskedMatrix<Scalar>& data, Index i, Index j,
                                                const FeatureSummary<Scalar>& fi, const FeatureSummary<Scalar>& fj) {
    PairStats<Scalar> st;
    PairwiseSum<Scalar> s11, s12, s22;
    const auto& mask = data.mask();
    const auto& values = data.values();
    for (std::size_t g = 0; g < fi.observed.size(); ++g) {
        const bool walk_i = fi.observed[g].size() <= fj.observed[g].size();
        const RowSet& rows = walk_i ? fi.observed[g] : fj.observed[g];
        const Index other = walk_i ? j : i;
        const Scalar mi = fi.means[g];
        const Scalar mj = fj.means[g];
        for (Index r : rows) {
            if (!mask(r, other)) continue;
            const Scalar a = values(r, i) - mi;
            const Scalar b = values(r, j) - mj;
            s11.add(a * a);
            s12.add(a * b);
            s22.add(b * b);
            ++st.A;
        }
    }
    st.s11 = s11.result();
    st.s12 = s12.result();
    st.s22 = s22.result();
    st.sigma11 = fi.variance;
    st.sigma22 = fj.variance;
    st.n1_obs = fi.observed_total;
    st.n2_obs = fj.observed_total;
    return st;
}

[[nodiscard]] inline std::vector<RowSet> all_rows(Index n) {
    RowSet rows(static_cast<std::size_t>(n));
    for (Index r = 0; r < n; ++r) rows[static_cast<std::size_t>(r)] = r;
    return {std::move(rows)};
}

}  // namespace detail

/// Sufficient statistics of the pair (i, j) with rows grouped by class.
/// Means for centring are the per-group available-case means of each feature;
/// the s-sums run over rows where both features are observed.
template <std::floating_point Scalar>
[[nodiscard]] PairStats<Scalar> pair_stats(const MaskedMatrix<Scalar>& data, Index i, Index j,
                                           std::span<const RowSet> groups) {
    const auto fi = detail::summarize_feature(data, i, groups);
    const auto fj = detail::summarize_feature(data, j, groups);
    return detail::accumulate_pair(data, i, j, fi, fj);
}

template <std::floating_point Scalar>
[[nodiscard]] PairStats<Scalar> pair_stats(const MaskedMatrix<Scalar>& data, Index i, Index j) {
    const auto groups = detail::all_rows(data.rows());
    return pair_stats(data, i, j, std::span<const RowSet>(groups));
}

template <std::floating_point Scalar>
[[nodiscard]] PairStats<Scalar> pair_stats(const LabeledDataset<Scalar>& dataset, Index i, Index j) {
    return pair_stats(dataset.data(), i, j, std::span<const RowSet>(dataset.class_rows()));
}

}  // namespace dper
