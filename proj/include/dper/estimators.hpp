#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dper/core.hpp"
#include "dper/cubic.hpp"
#include "dper/pairwise_stats.hpp"
#include "dper/parallel.hpp"
#include "dper/psd.hpp"

namespace dper {

struct EstimatorOptions {
    /// Clip negative eigenvalues of each assembled covariance to zero.
    bool psd_repair = false;
    /// Worker threads for the pair loop; 0 = all cores.
    unsigned threads = 0;
    /// Abort with TimeBudgetExceeded once this instant has passed.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

template <std::floating_point Scalar>
struct CaseDeletionEstimate {
    Scalar value = 0;
    bool no_complete_pairs = false;  ///< A = 0; value is 0
};

/// Pairwise-complete covariance s12 / A (per-class centring, pooled over
/// classes). Zero with a flag when no row has both features.
template <std::floating_point Scalar>
[[nodiscard]] CaseDeletionEstimate<Scalar> case_deletion_sigma12(const PairStats<Scalar>& st) {
    if (st.A == 0) return {0, true};
    return {st.s12 / static_cast<Scalar>(st.A), false};
}

template <std::floating_point Scalar>
[[nodiscard]] CaseDeletionEstimate<Scalar> case_deletion_sigma12(const MaskedMatrix<Scalar>& data, Index i, Index j,
                                                                 std::span<const RowSet> groups) {
    return case_deletion_sigma12(pair_stats(data, i, j, groups));
}

namespace detail {

template <std::floating_point Scalar>
struct PooledEstimate {
    Matrix<Scalar> means;  ///< groups x p
    Matrix<Scalar> covariance;
    std::vector<PairDiagnostic<Scalar>> diagnostics;
};

inline void check_deadline(const EstimatorOptions& opts) {
    if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline) throw TimeBudgetExceeded();
}

/// Per-group means and one covariance shared by all groups. With a single
/// group this is the single-class estimator.
template <std::floating_point Scalar>
[[nodiscard]] PooledEstimate<Scalar> estimate_pooled(const MaskedMatrix<Scalar>& data, std::span<const RowSet> groups,
                                                     int class_tag, const EstimatorOptions& opts) {
    const Index p = data.cols();
    const auto n_groups = static_cast<Index>(groups.size());

    std::vector<FeatureSummary<Scalar>> features(static_cast<std::size_t>(p));
    parallel_for(static_cast<std::size_t>(p), opts.threads, [&](std::size_t f) {
        features[f] = summarize_feature(data, static_cast<Index>(f), groups);
    });

    PooledEstimate<Scalar> out;
    out.means.resize(n_groups, p);
    out.covariance = Matrix<Scalar>::Zero(p, p);
    for (Index f = 0; f < p; ++f) {
        const auto& fs = features[static_cast<std::size_t>(f)];
        for (Index g = 0; g < n_groups; ++g) out.means(g, f) = fs.means[static_cast<std::size_t>(g)];
        out.covariance(f, f) = fs.variance;
    }

    // Strict lower triangle, row-major: (1,0), (2,0), (2,1), ...
    const std::size_t n_pairs = static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) / 2;
    std::vector<std::pair<Index, Index>> pairs;
    pairs.reserve(n_pairs);
    for (Index i = 1; i < p; ++i)
        for (Index j = 0; j < i; ++j) pairs.emplace_back(i, j);

    out.diagnostics.resize(n_pairs);
    std::vector<Scalar> values(n_pairs, 0);
    parallel_for(n_pairs, opts.threads, [&](std::size_t k) {
        check_deadline(opts);
        const auto [i, j] = pairs[k];
        const auto& fi = features[static_cast<std::size_t>(i)];
        const auto& fj = features[static_cast<std::size_t>(j)];
        auto& diag = out.diagnostics[k];
        diag.i = i;
        diag.j = j;
        diag.class_id = class_tag;
        const PairStats<Scalar> st = accumulate_pair(data, i, j, fi, fj);
        diag.complete_pairs = st.A;
        if (!(st.sigma11 > 0) || !(st.sigma22 > 0)) {
            diag.constant_feature = true;
            diag.fallback = Fallback::zero;
            values[k] = 0;
            return;
        }
        const auto cd = case_deletion_sigma12(st);
        auto sel = select_sigma12(CubicProblem<Scalar>::from(st),
                                  cd.no_complete_pairs ? std::nullopt : std::optional<Scalar>(cd.value));
        diag.real_roots = sel.real_roots;
        diag.candidates = std::move(sel.candidates);
        diag.chosen = sel.chosen;
        diag.fallback = sel.fallback;
        diag.degenerate = sel.degenerate;
        values[k] = sel.chosen;
    });

    for (std::size_t k = 0; k < n_pairs; ++k) {
        const auto [i, j] = pairs[k];
        out.covariance(i, j) = values[k];
        out.covariance(j, i) = values[k];
    }
    return out;
}

}  // namespace detail

/// Single-class estimate: available-case means and variances, each
/// off-diagonal entry from its own pair likelihood.
template <std::floating_point Scalar>
[[nodiscard]] EstimationResult<Scalar> dper_single(const MaskedMatrix<Scalar>& data, const EstimatorOptions& opts = {}) {
    const auto groups = detail::all_rows(data.rows());
    auto est = detail::estimate_pooled(data, std::span<const RowSet>(groups), -1, opts);
    EstimationResult<Scalar> res;
    res.regime = Regime::single;
    res.means = std::move(est.means);
    if (opts.psd_repair) {
        est.covariance = psd_repair(est.covariance);
        res.psd_repaired = true;
    }
    res.covariances.push_back(std::move(est.covariance));
    res.diagnostics = std::move(est.diagnostics);
    return res;
}

/// One independent single-class estimate per class.
template <std::floating_point Scalar>
[[nodiscard]] EstimationResult<Scalar> dper_multi_unequal(const LabeledDataset<Scalar>& dataset,
                                                          const EstimatorOptions& opts = {}) {
    const int G = dataset.classes();
    EstimationResult<Scalar> res;
    res.regime = Regime::multi_unequal;
    res.means.resize(G, dataset.data().cols());
    for (int g = 0; g < G; ++g) {
        const std::vector<RowSet> groups{dataset.class_rows()[static_cast<std::size_t>(g)]};
        detail::PooledEstimate<Scalar> est;
        try {
            est = detail::estimate_pooled(dataset.data(), std::span<const RowSet>(groups), g, opts);
        } catch (const NoObservedData& e) {
            throw e.with_class(g);
        }
        res.means.row(g) = est.means.row(0);
        if (opts.psd_repair) est.covariance = psd_repair(est.covariance);
        res.covariances.push_back(std::move(est.covariance));
        for (auto& d : est.diagnostics) res.diagnostics.push_back(std::move(d));
    }
    res.psd_repaired = opts.psd_repair;
    return res;
}

/// Per-class means with one covariance shared by all classes.
template <std::floating_point Scalar>
[[nodiscard]] EstimationResult<Scalar> dper_multi_equal(const LabeledDataset<Scalar>& dataset,
                                                        const EstimatorOptions& opts = {}) {
    auto est = [&] {
        try {
            return detail::estimate_pooled(dataset.data(), std::span<const RowSet>(dataset.class_rows()), -1, opts);
        } catch (const NoObservedData& e) {
            if (e.class_id() || dataset.classes() != 1) throw;
            throw e.with_class(0);
        }
    }();
    EstimationResult<Scalar> res;
    res.regime = Regime::multi_equal;
    res.means = std::move(est.means);
    if (opts.psd_repair) {
        est.covariance = psd_repair(est.covariance);
        res.psd_repaired = true;
    }
    res.covariances.push_back(std::move(est.covariance));
    res.diagnostics = std::move(est.diagnostics);
    return res;
}

template <std::floating_point Scalar>
[[nodiscard]] EstimationResult<Scalar> dper_estimate(const LabeledDataset<Scalar>& dataset, Regime regime,
                                                     const EstimatorOptions& opts = {}) {
    switch (regime) {
        case Regime::single: return dper_single(dataset.data(), opts);
        case Regime::multi_unequal: return dper_multi_unequal(dataset, opts);
        case Regime::multi_equal: return dper_multi_equal(dataset, opts);
    }
    throw InvalidArgument("unknown regime");
}

}  // namespace dper
