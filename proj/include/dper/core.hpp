#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dper/errors.hpp"

namespace dper {

using Index = Eigen::Index;
using RowSet = std::vector<Index>;

template <std::floating_point Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <std::floating_point Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// n x p matrix with an explicit observed/missing flag per cell.
///
/// Missing cells hold NaN in values(); callers must consult mask() rather than
/// testing for NaN. Immutable after construction.
template <std::floating_point Scalar>
class MaskedMatrix {
public:
    using scalar_type = Scalar;

    MaskedMatrix(Matrix<Scalar> values, Mask mask) : values_(std::move(values)), mask_(std::move(mask)) {
        if (values_.rows() < 1 || values_.cols() < 1)
            throw InvalidArgument("masked matrix needs n >= 1 and p >= 1");
        if (mask_.rows() != values_.rows() || mask_.cols() != values_.cols())
            throw InvalidArgument("mask shape does not match values shape");
        for (Index c = 0; c < values_.cols(); ++c) {
            for (Index r = 0; r < values_.rows(); ++r) {
                if (!mask_(r, c)) {
                    values_(r, c) = std::numeric_limits<Scalar>::quiet_NaN();
                } else if (!std::isfinite(values_(r, c))) {
                    throw InvalidArgument("observed cell (" + std::to_string(r) + ", " + std::to_string(c) +
                                          ") is not finite");
                }
            }
        }
    }

    /// Complete data: every cell observed.
    explicit MaskedMatrix(Matrix<Scalar> values)
        : MaskedMatrix(values, Mask::Constant(values.rows(), values.cols(), true)) {}

    /// NaN cells become missing; every other cell must be finite.
    static MaskedMatrix from_nan(Matrix<Scalar> values) {
        Mask mask = !values.array().isNaN();
        return MaskedMatrix(std::move(values), std::move(mask));
    }

    [[nodiscard]] Index rows() const noexcept { return values_.rows(); }
    [[nodiscard]] Index cols() const noexcept { return values_.cols(); }
    [[nodiscard]] const Matrix<Scalar>& values() const noexcept { return values_; }
    [[nodiscard]] const Mask& mask() const noexcept { return mask_; }
    [[nodiscard]] bool observed(Index r, Index c) const noexcept { return mask_(r, c); }
    [[nodiscard]] Scalar operator()(Index r, Index c) const noexcept { return values_(r, c); }

    [[nodiscard]] Index observed_count() const { return mask_.count(); }
    [[nodiscard]] Index missing_count() const { return values_.size() - observed_count(); }
    [[nodiscard]] bool complete() const { return mask_.all(); }

    [[nodiscard]] MaskedMatrix select_rows(std::span<const Index> rows) const {
        Matrix<Scalar> v(static_cast<Index>(rows.size()), cols());
        Mask m(static_cast<Index>(rows.size()), cols());
        for (Index k = 0; k < static_cast<Index>(rows.size()); ++k) {
            v.row(k) = values_.row(rows[k]);
            m.row(k) = mask_.row(rows[k]);
        }
        return MaskedMatrix(std::move(v), std::move(m));
    }

    [[nodiscard]] MaskedMatrix select_cols(std::span<const Index> cols_) const {
        Matrix<Scalar> v(rows(), static_cast<Index>(cols_.size()));
        Mask m(rows(), static_cast<Index>(cols_.size()));
        for (Index k = 0; k < static_cast<Index>(cols_.size()); ++k) {
            v.col(k) = values_.col(cols_[k]);
            m.col(k) = mask_.col(cols_[k]);
        }
        return MaskedMatrix(std::move(v), std::move(m));
    }

    friend bool operator==(const MaskedMatrix& a, const MaskedMatrix& b) {
        if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
        if ((a.mask_ != b.mask_).any()) return false;
        for (Index c = 0; c < a.cols(); ++c)
            for (Index r = 0; r < a.rows(); ++r)
                if (a.mask_(r, c) && a.values_(r, c) != b.values_(r, c)) return false;
        return true;
    }

private:
    Matrix<Scalar> values_;
    Mask mask_;
};

/// Masked data plus a complete class label per row.
template <std::floating_point Scalar>
class LabeledDataset {
public:
    LabeledDataset(MaskedMatrix<Scalar> data, std::vector<int> labels, std::vector<std::string> class_names = {})
        : data_(std::move(data)), labels_(std::move(labels)), class_names_(std::move(class_names)) {
        if (static_cast<Index>(labels_.size()) != data_.rows())
            throw InvalidArgument("label count does not match row count");
        int max_label = -1;
        for (int l : labels_) {
            if (l < 0) throw InvalidArgument("class ids must be non-negative");
            max_label = std::max(max_label, l);
        }
        class_rows_.resize(static_cast<std::size_t>(max_label + 1));
        for (Index r = 0; r < data_.rows(); ++r) class_rows_[static_cast<std::size_t>(labels_[r])].push_back(r);
        for (std::size_t g = 0; g < class_rows_.size(); ++g)
            if (class_rows_[g].empty())
                throw InvalidArgument("class " + std::to_string(g) + " has no rows; ids must cover 0..G-1");
        if (!class_names_.empty() && class_names_.size() != class_rows_.size())
            throw InvalidArgument("class name count does not match class count");
    }

    /// Single-class view: every row labelled 0.
    explicit LabeledDataset(MaskedMatrix<Scalar> data)
        : LabeledDataset(data, std::vector<int>(static_cast<std::size_t>(data.rows()), 0)) {}

    [[nodiscard]] const MaskedMatrix<Scalar>& data() const noexcept { return data_; }
    [[nodiscard]] const std::vector<int>& labels() const noexcept { return labels_; }
    [[nodiscard]] int classes() const noexcept { return static_cast<int>(class_rows_.size()); }
    [[nodiscard]] const std::vector<RowSet>& class_rows() const noexcept { return class_rows_; }
    [[nodiscard]] const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    /// Same labels, different cell values/mask (e.g. after masking).
    [[nodiscard]] LabeledDataset with_data(MaskedMatrix<Scalar> data) const {
        return LabeledDataset(std::move(data), labels_, class_names_);
    }

private:
    MaskedMatrix<Scalar> data_;
    std::vector<int> labels_;
    std::vector<std::string> class_names_;
    std::vector<RowSet> class_rows_;
};

/// Sufficient statistics of one feature pair (i, j), pooled over classes.
template <std::floating_point Scalar>
struct PairStats {
    std::int64_t A = 0;     ///< complete pairs, summed over classes
    Scalar s11 = 0;         ///< sum over complete pairs of (x_i - mean_i)^2
    Scalar s12 = 0;         ///< sum over complete pairs of (x_i - mean_i)(x_j - mean_j)
    Scalar s22 = 0;         ///< sum over complete pairs of (x_j - mean_j)^2
    Scalar sigma11 = 0;     ///< available-case uncorrected variance of feature i
    Scalar sigma22 = 0;     ///< available-case uncorrected variance of feature j
    std::int64_t n1_obs = 0;
    std::int64_t n2_obs = 0;

    friend bool operator==(const PairStats&, const PairStats&) = default;
};

enum class Regime { single, multi_unequal, multi_equal };

[[nodiscard]] inline std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::single: return "single";
        case Regime::multi_unequal: return "multi_unequal";
        case Regime::multi_equal: return "multi_equal";
    }
    return "?";
}

enum class Fallback { none, case_deletion, zero };

[[nodiscard]] inline std::string_view to_string(Fallback f) noexcept {
    switch (f) {
        case Fallback::none: return "none";
        case Fallback::case_deletion: return "case_deletion";
        case Fallback::zero: return "zero";
    }
    return "?";
}

template <std::floating_point Scalar>
struct RootCandidate {
    Scalar sigma12;
    Scalar eta;
};

/// How one off-diagonal entry was obtained.
template <std::floating_point Scalar>
struct PairDiagnostic {
    Index i = 0;
    Index j = 0;
    int class_id = -1;  ///< -1 when the entry belongs to a pooled or single-class matrix
    std::int64_t complete_pairs = 0;
    int real_roots = 0;
    std::vector<RootCandidate<Scalar>> candidates;  ///< interior roots with their objective values
    Scalar chosen = 0;
    Fallback fallback = Fallback::none;
    bool constant_feature = false;
    bool degenerate = false;
};

template <std::floating_point Scalar>
struct EstimationResult {
    Regime regime = Regime::single;
    Matrix<Scalar> means;                    ///< G x p (G = 1 for single)
    std::vector<Matrix<Scalar>> covariances; ///< one p x p matrix, or G for multi_unequal
    std::vector<PairDiagnostic<Scalar>> diagnostics;
    bool psd_repaired = false;

    [[nodiscard]] Index features() const noexcept { return means.cols(); }
    [[nodiscard]] Index groups() const noexcept { return means.rows(); }

    [[nodiscard]] std::size_t fallback_count() const {
        return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                      [](const auto& d) { return d.fallback != Fallback::none; }));
    }
};

struct FeatureDiagnostic {
    Index feature = 0;
    Index observed = 0;
    bool constant = false;
    bool fully_missing = false;

    friend bool operator==(const FeatureDiagnostic&, const FeatureDiagnostic&) = default;
};

/// Per-feature observed count and constant/fully-missing flags. Never throws.
template <std::floating_point Scalar>
[[nodiscard]] std::vector<FeatureDiagnostic> validate(const MaskedMatrix<Scalar>& data) {
    std::vector<FeatureDiagnostic> out;
    out.reserve(static_cast<std::size_t>(data.cols()));
    for (Index c = 0; c < data.cols(); ++c) {
        FeatureDiagnostic d{c, 0, false, false};
        bool seen = false;
        Scalar first = 0;
        bool all_equal = true;
        for (Index r = 0; r < data.rows(); ++r) {
            if (!data.observed(r, c)) continue;
            ++d.observed;
            if (!seen) {
                first = data(r, c);
                seen = true;
            } else if (data(r, c) != first) {
                all_equal = false;
            }
        }
        d.fully_missing = d.observed == 0;
        d.constant = seen && all_equal;
        out.push_back(d);
    }
    return out;
}

/// One (dataset, rate, seed, method) cell of a benchmark sweep.
struct BenchRow {
    std::string dataset;
    double rate = 0;
    std::uint64_t seed = 0;
    std::string method;
    Regime regime = Regime::single;
    std::optional<double> r;   ///< empty = NA
    double runtime_s = 0;
    std::string note;          ///< error kind when r is NA
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

using MaskedMatrixd = MaskedMatrix<double>;
using LabeledDatasetd = LabeledDataset<double>;
using EstimationResultd = EstimationResult<double>;

}  // namespace dper
