#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "dper/core.hpp"

namespace dper {

/// Names used when serialising an estimate. Empty vectors fall back to
/// positional names ("x0", "class0", ...).
struct ResultLabels {
    std::vector<std::string> features;
    std::vector<std::string> classes;
};

/// Structured document: regime, means (one row per class), covariance
/// matrices row-major, per-pair diagnostics and a diagnostics summary.
[[nodiscard]] nlohmann::json to_json(const EstimationResultd& result, const ResultLabels& labels = {});

/// Inverse of to_json for the numeric fields (diagnostics are not restored).
[[nodiscard]] EstimationResultd result_from_json(const nlohmann::json& doc);

}  // namespace dper
