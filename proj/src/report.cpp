#include "dper/report.hpp"

namespace dper {

namespace {

std::string name_or(const std::vector<std::string>& names, std::size_t k, const char* prefix) {
    if (k < names.size()) return names[k];
    return prefix + std::to_string(k);
}

nlohmann::json matrix_rows(const Matrix<double>& m) {
    auto rows = nlohmann::json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix<double> matrix_from(const nlohmann::json& rows) {
    const auto n = static_cast<Index>(rows.size());
    const auto p = n == 0 ? Index{0} : static_cast<Index>(rows.at(0).size());
    Matrix<double> m(n, p);
    for (Index r = 0; r < n; ++r) {
        if (static_cast<Index>(rows.at(r).size()) != p) throw ShapeMismatch("ragged matrix in document");
        for (Index c = 0; c < p; ++c) m(r, c) = rows.at(r).at(c).get<double>();
    }
    return m;
}

}  // namespace

nlohmann::json to_json(const EstimationResultd& result, const ResultLabels& labels) {
    nlohmann::json doc;
    doc["regime"] = std::string(to_string(result.regime));

    auto features = nlohmann::json::array();
    for (Index f = 0; f < result.features(); ++f) features.push_back(name_or(labels.features, f, "x"));
    doc["features"] = features;

    const bool per_class = result.regime != Regime::single;
    auto classes = nlohmann::json::array();
    if (per_class)
        for (Index g = 0; g < result.groups(); ++g) classes.push_back(name_or(labels.classes, g, "class"));
    doc["classes"] = classes;

    doc["means"] = matrix_rows(result.means);

    auto covs = nlohmann::json::array();
    for (std::size_t k = 0; k < result.covariances.size(); ++k) {
        nlohmann::json entry;
        if (result.regime == Regime::multi_unequal) entry["class"] = name_or(labels.classes, k, "class");
        else entry["class"] = nullptr;
        entry["matrix"] = matrix_rows(result.covariances[k]);
        covs.push_back(std::move(entry));
    }
    doc["covariances"] = covs;
    doc["psd_repaired"] = result.psd_repaired;

    std::size_t constant = 0, degenerate = 0, multi_root = 0;
    auto pairs = nlohmann::json::array();
    for (const auto& d : result.diagnostics) {
        constant += d.constant_feature ? 1 : 0;
        degenerate += d.degenerate ? 1 : 0;
        multi_root += d.candidates.size() > 1 ? 1 : 0;
        nlohmann::json e;
        e["i"] = name_or(labels.features, static_cast<std::size_t>(d.i), "x");
        e["j"] = name_or(labels.features, static_cast<std::size_t>(d.j), "x");
        if (d.class_id >= 0) e["class"] = name_or(labels.classes, static_cast<std::size_t>(d.class_id), "class");
        else e["class"] = nullptr;
        e["complete_pairs"] = d.complete_pairs;
        e["real_roots"] = d.real_roots;
        auto cands = nlohmann::json::array();
        for (const auto& c : d.candidates) cands.push_back({{"sigma12", c.sigma12}, {"eta", c.eta}});
        e["candidates"] = cands;
        e["chosen"] = d.chosen;
        e["fallback"] = std::string(to_string(d.fallback));
        e["constant_feature"] = d.constant_feature;
        e["degenerate"] = d.degenerate;
        pairs.push_back(std::move(e));
    }
    doc["diagnostics"] = {{"pairs", result.diagnostics.size()},
                          {"fallbacks", result.fallback_count()},
                          {"constant_feature_pairs", constant},
                          {"degenerate_pairs", degenerate},
                          {"multiple_interior_roots", multi_root},
                          {"entries", pairs}};
    return doc;
}

EstimationResultd result_from_json(const nlohmann::json& doc) {
    EstimationResultd res;
    const auto regime = doc.at("regime").get<std::string>();
    if (regime == "single") res.regime = Regime::single;
    else if (regime == "multi_unequal") res.regime = Regime::multi_unequal;
    else if (regime == "multi_equal") res.regime = Regime::multi_equal;
    else throw InvalidArgument("unknown regime '" + regime + "'");
    res.means = matrix_from(doc.at("means"));
    for (const auto& entry : doc.at("covariances")) res.covariances.push_back(matrix_from(entry.at("matrix")));
    res.psd_repaired = doc.value("psd_repaired", false);
    return res;
}

}  // namespace dper
