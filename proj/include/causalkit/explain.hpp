#pragma once

#include <string>
#include <utility>
#include <vector>

#include "causalkit/forest.hpp"
#include "causalkit/linear_model.hpp"
#include "causalkit/model.hpp"

namespace causalkit {

// Per-predictor importance scores under one method.  `normalized` rescales
// raw to [0, 1] by range: (raw - min)/(max - min), or all zeros when the
// raw values are constant.
struct ImportanceReport {
    std::string method;  // LR-coefs | RF-imps | RF-Shap | NN-Shap | bi-corrs
    std::vector<std::string> predictors;
    std::vector<double> raw;
    std::vector<double> normalized;

    double raw_of(const std::string& predictor) const;
    double normalized_of(const std::string& predictor) const;
};

ImportanceReport make_report(std::string method, std::vector<std::string> predictors,
                             std::vector<double> raw);

// Per-test-point Shapley attributions plus the shared baseline v(empty) =
// mean model output over the background.
struct ShapleyMatrix {
    std::vector<std::string> predictors;
    std::size_t n_rows = 0;
    std::vector<double> phi;  // row-major n_rows x predictors.size()
    double baseline = 0.0;
    std::vector<double> signed_mean;  // per predictor, mean of phi over rows

    double at(std::size_t row, std::size_t predictor) const {
        return phi[row * predictors.size() + predictor];
    }
};

// Exact Shapley values by coalition enumeration (2^K value-function
// evaluations).  point is given in model predictor order.  The value
// function v(S) marginalizes over the background: features in S take the
// point's values, the rest take each background row's values, averaged.
// K is capped at 20.
std::vector<double> shapley_exact(const Model& model, const std::vector<double>& point,
                                  const Dataset& background);

// Buffer variant: background as row-major n_bg x K in model predictor order.
std::vector<double> shapley_exact(const Model& model, const std::vector<double>& point,
                                  const double* background, std::size_t n_bg);

// Shapley attributions for every test row plus the mean-|phi| importance
// report.  `predictors` fixes the report's row order (must be the model's
// predictor set).
std::pair<ShapleyMatrix, ImportanceReport> shapley_report(
    const Model& model, const Dataset& test, const Dataset& background,
    const std::vector<std::string>& predictors, const std::string& method_label);

// raw = |coefficient| per predictor.
ImportanceReport coef_report(const LinearModel& model);

// Mean-decrease-impurity importances: per feature, the count-weighted
// impurity reductions of its splits, averaged over trees and rescaled to
// sum to 1.
ImportanceReport impurity_importances(const RandomForest& forest,
                                      const std::vector<std::string>& predictors);

}  // namespace causalkit
