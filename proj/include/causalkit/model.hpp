#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "causalkit/dataset.hpp"

namespace causalkit {

// Hyperparameters for the tree/forest family.
struct ForestConfig {
    int n_trees = 100;
    int min_leaf = 1;
    double max_features = 1.0;  // fraction of features drawn per split
};

// Hyperparameters for the MLP.
struct MlpConfig {
    int hidden = 100;
    int layers = 2;
    double lr0 = 1e-3;
    int iterations = 200;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct FitConfig {
    ForestConfig forest;
    MlpConfig mlp;
};

// Anything mapping a predictor row to a real prediction.  Implementations
// are immutable once fitted; predict_rows is pure and thread-safe.
class Model {
public:
    virtual ~Model() = default;

    // Training predictor names, in model order.
    virtual const std::vector<std::string>& predictor_names() const = 0;

    // rows: row-major n x K buffer with columns in predictor_names() order.
    virtual void predict_rows(const double* rows, std::size_t n, double* out) const = 0;
};

// Name-based prediction: gathers the model's predictors from `rows` by
// column name (order-independent) and evaluates.
std::vector<double> predict(const Model& model, const Dataset& rows);

// Mean squared error between two equal-length vectors.
double mse(const std::vector<double>& yhat, const std::vector<double>& y);

}  // namespace causalkit
