#pragma once

#include "causalkit/model.hpp"

namespace causalkit {

// Ordinary least squares fit: intercept plus one coefficient per predictor.
class LinearModel : public Model {
public:
    LinearModel(double intercept, std::vector<std::string> predictors,
                std::vector<double> coefficients);

    double intercept() const { return intercept_; }
    const std::vector<double>& coefficients() const { return coef_; }
    double coefficient(const std::string& predictor) const;

    const std::vector<std::string>& predictor_names() const override { return names_; }
    void predict_rows(const double* rows, std::size_t n, double* out) const override;

private:
    double intercept_;
    std::vector<std::string> names_;
    std::vector<double> coef_;
};

// Least-squares regression of `outcome` on every other column of `train`,
// solved by Householder QR.  Requires more rows than predictors and a
// full-column-rank design matrix.
LinearModel fit_ols(const Dataset& train, const std::string& outcome);
LinearModel fit_ols(const Dataset& train, const std::string& outcome,
                    const std::vector<std::string>& predictors);

}  // namespace causalkit
