#include "causalkit/linear_model.hpp"

#include <algorithm>
#include <cmath>

#include "causalkit/errors.hpp"

namespace causalkit {

LinearModel::LinearModel(double intercept, std::vector<std::string> predictors,
                         std::vector<double> coefficients)
    : intercept_(intercept), names_(std::move(predictors)), coef_(std::move(coefficients)) {
    if (names_.size() != coef_.size())
        throw LengthMismatchError("LinearModel: predictor/coefficient count mismatch");
}

double LinearModel::coefficient(const std::string& predictor) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == predictor) return coef_[i];
    throw MissingPredictorError("no coefficient for predictor: " + predictor);
}

void LinearModel::predict_rows(const double* rows, std::size_t n, double* out) const {
    const std::size_t k = names_.size();
    for (std::size_t r = 0; r < n; ++r) {
        double acc = intercept_;
        for (std::size_t c = 0; c < k; ++c) acc += coef_[c] * rows[r * k + c];
        out[r] = acc;
    }
}

std::vector<double> predict(const Model& model, const Dataset& rows) {
    const auto buf = rows.rows_in_order(model.predictor_names());
    std::vector<double> out(rows.n_rows());
    model.predict_rows(buf.data(), rows.n_rows(), out.data());
    return out;
}

double mse(const std::vector<double>& yhat, const std::vector<double>& y) {
    if (yhat.size() != y.size()) throw LengthMismatchError("mse: length mismatch");
    if (yhat.empty()) throw LengthMismatchError("mse: empty vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < yhat.size(); ++i) {
        const double d = yhat[i] - y[i];
        sum += d * d;
    }
    return sum / static_cast<double>(yhat.size());
}

LinearModel fit_ols(const Dataset& train, const std::string& outcome) {
    std::vector<std::string> predictors;
    for (const auto& name : train.columns())
        if (name != outcome) predictors.push_back(name);
    return fit_ols(train, outcome, predictors);
}

LinearModel fit_ols(const Dataset& train, const std::string& outcome,
                    const std::vector<std::string>& predictors) {
    if (predictors.empty()) throw EmptyFeatureError("fit_ols: no predictors");
    const std::size_t n = train.n_rows();
    const std::size_t k = predictors.size();
    const std::size_t cols = k + 1;  // intercept first
    if (n <= cols)
        throw InsufficientSamplesError("fit_ols: need more rows than parameters");

    // Design matrix [1 | X], column-major for the Householder sweep.
    std::vector<double> a(n * cols);
    for (std::size_t r = 0; r < n; ++r) a[r] = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
        const auto& v = train.col(predictors[c]);
        std::copy(v.begin(), v.end(), a.begin() + static_cast<std::ptrdiff_t>((c + 1) * n));
    }
    std::vector<double> b = train.col(outcome);

    // Householder QR: triangularize A in place, applying the same
    // reflections to b; then back-substitute through R.
    std::vector<double> r_diag(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        double* col_j = a.data() + j * n;
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += col_j[i] * col_j[i];
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;  // zero column; rank check below rejects
        if (col_j[j] < 0.0) norm = -norm;  // v = x/norm + e1 keeps v[j] in [1,2]
        r_diag[j] = -norm;
        for (std::size_t i = j; i < n; ++i) col_j[i] /= norm;
        col_j[j] += 1.0;
        for (std::size_t c = j + 1; c < cols; ++c) {
            double* col_c = a.data() + c * n;
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += col_j[i] * col_c[i];
            dot = -dot / col_j[j];
            for (std::size_t i = j; i < n; ++i) col_c[i] += dot * col_j[i];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += col_j[i] * b[i];
        dot = -dot / col_j[j];
        for (std::size_t i = j; i < n; ++i) b[i] += dot * col_j[i];
    }

    double max_diag = 0.0;
    for (const double d : r_diag) max_diag = std::max(max_diag, std::abs(d));
    for (std::size_t j = 0; j < cols; ++j) {
        if (std::abs(r_diag[j]) <= 1e-10 * max_diag)
            throw RankDeficiencyError("fit_ols: design matrix is rank deficient at column " +
                                      std::to_string(j));
    }

    std::vector<double> beta(cols);
    for (std::size_t jj = cols; jj-- > 0;) {
        double acc = b[jj];
        for (std::size_t c = jj + 1; c < cols; ++c) acc -= a[c * n + jj] * beta[c];
        beta[jj] = acc / r_diag[jj];
    }

    return LinearModel(beta[0], predictors,
                       std::vector<double>(beta.begin() + 1, beta.end()));
}

}  // namespace causalkit
