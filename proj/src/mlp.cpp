#include "causalkit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <cblas.h>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace {

// C (n x cols_out) = A (n x cols_in) * B, all row-major.
void matmul(const double* a, const double* b, double* c, std::size_t n, std::size_t cols_in,
            std::size_t cols_out) {
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(n),
                static_cast<int>(cols_out), static_cast<int>(cols_in), 1.0, a,
                static_cast<int>(cols_in), b, static_cast<int>(cols_out), 0.0, c,
                static_cast<int>(cols_out));
}

// C (rows_a x cols_b) = A^T (rows_a x n) * B (n x cols_b), A row-major n x rows_a.
void matmul_at_b(const double* a, const double* b, double* c, std::size_t n,
                 std::size_t rows_a, std::size_t cols_b) {
    cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(rows_a),
                static_cast<int>(cols_b), static_cast<int>(n), 1.0, a,
                static_cast<int>(rows_a), b, static_cast<int>(cols_b), 0.0, c,
                static_cast<int>(cols_b));
}

// C (n x rows_b) = A (n x cols) * B^T, B row-major rows_b x cols.
void matmul_a_bt(const double* a, const double* b, double* c, std::size_t n, std::size_t cols,
                 std::size_t rows_b) {
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(n),
                static_cast<int>(rows_b), static_cast<int>(cols), 1.0, a,
                static_cast<int>(cols), b, static_cast<int>(cols), 0.0, c,
                static_cast<int>(rows_b));
}

std::vector<std::size_t> layer_widths(std::size_t n_features, const MlpConfig& cfg) {
    if (cfg.hidden < 1 || cfg.layers < 1)
        throw ValidationError("mlp: hidden and layers must be >= 1");
    std::vector<std::size_t> widths{n_features};
    for (int l = 0; l < cfg.layers; ++l) widths.push_back(static_cast<std::size_t>(cfg.hidden));
    widths.push_back(1);
    return widths;
}

// Forward pass: acts[l] holds the ReLU activations of hidden layer l
// (row-major n x widths[l+1]); out receives the linear network output.
// The ReLU masks needed by backprop are recoverable from acts (a > 0 iff
// z > 0), so pre-activations are not kept.
void forward(const Mlp::Params& p, const std::vector<std::size_t>& widths, const double* x,
             std::size_t n, std::vector<std::vector<double>>& acts, std::vector<double>& out) {
    const std::size_t n_layers = p.weights.size();
    acts.resize(n_layers - 1);
    const double* input = x;
    std::vector<double> buf;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t fan_in = widths[l];
        const std::size_t fan_out = widths[l + 1];
        buf.assign(n * fan_out, 0.0);
        matmul(input, p.weights[l].data(), buf.data(), n, fan_in, fan_out);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < fan_out; ++j) buf[r * fan_out + j] += p.biases[l][j];
        if (l + 1 < n_layers) {
            for (double& v : buf) v = std::max(0.0, v);  // ReLU
            acts[l] = std::move(buf);
            buf.clear();
            input = acts[l].data();
        } else {
            out = std::move(buf);
        }
    }
}

struct GradientResult {
    Mlp::Params grads;
    double loss = 0.0;
};

GradientResult backward(const Mlp::Params& p, const std::vector<std::size_t>& widths,
                        const double* x, const std::vector<double>& y, std::size_t n) {
    std::vector<std::vector<double>> acts;
    std::vector<double> yhat;
    forward(p, widths, x, n, acts, yhat);
    const std::size_t n_layers = p.weights.size();

    GradientResult result;
    result.grads.weights.resize(n_layers);
    result.grads.biases.resize(n_layers);

    // Output layer: L = (1/n) sum (yhat - y)^2, dL/dyhat = 2/n (yhat - y).
    std::vector<double> delta(n);
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double diff = yhat[r] - y[r];
        loss += diff * diff;
        delta[r] = 2.0 * diff / static_cast<double>(n);
    }
    result.loss = loss / static_cast<double>(n);

    for (std::size_t l = n_layers; l-- > 0;) {
        const std::size_t fan_in = widths[l];
        const std::size_t fan_out = widths[l + 1];
        const double* input = l == 0 ? x : acts[l - 1].data();
        auto& gw = result.grads.weights[l];
        auto& gb = result.grads.biases[l];
        gw.resize(fan_in * fan_out);
        gb.assign(fan_out, 0.0);
        matmul_at_b(input, delta.data(), gw.data(), n, fan_in, fan_out);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < fan_out; ++j) gb[j] += delta[r * fan_out + j];
        if (l == 0) break;
        // delta_{l-1} = (delta_l W_l^T) ⊙ relu'(z_{l-1}); the mask comes
        // from the activation (a > 0 iff z > 0).
        std::vector<double> prev(n * fan_in);
        matmul_a_bt(delta.data(), p.weights[l].data(), prev.data(), n, fan_out, fan_in);
        const auto& a_prev = acts[l - 1];
        for (std::size_t i = 0; i < prev.size(); ++i)
            if (a_prev[i] <= 0.0) prev[i] = 0.0;
        delta = std::move(prev);
    }
    return result;
}

}  // namespace

Mlp::Mlp(std::vector<std::string> predictors, MlpConfig cfg, Params params,
         std::vector<double> loss_history)
    : names_(std::move(predictors)),
      cfg_(cfg),
      params_(std::move(params)),
      history_(std::move(loss_history)) {
    const auto widths = layer_widths(names_.size(), cfg_);
    if (params_.weights.size() != widths.size() - 1 ||
        params_.biases.size() != widths.size() - 1)
        throw ValidationError("Mlp: layer count mismatch");
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        if (params_.weights[l].size() != widths[l] * widths[l + 1] ||
            params_.biases[l].size() != widths[l + 1])
            throw ValidationError("Mlp: parameter shape mismatch at layer " + std::to_string(l));
        for (const double v : params_.weights[l])
            if (!std::isfinite(v)) throw ValidationError("Mlp: non-finite weight");
        for (const double v : params_.biases[l])
            if (!std::isfinite(v)) throw ValidationError("Mlp: non-finite bias");
    }
}

void Mlp::predict_rows(const double* rows, std::size_t n, double* out) const {
    const auto widths = layer_widths(names_.size(), cfg_);
    std::vector<std::vector<double>> acts;
    std::vector<double> yhat;
    forward(params_, widths, rows, n, acts, yhat);
    std::copy(yhat.begin(), yhat.end(), out);
}

Mlp::Params init_mlp_params(std::size_t n_features, const MlpConfig& cfg, std::uint64_t seed) {
    const auto widths = layer_widths(n_features, cfg);
    Rng rng(seed);
    Mlp::Params p;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const double limit =
            std::sqrt(6.0 / static_cast<double>(widths[l] + widths[l + 1]));
        std::vector<double> w(widths[l] * widths[l + 1]);
        for (double& v : w) v = (2.0 * rng.next_unit() - 1.0) * limit;
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(widths[l + 1], 0.0);
    }
    return p;
}

double mlp_loss(const Mlp& model, const Dataset& data, const std::string& outcome) {
    const auto x = data.rows_in_order(model.predictor_names());
    std::vector<double> yhat(data.n_rows());
    model.predict_rows(x.data(), data.n_rows(), yhat.data());
    return mse(yhat, data.col(outcome));
}

Mlp::Params mlp_loss_gradients(const Mlp& model, const Dataset& data,
                               const std::string& outcome) {
    const auto widths = layer_widths(model.predictor_names().size(), model.config());
    const auto x = data.rows_in_order(model.predictor_names());
    return backward(model.params(), widths, x.data(), data.col(outcome), data.n_rows()).grads;
}

Mlp fit_mlp(const Dataset& train, const std::string& outcome, const FitConfig& cfg,
            std::uint64_t seed) {
    std::vector<std::string> predictors;
    for (const auto& name : train.columns())
        if (name != outcome) predictors.push_back(name);
    return fit_mlp(train, outcome, predictors, cfg, seed);
}

Mlp fit_mlp(const Dataset& train, const std::string& outcome,
            const std::vector<std::string>& predictors, const FitConfig& cfg,
            std::uint64_t seed) {
    if (predictors.empty()) throw EmptyFeatureError("fit_mlp: no predictors");
    if (train.n_rows() < 2) throw InsufficientSamplesError("fit_mlp: need at least 2 rows");
    const MlpConfig& mc = cfg.mlp;
    if (mc.iterations < 0) throw ValidationError("fit_mlp: negative iteration count");
    if (!(mc.lr0 > 0.0)) throw ValidationError("fit_mlp: lr0 must be positive");

    const auto widths = layer_widths(predictors.size(), mc);
    const auto x = train.rows_in_order(predictors);
    const auto& y = train.col(outcome);
    const std::size_t n = train.n_rows();

    Mlp::Params p = init_mlp_params(predictors.size(), mc, seed);
    Mlp::Params m, v;  // Adam moments, zero-initialized to parameter shapes
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        m.weights.emplace_back(p.weights[l].size(), 0.0);
        m.biases.emplace_back(p.biases[l].size(), 0.0);
        v.weights.emplace_back(p.weights[l].size(), 0.0);
        v.biases.emplace_back(p.biases[l].size(), 0.0);
    }

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(mc.iterations));
    double lr = mc.lr0;
    std::deque<double> window;  // losses of the most recent steps, cleared on halving

    auto adam_update = [&](std::vector<double>& theta, std::vector<double>& m1,
                           std::vector<double>& m2, const std::vector<double>& g,
                           double bc1, double bc2) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m1[i] = mc.adam_beta1 * m1[i] + (1.0 - mc.adam_beta1) * g[i];
            m2[i] = mc.adam_beta2 * m2[i] + (1.0 - mc.adam_beta2) * g[i] * g[i];
            const double mhat = m1[i] / bc1;
            const double vhat = m2[i] / bc2;
            theta[i] -= lr * mhat / (std::sqrt(vhat) + mc.adam_eps);
        }
    };

    for (int step = 1; step <= mc.iterations; ++step) {
        GradientResult grad = backward(p, widths, x.data(), y, n);
        if (!std::isfinite(grad.loss))
            throw DivergenceError("fit_mlp: training loss became non-finite at step " +
                                  std::to_string(step));
        history.push_back(grad.loss);
        // Plateau rule: halve lr whenever the loss has failed to improve by
        // at least 1e-4 across the last 10 consecutive steps (floor 1e-6);
        // the window restarts after each halving.
        window.push_back(grad.loss);
        if (window.size() > 11) window.pop_front();
        if (window.size() == 11 && window.front() - window.back() < 1e-4) {
            lr = std::max(lr * 0.5, 1e-6);
            window.assign(1, grad.loss);
        }
        const double bc1 = 1.0 - std::pow(mc.adam_beta1, step);
        const double bc2 = 1.0 - std::pow(mc.adam_beta2, step);
        for (std::size_t l = 0; l < p.weights.size(); ++l) {
            adam_update(p.weights[l], m.weights[l], v.weights[l], grad.grads.weights[l], bc1,
                        bc2);
            adam_update(p.biases[l], m.biases[l], v.biases[l], grad.grads.biases[l], bc1, bc2);
        }
    }
    return Mlp(predictors, mc, std::move(p), std::move(history));
}

}  // namespace causalkit
