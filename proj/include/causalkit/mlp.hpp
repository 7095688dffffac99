#pragma once

#include <cstdint>

#include "causalkit/model.hpp"

namespace causalkit {

// Fully connected ReLU network with `layers` hidden layers of width
// `hidden` and a linear scalar output, trained full-batch with Adam.
class Mlp : public Model {
public:
    // weights[l] is row-major (fan_in x fan_out); biases[l] has fan_out
    // entries.  Layer widths: d -> hidden -> ... -> hidden -> 1.
    struct Params {
        std::vector<std::vector<double>> weights;
        std::vector<std::vector<double>> biases;
    };

    Mlp(std::vector<std::string> predictors, MlpConfig cfg, Params params,
        std::vector<double> loss_history);

    const Params& params() const { return params_; }
    const MlpConfig& config() const { return cfg_; }
    // Training loss per Adam step (length = cfg.iterations).
    const std::vector<double>& loss_history() const { return history_; }

    const std::vector<std::string>& predictor_names() const override { return names_; }
    void predict_rows(const double* rows, std::size_t n, double* out) const override;

private:
    std::vector<std::string> names_;
    MlpConfig cfg_;
    Params params_;
    std::vector<double> history_;
};

// Glorot-uniform initial parameters (zero biases) for the given layout.
Mlp::Params init_mlp_params(std::size_t n_features, const MlpConfig& cfg, std::uint64_t seed);

// Full-batch mean-squared-error loss of the model on (rows, y).
double mlp_loss(const Mlp& model, const Dataset& data, const std::string& outcome);

// Backpropagated gradients of that loss, same layout as Params.
Mlp::Params mlp_loss_gradients(const Mlp& model, const Dataset& data, const std::string& outcome);

// Full-batch Adam for cfg.mlp.iterations steps from a seeded Glorot init.
// The learning rate starts at cfg.mlp.lr0 and halves (floor 1e-6) whenever
// the loss has failed to improve by at least 1e-4 across the last 10
// consecutive steps; the comparison window restarts after each halving.
Mlp fit_mlp(const Dataset& train, const std::string& outcome, const FitConfig& cfg,
            std::uint64_t seed);
Mlp fit_mlp(const Dataset& train, const std::string& outcome,
            const std::vector<std::string>& predictors, const FitConfig& cfg,
            std::uint64_t seed);

}  // namespace causalkit
