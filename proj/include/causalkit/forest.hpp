#pragma once

#include "causalkit/tree.hpp"

namespace causalkit {

// Bagged ensemble of regression trees; prediction is the mean over trees.
class RandomForest : public Model {
public:
    RandomForest(std::vector<std::string> predictors, std::vector<DecisionTree> trees,
                 std::vector<std::uint64_t> tree_seeds, ForestConfig config);

    const std::vector<DecisionTree>& trees() const { return trees_; }
    const std::vector<std::uint64_t>& tree_seeds() const { return seeds_; }
    const ForestConfig& config() const { return config_; }

    const std::vector<std::string>& predictor_names() const override { return names_; }
    void predict_rows(const double* rows, std::size_t n, double* out) const override;

private:
    std::vector<std::string> names_;
    std::vector<DecisionTree> trees_;
    std::vector<std::uint64_t> seeds_;
    ForestConfig config_;
};

// cfg.forest.n_trees trees, each fitted on a bootstrap resample (with
// replacement, size N) drawn from a per-tree stream derived from
// (seed, tree index), so tree t is reproducible independent of scheduling.
RandomForest fit_forest(const Dataset& train, const std::string& outcome, const FitConfig& cfg,
                        std::uint64_t seed);
RandomForest fit_forest(const Dataset& train, const std::string& outcome,
                        const std::vector<std::string>& predictors, const FitConfig& cfg,
                        std::uint64_t seed);

}  // namespace causalkit
