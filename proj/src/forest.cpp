#include "causalkit/forest.hpp"

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace detail {
DecisionTree build_tree(const double* x, const std::vector<double>& y,
                        const std::vector<std::string>& predictors,
                        const std::vector<int>& rows, const ForestConfig& cfg, Rng& rng);
}  // namespace detail

RandomForest::RandomForest(std::vector<std::string> predictors, std::vector<DecisionTree> trees,
                           std::vector<std::uint64_t> tree_seeds, ForestConfig config)
    : names_(std::move(predictors)),
      trees_(std::move(trees)),
      seeds_(std::move(tree_seeds)),
      config_(config) {
    if (trees_.empty()) throw UntrainedError("RandomForest: needs at least one tree");
}

void RandomForest::predict_rows(const double* rows, std::size_t n, double* out) const {
    const std::size_t k = names_.size();
    for (std::size_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (const auto& tree : trees_) acc += tree.predict_one(rows + r * k);
        out[r] = acc / static_cast<double>(trees_.size());
    }
}

RandomForest fit_forest(const Dataset& train, const std::string& outcome, const FitConfig& cfg,
                        std::uint64_t seed) {
    std::vector<std::string> predictors;
    for (const auto& name : train.columns())
        if (name != outcome) predictors.push_back(name);
    return fit_forest(train, outcome, predictors, cfg, seed);
}

RandomForest fit_forest(const Dataset& train, const std::string& outcome,
                        const std::vector<std::string>& predictors, const FitConfig& cfg,
                        std::uint64_t seed) {
    if (cfg.forest.n_trees < 1) throw ValidationError("fit_forest: n_trees must be >= 1");
    if (predictors.empty()) throw EmptyFeatureError("fit_forest: no predictors");
    const auto x = train.rows_in_order(predictors);
    const auto& y = train.col(outcome);
    const std::size_t n = train.n_rows();

    std::vector<DecisionTree> trees;
    std::vector<std::uint64_t> seeds;
    trees.reserve(static_cast<std::size_t>(cfg.forest.n_trees));
    seeds.reserve(static_cast<std::size_t>(cfg.forest.n_trees));
    for (int t = 0; t < cfg.forest.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
        seeds.push_back(tree_seed);
        Rng rng(tree_seed);
        // Bootstrap resample, then the same stream feeds per-split feature
        // draws inside the builder.
        std::vector<int> rows(n);
        for (std::size_t i = 0; i < n; ++i)
            rows[i] = static_cast<int>(rng.next_below(n));
        trees.push_back(detail::build_tree(x.data(), y, predictors, rows, cfg.forest, rng));
    }
    return RandomForest(predictors, std::move(trees), std::move(seeds), cfg.forest);
}

}  // namespace causalkit
