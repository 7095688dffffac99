#pragma once

#include <cstdint>

#include "causalkit/model.hpp"

namespace causalkit {

// One node of a regression tree, stored in a flat preorder array.
// feature < 0 marks a leaf; `value` is the node's mean response (the leaf
// weight), `impurity` its biased variance, `count` its sample count.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double impurity = 0.0;
    int count = 0;

    bool is_leaf() const { return feature < 0; }
};

// CART-style regression tree: greedy variance-reduction splits at midpoint
// thresholds, ties broken by (lower feature index, lower threshold).
class DecisionTree : public Model {
public:
    DecisionTree(std::vector<std::string> predictors, std::vector<TreeNode> nodes);

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    double predict_one(const double* row) const;

    const std::vector<std::string>& predictor_names() const override { return names_; }
    void predict_rows(const double* rows, std::size_t n, double* out) const override;

private:
    std::vector<std::string> names_;
    std::vector<TreeNode> nodes_;
};

// Fits one tree on the full training set using only the features in
// feature_mask.  cfg.forest supplies min_leaf and max_features (per-split
// feature subsampling, seeded).
DecisionTree fit_tree(const Dataset& train, const std::string& outcome, const FitConfig& cfg,
                      const std::vector<std::string>& feature_mask, std::uint64_t seed);

}  // namespace causalkit
