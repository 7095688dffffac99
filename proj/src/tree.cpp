#include "causalkit/tree.hpp"

#include <algorithm>
#include <cmath>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

DecisionTree::DecisionTree(std::vector<std::string> predictors, std::vector<TreeNode> nodes)
    : names_(std::move(predictors)), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw UntrainedError("DecisionTree: no nodes");
}

double DecisionTree::predict_one(const double* row) const {
    int idx = 0;
    while (!nodes_[static_cast<std::size_t>(idx)].is_leaf()) {
        const TreeNode& node = nodes_[static_cast<std::size_t>(idx)];
        idx = row[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(idx)].value;
}

void DecisionTree::predict_rows(const double* rows, std::size_t n, double* out) const {
    const std::size_t k = names_.size();
    for (std::size_t r = 0; r < n; ++r) out[r] = predict_one(rows + r * k);
}

namespace {

// Greedy CART builder over a row-major feature buffer.  Scratch vectors are
// reused across nodes; nodes are emitted in preorder.
class TreeBuilder {
public:
    TreeBuilder(const double* x, const std::vector<double>& y, std::size_t n_features,
                int min_leaf, double max_features, Rng& rng)
        : x_(x), y_(y), d_(n_features), min_leaf_(min_leaf), rng_(rng) {
        n_subsample_ = static_cast<std::size_t>(
            std::ceil(max_features * static_cast<double>(d_)));
        n_subsample_ = std::clamp<std::size_t>(n_subsample_, 1, d_);
        all_features_.resize(d_);
        for (std::size_t j = 0; j < d_; ++j) all_features_[j] = static_cast<int>(j);
    }

    std::vector<TreeNode> build(std::vector<int> rows) {
        nodes_.clear();
        grow(std::move(rows));
        return std::move(nodes_);
    }

private:
    struct Best {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;  // absolute SSE reduction
    };

    int grow(std::vector<int> rows) {
        const auto n = static_cast<double>(rows.size());
        double sum = 0.0, sum_sq = 0.0;
        for (const int r : rows) {
            sum += y_[static_cast<std::size_t>(r)];
            sum_sq += y_[static_cast<std::size_t>(r)] * y_[static_cast<std::size_t>(r)];
        }
        const double mean = sum / n;
        const double sse = std::max(0.0, sum_sq - sum * sum / n);

        const int index = static_cast<int>(nodes_.size());
        TreeNode node;
        node.value = mean;
        node.impurity = sse / n;
        node.count = static_cast<int>(rows.size());
        nodes_.push_back(node);

        // The relative floor absorbs cancellation noise so constant
        // responses never split.
        if (rows.size() < 2 * static_cast<std::size_t>(min_leaf_) || rows.size() < 2 ||
            sse <= 1e-12 * sum_sq)
            return index;

        const Best best = find_split(rows, sum);
        if (best.feature < 0) return index;

        std::vector<int> left, right;
        left.reserve(rows.size());
        right.reserve(rows.size());
        for (const int r : rows) {
            const double v = x_[static_cast<std::size_t>(r) * d_ +
                                static_cast<std::size_t>(best.feature)];
            (v <= best.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        nodes_[static_cast<std::size_t>(index)].feature = best.feature;
        nodes_[static_cast<std::size_t>(index)].threshold = best.threshold;
        const int left_index = grow(std::move(left));
        const int right_index = grow(std::move(right));
        nodes_[static_cast<std::size_t>(index)].left = left_index;
        nodes_[static_cast<std::size_t>(index)].right = right_index;
        return index;
    }

    Best find_split(const std::vector<int>& rows, double sum_total) {
        const std::size_t n = rows.size();
        const int* features = all_features_.data();
        std::size_t n_features = d_;
        if (n_subsample_ < d_) {
            // Partial Fisher-Yates draw, then ascending order so the
            // tie-break rule (lowest feature index first) stays intact.
            chosen_ = all_features_;
            for (std::size_t i = 0; i < n_subsample_; ++i) {
                const std::size_t j =
                    i + static_cast<std::size_t>(rng_.next_below(d_ - i));
                std::swap(chosen_[i], chosen_[j]);
            }
            chosen_.resize(n_subsample_);
            std::sort(chosen_.begin(), chosen_.end());
            features = chosen_.data();
            n_features = n_subsample_;
        }

        Best best;
        order_.resize(n);
        for (std::size_t fi = 0; fi < n_features; ++fi) {
            const auto f = static_cast<std::size_t>(features[fi]);
            for (std::size_t i = 0; i < n; ++i) order_[i] = rows[i];
            std::sort(order_.begin(), order_.end(), [&](int a, int b) {
                const double va = x_[static_cast<std::size_t>(a) * d_ + f];
                const double vb = x_[static_cast<std::size_t>(b) * d_ + f];
                if (va != vb) return va < vb;
                return a < b;
            });
            // Scan split positions left block = order_[0..i]; a position is
            // valid when both sides meet min_leaf and the feature value
            // strictly increases across the boundary.
            double sum_left = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const auto r = static_cast<std::size_t>(order_[i]);
                sum_left += y_[r];
                const auto n_left = i + 1;
                if (n_left < static_cast<std::size_t>(min_leaf_)) continue;
                if (n - n_left < static_cast<std::size_t>(min_leaf_)) break;
                const double lo = x_[r * d_ + f];
                const double hi = x_[static_cast<std::size_t>(order_[i + 1]) * d_ + f];
                if (lo == hi) continue;
                const double sum_right = sum_total - sum_left;
                // SSE reduction = sum_l^2/n_l + sum_r^2/n_r - sum^2/n.
                const double gain = sum_left * sum_left / static_cast<double>(n_left) +
                                    sum_right * sum_right / static_cast<double>(n - n_left) -
                                    sum_total * sum_total / static_cast<double>(n);
                if (gain > best.gain) {
                    double threshold = lo + 0.5 * (hi - lo);
                    if (threshold == hi) threshold = lo;  // keep lo strictly left
                    best.feature = features[fi];
                    best.threshold = threshold;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    const double* x_;
    const std::vector<double>& y_;
    std::size_t d_;
    int min_leaf_;
    Rng& rng_;
    std::size_t n_subsample_;
    std::vector<int> all_features_;
    std::vector<int> chosen_;
    std::vector<int> order_;
    std::vector<TreeNode> nodes_;
};

}  // namespace

namespace detail {

DecisionTree build_tree(const double* x, const std::vector<double>& y,
                        const std::vector<std::string>& predictors,
                        const std::vector<int>& rows, const ForestConfig& cfg, Rng& rng) {
    if (predictors.empty()) throw EmptyFeatureError("tree: no features to split on");
    if (rows.empty()) throw InsufficientSamplesError("tree: no training rows");
    if (cfg.min_leaf < 1) throw ValidationError("tree: min_leaf must be >= 1");
    if (!(cfg.max_features > 0.0) || cfg.max_features > 1.0)
        throw ValidationError("tree: max_features must lie in (0, 1]");
    TreeBuilder builder(x, y, predictors.size(), cfg.min_leaf, cfg.max_features, rng);
    return DecisionTree(predictors, builder.build(rows));
}

}  // namespace detail

DecisionTree fit_tree(const Dataset& train, const std::string& outcome, const FitConfig& cfg,
                      const std::vector<std::string>& feature_mask, std::uint64_t seed) {
    if (feature_mask.empty()) throw EmptyFeatureError("fit_tree: empty feature mask");
    for (const auto& f : feature_mask)
        if (f == outcome) throw ConfigError("fit_tree: outcome cannot be a feature");
    const auto x = train.rows_in_order(feature_mask);
    const auto& y = train.col(outcome);
    std::vector<int> rows(train.n_rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
    Rng rng(seed);
    return detail::build_tree(x.data(), y, feature_mask, rows, cfg.forest, rng);
}

}  // namespace causalkit
